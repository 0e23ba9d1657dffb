#pragma once

#include <cctype>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"
#include "mpsatz/matrix_poly.hpp"

namespace mpsatz {

using json = nlohmann::json;

namespace detail {

inline json integer_to_json(const Integer& z) {
  if (z.fits_slong_p()) return json(z.get_si());
  return json(z.get_str());
}

inline Integer integer_from_json(const json& j) {
  if (j.is_number_integer()) return Integer(j.get<long>());
  if (j.is_string()) {
    Integer z;
    if (z.set_str(j.get<std::string>(), 10) != 0) throw ParseError("bad integer: " + j.get<std::string>());
    return z;
  }
  throw ParseError("expected integer (number or decimal string)");
}

}  // namespace detail

inline json rational_to_json(const Rational& q) {
  return json{{"num", detail::integer_to_json(q.get_num())}, {"den", detail::integer_to_json(q.get_den())}};
}

inline Rational rational_from_json(const json& j) {
  if (j.is_object()) {
    Integer num = detail::integer_from_json(j.at("num"));
    Integer den = j.contains("den") ? detail::integer_from_json(j.at("den")) : Integer(1);
    if (den == 0) throw ParseError("zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number_float()) return exact_rational(j.get<double>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw ParseError("expected rational");
}

/// Parses expressions such as "x1^2*x2 - 3/4*x1 + 2" or "X^2 + 1".  Variables
/// are x1..xn; when n <= 3 the names x/y/z (or X/Y/Z) and, for n = 1, Z are
/// also accepted.  Coefficients are integers, fractions or decimals (exact).
inline RatPoly parse_polynomial(const std::string& text, int n) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto read_uint = [&]() -> std::string {
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    return text.substr(start, pos - start);
  };
  auto var_index = [&](const std::string& name) -> int {
    if (name.size() > 1 && (name[0] == 'x' || name[0] == 'X')) {
      bool digits = true;
      for (std::size_t k = 1; k < name.size(); ++k) digits &= std::isdigit(static_cast<unsigned char>(name[k])) != 0;
      if (digits) {
        int i = std::stoi(name.substr(1)) - 1;
        if (i < 0 || i >= n) throw ParseError("variable out of range: " + name);
        return i;
      }
    }
    if (name.size() == 1) {
      char c = static_cast<char>(std::tolower(static_cast<unsigned char>(name[0])));
      int i = -1;
      if (c == 'x') i = 0;
      if (c == 'y') i = 1;
      if (c == 'z') i = (n == 1) ? 0 : 2;
      if (i >= 0 && i < n) return i;
    }
    throw ParseError("unknown variable: " + name);
  };

  RatPoly result(n);
  skip();
  if (pos == text.size()) throw ParseError("empty polynomial");
  bool first = true;
  while (true) {
    skip();
    if (pos >= text.size()) break;
    int sign = 1;
    if (text[pos] == '+' || text[pos] == '-') {
      sign = text[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (!first) {
      throw ParseError("expected + or - in: " + text);
    }
    first = false;
    Rational coeff(sign);
    Monomial mono(n);
    bool have_factor = false;
    while (true) {
      skip();
      if (pos >= text.size()) break;
      char c = text[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::string a = read_uint();
        Rational v;
        if (pos < text.size() && text[pos] == '.') {
          ++pos;
          std::string frac = read_uint();
          Integer scale = 1;
          for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
          v = Rational(Integer((a.empty() ? "0" : a) + frac), scale);
        } else {
          v = Rational(Integer(a));
        }
        skip();
        if (pos < text.size() && text[pos] == '/') {
          ++pos;
          skip();
          std::string b = read_uint();
          if (b.empty() || Integer(b) == 0) throw ParseError("bad denominator in: " + text);
          v /= Rational(Integer(b));
        }
        v.canonicalize();
        coeff *= v;
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = pos;
        while (pos < text.size() && std::isalnum(static_cast<unsigned char>(text[pos]))) ++pos;
        int idx = var_index(text.substr(start, pos - start));
        int power = 1;
        skip();
        if (pos < text.size() && text[pos] == '^') {
          ++pos;
          skip();
          std::string e = read_uint();
          if (e.empty()) throw ParseError("missing exponent in: " + text);
          power = std::stoi(e);
        }
        mono = mono * Monomial::variable(n, idx, power);
        skip();
        if (pos < text.size() && text[pos] == '/') {
          ++pos;
          skip();
          std::string b = read_uint();
          if (b.empty() || Integer(b) == 0) throw ParseError("bad denominator in: " + text);
          coeff /= Rational(Integer(b));
        }
      } else {
        throw ParseError(std::string("unexpected character '") + c + "' in: " + text);
      }
      have_factor = true;
      skip();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        continue;
      }
      break;
    }
    if (!have_factor) throw ParseError("dangling sign in: " + text);
    result.add_term(mono, coeff);
  }
  return result;
}

inline json polynomial_terms_to_json(const RatPoly& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) {
    json t = rational_to_json(c);
    t["monomial"] = m.exponents();
    terms.push_back(std::move(t));
  }
  return terms;
}

inline RatPoly polynomial_from_json(const json& j, int n) {
  if (j.is_string()) return parse_polynomial(j.get<std::string>(), n);
  if (j.is_number()) return RatPoly(n, rational_from_json(j));
  if (!j.is_array()) throw ParseError("polynomial entry must be a term list or a string");
  RatPoly p(n);
  for (const auto& t : j) {
    auto exps = t.at("monomial").get<std::vector<int>>();
    if (static_cast<int>(exps.size()) != n) throw ParseError("monomial length differs from n");
    p.add_term(Monomial(exps), rational_from_json(t));
  }
  return p;
}

/// {"n":..,"t":..,"entries":[[terms,...],...]}; rectangular matrices carry
/// "rows"/"cols" instead of (or besides) "t".
inline json matrix_poly_to_json(const RatMatrixPoly& m) {
  json j;
  j["n"] = m.num_vars();
  if (m.is_square()) {
    j["t"] = m.rows();
  } else {
    j["rows"] = m.rows();
    j["cols"] = m.cols();
  }
  json entries = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(polynomial_terms_to_json(m(i, k)));
    entries.push_back(std::move(row));
  }
  j["entries"] = std::move(entries);
  return j;
}

inline json matrix_poly_to_json(const RealMatrixPoly& m) { return matrix_poly_to_json(m.cast<Rational>()); }

inline RatMatrixPoly matrix_poly_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  int rows = 0, cols = 0;
  if (j.contains("rows")) {
    rows = j.at("rows").get<int>();
    cols = j.at("cols").get<int>();
  } else {
    rows = cols = j.at("t").get<int>();
  }
  const json& entries = j.at("entries");
  if (!entries.is_array() || static_cast<int>(entries.size()) != rows) throw ParseError("entries: wrong row count");
  RatMatrixPoly m(rows, cols, n);
  for (int i = 0; i < rows; ++i) {
    const json& row = entries[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) throw ParseError("entries: wrong column count");
    for (int k = 0; k < cols; ++k) m(i, k) = polynomial_from_json(row[static_cast<std::size_t>(k)], n);
  }
  return m;
}

}  // namespace mpsatz
