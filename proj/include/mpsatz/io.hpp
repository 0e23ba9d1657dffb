#pragma once

// JSON forms of certificates, search outcomes and the other results.
// Certificates use format "mpsatz-certificate" version 1 (see
// schemas/certificate.schema.json).

#include "mpsatz/certify.hpp"
#include "mpsatz/diag.hpp"
#include "mpsatz/univar.hpp"

namespace mpsatz {

inline json dense_to_json(const Eigen::MatrixXd& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) r.push_back(a(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline Eigen::MatrixXd dense_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j.at(static_cast<std::size_t>(i)).size()) != cols) throw ParseError("ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) a(i, k) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
  }
  return a;
}

inline json rat_matrix_to_json(const RatMatrix& a) {
  json rows = json::array();
  for (int i = 0; i < a.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < a.cols(); ++j) r.push_back(rational_to_json(a(i, j)));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline RatMatrix rat_matrix_from_json(const json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows ? static_cast<int>(j.at(0).size()) : 0;
  RatMatrix a(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j.at(static_cast<std::size_t>(i)).size()) != cols) throw ParseError("ragged matrix");
    for (int k = 0; k < cols; ++k) a(i, k) = rational_from_json(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
  }
  return a;
}

inline json basis_to_json(const LocalizingBasis& b) {
  json mons = json::array();
  for (const auto& m : b.monomials) mons.push_back(m.exponents());
  return json{{"degree", b.degree}, {"compact", b.compact}, {"t", b.t}, {"monomials", mons}};
}

inline LocalizingBasis basis_from_json(const json& j, int generator, int n) {
  LocalizingBasis b;
  b.generator = generator;
  b.degree = j.value("degree", 0);
  b.compact = j.value("compact", true);
  b.t = j.value("t", 1);
  if (j.contains("monomials")) {
    for (const auto& m : j.at("monomials")) {
      auto e = m.get<std::vector<int>>();
      if (static_cast<int>(e.size()) != n) throw ParseError("basis monomial length differs from n");
      b.monomials.emplace_back(std::move(e));
    }
  } else {
    b.monomials = monomials_up_to(n, b.degree);
  }
  return b;
}

inline json report_to_json(const ResidualReport& r) {
  json j{{"mode", r.mode == VerifyMode::Exact ? "exact" : "numeric"},
         {"passed", r.passed},
         {"exact_zero", r.exact_zero},
         {"max_deviation", r.max_deviation},
         {"min_gram_eigenvalue", r.min_gram_eigenvalue},
         {"tolerance", r.tolerance}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline json certificate_to_json(const MembershipCertificate& c, const ResidualReport* report = nullptr) {
  json j;
  j["format"] = "mpsatz-certificate";
  j["version"] = 1;
  j["module"] = module_to_json(c.module);
  j["target"] = matrix_poly_to_json(c.target);
  j["degree"] = c.degree;
  j["parts"] = json::array();
  for (const auto& p : c.parts) {
    json jp{{"generator", p.generator}, {"basis", basis_to_json(p.basis)}};
    if (p.has_gram) {
      jp["gram"] = dense_to_json(p.gram);
      if (p.exact_gram) jp["exact_gram"] = rat_matrix_to_json(*p.exact_gram);
    }
    jp["factors"] = json::array();
    for (const auto& f : p.factors) jp["factors"].push_back(matrix_poly_to_json(f));
    if (p.exact_factors_valid) {
      jp["exact_factors"] = json::array();
      for (const auto& wf : p.exact_factors)
        jp["exact_factors"].push_back(json{{"weight", rational_to_json(wf.weight)}, {"p", matrix_poly_to_json(wf.p)}});
    }
    j["parts"].push_back(std::move(jp));
  }
  j["equalities"] = json::array();
  for (const auto& e : c.equalities) {
    json je{{"equality", e.equality}, {"multiplier", matrix_poly_to_json(e.multiplier)}};
    if (e.exact_multiplier) je["exact_multiplier"] = matrix_poly_to_json(*e.exact_multiplier);
    j["equalities"].push_back(std::move(je));
  }
  if (report) j["report"] = report_to_json(*report);
  return j;
}

inline MembershipCertificate certificate_from_json(const json& j) {
  if (j.value("format", std::string("mpsatz-certificate")) != "mpsatz-certificate") throw ParseError("not a certificate");
  MembershipCertificate c;
  c.module = module_from_json(j.at("module"));
  const int n = c.module.n, t = c.module.t;
  c.target = matrix_poly_from_json(j.at("target"));
  if (c.target.rows() != t || c.target.cols() != t || c.target.num_vars() != n)
    throw DimensionMismatch("certificate: target shape differs from module");
  c.degree = j.value("degree", 0);
  for (const auto& jp : j.value("parts", json::array())) {
    CertificatePart p;
    p.generator = jp.at("generator").get<int>();
    if (p.generator < 0 || p.generator >= c.module.num_generators()) throw MalformedInstance("certificate: generator index out of range");
    p.basis = basis_from_json(jp.value("basis", json{{"t", t}}), p.generator, n);
    if (jp.contains("gram") || jp.contains("exact_gram")) {
      p.has_gram = true;
      if (jp.contains("exact_gram")) p.exact_gram = rat_matrix_from_json(jp.at("exact_gram"));
      p.gram = jp.contains("gram") ? dense_from_json(jp.at("gram")) : p.exact_gram->to_double();
      if (p.gram.rows() != p.basis.size() || p.gram.cols() != p.basis.size())
        throw DimensionMismatch("certificate: Gram block size differs from basis");
      if (p.exact_gram && (p.exact_gram->rows() != p.basis.size() || p.exact_gram->cols() != p.basis.size()))
        throw DimensionMismatch("certificate: exact Gram block size differs from basis");
    }
    for (const auto& f : jp.value("factors", json::array())) p.factors.push_back(matrix_poly_from_json(f).cast<double>());
    if (jp.contains("exact_factors")) {
      p.exact_factors_valid = true;
      for (const auto& wf : jp.at("exact_factors"))
        p.exact_factors.push_back({rational_from_json(wf.at("weight")), matrix_poly_from_json(wf.at("p"))});
      if (p.factors.empty())
        for (const auto& wf : p.exact_factors) {
          if (sgn(wf.weight) < 0) continue;  // caught by exact verification
          p.factors.push_back(wf.p.cast<double>() * std::sqrt(wf.weight.get_d()));
        }
    }
    c.parts.push_back(std::move(p));
  }
  for (const auto& je : j.value("equalities", json::array())) {
    EqualityPart e;
    e.equality = je.at("equality").get<int>();
    if (e.equality < 0 || e.equality >= static_cast<int>(c.module.equalities.size()))
      throw MalformedInstance("certificate: equality index out of range");
    if (je.contains("exact_multiplier")) e.exact_multiplier = matrix_poly_from_json(je.at("exact_multiplier"));
    e.multiplier = je.contains("multiplier") ? matrix_poly_from_json(je.at("multiplier")).cast<double>() : e.exact_multiplier->cast<double>();
    c.equalities.push_back(std::move(e));
  }
  return c;
}

inline json extraction_to_json(const ExtractionResult& e) {
  json j{{"ok", e.ok}, {"max_error", e.max_error}};
  if (!e.reason.empty()) j["reason"] = e.reason;
  if (e.ok) j["pair"] = pair_to_json(e.pair);
  return j;
}

inline json point_report_to_json(const PointReport& r) {
  return json{{"value", r.value}, {"generator_min", r.generator_min}, {"in_region", r.in_region}, {"success", r.success}};
}

inline json outcome_to_json(const SearchOutcome& o) {
  json j;
  j["verdict"] = to_string(o.verdict);
  j["degree"] = o.degree;
  j["log"] = json::array();
  for (const auto& l : o.log) {
    json jl{{"degree", l.degree}, {"status", l.status}, {"iterations", l.iterations}};
    if (!l.note.empty()) jl["note"] = l.note;
    j["log"].push_back(std::move(jl));
  }
  j["warnings"] = o.warnings;
  if (o.certificate) j["certificate"] = certificate_to_json(*o.certificate, &o.report);
  if (o.state) j["state"] = state_to_json(*o.state);
  if (o.extraction) j["extraction"] = extraction_to_json(*o.extraction);
  if (o.point_report) j["point_report"] = point_report_to_json(*o.point_report);
  return j;
}

inline json nnsd_to_json(const NnsdOutcome& o) {
  json j = outcome_to_json(o.search);
  j["transformers"] = json::array();
  for (const auto& wf : o.transformers)
    j["transformers"].push_back(json{{"weight", rational_to_json(wf.weight)}, {"p", matrix_poly_to_json(wf.p)}});
  if (o.transformers.empty())
    for (const auto& p : o.numeric_transformers) j["transformers"].push_back(json{{"weight", 1}, {"p", matrix_poly_to_json(p)}});
  if (o.rearranged) j["rearranged"] = certificate_to_json(*o.rearranged, o.rearranged_report ? &*o.rearranged_report : nullptr);
  return j;
}

inline json char_poly_to_json(const CharPolyResult& c) {
  return json{{"kind", c.kind}, {"q", polynomial_terms_to_json(c.q)}, {"cayley_hamilton", c.cayley_hamilton}};
}

inline json real_eig_to_json(const RealEigenOutcome& o) {
  json j = outcome_to_json(o.search);
  j["char_poly"] = char_poly_to_json(o.char_poly);
  j["matrix_verified"] = o.matrix_verified;
  j["matrix_exact"] = o.matrix_exact;
  j["matrix_deviation"] = o.matrix_deviation;
  return j;
}

inline json jakubovic_to_json(const JakubovicResult& r) {
  json j{{"g", matrix_poly_to_json(r.g)}, {"residual", r.residual}, {"scale", r.scale}, {"exact", r.exact}};
  if (r.exact) {
    j["weights"] = json::array();
    for (const auto& w : r.weights) j["weights"].push_back(rational_to_json(w));
    j["rows"] = matrix_poly_to_json(*r.exact_rows);
  }
  return j;
}

inline json branches_to_json(const std::vector<DiagBranch>& bs) {
  json arr = json::array();
  for (const auto& b : bs) arr.push_back(json{{"label", b.label}, {"C", matrix_poly_to_json(b.c)}, {"D", matrix_poly_to_json(b.d)}});
  return arr;
}

inline json arch_to_json(const std::optional<ArchWitness>& w) {
  if (!w) return json{{"found", false}};
  return json{{"found", true}, {"N", rational_to_json(w->N)}, {"certificate", certificate_to_json(w->certificate, &w->report)}};
}

inline json sample_to_json(const SampleResult& s, const std::optional<MinEigStats>& st = std::nullopt) {
  json j{{"points", s.points}, {"draws", s.draws}, {"acceptance_rate", s.acceptance_rate}, {"empty_suspected", s.empty_suspected}};
  if (st) {
    j["min_eigenvalue"] = st->min;
    j["argmin"] = st->argmin;
    j["histogram"] = json{{"edges", st->edges}, {"counts", st->histogram}};
  }
  return j;
}

}  // namespace mpsatz
