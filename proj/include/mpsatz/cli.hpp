#pragma once

// Command-line front end.  run() is the whole program minus main(), so tests
// can drive it with argument vectors.
//
// Exit codes: 0 certificate found / verified, 1 separated / refuted,
// 2 exhausted / unknown, 3 usage or input error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "mpsatz/io.hpp"

namespace mpsatz::cli {

enum Exit : int { kFound = 0, kRefuted = 1, kExhausted = 2, kInputError = 3 };

inline int exit_for(Verdict v) {
  switch (v) {
    case Verdict::CertificateFound: return kFound;
    case Verdict::Separated: return kRefuted;
    default: return kExhausted;
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream o(path);
  if (!o) throw ParseError("cannot write " + path);
  o << j.dump(2) << "\n";
}

struct Settings {
  int dmax = -1;
  int dmin = -1;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  bool numeric = false;
  int branch_cap = 64;
  std::string json_path;
  std::string module_path;
  std::string state_out = "separating_state.json";
  std::string function_path;
  int count = 100;
  double box = 2.0;
  long nmax = 1024;
  double eps = 1e-6;
  int samples = 1000;
  bool assume_archimedean = false;
  bool box_given = false;
  std::string csv_path;
  std::string sdp_dump;
};

inline ModulePresentation load_module(const Settings& s, int n, int t) {
  if (s.module_path.empty()) return ModulePresentation(n, t);
  ModulePresentation m = module_from_json(read_json_file(s.module_path));
  if (m.n != n || m.t != t) throw DimensionMismatch("module shape (n, t) differs from the input matrix polynomial");
  return m;
}

inline SearchOptions search_options(const Settings& s) {
  SearchOptions o;
  o.d_min = s.dmin;
  o.d_max = s.dmax;
  o.feas_tol = s.tol;
  o.try_exact = !s.numeric;
  return o;
}

inline void emit(const Settings& s, const json& j) {
  if (!s.json_path.empty()) write_json_file(s.json_path, j);
}

inline void print_log(std::ostream& out, const SearchOutcome& o) {
  for (const auto& l : o.log) {
    out << "  d=" << l.degree << "  " << l.status << "  iterations=" << l.iterations;
    if (!l.note.empty()) out << "  (" << l.note << ")";
    out << "\n";
  }
  for (const auto& w : o.warnings) out << "  warning: " << w << "\n";
}

inline void print_outcome(std::ostream& out, const SearchOutcome& o) {
  out << "verdict: " << to_string(o.verdict) << " (degree " << o.degree << ")\n";
  print_log(out, o);
  if (o.certificate)
    out << "certificate: " << (o.report.mode == VerifyMode::Exact ? "exact" : "numeric")
        << " verification " << (o.report.passed ? "passed" : "failed") << ", max deviation " << o.report.max_deviation << "\n";
  if (o.extraction) {
    if (o.extraction->ok) {
      out << "extracted point x = " << json(o.extraction->pair.x).dump() << ", v = " << json(o.extraction->pair.v).dump() << "\n";
      if (o.point_report) out << "  <f(x)v,v> = " << o.point_report->value << ", in region: " << o.point_report->in_region << "\n";
    } else {
      out << "no point extracted: " << o.extraction->reason << "\n";
    }
  }
}

inline int cmd_check(const Settings& s, const std::string& fpath, std::ostream& out) {
  const RatMatrixPoly f = matrix_poly_from_json(read_json_file(fpath));
  const ModulePresentation m = load_module(s, f.num_vars(), f.rows());
  SearchOutcome o = find_membership(f, m, search_options(s));
  print_outcome(out, o);
  if (o.verdict == Verdict::Separated && o.state && !s.state_out.empty()) {
    json st = state_to_json(*o.state);
    if (o.extraction) st["extraction"] = extraction_to_json(*o.extraction);
    write_json_file(s.state_out, st);
    out << "separating state written to " << s.state_out << "\n";
  }
  if (!s.sdp_dump.empty())
    write_json_file(s.sdp_dump, sdp_instance_to_json(build_membership_sdp(f, m, std::max(o.degree, 0)).sdp));
  emit(s, outcome_to_json(o));
  return exit_for(o.verdict);
}

inline int cmd_nnsd(const Settings& s, const std::string& fpath, std::ostream& out) {
  const RatMatrixPoly f = matrix_poly_from_json(read_json_file(fpath));
  const ModulePresentation m = load_module(s, f.num_vars(), f.rows());
  SearchOptions o = search_options(s);
  NnsdOutcome r = find_nnsd_certificate(f, m, o, s.assume_archimedean);
  print_outcome(out, r.search);
  if (r.rearranged_report)
    out << "rearranged identity: " << (r.rearranged_report->passed ? "verified" : "failed") << " ("
        << (r.rearranged_report->mode == VerifyMode::Exact ? "exact" : "numeric") << ")\n";
  emit(s, nnsd_to_json(r));
  return exit_for(r.search.verdict);
}

inline int cmd_factor(const Settings& s, const std::string& fpath, std::ostream& out) {
  const RatMatrixPoly f = matrix_poly_from_json(read_json_file(fpath));
  try {
    JakubovicResult r = jakubovic_factor(f, s.tol);
    out << "g = " << r.g.to_string() << "\n";
    out << "residual " << r.residual << " (scale " << r.scale << "), exact: " << (r.exact ? "yes" : "no") << "\n";
    emit(s, jakubovic_to_json(r));
    return kFound;
  } catch (const NotPsdOnLine& e) {
    out << "not PSD on the line: lambda_min(f(" << e.witness() << ")) = " << e.min_eigenvalue() << "\n";
    emit(s, json{{"error", "NotPsdOnLine"}, {"witness", e.witness()}, {"min_eigenvalue", e.min_eigenvalue()}});
    return kRefuted;
  }
}

inline int cmd_diag(const Settings& s, const std::string& fpath, std::ostream& out) {
  const RatMatrixPoly f = matrix_poly_from_json(read_json_file(fpath));
  std::vector<DiagBranch> bs;
  bool capped = false;
  try {
    bs = diagonalize_branching(f, s.branch_cap);
  } catch (const BranchCapExceeded& e) {
    bs = e.partial();
    capped = true;
  }
  bool all_ok = true;
  for (const auto& b : bs) {
    const bool ok = congruence_holds(f, b);
    all_ok = all_ok && ok;
    out << "[" << b.label << "] D = " << b.d.to_string() << (ok ? "" : "  CONGRUENCE FAILS") << "\n";
  }
  EquivalenceReport eq = check_pointwise_equivalence(f, bs, s.samples, s.seed);
  out << bs.size() << " branch(es); sampled equivalence: " << eq.failures << " violation(s) in " << eq.samples << " points\n";
  if (capped) out << "branch cap " << s.branch_cap << " exceeded; results are partial\n";
  emit(s, json{{"branches", branches_to_json(bs)},
               {"cap_exceeded", capped},
               {"congruence_ok", all_ok},
               {"equivalence", {{"samples", eq.samples}, {"failures", eq.failures}}}});
  if (!all_ok || !eq.passed()) return kRefuted;
  return capped ? kExhausted : kFound;
}

inline int cmd_arch(const Settings& s, const std::string& gpath, std::ostream& out) {
  const ModulePresentation m = module_from_json(read_json_file(gpath));
  SearchOptions o = search_options(s);
  auto w = archimedean_witness(m, s.nmax, s.dmax >= 0 ? s.dmax : 3, o);
  if (w)
    out << "archimedean witness: N = " << w->N << " (" << (w->report.mode == VerifyMode::Exact ? "exact" : "numeric") << ")\n";
  else
    out << "NotFound\n";
  emit(s, arch_to_json(w));
  return w ? kFound : kExhausted;
}

inline int cmd_real_eig(const Settings& s, const std::string& fpath, std::ostream& out) {
  const RatMatrixPoly f = matrix_poly_from_json(read_json_file(fpath));
  std::vector<RatPoly> g;
  if (!s.module_path.empty()) {
    const ModulePresentation m = module_from_json(read_json_file(s.module_path));
    if (m.t != 1 || m.n != f.num_vars()) throw DimensionMismatch("real-eig-cert: module must be scalar (t = 1) in the variables of f");
    for (const auto& gi : m.generators) g.push_back(gi(0, 0));
  }
  RealEigenOutcome r = real_eigenvalue_certificate(f, g, search_options(s));
  out << "characteristic polynomial: " << r.char_poly.q.to_string() << " (last variable is Y)\n";
  print_outcome(out, r.search);
  if (r.search.verdict == Verdict::CertificateFound)
    out << "matrix identity after Y -> f: " << (r.matrix_verified ? "verified" : "failed") << (r.matrix_exact ? " (exact)" : " (numeric)") << "\n";
  emit(s, real_eig_to_json(r));
  if (r.search.verdict == Verdict::CertificateFound && !r.matrix_verified) return kExhausted;
  return exit_for(r.search.verdict);
}

inline int cmd_verify(const Settings& s, const std::string& cpath, std::ostream& out) {
  const MembershipCertificate c = certificate_from_json(read_json_file(cpath));
  ResidualReport rep = verify_certificate(c, s.numeric ? VerifyMode::Numeric : VerifyMode::Exact, s.tol);
  out << (rep.mode == VerifyMode::Exact ? "exact" : "numeric") << " verification " << (rep.passed ? "passed" : "failed")
      << ", max deviation " << rep.max_deviation << "\n";
  if (!rep.note.empty()) out << "  " << rep.note << "\n";
  emit(s, report_to_json(rep));
  return rep.passed ? kFound : kRefuted;
}

inline int cmd_verify_point(const Settings& s, const std::string& ppath, const std::string& fpath, std::ostream& out) {
  const PointVectorPair p = pair_from_json(read_json_file(ppath));
  const RatMatrixPoly f = matrix_poly_from_json(read_json_file(fpath));
  const ModulePresentation m = load_module(s, f.num_vars(), f.rows());
  PointReport r = verify_point(p, f, m, s.eps);
  out << "<f(x)v,v> = " << r.value << ", in region: " << (r.in_region ? "yes" : "no") << ", "
      << (r.success ? "separates" : "does not separate") << "\n";
  emit(s, point_report_to_json(r));
  return r.success ? kFound : kRefuted;
}

inline int cmd_sample(const Settings& s, const std::string& gpath, std::ostream& out) {
  const ModulePresentation m = module_from_json(read_json_file(gpath));
  double radius = s.box;
  if (!s.box_given) {
    // Archimedean M_G confines S_G to the ball of radius sqrt(N).
    SearchOptions o = search_options(s);
    auto w = archimedean_witness(m, 1024, 2, o);
    radius = w ? std::sqrt(w->N.get_d()) : 2.0;
  }
  SampleResult r = sample_region(m, s.count, Box::cube(m.n, radius), s.seed);
  if (!s.csv_path.empty()) {
    std::ofstream csv(s.csv_path);
    if (!csv) throw ParseError("cannot write " + s.csv_path);
    csv.precision(17);
    for (const auto& x : r.points) {
      for (std::size_t i = 0; i < x.size(); ++i) csv << (i ? "," : "") << x[i];
      csv << "\n";
    }
  }
  std::optional<MinEigStats> st;
  if (!s.function_path.empty()) {
    const RatMatrixPoly f = matrix_poly_from_json(read_json_file(s.function_path));
    if (f.num_vars() != m.n) throw DimensionMismatch("sample: function variable count differs from module");
    st = min_eig_stats(f, r.points);
  }
  out << r.points.size() << " point(s) from " << r.draws << " draw(s), acceptance " << r.acceptance_rate << "\n";
  if (r.empty_suspected) out << "S_G looks empty inside the box (heuristic)\n";
  if (st && st->argmin >= 0) out << "min lambda_min(f) over samples: " << st->min << "\n";
  emit(s, sample_to_json(r, st));
  return r.empty_suspected ? kExhausted : kFound;
}

inline int cmd_product(const Settings& s, const std::string& gpath, std::ostream& out) {
  const ModulePresentation m = module_from_json(read_json_file(gpath));
  if (m.t != 1) throw NonScalarGenerator("product-module: generators must be scalar (t = 1)");
  std::vector<RatPoly> g;
  for (const auto& gi : m.generators) g.push_back(gi(0, 0));
  ModulePresentation pm(m.n, 1);
  pm.equalities = m.equalities;
  for (const auto& p : product_module(g)) {
    out << p.to_string() << "\n";
    pm.generators.push_back(RatMatrixPoly::from_scalar(p));
  }
  emit(s, module_to_json(pm));
  return kFound;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"mpsatz: certificates for matrix polynomial positivity"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file (flags override)");
  Settings s;
  app.add_option("--dmax", s.dmax, "largest truncation degree");
  app.add_option("--dmin", s.dmin, "smallest truncation degree");
  app.add_option("--tol", s.tol, "feasibility tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", s.seed, "random seed");
  auto* ex = app.add_flag("--exact", "exact rationalization and verification (default)");
  app.add_flag("--numeric", s.numeric, "numeric certificates and verification only")->excludes(ex);
  app.add_option("--branch-cap", s.branch_cap, "diagonalization branch cap")->check(CLI::PositiveNumber);
  app.add_option("--json", s.json_path, "write the JSON result here");
  app.add_option("-g,--module", s.module_path, "module presentation JSON");
  app.add_option("--state-out", s.state_out, "separating state output file");
  app.add_option("-f,--function", s.function_path, "matrix polynomial for sample statistics");
  app.add_option("--count", s.count, "sample count")->check(CLI::NonNegativeNumber);
  auto* box_opt = app.add_option("--box", s.box, "half-width of the sampling cube (default sqrt(N) from an archimedean witness, else 2)")
                      ->check(CLI::PositiveNumber);
  app.add_option("--csv", s.csv_path, "also write sampled points as CSV");
  app.add_option("--dump-sdp", s.sdp_dump, "check-membership: write the SDP of the last degree tried");
  app.add_option("--nmax", s.nmax, "largest N for arch-witness")->check(CLI::PositiveNumber);
  app.add_option("--eps", s.eps, "verify-point tolerance")->check(CLI::PositiveNumber);
  app.add_option("--samples", s.samples, "diagonalize equivalence samples")->check(CLI::NonNegativeNumber);
  app.add_flag("--assume-archimedean", s.assume_archimedean, "skip the archimedean check in nnsd");

  std::string a1, a2;
  auto sub = [&](const char* name, const char* help, const char* arg1, const char* arg2 = nullptr) {
    CLI::App* c = app.add_subcommand(name, help)->fallthrough();
    c->add_option(arg1, a1, arg1)->required();
    if (arg2) c->add_option(arg2, a2, arg2)->required();
    return c;
  };
  auto* c_check = sub("check-membership", "search for f in M_G", "f");
  auto* c_nnsd = sub("nnsd", "search for sum p* f p in I + M_G", "f");
  auto* c_factor = sub("factor-univariate", "factor a univariate f >= 0 as g* g", "f");
  auto* c_diag = sub("diagonalize", "symmetric diagonalization with branching", "f");
  auto* c_arch = sub("arch-witness", "search N - sum x_i^2 in M_G", "module");
  auto* c_eig = sub("real-eig-cert", "certificate that real eigenvalues of f are positive on S_G", "f");
  auto* c_verify = sub("verify", "verify a certificate file", "certificate");
  auto* c_vpoint = sub("verify-point", "check a (x, v) pair against f and G", "pair", "f");
  auto* c_sample = sub("sample", "rejection-sample S_G", "module");
  auto* c_product = sub("product-module", "products of scalar generators", "module");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kInputError;
  }
  s.box_given = box_opt->count() > 0;
  try {
    if (c_check->parsed()) return cmd_check(s, a1, out);
    if (c_nnsd->parsed()) return cmd_nnsd(s, a1, out);
    if (c_factor->parsed()) return cmd_factor(s, a1, out);
    if (c_diag->parsed()) return cmd_diag(s, a1, out);
    if (c_arch->parsed()) return cmd_arch(s, a1, out);
    if (c_eig->parsed()) return cmd_real_eig(s, a1, out);
    if (c_verify->parsed()) return cmd_verify(s, a1, out);
    if (c_vpoint->parsed()) return cmd_verify_point(s, a1, a2, out);
    if (c_sample->parsed()) return cmd_sample(s, a1, out);
    if (c_product->parsed()) return cmd_product(s, a1, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<const char*> argv{"mpsatz"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace mpsatz::cli
