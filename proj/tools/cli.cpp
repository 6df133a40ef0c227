#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "passivity/passivity.hpp"

#ifndef PASSIVITY_VERSION
#define PASSIVITY_VERSION "0.0.0"
#endif

namespace passivity::cli {
namespace {

using io::Json;

struct Globals {
  std::optional<double> tol_psd;
  double tol_oracle = tol::kOracle;
  std::uint64_t seed = 0;
  bool deterministic = false;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PASSIVITY_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
    }
  }
  return 0;
}

FamilyTag parse_family(const std::string& s, std::optional<double> eta) {
  Family f;
  if (s == "p" || s == "alpha")
    f = Family::alpha;
  else if (s == "b" || s == "beta")
    f = Family::beta;
  else if (s == "dp" || s == "gamma")
    f = Family::gamma;
  else if (s == "db" || s == "delta")
    f = Family::delta;
  else
    throw CLI::ValidationError("--family", "unknown family '" + s + "'");
  return FamilyTag(f, eta);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream ss;
  ss << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

// Common envelope; every command fills in its own fields on top.
class Report {
 public:
  Report(const std::vector<std::string>& args, const Globals& g) {
    doc_["command"] = args;
    doc_["tool_version"] = PASSIVITY_VERSION;
    doc_["seed"] = g.seed;
    if (!g.deterministic) doc_["timestamp"] = utc_timestamp();
  }

  void add_input(const std::string& bytes) { inputs_ += bytes; }
  Json& operator[](const char* key) { return doc_[key]; }

  int emit(std::ostream& out, int code) {
    doc_["inputs_digest"] = io::digest(inputs_);
    doc_["exit_code"] = code;
    out << io::dump(doc_);
    return code;
  }

 private:
  Json doc_;
  std::string inputs_;
};

io::RealizationDocument load_input(const std::string& path, Report& report) {
  const std::string text = io::read_file(path);
  report.add_input(text);
  return io::realization_from_json(io::parse_text(text, path));
}

Matrix load_matrix_input(const std::string& path, Report& report) {
  report.add_input(io::read_file(path));
  return io::load_matrix(path);
}

// ---- check ----------------------------------------------------------------

struct CheckArgs {
  std::string family;
  std::optional<double> eta;
  bool lossless = false;
  std::string p_matrix;
  bool solve = false;
  int grid = 64;
  std::string file;
};

int run_check(const CheckArgs& a, const std::vector<std::string>& argv, const Globals& g, std::ostream& out) {
  Report report(argv, g);
  const FamilyTag tag = parse_family(a.family, a.eta);
  const Realization r = load_input(a.file, report).realization;
  if (a.lossless)
    require(tag.family() == Family::alpha || tag.family() == Family::beta, ErrorCode::bad_family,
            "--lossless applies to p and b only");

  report["family"] = io::to_json(tag);
  std::optional<Certificate> cert;
  if (!a.p_matrix.empty()) {
    cert = verify_kyp(r, load_matrix_input(a.p_matrix, report), tag, g.tol_psd);
    report["certificate_source"] = "p-matrix";
  } else {
    SolveOptions opts;
    opts.tol_psd = g.tol_psd;
    const SolveResult solved = solve_P(r, tag, opts);
    report["certificate_source"] = "solve";
    report["solver"] = {{"iterations", solved.iterations}, {"best_residual", solved.best_residual}};
    cert = solved.certificate;
  }

  const DomainGrid grid = make_grid(domain_of(tag.family()), a.grid, a.grid, g.seed);
  MembershipReport oracle =
      a.lossless ? lossless_boundary_oracle(
                       r, tag.family() == Family::alpha ? LosslessKind::positive : LosslessKind::bounded, grid,
                       g.tol_oracle)
                 : membership_oracle(r, tag, grid, g.tol_oracle);

  bool cert_ok = cert && cert->verified();
  Json margins;
  if (cert) {
    report["certificate"] = io::to_json(*cert);
    margins["min_eig_P"] = cert->min_eig_P;
    margins["min_eig_Q"] = cert->min_eig_Q;
    if (a.lossless) {
      const double q_norm = linalg::norm2(cert->Q);
      margins["q_norm"] = q_norm;
      const double tol = g.tol_psd.value_or(cert->tol_psd);
      cert_ok = cert_ok && check_lossless(r, cert->P, tag, tol);
    }
  } else {
    report["certificate"] = nullptr;
  }
  margins["oracle_worst"] = std::isinf(oracle.worst_margin) ? Json(nullptr) : Json(oracle.worst_margin);
  report["margins"] = margins;
  report["oracle"] = io::to_json(oracle);
  report["grid"] = io::grid_summary(grid);

  int code;
  std::string verdict;
  if (!oracle.passed()) {
    const Matrix fz = evaluate(r, oracle.worst_point).value;
    report["witness"] = {{"z", io::to_json(oracle.worst_point)},
                         {"norm_F", linalg::norm2(fz)},
                         {"min_eig_F_plus_Fstar", linalg::min_eigenvalue(fz + fz.adjoint())},
                         {"F", io::to_json(fz)}};
    if (cert_ok) {
      code = kDisagreement;
      verdict = "disagreement";
    } else {
      code = kRefuted;
      verdict = "refuted";
    }
  } else if (cert_ok) {
    code = kPass;
    verdict = "pass";
  } else {
    code = kInconclusive;
    verdict = "inconclusive";
  }
  report["verdict"] = verdict;
  return report.emit(out, code);
}

// ---- transform ------------------------------------------------------------

struct TransformArgs {
  std::string op;
  std::string t_matrix;
  std::string p_matrix;
  std::string family;
  std::string file;
  std::string output;
};

int run_transform(const TransformArgs& a, const std::vector<std::string>& argv, const Globals& g,
                  std::ostream& out) {
  Report report(argv, g);
  const io::RealizationDocument doc = load_input(a.file, report);
  const Realization& r = doc.realization;
  std::optional<Realization> result;
  if (a.op == "cayley-fn") {
    result = cayley_function(r);
  } else if (a.op == "bilinear") {
    result = bilinear_substitute(r);
  } else if (a.op == "invert-array") {
    result = invert_array(r);
  } else if (a.op == "invert-fn") {
    result = invert_function(r);
  } else if (a.op == "coords") {
    if (a.t_matrix.empty()) throw CLI::ValidationError("--t-matrix", "coords needs --t-matrix");
    result = change_coordinates(r, load_matrix_input(a.t_matrix, report));
  } else if (a.op == "balance") {
    if (a.family.empty()) throw CLI::ValidationError("--family", "balance needs --family");
    const FamilyTag tag = parse_family(a.family, std::nullopt);
    std::optional<Certificate> cert;
    if (!a.p_matrix.empty()) {
      cert = verify_kyp(r, load_matrix_input(a.p_matrix, report), tag, g.tol_psd);
    } else {
      SolveOptions opts;
      opts.tol_psd = g.tol_psd;
      cert = solve_P(r, tag, opts).certificate;
      require(cert.has_value(), ErrorCode::certificate_not_verified, "no certificate found for balancing");
    }
    auto [balanced, bc] = balance(r, *cert);
    report["family"] = io::to_json(tag);
    report["certificate"] = io::to_json(bc);
    result = std::move(balanced);
  } else {
    throw CLI::ValidationError("--op", "unknown op '" + a.op + "'");
  }
  io::save(a.output, *result, doc.metadata);
  report["op"] = a.op;
  report["output"] = a.output;
  report["verdict"] = "pass";
  return report.emit(out, kPass);
}

// ---- combine --------------------------------------------------------------

struct CombineArgs {
  std::string family;
  std::vector<std::string> inputs;
  std::string isometries;
  int random = 0;
  std::string output;
};

int run_combine(const CombineArgs& a, const std::vector<std::string>& argv, const Globals& g, std::ostream& out) {
  Report report(argv, g);
  const FamilyTag tag = parse_family(a.family, std::nullopt);
  std::vector<Realization> rs;
  for (const auto& path : a.inputs) rs.push_back(load_input(path, report).realization);
  require(!rs.empty(), ErrorCode::dimension_mismatch, "no inputs");
  const auto n = rs.front().n();
  const auto m = rs.front().m();

  IsometryFamily fam;
  if (!a.isometries.empty()) {
    const std::string text = io::read_file(a.isometries);
    report.add_input(text);
    fam = io::isometry_family_from_json(io::parse_text(text, a.isometries), n, m);
  } else {
    if (a.random <= 0) throw CLI::ValidationError("--random", "give --isometries FILE or --random k");
    std::mt19937_64 rng(g.seed);
    fam = random_isometry_family(n, m, static_cast<std::size_t>(a.random), rng);
  }

  // Inputs that are not balanced get a certificate from the solver first.
  std::vector<Certificate> certs;
  for (std::size_t j = 0; j < rs.size(); ++j) {
    Certificate c = verify_kyp(rs[j], linalg::identity(rs[j].n()), tag, g.tol_psd);
    if (!c.verified()) {
      SolveOptions opts;
      opts.tol_psd = g.tol_psd;
      auto solved = solve_P(rs[j], tag, opts);
      require(solved.found(), ErrorCode::input_not_certified,
              "input " + std::to_string(j) + " (" + a.inputs[j] + ") has no certificate");
      c = *solved.certificate;
    }
    certs.push_back(std::move(c));
  }
  const PreservationResult res = verify_preservation(rs, certs, fam, tag);
  io::save(a.output, res.combined);

  report["family"] = io::to_json(tag);
  report["k"] = fam.k();
  report["isometries"] = io::to_json(fam);
  report["certificate"] = io::to_json(res.certificate);
  report["margins"] = {{"min_eig_Q", res.certificate.min_eig_Q}, {"q_norm", linalg::norm2(res.certificate.Q)}};
  report["output"] = a.output;
  const bool ok = res.certificate.verified();
  report["verdict"] = ok ? "pass" : "refuted";
  return report.emit(out, ok ? kPass : kRefuted);
}

// ---- eval / wmat / fixtures -----------------------------------------------

Complex parse_point(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) return {std::stod(s), 0.0};
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--at", "expected \"re,im\", got '" + s + "'");
  }
}

int run_eval(const std::string& at, const std::string& file, const std::vector<std::string>& argv, const Globals& g,
             std::ostream& out) {
  Report report(argv, g);
  const Realization r = load_input(file, report).realization;
  const TransferSample s = evaluate(r, parse_point(at));
  report["z"] = io::to_json(s.z);
  report["value"] = io::to_json(s.value);
  report["norm2"] = linalg::norm2(s.value);
  report["verdict"] = "pass";
  return report.emit(out, kPass);
}

struct WmatArgs {
  std::string family;
  std::optional<double> eta;
  bool balanced = false;
  int n = 0;
  int m = 1;
  std::string p_matrix;
};

int run_wmat(const WmatArgs& a, const std::vector<std::string>& argv, const Globals& g, std::ostream& out) {
  Report report(argv, g);
  const FamilyTag tag = parse_family(a.family, a.eta);
  const Matrix p = a.p_matrix.empty() ? linalg::identity(a.n) : load_matrix_input(a.p_matrix, report);
  require(p.rows() == a.n, ErrorCode::dimension_mismatch, "P must be n x n");
  const WMatrix w = build_W(tag, p, a.m);
  report["family"] = io::to_json(tag);
  report["n"] = a.n;
  report["m"] = a.m;
  report["balanced"] = a.p_matrix.empty();
  report["W"] = io::to_json(w.entries);
  report["verdict"] = "pass";
  return report.emit(out, kPass);
}

int run_fixtures(const std::string& name, double a, double b, const std::string& output,
                 const std::vector<std::string>& argv, const Globals& g, std::ostream& out) {
  Report report(argv, g);
  const auto id = parse_fixture_name(name);
  if (!id) throw CLI::ValidationError("--name", "unknown fixture '" + name + "'");
  io::RealizationMetadata meta;
  meta.name = std::string(to_string(*id));
  if (*id != FixtureName::f && *id != FixtureName::g) meta.params = {{"a", a}, {"b", b}};
  io::save(output, fixture({*id, a, b}), meta);
  report["fixture"] = name;
  report["output"] = output;
  report["verdict"] = "pass";
  return report.emit(out, kPass);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Passivity certificates and oracles for state-space realizations", "passivity"};
  app.require_subcommand(1);
  Globals g;
  g.seed = default_seed();
  double tol_psd = -1.0;
  app.add_option("--tol-psd", tol_psd, "Absolute PSD tolerance for certificates")->check(CLI::PositiveNumber);
  app.add_option("--tol-oracle", g.tol_oracle, "Oracle margin tolerance")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "Seed for grids and random isometries (default $PASSIVITY_SEED or 0)");
  app.add_flag("--deterministic", g.deterministic, "Omit the timestamp from reports");

  double eta = 0.0;

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Certificate plus sampling oracle");
  check_cmd->add_option("--family", check.family, "p | b | dp | db")->required();
  auto* check_eta = check_cmd->add_option("--eta", eta, "Hyper-bounded parameter (b only)");
  check_cmd->add_flag("--lossless", check.lossless);
  auto* p_opt = check_cmd->add_option("--p-matrix", check.p_matrix, "Candidate P")->check(CLI::ExistingFile);
  check_cmd->add_flag("--solve", check.solve, "Search for P (default)")->excludes(p_opt);
  check_cmd->add_option("--grid", check.grid, "Boundary and interior sample counts")->check(CLI::PositiveNumber);
  check_cmd->add_option("--seed", g.seed);
  check_cmd->add_option("file", check.file)->required()->check(CLI::ExistingFile);

  TransformArgs transform;
  auto* transform_cmd = app.add_subcommand("transform", "Realization transforms");
  transform_cmd->add_option("--op", transform.op, "cayley-fn | bilinear | invert-array | invert-fn | balance | coords")
      ->required();
  transform_cmd->add_option("--t-matrix", transform.t_matrix)->check(CLI::ExistingFile);
  transform_cmd->add_option("--p-matrix", transform.p_matrix)->check(CLI::ExistingFile);
  transform_cmd->add_option("--family", transform.family, "Family for balance");
  transform_cmd->add_option("file", transform.file)->required()->check(CLI::ExistingFile);
  transform_cmd->add_option("-o,--output", transform.output)->required();

  CombineArgs combine;
  auto* combine_cmd = app.add_subcommand("combine", "n,m-matrix-convex combination");
  combine_cmd->add_option("--family", combine.family)->required();
  combine_cmd->add_option("--inputs", combine.inputs)->required()->delimiter(',');
  auto* iso_opt = combine_cmd->add_option("--isometries", combine.isometries)->check(CLI::ExistingFile);
  combine_cmd->add_option("--random", combine.random)->excludes(iso_opt)->check(CLI::PositiveNumber);
  combine_cmd->add_option("--seed", g.seed);
  combine_cmd->add_option("-o,--output", combine.output)->required();

  std::string eval_at, eval_file;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate F(z)");
  eval_cmd->add_option("--at", eval_at, "\"re,im\"")->required();
  eval_cmd->add_option("file", eval_file)->required()->check(CLI::ExistingFile);

  WmatArgs wmat;
  auto* wmat_cmd = app.add_subcommand("wmat", "Print the weight W");
  wmat_cmd->add_option("--family", wmat.family)->required();
  auto* wmat_eta = wmat_cmd->add_option("--eta", eta);
  auto* bal_opt = wmat_cmd->add_flag("--balanced", wmat.balanced);
  wmat_cmd->add_option("--n", wmat.n)->required()->check(CLI::NonNegativeNumber);
  wmat_cmd->add_option("--m", wmat.m)->required()->check(CLI::PositiveNumber);
  wmat_cmd->add_option("--p-matrix", wmat.p_matrix)->check(CLI::ExistingFile)->excludes(bal_opt);

  std::string fx_name, fx_out;
  double fx_a = 1.0, fx_b = 1.0;
  auto* fixtures_cmd = app.add_subcommand("fixtures", "Write a named example realization");
  fixtures_cmd->add_option("--name", fx_name, "f | g | F1 | F2 | F3")->required();
  fixtures_cmd->add_option("--a", fx_a);
  fixtures_cmd->add_option("--b", fx_b);
  fixtures_cmd->add_option("-o,--output", fx_out)->required();

  std::vector<const char*> argv{"passivity"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }
  if (tol_psd > 0.0) g.tol_psd = tol_psd;

  try {
    if (*check_cmd) {
      if (check_eta->count() > 0) check.eta = eta;
      return run_check(check, args, g, out);
    }
    if (*transform_cmd) return run_transform(transform, args, g, out);
    if (*combine_cmd) return run_combine(combine, args, g, out);
    if (*eval_cmd) return run_eval(eval_at, eval_file, args, g, out);
    if (*wmat_cmd) {
      if (wmat_eta->count() > 0) wmat.eta = eta;
      return run_wmat(wmat, args, g, out);
    }
    if (*fixtures_cmd) return run_fixtures(fx_name, fx_a, fx_b, fx_out, args, g, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kUsage;
}

}  // namespace passivity::cli
