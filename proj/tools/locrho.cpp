// locrho: batch command-line front end. One scenario file in, one report out.
//
// Exit codes: 0 success, 2 input/schema error, 3 math-domain error,
// 4 verification failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "locrho/bayes.hpp"
#include "locrho/classify.hpp"
#include "locrho/distributions.hpp"
#include "locrho/error.hpp"
#include "locrho/gleason.hpp"
#include "locrho/io.hpp"

namespace {

using namespace locrho;
using io::Json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDomain = 3;
constexpr int kExitVerification = 4;

struct Options {
  std::string command;
  std::string scenario_path;
  std::optional<std::string> family;
  std::size_t trials = 50;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string out;
  std::string format = "json";
  std::string obs_a;
  std::string obs_b;
  std::string pvm_a;
  std::string pvm_b;
  std::optional<double> t;
  bool corrupt_oracle = false;
};

struct Context {
  Options opt;
  std::optional<io::Scenario> scenario;
  std::uint64_t seed = 0;
  double tol = 1e-8;
};

std::uint64_t resolve_seed(const Options& opt, const std::optional<io::Scenario>& scenario) {
  if (opt.seed) return *opt.seed;
  if (const char* env = std::getenv("LOCRHO_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw InputError(std::string("LOCRHO_SEED is not a non-negative integer: ") + env);
    }
  }
  if (scenario && scenario->seed) return *scenario->seed;
  return 0;
}

const io::Scenario& need_scenario(const Context& ctx) {
  if (!ctx.scenario) throw InputError(ctx.opt.command + " needs --scenario");
  return *ctx.scenario;
}

DiracMeasureSpec make_spec(const Context& ctx) {
  const io::Scenario& s = need_scenario(ctx);
  const std::string family_name = ctx.opt.family.value_or(s.op ? "operator" : "");
  if (family_name.empty()) throw InputError("--family is required when the scenario gives rho and channel");
  const MeasureFamily family = parse_family(family_name);
  if (family == MeasureFamily::kFromOperator) {
    if (!s.op) throw InputError("family \"operator\" needs an operator in the scenario");
    return DiracMeasureSpec::from_operator(LocalDensityOperator::make(*s.op, s.dims, ctx.tol));
  }
  if (!s.rho || !s.channel) throw InputError("family " + family_name + " needs rho and channel in the scenario");
  return DiracMeasureSpec::from_state_channel(family, *s.rho, *s.channel, ctx.tol);
}

Json header(const Context& ctx) {
  Json j{{"schema_version", io::kSchemaVersion}, {"command", ctx.opt.command}};
  j["seed"] = ctx.seed;
  j["tol"] = ctx.tol;
  return j;
}

int cmd_build(const Context& ctx, Json& out) {
  const DiracMeasureSpec spec = make_spec(ctx);
  const LocalDensityOperator op = local_density_operator(spec, ctx.tol);
  out["family"] = to_string(spec.family());
  out["dims"] = io::to_json(op.dims());
  out["operator"] = io::to_json(op.matrix());
  out["marginal_a"] = io::to_json(op.marginal_a());
  out["marginal_b"] = io::to_json(op.marginal_b());
  out["classification"] = io::to_json(classify(op.matrix(), op.dims(), ctx.tol));
  return kExitOk;
}

int cmd_verify(const Context& ctx, Json& out) {
  const DiracMeasureSpec spec = make_spec(ctx);
  AxiomOptions options;
  options.trials = ctx.opt.trials;
  options.seed = ctx.seed;
  options.tol = ctx.tol;
  const AxiomReport report = verify_axioms(oracle_from_spec(spec), options);
  out["family"] = to_string(spec.family());
  out["report"] = io::to_json(report);
  return report.consistent ? kExitOk : kExitVerification;
}

int cmd_reconstruct(const Context& ctx, Json& out) {
  const DiracMeasureSpec spec = make_spec(ctx);
  MeasureOracle oracle = oracle_from_spec(spec);
  if (ctx.opt.corrupt_oracle) {
    // Negative control: a small term quadratic in the projector ranks.
    auto inner = oracle.eval;
    oracle.eval = [inner](const ComplexMatrix& p, const ComplexMatrix& q) {
      const double w = p.trace().real() * q.trace().real();
      return inner(p, q) + Complex(1e-3 * w * w);
    };
    oracle.linear = false;
    oracle.description += " (corrupted)";
  }
  ReconstructOptions options;
  options.tol = ctx.tol;
  options.validation_seed = ctx.seed;
  const Reconstruction r = reconstruct_operator(oracle, options);
  out["family"] = to_string(spec.family());
  out["corrupted_oracle"] = ctx.opt.corrupt_oracle;
  out["reconstruction"] = io::to_json(r);

  bool ok = r.residual() <= ctx.tol && r.violations.empty();
  if (admits_operator(spec, ctx.tol)) {
    const double diff = max_abs_diff(r.matrix, local_density_operator(spec, ctx.tol).matrix());
    out["comparison"] = Json{{"against", "closed-form operator"}, {"max_abs_diff", io::to_json(diff)}};
    ok = ok && diff <= ctx.tol;
  } else {
    out["comparison"] = nullptr;
  }
  out["consistent"] = ok;
  return ok ? kExitOk : kExitVerification;
}

const ComplexMatrix& find_observable(const io::Scenario& s, const std::string& name, const char* flag) {
  if (name.empty()) throw InputError(std::string(flag) + " is required");
  const auto it = s.observables.find(name);
  if (it == s.observables.end()) throw InputError("no observable named \"" + name + "\" in the scenario");
  return it->second;
}

const std::vector<ComplexMatrix>& find_pvm(const io::Scenario& s, const std::string& name, const char* flag) {
  if (name.empty()) throw InputError(std::string(flag) + " is required");
  const auto it = s.pvms.find(name);
  if (it == s.pvms.end()) throw InputError("no pvm named \"" + name + "\" in the scenario");
  return it->second;
}

int cmd_correlate(const Context& ctx, Json& out) {
  const io::Scenario& s = need_scenario(ctx);
  const ComplexMatrix& ma = find_observable(s, ctx.opt.obs_a, "--obsA");
  const ComplexMatrix& mb = find_observable(s, ctx.opt.obs_b, "--obsB");
  if (ma.rows() != s.dims.a || !ma.is_square()) throw InputError("observable " + ctx.opt.obs_a + " does not act on A");
  if (mb.rows() != s.dims.b || !mb.is_square()) throw InputError("observable " + ctx.opt.obs_b + " does not act on B");
  const DiracMeasureSpec spec = make_spec(ctx);
  const Observable oa = Observable::make(ma, 1e-9, ctx.tol);
  const Observable ob = Observable::make(mb, 1e-9, ctx.tol);

  const Complex spectral = correlation(spec, oa, ob, CorrelationMode::kSpectral, ctx.tol);
  out["family"] = to_string(spec.family());
  out["obsA"] = ctx.opt.obs_a;
  out["obsB"] = ctx.opt.obs_b;
  out["spectral"] = io::to_json(spectral);
  if (admits_operator(spec, ctx.tol)) {
    const Complex trace = correlation(spec, oa, ob, CorrelationMode::kTrace, ctx.tol);
    out["trace"] = io::to_json(trace);
    out["difference"] = io::to_json(std::abs(spectral - trace));
    out["notes"] = Json::array();
  } else {
    out["trace"] = nullptr;
    out["difference"] = nullptr;
    out["notes"] = Json::array({"no local-density operator exists for this measure; trace mode is undefined"});
  }
  return kExitOk;
}

int cmd_bayes(const Context& ctx, Json& out) {
  const io::Scenario& s = need_scenario(ctx);
  const auto& pa = find_pvm(s, ctx.opt.pvm_a, "--pvmA");
  const auto& pb = find_pvm(s, ctx.opt.pvm_b, "--pvmB");
  const DiracMeasureSpec spec = make_spec(ctx);
  const LocalDensityOperator op = spec.op() ? *spec.op() : local_density_operator(spec, ctx.tol);
  const JointTable table = joint_table(op, pa, pb, ctx.tol);
  out["family"] = to_string(spec.family());
  out["pvmA"] = ctx.opt.pvm_a;
  out["pvmB"] = ctx.opt.pvm_b;
  out["table"] = io::to_json(table);
  out["bayes_identity_max_residual"] = io::to_json(table.bayes_residual);
  return table.bayes_residual <= ctx.tol ? kExitOk : kExitVerification;
}

Json describe_operator(const ComplexMatrix& m, BipartiteDims dims, double tol) {
  Json j;
  j["dims"] = io::to_json(dims);
  j["operator"] = io::to_json(m);
  j["classification"] = io::to_json(classify(m, dims, tol));
  if (local_density_violations(m, dims, tol).empty()) {
    j["canonical_form_test"] = io::to_json(song_parzygnat_test(LocalDensityOperator::make(m, dims, tol), tol));
  } else {
    j["canonical_form_test"] = nullptr;
  }
  return j;
}

int cmd_classify(const Context& ctx, Json& out) {
  const io::Scenario& s = need_scenario(ctx);
  if (s.op && !ctx.opt.family) {
    out.update(describe_operator(*s.op, s.dims, ctx.tol));
    return kExitOk;
  }
  const DiracMeasureSpec spec = make_spec(ctx);
  const LocalDensityOperator op = spec.op() ? *spec.op() : local_density_operator(spec, ctx.tol);
  out["family"] = to_string(spec.family());
  out.update(describe_operator(op.matrix(), op.dims(), ctx.tol));
  return kExitOk;
}

int cmd_family(const Context& ctx, Json& out) {
  if (!ctx.opt.t) throw InputError("family needs --t");
  const LocalDensityOperator op = counterexample_family(*ctx.opt.t);
  out["t"] = *ctx.opt.t;
  out.update(describe_operator(op.matrix(), op.dims(), ctx.tol));
  out["marginal_a"] = io::to_json(op.marginal_a());
  out["marginal_b"] = io::to_json(op.marginal_b());
  return kExitOk;
}

void emit(const Context& ctx, const Json& report) {
  const std::string text = ctx.opt.format == "csv" ? io::to_csv(report) : report.dump(2) + "\n";
  if (ctx.opt.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(ctx.opt.out, std::ios::binary);
  if (!file) throw InputError("cannot write " + ctx.opt.out);
  file << text;
}

int run(Context& ctx) {
  if (!ctx.opt.scenario_path.empty()) ctx.scenario = io::load_scenario(ctx.opt.scenario_path);
  ctx.seed = resolve_seed(ctx.opt, ctx.scenario);
  ctx.tol = ctx.opt.tol.value_or(ctx.scenario && ctx.scenario->tol ? *ctx.scenario->tol : 1e-8);
  if (!(ctx.tol > 0.0)) throw InputError("--tol must be positive");

  Json report = header(ctx);
  int code = kExitOk;
  const std::string& c = ctx.opt.command;
  if (c == "build") code = cmd_build(ctx, report);
  else if (c == "verify-measure") code = cmd_verify(ctx, report);
  else if (c == "reconstruct") code = cmd_reconstruct(ctx, report);
  else if (c == "correlate") code = cmd_correlate(ctx, report);
  else if (c == "bayes") code = cmd_bayes(ctx, report);
  else if (c == "classify") code = cmd_classify(ctx, report);
  else if (c == "family") code = cmd_family(ctx, report);
  report["exit_code"] = code;
  emit(ctx, report);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"locrho: local-density operators, Dirac measures and their tests"};
  Context ctx;
  Options& o = ctx.opt;
  app.add_option("command", o.command, "build | verify-measure | reconstruct | correlate | bayes | classify | family")
      ->required()
      ->check(CLI::IsMember({"build", "verify-measure", "reconstruct", "correlate", "bayes", "classify", "family"}));
  app.add_option("--scenario", o.scenario_path, "scenario JSON file");
  app.add_option("--family", o.family, "kd | ls | mh | lvn | operator")
      ->check(CLI::IsMember({"kd", "ls", "mh", "lvn", "operator"}));
  app.add_option("--trials", o.trials, "random trials for verify-measure")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "RNG seed (default: LOCRHO_SEED, then the scenario seed, then 0)");
  app.add_option("--tol", o.tol, "numerical tolerance (default: scenario tol, then 1e-8)");
  app.add_option("--out", o.out, "write the report here instead of stdout");
  app.add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--obsA", o.obs_a, "observable name on A (correlate)");
  app.add_option("--obsB", o.obs_b, "observable name on B (correlate)");
  app.add_option("--pvmA", o.pvm_a, "PVM name on A (bayes)");
  app.add_option("--pvmB", o.pvm_b, "PVM name on B (bayes)");
  app.add_option("--t", o.t, "family parameter in [0, 1]");
  app.add_flag("--corrupt-oracle", o.corrupt_oracle, "test only: perturb the oracle nonlinearly before reconstruct");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  const auto fail = [&](int code, const char* kind, const std::string& msg) {
    std::cerr << "locrho: " << kind << " error: " << msg << "\n";
    return code;
  };
  try {
    return run(ctx);
  } catch (const InputError& e) {
    return fail(kExitInput, "input", e.what());
  } catch (const DimensionError& e) {
    return fail(kExitInput, "dimension", e.what());
  } catch (const DomainError& e) {
    return fail(kExitDomain, "domain", e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(kExitInput, "input", e.what());
  } catch (const std::exception& e) {
    return fail(kExitDomain, "internal", e.what());
  }
}
