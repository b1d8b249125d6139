#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "tcrobust/analysis.hpp"
#include "tcrobust/cps.hpp"
#include "tcrobust/errors.hpp"
#include "tcrobust/io.hpp"
#include "tcrobust/ledger.hpp"
#include "tcrobust/optimize.hpp"

namespace tcr::cli {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string spec;
  std::string out = ".";
  double tol = 1e-9;
};

struct SolveArgs {
  std::string utility = "log";
  double alpha = 0.5;
  double x = 1.0;
  std::optional<double> lambda_prime;
  double tol = 1e-8;
  std::size_t max_iters = 2000;
  std::uint64_t seed = 0;
};

struct CpsArgs {
  std::string theta;
  std::optional<double> lambda_prime;
  double delta = 1e-6;
};

struct HedgeArgs {
  std::string theta;
  std::string claim;
};

struct VerifyArgs {
  std::string strategy;
  std::string certificate;
};

// Input problems that are not schema errors in a spec file.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--spec", c.spec, "market spec (JSON)")->required()->envname("TCROBUST_SPEC");
  cmd->add_option("--out", c.out, "output directory")->envname("TCROBUST_OUT");
}

std::size_t model_of(const ModelFamily& fam, const std::string& theta) {
  if (theta.empty()) return 0;
  if (auto i = fam.model_index(theta)) return *i;
  try {
    std::size_t pos = 0;
    const auto i = std::stoul(theta, &pos);
    if (pos == theta.size() && i < fam.num_models()) return i;
  } catch (const std::exception&) {
  }
  throw InputError("unknown model '" + theta + "'");
}

fs::path out_file(const Common& c, const std::string& name) {
  fs::create_directories(c.out);
  return fs::path(c.out) / name;
}

void write_json(const fs::path& p, const Json& doc) { write_text_file(p.string(), doc.dump(2) + "\n"); }

// Shortest decimal that round-trips.
std::string num(double v) { return Json(v).dump(); }

int cmd_solve(const Common& c, const SolveArgs& a, std::ostream& out) {
  const auto fam = load_market_spec(c.spec);
  if (a.utility != "log" && a.utility != "power") throw InputError("--utility must be log or power");
  const Utility U = a.utility == "log" ? Utility::log() : Utility::power(a.alpha);
  SolveOptions opt;
  opt.tol = a.tol;
  opt.max_iters = a.max_iters;
  opt.seed = a.seed;
  opt.lambda_prime = a.lambda_prime;
  const auto sol = solve_robust(fam, U, a.x, opt);
  const auto& tree = fam.tree();

  Json rep;
  rep["command"] = "solve";
  rep["utility"] = U.name();
  rep["x"] = a.x;
  rep["lambda"] = fam.lambda();
  rep["lambda_prime"] = sol.report.lambda_prime;
  rep["value"] = sol.value.value;
  rep["argmin"] = fam.models()[sol.value.argmin].label;
  Json per = Json::object();
  for (std::size_t th = 0; th < fam.num_models(); ++th) per[fam.models()[th].label] = sol.value.per_model[th];
  rep["per_model"] = std::move(per);
  rep["certified"] = sol.report.certified;
  rep["iterations"] = sol.report.iterations;
  rep["barrier_rounds"] = sol.report.barrier_rounds;
  rep["gap_bound"] = sol.report.gap_bound;
  rep["shrink_steps"] = sol.report.shrink_steps;
  rep["hypothesis_model"] = fam.models()[sol.report.hypothesis_model].label;
  rep["message"] = sol.report.message;
  const Json strategy_doc = strategy_to_json(sol.strategy, tree);
  Json trades = Json::array();
  for (const auto& slot : strategy_doc["slots"]) {
    if (slot["buy"].get<double>() != 0.0 || slot["sell"].get<double>() != 0.0) trades.push_back(slot);
  }
  rep["trades"] = std::move(trades);
  write_json(out_file(c, "report.json"), rep);
  write_json(out_file(c, "strategy.json"), strategy_doc);

  std::ostringstream csv;
  csv << "model,scenario,probability,terminal_liquidation_value\n";
  for (std::size_t th = 0; th < fam.num_models(); ++th) {
    for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
      csv << fam.models()[th].label << ',' << tree.labels()[w] << ',' << num(tree.probability(w))
          << ',' << num(liquidation_value(sol.strategy, fam, th, w, tree.horizon())) << '\n';
    }
  }
  write_text_file(out_file(c, "terminal_values.csv").string(), csv.str());

  out << "value " << num(sol.value.value) << " (argmin " << rep["argmin"].get<std::string>()
      << ", " << (sol.report.certified ? "certified" : "not certified") << ")\n";
  return kOk;
}

int cmd_check_cps(const Common& c, const CpsArgs& a, std::ostream& out) {
  const auto fam = load_market_spec(c.spec);
  const std::size_t th = model_of(fam, a.theta);
  const double lam = a.lambda_prime.value_or(fam.lambda_prime().value_or(fam.lambda()));
  if (!(lam > 0.0 && lam < 1.0)) throw InputError("--lambda-prime must lie in (0, 1)");
  CpsOptions opt;
  opt.delta = a.delta;
  const auto res = search_cps(fam, th, lam, opt);

  Json rep;
  rep["command"] = "check-cps";
  rep["model"] = fam.models()[th].label;
  rep["lambda"] = lam;
  rep["delta"] = a.delta;
  rep["feasible"] = res.cps.has_value();
  rep["min_slack"] = res.min_slack;
  rep["exact"] = res.exact;
  if (res.cps) {
    rep["verified"] = verify_cps(*res.cps, fam, th, lam, {.tol = c.tol, .allow_boundary = false});
    write_json(out_file(c, "certificate.json"), cps_to_json(*res.cps, fam));
  }
  write_json(out_file(c, "check_cps.json"), rep);
  out << (res.cps ? "consistent price system found" : "no consistent price system") << " for model "
      << fam.models()[th].label << " at lambda " << num(lam) << "\n";
  return res.cps ? kOk : kVerificationFailed;
}

int cmd_superhedge(const Common& c, const HedgeArgs& a, std::ostream& out) {
  const auto fam = load_market_spec(c.spec);
  const std::size_t th = model_of(fam, a.theta);
  const auto claim = claim_from_json(read_json_file(a.claim), fam.tree());
  SuperhedgeResult res;
  try {
    res = superhedge_price(claim, fam, th);
  } catch (const ContractViolation& e) {
    throw InputError(e.what());
  }
  const auto dual = extremal_cps(fam, th, fam.lambda(), claim);

  Json rep;
  rep["command"] = "superhedge";
  rep["model"] = fam.models()[th].label;
  rep["price"] = res.price;
  rep["exact"] = res.exact;
  if (dual.status == LpStatus::Optimal) {
    rep["dual_value"] = dual.value;
    rep["duality_gap"] = res.price - dual.value;
  } else {
    rep["dual_value"] = nullptr;
    rep["duality_gap"] = nullptr;
  }
  if (res.witness) {
    write_json(out_file(c, "witness.json"), strategy_to_json(*res.witness, fam.tree()));
    rep["witness"] = "witness.json";
  }
  write_json(out_file(c, "superhedge.json"), rep);
  out << "price " << num(res.price);
  if (dual.status == LpStatus::Optimal) out << ", dual " << num(dual.value);
  out << "\n";
  return kOk;
}

int cmd_verify(const Common& c, const VerifyArgs& a, std::ostream& out) {
  const auto fam = load_market_spec(c.spec);
  const auto& tree = fam.tree();
  const auto strategy = strategy_from_json(read_json_file(a.strategy), tree);
  bool ok = true;
  Json rep;
  rep["command"] = "verify";

  const auto adm = is_admissible(strategy, fam, c.tol);
  Json aj;
  aj["pass"] = adm.admissible;
  if (adm.violation) {
    aj["model"] = fam.models()[adm.violation->theta].label;
    aj["scenario"] = tree.labels()[adm.violation->omega];
    aj["time"] = adm.violation->time;
  }
  rep["admissible"] = std::move(aj);
  ok = ok && adm.admissible;

  bool sf = true;
  for (std::size_t th = 0; th < fam.num_models(); ++th) {
    std::vector<LadlagPath> cash;
    for (std::size_t w = 0; w < tree.num_scenarios(); ++w) cash.push_back(bond_ledger(strategy, fam, th, w));
    sf = sf && check_self_financing(cash, strategy, fam, th, c.tol);
  }
  rep["self_financing"]["pass"] = sf;
  ok = ok && sf;

  if (!a.certificate.empty()) {
    const auto cps = cps_from_json(read_json_file(a.certificate), fam);
    const bool cert_ok = verify_cps(cps, fam, cps.theta, cps.lambda, {.tol = c.tol, .allow_boundary = false});
    rep["certificate"]["model"] = fam.models()[cps.theta].label;
    rep["certificate"]["lambda"] = cps.lambda;
    rep["certificate"]["pass"] = cert_ok;
    ok = ok && cert_ok;
    if (cert_ok && cps.lambda <= fam.lambda()) {
      std::vector<LadlagPath> X;
      for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
        X.push_back(deflated_value_process(strategy, cps, fam, cps.theta, w).deflated);
      }
      const auto sm = check_optional_strong_supermartingale(X, tree, c.tol);
      rep["supermartingale"]["pass"] = sm.ok;
      rep["supermartingale"]["worst_slack"] = sm.worst_slack;
      rep["supermartingale"]["worst_time"] = sm.worst_time;
      rep["supermartingale"]["worst_kind"] = std::string(to_string(sm.worst_kind));
      ok = ok && sm.ok;
    }
    if (cert_ok && cps.lambda < fam.lambda()) {
      const auto vb = variation_bounds(strategy, cps, fam, cps.theta, fam.lambda(), cps.lambda,
                                       strategy.x(), c.tol);
      Json v;
      v["expected_up"] = vb.expected_up;
      v["bound_up"] = vb.bound_up;
      v["expected_total"] = vb.expected_total;
      v["bound_total"] = vb.bound_total;
      v["expected_surplus"] = vb.expected_surplus;
      // The bounds are stated for strategies that are flat at T; for any
      // other strategy they are reported but do not enter the verdict.
      bool only_unliquidated = !vb.violations.empty();
      for (const auto& msg : vb.violations) {
        only_unliquidated = only_unliquidated && msg.rfind("strategy is not liquidated", 0) == 0;
      }
      v["applicable"] = !only_unliquidated;
      v["notes"] = vb.violations;
      v["pass"] = vb.pass;
      if (!only_unliquidated) ok = ok && vb.pass;
      rep["variation"] = std::move(v);
    }
  }
  rep["pass"] = ok;
  write_json(out_file(c, "verify.json"), rep);
  out << (ok ? "verified" : "verification failed") << "\n";
  return ok ? kOk : kVerificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust utility maximization under proportional transaction costs on scenario trees",
               "tcrobust"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tcrobust 0.1.0");

  Common common;
  SolveArgs sa;
  CpsArgs ca;
  HedgeArgs ha;
  VerifyArgs va;

  auto* solve = app.add_subcommand("solve", "maximize worst-case expected utility");
  add_common(solve, common);
  solve->add_option("--utility", sa.utility, "log or power")
      ->check(CLI::IsMember({"log", "power"}))
      ->envname("TCROBUST_UTILITY");
  solve->add_option("--alpha", sa.alpha, "power utility exponent in (0, 1)")->envname("TCROBUST_ALPHA");
  solve->add_option("--x", sa.x, "initial cash")->envname("TCROBUST_X");
  solve->add_option("--lambda-prime", sa.lambda_prime, "smaller cost level for the hypothesis check")
      ->envname("TCROBUST_LAMBDA_PRIME");
  solve->add_option("--tol", sa.tol, "barrier gap target")->envname("TCROBUST_TOL");
  solve->add_option("--max-iters", sa.max_iters, "Newton step budget")->envname("TCROBUST_MAX_ITERS");
  solve->add_option("--seed", sa.seed, "seed of the interior start")->envname("TCROBUST_SEED");

  auto* check = app.add_subcommand("check-cps", "search for a consistent price system");
  add_common(check, common);
  check->add_option("--theta", ca.theta, "model label or index (default: first)")->envname("TCROBUST_THETA");
  check->add_option("--lambda-prime", ca.lambda_prime, "cost level to check")
      ->envname("TCROBUST_LAMBDA_PRIME");
  check->add_option("--delta", ca.delta, "lower bound on Z0")->envname("TCROBUST_DELTA");
  check->add_option("--tol", common.tol, "verification tolerance")->envname("TCROBUST_TOL");

  auto* hedge = app.add_subcommand("superhedge", "superhedging price of a claim");
  add_common(hedge, common);
  hedge->add_option("--theta", ha.theta, "model label or index (default: first)")->envname("TCROBUST_THETA");
  hedge->add_option("--claim", ha.claim, "claim file (JSON)")->required()->envname("TCROBUST_CLAIM");

  auto* verify = app.add_subcommand("verify", "re-verify a strategy and a certificate");
  add_common(verify, common);
  verify->add_option("--strategy", va.strategy, "strategy file (JSON)")->required();
  verify->add_option("--certificate", va.certificate, "certificate file from check-cps");
  verify->add_option("--tol", common.tol, "verification tolerance")->envname("TCROBUST_TOL");

  std::vector<std::string> argv_store{"tcrobust"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*solve) return cmd_solve(common, sa, out);
    if (*check) return cmd_check_cps(common, ca, out);
    if (*hedge) return cmd_superhedge(common, ha, out);
    return cmd_verify(common, va, out);
  } catch (const SpecError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const HypothesisError& e) {
    err << "hypothesis not met: " << e.what() << "\n";
    return kHypothesisFailed;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kVerificationFailed;
  }
}

}  // namespace tcr::cli
