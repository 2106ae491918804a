// Command-line front end: subcommands over the library's workflows with
// CSV/JSON emission.  Exit codes: 0 success, 2 usage, 3 configuration,
// 4 output I/O, 5 in-run assertion failure.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "selfconsume/bounds.hpp"
#include "selfconsume/experiments.hpp"
#include "selfconsume/report_io.hpp"
#include "selfconsume/runners.hpp"
#include "selfconsume/schedule.hpp"
#include "selfconsume/simplex.hpp"

namespace {

using nlohmann::json;
using namespace selfconsume;

// Ties CLI options to JSON config keys.  Command-line values win; config
// values fill anything left untouched; defaults apply last.
class Binder {
 public:
  explicit Binder(CLI::App* cmd) : cmd_(cmd) {}

  template <typename T>
  CLI::Option* opt(const std::string& flag, const std::string& key, T& var,
                   const std::string& desc) {
    CLI::Option* o = cmd_->add_option(flag, var, desc);
    entries_.push_back(Entry{key, o, [&var](const json& j) { var = j.get<T>(); }});
    return o;
  }

  CLI::Option* flag(const std::string& flag_name, const std::string& key, bool& var,
                    const std::string& desc) {
    CLI::Option* o = cmd_->add_flag(flag_name, var, desc);
    entries_.push_back(Entry{key, o, [&var](const json& j) { var = j.get<bool>(); }});
    return o;
  }

  void apply_config(const json& cfg) {
    for (const Entry& e : entries_) {
      if (e.option->count() > 0) {
        provided_.insert(e.key);
      } else if (cfg.contains(e.key)) {
        e.set(cfg.at(e.key));
        provided_.insert(e.key);
      }
    }
  }

  bool provided(const std::string& key) const { return provided_.count(key) > 0; }

 private:
  struct Entry {
    std::string key;
    CLI::Option* option;
    std::function<void(const json&)> set;
  };
  CLI::App* cmd_;
  std::vector<Entry> entries_;
  std::set<std::string> provided_;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  json cfg;
  in >> cfg;
  if (!cfg.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  return cfg;
}

// Missing --k and friends are usage errors, matching the exit-code contract.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_provided(const Binder& b, const std::string& key) {
  if (!b.provided(key)) throw UsageError("missing required option --" + key);
}

std::uint64_t env_or(std::uint64_t seed) {
  const char* env = std::getenv("SELFCONSUME_SEED");
  if (env == nullptr || *env == '\0') return seed;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == nullptr || *end != '\0') {
    throw std::invalid_argument("SELFCONSUME_SEED is not an unsigned integer");
  }
  return static_cast<std::uint64_t>(v);
}

std::map<std::string, std::string> parse_kv(const std::string& body) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("bad schedule parameter '" + item + "'");
    }
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

double to_double(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw std::invalid_argument("schedule needs parameter " + key);
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw std::invalid_argument("schedule parameter " + key + " is not a number");
  }
}

std::vector<double> split_doubles(const std::string& body, char sep) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("'" + item + "' is not a number");
    }
  }
  return out;
}

// Formats: poly:a=1,beta=1,gamma=0.5   const:n=100,alpha=0.3
//          explicit:n=1;3;5,alpha=1;0.7;0.5  (horizon from the lists)
Schedule parse_schedule(const std::string& text, std::size_t horizon) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("schedule must look like kind:key=value,...");
  }
  const std::string kind = text.substr(0, colon);
  const std::string body = text.substr(colon + 1);
  if (kind == "poly") {
    const auto kv = parse_kv(body);
    return schedule_poly({to_double(kv, "a"), to_double(kv, "beta"), to_double(kv, "gamma"),
                          horizon});
  }
  if (kind == "const") {
    const auto kv = parse_kv(body);
    return schedule_constant(static_cast<std::int64_t>(to_double(kv, "n")),
                             to_double(kv, "alpha"), horizon);
  }
  if (kind == "explicit") {
    const auto kv = parse_kv(body);
    auto n_it = kv.find("n");
    auto a_it = kv.find("alpha");
    if (n_it == kv.end() || a_it == kv.end()) {
      throw std::invalid_argument("explicit schedule needs n=...;... and alpha=...;...");
    }
    const std::vector<double> ns = split_doubles(n_it->second, ';');
    const std::vector<double> alphas = split_doubles(a_it->second, ';');
    std::vector<std::int64_t> n(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) n[i] = static_cast<std::int64_t>(ns[i]);
    return Schedule(std::move(n), alphas);
  }
  throw std::invalid_argument("unknown schedule kind '" + kind + "'");
}

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "per-batch") return EstimatorKind::PerBatchEmpirical;
  if (name == "pooled") return EstimatorKind::PooledEmpirical;
  if (name == "combiner") return EstimatorKind::OrderOptimalCombiner;
  if (name == "debiased") return EstimatorKind::PerBatchDebiased;
  if (name == "oracle") return EstimatorKind::OracleEmpirical;
  throw std::invalid_argument("unknown estimator '" + name + "'");
}

Workflow parse_workflow(const std::string& name) {
  if (name == "accumulation") return Workflow::Accumulation;
  if (name == "replacement") return Workflow::Replacement;
  if (name == "oracle") return Workflow::Oracle;
  throw std::invalid_argument("unknown workflow '" + name + "'");
}

void emit(const std::string& format, const std::string& output, const std::string& csv,
          const json& j) {
  if (format == "csv") {
    write_atomic(output, csv);
  } else if (format == "json") {
    write_atomic(output, j.dump(2) + "\n");
  } else {
    throw std::invalid_argument("unknown format '" + format + "' (csv or json)");
  }
}

// Options shared by every subcommand.
struct Common {
  std::int64_t trials = 1000;
  std::uint64_t seed = 42;
  int parallel = 1;
  std::string format = "csv";
  std::string output;
  std::string config_path;

  void bind(Binder& b) {
    b.opt("--trials", "trials", trials, "Monte Carlo trials");
    b.opt("--seed", "seed", seed, "master RNG seed (SELFCONSUME_SEED overrides)");
    b.opt("--parallel", "parallel", parallel, "worker threads (0 = hardware)");
    b.opt("--format", "format", format, "output format: csv or json");
    b.opt("--output,-o", "output", output, "output path (default stdout)");
  }
  void finish() { seed = env_or(seed); }
};

struct SimulateCmd {
  Common common;
  std::size_t k = 0;
  std::string schedule_text;
  std::size_t stages = 10;
  std::string workflow_name_ = "accumulation";
  std::string estimator_name_;
  std::string p_text;
  bool worstcase = false;
  double delta = 0.5;
  std::size_t max_members = 65536;
  std::size_t t_min = 5;
  bool clamp_invalid = false;
  bool fit = false;  // rates subcommand reuses this runner
  Binder* binder = nullptr;

  void bind(CLI::App* cmd, Binder& b, bool with_fit) {
    binder = &b;
    common.bind(b);
    b.opt("--k", "k", k, "number of categories");
    b.opt("--schedule", "schedule", schedule_text, "stage plan, e.g. poly:a=1,beta=1,gamma=0.5");
    b.opt("--stages,--horizon", "stages", stages, "last stage index");
    b.opt("--workflow", "workflow", workflow_name_, "accumulation, replacement or oracle");
    b.opt("--estimator", "estimator", estimator_name_, "per-batch, pooled, combiner, debiased or oracle");
    b.opt("--p", "p", p_text, "true distribution, comma separated");
    b.flag("--worstcase", "worstcase", worstcase, "probe the hard family instead of one p");
    b.opt("--delta", "delta", delta, "hard family separation in (0,1)");
    b.opt("--max-members", "max_members", max_members, "hard family size cap");
    b.flag("--clamp-invalid", "clamp_invalid", clamp_invalid,
           "project combiner output back onto the simplex past its validity condition");
    if (with_fit) {
      fit = true;
      b.opt("--t-min", "t_min", t_min, "first stage included in rate fits");
    }
    (void)cmd;
  }

  int run() {
    require_provided(*binder, "schedule");
    if (p_text.empty()) require_provided(*binder, "k");
    if (worstcase && !p_text.empty()) {
      throw std::invalid_argument("--worstcase and --p are mutually exclusive");
    }
    common.finish();

    const Schedule s = parse_schedule(schedule_text, stages);
    const Workflow wf = parse_workflow(workflow_name_);
    McConfig mc;
    mc.trials = common.trials;
    mc.master_seed = common.seed;
    mc.workers = common.parallel;
    mc.workflow = wf;
    mc.clamp_invalid = clamp_invalid;
    if (estimator_name_.empty()) {
      mc.estimator = wf == Workflow::Accumulation ? EstimatorKind::OrderOptimalCombiner
                     : wf == Workflow::Replacement ? EstimatorKind::PerBatchEmpirical
                                                   : EstimatorKind::OracleEmpirical;
    } else {
      mc.estimator = parse_estimator(estimator_name_);
    }

    LossCurve curve;
    if (worstcase) {
      Rng rng(RngSeed{common.seed, 0});
      const AssouadFamily fam = assouad_family(k, delta, max_members, rng);
      curve = worstcase_loss(fam, s, mc).curve;
    } else {
      Simplex p = p_text.empty() ? Simplex::uniform(k) : Simplex(split_doubles(p_text, ','));
      if (binder->provided("k") && p.k() != k) {
        throw std::invalid_argument("--p length disagrees with --k");
      }
      k = p.k();
      curve = mc_loss(p, s, mc);
    }

    const std::vector<CurveRow> rows = attach_bounds(curve, s, k);
    json j{{"experiment", fit ? "rates" : "simulate"},
           {"config",
            {{"k", k},
             {"schedule", schedule_text},
             {"stages", s.horizon()},
             {"workflow", workflow_name_},
             {"estimator", estimator_name(mc.estimator)},
             {"worstcase", worstcase},
             {"delta", delta},
             {"trials", common.trials},
             {"seed", common.seed}}},
           {"curve", curve_json(rows)}};

    std::string csv = curve_csv(rows);
    if (fit) {
      const RateFit fit_l2 = fit_rate(curve, t_min);
      const RateFit fit_l1 = fit_rate_values(curve.stages, curve.mean_l1, t_min);
      j["fits"] = {{"l2", rate_fit_json(fit_l2)}, {"l1", rate_fit_json(fit_l1)}};
      csv = "quantity,exponent,intercept,r2,points\n";
      csv += "mean_l2," + fmt9(fit_l2.exponent) + ',' + fmt9(fit_l2.intercept) + ',' +
             fmt9(fit_l2.r2) + ',' + std::to_string(fit_l2.points) + '\n';
      csv += "mean_l1," + fmt9(fit_l1.exponent) + ',' + fmt9(fit_l1.intercept) + ',' +
             fmt9(fit_l1.r2) + ',' + std::to_string(fit_l1.points) + '\n';
    }
    emit(common.format, common.output, csv, j);
    return 0;
  }
};

struct BoundsCmd {
  Common common;
  std::size_t k = 0;
  std::string schedule_text;
  std::size_t stages = 10;
  Binder* binder = nullptr;

  void bind(Binder& b) {
    binder = &b;
    common.bind(b);
    b.opt("--k", "k", k, "number of categories");
    b.opt("--schedule", "schedule", schedule_text, "stage plan");
    b.opt("--stages,--horizon", "stages", stages, "last stage index");
  }

  int run() {
    require_provided(*binder, "k");
    require_provided(*binder, "schedule");
    common.finish();
    const Schedule s = parse_schedule(schedule_text, stages);
    std::vector<BoundReport> reports;
    reports.reserve(s.stages());
    for (std::size_t t = 0; t <= s.horizon(); ++t) reports.push_back(bound_report(s, t, k));
    const json j{{"experiment", "bounds"},
                 {"config", {{"k", k}, {"schedule", schedule_text}, {"stages", s.horizon()}}},
                 {"bounds", bounds_json(reports)}};
    emit(common.format, common.output, bounds_csv(reports), j);
    return 0;
  }
};

struct RegimesCmd {
  Common common;
  double beta = 0.0;
  double gamma = 0.0;
  double a = 1.0;
  Binder* binder = nullptr;

  void bind(Binder& b) {
    binder = &b;
    common.bind(b);
    b.opt("--beta", "beta", beta, "batch growth exponent");
    b.opt("--gamma", "gamma", gamma, "sampling probability decay exponent");
    b.opt("--a", "a", a, "batch scale (not used by the classification)");
  }

  int run() {
    require_provided(*binder, "beta");
    require_provided(*binder, "gamma");
    common.finish();
    const RegimeClassification rc = classify_regime(beta, gamma);
    const json j{{"experiment", "regimes"},
                 {"beta", beta},
                 {"gamma", gamma},
                 {"label", regime_label_name(rc.label)},
                 {"caveat", rc.caveat}};
    std::string csv = "beta,gamma,label,caveat\n";
    csv += fmt9(beta) + ',' + fmt9(gamma) + ',' + regime_label_name(rc.label) + ',' +
           (rc.caveat ? "true" : "false") + '\n';
    emit(common.format, common.output, csv, j);
    return 0;
  }
};

struct ClaimCmd {
  Common common;
  ClaimConfig cfg;
  bool second = false;

  void bind(Binder& b, bool is_second) {
    second = is_second;
    if (is_second) {
      cfg.beta = 0.0;
      cfg.gamma = 0.75;
    }
    common.bind(b);
    b.opt("--a", "a", cfg.a, "batch scale");
    b.opt("--beta", "beta", cfg.beta, "batch growth exponent");
    b.opt("--gamma", "gamma", cfg.gamma, "sampling probability decay exponent");
    b.opt("--stages,--horizon", "stages", cfg.horizon, "last stage index");
    b.opt("--k", "k", cfg.k, "number of categories (even)");
    b.opt("--delta", "delta", cfg.delta, "hard family separation");
    b.opt("--max-members", "max_members", cfg.max_members, "hard family size cap");
    b.opt("--t-min", "t_min", cfg.t_min, "first stage included in rate fits");
    b.opt("--tol", "tol", cfg.exponent_tol, "allowed |fitted - predicted| exponent gap");
  }

  int run() {
    common.finish();
    cfg.trials = common.trials;
    cfg.seed = common.seed;
    cfg.workers = common.parallel;
    if (!second) {
      const Claim1Report rep = claim1_experiment(cfg);
      emit(common.format, common.output, curve_csv(claim1_rows(rep)), claim1_json(rep));
      return rep.pass ? 0 : 5;
    }
    const Claim2Report rep = claim2_experiment(cfg);
    emit(common.format, common.output, curve_csv(claim2_rows(rep)), claim2_json(rep));
    return rep.pass ? 0 : 5;
  }
};

struct ReplacementCmd {
  Common common;
  ReplacementConfig cfg;
  std::string estimator_name_ = "per-batch";

  void bind(Binder& b) {
    common.bind(b);
    b.opt("--n", "n", cfg.n, "per-stage batch size");
    b.opt("--alpha", "alpha", cfg.alpha, "real-data sampling probability, in (0,1)");
    b.opt("--stages,--horizon", "stages", cfg.horizon, "last stage index");
    b.opt("--k", "k", cfg.k, "number of categories (even)");
    b.opt("--delta", "delta", cfg.delta, "hard family separation");
    b.opt("--max-members", "max_members", cfg.max_members, "hard family size cap");
    b.opt("--estimator", "estimator", estimator_name_, "per-batch or debiased");
  }

  int run() {
    common.finish();
    cfg.trials = common.trials;
    cfg.seed = common.seed;
    cfg.workers = common.parallel;
    cfg.estimator = parse_estimator(estimator_name_);
    const ReplacementReport rep = replacement_floor_experiment(cfg);
    emit(common.format, common.output, curve_csv(replacement_rows(rep)), replacement_json(rep));
    return rep.pass ? 0 : 5;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification toolkit for recursive discrete-distribution estimation"};
  app.require_subcommand(1);

  SimulateCmd simulate_cmd;
  SimulateCmd rates_cmd;
  BoundsCmd bounds_cmd;
  RegimesCmd regimes_cmd;
  ClaimCmd claim1_cmd;
  ClaimCmd claim2_cmd;
  ReplacementCmd replacement_cmd;

  CLI::App* c_sim = app.add_subcommand("simulate", "Monte Carlo loss curve for one configuration");
  CLI::App* c_rates = app.add_subcommand("rates", "loss curve with fitted decay exponents");
  CLI::App* c_bounds = app.add_subcommand("bounds", "closed-form bound table for a schedule");
  CLI::App* c_regimes = app.add_subcommand("regimes", "asymptotic regime of a polynomial schedule");
  CLI::App* c_claim1 = app.add_subcommand("claim1", "matching-regime rate experiment with assertions");
  CLI::App* c_claim2 = app.add_subcommand("claim2", "error-dominated-regime rate experiment with assertions");
  CLI::App* c_repl = app.add_subcommand("replacement", "replacement-vs-accumulation floor experiment");

  Binder b_sim(c_sim), b_rates(c_rates), b_bounds(c_bounds), b_regimes(c_regimes),
      b_claim1(c_claim1), b_claim2(c_claim2), b_repl(c_repl);
  simulate_cmd.bind(c_sim, b_sim, false);
  rates_cmd.bind(c_rates, b_rates, true);
  bounds_cmd.bind(b_bounds);
  regimes_cmd.bind(b_regimes);
  claim1_cmd.bind(b_claim1, false);
  claim2_cmd.bind(b_claim2, true);
  replacement_cmd.bind(b_repl);

  struct Wired {
    CLI::App* cmd;
    Binder* binder;
    Common* common;
    std::function<int()> run;
  };
  const std::vector<Wired> wired = {
      {c_sim, &b_sim, &simulate_cmd.common, [&] { return simulate_cmd.run(); }},
      {c_rates, &b_rates, &rates_cmd.common, [&] { return rates_cmd.run(); }},
      {c_bounds, &b_bounds, &bounds_cmd.common, [&] { return bounds_cmd.run(); }},
      {c_regimes, &b_regimes, &regimes_cmd.common, [&] { return regimes_cmd.run(); }},
      {c_claim1, &b_claim1, &claim1_cmd.common, [&] { return claim1_cmd.run(); }},
      {c_claim2, &b_claim2, &claim2_cmd.common, [&] { return claim2_cmd.run(); }},
      {c_repl, &b_repl, &replacement_cmd.common, [&] { return replacement_cmd.run(); }},
  };
  for (const Wired& w : wired) {
    w.cmd->add_option("--config", w.common->config_path, "JSON config file; flags override");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (const Wired& w : wired) {
      if (app.got_subcommand(w.cmd)) {
        w.binder->apply_config(load_config(w.common->config_path));
        return w.run();
      }
    }
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
