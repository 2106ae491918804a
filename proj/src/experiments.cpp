#include "selfconsume/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace selfconsume {

namespace {

// Neumaier compensated accumulator; makes the trial-ordered reduction
// insensitive to rounding at the 1e-12 level regardless of magnitude mix.
struct CompensatedSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }
  double value() const { return s + c; }
};

// Runs fn(trial) exactly once per index over contiguous per-worker chunks.
// Each trial writes only its own output slot, so execution order is
// irrelevant to the result.
template <typename Fn>
void parallel_trials(std::int64_t trials, int workers, const Fn& fn) {
  int w = workers == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : workers;
  if (w < 1) w = 1;
  if (static_cast<std::int64_t>(w) > trials) w = static_cast<int>(trials);
  if (w <= 1) {
    for (std::int64_t i = 0; i < trials; ++i) fn(i);
    return;
  }
  const std::int64_t chunk = (trials + w - 1) / w;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(w));
  for (int worker = 0; worker < w; ++worker) {
    const std::int64_t begin = worker * chunk;
    const std::int64_t end = std::min(trials, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn]() {
      for (std::int64_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (std::thread& th : pool) th.join();
}

void check_mc_config(const Schedule& s, const McConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("need at least one trial");
  switch (cfg.workflow) {
    case Workflow::Accumulation:
      if (cfg.estimator == EstimatorKind::OracleEmpirical ||
          cfg.estimator == EstimatorKind::PerBatchDebiased) {
        throw std::invalid_argument("estimator kind incompatible with accumulation workflow");
      }
      break;
    case Workflow::Replacement: {
      if (cfg.estimator != EstimatorKind::PerBatchEmpirical &&
          cfg.estimator != EstimatorKind::PerBatchDebiased) {
        throw std::invalid_argument("estimator kind incompatible with replacement workflow");
      }
      for (std::size_t t = 0; t <= s.horizon(); ++t) {
        if (s.n(t) != s.n(0) || (t >= 1 && s.alpha(t) != s.alpha(1))) {
          throw std::invalid_argument("replacement workflow needs a constant schedule");
        }
      }
      break;
    }
    case Workflow::Oracle:
      if (cfg.estimator != EstimatorKind::OracleEmpirical) {
        throw std::invalid_argument("oracle workflow forces the oracle estimator");
      }
      break;
  }
}

// Per-trial loss matrices reduced in trial order.
LossCurve reduce_curve(const Schedule& s, std::int64_t trials,
                       const std::vector<double>& l2, const std::vector<double>& l1) {
  const std::size_t stages = s.stages();
  LossCurve curve;
  curve.stages.resize(stages);
  curve.mean_l2.resize(stages);
  curve.stderr_l2.resize(stages);
  curve.mean_l1.resize(stages);
  curve.stderr_l1.resize(stages);
  for (std::size_t t = 0; t < stages; ++t) {
    curve.stages[t] = t;
    CompensatedSum sum2, sum1;
    for (std::int64_t i = 0; i < trials; ++i) {
      sum2.add(l2[static_cast<std::size_t>(i) * stages + t]);
      sum1.add(l1[static_cast<std::size_t>(i) * stages + t]);
    }
    const double m2 = sum2.value() / static_cast<double>(trials);
    const double m1 = sum1.value() / static_cast<double>(trials);
    curve.mean_l2[t] = m2;
    curve.mean_l1[t] = m1;
    if (trials > 1) {
      CompensatedSum var2, var1;
      for (std::int64_t i = 0; i < trials; ++i) {
        const double d2 = l2[static_cast<std::size_t>(i) * stages + t] - m2;
        const double d1 = l1[static_cast<std::size_t>(i) * stages + t] - m1;
        var2.add(d2 * d2);
        var1.add(d1 * d1);
      }
      const double denom = static_cast<double>(trials - 1) * static_cast<double>(trials);
      curve.stderr_l2[t] = std::sqrt(var2.value() / denom);
      curve.stderr_l1[t] = std::sqrt(var1.value() / denom);
    }
  }
  return curve;
}

}  // namespace

LossCurve mc_loss(const Simplex& p, const Schedule& s, const McConfig& cfg) {
  check_mc_config(s, cfg);
  const std::size_t stages = s.stages();
  std::vector<double> l2(static_cast<std::size_t>(cfg.trials) * stages);
  std::vector<double> l1(l2.size());
  RunOptions opts;
  opts.clamp_invalid = cfg.clamp_invalid;

  parallel_trials(cfg.trials, cfg.workers, [&](std::int64_t trial) {
    const RngSeed seed{cfg.master_seed,
                       static_cast<std::uint64_t>(trial) * kStreamsPerTrial};
    Trajectory traj;
    switch (cfg.workflow) {
      case Workflow::Accumulation:
        traj = run_accumulation(p, s, cfg.estimator, seed, opts);
        break;
      case Workflow::Replacement:
        traj = run_replacement(p, s.n(0), s.horizon() >= 1 ? s.alpha(1) : 1.0, s.horizon(),
                               cfg.estimator, seed, opts);
        break;
      case Workflow::Oracle:
        traj = run_oracle(p, s, seed, opts);
        break;
    }
    for (std::size_t t = 0; t < stages; ++t) {
      l2[static_cast<std::size_t>(trial) * stages + t] = traj.loss_l2[t];
      l1[static_cast<std::size_t>(trial) * stages + t] = traj.loss_l1[t];
    }
  });
  return reduce_curve(s, cfg.trials, l2, l1);
}

WorstCaseCurve worstcase_loss(const AssouadFamily& family, const Schedule& s,
                              const McConfig& cfg) {
  if (family.members.empty()) throw std::invalid_argument("family has no members");
  WorstCaseCurve out;
  std::vector<LossCurve> curves;
  curves.reserve(family.members.size());
  for (const Simplex& member : family.members) curves.push_back(mc_loss(member, s, cfg));

  const std::size_t stages = s.stages();
  out.curve.stages.resize(stages);
  out.curve.mean_l2.resize(stages);
  out.curve.stderr_l2.resize(stages);
  out.curve.mean_l1.resize(stages);
  out.curve.stderr_l1.resize(stages);
  out.argmax_l2.resize(stages);
  for (std::size_t t = 0; t < stages; ++t) {
    out.curve.stages[t] = t;
    std::size_t best2 = 0, best1 = 0;
    for (std::size_t m = 1; m < curves.size(); ++m) {
      if (curves[m].mean_l2[t] > curves[best2].mean_l2[t]) best2 = m;
      if (curves[m].mean_l1[t] > curves[best1].mean_l1[t]) best1 = m;
    }
    out.argmax_l2[t] = best2;
    out.curve.mean_l2[t] = curves[best2].mean_l2[t];
    out.curve.stderr_l2[t] = curves[best2].stderr_l2[t];
    out.curve.mean_l1[t] = curves[best1].mean_l1[t];
    out.curve.stderr_l1[t] = curves[best1].stderr_l1[t];
  }
  return out;
}

RateFit fit_rate_values(const std::vector<std::size_t>& stages,
                        const std::vector<double>& values, std::size_t t_min) {
  if (stages.size() != values.size()) throw std::invalid_argument("fit input size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i] >= t_min && values[i] > 0.0) {
      xs.push_back(std::log(static_cast<double>(stages[i] + 1)));
      ys.push_back(std::log(values[i]));
    }
  }
  if (xs.size() < 3) {
    throw std::invalid_argument("rate fit needs at least 3 positive points past burn-in");
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("rate fit needs distinct stages");
  RateFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.points = xs.size();
  const double ss_res = syy - sxy * sxy / sxx;
  fit.r2 = syy > 1e-300 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

RateFit fit_rate(const LossCurve& curve, std::size_t t_min) {
  return fit_rate_values(curve.stages, curve.mean_l2, t_min);
}

RegimeClassification classify_regime(double beta, double gamma) {
  if (!(beta >= 0.0) || !(gamma >= 0.0)) {
    throw std::invalid_argument("regime classification needs beta >= 0, gamma >= 0");
  }
  const double gc = std::min(1.0, (1.0 + beta) / 2.0);
  const double tol = 1e-12;
  RegimeClassification out;
  if (gamma <= tol) {
    out.label = RegimeLabel::AlphaOmegaOne;
  } else if (gamma < gc - tol) {
    out.label = RegimeLabel::MatchingDecayKFree;
  } else if (gamma <= gc + tol) {
    out.label = RegimeLabel::MatchingDecay;
  } else if (gamma < 1.0 - tol) {
    out.label = RegimeLabel::NonMatchingDominatedByH;
  } else if (gamma < beta + 1.0 - tol) {
    out.label = RegimeLabel::FreshDominates;
    out.caveat = true;
  } else {
    out.label = RegimeLabel::ConstantLossFloor;
    out.caveat = true;
  }
  return out;
}

RegimeClassification classify_regime(const PolyScheduleParams& params) {
  return classify_regime(params.beta, params.gamma);
}

std::string regime_label_name(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::AlphaOmegaOne: return "AlphaOmegaOne";
    case RegimeLabel::MatchingDecay: return "MatchingDecay";
    case RegimeLabel::MatchingDecayKFree: return "MatchingDecayKFree";
    case RegimeLabel::NonMatchingDominatedByH: return "NonMatchingDominatedByH";
    case RegimeLabel::FreshDominates: return "FreshDominates";
    case RegimeLabel::ConstantLossFloor: return "ConstantLossFloor";
  }
  return "Unknown";
}

std::vector<std::optional<double>> lower_bound_curve(const Schedule& s, std::size_t k,
                                                     const std::vector<double>& measured_losses,
                                                     bool cap_g) {
  if (measured_losses.size() < s.stages()) {
    throw std::invalid_argument("need a measured loss for every stage");
  }
  std::vector<std::optional<double>> out(s.stages());
  const double kk16 = 16.0 * static_cast<double>(k) * static_cast<double>(k);
  double h = 0.0;
  for (std::size_t t = 0; t < s.stages(); ++t) {
    if (t >= 1) {
      const double raw = kk16 * measured_losses[t - 1];
      h += static_cast<double>(s.n(t)) * s.alpha(t) * (cap_g ? std::min(1.0, raw) : raw);
    }
    out[t] = lower_bound(effective_sums(s, t).sum_na2, h, k, LossKind::L2Squared);
  }
  return out;
}

namespace {

FitCheck make_fit_check(std::string name, const RateFit& fit, double predicted, double tol) {
  FitCheck chk;
  chk.name = std::move(name);
  chk.fitted = fit.exponent;
  chk.predicted = predicted;
  chk.r2 = fit.r2;
  chk.pass = std::abs(fit.exponent - predicted) <= tol;
  return chk;
}

McConfig claim_mc_config(const ClaimConfig& cfg, Workflow wf, EstimatorKind est) {
  McConfig mc;
  mc.trials = cfg.trials;
  mc.master_seed = cfg.seed;
  mc.workflow = wf;
  mc.estimator = est;
  mc.workers = cfg.workers;
  return mc;
}

AssouadFamily claim_family(const ClaimConfig& cfg) {
  Rng rng(RngSeed{cfg.seed, 0});
  return assouad_family(cfg.k, cfg.delta, cfg.max_members, rng);
}

}  // namespace

Claim1Report claim1_experiment(const ClaimConfig& cfg) {
  Claim1Report rep;
  rep.cfg = cfg;
  rep.regime = classify_regime(cfg.beta, cfg.gamma);
  const Schedule s = schedule_poly({cfg.a, cfg.beta, cfg.gamma, cfg.horizon});
  const AssouadFamily fam = claim_family(cfg);

  rep.combiner = worstcase_loss(fam, s,
                                claim_mc_config(cfg, Workflow::Accumulation,
                                                EstimatorKind::OrderOptimalCombiner))
                     .curve;
  rep.oracle = worstcase_loss(fam, s,
                              claim_mc_config(cfg, Workflow::Oracle,
                                              EstimatorKind::OracleEmpirical))
                   .curve;

  rep.ratio.resize(s.stages());
  for (std::size_t t = 0; t < s.stages(); ++t) {
    rep.ratio[t] = rep.oracle.mean_l2[t] > 0.0 ? rep.combiner.mean_l2[t] / rep.oracle.mean_l2[t]
                                               : 0.0;
  }

  rep.combiner_fit = make_fit_check("combiner", fit_rate(rep.combiner, cfg.t_min),
                                    -(cfg.beta - cfg.gamma + 1.0), cfg.exponent_tol);
  rep.oracle_fit = make_fit_check("oracle", fit_rate(rep.oracle, cfg.t_min),
                                  -(cfg.beta + 1.0), cfg.exponent_tol);
  rep.ratio_fit = make_fit_check("ratio", fit_rate_values(rep.combiner.stages, rep.ratio, cfg.t_min),
                                 cfg.gamma, cfg.exponent_tol);
  rep.pass = rep.combiner_fit.pass && rep.oracle_fit.pass && rep.ratio_fit.pass;
  return rep;
}

Claim2Report claim2_experiment(const ClaimConfig& cfg) {
  Claim2Report rep;
  rep.cfg = cfg;
  rep.regime = classify_regime(cfg.beta, cfg.gamma);
  const Schedule s = schedule_poly({cfg.a, cfg.beta, cfg.gamma, cfg.horizon});
  const AssouadFamily fam = claim_family(cfg);

  rep.combiner = worstcase_loss(fam, s,
                                claim_mc_config(cfg, Workflow::Accumulation,
                                                EstimatorKind::OrderOptimalCombiner))
                     .curve;

  // The rate analyses integrate the raw Chebyshev value, so the bound curve
  // uses cap_g=false (the weaker, hence still valid, form).
  rep.lower_curve = lower_bound_curve(s, cfg.k, rep.combiner.mean_l2, false);
  rep.h_values.resize(s.stages(), 0.0);
  {
    const double kk16 = 16.0 * static_cast<double>(cfg.k) * static_cast<double>(cfg.k);
    double h = 0.0;
    for (std::size_t t = 1; t < s.stages(); ++t) {
      h += static_cast<double>(s.n(t)) * s.alpha(t) * kk16 * rep.combiner.mean_l2[t - 1];
      rep.h_values[t] = h;
    }
  }

  rep.combiner_fit = make_fit_check("combiner", fit_rate(rep.combiner, cfg.t_min),
                                    -(cfg.beta + 1.0 - cfg.gamma), cfg.exponent_tol);
  std::vector<std::size_t> lb_stages;
  std::vector<double> lb_values;
  for (std::size_t t = 0; t < rep.lower_curve.size(); ++t) {
    if (rep.lower_curve[t].has_value()) {
      lb_stages.push_back(t);
      lb_values.push_back(*rep.lower_curve[t]);
    }
  }
  rep.lower_fit = make_fit_check("lower_bound", fit_rate_values(lb_stages, lb_values, cfg.t_min),
                                 -(cfg.beta + 1.0) / 2.0, cfg.exponent_tol);

  rep.pointwise_ok = true;
  for (std::size_t t = 0; t < s.stages(); ++t) {
    if (rep.lower_curve[t].has_value() &&
        *rep.lower_curve[t] > rep.combiner.mean_l2[t] + 4.0 * rep.combiner.stderr_l2[t]) {
      rep.pointwise_ok = false;
    }
  }
  rep.pass = rep.combiner_fit.pass && rep.lower_fit.pass && rep.pointwise_ok;
  return rep;
}

ReplacementReport replacement_floor_experiment(const ReplacementConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw std::invalid_argument("replacement comparison needs alpha in (0,1)");
  }
  ReplacementReport rep;
  rep.cfg = cfg;
  const Schedule s = schedule_constant(cfg.n, cfg.alpha, cfg.horizon);
  Rng fam_rng(RngSeed{cfg.seed, 0});
  const AssouadFamily fam = assouad_family(cfg.k, cfg.delta, cfg.max_members, fam_rng);

  McConfig mc;
  mc.trials = cfg.trials;
  mc.master_seed = cfg.seed;
  mc.workers = cfg.workers;
  mc.workflow = Workflow::Replacement;
  mc.estimator = cfg.estimator;
  rep.replacement = worstcase_loss(fam, s, mc).curve;

  mc.workflow = Workflow::Accumulation;
  mc.estimator = EstimatorKind::OrderOptimalCombiner;
  rep.accumulation = worstcase_loss(fam, s, mc).curve;

  rep.measured_sup = *std::max_element(rep.replacement.mean_l2.begin(),
                                       rep.replacement.mean_l2.end());
  rep.floor = replacement_lower_bound(cfg.n, cfg.alpha, rep.measured_sup, cfg.k);

  rep.floor_ok = true;
  for (std::size_t t = 0; t < rep.replacement.mean_l2.size(); ++t) {
    if (rep.replacement.mean_l2[t] < rep.floor - 4.0 * rep.replacement.stderr_l2[t]) {
      rep.floor_ok = false;
    }
  }
  const std::size_t last = cfg.horizon;
  const double joint = std::sqrt(rep.replacement.stderr_l2[last] * rep.replacement.stderr_l2[last] +
                                 rep.accumulation.stderr_l2[last] * rep.accumulation.stderr_l2[last]);
  rep.accumulation_wins =
      rep.accumulation.mean_l2[last] < rep.replacement.mean_l2[last] - 4.0 * joint;
  rep.pass = rep.floor_ok && rep.accumulation_wins;
  return rep;
}

}  // namespace selfconsume
