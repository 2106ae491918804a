#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfconsume/bounds.hpp"
#include "selfconsume/runners.hpp"
#include "selfconsume/schedule.hpp"
#include "selfconsume/simplex.hpp"

namespace selfconsume {

// Monte Carlo settings shared by every experiment.  Trial i uses RNG streams
// master_seed / (i * kStreamsPerTrial + stage); aggregation reduces the
// per-trial results in trial order with compensated summation, so results
// are byte-identical for any worker count.
struct McConfig {
  std::int64_t trials = 1000;
  std::uint64_t master_seed = 42;
  Workflow workflow = Workflow::Accumulation;
  EstimatorKind estimator = EstimatorKind::OrderOptimalCombiner;
  int workers = 1;  // 0 = hardware concurrency
  bool clamp_invalid = false;
};

// Per-stage loss means and standard errors across trials.
struct LossCurve {
  std::vector<std::size_t> stages;
  std::vector<double> mean_l2;
  std::vector<double> stderr_l2;
  std::vector<double> mean_l1;
  std::vector<double> stderr_l1;
};

// Monte Carlo loss curve of one workflow/estimator on a fixed truth p.
// Replacement workflow requires a constant-style schedule (equal batch
// sizes, one alpha for stages >= 1); the oracle workflow requires
// estimator == OracleEmpirical.
LossCurve mc_loss(const Simplex& p, const Schedule& s, const McConfig& cfg);

// Pointwise maximum of mc_loss over the family members (computed separately
// for the two loss kinds); argmax_l2[t] is the member index attaining the
// squared-l2 maximum at stage t, first index on ties.  Standard errors are
// those of the attaining member.  Every member sees the same RNG streams.
struct WorstCaseCurve {
  LossCurve curve;
  std::vector<std::size_t> argmax_l2;
};

WorstCaseCurve worstcase_loss(const AssouadFamily& family, const Schedule& s,
                              const McConfig& cfg);

// Least-squares fit of log(value) against log(stage+1) over stages >= t_min
// with positive values; throws std::invalid_argument when fewer than three
// such points exist.
struct RateFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

RateFit fit_rate_values(const std::vector<std::size_t>& stages,
                        const std::vector<double>& values, std::size_t t_min);

// Fits the squared-l2 mean of a curve.
RateFit fit_rate(const LossCurve& curve, std::size_t t_min);

// Asymptotic regime of the polynomial schedule family, keyed on gamma
// against gc = min(1, (1+beta)/2):
//   gamma = 0            sampling probability stays order one
//   0 < gamma < gc       loss matches the lower bound, ratio k-free
//   gamma = gc           loss matches the lower bound at the boundary
//   gc < gamma < 1       history error term dominates; bounds split
//   gamma >= 1           outside the clean table: either the current batch's
//                        real mass dominates the whole effective history
//                        (gamma < beta+1) or the effective history saturates
//                        (gamma >= beta+1); flagged with a caveat.
enum class RegimeLabel {
  AlphaOmegaOne,
  MatchingDecay,
  MatchingDecayKFree,
  NonMatchingDominatedByH,
  FreshDominates,
  ConstantLossFloor,
};

struct RegimeClassification {
  RegimeLabel label = RegimeLabel::AlphaOmegaOne;
  bool caveat = false;
};

RegimeClassification classify_regime(double beta, double gamma);
RegimeClassification classify_regime(const PolyScheduleParams& params);
std::string regime_label_name(RegimeLabel label);

// Stagewise minimax lower-bound curve with the history term built from
// measured per-stage worst-case losses.  cap_g selects the capped Chebyshev
// probability (tighter bound) or the raw 16 k^2 r value (the form the rate
// analyses integrate); entries are empty below the applicability mass.
std::vector<std::optional<double>> lower_bound_curve(const Schedule& s, std::size_t k,
                                                     const std::vector<double>& measured_losses,
                                                     bool cap_g);

// One fitted exponent against its predicted value.
struct FitCheck {
  std::string name;
  double fitted = 0.0;
  double predicted = 0.0;
  double r2 = 0.0;
  bool pass = false;
};

// Shared settings for the polynomial-rate experiments.
struct ClaimConfig {
  double a = 1.0;
  double beta = 1.0;
  double gamma = 0.5;
  std::size_t horizon = 40;
  std::size_t k = 2;
  double delta = 0.5;            // family separation for worst-case probing
  std::size_t max_members = 65536;
  std::int64_t trials = 2000;
  std::uint64_t seed = 42;
  std::size_t t_min = 5;         // burn-in excluded from fits
  double exponent_tol = 0.2;
  int workers = 0;
};

// Decaying-injection rate check in the matching regime
// (gamma <= min(1, (1+beta)/2)): fits the combiner's worst-case curve against
// t^-(beta-gamma+1), the oracle's against t^-(beta+1), and their ratio
// against t^gamma.
struct Claim1Report {
  ClaimConfig cfg;
  RegimeClassification regime;
  LossCurve combiner;
  LossCurve oracle;
  std::vector<double> ratio;
  FitCheck combiner_fit;
  FitCheck oracle_fit;
  FitCheck ratio_fit;
  bool pass = false;
};

Claim1Report claim1_experiment(const ClaimConfig& cfg);

// Error-dominated regime check ((1+beta)/2 < gamma < 1): fits the combiner's
// curve against t^-(beta+1-gamma) and the measured-loss lower-bound curve
// against t^-(beta+1)/2, and verifies the bound stays below the measured
// curve pointwise (4 standard errors of slack).
struct Claim2Report {
  ClaimConfig cfg;
  RegimeClassification regime;
  LossCurve combiner;
  std::vector<std::optional<double>> lower_curve;
  std::vector<double> h_values;
  FitCheck combiner_fit;
  FitCheck lower_fit;
  bool pointwise_ok = false;
  bool pass = false;
};

Claim2Report claim2_experiment(const ClaimConfig& cfg);

// Replacement-vs-accumulation comparison on matched per-stage totals.
struct ReplacementConfig {
  std::int64_t n = 500;
  double alpha = 0.2;
  std::size_t horizon = 30;
  std::size_t k = 2;
  double delta = 0.5;
  std::size_t max_members = 65536;
  std::int64_t trials = 2000;
  std::uint64_t seed = 42;
  EstimatorKind estimator = EstimatorKind::PerBatchEmpirical;
  int workers = 0;
};

// Runs the replacement workflow worst-case over the family, evaluates the
// stationary floor with the measured sup loss, and runs the accumulation
// combiner on the same schedule.  floor_ok: every stage's worst-case mean is
// at least floor minus 4 standard errors.  accumulation_wins: at the final
// stage the accumulation mean is below the replacement mean by more than
// 4 joint standard errors.
struct ReplacementReport {
  ReplacementConfig cfg;
  LossCurve replacement;
  LossCurve accumulation;
  double measured_sup = 0.0;
  double floor = 0.0;
  bool floor_ok = false;
  bool accumulation_wins = false;
  bool pass = false;
};

ReplacementReport replacement_floor_experiment(const ReplacementConfig& cfg);

}  // namespace selfconsume
