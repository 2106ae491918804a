#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "selfconsume/bounds.hpp"
#include "selfconsume/experiments.hpp"

namespace selfconsume {

// Thrown on any output failure; the CLI maps it to its I/O exit code.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One row of a curve table.  Optional cells serialize as empty CSV fields /
// JSON nulls.
struct CurveRow {
  std::size_t stage = 0;
  double mean_l2 = 0.0;
  double stderr_l2 = 0.0;
  double mean_l1 = 0.0;
  double stderr_l1 = 0.0;
  std::optional<double> lower_l2;
  std::optional<double> upper_l2;
  std::optional<double> oracle_lower;
  std::optional<double> oracle_upper;
  std::optional<double> h;
};

// Value formatted to 9 significant digits, and the same value re-parsed so
// JSON and CSV render identically.
std::string fmt9(double x);
double round9(double x);

std::string estimator_name(EstimatorKind kind);
std::string workflow_name(Workflow wf);

// Curve rows with the closed-form bound columns attached per stage
// (default stage-loss-bound recursion).
std::vector<CurveRow> attach_bounds(const LossCurve& curve, const Schedule& s,
                                    std::size_t k);

// Fixed column set: stage, mean_l2, stderr_l2, mean_l1, stderr_l1, lower_l2,
// upper_l2, oracle_lower, oracle_upper, h_t.
std::string curve_csv(const std::vector<CurveRow>& rows);

std::string bounds_csv(const std::vector<BoundReport>& reports);

nlohmann::json curve_json(const std::vector<CurveRow>& rows);
nlohmann::json bounds_json(const std::vector<BoundReport>& reports);
nlohmann::json fit_json(const FitCheck& fit);
nlohmann::json rate_fit_json(const RateFit& fit);
nlohmann::json claim1_json(const Claim1Report& report);
nlohmann::json claim2_json(const Claim2Report& report);
nlohmann::json replacement_json(const ReplacementReport& report);

// Rows for the claim/replacement reports' curve tables (their bound columns
// come from the report's own curves, not the default recursion).
std::vector<CurveRow> claim1_rows(const Claim1Report& report);
std::vector<CurveRow> claim2_rows(const Claim2Report& report);
std::vector<CurveRow> replacement_rows(const ReplacementReport& report);

// Writes payload to path via a temp file and atomic rename; an empty path
// writes to stdout.  Throws IoError on failure.
void write_atomic(const std::string& path, const std::string& payload);

}  // namespace selfconsume
