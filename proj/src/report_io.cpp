#include "selfconsume/report_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace selfconsume {

std::string fmt9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

double round9(double x) { return std::strtod(fmt9(x).c_str(), nullptr); }

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::PerBatchEmpirical: return "per-batch";
    case EstimatorKind::PooledEmpirical: return "pooled";
    case EstimatorKind::OrderOptimalCombiner: return "combiner";
    case EstimatorKind::PerBatchDebiased: return "debiased";
    case EstimatorKind::OracleEmpirical: return "oracle";
  }
  return "unknown";
}

std::string workflow_name(Workflow wf) {
  switch (wf) {
    case Workflow::Accumulation: return "accumulation";
    case Workflow::Replacement: return "replacement";
    case Workflow::Oracle: return "oracle";
  }
  return "unknown";
}

namespace {

void append_cell(std::string& line, const std::optional<double>& v) {
  line += ',';
  if (v.has_value()) line += fmt9(*v);
}

nlohmann::json json_opt(const std::optional<double>& v) {
  if (v.has_value()) return round9(*v);
  return nullptr;
}

}  // namespace

std::vector<CurveRow> attach_bounds(const LossCurve& curve, const Schedule& s,
                                    std::size_t k) {
  std::vector<CurveRow> rows(curve.stages.size());
  for (std::size_t i = 0; i < curve.stages.size(); ++i) {
    CurveRow& row = rows[i];
    row.stage = curve.stages[i];
    row.mean_l2 = curve.mean_l2[i];
    row.stderr_l2 = curve.stderr_l2[i];
    row.mean_l1 = curve.mean_l1[i];
    row.stderr_l1 = curve.stderr_l1[i];
    const BoundReport rep = bound_report(s, curve.stages[i], k);
    row.lower_l2 = rep.lower_l2;
    row.upper_l2 = rep.upper_l2;
    row.oracle_lower = rep.oracle_lower_l2;
    row.oracle_upper = rep.oracle_upper_l2;
    row.h = rep.h;
  }
  return rows;
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::string out =
      "stage,mean_l2,stderr_l2,mean_l1,stderr_l1,lower_l2,upper_l2,oracle_lower,"
      "oracle_upper,h_t\n";
  for (const CurveRow& row : rows) {
    std::string line = std::to_string(row.stage);
    line += ',';
    line += fmt9(row.mean_l2);
    line += ',';
    line += fmt9(row.stderr_l2);
    line += ',';
    line += fmt9(row.mean_l1);
    line += ',';
    line += fmt9(row.stderr_l1);
    append_cell(line, row.lower_l2);
    append_cell(line, row.upper_l2);
    append_cell(line, row.oracle_lower);
    append_cell(line, row.oracle_upper);
    append_cell(line, row.h);
    line += '\n';
    out += line;
  }
  return out;
}

std::string bounds_csv(const std::vector<BoundReport>& reports) {
  std::string out =
      "stage,sum_na,sum_na2,h_t,lower_l2,lower_l1,upper_l2,upper_l1,"
      "unprocessed_upper_l2,oracle_lower_l2,oracle_upper_l2,applicable_lower,"
      "applicable_upper\n";
  for (const BoundReport& rep : reports) {
    std::string line = std::to_string(rep.stage);
    line += ',';
    line += fmt9(rep.sum_na);
    line += ',';
    line += fmt9(rep.sum_na2);
    line += ',';
    line += fmt9(rep.h);
    append_cell(line, rep.lower_l2);
    append_cell(line, rep.lower_l1);
    append_cell(line, rep.upper_l2);
    append_cell(line, rep.upper_l1);
    line += ',';
    line += fmt9(rep.unprocessed_upper_l2);
    append_cell(line, rep.oracle_lower_l2);
    line += ',';
    line += fmt9(rep.oracle_upper_l2);
    line += rep.applicable_lower ? ",true" : ",false";
    line += rep.applicable_upper ? ",true" : ",false";
    line += '\n';
    out += line;
  }
  return out;
}

nlohmann::json curve_json(const std::vector<CurveRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const CurveRow& row : rows) {
    arr.push_back({{"stage", row.stage},
                   {"mean_l2", round9(row.mean_l2)},
                   {"stderr_l2", round9(row.stderr_l2)},
                   {"mean_l1", round9(row.mean_l1)},
                   {"stderr_l1", round9(row.stderr_l1)},
                   {"lower_l2", json_opt(row.lower_l2)},
                   {"upper_l2", json_opt(row.upper_l2)},
                   {"oracle_lower", json_opt(row.oracle_lower)},
                   {"oracle_upper", json_opt(row.oracle_upper)},
                   {"h_t", json_opt(row.h)}});
  }
  return arr;
}

nlohmann::json bounds_json(const std::vector<BoundReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const BoundReport& rep : reports) {
    arr.push_back({{"stage", rep.stage},
                   {"sum_na", round9(rep.sum_na)},
                   {"sum_na2", round9(rep.sum_na2)},
                   {"h_t", round9(rep.h)},
                   {"lower_l2", json_opt(rep.lower_l2)},
                   {"lower_l1", json_opt(rep.lower_l1)},
                   {"upper_l2", json_opt(rep.upper_l2)},
                   {"upper_l1", json_opt(rep.upper_l1)},
                   {"unprocessed_upper_l2", round9(rep.unprocessed_upper_l2)},
                   {"oracle_lower_l2", json_opt(rep.oracle_lower_l2)},
                   {"oracle_upper_l2", round9(rep.oracle_upper_l2)},
                   {"applicable_lower", rep.applicable_lower},
                   {"applicable_upper", rep.applicable_upper}});
  }
  return arr;
}

nlohmann::json fit_json(const FitCheck& fit) {
  return {{"name", fit.name},
          {"fitted_exponent", round9(fit.fitted)},
          {"predicted_exponent", round9(fit.predicted)},
          {"r2", round9(fit.r2)},
          {"pass", fit.pass}};
}

nlohmann::json rate_fit_json(const RateFit& fit) {
  return {{"exponent", round9(fit.exponent)},
          {"intercept", round9(fit.intercept)},
          {"r2", round9(fit.r2)},
          {"points", fit.points}};
}

namespace {

nlohmann::json claim_config_json(const ClaimConfig& cfg) {
  return {{"a", cfg.a},
          {"beta", cfg.beta},
          {"gamma", cfg.gamma},
          {"horizon", cfg.horizon},
          {"k", cfg.k},
          {"delta", cfg.delta},
          {"trials", cfg.trials},
          {"seed", cfg.seed},
          {"t_min", cfg.t_min},
          {"exponent_tol", cfg.exponent_tol}};
}

std::vector<CurveRow> plain_rows(const LossCurve& curve) {
  std::vector<CurveRow> rows(curve.stages.size());
  for (std::size_t i = 0; i < curve.stages.size(); ++i) {
    rows[i].stage = curve.stages[i];
    rows[i].mean_l2 = curve.mean_l2[i];
    rows[i].stderr_l2 = curve.stderr_l2[i];
    rows[i].mean_l1 = curve.mean_l1[i];
    rows[i].stderr_l1 = curve.stderr_l1[i];
  }
  return rows;
}

}  // namespace

std::vector<CurveRow> claim1_rows(const Claim1Report& report) {
  const Schedule s = schedule_poly(
      {report.cfg.a, report.cfg.beta, report.cfg.gamma, report.cfg.horizon});
  return attach_bounds(report.combiner, s, report.cfg.k);
}

std::vector<CurveRow> claim2_rows(const Claim2Report& report) {
  const Schedule s = schedule_poly(
      {report.cfg.a, report.cfg.beta, report.cfg.gamma, report.cfg.horizon});
  std::vector<CurveRow> rows = plain_rows(report.combiner);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    rows[t].lower_l2 = report.lower_curve[t];
    if (combiner_admissible(s, t)) {
      rows[t].upper_l2 = upper_bound(effective_sums(s, t).sum_na2, report.cfg.k,
                                     LossKind::L2Squared);
    }
    const OracleBounds ob = oracle_bounds(effective_sums(s, t).sum_na, report.cfg.k);
    rows[t].oracle_lower = ob.lower;
    rows[t].oracle_upper = ob.upper;
    rows[t].h = report.h_values[t];
  }
  return rows;
}

std::vector<CurveRow> replacement_rows(const ReplacementReport& report) {
  std::vector<CurveRow> rows = plain_rows(report.replacement);
  for (CurveRow& row : rows) row.lower_l2 = report.floor;
  return rows;
}

nlohmann::json claim1_json(const Claim1Report& report) {
  nlohmann::json ratio = nlohmann::json::array();
  for (double r : report.ratio) ratio.push_back(round9(r));
  return {{"experiment", "claim1"},
          {"config", claim_config_json(report.cfg)},
          {"regime", regime_label_name(report.regime.label)},
          {"regime_caveat", report.regime.caveat},
          {"fits", nlohmann::json::array({fit_json(report.combiner_fit),
                                          fit_json(report.oracle_fit),
                                          fit_json(report.ratio_fit)})},
          {"combiner", curve_json(claim1_rows(report))},
          {"oracle", curve_json(plain_rows(report.oracle))},
          {"ratio", ratio},
          {"pass", report.pass}};
}

nlohmann::json claim2_json(const Claim2Report& report) {
  return {{"experiment", "claim2"},
          {"config", claim_config_json(report.cfg)},
          {"regime", regime_label_name(report.regime.label)},
          {"regime_caveat", report.regime.caveat},
          {"fits", nlohmann::json::array({fit_json(report.combiner_fit),
                                          fit_json(report.lower_fit)})},
          {"combiner", curve_json(claim2_rows(report))},
          {"pointwise_ok", report.pointwise_ok},
          {"pass", report.pass}};
}

nlohmann::json replacement_json(const ReplacementReport& report) {
  return {{"experiment", "replacement"},
          {"config",
           {{"n", report.cfg.n},
            {"alpha", report.cfg.alpha},
            {"horizon", report.cfg.horizon},
            {"k", report.cfg.k},
            {"delta", report.cfg.delta},
            {"trials", report.cfg.trials},
            {"seed", report.cfg.seed},
            {"estimator", estimator_name(report.cfg.estimator)}}},
          {"replacement", curve_json(replacement_rows(report))},
          {"accumulation", curve_json(plain_rows(report.accumulation))},
          {"measured_sup", round9(report.measured_sup)},
          {"floor", round9(report.floor)},
          {"floor_ok", report.floor_ok},
          {"accumulation_wins", report.accumulation_wins},
          {"pass", report.pass}};
}

void write_atomic(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
    if (!std::cout) throw IoError("failed writing to stdout");
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << payload;
    out.flush();
    if (!out) throw IoError("failed writing " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp + " to " + path);
  }
}

}  // namespace selfconsume
