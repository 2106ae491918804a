#include "selfconsume/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>

namespace selfconsume {

double chebyshev_g(double loss_bound, std::size_t k) {
  if (!(loss_bound >= 0.0)) throw std::invalid_argument("loss bound must be >= 0");
  if (k < 2) throw std::invalid_argument("need k >= 2");
  return std::min(1.0, 16.0 * static_cast<double>(k) * static_cast<double>(k) * loss_bound);
}

double error_term_h(const Schedule& s, const std::vector<double>& stage_loss_bounds,
                    std::size_t t, std::size_t k) {
  if (t > s.horizon()) throw std::out_of_range("stage past schedule horizon");
  if (stage_loss_bounds.size() < t) {
    throw std::invalid_argument("need a loss bound for each of stages 0.." +
                                std::to_string(t == 0 ? 0 : t - 1));
  }
  double h = 0.0;
  for (std::size_t i = 1; i <= t; ++i) {
    h += static_cast<double>(s.n(i)) * s.alpha(i) * chebyshev_g(stage_loss_bounds[i - 1], k);
  }
  return h;
}

std::optional<double> lower_bound(double sum_na2, double h, std::size_t k, LossKind kind) {
  if (!(sum_na2 >= 0.0) || !(h >= 0.0)) throw std::invalid_argument("sums must be >= 0");
  if (k < 2) throw std::invalid_argument("need k >= 2");
  const double mass = sum_na2 + h;
  if (mass < static_cast<double>(k) / 4.0) return std::nullopt;
  if (kind == LossKind::L2Squared) return (1.0 / 512.0) / mass;
  return std::sqrt(static_cast<double>(k) / 4096.0 / mass);
}

double upper_bound(double sum_na2, std::size_t k, LossKind kind) {
  if (!(sum_na2 > 0.0)) throw std::invalid_argument("need sum_na2 > 0");
  if (k < 2) throw std::invalid_argument("need k >= 2");
  const double kd = static_cast<double>(k);
  if (kind == LossKind::L2Squared) return (1.0 - 1.0 / kd) / sum_na2;
  return std::sqrt((kd - 1.0) / sum_na2);
}

bool combiner_admissible(const Schedule& s, std::size_t t) {
  if (t > s.horizon()) throw std::out_of_range("stage past schedule horizon");
  double sum_na2 = 0.0;
  for (std::size_t i = 0; i <= t; ++i) {
    const double na = static_cast<double>(s.n(i)) * s.alpha(i);
    sum_na2 += na * s.alpha(i);
    if (na > sum_na2) return false;
  }
  return true;
}

double unprocessed_upper_bound(const Schedule& s, std::size_t t, std::size_t k) {
  if (t > s.horizon()) throw std::out_of_range("stage past schedule horizon");
  if (k < 2) throw std::invalid_argument("need k >= 2");
  double total = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i <= t; ++i) {
    total += static_cast<double>(s.n(i));
    acc += static_cast<double>(s.n(i)) / (total * total);
  }
  return (1.0 - 1.0 / static_cast<double>(k)) * acc;
}

OracleBounds oracle_bounds(double sum_na, std::size_t k) {
  if (!(sum_na > 0.0)) throw std::invalid_argument("need sum_na > 0");
  if (k < 2) throw std::invalid_argument("need k >= 2");
  OracleBounds b;
  b.upper = 2.0 / sum_na;
  if (sum_na >= static_cast<double>(k) / 4.0) b.lower = (1.0 / 512.0) / sum_na;
  return b;
}

double replacement_lower_bound(std::int64_t n, double alpha, double loss_sup,
                               std::size_t k) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("need alpha in (0,1)");
  if (!(loss_sup >= 0.0)) throw std::invalid_argument("need loss_sup >= 0");
  if (k < 2) throw std::invalid_argument("need k >= 2");
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return 1.0 / (512.0 * (nd * alpha * alpha + 16.0 * loss_sup * nd * alpha * kd * kd));
}

namespace {

Simplex family_member(std::size_t k, double delta, const SignVector& v) {
  std::vector<double> w(k);
  const double base = 1.0 / static_cast<double>(k);
  const double shift = delta / static_cast<double>(k);
  for (std::size_t j = 0; j < k / 2; ++j) {
    w[j] = base + shift * static_cast<double>(v[j]);
    w[j + k / 2] = base - shift * static_cast<double>(v[j]);
  }
  return Simplex(std::move(w));
}

SignVector signs_from_code(std::size_t half, std::uint64_t code) {
  SignVector v(half);
  for (std::size_t j = 0; j < half; ++j) v[j] = (code >> j) & 1u ? 1 : -1;
  return v;
}

}  // namespace

AssouadFamily assouad_family(std::size_t k, double delta, std::size_t max_members,
                             Rng& rng) {
  if (k < 2 || k % 2 != 0) {
    throw std::invalid_argument("hard family needs even k >= 2; use k-1 for odd sizes");
  }
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("need delta in [0,1)");
  if (max_members < 2) throw std::invalid_argument("need max_members >= 2");

  const std::size_t half = k / 2;
  AssouadFamily fam;
  fam.k = k;
  fam.delta = delta;

  const bool enumerable = half < 63 && (std::uint64_t{1} << half) <= max_members;
  if (enumerable) {
    const std::uint64_t count = std::uint64_t{1} << half;
    for (std::uint64_t code = 0; code < count; ++code) {
      fam.signs.push_back(signs_from_code(half, code));
    }
  } else {
    // Random subset.  The first two members differ in exactly one coordinate
    // so a single-flip pair is always present; duplicates are rejected via
    // the packed code when it fits in 64 bits.
    SignVector v(half);
    for (std::size_t j = 0; j < half; ++j) v[j] = rng.next_unit() < 0.5 ? -1 : 1;
    SignVector flipped = v;
    const std::size_t flip_at = static_cast<std::size_t>(rng.next_unit() * half) % half;
    flipped[flip_at] = -flipped[flip_at];
    fam.signs.push_back(v);
    fam.signs.push_back(flipped);

    std::unordered_set<std::uint64_t> seen;
    auto code_of = [half](const SignVector& sv) {
      std::uint64_t c = 0;
      for (std::size_t j = 0; j < half; ++j) {
        if (sv[j] > 0) c |= std::uint64_t{1} << j;
      }
      return c;
    };
    const bool dedup = half <= 64;
    if (dedup) {
      seen.insert(code_of(v));
      seen.insert(code_of(flipped));
    }
    while (fam.signs.size() < max_members) {
      SignVector cand(half);
      for (std::size_t j = 0; j < half; ++j) cand[j] = rng.next_unit() < 0.5 ? -1 : 1;
      if (dedup && !seen.insert(code_of(cand)).second) continue;
      fam.signs.push_back(std::move(cand));
    }
  }

  fam.members.reserve(fam.signs.size());
  for (const SignVector& v : fam.signs) fam.members.push_back(family_member(k, delta, v));
  return fam;
}

std::optional<double> assouad_delta(const Schedule& s, const std::vector<double>& g_values,
                                    std::size_t t, std::size_t k) {
  if (t > s.horizon()) throw std::out_of_range("stage past schedule horizon");
  if (k < 2) throw std::invalid_argument("need k >= 2");
  if (g_values.size() < t + 1) {
    throw std::invalid_argument("need a g value for each of stages 0.." + std::to_string(t));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i <= t; ++i) {
    if (!(g_values[i] >= 0.0 && g_values[i] <= 1.0)) {
      throw std::invalid_argument("g values must lie in [0,1]");
    }
    sum += static_cast<double>(s.n(i)) * s.alpha(i) * (s.alpha(i) + g_values[i]);
  }
  if (sum < static_cast<double>(k) / 4.0) return std::nullopt;  // scale would exceed one
  return std::sqrt(static_cast<double>(k) / (64.0 * sum));
}

SqrtSumCheck recursive_sqrt_sum_check(const std::vector<double>& seq) {
  if (seq.empty()) throw std::invalid_argument("need a nonempty sequence");
  if (!(seq[0] > 0.0)) throw std::invalid_argument("need a_0 > 0");
  for (double a : seq) {
    if (!(a >= 0.0)) throw std::invalid_argument("sequence entries must be >= 0");
  }
  SqrtSumCheck chk;
  double prefix = seq[0];
  double ratio_sup = 0.0;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    chk.lhs += seq[i] / std::sqrt(prefix);
    ratio_sup = std::max(ratio_sup, seq[i] / prefix);
    prefix += seq[i];
  }
  chk.d = 1.0 + std::sqrt(1.0 + ratio_sup);
  chk.rhs = chk.d * std::sqrt(prefix);
  chk.holds = chk.lhs <= chk.rhs;
  return chk;
}

std::vector<double> default_stage_loss_bounds(const Schedule& s, std::size_t t,
                                              std::size_t k) {
  std::vector<double> bounds;
  bounds.reserve(t);
  bool admissible = true;
  double sum_na2 = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    const double na = static_cast<double>(s.n(i)) * s.alpha(i);
    sum_na2 += na * s.alpha(i);
    if (na > sum_na2) admissible = false;
    bounds.push_back(admissible ? upper_bound(sum_na2, k, LossKind::L2Squared)
                                : std::sqrt(2.0));
  }
  return bounds;
}

BoundReport bound_report(const Schedule& s, std::size_t t, std::size_t k,
                         const std::vector<double>& stage_loss_bounds) {
  if (t > s.horizon()) throw std::out_of_range("stage past schedule horizon");
  if (k < 2) throw std::invalid_argument("need k >= 2");

  std::vector<double> defaults;
  const std::vector<double>* bounds_in = &stage_loss_bounds;
  if (stage_loss_bounds.empty() && t > 0) {
    defaults = default_stage_loss_bounds(s, t, k);
    bounds_in = &defaults;
  }

  BoundReport rep;
  rep.stage = t;
  const EffectiveSums sums = effective_sums(s, t);
  rep.sum_na = sums.sum_na;
  rep.sum_na2 = sums.sum_na2;
  rep.h = error_term_h(s, *bounds_in, t, k);

  rep.lower_l2 = lower_bound(rep.sum_na2, rep.h, k, LossKind::L2Squared);
  rep.lower_l1 = lower_bound(rep.sum_na2, rep.h, k, LossKind::L1);
  rep.applicable_lower = rep.lower_l2.has_value();

  rep.applicable_upper = combiner_admissible(s, t);
  if (rep.applicable_upper) {
    rep.upper_l2 = upper_bound(rep.sum_na2, k, LossKind::L2Squared);
    rep.upper_l1 = upper_bound(rep.sum_na2, k, LossKind::L1);
  }

  rep.unprocessed_upper_l2 = unprocessed_upper_bound(s, t, k);
  const OracleBounds ob = oracle_bounds(rep.sum_na, k);
  rep.oracle_lower_l2 = ob.lower;
  rep.oracle_upper_l2 = ob.upper;
  return rep;
}

}  // namespace selfconsume
