#pragma once

// Bounds for the two-fading-value channel and the Costa small-spread gap.

#include <dpc/channel.hpp>
#include <dpc/errors.hpp>
#include <dpc/gaussian.hpp>
#include <dpc/optimize.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace dpc {

struct TwoFadingInstance {
  double power;
  double a1;
  double a2;
  double state_power = 1.0;

  /// Same channel with unit state power (amplitudes absorb sqrt(Q)).
  TwoFadingInstance normalized() const {
    const double s = std::sqrt(state_power);
    return {power, a1 * s, a2 * s, 1.0};
  }

  ChannelParams channel() const { return ChannelParams(power, FadingSet{a1, a2}, state_power); }
};

namespace detail {

inline TwoFadingInstance checked(const TwoFadingInstance& inst) {
  if (!(inst.power > 0.0) || !std::isfinite(inst.power)) {
    throw InvalidParameter("power must be positive");
  }
  if (!(inst.state_power > 0.0)) {
    throw InvalidParameter("state power must be positive");
  }
  if (!(inst.a1 >= 0.0) || !std::isfinite(inst.a2)) {
    throw InvalidParameter("fading values must be finite and nonnegative");
  }
  if (inst.a1 == inst.a2) throw Divergence("bound diverges for a1 = a2");
  if (inst.a1 > inst.a2) throw InvalidParameter("fading values must be strictly increasing");
  return inst.normalized();
}

inline void check_power(double power) {
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw InvalidParameter("power must be positive");
  }
}

}  // namespace detail

/// Outer bound of the two-user carbon copying channel (common fading a).
inline RateBound carbon_outer(double power, double a) {
  detail::check_power(power);
  if (!(a >= 0.0)) throw InvalidParameter("fading must be nonnegative");
  const double num = 1.0 + power + a * a + 2.0 * a * std::sqrt(power);
  double value;
  if (a * a <= 2.0) {
    value = 0.5 * std::log2(num / (1.0 + a * a / 2.0));
  } else {
    value = 0.5 * std::log2(num / (a / std::sqrt(2.0))) -
            std::max(0.0, 0.25 * std::log2(a * a / (2.0 * power + 2.0)));
  }
  return {"carbon_outer", value, ChannelParams(power, FadingSet{a}), std::nullopt,
          a * a <= 2.0 ? "a^2<=2" : "a^2>2"};
}

/// Binning + Gaussian signaling inner bound of the two-user carbon copying channel.
inline RateBound carbon_inner(double power, double a) {
  detail::check_power(power);
  if (!(a >= 0.0)) throw InvalidParameter("fading must be nonnegative");
  const double half = a * a / 2.0;
  double value;
  std::string branch;
  if (half < 1.0) {
    value = 0.5 * std::log2(1.0 + power / (half + 1.0));
    branch = "a^2/2<1";
  } else if (half <= power + 1.0) {
    value = 0.5 * std::log2((power + half + 1.0) / (a * a)) + 0.25 * std::log2(half);
    branch = "1<=a^2/2<=P+1";
  } else {
    value = 0.25 * std::log2(1.0 + power);
    branch = "a^2/2>P+1";
  }
  return {"carbon_inner", value, ChannelParams(power, FadingSet{a}), std::nullopt, branch};
}

/// Per-use outer-bound objective at state scaling gamma in (0, 1]: half the sum
///   1/2 log(1+P+g^2 a1^2+2 g a1 sqrt P) + 1/2 log(1+P+g^2 a2^2+2 g a2 sqrt P) - 1/2 log(g^2 (a2-a1)^2)
/// (the two receivers' mutual informations are averaged).
inline double outer2_objective(const TwoFadingInstance& inst, double gamma) {
  const auto n = detail::checked(inst);
  if (gamma == 0.0) throw Divergence("outer bound objective diverges at gamma = 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidParameter("gamma must lie in (0, 1]");
  const double sp = std::sqrt(n.power);
  const double t1 = 1.0 + n.power + gamma * gamma * n.a1 * n.a1 + 2.0 * gamma * n.a1 * sp;
  const double t2 = 1.0 + n.power + gamma * gamma * n.a2 * n.a2 + 2.0 * gamma * n.a2 * sp;
  const double d = gamma * (n.a2 - n.a1);
  return 0.25 * std::log2(t1) + 0.25 * std::log2(t2) - 0.25 * std::log2(d * d);
}

/// Relaxation without cross terms, x = gamma^2, including the +1 bit constant:
///   1/4 log(1+P+x a1^2) + 1/4 log(1+P+x a2^2) - 1/4 log(x (a2-a1)^2) + 1.
inline double outer2_relaxed_objective(const TwoFadingInstance& inst, double x) {
  const auto n = detail::checked(inst);
  if (x == 0.0) throw Divergence("relaxed objective diverges at x = 0");
  if (!(x > 0.0 && x <= 1.0)) throw InvalidParameter("x must lie in (0, 1]");
  const double d2 = (n.a2 - n.a1) * (n.a2 - n.a1);
  return 0.25 * std::log2(1.0 + n.power + x * n.a1 * n.a1) +
         0.25 * std::log2(1.0 + n.power + x * n.a2 * n.a2) - 0.25 * std::log2(x * d2) + 1.0;
}

/// Stationary point x* = (P+1)/(a1 a2) of the relaxed objective (a minimum); empty for a1 = 0.
inline std::optional<double> outer2_stationary_point(const TwoFadingInstance& inst) {
  const auto n = detail::checked(inst);
  if (n.a1 == 0.0) return std::nullopt;
  return (n.power + 1.0) / (n.a1 * n.a2);
}

inline constexpr double kGammaLowerBracket = 1e-6;
inline constexpr double kGammaTolerance = 1e-10;

/// min over gamma in [1e-6, 1] of outer2_objective.
inline RateBound outer2_numeric(const TwoFadingInstance& inst) {
  const auto n = detail::checked(inst);
  double seed = -1.0;
  if (auto x = outer2_stationary_point(n); x && *x <= 1.0) seed = std::sqrt(*x);
  const auto best = bracketed_minimize([&](double g) { return outer2_objective(n, g); },
                                       kGammaLowerBracket, 1.0, kGammaTolerance, 96, seed);
  return {"outer2_numeric", best.value, inst.channel(), OptimizerState{"gamma", best.argument},
          seed > 0.0 ? "seeded at sqrt(x*)" : ""};
}

/// Closed-form outer bound, split on a1 a2 vs P + 1.
inline RateBound outer2_closed(const TwoFadingInstance& inst) {
  const auto n = detail::checked(inst);
  const double p1 = n.power + 1.0;
  const double d2 = (n.a2 - n.a1) * (n.a2 - n.a1);
  if (n.a1 * n.a2 >= p1) {
    const double s2 = (n.a2 + n.a1) * (n.a2 + n.a1);
    const double value = 0.25 * std::log2(p1) + 0.25 * std::log2(s2 / d2) + 1.0;
    return {"outer2_closed", value, inst.channel(), OptimizerState{"x", p1 / (n.a1 * n.a2)},
            "a1*a2>=P+1"};
  }
  const double value = 0.25 * std::log2(p1) + 0.25 * std::log2(p1 + n.a2 * n.a2) -
                       0.25 * std::log2(d2) + 1.5;
  return {"outer2_closed", value, inst.channel(), OptimizerState{"x", 1.0}, "a1*a2<P+1"};
}

/// Two-codeword rate with a fraction beta of the power on the codeword that treats the
/// state as noise (decoded first, against (1-beta)P + a2^2 + 1) and the rest on a codeword
/// precoded against a_j S in receiver j's half of the block:
///   R(beta) = 1/2 log(1 + beta P / (a2^2 + (1-beta) P + 1)) + 1/4 log(1 + (1-beta) P).
/// with_refinement adds 1/4 log max{1, (p+1)(p+a2^2+1)/(p+2 a2^2 p+a2^2+1)}, p = (1-beta)P.
inline double inner2_rate(const TwoFadingInstance& inst, double beta,
                          bool with_refinement = false) {
  const auto n = detail::checked(inst);
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidParameter("beta must lie in [0, 1]");
  const double p = (1.0 - beta) * n.power;
  const double s = n.a2 * n.a2;
  double rate = 0.5 * std::log2(1.0 + beta * n.power / (s + p + 1.0)) + 0.25 * std::log2(1.0 + p);
  if (with_refinement) {
    const double ratio = (p + 1.0) * (p + s + 1.0) / (p + 2.0 * s * p + s + 1.0);
    rate += 0.25 * std::log2(std::max(1.0, ratio));
  }
  return rate;
}

/// Precoded power fraction maximizing inner2_rate: clamp((a2^2 - 1)/P, 0, 1).
inline double inner2_optimal_precoded_fraction(const TwoFadingInstance& inst) {
  const auto n = detail::checked(inst);
  return std::clamp((n.a2 * n.a2 - 1.0) / n.power, 0.0, 1.0);
}

inline double inner2_optimal_beta(const TwoFadingInstance& inst) {
  return 1.0 - inner2_optimal_precoded_fraction(inst);
}

inline RateBound inner2_closed(const TwoFadingInstance& inst) {
  const auto n = detail::checked(inst);
  const double s = n.a2 * n.a2;
  const double alpha = inner2_optimal_precoded_fraction(n);
  double value;
  std::string branch;
  if (s <= 1.0) {
    value = 0.5 * std::log2(1.0 + n.power / (1.0 + s));
    branch = "a2^2<=1";
  } else if (s <= n.power + 1.0) {
    value = 0.5 * std::log2(1.0 + n.power + s) - 0.25 * std::log2(s) - 0.5;
    branch = "1<a2^2<=P+1";
  } else {
    value = 0.25 * std::log2(1.0 + n.power);
    branch = "a2^2>P+1";
  }
  return {"inner2_closed", value, inst.channel(), OptimizerState{"alpha", alpha}, branch};
}

/// Parameter regions of the two-value gap analysis.
enum class GapRegion { SmallA2, CaseI, CaseII, CaseIII };

inline const char* to_string(GapRegion r) {
  switch (r) {
    case GapRegion::SmallA2: return "small-a2";
    case GapRegion::CaseI: return "I";
    case GapRegion::CaseII: return "II";
    case GapRegion::CaseIII: return "III";
  }
  return "?";
}

inline GapRegion gap_region(const TwoFadingInstance& inst) {
  const auto n = detail::checked(inst);
  const double s = n.a2 * n.a2;
  if (s <= 1.0) return GapRegion::SmallA2;
  if (s <= n.power + 1.0) return GapRegion::CaseII;
  return n.a1 * n.a2 >= n.power + 1.0 ? GapRegion::CaseI : GapRegion::CaseIII;
}

struct GapReport {
  double outer_closed;
  double outer_numeric;
  double inner_closed;
  double trivial_outer;    // 1/2 log(1+P)
  double realized;         // outer_closed - inner_closed
  double realized_numeric; // outer_numeric - inner_closed
  double tightest;         // min(outer_closed, outer_numeric, trivial_outer) - inner_closed
  double theorem_bound;    // 1/2 log((a2+a1)/(a2-a1)) + 2
  double region_bound;     // bound for the region's case analysis
  GapRegion region;
  bool small_power;        // P < 1
  bool small_spread;       // a2 - a1 <= 4
};

/// Region-specific gap bounds: G_I = 1/4 log((a2+a1)^2/(a2-a1)^2) + 1,
/// G_II = G_III = 1/4 log(a2^2/(a2-a1)^2) + 2; small a2 is measured against 1/2 log(1+P)
/// and bounded by 1/2.
inline double gap_region_bound(const TwoFadingInstance& inst) {
  const auto n = detail::checked(inst);
  const double d2 = (n.a2 - n.a1) * (n.a2 - n.a1);
  switch (gap_region(n)) {
    case GapRegion::SmallA2: return 0.5;
    case GapRegion::CaseI: return 0.25 * std::log2((n.a2 + n.a1) * (n.a2 + n.a1) / d2) + 1.0;
    case GapRegion::CaseII:
    case GapRegion::CaseIII: return 0.25 * std::log2(n.a2 * n.a2 / d2) + 2.0;
  }
  return 0.0;
}

inline GapReport gap2(const TwoFadingInstance& inst) {
  const auto n = detail::checked(inst);
  GapReport r{};
  r.outer_closed = outer2_closed(n).value;
  r.outer_numeric = outer2_numeric(n).value;
  r.inner_closed = inner2_closed(n).value;
  r.trivial_outer = 0.5 * std::log2(1.0 + n.power);
  r.realized = r.outer_closed - r.inner_closed;
  r.realized_numeric = r.outer_numeric - r.inner_closed;
  r.tightest = std::min({r.outer_closed, r.outer_numeric, r.trivial_outer}) - r.inner_closed;
  r.theorem_bound = 0.5 * std::log2((n.a2 + n.a1) / (n.a2 - n.a1)) + 2.0;
  r.region = gap_region(n);
  r.region_bound = gap_region_bound(n);
  r.small_power = n.power < 1.0;
  r.small_spread = n.a2 - n.a1 <= 4.0;
  return r;
}

struct SmallSpreadReport {
  double spread;                // eps = a_M - a_1
  double gap_bound;             // 1/2 log(1 + eps^2 P / (P + a_1^2 + 1))
  double trivial_outer;         // 1/2 log(1 + P)
  std::vector<double> rates;    // R_j = 1/2 log((P+1) / (1 + eps^2 P / (P + a_j^2 + 1)))
  double inner;                 // min_j R_j
  std::vector<double> exact_rates;  // Costa precoding against the mean fading, exact
  double exact_inner;
};

/// Costa precoding against the average state for an M-value fading set.
inline SmallSpreadReport costa_small_spread_gap(double power, const FadingSet& fading) {
  detail::check_power(power);
  if (fading.size() == 0) throw InvalidParameter("fading set must not be empty");
  SmallSpreadReport r{};
  r.spread = fading.back() - fading.front();
  const double e2p = r.spread * r.spread * power;
  r.gap_bound = 0.5 * std::log2(1.0 + e2p / (power + fading.front() * fading.front() + 1.0));
  r.trivial_outer = 0.5 * std::log2(1.0 + power);
  double mean = 0.0;
  for (double a : fading) mean += a;
  mean /= static_cast<double>(fading.size());
  r.inner = r.exact_inner = std::numeric_limits<double>::infinity();
  for (double a : fading) {
    const double rj = 0.5 * std::log2((power + 1.0) / (1.0 + e2p / (power + a * a + 1.0)));
    r.rates.push_back(rj);
    r.inner = std::min(r.inner, rj);
    const double exact = costa_mismatched_rate(power, 1.0, mean, a);
    r.exact_rates.push_back(exact);
    r.exact_inner = std::min(r.exact_inner, exact);
  }
  return r;
}

}  // namespace dpc
