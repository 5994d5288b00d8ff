#pragma once

// Channel parameterization: known state, receiver-side fading gain on the state:
//   Y_j = X + a_j S + Z_j,  E[X^2] <= P,  S ~ N(0, Q),  Z_j ~ N(0, 1).
// All rates in this library are in bits per channel use.

#include <dpc/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dpc {

/// Strictly increasing, nonnegative fading amplitudes a_1 < ... < a_M.
class FadingSet {
 public:
  FadingSet() = default;

  explicit FadingSet(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
      throw InvalidParameter("fading set must contain at least one value");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
        throw InvalidParameter("fading values must be finite and nonnegative");
      }
      if (i > 0 && !(values_[i - 1] < values_[i])) {
        throw InvalidParameter("fading values must be strictly increasing");
      }
    }
  }

  FadingSet(std::initializer_list<double> values)
      : FadingSet(std::vector<double>(values)) {}

  /// Sorts and drops exact duplicates before validating.
  static FadingSet deduplicated(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return FadingSet(std::move(values));
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }
  std::span<const double> values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  bool contains(double a) const {
    return std::binary_search(values_.begin(), values_.end(), a);
  }

  friend bool operator==(const FadingSet&, const FadingSet&) = default;

 private:
  std::vector<double> values_;
};

class ChannelParams {
 public:
  ChannelParams(double power, FadingSet fading, double state_power = 1.0,
                double noise_power = 1.0)
      : power_(power),
        state_power_(state_power),
        noise_power_(noise_power),
        fading_(std::move(fading)) {
    if (!(power_ > 0.0) || !std::isfinite(power_)) {
      throw InvalidParameter("power must be positive");
    }
    if (!(state_power_ > 0.0) || !std::isfinite(state_power_)) {
      throw InvalidParameter("state power must be positive");
    }
    if (!(noise_power_ > 0.0) || !std::isfinite(noise_power_)) {
      throw InvalidParameter("noise power must be positive");
    }
    if (fading_.size() == 0) {
      throw InvalidParameter("fading set must contain at least one value");
    }
  }

  double power() const { return power_; }
  double state_power() const { return state_power_; }
  double noise_power() const { return noise_power_; }
  const FadingSet& fading() const { return fading_; }
  std::size_t receivers() const { return fading_.size(); }

  bool normalized() const { return state_power_ == 1.0 && noise_power_ == 1.0; }

  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;

 private:
  double power_;
  double state_power_;
  double noise_power_;
  FadingSet fading_;
};

/// Y = X + A' S' + Z' with S' ~ N(0, Q'), Z' ~ N(0, N'), E[X^2] <= P'.
struct GeneralizedParams {
  double power;
  double state_power;
  double noise_power;
  std::vector<double> fading;
};

struct OptimizerState {
  std::string variable;
  double argument;
};

struct RateBound {
  std::string name;
  double value;
  ChannelParams params;
  std::optional<OptimizerState> optimizer;
  std::string notes;
};

/// Maps a generalized channel onto the unit-state, unit-noise form:
/// P = P'/N', a = a' sqrt(Q'/N').
inline ChannelParams normalize(const GeneralizedParams& g) {
  if (!(g.noise_power > 0.0)) {
    throw InvalidParameter("noise power must be positive");
  }
  if (!(g.state_power > 0.0)) {
    throw InvalidParameter("state power must be positive");
  }
  if (!(g.power > 0.0)) {
    throw InvalidParameter("power must be positive");
  }
  const double scale = std::sqrt(g.state_power / g.noise_power);
  std::vector<double> a;
  a.reserve(g.fading.size());
  for (double v : g.fading) {
    if (v < 0.0) {
      throw InvalidParameter("fading values must be nonnegative");
    }
    a.push_back(v * scale);
  }
  return ChannelParams(g.power / g.noise_power, FadingSet(std::move(a)));
}

inline ChannelParams normalize(const ChannelParams& c) {
  std::vector<double> a(c.fading().begin(), c.fading().end());
  return normalize(GeneralizedParams{c.power(), c.state_power(), c.noise_power(), std::move(a)});
}

inline GeneralizedParams to_generalized(const ChannelParams& c) {
  return {c.power(), c.state_power(), c.noise_power(),
          std::vector<double>(c.fading().begin(), c.fading().end())};
}

/// Def. of the strong fading regime prints the amplitude sum (P+1) sum_{q<j} a_q;
/// the entropy bounds use the power sum (P+1) sum_{q<j} a_q^2. Both are offered.
enum class StrongFadingVariant { AmplitudeSum, PowerSum };

inline const char* to_string(StrongFadingVariant v) {
  return v == StrongFadingVariant::AmplitudeSum ? "amplitude-sum" : "power-sum";
}

namespace detail {

inline double chain_term(double a, StrongFadingVariant v) {
  return v == StrongFadingVariant::AmplitudeSum ? a : a * a;
}

inline void require_normalized(const ChannelParams& c) {
  if (!c.normalized()) {
    throw InvalidParameter("operation requires a normalized channel (unit state and noise power)");
  }
}

}  // namespace detail

/// a_1 = 0 and a_j^2 >= (P+1) * sum_{q<j} term(a_q) for every j >= 2.
inline bool is_strong_fading(double power, std::span<const double> a,
                             StrongFadingVariant variant = StrongFadingVariant::AmplitudeSum) {
  if (a.empty() || a[0] != 0.0) {
    return false;
  }
  double prefix = 0.0;
  for (std::size_t j = 1; j < a.size(); ++j) {
    prefix += detail::chain_term(a[j - 1], variant);
    if (a[j] * a[j] < (power + 1.0) * prefix) {
      return false;
    }
  }
  return true;
}

inline bool is_strong_fading(const ChannelParams& c,
                             StrongFadingVariant variant = StrongFadingVariant::AmplitudeSum) {
  detail::require_normalized(c);
  return is_strong_fading(c.power(), c.fading().values(), variant);
}

struct StrongFadingSubset {
  std::size_t count;
  FadingSet subset;
};

/// Maximum-cardinality strong-fading subset of the fading set (always contains a_1 = 0).
///
/// Exact for any M: a chain's future feasibility depends only on its last element and
/// its running sum, so keeping the minimal running sum per (length, last index) loses
/// nothing. O(M^3).
inline StrongFadingSubset largest_strong_fading_subset(
    const ChannelParams& c, StrongFadingVariant variant = StrongFadingVariant::AmplitudeSum) {
  detail::require_normalized(c);
  const auto a = c.fading().values();
  if (a[0] != 0.0) {
    throw PreconditionViolation("largest strong fading subset requires a_1 = 0");
  }
  const std::size_t m = a.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  // best[k][i]: minimal running sum of a valid chain with k+1 elements ending at i.
  std::vector<std::vector<double>> best(m, std::vector<double>(m, kInf));
  std::vector<std::vector<std::size_t>> parent(m, std::vector<std::size_t>(m, kNone));
  best[0][0] = detail::chain_term(a[0], variant);
  std::size_t longest = 0;
  std::size_t end = 0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    bool extended = false;
    for (std::size_t i = 0; i < m; ++i) {
      if (best[k][i] == kInf) continue;
      const double threshold = (c.power() + 1.0) * best[k][i];
      for (std::size_t next = i + 1; next < m; ++next) {
        if (a[next] * a[next] < threshold) continue;
        const double sum = best[k][i] + detail::chain_term(a[next], variant);
        if (sum < best[k + 1][next]) {
          best[k + 1][next] = sum;
          parent[k + 1][next] = i;
          extended = true;
        }
      }
    }
    if (!extended) break;
    longest = k + 1;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (best[longest][i] != kInf) {
      end = i;
      break;
    }
  }
  std::vector<double> chain(longest + 1);
  for (std::size_t k = longest + 1, i = end; k-- > 0;) {
    chain[k] = a[i];
    i = parent[k][i];
  }
  return {longest + 1, FadingSet(std::move(chain))};
}

}  // namespace dpc
