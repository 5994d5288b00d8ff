#pragma once

// Sample-level simulation of the compound channel Y_j = X + a_j S + Z_j.
//
// Rates are Gaussian plug-in estimates from empirical second moments (means are known
// to be zero). Per sample i the base vector is (W_N, W_P, W_S, W_Z1..W_ZM) of standard
// normals; variable pair v of sample i comes from the Philox block with counter
// {i_lo, i_hi, v, cell} and key {seed_lo, seed_hi}, so every (cell, variable) has its own
// stream and draws do not depend on thread scheduling.
//
// Samples are dealt round-robin into kBatches batches; each batch keeps one Gram matrix
// per time slot, accumulated in sample order. Totals add batches in batch order.

#include <dpc/bounds_two.hpp>
#include <dpc/channel.hpp>
#include <dpc/errors.hpp>
#include <dpc/gaussian.hpp>
#include <dpc/philox.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace dpc {

inline constexpr std::size_t kMinSamples = 10000;
inline constexpr std::size_t kBatches = 32;

enum class SchemeKind { Tin, CostaMatched, CostaAverage, CostaTimeshare, TwoCodeword };

inline const char* to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::Tin: return "tin";
    case SchemeKind::CostaMatched: return "costa-matched";
    case SchemeKind::CostaAverage: return "costa-average";
    case SchemeKind::CostaTimeshare: return "costa-timeshare";
    case SchemeKind::TwoCodeword: return "two-codeword";
  }
  return "?";
}

struct SchemeConfig {
  SchemeKind kind = SchemeKind::Tin;
  std::optional<double> target;   // costa-matched
  std::vector<double> fractions;  // costa-timeshare / two-codeword slot lengths; empty = equal
  std::optional<double> beta;     // two-codeword TIN power fraction; empty = optimal (M = 2)

  static SchemeConfig tin() { return {SchemeKind::Tin, {}, {}, {}}; }
  static SchemeConfig costa_matched(double a) { return {SchemeKind::CostaMatched, a, {}, {}}; }
  static SchemeConfig costa_average() { return {SchemeKind::CostaAverage, {}, {}, {}}; }
  static SchemeConfig costa_timeshare(std::vector<double> fractions = {}) {
    return {SchemeKind::CostaTimeshare, {}, std::move(fractions), {}};
  }
  static SchemeConfig two_codeword(std::optional<double> beta = {}) {
    return {SchemeKind::TwoCodeword, {}, {}, beta};
  }
};

struct Slot {
  double fraction;
  std::optional<double> target;  // precoding target; none for a TIN-only slot
};

/// A scheme bound to a channel: TIN power fraction and the time-slot schedule.
struct ResolvedScheme {
  double beta;  // fraction of power on the codeword decoded treating the state as noise
  std::vector<Slot> slots;

  /// Receiver with fading a decodes the precoded layer in this slot.
  bool decodes(std::size_t slot, double a) const {
    if (!slots[slot].target) return false;
    return slots.size() == 1 || *slots[slot].target == a;
  }
};

namespace detail {

inline std::vector<Slot> per_value_slots(const ChannelParams& c, const std::vector<double>& fractions) {
  const std::size_t m = c.receivers();
  std::vector<Slot> slots;
  if (fractions.empty()) {
    for (double a : c.fading()) slots.push_back({1.0 / static_cast<double>(m), a});
    return slots;
  }
  if (fractions.size() != m) throw InvalidParameter("one slot fraction per fading value is required");
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidParameter("slot fractions must lie in [0, 1]");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidParameter("slot fractions must sum to 1");
  for (std::size_t k = 0; k < m; ++k) slots.push_back({fractions[k], c.fading()[k]});
  return slots;
}

}  // namespace detail

inline ResolvedScheme resolve(const ChannelParams& c, const SchemeConfig& cfg) {
  switch (cfg.kind) {
    case SchemeKind::Tin:
      return {1.0, {{1.0, std::nullopt}}};
    case SchemeKind::CostaMatched:
      if (!cfg.target) throw InvalidParameter("costa-matched needs a precoding target");
      if (!c.fading().contains(*cfg.target)) {
        throw InvalidParameter("unknown precoding target (not in the fading set)");
      }
      return {0.0, {{1.0, *cfg.target}}};
    case SchemeKind::CostaAverage: {
      const double mean = std::accumulate(c.fading().begin(), c.fading().end(), 0.0) /
                          static_cast<double>(c.receivers());
      return {0.0, {{1.0, mean}}};
    }
    case SchemeKind::CostaTimeshare:
      return {0.0, detail::per_value_slots(c, cfg.fractions)};
    case SchemeKind::TwoCodeword: {
      double beta;
      if (cfg.beta) {
        beta = *cfg.beta;
      } else {
        if (c.receivers() != 2) throw InvalidParameter("two-codeword needs beta unless M = 2");
        const auto n = normalize(c);
        beta = inner2_optimal_beta({n.power(), n.fading()[0], n.fading()[1]});
      }
      if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidParameter("beta must lie in [0, 1]");
      return {beta, detail::per_value_slots(c, cfg.fractions)};
    }
  }
  throw InvalidParameter("unknown scheme");
}

struct SimEstimate {
  std::string scheme;
  std::vector<double> rates;  // per receiver, bits per use
  std::vector<double> stderrs;
  double compound;            // min over receivers
  double compound_stderr;
  std::size_t samples;
  std::uint64_t seed;
};

/// DPC_THREADS caps the worker count; default is the hardware concurrency.
inline std::size_t default_threads() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DPC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
  }
  return n;
}

namespace detail {

// Coordinates of the base vector.
inline constexpr std::size_t kTinIdx = 0;
inline constexpr std::size_t kPreIdx = 1;
inline constexpr std::size_t kStateIdx = 2;
inline constexpr std::size_t kNoiseIdx = 3;

struct Layout {
  std::size_t dim;
  std::vector<std::size_t> slot_end;  // slot k holds samples [slot_end[k-1], slot_end[k])
};

inline Layout layout(const ResolvedScheme& s, std::size_t m, std::size_t n) {
  Layout l{kNoiseIdx + m, {}};
  double cum = 0.0;
  for (std::size_t k = 0; k < s.slots.size(); ++k) {
    cum += s.slots[k].fraction;
    l.slot_end.push_back(k + 1 == s.slots.size()
                             ? n
                             : static_cast<std::size_t>(std::llround(cum * static_cast<double>(n))));
  }
  return l;
}

// Gram matrices of the base vector: grams[batch * slots + slot].
inline std::vector<Eigen::MatrixXd> accumulate(const Layout& l, std::size_t n, std::uint64_t seed,
                                               std::uint32_t cell, std::size_t threads) {
  const std::size_t slots = l.slot_end.size();
  std::vector<Eigen::MatrixXd> grams(kBatches * slots, Eigen::MatrixXd::Zero(l.dim, l.dim));
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const std::size_t pairs = (l.dim + 1) / 2;
  auto work = [&](std::size_t first_batch, std::size_t stride) {
    Eigen::VectorXd v(2 * pairs);
    for (std::size_t b = first_batch; b < kBatches; b += stride) {
      std::size_t slot = 0;
      for (std::size_t i = b; i < n; i += kBatches) {
        while (i >= l.slot_end[slot]) ++slot;
        for (std::size_t p = 0; p < pairs; ++p) {
          const auto [z0, z1] = normal_pair(
              {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(std::uint64_t(i) >> 32),
               static_cast<std::uint32_t>(p), cell},
              key);
          v[2 * p] = z0;
          v[2 * p + 1] = z1;
        }
        const auto x = v.head(l.dim);
        grams[b * slots + slot].selfadjointView<Eigen::Lower>().rankUpdate(x);
      }
      for (std::size_t k = 0; k < slots; ++k) {
        Eigen::MatrixXd full = grams[b * slots + k].selfadjointView<Eigen::Lower>();
        grams[b * slots + k] = std::move(full);
      }
    }
  };
  threads = std::clamp<std::size_t>(threads, 1, kBatches);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  return grams;
}

struct Moments {
  Eigen::MatrixXd gram;
  double count;
};

// Plug-in I(A;B) for scalar linear functionals of the base vector.
inline double plugin_mi(const Eigen::MatrixXd& g, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double aa = a.dot(g * a);
  const double bb = b.dot(g * b);
  const double ab = a.dot(g * b);
  const double r2 = std::min(ab * ab / (aa * bb), 1.0 - 1e-16);
  return -0.5 * std::log2(1.0 - r2);
}

// Rates per receiver from per-slot Gram matrices; fraction of slot k = count_k / n.
inline std::vector<double> rates_from(const ChannelParams& c, const ResolvedScheme& s,
                                      const std::vector<Moments>& slots) {
  const std::size_t m = c.receivers();
  const std::size_t dim = kNoiseIdx + m;
  const double p = c.power();
  const double sn = std::sqrt(c.noise_power());
  const double ss = std::sqrt(c.state_power());
  const double tin_amp = std::sqrt(s.beta * p);
  const double pre_power = (1.0 - s.beta) * p;
  const double pre_amp = std::sqrt(pre_power);
  double total = 0.0;
  Eigen::MatrixXd all = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& sl : slots) {
    total += sl.count;
    all += sl.gram;
  }
  std::vector<double> rates(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double a = c.fading()[j];
    Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
    y[kTinIdx] = tin_amp;
    y[kPreIdx] = pre_amp;
    y[kStateIdx] = a * ss;
    y[kNoiseIdx + j] = sn;
    if (s.beta > 0.0) {
      Eigen::VectorXd xn = Eigen::VectorXd::Zero(dim);
      xn[kTinIdx] = 1.0;
      rates[j] += plugin_mi(all, xn, y);
    }
    if (s.beta < 1.0) {
      Eigen::VectorXd y_clean = y;  // the TIN codeword is decoded and removed first
      y_clean[kTinIdx] = 0.0;
      Eigen::VectorXd st = Eigen::VectorXd::Zero(dim);
      st[kStateIdx] = 1.0;
      for (std::size_t k = 0; k < s.slots.size(); ++k) {
        if (!s.decodes(k, a) || slots[k].count == 0.0) continue;
        const double lambda = pre_power / (pre_power + c.noise_power()) * *s.slots[k].target;
        Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
        u[kPreIdx] = pre_amp;
        u[kStateIdx] = lambda * ss;
        const double r = plugin_mi(slots[k].gram, u, y_clean) - plugin_mi(slots[k].gram, u, st);
        rates[j] += slots[k].count / total * r;
      }
    }
  }
  return rates;
}

inline SimEstimate simulate_cell(const ChannelParams& c, const SchemeConfig& cfg, std::size_t n,
                                 std::uint64_t seed, std::uint32_t cell, std::size_t threads) {
  if (n < kMinSamples) throw InvalidParameter("sample count must be at least 10000");
  const auto s = resolve(c, cfg);
  const auto l = layout(s, c.receivers(), n);
  const auto grams = accumulate(l, n, seed, cell, threads == 0 ? default_threads() : threads);
  const std::size_t slots = s.slots.size();
  const std::size_t m = c.receivers();

  std::vector<std::size_t> slot_begin(slots, 0);
  for (std::size_t k = 1; k < slots; ++k) slot_begin[k] = l.slot_end[k - 1];
  auto batch_count = [&](std::size_t b, std::size_t k) {
    // Samples i = b (mod kBatches) inside [slot_begin, slot_end).
    auto upto = [&](std::size_t e) { return e > b ? (e - b + kBatches - 1) / kBatches : 0; };
    return static_cast<double>(upto(l.slot_end[k]) - upto(slot_begin[k]));
  };

  std::vector<Moments> total(slots, {Eigen::MatrixXd::Zero(l.dim, l.dim), 0.0});
  std::vector<std::vector<double>> batch_rates;
  std::vector<double> batch_compound;
  for (std::size_t b = 0; b < kBatches; ++b) {
    std::vector<Moments> mb;
    for (std::size_t k = 0; k < slots; ++k) {
      mb.push_back({grams[b * slots + k], batch_count(b, k)});
      total[k].gram += grams[b * slots + k];
      total[k].count += mb.back().count;
    }
    batch_rates.push_back(rates_from(c, s, mb));
    batch_compound.push_back(*std::min_element(batch_rates.back().begin(), batch_rates.back().end()));
  }
  auto stderr_of = [](const std::vector<double>& x) {
    const double nb = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / nb;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (nb - 1.0) / nb);
  };

  SimEstimate e;
  e.scheme = to_string(cfg.kind);
  e.rates = rates_from(c, s, total);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> col;
    for (const auto& r : batch_rates) col.push_back(r[j]);
    e.stderrs.push_back(stderr_of(col));
  }
  const auto it = std::min_element(e.rates.begin(), e.rates.end());
  e.compound = *it;
  e.compound_stderr = stderr_of(batch_compound);
  e.samples = n;
  e.seed = seed;
  return e;
}

}  // namespace detail

/// Per-receiver rates of a scheme, N >= 1e4 samples. threads = 0 uses default_threads().
inline SimEstimate simulate(const ChannelParams& c, const SchemeConfig& cfg, std::size_t samples,
                            std::uint64_t seed, std::size_t threads = 0) {
  return detail::simulate_cell(c, cfg, samples, seed, 0, threads);
}

/// One estimate per channel; cell k draws from stream k, so cell 0 equals simulate().
/// Cells run in parallel; each cell is single-threaded and results keep grid order.
inline std::vector<SimEstimate> sweep_simulate(const std::vector<ChannelParams>& grid,
                                               const SchemeConfig& cfg, std::size_t samples,
                                               std::uint64_t seed, std::size_t threads = 0) {
  if (grid.empty()) throw InvalidParameter("sweep grid is empty");
  std::vector<std::optional<SimEstimate>> out(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  const std::size_t workers =
      std::clamp<std::size_t>(threads == 0 ? default_threads() : threads, 1, grid.size());
  auto work = [&](std::size_t first) {
    for (std::size_t k = first; k < grid.size(); k += workers) {
      try {
        out[k] = detail::simulate_cell(grid[k], cfg, samples, seed, static_cast<std::uint32_t>(k), 1);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();
  std::vector<SimEstimate> result;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (errors[k]) std::rethrow_exception(errors[k]);
    result.push_back(std::move(*out[k]));
  }
  return result;
}

/// Exact per-receiver rates of a scheme from the Gaussian oracle, nominal slot fractions.
inline std::vector<double> exact_scheme_rates(const ChannelParams& c, const SchemeConfig& cfg) {
  const auto s = resolve(c, cfg);
  const double p = c.power();
  const double tin_power = s.beta * p;
  const double pre_power = (1.0 - s.beta) * p;
  std::vector<double> rates;
  for (double a : c.fading()) {
    double r = 0.0;
    if (tin_power > 0.0) {
      LinearGaussianModel model;
      model.source("XN", tin_power).source("S", c.state_power()).source("Z", c.noise_power());
      if (pre_power > 0.0) model.source("XP", pre_power);
      std::vector<std::pair<std::string, double>> y{{"XN", 1.0}, {"S", a}, {"Z", 1.0}};
      if (pre_power > 0.0) y.emplace_back("XP", 1.0);
      model.combine("Y", y);
      r += mutual_information(model.build(), {"XN"}, {"Y"});
    }
    if (pre_power > 0.0) {
      for (std::size_t k = 0; k < s.slots.size(); ++k) {
        if (!s.decodes(k, a)) continue;
        r += s.slots[k].fraction * costa_mismatched_rate(pre_power, c.state_power(),
                                                         *s.slots[k].target, a, c.noise_power());
      }
    }
    rates.push_back(r);
  }
  return rates;
}

}  // namespace dpc
