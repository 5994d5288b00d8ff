#pragma once

// Invariant suites over the bound modules. Each check records the worst slack
// (bound minus value, or minus error for equalities) over its cases and passes when the
// worst slack is at least -tol.

#include <dpc/bounds_m.hpp>
#include <dpc/bounds_two.hpp>
#include <dpc/channel.hpp>
#include <dpc/gaussian.hpp>
#include <dpc/sim.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace dpc {

struct CheckResult {
  std::string name;
  double tol = 1e-9;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::size_t cases = 0;
  std::string worst_case;

  CheckResult(std::string check_name, double tolerance) : name(std::move(check_name)), tol(tolerance) {}

  bool passed() const { return cases > 0 && worst_slack >= -tol; }

  void record(double slack, const std::function<std::string()>& label) {
    ++cases;
    if (std::isnan(slack)) slack = -std::numeric_limits<double>::infinity();
    if (slack < worst_slack) {
      worst_slack = slack;
      worst_case = label();
    }
  }
};

struct VerifyReport {
  std::string suite;
  std::vector<CheckResult> checks;
  std::vector<std::string> table;  // optional free-form detail lines

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
  }
};

struct VerifyOptions {
  std::size_t grid = 20;
  double tol = 1e-9;
  std::size_t max_m = 5;
  std::uint64_t seed = 1;
};

inline std::vector<double> log_space(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return v;
}

inline std::string fmt_num(double v) {
  char buf[32];
  if (v == 0.0) v = 0.0;  // no "-0" in output
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string fmt_instance(double p, double a1, double a2) {
  return "P=" + fmt_num(p) + " a1=" + fmt_num(a1) + " a2=" + fmt_num(a2);
}

inline std::string fmt_chain(double p, const FadingSet& f) {
  std::string s = "P=" + fmt_num(p) + " A=[";
  for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + fmt_num(f[i]);
  return s + "]";
}

/// Two-codeword rate assembled from the Gaussian oracle: TIN layer I(X_N; Y_j) from the
/// joint covariance, plus half of the matched Costa rate at power (1-beta)P, minimum over j.
inline double inner2_rate_oracle(const TwoFadingInstance& inst, double beta) {
  const auto n = inst.normalized();
  const double tin = beta * n.power;
  const double pre = (1.0 - beta) * n.power;
  double best = std::numeric_limits<double>::infinity();
  for (double a : {n.a1, n.a2}) {
    double r = 0.0;
    if (tin > 0.0) {
      LinearGaussianModel m;
      m.source("XN", tin).source("S", 1.0).source("Z", 1.0);
      std::vector<std::pair<std::string, double>> y{{"XN", 1.0}, {"S", a}, {"Z", 1.0}};
      if (pre > 0.0) {
        m.source("XP", pre);
        y.emplace_back("XP", 1.0);
      }
      r += mutual_information(m.combine("Y", y).build(), {"XN"}, {"Y"});
    }
    if (pre > 0.0) r += 0.5 * costa_mismatched_rate(pre, 1.0, a, a);
    best = std::min(best, r);
  }
  return best;
}

// ---------------------------------------------------------------------------------------

inline VerifyReport verify_gap2(const VerifyOptions& o) {
  VerifyReport rep{"gap2", {}, {}};
  CheckResult region{"region_gap_bound", o.tol};
  CheckResult theorem{"theorem_gap_bound", o.tol};
  CheckResult ordering{"inner_le_outer_numeric", o.tol};
  CheckResult carbon{"carbon_inner_le_outer", o.tol};
  const std::vector<double> ratios{0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999};
  std::size_t per_region[4] = {0, 0, 0, 0};
  for (double p : log_space(0.1, 1000.0, o.grid)) {
    for (double a2 : log_space(0.05, 100.0, o.grid)) {
      for (double r : ratios) {
        const TwoFadingInstance inst{p, r * a2, a2};
        const auto g = gap2(inst);
        auto label = [&] { return fmt_instance(p, r * a2, a2) + " region " + to_string(g.region); };
        ++per_region[static_cast<int>(g.region)];
        const double measured = g.region == GapRegion::SmallA2
                                    ? std::min(g.outer_closed, g.trivial_outer) - g.inner_closed
                                    : g.realized;
        region.record(g.region_bound - measured, label);
        if (p >= 1.0 && a2 * a2 >= 1.0 && a2 - r * a2 >= 4.0) {
          theorem.record(g.theorem_bound - g.realized_numeric, label);
        }
        ordering.record(g.outer_numeric - g.inner_closed, label);
        carbon.record(carbon_outer(p, a2).value - carbon_inner(p, a2).value, label);
      }
    }
  }
  rep.checks = {region, theorem, ordering, carbon};
  rep.table.push_back("cells per region: small-a2=" + std::to_string(per_region[0]) +
                      " I=" + std::to_string(per_region[1]) + " II=" +
                      std::to_string(per_region[2]) + " III=" + std::to_string(per_region[3]));
  return rep;
}

inline VerifyReport verify_strongfading(const VerifyOptions& o) {
  VerifyReport rep{"strongfading", {}, {}};
  CheckResult identity{"gap_identity", std::max(o.tol, 1e-12)};
  CheckResult ordering{"inner_le_outer", o.tol};
  CheckResult geometric{"geometric_chain_is_strong", 0.0};
  CheckResult subset{"subset_bound_equals_inner", std::max(o.tol, 1e-12)};
  for (double p : {1.0, 15.0, 255.0}) {
    for (std::size_t m = 2; m <= 6; ++m) {
      const auto geo = geometric_strong_chain(p, m);
      for (auto v : {StrongFadingVariant::AmplitudeSum, StrongFadingVariant::PowerSum}) {
        geometric.record(is_strong_fading(p, geo.values(), v) ? 0.0 : -1.0,
                         [&] { return fmt_chain(p, geo) + " " + to_string(v); });
      }
      for (const auto& chain : {geo, minimal_power_chain(p, m)}) {
        const MFadingInstance inst{p, chain, StrongFadingVariant::PowerSum};
        auto label = [&] { return fmt_chain(p, chain); };
        const auto g = strong_fading_gap(inst);
        identity.record(-std::abs(g.realized - g.bound), label);
        ordering.record(g.outer - g.inner, label);
        subset.record(-std::abs(subset_outer(inst).bound.value - g.inner), label);
      }
    }
  }
  rep.checks = {identity, ordering, geometric, subset};
  return rep;
}

inline VerifyReport verify_proofterms(const VerifyOptions& o) {
  VerifyReport rep{"proofterms", {}, {}};
  CheckResult mrc{"mrc_entropy_bound", o.tol};
  CheckResult diff{"difference_le_2", o.tol};
  CheckResult fin{"final_term_bound", o.tol};
  CheckResult suff{"mrc_sufficiency", std::max(o.tol, 1e-9)};
  const auto rhos = rho_grid(201);
  for (double p : {1.0, 3.0, 15.0, 255.0}) {
    for (std::size_t m = 2; m <= std::max<std::size_t>(o.max_m, 2); ++m) {
      for (const auto& chain : {geometric_strong_chain(p, m), minimal_power_chain(p, m)}) {
        const MFadingInstance inst{p, chain, StrongFadingVariant::PowerSum};
        const auto r = check_proof_terms(inst, rhos);
        auto label = [&] { return fmt_chain(p, chain); };
        mrc.record(r.worst_mrc_slack, label);
        diff.record(r.worst_difference_slack, label);
        fin.record(r.worst_final_slack, label);
        suff.record(-r.worst_sufficiency_error, label);
        for (std::size_t j = 2; j <= m; ++j) {
          double ms = std::numeric_limits<double>::infinity(), ds = ms;
          for (const auto& row : r.rows) {
            if (row.j != j) continue;
            ms = std::min(ms, row.mrc_slack);
            ds = std::min(ds, row.difference_slack);
          }
          rep.table.push_back(fmt_chain(p, chain) + " j=" + std::to_string(j) +
                              " mrc_slack=" + fmt_num(ms) + " diff_slack=" + fmt_num(ds));
        }
      }
    }
  }
  rep.checks = {mrc, diff, fin, suff};
  return rep;
}

namespace detail {

inline GaussianVector random_gaussian(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(dim, dim);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = nd(rng);
  Eigen::MatrixXd cov = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(dim, dim);
  cov = 0.5 * (cov + cov.transpose());
  Labels names;
  for (std::size_t i = 0; i < dim; ++i) names.push_back("v" + std::to_string(i));
  return GaussianVector(names, cov);
}

}  // namespace detail

inline VerifyReport verify_oracle(const VerifyOptions& o) {
  VerifyReport rep{"oracle", {}, {}};
  CheckResult chain{"chain_rule", std::max(o.tol, 1e-12)};
  CheckResult cond{"conditioning_reduces_entropy", std::max(o.tol, 1e-12)};
  CheckResult sym{"mi_symmetry", std::max(o.tol, 1e-12)};
  CheckResult nonneg{"mi_nonnegative", std::max(o.tol, 1e-9)};
  CheckResult mrc{"mrc_sufficiency", std::max(o.tol, 1e-10)};
  CheckResult costa{"costa_matched_capacity", std::max(o.tol, 1e-10)};
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<std::size_t> dim_dist(2, 8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t trials = std::max<std::size_t>(o.grid, 1) * 10;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t dim = dim_dist(rng);
    const auto g = detail::random_gaussian(rng, dim);
    const std::size_t split = 1 + rng() % (dim - 1);
    Labels a(g.names().begin(), g.names().begin() + static_cast<long>(split));
    Labels b(g.names().begin() + static_cast<long>(split), g.names().end());
    auto label = [&] { return "trial " + std::to_string(t) + " dim " + std::to_string(dim); };
    const double joint = entropy(g, g.names()).value;
    chain.record(-std::abs(joint - entropy(g, a).value - conditional_entropy(g, b, a).value), label);
    cond.record(entropy(g, b).value - conditional_entropy(g, b, a).value, label);
    const double iab = mutual_information(g, a, b);
    sym.record(-std::abs(iab - mutual_information(g, b, a)), label);
    nonneg.record(iab, label);
  }
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t k = 1 + rng() % 5;
    std::vector<double> amps(k);
    for (auto& v : amps) v = 0.1 + 5.0 * unit(rng);
    const double x = 4.0 * unit(rng) - 2.0;
    const double energy = 1.0 / mrc_combine(amps);
    LinearGaussianModel m;
    m.source("S", 1.0).source("W", 1.0);
    for (std::size_t q = 0; q < k; ++q) m.source("Z" + std::to_string(q), 1.0);
    m.combine("T", {{"S", x}, {"W", 1.0}});
    Labels obs;
    std::vector<std::pair<std::string, double>> combined{{"S", 1.0}};
    for (std::size_t q = 0; q < k; ++q) {
      const auto z = "Z" + std::to_string(q);
      m.combine("O" + std::to_string(q), {{"S", amps[q]}, {z, 1.0}});
      obs.push_back("O" + std::to_string(q));
      combined.emplace_back(z, amps[q] / energy);
    }
    m.combine("C", combined);
    const auto g = m.build();
    mrc.record(-std::abs(conditional_entropy(g, {"T"}, obs).value -
                         conditional_entropy(g, {"T"}, {"C"}).value),
               [&] { return "mrc trial " + std::to_string(t); });
    const double p = 0.01 + 100.0 * unit(rng);
    const double q = 0.01 + 10.0 * unit(rng);
    const double a = 10.0 * unit(rng);
    costa.record(-std::abs(costa_mismatched_rate(p, q, a, a) - 0.5 * std::log2(1.0 + p)),
                 [&] { return "P=" + fmt_num(p) + " Q=" + fmt_num(q) + " a=" + fmt_num(a); });
  }
  rep.checks = {chain, cond, sym, nonneg, mrc, costa};
  return rep;
}

inline VerifyReport verify_continuity(const VerifyOptions& o) {
  VerifyReport rep{"continuity", {}, {}};
  CheckResult at_one{"inner2_continuous_at_a2sq_1", o.tol};
  CheckResult at_p1{"inner2_continuous_at_a2sq_P+1", o.tol};
  CheckResult oracle{"inner2_rate_matches_oracle", o.tol};
  CheckResult alpha{"inner2_closed_is_max_over_split", std::max(o.tol, 1e-6)};
  CheckResult gamma{"outer2_numeric_is_min_over_gamma", std::max(o.tol, 1e-6)};
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double kStep = 1e-12;
  for (double p : log_space(0.1, 1000.0, o.grid)) {
    auto label = [&] { return "P=" + fmt_num(p); };
    auto inner = [&](double s) { return inner2_closed({p, 0.0, std::sqrt(s)}).value; };
    at_one.record(-std::abs(inner(1.0 - kStep) - inner(1.0 + kStep)), label);
    at_p1.record(-std::abs(inner((p + 1.0) * (1.0 - kStep)) - inner((p + 1.0) * (1.0 + kStep))),
                 label);
  }
  const std::size_t trials = std::max<std::size_t>(o.grid, 1) * 5;
  for (std::size_t t = 0; t < trials; ++t) {
    const double p = std::pow(10.0, -1.0 + 4.0 * unit(rng));
    const double a2 = std::pow(10.0, -1.0 + 2.5 * unit(rng));
    const double a1 = a2 * unit(rng);
    const double beta = unit(rng);
    const TwoFadingInstance inst{p, a1, a2};
    auto label = [&] { return fmt_instance(p, a1, a2) + " beta=" + fmt_num(beta); };
    oracle.record(-std::abs(inner2_rate(inst, beta) - inner2_rate_oracle(inst, beta)), label);
  }
  const std::size_t split_points = 10000;
  const std::size_t gamma_points = std::max<std::size_t>(o.grid, 1) * 5000;
  for (std::size_t t = 0; t < std::max<std::size_t>(o.grid / 2, 4); ++t) {
    const double p = std::pow(10.0, -1.0 + 3.0 * unit(rng));
    const double a2 = std::pow(10.0, -1.0 + 2.0 * unit(rng));
    const double a1 = a2 * 0.95 * unit(rng);
    const TwoFadingInstance inst{p, a1, a2};
    auto label = [&] { return fmt_instance(p, a1, a2); };
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= split_points; ++i) {
      best = std::max(best, inner2_rate(inst, static_cast<double>(i) / split_points));
    }
    alpha.record(-std::abs(best - inner2_closed(inst).value), label);
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= gamma_points; ++i) {
      lowest = std::min(lowest, outer2_objective(inst, static_cast<double>(i) / gamma_points));
    }
    // The grid minimum can only sit above the true minimum.
    gamma.record(-std::abs(lowest - outer2_numeric(inst).value), label);
  }
  rep.checks = {at_one, at_p1, oracle, alpha, gamma};
  return rep;
}

inline VerifyReport verify_normalization(const VerifyOptions& o) {
  VerifyReport rep{"normalization", {}, {}};
  CheckResult idem{"normalize_idempotent", std::max(o.tol, 1e-12)};
  CheckResult scale{"bounds_scale_invariant", std::max(o.tol, 1e-12)};
  CheckResult direct{"oracle_rates_match_normalized", std::max(o.tol, 1e-12)};
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto rel = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); };
  const std::size_t trials = std::max<std::size_t>(o.grid, 1) * 10;
  for (std::size_t t = 0; t < trials; ++t) {
    GeneralizedParams g{std::pow(10.0, -1.0 + 3.0 * unit(rng)), std::pow(10.0, -1.0 + 2.0 * unit(rng)),
                        std::pow(10.0, -1.0 + 2.0 * unit(rng)), {}};
    double a = unit(rng) < 0.3 ? 0.0 : 0.1 * unit(rng);
    for (std::size_t k = 0; k < 2 + rng() % 3; ++k) {
      g.fading.push_back(a);
      a += 0.05 + 3.0 * unit(rng);
    }
    const double c = std::pow(10.0, -2.0 + 4.0 * unit(rng));
    GeneralizedParams scaled{c * g.power, c * g.state_power, c * g.noise_power, g.fading};
    auto label = [&] { return "trial " + std::to_string(t); };
    const auto n = normalize(g);
    const auto n2 = normalize(n);
    double worst = 0.0;
    worst = std::max(worst, rel(n2.power(), n.power()));
    for (std::size_t k = 0; k < n.receivers(); ++k) worst = std::max(worst, rel(n2.fading()[k], n.fading()[k]));
    idem.record(-worst, label);

    const auto ns = normalize(scaled);
    const auto& f = n.fading();
    const auto& fs = ns.fading();
    const TwoFadingInstance two{n.power(), f[0], f[1]};
    const TwoFadingInstance two_s{ns.power(), fs[0], fs[1]};
    // Same instance through the state-power field instead of rescaled amplitudes.
    const TwoFadingInstance two_q{g.power / g.noise_power, g.fading[0], g.fading[1],
                                  g.state_power / g.noise_power};
    const MFadingInstance mi{n.power(), f, StrongFadingVariant::AmplitudeSum};
    const MFadingInstance mis{ns.power(), fs, StrongFadingVariant::AmplitudeSum};
    double d = 0.0;
    for (const auto* other : {&two_s, &two_q}) {
      d = std::max(d, rel(outer2_closed(*other).value, outer2_closed(two).value));
      d = std::max(d, rel(outer2_numeric(*other).value, outer2_numeric(two).value));
      d = std::max(d, rel(inner2_closed(*other).value, inner2_closed(two).value));
      d = std::max(d, rel(inner2_rate(*other, 0.5), inner2_rate(two, 0.5)));
    }
    d = std::max(d, rel(carbon_outer(ns.power(), fs[1]).value, carbon_outer(n.power(), f[1]).value));
    d = std::max(d, rel(carbon_inner(ns.power(), fs[1]).value, carbon_inner(n.power(), f[1]).value));
    d = std::max(d, rel(time_sharing_inner(mis).value, time_sharing_inner(mi).value));
    d = std::max(d, rel(costa_small_spread_gap(ns.power(), fs).inner,
                        costa_small_spread_gap(n.power(), f).inner));
    if (f[0] == 0.0) {
      d = std::max(d, rel(subset_outer(mis).bound.value, subset_outer(mi).bound.value));
    }
    scale.record(-d, label);

    // Exact scheme rates straight on (P', Q', N') against the normalized channel.
    const ChannelParams raw(g.power, FadingSet(g.fading), g.state_power, g.noise_power);
    double e = 0.0;
    for (const auto& cfg : {SchemeConfig::tin(), SchemeConfig::costa_average(),
                            SchemeConfig::costa_timeshare()}) {
      const auto r0 = exact_scheme_rates(raw, cfg);
      const auto r1 = exact_scheme_rates(n, cfg);
      for (std::size_t k = 0; k < r0.size(); ++k) e = std::max(e, rel(r0[k], r1[k]));
    }
    e = std::max(e, rel(costa_mismatched_rate(g.power, g.state_power, g.fading[1], g.fading[0], g.noise_power),
                        costa_mismatched_rate(n.power(), 1.0, f[1], f[0])));
    direct.record(-e, label);
  }
  rep.checks = {idem, scale, direct};
  return rep;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"gap2",   "strongfading", "proofterms",
                                              "oracle", "continuity",   "normalization"};
  return names;
}

inline VerifyReport run_suite(const std::string& name, const VerifyOptions& o = {}) {
  if (name == "gap2") return verify_gap2(o);
  if (name == "strongfading") return verify_strongfading(o);
  if (name == "proofterms") return verify_proofterms(o);
  if (name == "oracle") return verify_oracle(o);
  if (name == "continuity") return verify_continuity(o);
  if (name == "normalization") return verify_normalization(o);
  throw InvalidParameter("unknown suite '" + name + "'");
}

}  // namespace dpc
