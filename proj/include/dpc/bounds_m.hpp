#pragma once

// Bounds for M fading values: the strong-fading outer bound, the time-sharing inner
// bound, their gap, the subset outer bound, and a numerical check of the entropy chain
// behind the strong-fading outer bound.

#include <dpc/channel.hpp>
#include <dpc/errors.hpp>
#include <dpc/gaussian.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace dpc {

struct MFadingInstance {
  double power;
  FadingSet fading;
  StrongFadingVariant variant = StrongFadingVariant::AmplitudeSum;

  std::size_t size() const { return fading.size(); }
  ChannelParams channel() const { return ChannelParams(power, fading); }
};

/// 1/(2M) log(1+P) + 3 + log(M)/M; requires the strong fading regime.
inline RateBound strong_fading_outer(const MFadingInstance& inst) {
  const auto c = inst.channel();
  if (!is_strong_fading(c, inst.variant)) {
    throw RegimeViolation(std::string("fading set is not in the strong fading regime (") +
                          to_string(inst.variant) + ")");
  }
  const double m = static_cast<double>(inst.size());
  const double value = std::log2(1.0 + inst.power) / (2.0 * m) + 3.0 + std::log2(m) / m;
  return {"strong_fading_outer", value, c, std::nullopt,
          inst.size() == 1 ? "degenerate (M=1)" : to_string(inst.variant)};
}

/// Precode against a_j S for a fraction 1/M of the block: 1/(2M) log(1+P). Any fading set.
inline RateBound time_sharing_inner(const MFadingInstance& inst) {
  const auto c = inst.channel();
  const double m = static_cast<double>(inst.size());
  return {"time_sharing_inner", std::log2(1.0 + inst.power) / (2.0 * m), c, std::nullopt, ""};
}

struct StrongGapReport {
  double outer;
  double inner;
  double realized;
  double bound;  // 3 + log(M)/M
  bool attains_bound;
};

inline StrongGapReport strong_fading_gap(const MFadingInstance& inst) {
  StrongGapReport r{};
  r.outer = strong_fading_outer(inst).value;
  r.inner = time_sharing_inner(inst).value;
  r.realized = r.outer - r.inner;
  const double m = static_cast<double>(inst.size());
  r.bound = 3.0 + std::log2(m) / m;
  r.attains_bound = std::abs(r.realized - r.bound) <= 1e-12;
  return r;
}

struct SubsetBound {
  RateBound bound;
  StrongFadingSubset subset;
};

/// 1/(2K) log(1+P) with K the size of the largest strong-fading subset; needs a_1 = 0.
inline SubsetBound subset_outer(const MFadingInstance& inst) {
  const auto c = inst.channel();
  auto sub = largest_strong_fading_subset(c, inst.variant);
  const double value = std::log2(1.0 + inst.power) / (2.0 * static_cast<double>(sub.count));
  return {{"subset_outer", value, c, std::nullopt, "K=" + std::to_string(sub.count)},
          std::move(sub)};
}

/// Chain 0, (P+1)^2, ..., (P+1)^M: strong fading in both variants for P >= 1.
inline FadingSet geometric_strong_chain(double power, std::size_t m) {
  std::vector<double> a{0.0};
  for (std::size_t j = 2; j <= m; ++j) a.push_back(std::pow(power + 1.0, static_cast<double>(j)));
  return FadingSet(std::move(a));
}

/// Smallest power-sum chain with a_2^2 = P+1: a_j^2 = (P+1) sum_{q<j} a_q^2 (times 1 + 1e-12).
inline FadingSet minimal_power_chain(double power, std::size_t m) {
  std::vector<double> a{0.0};
  double energy = 0.0;
  for (std::size_t j = 2; j <= m; ++j) {
    const double a2 = j == 2 ? power + 1.0 : (power + 1.0) * energy;
    a.push_back(std::sqrt(a2 * (1.0 + 1e-12)));
    energy += a.back() * a.back();
  }
  return FadingSet(std::move(a));
}

// ---------------------------------------------------------------------------------------
// Entropy-chain check. X = rho sqrt(P) S + sqrt(1 - rho^2) sqrt(P) W is jointly Gaussian
// with the state; Y_j = X + a_j S + Z_j and O_j = a_j S + Z_j. For j >= 2 the output term
// conditions on O_2..O_{j-1}; the final term uses V_M = {a_k S + Z_k - Z_1 : 2 <= k <= M}.

inline constexpr double kProofSlackFloor = 1e-9;

struct ProofTermRow {
  std::size_t j;
  double rho;
  double output_entropy;      // H(Y_j | O_2..O_{j-1})
  double side_entropy;        // H(O_j | O_2..O_{j-1})
  double difference;          // output - side
  double mrc_bound;           // 1/2 log 2 pi e (P + 1 + a_j^2 / sum_{q<j} a_q^2); j = 2: (sqrt P + a_2)^2 + 1
  double mrc_slack;
  double difference_slack;    // 2 - difference
  double intermediate_bound;  // 1/2 log(1 + 3 a_j^2 / (sum_{q<=j} a_q^2 + 1))
  double intermediate_slack;
  double mrc_sufficiency_error;  // |H(Y_j | O..) - H(Y_j | S + Z~)|, j >= 3
};

struct FinalTermRow {
  double rho;
  double value;  // I(Y_1; V_M)
  double bound;  // 1/2 log(1+P) + log M
  double slack;
};

struct ProofTermReport {
  std::vector<ProofTermRow> rows;
  std::vector<FinalTermRow> final_terms;
  double worst_mrc_slack = std::numeric_limits<double>::infinity();
  double worst_difference_slack = std::numeric_limits<double>::infinity();
  double worst_intermediate_slack = std::numeric_limits<double>::infinity();
  double worst_final_slack = std::numeric_limits<double>::infinity();
  double worst_sufficiency_error = 0.0;

  /// MRC bound, difference <= 2 and final-term bound all hold up to the slack floor.
  bool holds(double floor = kProofSlackFloor) const {
    return worst_mrc_slack >= -floor && worst_difference_slack >= -floor &&
           worst_final_slack >= -floor;
  }
};

inline std::vector<double> rho_grid(std::size_t points = 201) {
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = points == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

namespace detail {

inline GaussianVector proof_model(double power, std::span<const double> a, double rho) {
  const std::size_t m = a.size();
  LinearGaussianModel model;
  model.source("W", 1.0).source("S", 1.0);
  for (std::size_t k = 1; k <= m; ++k) model.source("Z" + std::to_string(k), 1.0);
  const double sp = std::sqrt(power);
  model.combine("X", {{"S", rho * sp}, {"W", std::sqrt(std::max(0.0, 1.0 - rho * rho)) * sp}});
  for (std::size_t k = 1; k <= m; ++k) {
    const auto z = "Z" + std::to_string(k);
    model.combine("Y" + std::to_string(k), {{"X", 1.0}, {"S", a[k - 1]}, {z, 1.0}});
    model.combine("O" + std::to_string(k), {{"S", a[k - 1]}, {z, 1.0}});
    if (k >= 2) model.combine("V" + std::to_string(k), {{"S", a[k - 1]}, {z, 1.0}, {"Z1", -1.0}});
  }
  // MRC statistics T_j = S + sum_{q<j} a_q Z_q / sum_{q<j} a_q^2 for j >= 3.
  double energy = 0.0;
  for (std::size_t j = 2; j <= m; ++j) {
    energy += a[j - 2] * a[j - 2];
    if (j < 3 || energy <= 0.0) continue;
    std::vector<std::pair<std::string, double>> terms{{"S", 1.0}};
    for (std::size_t q = 1; q < j; ++q) terms.emplace_back("Z" + std::to_string(q), a[q - 1] / energy);
    model.combine("T" + std::to_string(j), terms);
  }
  return model.build();
}

}  // namespace detail

inline ProofTermReport check_proof_terms(const MFadingInstance& inst,
                                         const std::vector<double>& rhos = rho_grid()) {
  const auto c = inst.channel();
  if (!is_strong_fading(c, StrongFadingVariant::PowerSum)) {
    throw RegimeViolation("proof-term check requires the power-sum strong fading regime");
  }
  const auto a = inst.fading.values();
  const std::size_t m = a.size();
  const double p = inst.power;
  const double log2_2pie = std::log2(2.0 * M_PI * M_E);
  ProofTermReport report;
  for (double rho : rhos) {
    if (!(rho >= -1.0 && rho <= 1.0)) throw InvalidParameter("rho must lie in [-1, 1]");
    const auto g = detail::proof_model(p, a, rho);
    double energy_before = 0.0;  // sum_{q<j} a_q^2
    for (std::size_t j = 2; j <= m; ++j) {
      energy_before += a[j - 2] * a[j - 2];
      const auto js = std::to_string(j);
      Labels given;
      for (std::size_t q = 2; q < j; ++q) given.push_back("O" + std::to_string(q));
      ProofTermRow row{};
      row.j = j;
      row.rho = rho;
      row.output_entropy = conditional_entropy(g, {"Y" + js}, given).value;
      row.side_entropy = conditional_entropy(g, {"O" + js}, given).value;
      row.difference = row.output_entropy - row.side_entropy;
      const double aj = a[j - 1];
      const double var_bound = j == 2 ? (std::sqrt(p) + aj) * (std::sqrt(p) + aj) + 1.0
                                      : p + 1.0 + aj * aj / energy_before;
      row.mrc_bound = 0.5 * (log2_2pie + std::log2(var_bound));
      row.mrc_slack = row.mrc_bound - row.output_entropy;
      row.difference_slack = 2.0 - row.difference;
      row.intermediate_bound =
          0.5 * std::log2(1.0 + 3.0 * aj * aj / (energy_before + aj * aj + 1.0));
      row.intermediate_slack = row.intermediate_bound - row.difference;
      if (j >= 3 && energy_before > 0.0) {
        const double via_mrc = conditional_entropy(g, {"Y" + js}, {"T" + js}).value;
        row.mrc_sufficiency_error = std::abs(via_mrc - row.output_entropy);
      }
      report.worst_mrc_slack = std::min(report.worst_mrc_slack, row.mrc_slack);
      report.worst_difference_slack = std::min(report.worst_difference_slack, row.difference_slack);
      report.worst_intermediate_slack =
          std::min(report.worst_intermediate_slack, row.intermediate_slack);
      report.worst_sufficiency_error =
          std::max(report.worst_sufficiency_error, row.mrc_sufficiency_error);
      report.rows.push_back(row);
    }
    FinalTermRow fin{};
    fin.rho = rho;
    Labels side;
    for (std::size_t k = 2; k <= m; ++k) side.push_back("V" + std::to_string(k));
    fin.value = side.empty() ? 0.0 : mutual_information(g, {"Y1"}, side);
    fin.bound = 0.5 * std::log2(1.0 + p) + std::log2(static_cast<double>(m));
    fin.slack = fin.bound - fin.value;
    report.worst_final_slack = std::min(report.worst_final_slack, fin.slack);
    report.final_terms.push_back(fin);
  }
  return report;
}

}  // namespace dpc
