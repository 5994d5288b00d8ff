#pragma once

// Exact entropy algebra for zero-mean jointly Gaussian vectors.
//
// A GaussianVector is a covariance matrix with named coordinates. When it is built from
// a linear model of independent sources (LinearGaussianModel) it also carries the
// square-root factor F (covariance = F F^T); entropies are then evaluated from F by
// Householder QR, which never forms the covariance and stays accurate when fading
// amplitudes span many orders of magnitude. Otherwise the covariance is factored with
// pivoted LDLT and conditioning goes through the Schur complement.

#include <dpc/errors.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dpc {

using Labels = std::vector<std::string>;

// Tolerances.
inline constexpr double kSymmetryTolerance = 1e-12;       // relative to max(1, max|entry|)
inline constexpr double kPsdTolerance = 1e-10;            // relative to max(1, max|entry|)
inline constexpr double kMinDeterminant = 1e-300;         // below: degenerate distribution
inline constexpr double kMinConditioningVariance = 1e-12; // conditioning pivots below: degenerate

class GaussianVector {
 public:
  GaussianVector(Labels names, Eigen::MatrixXd covariance)
      : names_(std::move(names)), covariance_(std::move(covariance)) {
    validate_names();
    if (covariance_.rows() != covariance_.cols() ||
        static_cast<std::size_t>(covariance_.rows()) != names_.size()) {
      throw InvalidParameter("covariance order must match the number of names");
    }
    const double scale = std::max(1.0, covariance_.cwiseAbs().maxCoeff());
    if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() >
        kSymmetryTolerance * scale) {
      throw InvalidParameter("covariance must be symmetric");
    }
    if (covariance_.rows() > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance_,
                                                         Eigen::EigenvaluesOnly);
      if (eig.eigenvalues().minCoeff() < -kPsdTolerance * scale) {
        throw InvalidParameter("covariance must be positive semi-definite");
      }
    }
  }

  /// Covariance F F^T; rows of F are coordinates, columns independent unit sources.
  static GaussianVector from_factor(Labels names, Eigen::MatrixXd factor) {
    if (static_cast<std::size_t>(factor.rows()) != names.size()) {
      throw InvalidParameter("factor rows must match the number of names");
    }
    Eigen::MatrixXd cov = factor * factor.transpose();
    cov = 0.5 * (cov + cov.transpose()).eval();
    GaussianVector g(std::move(names), std::move(cov));
    g.factor_ = std::move(factor);
    return g;
  }

  std::size_t dim() const { return names_.size(); }
  const Labels& names() const { return names_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  bool has_factor() const { return factor_.has_value(); }
  const Eigen::MatrixXd& factor() const { return *factor_; }

  /// Same distribution without the square-root factor (forces the covariance route).
  GaussianVector without_factor() const { return GaussianVector(names_, covariance_); }

  std::size_t index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
      throw InvalidParameter("unknown coordinate '" + name + "'");
    }
    return static_cast<std::size_t>(it - names_.begin());
  }

  std::vector<std::size_t> indices_of(const Labels& labels) const {
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.push_back(index_of(l));
    return out;
  }

 private:
  void validate_names() const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      for (std::size_t j = i + 1; j < names_.size(); ++j) {
        if (names_[i] == names_[j]) {
          throw InvalidParameter("coordinate names must be unique: '" + names_[i] + "'");
        }
      }
    }
  }

  Labels names_;
  Eigen::MatrixXd covariance_;
  std::optional<Eigen::MatrixXd> factor_;
};

/// Builds a GaussianVector from independent zero-mean sources and linear combinations.
class LinearGaussianModel {
 public:
  LinearGaussianModel& source(std::string name, double variance) {
    if (!(variance >= 0.0) || !std::isfinite(variance)) {
      throw InvalidParameter("source variance must be finite and nonnegative");
    }
    if (!combos_.empty()) {
      throw InvalidParameter("declare all sources before combinations");
    }
    require_new(name);
    const std::size_t k = source_sd_.size();
    source_sd_.push_back(std::sqrt(variance));
    for (auto& row : rows_) row.push_back(0.0);
    std::vector<double> row(k + 1, 0.0);
    row[k] = source_sd_.back();
    names_.push_back(std::move(name));
    rows_.push_back(std::move(row));
    return *this;
  }

  /// name = sum coef * term, where each term is a source or an earlier combination.
  LinearGaussianModel& combine(std::string name,
                               const std::vector<std::pair<std::string, double>>& terms) {
    require_new(name);
    std::vector<double> row(source_sd_.size(), 0.0);
    for (const auto& [term, coef] : terms) {
      const auto& r = rows_[lookup(term)];
      for (std::size_t i = 0; i < row.size(); ++i) row[i] += coef * r[i];
    }
    names_.push_back(std::move(name));
    rows_.push_back(std::move(row));
    combos_.push_back(names_.back());
    return *this;
  }

  GaussianVector build() const {
    Eigen::MatrixXd f(static_cast<Eigen::Index>(rows_.size()),
                      static_cast<Eigen::Index>(source_sd_.size()));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      for (std::size_t j = 0; j < source_sd_.size(); ++j) {
        f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows_[i][j];
      }
    }
    return GaussianVector::from_factor(names_, std::move(f));
  }

 private:
  std::size_t lookup(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw InvalidParameter("unknown term '" + name + "'");
    return static_cast<std::size_t>(it - names_.begin());
  }

  void require_new(const std::string& name) const {
    if (std::find(names_.begin(), names_.end(), name) != names_.end()) {
      throw InvalidParameter("duplicate coordinate '" + name + "'");
    }
  }

  Labels names_;
  std::vector<double> source_sd_;
  std::vector<std::vector<double>> rows_;
  Labels combos_;
};

struct EntropyValue {
  double value;  // bits
  Labels conditioning;
};

namespace detail {

using Real = long double;
using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

inline const Real kLogMinDeterminant = std::log(static_cast<Real>(kMinDeterminant));

inline MatrixR sub_block(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows,
                         const std::vector<std::size_t>& cols) {
  MatrixR out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<Real>(m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j])));
    }
  }
  return out;
}

inline Real target_log_det_checked(Real log_det, bool any_nonpositive) {
  if (any_nonpositive || !(log_det >= kLogMinDeterminant)) {
    throw DegenerateDistribution("covariance block is singular (determinant below 1e-300)");
  }
  return log_det;
}

inline Real log_det_by_factor(const GaussianVector& g, const std::vector<std::size_t>& target,
                              const std::vector<std::size_t>& given) {
  const auto& f = g.factor();
  const Eigen::Index k = f.cols();
  const Eigen::Index n_given = static_cast<Eigen::Index>(given.size());
  const Eigen::Index n = n_given + static_cast<Eigen::Index>(target.size());
  // Columns of a = rows of the factor, conditioning coordinates first.
  MatrixR a(k, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto row = static_cast<Eigen::Index>(c < n_given ? given[static_cast<std::size_t>(c)]
                                                           : target[static_cast<std::size_t>(c - n_given)]);
    for (Eigen::Index r = 0; r < k; ++r) a(r, c) = static_cast<Real>(f(row, r));
  }
  Eigen::HouseholderQR<MatrixR> qr(a);
  const MatrixR& r = qr.matrixQR();
  // Squared diagonal of R = sequential conditional variances.
  for (Eigen::Index i = 0; i < n_given; ++i) {
    const Real v = i < k ? r(i, i) * r(i, i) : Real(0);
    if (v < static_cast<Real>(kMinConditioningVariance)) {
      throw DegenerateConditioning("conditioning covariance is singular");
    }
  }
  Real log_det = 0;
  bool nonpositive = false;
  for (Eigen::Index i = n_given; i < n; ++i) {
    const Real v = i < k ? r(i, i) * r(i, i) : Real(0);
    if (!(v > 0)) {
      nonpositive = true;
      break;
    }
    log_det += std::log(v);
  }
  return target_log_det_checked(log_det, nonpositive);
}

inline Real log_det_by_covariance(const GaussianVector& g, const std::vector<std::size_t>& target,
                                  const std::vector<std::size_t>& given) {
  const auto& cov = g.covariance();
  MatrixR schur = sub_block(cov, target, target);
  if (!given.empty()) {
    const MatrixR gg = sub_block(cov, given, given);
    const MatrixR gt = sub_block(cov, given, target);
    Eigen::LDLT<MatrixR> ldlt(gg);
    if (ldlt.info() != Eigen::Success ||
        ldlt.vectorD().minCoeff() < static_cast<Real>(kMinConditioningVariance)) {
      throw DegenerateConditioning("conditioning covariance is singular");
    }
    schur -= gt.transpose() * ldlt.solve(gt);
    schur = (Real(0.5) * (schur + schur.transpose())).eval();
  }
  Eigen::LDLT<MatrixR> ldlt(schur);
  const auto d = ldlt.vectorD();
  Real log_det = 0;
  bool nonpositive = ldlt.info() != Eigen::Success;
  for (Eigen::Index i = 0; i < d.size() && !nonpositive; ++i) {
    if (!(d(i) > 0)) {
      nonpositive = true;
    } else {
      log_det += std::log(d(i));
    }
  }
  return target_log_det_checked(log_det, nonpositive);
}

/// Natural log-determinant of Cov(target | given).
inline Real conditional_log_det(const GaussianVector& g, const std::vector<std::size_t>& target,
                                const std::vector<std::size_t>& given) {
  if (target.empty()) {
    throw InvalidParameter("entropy of an empty coordinate set");
  }
  return g.has_factor() ? log_det_by_factor(g, target, given)
                        : log_det_by_covariance(g, target, given);
}

inline double entropy_bits(std::size_t k, Real log_det) {
  const Real log2_two_pi_e = std::log2(Real(2) * std::numbers::pi_v<Real> * std::numbers::e_v<Real>);
  return static_cast<double>(Real(0.5) * (static_cast<Real>(k) * log2_two_pi_e +
                                          log_det / std::numbers::ln2_v<Real>));
}

}  // namespace detail

/// Differential entropy 1/2 log2((2 pi e)^k det Sigma) of the listed coordinates, in bits.
inline EntropyValue entropy(const GaussianVector& g, const Labels& coords) {
  const auto idx = g.indices_of(coords);
  return {detail::entropy_bits(idx.size(), detail::conditional_log_det(g, idx, {})), {}};
}

/// h(target | given) from the Schur complement; equals h(target, given) - h(given).
inline EntropyValue conditional_entropy(const GaussianVector& g, const Labels& target,
                                        const Labels& given) {
  const auto t = g.indices_of(target);
  const auto c = g.indices_of(given);
  for (auto i : t) {
    if (std::find(c.begin(), c.end(), i) != c.end()) {
      throw DegenerateDistribution("target coordinate '" + g.names()[i] +
                                   "' is also conditioned on");
    }
  }
  return {detail::entropy_bits(t.size(), detail::conditional_log_det(g, t, c)), given};
}

/// I(a; b) = h(a) - h(a | b) in bits, clamped at zero.
inline double mutual_information(const GaussianVector& g, const Labels& a, const Labels& b) {
  const auto ia = g.indices_of(a);
  const auto ib = g.indices_of(b);
  const auto marginal = detail::conditional_log_det(g, ia, {});
  const auto conditional = detail::conditional_log_det(g, ia, ib);
  const double bits = static_cast<double>((marginal - conditional) /
                                          (2 * std::numbers::ln2_v<detail::Real>));
  return std::max(0.0, bits);
}

/// Noise variance 1 / sum a_j^2 of the maximal-ratio-combined statistic S + Z~ built from
/// observations a_j S + Z_j with unit noise.
inline double mrc_combine(std::span<const double> fadings) {
  double energy = 0.0;
  for (double a : fadings) energy += a * a;
  if (!(energy > 0.0)) {
    throw DegenerateDistribution("maximal ratio combining needs a nonzero amplitude");
  }
  return 1.0 / energy;
}

inline double mrc_combine(std::initializer_list<double> fadings) {
  return mrc_combine(std::span<const double>(fadings.begin(), fadings.size()));
}

/// Costa coding with U = X + (P/(P+N)) a_pre S on Y = X + a_act S + Z:
/// I(U;Y) - I(U;S) from the exact joint covariance. Negative values are returned as is.
inline double costa_mismatched_rate(double power, double state_power, double a_precoded,
                                    double a_actual, double noise_power = 1.0) {
  if (!(power > 0.0) || !(state_power > 0.0) || !(noise_power > 0.0)) {
    throw InvalidParameter("powers must be positive");
  }
  const double lambda = power / (power + noise_power) * a_precoded;
  const auto g = LinearGaussianModel()
                     .source("X", power)
                     .source("S", state_power)
                     .source("Z", noise_power)
                     .combine("U", {{"X", 1.0}, {"S", lambda}})
                     .combine("Y", {{"X", 1.0}, {"S", a_actual}, {"Z", 1.0}})
                     .build();
  // I(U;Y) - I(U;S) = h(U|S) - h(U|Y).
  const auto u = g.indices_of({"U"});
  const auto s = g.indices_of({"S"});
  const auto y = g.indices_of({"Y"});
  const auto given_s = detail::conditional_log_det(g, u, s);
  const auto given_y = detail::conditional_log_det(g, u, y);
  return static_cast<double>((given_s - given_y) / (2 * std::numbers::ln2_v<detail::Real>));
}

}  // namespace dpc
