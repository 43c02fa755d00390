#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace epf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Pivot ratio below which a design is treated as rank deficient.
inline constexpr double kRankTolerance = 1e-12;
/// Floor applied to distances before inversion.
inline constexpr double kDistanceFloor = 1e-8;

struct FitOptions {
  /// Columns that are identically zero in the sample get a zero coefficient
  /// instead of raising a singular-design error. Used for day-of-week dummies
  /// that do not occur in a selected sample and for series that were constant
  /// over the normalization range.
  bool drop_empty_columns = false;
};

struct Coefficients {
  Vector values;
  std::vector<Eigen::Index> dropped;

  double predict(const Eigen::Ref<const Vector>& x) const { return values.dot(x); }
};

/// Least squares via column-pivoted Householder QR.
Coefficients ols_fit(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y, FitOptions options = {});

/// Weighted least squares: OLS on rows scaled by sqrt(w).
Coefficients wls_fit(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y,
                     std::span<const double> weights, FitOptions options = {});

/// max |X'(y - Xb)|, the normal-equation residual of a fit.
double orthogonality_defect(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y,
                            const Eigen::Ref<const Vector>& b);

using DistanceList = std::vector<double>;
using WeightVector = std::vector<double>;

/// Euclidean distance from `target` to every row of `candidates`.
DistanceList distances(const Eigen::Ref<const Vector>& target, const Eigen::Ref<const Matrix>& candidates);

/// Candidate indices sorted nearest first; equal distances put the later
/// (more recent) index first.
std::vector<std::size_t> rank_by_distance(std::span<const double> dist);

/// Indices of the k nearest candidates, returned in ascending index order.
std::vector<std::size_t> knn_select(std::span<const double> dist, std::size_t k);

/// w_t = (1/max(D_t, eps)) / sum_s (1/max(D_s, eps)).
WeightVector inv_dist_weights(std::span<const double> dist, double eps = kDistanceFloor);

/// Least squares that grows one row at a time by Givens rotations.
///
/// Keeps the triangular factor R and Q'y so that the solution for every
/// prefix of a row sequence costs O(p^2) per added row instead of a fresh
/// factorization. Columns that never received a nonzero entry are treated
/// as absent, matching FitOptions::drop_empty_columns.
class IncrementalLeastSquares {
 public:
  explicit IncrementalLeastSquares(Eigen::Index cols);

  void add_row(const Eigen::Ref<const Vector>& x, double y, double weight = 1.0);
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return r_.cols(); }

  /// Throws SingularDesignError when the current prefix is rank deficient.
  Vector solve() const;

 private:
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r_;
  Vector qty_;
  Vector work_;
  std::vector<bool> touched_;
  Eigen::Index rows_ = 0;
};

}  // namespace epf
