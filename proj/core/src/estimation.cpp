#include "epf/estimation.hpp"

#include "epf/error.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace epf {

namespace {

std::string column_list(const std::vector<Eigen::Index>& cols) {
  std::ostringstream os;
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? ", " : "") << cols[i];
  return os.str();
}

Coefficients solve_qr(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y, FitOptions options) {
  const auto n = X.rows();
  const auto p = X.cols();
  if (y.size() != n) throw ConfigError("design and target lengths differ");
  if (!X.allFinite() || !y.allFinite()) throw SingularDesignError("design or target contains non-finite values");

  std::vector<Eigen::Index> active;
  Coefficients out;
  out.values = Vector::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (options.drop_empty_columns && (X.col(j).array() == 0.0).all()) {
      out.dropped.push_back(j);
    } else {
      active.push_back(j);
    }
  }
  const auto q = static_cast<Eigen::Index>(active.size());
  if (n < q) {
    throw SingularDesignError("least squares needs at least as many rows (" + std::to_string(n) +
                              ") as columns (" + std::to_string(q) + ")");
  }
  if (q == 0) return out;

  Eigen::ColPivHouseholderQR<Matrix> qr;
  qr.setThreshold(kRankTolerance);
  if (out.dropped.empty()) {
    qr.compute(X);
  } else {
    Matrix reduced(n, q);
    for (Eigen::Index j = 0; j < q; ++j) reduced.col(j) = X.col(active[static_cast<std::size_t>(j)]);
    qr.compute(reduced);
  }
  if (qr.rank() < q) {
    std::vector<Eigen::Index> dependent;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < q; ++i) dependent.push_back(active[static_cast<std::size_t>(perm(i))]);
    std::sort(dependent.begin(), dependent.end());
    throw SingularDesignError("singular design: columns {" + column_list(dependent) +
                              "} are linearly dependent on the others");
  }
  const Vector b = qr.solve(y);
  for (Eigen::Index j = 0; j < q; ++j) out.values(active[static_cast<std::size_t>(j)]) = b(j);
  return out;
}

}  // namespace

Coefficients ols_fit(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y, FitOptions options) {
  return solve_qr(X, y, options);
}

Coefficients wls_fit(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y,
                     std::span<const double> weights, FitOptions options) {
  if (static_cast<Eigen::Index>(weights.size()) != X.rows()) throw ConfigError("weight count differs from row count");
  Vector root(X.rows());
  Eigen::Index positive = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double w = weights[static_cast<std::size_t>(i)];
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("weights must be finite and non-negative");
    if (w > 0.0) ++positive;
    root(i) = std::sqrt(w);
  }
  if (positive < X.cols()) {
    throw SingularDesignError("weighted least squares needs at least " + std::to_string(X.cols()) +
                              " positive weights, got " + std::to_string(positive));
  }
  const Matrix Xw = root.asDiagonal() * X;
  const Vector yw = root.cwiseProduct(y);
  return solve_qr(Xw, yw, options);
}

double orthogonality_defect(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y,
                            const Eigen::Ref<const Vector>& b) {
  return (X.transpose() * (y - X * b)).cwiseAbs().maxCoeff();
}

DistanceList distances(const Eigen::Ref<const Vector>& target, const Eigen::Ref<const Matrix>& candidates) {
  if (candidates.cols() != target.size()) {
    throw ConfigError("similarity vectors differ in dimension: target " + std::to_string(target.size()) +
                      ", candidates " + std::to_string(candidates.cols()));
  }
  DistanceList out(static_cast<std::size_t>(candidates.rows()));
  for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
    double ss = 0.0;
    for (Eigen::Index j = 0; j < target.size(); ++j) {
      const double diff = candidates(i, j) - target(j);
      ss += diff * diff;
    }
    out[static_cast<std::size_t>(i)] = std::sqrt(ss);
  }
  return out;
}

namespace {

struct NearerFirst {
  std::span<const double> dist;
  bool operator()(std::size_t a, std::size_t b) const {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return a > b;
  }
};

}  // namespace

std::vector<std::size_t> rank_by_distance(std::span<const double> dist) {
  std::vector<std::size_t> order(dist.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), NearerFirst{dist});
  return order;
}

std::vector<std::size_t> knn_select(std::span<const double> dist, std::size_t k) {
  if (k < 1 || k > dist.size()) {
    throw ConfigError("k = " + std::to_string(k) + " outside [1, " + std::to_string(dist.size()) + "]");
  }
  std::vector<std::size_t> order(dist.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (k < order.size()) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), NearerFirst{dist});
  }
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

WeightVector inv_dist_weights(std::span<const double> dist, double eps) {
  if (dist.empty()) throw ConfigError("inverse-distance weights need at least one distance");
  if (!(eps > 0.0)) throw ConfigError("distance floor must be positive");
  WeightVector w(dist.size());
  double total = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    w[i] = 1.0 / std::max(dist[i], eps);
    total += w[i];
  }
  for (auto& x : w) x /= total;
  return w;
}

IncrementalLeastSquares::IncrementalLeastSquares(Eigen::Index cols)
    : r_(decltype(r_)::Zero(cols, cols)), qty_(Vector::Zero(cols)), work_(cols), touched_(static_cast<std::size_t>(cols)) {}

void IncrementalLeastSquares::add_row(const Eigen::Ref<const Vector>& x, double y, double weight) {
  const auto p = r_.cols();
  if (x.size() != p) throw ConfigError("row length differs from column count");
  const double s = std::sqrt(weight);
  work_ = s * x;
  double rhs = s * y;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (work_(j) != 0.0) touched_[static_cast<std::size_t>(j)] = true;
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    const double xj = work_(j);
    if (xj == 0.0) continue;
    const double rjj = r_(j, j);
    const double h = std::sqrt(rjj * rjj + xj * xj);
    const double c = rjj / h;
    const double sn = xj / h;
    r_(j, j) = h;
    work_(j) = 0.0;
    for (Eigen::Index k = j + 1; k < p; ++k) {
      const double a = r_(j, k);
      const double b = work_(k);
      r_(j, k) = c * a + sn * b;
      work_(k) = c * b - sn * a;
    }
    const double a = qty_(j);
    qty_(j) = c * a + sn * rhs;
    rhs = c * rhs - sn * a;
  }
  ++rows_;
}

Vector IncrementalLeastSquares::solve() const {
  const auto p = r_.cols();
  double max_diag = 0.0;
  Eigen::Index active = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!touched_[static_cast<std::size_t>(j)]) continue;
    ++active;
    max_diag = std::max(max_diag, std::abs(r_(j, j)));
  }
  if (rows_ < active) {
    throw SingularDesignError("least squares needs at least as many rows (" + std::to_string(rows_) +
                              ") as columns (" + std::to_string(active) + ")");
  }
  std::vector<Eigen::Index> dependent;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (touched_[static_cast<std::size_t>(j)] && std::abs(r_(j, j)) <= kRankTolerance * max_diag) dependent.push_back(j);
  }
  if (!dependent.empty()) {
    throw SingularDesignError("singular design: columns {" + column_list(dependent) +
                              "} are linearly dependent on the others");
  }
  Vector b = Vector::Zero(p);
  for (Eigen::Index j = p - 1; j >= 0; --j) {
    if (!touched_[static_cast<std::size_t>(j)]) continue;
    double acc = qty_(j);
    for (Eigen::Index k = j + 1; k < p; ++k) acc -= r_(j, k) * b(k);
    b(j) = acc / r_(j, j);
  }
  return b;
}

}  // namespace epf
