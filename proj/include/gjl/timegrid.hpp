#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <span>

namespace gjl {

inline constexpr int kDefaultNodeCount = 64;

/// Chebyshev-Gauss-Lobatto collocation on [0,1].
///
/// Nodes are t_j = sin^2(pi j / 2N), j = 0..N, so t_0 = 0 and t_N = 1.
/// The grid owns the first-derivative matrix, the Clenshaw-Curtis weights and
/// the cumulative integration matrix (integral from 0 of the interpolant),
/// all built once and immutable afterwards.
class TimeGrid {
 public:
  /// Throws InvalidArgument when node_count < 8.
  static std::shared_ptr<const TimeGrid> make(int node_count = kDefaultNodeCount);

  int node_count() const noexcept { return static_cast<int>(nodes_.size()); }
  const Eigen::VectorXd& nodes() const noexcept { return nodes_; }
  double node(int i) const { return nodes_[i]; }
  const Eigen::MatrixXd& diff_matrix() const noexcept { return diff_; }
  const Eigen::VectorXd& quad_weights() const noexcept { return weights_; }
  const Eigen::MatrixXd& cumulative_matrix() const noexcept { return cumulative_; }

  /// Barycentric interpolation of nodal values at an arbitrary t in [0,1].
  double interpolate(std::span<const double> values, double t) const;

 private:
  explicit TimeGrid(int node_count);

  Eigen::VectorXd nodes_;
  Eigen::VectorXd bary_;
  Eigen::MatrixXd diff_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd cumulative_;
};

using GridPtr = std::shared_ptr<const TimeGrid>;

/// A time-dependent scalar sampled at the nodes of one grid.
class CoefficientSeries {
 public:
  CoefficientSeries() = default;
  CoefficientSeries(GridPtr grid, Eigen::VectorXd values);

  static CoefficientSeries constant(GridPtr grid, double value);
  static CoefficientSeries sample(GridPtr grid, const std::function<double(double)>& f);

  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const TimeGrid& grid() const { return *grid_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  double front() const { return values_[0]; }
  double back() const { return values_[values_.size() - 1]; }
  double at(double t) const;
  double max_abs() const;

  CoefficientSeries& operator+=(const CoefficientSeries& other);
  CoefficientSeries& operator-=(const CoefficientSeries& other);
  CoefficientSeries& operator*=(double s);

  friend CoefficientSeries operator+(CoefficientSeries a, const CoefficientSeries& b) { return a += b; }
  friend CoefficientSeries operator-(CoefficientSeries a, const CoefficientSeries& b) { return a -= b; }
  friend CoefficientSeries operator*(CoefficientSeries a, double s) { return a *= s; }
  friend CoefficientSeries operator*(double s, CoefficientSeries a) { return a *= s; }
  /// Pointwise product and quotient.
  friend CoefficientSeries operator*(const CoefficientSeries& a, const CoefficientSeries& b);
  friend CoefficientSeries operator/(const CoefficientSeries& a, const CoefficientSeries& b);

 private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

/// Throws InvalidArgument when two series live on different grids.
void require_same_grid(const CoefficientSeries& a, const CoefficientSeries& b);

CoefficientSeries derivative(const CoefficientSeries& series);
double integrate(const CoefficientSeries& series);
/// t -> integral over [0, t] of the interpolant.
CoefficientSeries cumulative_integral(const CoefficientSeries& series);

}  // namespace gjl
