#include "gjl/timegrid.hpp"

#include "gjl/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace gjl {
namespace {

using std::numbers::pi;

// cos(pi * k / n) with the argument reduced first, so that T_k(x_j) is
// evaluated to full precision for large products k*j.
double cospi_ratio(long k, long n) {
  long r = k % (2 * n);
  return std::cos(pi * static_cast<double>(r) / static_cast<double>(n));
}

}  // namespace

TimeGrid::TimeGrid(int node_count) {
  const int n = node_count - 1;
  nodes_.resize(node_count);
  for (int j = 0; j <= n; ++j) {
    const double s = std::sin(pi * j / (2.0 * n));
    nodes_[j] = s * s;
  }
  nodes_[0] = 0.0;
  nodes_[n] = 1.0;

  bary_.resize(node_count);
  for (int j = 0; j <= n; ++j) {
    bary_[j] = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
  }

  // Node differences through the product formula
  // t_i - t_j = sin(pi (i+j) / 2N) sin(pi (i-j) / 2N), which avoids cancellation.
  diff_ = Eigen::MatrixXd::Zero(node_count, node_count);
  for (int i = 0; i <= n; ++i) {
    long double row_sum = 0.0L;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      const double dt = std::sin(pi * (i + j) / (2.0 * n)) * std::sin(pi * (i - j) / (2.0 * n));
      diff_(i, j) = (bary_[j] / bary_[i]) / dt;
      row_sum += diff_(i, j);
    }
    diff_(i, i) = static_cast<double>(-row_sum);
  }

  // Clenshaw-Curtis weights on [-1,1], halved for [0,1].
  weights_ = Eigen::VectorXd::Zero(node_count);
  {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(node_count);
    const double nn = static_cast<double>(n);
    double end_weight;
    if (n % 2 == 0) {
      end_weight = 1.0 / (nn * nn - 1.0);
      for (int k = 1; k < n / 2; ++k)
        for (int j = 1; j < n; ++j) v[j] -= 2.0 * cospi_ratio(2L * k * j, n) / (4.0 * k * k - 1.0);
      for (int j = 1; j < n; ++j) v[j] -= cospi_ratio(static_cast<long>(n) * j, n) / (nn * nn - 1.0);
    } else {
      end_weight = 1.0 / (nn * nn);
      for (int k = 1; k <= (n - 1) / 2; ++k)
        for (int j = 1; j < n; ++j) v[j] -= 2.0 * cospi_ratio(2L * k * j, n) / (4.0 * k * k - 1.0);
    }
    weights_[0] = weights_[n] = 0.5 * end_weight;
    for (int j = 1; j < n; ++j) weights_[j] = v[j] / nn;
  }

  // Cumulative integration: nodal values -> Chebyshev coefficients in
  // x = 1 - 2t -> antiderivative coefficients -> nodal values.
  cumulative_ = Eigen::MatrixXd::Zero(node_count, node_count);
  {
    Eigen::MatrixXd to_coeffs(node_count, node_count);  // b = C f, f(x) = sum b_k T_k(x)
    for (int k = 0; k <= n; ++k) {
      for (int j = 0; j <= n; ++j) {
        double w = (j == 0 || j == n) ? 0.5 : 1.0;
        to_coeffs(k, j) = (2.0 / n) * w * cospi_ratio(static_cast<long>(k) * j, n);
      }
      if (k == 0 || k == n) to_coeffs.row(k) *= 0.5;
    }
    // Antiderivative coefficients A_1..A_{N+1} in terms of b.
    Eigen::MatrixXd integ = Eigen::MatrixXd::Zero(n + 2, node_count);
    auto coeff = [&](int k) -> Eigen::RowVectorXd {
      if (k < 0 || k > n) return Eigen::RowVectorXd::Zero(node_count);
      return to_coeffs.row(k);
    };
    integ.row(1) = coeff(0) - 0.5 * coeff(2);
    for (int k = 2; k <= n + 1; ++k) integ.row(k) = (coeff(k - 1) - coeff(k + 1)) / (2.0 * k);
    Eigen::RowVectorXd at_one = integ.colwise().sum();
    for (int i = 0; i <= n; ++i) {
      Eigen::RowVectorXd at_node = Eigen::RowVectorXd::Zero(node_count);
      for (int k = 1; k <= n + 1; ++k) at_node += cospi_ratio(static_cast<long>(k) * i, n) * integ.row(k);
      cumulative_.row(i) = 0.5 * (at_one - at_node);
    }
  }
}

std::shared_ptr<const TimeGrid> TimeGrid::make(int node_count) {
  if (node_count < 8) {
    fail(ErrorKind::InvalidArgument,
         "time grid needs at least 8 nodes, got " + std::to_string(node_count));
  }
  return std::shared_ptr<const TimeGrid>(new TimeGrid(node_count));
}

double TimeGrid::interpolate(std::span<const double> values, double t) const {
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < node_count(); ++j) {
    const double d = t - nodes_[j];
    if (d == 0.0) return values[j];
    const double w = bary_[j] / d;
    num += w * values[j];
    den += w;
  }
  return num / den;
}

CoefficientSeries::CoefficientSeries(GridPtr grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) fail(ErrorKind::InvalidArgument, "coefficient series without a grid");
  if (values_.size() != grid_->node_count()) {
    fail(ErrorKind::InvalidArgument, "coefficient series length does not match grid node count");
  }
}

CoefficientSeries CoefficientSeries::constant(GridPtr grid, double value) {
  const int n = grid->node_count();
  return CoefficientSeries(std::move(grid), Eigen::VectorXd::Constant(n, value));
}

CoefficientSeries CoefficientSeries::sample(GridPtr grid, const std::function<double(double)>& f) {
  Eigen::VectorXd v(grid->node_count());
  for (int i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
  return CoefficientSeries(std::move(grid), std::move(v));
}

double CoefficientSeries::at(double t) const {
  return grid_->interpolate(std::span<const double>(values_.data(), values_.size()), t);
}

double CoefficientSeries::max_abs() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }

void require_same_grid(const CoefficientSeries& a, const CoefficientSeries& b) {
  if (!a.grid_ptr() || !b.grid_ptr()) fail(ErrorKind::InvalidArgument, "series without a grid");
  if (a.grid_ptr() != b.grid_ptr() && a.grid().node_count() != b.grid().node_count()) {
    fail(ErrorKind::InvalidArgument, "series live on different time grids");
  }
}

CoefficientSeries& CoefficientSeries::operator+=(const CoefficientSeries& other) {
  require_same_grid(*this, other);
  values_ += other.values_;
  return *this;
}

CoefficientSeries& CoefficientSeries::operator-=(const CoefficientSeries& other) {
  require_same_grid(*this, other);
  values_ -= other.values_;
  return *this;
}

CoefficientSeries& CoefficientSeries::operator*=(double s) {
  values_ *= s;
  return *this;
}

CoefficientSeries operator*(const CoefficientSeries& a, const CoefficientSeries& b) {
  require_same_grid(a, b);
  return CoefficientSeries(a.grid_ptr(), a.values().cwiseProduct(b.values()));
}

CoefficientSeries operator/(const CoefficientSeries& a, const CoefficientSeries& b) {
  require_same_grid(a, b);
  return CoefficientSeries(a.grid_ptr(), a.values().cwiseQuotient(b.values()));
}

CoefficientSeries derivative(const CoefficientSeries& series) {
  // D is exact on affine functions, so differentiate only the deviation from
  // the chord; this keeps the roundoff proportional to that deviation.
  const TimeGrid& g = series.grid();
  const Eigen::VectorXd& v = series.values();
  const double slope = v[v.size() - 1] - v[0];
  Eigen::VectorXd rest = v - Eigen::VectorXd::Constant(v.size(), v[0]) - slope * g.nodes();
  Eigen::VectorXd d = g.diff_matrix() * rest;
  d.array() += slope;
  return CoefficientSeries(series.grid_ptr(), std::move(d));
}

double integrate(const CoefficientSeries& series) {
  return series.grid().quad_weights().dot(series.values());
}

CoefficientSeries cumulative_integral(const CoefficientSeries& series) {
  return CoefficientSeries(series.grid_ptr(), series.grid().cumulative_matrix() * series.values());
}

}  // namespace gjl
