#include "gjl/poly_ops.hpp"

#include "gjl/error.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace gjl {
namespace {

void require_order(int n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "polynomial half-degree must be >= 1, got " + std::to_string(n));
}

void require_positive(double A) {
  if (!(A > 0.0) || !std::isfinite(A)) {
    fail(ErrorKind::InvalidArgument, "operator parameter A must be positive and finite");
  }
}

// (x+y)^p (x-y)^q as integer coefficients indexed by the x-exponent.
std::vector<std::int64_t> binomial_product(int p, int q) {
  std::vector<std::int64_t> out{1};
  auto multiply = [&out](int sign) {  // times (x + sign*y)
    std::vector<std::int64_t> next(out.size() + 1, 0);
    // out[j] is the coefficient of x^j y^(d-j); multiplying by x raises j,
    // multiplying by y keeps it.
    for (size_t j = 0; j < out.size(); ++j) {
      next[j + 1] += out[j];
      next[j] += sign * out[j];
    }
    out.swap(next);
  };
  for (int i = 0; i < p; ++i) multiply(+1);
  for (int i = 0; i < q; ++i) multiply(-1);
  return out;
}

double falling(int m, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= (m - i);
  return r;
}

}  // namespace

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  k = std::min(k, n - k);
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

// ---------------------------------------------------------------------------

PolyBasis::PolyBasis(int degree, Parity parity) : degree_(degree), parity_(parity) {
  const int step = parity == Parity::EvenEven ? 2 : 1;
  for (int j = degree; j >= 0; j -= step) monomials_.emplace_back(j, degree - j);
}

PolyBasis PolyBasis::even(int n) {
  require_order(n);
  return PolyBasis(2 * n, Parity::EvenEven);
}

PolyBasis PolyBasis::full(int n) {
  require_order(n);
  return PolyBasis(2 * n, Parity::Full);
}

int PolyBasis::index_of(int x_exponent) const noexcept {
  if (x_exponent < 0 || x_exponent > degree_) return -1;
  if (parity_ == Parity::Full) return degree_ - x_exponent;
  if (x_exponent % 2 != 0) return -1;
  return (degree_ - x_exponent) / 2;
}

PolyVector PolyOperator::apply(const PolyVector& v) const {
  if (!(v.basis == domain)) fail(ErrorKind::InvalidArgument, "polynomial basis does not match operator domain");
  return PolyVector{codomain, matrix * v.coeffs};
}

PolyOperator operator*(const PolyOperator& lhs, const PolyOperator& rhs) {
  if (!(lhs.domain == rhs.codomain)) fail(ErrorKind::InvalidArgument, "operator composition basis mismatch");
  return PolyOperator{rhs.domain, lhs.codomain, lhs.matrix * rhs.matrix};
}

PolyOperator differential_operator(const PolyBasis& domain, const PolyBasis& codomain,
                                   const std::vector<DiffTerm>& terms) {
  if (domain.degree() != codomain.degree()) {
    fail(ErrorKind::InvalidArgument, "differential operator must preserve the degree");
  }
  PolyOperator op{domain, codomain, Eigen::MatrixXd::Zero(codomain.dimension(), domain.dimension())};
  for (const DiffTerm& t : terms) {
    if (t.xa + t.yb != t.dx + t.dy) fail(ErrorKind::InvalidArgument, "differential term changes the degree");
    for (int col = 0; col < domain.dimension(); ++col) {
      const auto [j, k] = domain.monomials()[col];
      if (j < t.dx || k < t.dy) continue;
      const double c = t.coeff * falling(j, t.dx) * falling(k, t.dy);
      if (c == 0.0) continue;
      const int row = codomain.index_of(j - t.dx + t.xa);
      if (row < 0) fail(ErrorKind::InvalidArgument, "differential operator leaves the codomain basis");
      op.matrix(row, col) += c;
    }
  }
  return op;
}

PolyOperator boost(int n) {
  const PolyBasis b = PolyBasis::full(n);
  return differential_operator(b, b, {{1.0, 1, 0, 0, 1}, {1.0, 0, 1, 1, 0}});
}

PolyOperator twisted_boost(int n, double A) {
  require_positive(A);
  const PolyBasis b = PolyBasis::full(n);
  return differential_operator(b, b, {{A, 1, 0, 0, 1}, {1.0 / A, 0, 1, 1, 0}});
}

PolyOperator boost_squared(int n) {
  const PolyOperator b = boost(n);
  const Eigen::MatrixXd sq = b.matrix * b.matrix;
  const PolyBasis ee = PolyBasis::even(n);
  PolyOperator out{ee, ee, Eigen::MatrixXd(ee.dimension(), ee.dimension())};
  for (int r = 0; r < ee.dimension(); ++r)
    for (int c = 0; c < ee.dimension(); ++c)
      out.matrix(r, c) = sq(b.domain.index_of(ee.monomials()[r].first), b.domain.index_of(ee.monomials()[c].first));
  return out;
}

Eigen::VectorXd boost_squared_spectrum(int n) {
  const PolyOperator op = boost_squared(n);
  const int dim = op.domain.dimension();
  Eigen::VectorXd w(dim);
  for (int i = 0; i < dim; ++i) w[i] = 1.0 / std::sqrt(binomial(2 * n, op.domain.monomials()[i].first));
  Eigen::MatrixXd s = w.asDiagonal() * op.matrix * w.cwiseInverse().asDiagonal();
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

std::vector<PolyVector> eigenbasis_q(int n) {
  const PolyBasis ee = PolyBasis::even(n);
  std::vector<PolyVector> out;
  out.reserve(n + 1);
  for (int k = 0; k <= n; ++k) {
    const auto first = binomial_product(n + k, n - k);
    const auto second = binomial_product(n - k, n + k);
    PolyVector v{ee, Eigen::VectorXd::Zero(ee.dimension())};
    for (int j = 0; j <= 2 * n; ++j) {
      const std::int64_t c = first[j] + second[j];
      if (c == 0) continue;
      const int idx = ee.index_of(j);
      if (idx < 0) fail(ErrorKind::Internal, "q_k has an odd monomial");
      v.coeffs[idx] = static_cast<double>(c);
    }
    out.push_back(std::move(v));
  }
  return out;
}

PolyOperator op_EA(int n, double A) {
  require_positive(A);
  const PolyBasis ee = PolyBasis::even(n);
  const double a2 = A * A, ia2 = 1.0 / (A * A);
  return differential_operator(ee, ee,
                               {{a2, 2, 0, 2, 0}, {a2, 2, 0, 0, 2}, {ia2, 0, 2, 2, 0}, {ia2, 0, 2, 0, 2}});
}

PolyOperator op_SA(int n, double A) {
  require_positive(A);
  const PolyBasis ee = PolyBasis::even(n);
  return differential_operator(ee, ee, {{A, 1, 0, 1, 0}, {-1.0 / A, 0, 1, 0, 1}});
}

Eigen::VectorXd u_eigenvalues(const PolyBasis& basis, double A) {
  require_positive(A);
  const double ax = A * A + 1.0;
  const double ay = 1.0 / (A * A) + 1.0;
  Eigen::VectorXd d(basis.dimension());
  for (int i = 0; i < basis.dimension(); ++i) {
    const auto [j, k] = basis.monomials()[i];
    d[i] = std::pow(ax, 0.5 * j) * std::pow(ay, 0.5 * k);
  }
  return d;
}

PolyOperator op_U(int n, double A) {
  const PolyBasis ee = PolyBasis::even(n);
  return PolyOperator{ee, ee, u_eigenvalues(ee, A).asDiagonal()};
}

double conjugation_identity_residual(int n, double A) {
  const PolyOperator twisted = twisted_boost(n, A);
  const PolyOperator plain = boost(n);
  const Eigen::VectorXd u = u_eigenvalues(twisted.domain, A);
  double worst = 0.0;
  for (int r = 0; r < u.size(); ++r)
    for (int c = 0; c < u.size(); ++c)
      worst = std::max(worst, std::abs(twisted.matrix(r, c) * (u[c] / u[r]) - plain.matrix(r, c)));
  return worst;
}

std::vector<double> dtilde_coefficients(int n) {
  const auto q = eigenbasis_q(n);
  const int dim = n + 1;
  // Row k: the functional mu (one entry per basis monomial) applied to q_k.
  Eigen::MatrixXd m(dim, dim);
  for (int k = 0; k < dim; ++k) m.row(k) = q[k].coeffs.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  rhs[n] = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) fail(ErrorKind::Internal, "q eigenbasis is singular");
  const Eigen::VectorXd mu = lu.solve(rhs);
  // mu_i is the weight on the monomial coefficient; the derivative
  // d_x^(2j) d_y^(2n-2j) of x^(2j) y^(2n-2j) is (2j)! (2n-2j)!.
  std::vector<double> nu(dim);
  const PolyBasis& ee = q[0].basis;
  for (int j = 0; j <= n; ++j) nu[j] = mu[ee.index_of(2 * j)] / (factorial(2 * j) * factorial(2 * n - 2 * j));
  return nu;
}

std::vector<double> d_operator_weights(int n, double A) {
  require_positive(A);
  std::vector<double> w = dtilde_coefficients(n);
  const double denom = std::pow(1.0 + A * A, n);
  for (int j = 0; j <= n; ++j) w[j] *= std::pow(A, 2 * n - 2 * j) / denom;
  return w;
}

double apply_derivative_functional(const std::vector<double>& weights, const PolyVector& poly) {
  const int n = static_cast<int>(weights.size()) - 1;
  if (poly.basis.degree() != 2 * n || poly.coeffs.size() != poly.basis.dimension()) {
    fail(ErrorKind::InvalidArgument, "polynomial degree does not match the differential operator");
  }
  double s = 0.0;
  for (int j = 0; j <= n; ++j) {
    const int idx = poly.basis.index_of(2 * j);
    s += weights[j] * factorial(2 * j) * factorial(2 * n - 2 * j) * poly.coeffs[idx];
  }
  return s;
}

double apply_dtilde(int n, const PolyVector& poly) {
  return apply_derivative_functional(dtilde_coefficients(n), poly);
}

double apply_d_operator(int n, double A, const PolyVector& poly) {
  return apply_derivative_functional(d_operator_weights(n, A), poly);
}

// ---------------------------------------------------------------------------

QBasis::QBasis(int n) : n_(n), basis_(PolyBasis::even(n)), q_(eigenbasis_q(n)) {
  weights_.resize(basis_.dimension());
  for (int i = 0; i < basis_.dimension(); ++i) weights_[i] = 1.0 / binomial(2 * n, basis_.monomials()[i].first);
  norms_.resize(n + 1);
  for (int k = 0; k <= n; ++k) norms_[k] = q_[k].coeffs.cwiseProduct(weights_).dot(q_[k].coeffs);
}

Eigen::VectorXd QBasis::coordinates(const Eigen::VectorXd& p) const {
  Eigen::VectorXd f(n_ + 1);
  const Eigen::VectorXd wp = p.cwiseProduct(weights_);
  for (int k = 0; k <= n_; ++k) f[k] = wp.dot(q_[k].coeffs) / norms_[k];
  return f;
}

Eigen::VectorXd QBasis::combine(const Eigen::VectorXd& f) const {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(basis_.dimension());
  for (int k = 0; k <= n_; ++k) p += f[k] * q_[k].coeffs;
  return p;
}

// ---------------------------------------------------------------------------

Homogeneous Homogeneous::zero(int degree) {
  return Homogeneous{degree, degree >= 0 ? Eigen::VectorXd::Zero(degree + 1) : Eigen::VectorXd()};
}

Homogeneous Homogeneous::from_vector(const PolyVector& v) {
  Homogeneous h = zero(v.basis.degree());
  for (int i = 0; i < v.basis.dimension(); ++i) h.c[v.basis.monomials()[i].first] = v.coeffs[i];
  return h;
}

PolyVector Homogeneous::to_vector(const PolyBasis& basis) const {
  if (basis.degree() != degree) fail(ErrorKind::InvalidArgument, "homogeneous polynomial degree mismatch");
  PolyVector v{basis, Eigen::VectorXd::Zero(basis.dimension())};
  for (int i = 0; i < basis.dimension(); ++i) v.coeffs[i] = c[basis.monomials()[i].first];
  return v;
}

Homogeneous Homogeneous::dx() const {
  Homogeneous out = zero(degree - 1);
  for (int j = 1; j <= degree; ++j) out.c[j - 1] = j * c[j];
  return out;
}

Homogeneous Homogeneous::dy() const {
  Homogeneous out = zero(degree - 1);
  for (int j = 0; j < degree; ++j) out.c[j] = (degree - j) * c[j];
  return out;
}

Homogeneous Homogeneous::laplacian() const {
  Homogeneous out = zero(degree - 2);
  for (int j = 0; j <= degree - 2; ++j) {
    out.c[j] = (j + 2) * (j + 1) * c[j + 2] + (degree - j) * (degree - j - 1) * c[j];
  }
  return out;
}

Homogeneous& Homogeneous::operator+=(const Homogeneous& o) {
  if (o.degree != degree) fail(ErrorKind::InvalidArgument, "adding homogeneous polynomials of different degree");
  if (c.size()) c += o.c;
  return *this;
}

Homogeneous& Homogeneous::operator*=(double s) {
  c *= s;
  return *this;
}

Homogeneous operator*(const Homogeneous& a, const Homogeneous& b) {
  Homogeneous out = Homogeneous::zero(a.degree + b.degree);
  if (a.c.size() == 0 || b.c.size() == 0) return out;
  for (int i = 0; i <= a.degree; ++i) {
    if (a.c[i] == 0.0) continue;
    for (int j = 0; j <= b.degree; ++j) out.c[i + j] += a.c[i] * b.c[j];
  }
  return out;
}

}  // namespace gjl
