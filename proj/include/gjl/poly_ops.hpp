#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace gjl {

enum class Parity { EvenEven, Full };

/// Monomial basis x^j y^k (j + k = degree) of the homogeneous polynomials of
/// an even degree, ordered by descending j. EvenEven keeps only even j and k.
class PolyBasis {
 public:
  PolyBasis() = default;
  /// degree = 2n; throws InvalidArgument unless n >= 1.
  static PolyBasis even(int n);
  static PolyBasis full(int n);

  int degree() const noexcept { return degree_; }
  int half_degree() const noexcept { return degree_ / 2; }
  Parity parity() const noexcept { return parity_; }
  int dimension() const noexcept { return static_cast<int>(monomials_.size()); }
  const std::vector<std::pair<int, int>>& monomials() const noexcept { return monomials_; }
  /// Position of x^j y^(degree - j), or -1 when the monomial is not in the basis.
  int index_of(int x_exponent) const noexcept;

  friend bool operator==(const PolyBasis& a, const PolyBasis& b) {
    return a.degree_ == b.degree_ && a.parity_ == b.parity_;
  }

 private:
  PolyBasis(int degree, Parity parity);

  int degree_ = 0;
  Parity parity_ = Parity::EvenEven;
  std::vector<std::pair<int, int>> monomials_;
};

struct PolyVector {
  PolyBasis basis;
  Eigen::VectorXd coeffs;
};

/// Matrix of a linear map between monomial bases: column i is the image of
/// domain monomial i in codomain coordinates.
struct PolyOperator {
  PolyBasis domain;
  PolyBasis codomain;
  Eigen::MatrixXd matrix;

  PolyVector apply(const PolyVector& v) const;
};

PolyOperator operator*(const PolyOperator& lhs, const PolyOperator& rhs);

/// One term  coeff * x^xa y^yb d_x^dx d_y^dy  of a differential operator with
/// polynomial coefficients; xa + yb must equal dx + dy to preserve degree.
struct DiffTerm {
  double coeff;
  int xa, yb, dx, dy;
};

/// Matrix of a sum of DiffTerms between two bases of the same degree.
PolyOperator differential_operator(const PolyBasis& domain, const PolyBasis& codomain,
                                   const std::vector<DiffTerm>& terms);

/// x d_y + y d_x on the full basis of degree 2n.
PolyOperator boost(int n);
/// (x d_y + y d_x)^2 restricted to even-even polynomials of degree 2n.
PolyOperator boost_squared(int n);
/// Eigenvalues of boost_squared(n), ascending. The operator is symmetric for
/// the Bombieri weighting, so a diagonal similarity makes it self-adjoint.
Eigen::VectorXd boost_squared_spectrum(int n);

/// q_k = (x+y)^(n+k) (x-y)^(n-k) + (x+y)^(n-k) (x-y)^(n+k), k = 0..n, in the
/// even-even basis; eigenvectors of boost_squared with eigenvalue (2k)^2.
std::vector<PolyVector> eigenbasis_q(int n);

/// (A^2 x^2 + A^-2 y^2) Laplacian on even-even polynomials. A > 0.
PolyOperator op_EA(int n, double A);
/// A x d_x - A^-1 y d_y (diagonal). A > 0.
PolyOperator op_SA(int n, double A);
/// Diagonal: x^j y^k -> (A^2 + 1)^(j/2) (A^-2 + 1)^(k/2) x^j y^k. A > 0.
PolyOperator op_U(int n, double A);
Eigen::VectorXd u_eigenvalues(const PolyBasis& basis, double A);
/// A x d_y + A^-1 y d_x on the full basis.
PolyOperator twisted_boost(int n, double A);

/// Max-abs entry of U^-1 (A x d_y + A^-1 y d_x) U - (x d_y + y d_x) on the
/// full basis of degree 2n.
double conjugation_identity_residual(int n, double A);

/// nu_0..nu_n of Dtilde = sum_j nu_j d_x^(2j) d_y^(2n-2j) with
/// Dtilde(q_k) = 0 for k < n and Dtilde(q_n) = 1.
std::vector<double> dtilde_coefficients(int n);
/// nu_j A^(2n-2j) / (1 + A^2)^n, the weights of D for the same derivatives.
std::vector<double> d_operator_weights(int n, double A);

/// Value at the origin of sum_j w_j d_x^(2j) d_y^(2n-2j) applied to poly.
double apply_derivative_functional(const std::vector<double>& weights, const PolyVector& poly);
double apply_dtilde(int n, const PolyVector& poly);
/// D(poly); for poly = U(A) Q this is the q_n coordinate of Q.
double apply_d_operator(int n, double A, const PolyVector& poly);

/// Coordinates of even-even polynomials in the q eigenbasis, through the
/// Bombieri inner product <x^j y^k, x^j y^k> = 1 / binom(2n, j), for which the
/// q_k are orthogonal.
class QBasis {
 public:
  explicit QBasis(int n);

  int n() const noexcept { return n_; }
  const PolyBasis& basis() const noexcept { return basis_; }
  const std::vector<PolyVector>& vectors() const noexcept { return q_; }
  /// Coordinates f_0..f_n with p = sum_k f_k q_k.
  Eigen::VectorXd coordinates(const Eigen::VectorXd& p) const;
  Eigen::VectorXd combine(const Eigen::VectorXd& f) const;

 private:
  int n_;
  PolyBasis basis_;
  std::vector<PolyVector> q_;
  Eigen::VectorXd weights_;  // Bombieri weights on the even-even basis
  Eigen::VectorXd norms_;    // <q_k, q_k>
};

double factorial(int k);
double binomial(int n, int k);

/// Homogeneous polynomial c_j x^j y^(degree - j), stored by x-exponent j.
struct Homogeneous {
  int degree = 0;
  Eigen::VectorXd c;  // size degree + 1 (empty for the zero polynomial of negative degree)

  static Homogeneous zero(int degree);
  static Homogeneous from_vector(const PolyVector& v);
  PolyVector to_vector(const PolyBasis& basis) const;

  Homogeneous dx() const;
  Homogeneous dy() const;
  Homogeneous laplacian() const;
  Homogeneous& operator+=(const Homogeneous& o);
  Homogeneous& operator*=(double s);
};

Homogeneous operator*(const Homogeneous& a, const Homogeneous& b);

}  // namespace gjl
