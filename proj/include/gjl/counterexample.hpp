#pragma once

#include "gjl/jet_propagation.hpp"
#include "gjl/timegrid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gjl {

/// coeff * sin^px(x) * sin^py(y); both powers even.
struct TrigTerm {
  double coeff = 0.0;
  int sin_x_power = 0;
  int sin_y_power = 0;
};

struct FamilyInfo {
  int n = 0;
  std::optional<int> kappa;
  std::optional<double> chi;
};

/// Even trigonometric potential on the torus, zero at the origin.
struct TorusPotential {
  std::vector<TrigTerm> terms;
  std::optional<FamilyInfo> family;

  double value(double x, double y) const;
};

/// Validates the terms (finite coefficients, even powers, no constant term).
TorusPotential make_potential(std::vector<TrigTerm> terms);

/// (1/2) sin(pi / 2n) (sin^2 x - sin^2 y); n >= 3.
TorusPotential build_h(int n);
/// build_h(n) + chi sin^(2n-2kappa) x sin^(2kappa) y; 0 <= kappa <= n, chi != 0.
TorusPotential build_h_tilde(int n, int kappa, double chi);

/// Monomial Taylor coefficients at the origin for degrees 2..order (even).
/// Series of powers of sin are formed in exact rational arithmetic.
JetData jets_at_origin(const TorusPotential& potential, int order);

/// Exact Taylor coefficients of sin^p(u) up to u^max_degree, as "num/den" strings,
/// indexed by the exponent.
std::vector<std::string> sin_power_series(int p, int max_degree);

/// Grid estimate of max_{|alpha| <= B} sup |d^alpha f| on a samples x samples
/// uniform torus grid, derivatives taken exactly on the cosine expansion.
double cb_norm_report(const TorusPotential& potential, int B, int samples = 256);

struct ObstructionDemo {
  int n = 0;
  double epsilon = 0.0;
  double epsilon_expected = 0.0;
  bool epsilon_ok = false;
  int resonant_order = 0;
  ObstructionReport h_report;
  ObstructionReport h_tilde_report;
  /// Weights on D_x^(2n-2i) D_y^(2i) h at the resonant order.
  std::vector<double> v;
  int kappa = 0;
  double chi = 0.0;
  double v_kappa = 0.0;
  double lhs_difference = 0.0;
  double predicted_difference = 0.0;
  /// max |difference| of u, v and K between the two runs.
  double shared_data_gap = 0.0;
  std::string conclusion;
};

/// Runs the contradiction argument for 0 -> h_n and 0 -> h~_n with chi = e^-n.
ObstructionDemo obstruction_demo(int n, const GridPtr& grid);

}  // namespace gjl
