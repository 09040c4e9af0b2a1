#pragma once

#include "gjl/timegrid.hpp"

#include <optional>
#include <string>
#include <utility>

namespace gjl {

/// Coefficients of the 2-jets a*x^2 + b*y^2 of the two boundary potentials at
/// the origin: (a0, b0) at t = 0 and (a1, b1) at t = 1.
struct SecondJetBoundary {
  double a0 = 0.0;
  double b0 = 0.0;
  double a1 = 0.0;
  double b1 = 0.0;
};

/// Point of the Lorentz-Poincare half-plane, metric (dX^2 - dZ^2) / Z^2.
struct HalfPlanePoint {
  double X = 0.0;
  double Z = 1.0;
};

enum class CausalClass { SpaceLike, TimeLike, LightLike, Stationary };

const char* to_string(CausalClass c) noexcept;

/// Z^2 - (X - lambda)^2 = c.
struct Hyperbola {
  double lambda = 0.0;
  double c = 0.0;
};

/// Solution of the 2-jet boundary-value problem
///   a'' = 4 a'^2 / (1 + 2a + 2b),   b'' = 4 b'^2 / (1 + 2a + 2b).
///
/// `a` and `b` are always reported in the caller's axes. For space-like paths
/// the slope function A is taken in the frame where it is positive: if
/// `swapped_axes` is set, b plays the role of a there, i.e.
/// b' / Z = eps * A and a' / Z = -eps / A.
struct SecondJetPath {
  SecondJetBoundary boundary;
  CausalClass causal_class = CausalClass::Stationary;
  double epsilon = 0.0;
  CoefficientSeries a;
  CoefficientSeries b;
  std::optional<CoefficientSeries> A;
  CoefficientSeries sigma1;
  double sigma2 = 0.0;
  bool swapped_axes = false;
  std::optional<Hyperbola> hyperbola;

  /// Z = 1 + 2a + 2b.
  CoefficientSeries volume() const;
  /// a and b in the frame where A > 0.
  const CoefficientSeries& frame_a() const { return swapped_axes ? b : a; }
  const CoefficientSeries& frame_b() const { return swapped_axes ? a : b; }
};

/// Tolerance used for causal-class ties and endpoint identity.
inline constexpr double kClassifyTolerance = 1e-12;

/// Throws InvalidArgument naming the violated endpoint inequality
/// a_i + b_i + 1/2 > 0.
void validate(const SecondJetBoundary& boundary);

std::pair<HalfPlanePoint, HalfPlanePoint> to_halfplane(const SecondJetBoundary& boundary);

/// Z0 + Z1 > |X1 - X0|.
bool connectable(const HalfPlanePoint& p0, const HalfPlanePoint& p1);

/// Throws Domain when the points cannot be joined.
CausalClass classify(const HalfPlanePoint& p0, const HalfPlanePoint& p1);

/// Lorentzian distance of a space-like pair; the result lies in (0, pi).
/// cos D = (Z0^2 + Z1^2 - (X0 - X1)^2) / (2 Z0 Z1).
double distance(const HalfPlanePoint& p0, const HalfPlanePoint& p1);

/// eps = D / 4, in (0, pi/4). Throws Domain for non-space-like data.
double epsilon_from_boundary(const SecondJetBoundary& boundary);

/// Closed form for space-like and light-like paths, the vertical line for
/// X0 == X1, and Newton shooting on the ODE for general time-like arcs.
/// Throws InvalidArgument (bad endpoints), Domain (not connectable) or
/// Numeric (shooting failure, loss of interior positivity).
SecondJetPath solve_bvp(const SecondJetBoundary& boundary, const GridPtr& grid);

/// max_i |a'' - 4a'^2/Z| + |b'' - 4b'^2/Z| with spectral derivatives.
double ode_residual(const CoefficientSeries& a, const CoefficientSeries& b);
double ode_residual(const SecondJetPath& path);

/// Nodewise a'b' / (1 + 2a + 2b)^2 and (a' + b') / (1 + 2a + 2b).
CoefficientSeries sigma2_series(const CoefficientSeries& a, const CoefficientSeries& b);
CoefficientSeries sigma1_series(const CoefficientSeries& a, const CoefficientSeries& b);

}  // namespace gjl
