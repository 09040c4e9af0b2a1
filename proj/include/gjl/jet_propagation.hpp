#pragma once

#include "gjl/poly_ops.hpp"
#include "gjl/second_jet.hpp"
#include "gjl/timegrid.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gjl {

/// Taylor coefficients of a potential at the origin, keyed by total degree.
/// Each vector lists monomial coefficients by descending x-exponent, either
/// even-even only (length d/2 + 1) or all monomials (length d + 1). Missing
/// degrees are zero; degree 0 is ignored.
using JetData = std::map<int, Eigen::VectorXd>;

/// Central-fiber jets: the 2-jet path plus, for each even degree 2m >= 4, one
/// series per even-even monomial (descending x-exponent, caller's axes).
struct JetHierarchy {
  GridPtr grid;
  SecondJetPath path2;
  std::map<int, std::vector<CoefficientSeries>> orders;

  /// Highest stored degree (2 when only the 2-jet path is known).
  int max_order() const;
  /// Coefficient series of one degree; degree 2 yields {a, b}.
  std::vector<CoefficientSeries> at(int order) const;
};

/// f'' + lambda f = source on [0, 1], f(0) = f0, f(1) = f1.
struct ModeProblem {
  double lambda = 0.0;
  CoefficientSeries source;
  double f0 = 0.0;
  double f1 = 0.0;
};

struct ModeSolution {
  CoefficientSeries f;
  bool resonant = false;
  /// sqrt(lambda) = multiple * pi when resonant.
  int multiple = 0;
  /// f0 - (-1)^m f1 - int source sin(m pi t) / (m pi); zero when solvable.
  double compatibility_defect = 0.0;
  bool compatible = true;
  /// sqrt(lambda) within 1e-6 but not 1e-9 of a positive multiple of pi.
  bool near_resonant = false;
};

inline constexpr double kResonanceTolerance = 1e-9;
inline constexpr double kNearResonanceTolerance = 1e-6;
inline constexpr double kCompatibilityTolerance = 1e-8;

/// Variation of parameters with spectral cumulative integration. At resonance
/// the returned f is quadrature-orthogonal to sin(m pi t).
ModeSolution solve_mode(const ModeProblem& problem);

/// max_i |f'' + lambda f - source| at the nodes.
double mode_residual(const ModeProblem& problem, const CoefficientSeries& f);

/// Compatibility data at a resonant degree 2n, in raw-derivative form:
///   sum_i v_i D_x^(2n-2i) D_y^(2i) phi0(0) + sum_i u_i D_x^(2n-2i) D_y^(2i) phi1(0) = K.
struct ObstructionReport {
  int resonant_order = 0;
  int multiple = 1;
  std::vector<double> u;
  std::vector<double> v;
  double K = 0.0;
  double lhs = 0.0;
  double residual = 0.0;
  bool satisfied = false;
};

struct PropagationResult {
  /// All degrees below the resonant one when an obstruction was hit.
  JetHierarchy hierarchy;
  std::optional<ObstructionReport> obstruction;
  /// Some degree 2m with 4 eps m > pi was solved before any resonance.
  bool beyond_proven_range = false;
  std::vector<std::string> warnings;
};

/// Degree-2n part of -(Lap L) L'' + |grad L'|^2 where L collects all stored
/// degrees below 2n. Throws InvalidState if one of them is missing.
std::vector<CoefficientSeries> bilinear_source(const JetHierarchy& lower, int target_order);
/// bilinear_source divided by 1 + 2a + 2b.
std::vector<CoefficientSeries> source_K1(const JetHierarchy& lower, int target_order);

/// Space-like 2-jets use the U-frame mode solver; stationary ones (equal
/// 2-jets at both ends) reduce to Z P'' = K1 per coefficient. Throws Domain
/// for time-like or light-like 2-jets, InvalidArgument on odd or
/// malformed jets or an odd/too small max_order.
PropagationResult propagate(const JetData& phi0, const JetData& phi1, int max_order, const GridPtr& grid);

/// Throws InvalidState unless 4 eps n is a multiple of pi for n = order / 2.
ObstructionReport compatibility_check(const JetData& phi0, const JetData& phi1, const JetHierarchy& lower,
                                      int order);

/// Max nodewise residual of
///   (1+2a+2b) P'' + (a'' x^2 + b'' y^2) Lap P - 4 (a' x, b' y) . grad P' - K1
/// for a stored degree, evaluated in the caller's axes without the U frame.
double order_residual(const JetHierarchy& hierarchy, int order);

/// Even-even coefficients of degree `order` from jet data (zeros if absent).
Eigen::VectorXd even_jet(const JetData& jets, int order);

}  // namespace gjl
