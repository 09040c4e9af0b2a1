#pragma once

#include "gjl/counterexample.hpp"
#include "gjl/second_jet.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace gjl {

struct GeodesicConfig {
  int nt = 33;
  int nx = 48;
  int ny = 48;
  std::vector<double> delta_schedule{1e-1, 1e-2, 1e-3};
  int max_iterations = 40;
};

/// Center-line 2-jets after one continuation stage.
struct StageRecord {
  double delta = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> a;
  std::vector<double> b;
};

/// Solution of  Phi_tt (1 + Lap Phi) - |grad Phi_t|^2 = delta  on
/// [0,1] x [-pi,pi)^2 with Phi(0) = 0 and Phi(1) = phi1.
struct GridSolution {
  int nt = 0, nx = 0, ny = 0;
  double delta = 0.0;
  /// phi[(k * nx + i) * ny + j] at t = k/(nt-1), x = -pi + 2 pi i/nx, y likewise.
  std::vector<double> phi;
  double residual_norm = 0.0;
  std::vector<StageRecord> stages;

  double at(int k, int i, int j) const { return phi[(static_cast<size_t>(k) * nx + i) * ny + j]; }
  double t(int k) const { return static_cast<double>(k) / (nt - 1); }
};

/// Damped Newton with second-order central differences, continued over the
/// delta schedule from Phi = t phi1. Evenness in x and y is built into the
/// unknowns. Throws InvalidArgument on bad sizes or schedules and Numeric on
/// divergence or loss of 1 + Lap Phi > 0.
GridSolution solve_geodesic(const TorusPotential& phi1, const GeodesicConfig& config);

/// a(t_k) = Phi_xx(t_k, 0, 0) / 2 and b(t_k) = Phi_yy / 2 by fourth-order
/// central differences.
struct ExtractedJets {
  std::vector<double> t, a, b;
};
ExtractedJets extract_second_jets(const GridSolution& sol);

struct CrosscheckReport {
  std::vector<double> t;
  std::vector<double> a, b;
  /// sigma2 at interior time nodes (centered differences in t).
  std::vector<double> sigma2_t;
  std::vector<double> sigma2;
  double sigma2_mean = 0.0;
  /// (max - min) / |mean|; zero for identically zero data.
  double sigma2_spread = 0.0;
  double epsilon_pde = 0.0;
  double epsilon_reference = 0.0;
  /// |epsilon_pde - epsilon_reference| / epsilon_reference (0 if both vanish).
  double epsilon_deviation = 0.0;
  /// sigma2 spread after each continuation stage.
  std::vector<double> stage_spreads;
};

CrosscheckReport crosscheck_report(const GridSolution& sol, const SecondJetPath& reference);

/// Writes every time slice as CSV rows k,t,i,j,x,y,phi after a commented
/// metadata header.
void write_slices_csv(const GridSolution& sol, std::ostream& out);

}  // namespace gjl
