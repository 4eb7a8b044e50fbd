#pragma once

#include <vector>

#include "vmproj/stepper.hpp"

namespace vmproj {

/// Discrete norms of a finite-element trajectory, bar/hat interpolants
/// integrated exactly on each time interval.
struct NormReport {
  double dualNormDv = 0.0;        ///< ||d v^/dt||_{L2(V*)}
  double linfHVbar = 0.0;         ///< ||v-bar||_{Linf(H)}
  double l2VVbar = 0.0;           ///< ||v-bar||_{L2(V)}
  double gapV = 0.0;              ///< (1/dt) ||v^ - v-bar||^2_{L2(H)}
  double linfHSigmaStar = 0.0;    ///< ||sigma*-bar||_{Linf(H)}
  double linfHSigma = 0.0;        ///< ||sigma-bar||_{Linf(H)}
  double gapSigma = 0.0;          ///< (1/dt) ||sigma-bar - sigma*-bar||^2_{L2(H)}
  double h1HSigmaHat = 0.0;       ///< ||sigma^||_{H1(H)}
  double dt = 0.0;

  /// ||v^ - v-bar||_{L2(H)}
  double gapVL2() const;
  /// ||sigma-bar - sigma*-bar||_{L2(H)}
  double gapSigmaL2() const;
  bool allFinite() const;
};

NormReport discreteNorms(const Trajectory& traj);

/// Largest ||phi||_V / ||E(phi)||_H over the discrete space with Gamma1
/// eliminated, from a dense generalised eigenproblem.
double kornConstant(const FemSpace& space);

/// Summed discrete energy inequality of the projection scheme, per m:
///   ||v_m||^2 + 1/2 ||sigma*_m + p_m||^2 + 1/2 ||sigma_m + p_m||^2
///   + sum_{n<=m} (||v_n - v_{n-1}||^2 + 1/2 ||sigma_n - sigma*_n||^2) + nu dt sum_{n<=m} ||E(v_n)||^2
///   <= c2 (||v_0||^2 + ||sigma_0||^2 + ||p_0||^2
///          + dt sum_{n=1}^N (||f_n||_{V*}^2 + ||p_n||^2 + ||D p_n||^2 + ||h_n||^2))
/// with c2 = G * max(2 cK^2 / nu, 2 / nu, 4) and Gronwall factor
/// G = exp(max(1, T / (2 - dt))), which is e for T <= 1. Requires dt <= 1.
struct EnergyCheck {
  std::vector<double> lhs;  ///< indexed by m = 1..N (entry 0 unused, zero)
  double rhs = 0.0;
  double c2 = 0.0;
  double kornConstant = 0.0;
  /// max_m lhs[m] / rhs (0 when rhs = 0 and lhs = 0).
  double maxRatio() const;
  bool holds() const;
};

EnergyCheck energyInequality(const Trajectory& traj, const Stepper& stepper, double kornConstant);

}  // namespace vmproj
