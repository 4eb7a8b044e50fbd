#include "vmproj/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace vmproj {

double NormReport::gapVL2() const { return std::sqrt(dt * gapV); }
double NormReport::gapSigmaL2() const { return std::sqrt(dt * gapSigma); }

bool NormReport::allFinite() const {
  for (double x : {dualNormDv, linfHVbar, l2VVbar, gapV, linfHSigmaStar, linfHSigma, gapSigma, h1HSigmaHat})
    if (!std::isfinite(x)) return false;
  return true;
}

NormReport discreteNorms(const Trajectory& traj) {
  const auto space = traj.space();
  if (!space) throw std::invalid_argument("discreteNorms: needs a finite-element trajectory");
  const FemSpace& fs = *space;
  const double dt = traj.dt();

  NormReport r;
  r.dt = dt;
  double dual2 = 0.0, v2 = 0.0, gapV2 = 0.0, gapS2 = 0.0, sigmaL2 = 0.0, sigmaDot2 = 0.0;
  for (int n = 1; n <= traj.steps(); ++n) {
    const SchemeState& prev = traj[n - 1];
    const SchemeState& cur = traj[n];
    const Vector dv = cur.velocity - prev.velocity;
    const double dvH2 = fs.innerH(dv, dv);

    const double dual = fs.dualNorm(fs.mass().storage() * dv / dt);
    dual2 += dt * dual * dual;
    r.linfHVbar = std::max(r.linfHVbar, fs.normH(cur.velocity));
    const double vV = fs.normV(cur.velocity);
    v2 += dt * vV * vV;
    // int over the interval of |v^ - v-bar|^2 = dt/3 |v_n - v_{n-1}|^2
    gapV2 += dt / 3.0 * dvH2;

    r.linfHSigmaStar = std::max(r.linfHSigmaStar, fs.normH(cur.trialStress));
    r.linfHSigma = std::max(r.linfHSigma, fs.normH(cur.stress));
    const double gap = fs.normH(cur.stress - cur.trialStress);
    gapS2 += dt * gap * gap;

    const double a2 = fs.innerH(prev.stress, prev.stress);
    const double ab = fs.innerH(prev.stress, cur.stress);
    const double b2 = fs.innerH(cur.stress, cur.stress);
    sigmaL2 += dt / 3.0 * (a2 + ab + b2);
    const double ds = fs.normH(cur.stress - prev.stress) / dt;
    sigmaDot2 += dt * ds * ds;
  }
  r.dualNormDv = std::sqrt(dual2);
  r.l2VVbar = std::sqrt(v2);
  r.gapV = gapV2 / dt;
  r.gapSigma = gapS2 / dt;
  r.h1HSigmaHat = std::sqrt(sigmaL2 + sigmaDot2);
  return r;
}

double kornConstant(const FemSpace& space) {
  const Mesh2D& mesh = space.mesh();
  std::vector<int> freeDofs;
  for (int dof = 0; dof < mesh.dofCount(); ++dof)
    if (!mesh.isConstrained(dof / 2)) freeDofs.push_back(dof);
  const int nf = static_cast<int>(freeDofs.size());
  if (nf == 0) return 1.0;

  const Eigen::MatrixXd h1 = space.mass().toDense() + space.gradientGram().toDense();
  const Eigen::MatrixXd k = space.stiffness().toDense();
  Eigen::MatrixXd a(nf, nf), b(nf, nf);
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j) {
      a(i, j) = h1(freeDofs[i], freeDofs[j]);
      b(i, j) = k(freeDofs[i], freeDofs[j]);
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, b, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("kornConstant: eigen solve failed");
  return std::sqrt(solver.eigenvalues().maxCoeff());
}

double EnergyCheck::maxRatio() const {
  double worst = 0.0;
  for (double l : lhs) {
    if (rhs > 0.0) worst = std::max(worst, l / rhs);
    else if (l > 0.0) return std::numeric_limits<double>::infinity();
  }
  return worst;
}

bool EnergyCheck::holds() const {
  for (double l : lhs)
    if (!(l <= rhs * (1.0 + 1e-12) + 1e-14)) return false;
  return true;
}

EnergyCheck energyInequality(const Trajectory& traj, const Stepper& stepper, double cK) {
  const auto space = traj.space();
  if (!space) throw std::invalid_argument("energyInequality: needs a finite-element trajectory");
  const FemSpace& fs = *space;
  const double dt = traj.dt();
  if (dt > 1.0) throw std::invalid_argument("energyInequality: the bound is stated for dt <= 1");
  const double nu = stepper.spec().viscosity;

  EnergyCheck check;
  check.kornConstant = cK;
  const double gronwall = std::exp(std::max(1.0, traj.finalTime() / (2.0 - dt)));
  check.c2 = gronwall * std::max({2.0 * cK * cK / nu, 2.0 / nu, 4.0});

  const auto sq = [&fs](const StressField& s) { return fs.innerH(s, s); };
  StepData prevData = stepper.data(0);
  double dataSum = 0.0;
  check.lhs.assign(traj.steps() + 1, 0.0);
  double running = 0.0;
  for (int n = 1; n <= traj.steps(); ++n) {
    const StepData d = stepper.data(n);
    const double fDual = fs.dualNorm(d.force);
    const StressField dp = (1.0 / dt) * (d.shift - prevData.shift);
    dataSum += dt * (fDual * fDual + sq(d.shift) + sq(dp) + sq(d.source));

    const SchemeState& prev = traj[n - 1];
    const SchemeState& cur = traj[n];
    const Vector dv = cur.velocity - prev.velocity;
    running += fs.innerH(dv, dv) + 0.5 * sq(cur.stress - cur.trialStress) +
               nu * dt * sq(strainOf(fs.mesh(), cur.velocity));
    check.lhs[n] = fs.innerH(cur.velocity, cur.velocity) + 0.5 * sq(cur.trialStress + d.shift) +
                   0.5 * sq(cur.stress + d.shift) + running;
    prevData = d;
  }
  const SchemeState& s0 = traj[0];
  const StepData d0 = stepper.data(0);
  check.rhs = check.c2 * (fs.innerH(s0.velocity, s0.velocity) + sq(s0.stress) + sq(d0.shift) + dataSum);
  return check;
}

}  // namespace vmproj
