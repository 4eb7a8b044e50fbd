#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "vmproj/norms.hpp"

using namespace vmproj;

namespace {

ProblemSpec fem(int steps, int n = 4) {
  ProblemSpec s;
  s.mesh.nx = n;
  s.mesh.ny = n;
  s.steps = steps;
  s.force = catalog::constantVector(Eigen::Vector2d(0.0, -3.0));
  s.yield = catalog::constantScalar(1.0);
  return s;
}

}  // namespace

TEST_CASE("constant trajectory") {
  Trajectory t = run(fem(3), Scheme::Projection);
  for (auto& s : t.states()) {
    s.velocity = t[0].velocity;
    s.stress = StressField::uniform(s.stress.size(), SymMatd::diag(0.2, -0.2));
    s.trialStress = s.stress;
  }
  const NormReport r = discreteNorms(t);
  CHECK(r.gapV == 0.0);
  CHECK(r.gapSigma == 0.0);
  CHECK(r.dualNormDv == 0.0);
  CHECK(r.h1HSigmaHat == doctest::Approx(std::sqrt(0.08)));
  CHECK(r.linfHSigma == doctest::Approx(std::sqrt(0.08)));
}

TEST_CASE("single step velocity gap") {
  Trajectory t = run(fem(1), Scheme::Projection);
  const auto space = t.space();
  t.states()[1].velocity /= space->normH(t[1].velocity);
  const NormReport r = discreteNorms(t);
  CHECK(r.gapV == doctest::Approx(1.0 / 3.0));
  CHECK(r.linfHVbar == doctest::Approx(1.0));
  CHECK(r.gapVL2() == doctest::Approx(std::sqrt(1.0 / 3.0)));
}

TEST_CASE("homogeneity") {
  Trajectory t = run(fem(5), Scheme::Projection);
  const NormReport a = discreteNorms(t);
  for (auto& s : t.states()) {
    s.velocity *= 2.0;
    s.stress *= 2.0;
    s.trialStress *= 2.0;
  }
  const NormReport b = discreteNorms(t);
  CHECK(b.linfHVbar == doctest::Approx(2 * a.linfHVbar));
  CHECK(b.l2VVbar == doctest::Approx(2 * a.l2VVbar));
  CHECK(b.dualNormDv == doctest::Approx(2 * a.dualNormDv));
  CHECK(b.linfHSigma == doctest::Approx(2 * a.linfHSigma));
  CHECK(b.linfHSigmaStar == doctest::Approx(2 * a.linfHSigmaStar));
  CHECK(b.h1HSigmaHat == doctest::Approx(2 * a.h1HSigmaHat));
  CHECK(b.gapV == doctest::Approx(4 * a.gapV));
  CHECK(b.gapSigma == doctest::Approx(4 * a.gapSigma));
  CHECK(a.allFinite());
}

TEST_CASE("korn constant") {
  const FemSpace coarse(buildRectMesh(2, 2, 1, 1, BoundarySelector{.left = true}));
  const double c = kornConstant(coarse);
  CHECK(c > 1.0);
  CHECK(std::isfinite(c));
  // the constant bounds |phi|_V / |E(phi)|_H for any admissible phi
  const Mesh2D& m = coarse.mesh();
  const Vector v = interpolateVelocity(m, [](const Point& x) { return Eigen::Vector2d(x.y() * x.y(), -x.x()); });
  CHECK(coarse.normV(v) <= c * coarse.normH(strainOf(m, v)) * (1 + 1e-12));
}

TEST_CASE("energy inequality on the cantilever") {
  const Trajectory t = run(fem(20), Scheme::Projection);
  const Stepper st(fem(20), Scheme::Projection);
  const EnergyCheck e = energyInequality(t, st, kornConstant(*t.space()));
  CHECK(e.holds());
  CHECK(e.lhs.size() == 21);
  CHECK(e.maxRatio() > 0.0);
  CHECK(e.maxRatio() <= 1.0);

  ProblemSpec coarse = fem(1);
  coarse.finalTime = 2.0;
  const Trajectory tc = run(coarse, Scheme::Projection);
  CHECK_THROWS_AS(energyInequality(tc, Stepper(coarse, Scheme::Projection), 1.0), std::invalid_argument);
}

TEST_CASE("pointwise trajectories are rejected") {
  ProblemSpec s;
  s.mode = Mode::Pointwise;
  s.steps = 2;
  s.yield = catalog::constantScalar(1.0);
  CHECK_THROWS_AS(discreteNorms(run(s, Scheme::Projection)), std::invalid_argument);
}
