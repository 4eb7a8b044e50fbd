#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "vmproj/stepper.hpp"
#include "vmproj/studies.hpp"

using namespace vmproj;

namespace {

const double kRt2 = std::sqrt(2.0);

ProblemSpec pointwise(double dt, int steps) {
  ProblemSpec s;
  s.mode = Mode::Pointwise;
  s.finalTime = dt * steps;
  s.steps = steps;
  s.source = catalog::constantTensor(SymMatd::diag(1, -1));
  s.yield = catalog::constantScalar(1.0);
  return s;
}

ProblemSpec smallFem(int steps, double g = 1.0) {
  ProblemSpec s;
  s.mesh.nx = 4;
  s.mesh.ny = 4;
  s.steps = steps;
  s.force = catalog::constantVector(Eigen::Vector2d(0.0, -3.0));
  s.yield = catalog::constantScalar(g);
  return s;
}

SchemeState pointState(const SymMatd& sigma) {
  SchemeState s;
  s.stress = StressField::uniform(1, sigma);
  s.trialStress = s.stress;
  return s;
}

}  // namespace

TEST_CASE("time averages") {
  CHECK(timeAverage(catalog::constantScalar(2.5), 3, 0.1, 1, Point::Zero()) == 2.5);
  const ScalarFn lin = catalog::linearScalar(0.0, 1.0);
  CHECK(timeAverage(lin, 1, 0.2, 1, Point::Zero()) == doctest::Approx(0.1));
  CHECK(timeAverage(lin, 2, 0.2, 4, Point::Zero()) == doctest::Approx(0.3));

  ProblemSpec s = pointwise(0.5, 4);
  s.yield = catalog::linearScalar(1.0, 2.0);
  const Stepper st(s, Scheme::Projection);
  CHECK(st.data(3).yield[0] == doctest::Approx(4.0));  // g(t_n), not an average
}

TEST_CASE("pointwise projection steps") {
  const Stepper st(pointwise(0.1, 10), Scheme::Projection);
  SchemeState s = st.step(pointState(SymMatd::zero(2)));
  CHECK(frobNorm(s.trialStress.at(0) - SymMatd::diag(0.1, -0.1)) < 1e-15);
  CHECK(s.stress.at(0) == s.trialStress.at(0));

  SchemeState prev = pointState(SymMatd::diag(0.7, -0.7));
  prev.step = 4;
  s = st.step(prev);
  CHECK(frobNorm(s.trialStress.at(0) - SymMatd::diag(0.8, -0.8)) < 1e-15);
  CHECK(frobNorm(s.stress.at(0) - SymMatd::diag(1 / kRt2, -1 / kRt2)) < 1e-15);
  CHECK(s.step == 5);
  CHECK(s.time == doctest::Approx(0.5));
}

TEST_CASE("rest state is a fixed point") {
  ProblemSpec s = smallFem(3);
  s.force = nullptr;
  for (Scheme scheme : {Scheme::Projection, Scheme::Implicit, Scheme::Explicit}) {
    const Trajectory t = run(s, scheme);
    for (const auto& st : t.states()) {
      CHECK(st.velocity.norm() == 0.0);
      CHECK(st.stress.raw().norm() == 0.0);
    }
    if (scheme == Scheme::Implicit) CHECK(t[1].fixedPointIterations == 1);
  }
}

TEST_CASE("run length and single step") {
  ProblemSpec s = smallFem(1);
  const Trajectory t = run(s, Scheme::Projection);
  REQUIRE(t.states().size() == 2);
  const Stepper st(s, Scheme::Projection);
  const SchemeState one = st.step(st.initialState());
  CHECK((one.velocity - t[1].velocity).norm() == 0.0);
}

TEST_CASE("per-step feasibility of the projection scheme") {
  ProblemSpec s = smallFem(40);
  s.shift = catalog::radialDeviatoric(0.3, SymMatd::make2(1, 0.5, -1));
  s.yield = catalog::gaussianBumpScalar(0.5, 0.5, Point(0.5, 0.5), 0.3);
  const Stepper st(s, Scheme::Projection);
  SchemeState state = st.initialState();
  bool sawActive = false;
  for (int n = 1; n <= s.steps; ++n) {
    state = st.step(state);
    const StepData d = st.data(n);
    for (int e = 0; e < state.stress.size(); ++e) {
      CHECK(isAdmissible(state.stress.at(e), d.shift.at(e), d.yield[e], kFeasibilityTol * std::max(1.0, d.yield[e])));
      sawActive = sawActive || !isAdmissible(state.trialStress.at(e), d.shift.at(e), d.yield[e]);
    }
  }
  CHECK(sawActive);
}

TEST_CASE("step variational inequality against random witnesses") {
  const ProblemSpec s = smallFem(20);
  const Stepper st(s, Scheme::Projection);
  const auto space = st.space();
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;
  SchemeState prev = st.initialState();
  double worst = -1.0;
  for (int n = 1; n <= s.steps; ++n) {
    const SchemeState next = st.step(prev);
    const StepData d = st.data(n);
    const StressField strain = strainOf(space->mesh(), next.velocity);
    for (int w = 0; w < 20; ++w) {
      StressField tau(next.stress.size());
      for (int e = 0; e < tau.size(); ++e) {
        SymMatd dev = deviator(SymMatd::make2(gauss(rng), gauss(rng), gauss(rng)));
        dev = (d.yield[e] * unit(rng) / frobNorm(dev)) * dev;
        tau.set(e, dev + (3 * gauss(rng)) * SymMatd::identity(2) - d.shift.at(e));
      }
      const StressField lhs = (1.0 / s.dt()) * (next.stress - prev.stress) - strain - d.source;
      worst = std::max(worst, space->innerH(lhs, next.stress - tau));
    }
    prev = next;
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("implicit scheme") {
  SUBCASE("coincides with projection when the constraint is inactive") {
    const ProblemSpec s = smallFem(10, 1e6);
    const Trajectory p = run(s, Scheme::Projection);
    const Trajectory i = run(s, Scheme::Implicit);
    const auto space = p.space();
    for (int n = 0; n <= s.steps; ++n) CHECK(space->normH(p[n].stress - i[n].stress) <= 1e-9);
    CHECK(i.flaggedSteps().empty());
  }
  SUBCASE("converges and satisfies the implicit fixed point") {
    const ProblemSpec s = smallFem(20);
    const Trajectory i = run(s, Scheme::Implicit);
    CHECK(i.flaggedSteps().empty());
    // sigma_n = P(sigma_{n-1} + dt (E(v_n) + h_n)) with v_n from the nu-only momentum
    const Stepper st(s, Scheme::Implicit);
    const auto space = i.space();
    for (int n = 1; n <= s.steps; ++n) {
      const StepData d = st.data(n);
      const StressField trial = i[n - 1].stress + s.dt() * strainOf(space->mesh(), i[n].velocity);
      double diff = 0.0;
      for (int e = 0; e < trial.size(); ++e)
        diff = std::max(diff, frobNorm(projectConstraint(trial.at(e), d.shift.at(e), d.yield[e]) - i[n].stress.at(e)));
      CHECK(diff <= 1e-8);
    }
  }
  SUBCASE("iteration cap is flagged, not thrown") {
    StepperOptions opts;
    opts.fixedPointMaxIterations = 1;
    opts.fixedPointTolerance = 1e-300;
    const Trajectory i = run(smallFem(5), Scheme::Implicit, opts);
    CHECK(i.flaggedSteps().size() == 5);
    CHECK(i[3].fixedPointIterations == 1);
  }
  SUBCASE("pointwise radial loading agrees with the projection scheme") {
    const ProblemSpec s = pointwise(1e-3, 2000);
    const auto exact = [](double t) { return std::min(t, 1 / kRt2) * SymMatd::diag(1, -1); };
    CHECK(gridError(s, Scheme::Implicit, {}, exact) <= 1e-12);
    CHECK(gridError(s, Scheme::Projection, {}, exact) <= 1e-12);
  }
}

TEST_CASE("explicit scheme tracks the projection scheme for small steps") {
  ProblemSpec s = smallFem(10, 1e6);
  s.viscosity = 5.0;
  double prevGap = 0.0;
  for (int steps : {20, 40, 80}) {
    s.steps = steps;
    s.finalTime = 0.2;
    const Trajectory p = run(s, Scheme::Projection);
    const Trajectory e = run(s, Scheme::Explicit);
    double gap = 0.0;
    for (int n = 0; n <= steps; ++n) gap = std::max(gap, p.space()->normH(p[n].velocity - e[n].velocity));
    if (prevGap > 0.0) CHECK(gap < 0.6 * prevGap);
    prevGap = gap;
  }
}

TEST_CASE("interpolants") {
  const Trajectory t = run(smallFem(4), Scheme::Projection);
  const double dt = t.dt();
  for (int k = 0; k <= 4; ++k) {
    CHECK((velocityAt(t, k * dt, Interp::Hat) - t[k].velocity).norm() == 0.0);
    CHECK(stressAt(t, k * dt, Interp::Hat).raw() == t[k].stress.raw());
  }
  const Vector mid = velocityAt(t, 1.5 * dt, Interp::Hat);
  CHECK((mid - 0.5 * (t[1].velocity + t[2].velocity)).norm() < 1e-15);
  CHECK(stressAt(t, 2 * dt, Interp::Bar).raw() == t[2].stress.raw());
  CHECK(stressAt(t, 2 * dt - 1e-9, Interp::Bar).raw() == t[2].stress.raw());
  CHECK(stressAt(t, 2 * dt + 1e-9, Interp::Bar).raw() == t[3].stress.raw());
  CHECK(stressAt(t, 2 * dt, Interp::Bar, StressKind::Trial).raw() == t[2].trialStress.raw());
  CHECK((velocityAt(t, 0.0, Interp::Bar) - t[1].velocity).norm() == 0.0);
  CHECK(velocityAt(t, 0.0, Interp::Hat).norm() == 0.0);
  CHECK_THROWS_AS(velocityAt(t, -0.1, Interp::Hat), std::out_of_range);
  CHECK_THROWS_AS(velocityAt(t, 1.1, Interp::Bar), std::out_of_range);
}

TEST_CASE("displacement and plastic strain") {
  SUBCASE("zero velocity") {
    ProblemSpec s = smallFem(3);
    s.force = nullptr;
    const Trajectory t = run(s, Scheme::Projection);
    const Vector u0 = Vector::Constant(t.space()->mesh().dofCount(), 0.25);
    const auto u = accumulateDisplacement(t, u0);
    for (const auto& un : u) CHECK((un - u0).norm() == 0.0);
    const auto ep = plasticStrain(t, u);
    for (const auto& e : ep) CHECK((e.raw() - ep[0].raw()).norm() == 0.0);
  }
  SUBCASE("constant velocity") {
    ProblemSpec s = smallFem(4);
    s.force = nullptr;
    s.mesh.gamma1 = BoundarySelector{.bottom = true};
    s.initialVelocity = [](const Point& x) { return Eigen::Vector2d(x.y(), 0.0); };
    Trajectory t = run(s, Scheme::Projection);
    const Vector c = t[0].velocity;
    for (auto& st : t.states()) st.velocity = c;
    const auto u = accumulateDisplacement(t, Vector::Zero(c.size()));
    for (int n = 0; n <= 4; ++n) CHECK((u[n] - (n * t.dt()) * c).norm() < 1e-15);
  }
  SUBCASE("elastic regime keeps the plastic strain") {
    const Trajectory t = run(smallFem(50, 1e6), Scheme::Projection);
    const auto u = accumulateDisplacement(t, Vector::Zero(t.space()->mesh().dofCount()));
    const auto ep = plasticStrain(t, u);
    double drift = 0.0;
    for (const auto& e : ep) drift = std::max(drift, (e.raw() - ep[0].raw()).cwiseAbs().maxCoeff());
    CHECK(drift < 1e-12);
  }
}

TEST_CASE("invalid data is rejected before stepping") {
  ProblemSpec s = smallFem(2);
  s.initialStress = [](const Point&) { return SymMatd::diag(2, 0); };
  CHECK_THROWS_AS(Stepper(s, Scheme::Projection).initialState(), std::invalid_argument);
  s = smallFem(2);
  s.yield = catalog::linearScalar(1.0, -1.0);
  s.finalTime = 2.0;
  const Stepper st(s, Scheme::Projection);
  CHECK_NOTHROW(st.data(0));
  CHECK_THROWS_AS(st.data(2), std::invalid_argument);
  s = smallFem(2);
  s.viscosity = 0.0;
  CHECK_THROWS_AS(Stepper(s, Scheme::Projection), std::invalid_argument);
}

TEST_CASE("solver failure carries the step index") {
  StepperOptions opts;
  opts.cg.maxIterations = 1;
  try {
    run(smallFem(3), Scheme::Projection, opts);
    FAIL("expected a StepError");
  } catch (const StepError& e) {
    CHECK(e.step() == 1);
  }
}
