#include "vmproj/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vmproj {

std::string toString(Scheme s) {
  switch (s) {
    case Scheme::Projection: return "projection";
    case Scheme::Implicit: return "implicit";
    case Scheme::Explicit: return "explicit";
  }
  return "unknown";
}

StepError::StepError(int step, const std::string& what)
    : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}

namespace {

const Point kOrigin = Point::Zero();

std::shared_ptr<const FemSpace> makeSpace(const ProblemSpec& spec) {
  if (spec.mode != Mode::Fem) return nullptr;
  const auto& m = spec.mesh;
  return std::make_shared<const FemSpace>(buildRectMesh(m.nx, m.ny, m.lx, m.ly, m.gamma1));
}

SparseSym stepMatrix(const FemSpace& space, double dt, double stiffnessWeight) {
  return constrainMatrix(space.mesh(), space.mass().combined(1.0 / dt, space.stiffness(), stiffnessWeight));
}

double feasibilitySlack(double g) { return kFeasibilityTol * std::max(1.0, g); }

}  // namespace

Stepper::Stepper(ProblemSpec spec, Scheme scheme, StepperOptions options)
    : spec_(std::move(spec)), scheme_(scheme), options_(options) {
  spec_.validate();
  space_ = makeSpace(spec_);
  if (space_) {
    projectionMatrix_ = stepMatrix(*space_, spec_.dt(), spec_.viscosity + spec_.dt());
    plainMatrix_ = stepMatrix(*space_, spec_.dt(), spec_.viscosity);
  }
}

int Stepper::elementCount() const { return space_ ? space_->mesh().triangleCount() : 1; }

StepData Stepper::data(int n) const {
  const int ne = elementCount();
  const double dt = spec_.dt();
  const double tn = spec_.time(n);
  StepData d;
  d.source = StressField(ne);
  d.shift = StressField(ne);
  d.strainRate = StressField(ne);
  d.yield.assign(ne, 0.0);
  for (int e = 0; e < ne; ++e) {
    const Point x = space_ ? space_->mesh().centroid(e) : kOrigin;
    if (n >= 1 && spec_.source) d.source.set(e, timeAverage(spec_.source, n, dt, spec_.quadPoints, x));
    if (n >= 1 && spec_.strainRate && !space_)
      d.strainRate.set(e, timeAverage(spec_.strainRate, n, dt, spec_.quadPoints, x));
    if (spec_.shift) d.shift.set(e, spec_.shift(tn, x));
    if (spec_.yield) d.yield[e] = spec_.yield(tn, x);
    if (!(d.yield[e] >= 0.0)) {
      std::ostringstream msg;
      msg << "yield function is negative (" << d.yield[e] << ") at t = " << tn << ", element " << e;
      throw std::invalid_argument(msg.str());
    }
  }
  if (space_) {
    if (n >= 1 && spec_.force) {
      d.force = bodyLoad(space_->mesh(), [&](const Point& x) -> Eigen::Vector2d {
        return timeAverage(spec_.force, n, dt, spec_.quadPoints, x);
      });
    } else {
      d.force = Vector::Zero(space_->mesh().dofCount());
    }
  }
  return d;
}

SchemeState Stepper::initialState() const {
  const int ne = elementCount();
  const StepData d0 = data(0);
  SchemeState s;
  s.stress = StressField(ne);
  for (int e = 0; e < ne; ++e) {
    const Point x = space_ ? space_->mesh().centroid(e) : kOrigin;
    if (spec_.initialStress) s.stress.set(e, spec_.initialStress(x));
    if (!isAdmissible(s.stress.at(e), d0.shift.at(e), d0.yield[e], feasibilitySlack(d0.yield[e]))) {
      std::ostringstream msg;
      msg << "initial stress violates the yield condition at element " << e;
      throw std::invalid_argument(msg.str());
    }
  }
  s.trialStress = s.stress;
  if (space_) {
    s.velocity = spec_.initialVelocity ? interpolateVelocity(space_->mesh(), spec_.initialVelocity)
                                       : Vector::Zero(space_->mesh().dofCount());
  }
  return s;
}

Vector Stepper::solveMomentum(const SparseSym& matrix, const Vector& rhs, const Vector& guess, int step,
                              int& iterations) const {
  CgResult sol = cgSolve(matrix, rhs, options_.cg, guess);
  iterations += sol.iterations;
  if (!sol.converged) {
    std::ostringstream msg;
    msg << "conjugate gradients did not converge (residual " << sol.residual << " after " << sol.iterations
        << " iterations)";
    throw StepError(step, msg.str());
  }
  return std::move(sol.x);
}

StressField Stepper::project(const StressField& trial, const StepData& d, int step) const {
  StressField out(trial.size());
  for (int e = 0; e < trial.size(); ++e) {
    const SymMatd s = projectConstraint(trial.at(e), d.shift.at(e), d.yield[e]);
    if (!std::isfinite(s(0, 0)) || !std::isfinite(s(0, 1)) || !std::isfinite(s(1, 1)))
      throw StepError(step, "non-finite stress");
    out.set(e, s);
  }
  return out;
}

SchemeState Stepper::stepPointwise(const SchemeState& previous, const StepData& d) const {
  // No momentum equation: every scheme reduces to the catch-up projection.
  SchemeState next;
  next.step = previous.step + 1;
  next.time = spec_.time(next.step);
  next.trialStress = previous.stress + spec_.dt() * (d.strainRate + d.source);
  next.stress = project(next.trialStress, d, next.step);
  next.fixedPointIterations = scheme_ == Scheme::Implicit ? 1 : 0;
  return next;
}

SchemeState Stepper::step(const SchemeState& previous) const {
  const int n = previous.step + 1;
  if (n > spec_.steps) throw StepError(n, "past the final time");
  const StepData d = data(n);
  if (!space_) return stepPointwise(previous, d);

  const Mesh2D& mesh = space_->mesh();
  const double dt = spec_.dt();
  const Vector inertia = space_->mass().storage() * previous.velocity / dt + d.force;

  SchemeState next;
  next.step = n;
  next.time = spec_.time(n);

  const auto momentum = [&](const SparseSym& matrix, const StressField& stressTerm) {
    Vector rhs = inertia - stressLoad(mesh, stressTerm);
    zeroConstrained(mesh, rhs);
    return solveMomentum(matrix, rhs, previous.velocity, n, next.cgIterations);
  };
  const auto trialFrom = [&](const Vector& v) { return previous.stress + dt * (strainOf(mesh, v) + d.source); };

  switch (scheme_) {
    case Scheme::Projection:
    case Scheme::Implicit:
      // sigma*_n = sigma_{n-1} + dt (E(v_n) + h_n) substituted into the momentum equation
      next.velocity = momentum(projectionMatrix_, previous.stress + dt * d.source);
      break;
    case Scheme::Explicit:
      next.velocity = momentum(plainMatrix_, previous.stress);
      break;
  }
  next.trialStress = trialFrom(next.velocity);
  next.stress = project(next.trialStress, d, n);
  if (scheme_ != Scheme::Implicit) return next;

  next.fixedPointConverged = false;
  StressField iterate = next.stress;
  for (int k = 1; k <= options_.fixedPointMaxIterations; ++k) {
    next.velocity = momentum(plainMatrix_, iterate);
    next.trialStress = trialFrom(next.velocity);
    next.stress = project(next.trialStress, d, n);
    next.fixedPointIterations = k;
    const double change = space_->normH(next.stress - iterate);
    iterate = next.stress;
    if (change <= options_.fixedPointTolerance) {
      next.fixedPointConverged = true;
      break;
    }
  }
  return next;
}

std::vector<int> Trajectory::flaggedSteps() const {
  std::vector<int> out;
  for (const auto& s : states_)
    if (!s.fixedPointConverged) out.push_back(s.step);
  return out;
}

void run(const ProblemSpec& spec, Scheme scheme, const StepperOptions& options, const StepObserver& observer) {
  const Stepper stepper(spec, scheme, options);
  SchemeState state = stepper.initialState();
  observer(state);
  for (int n = 1; n <= spec.steps; ++n) {
    state = stepper.step(state);
    observer(state);
  }
}

Trajectory run(const ProblemSpec& spec, Scheme scheme, const StepperOptions& options) {
  const Stepper stepper(spec, scheme, options);
  Trajectory traj(spec.finalTime, spec.steps, stepper.space());
  traj.states().reserve(spec.steps + 1);
  traj.states().push_back(stepper.initialState());
  for (int n = 1; n <= spec.steps; ++n) traj.states().push_back(stepper.step(traj.states().back()));
  return traj;
}

namespace {

struct Bracket {
  int k;        // right endpoint index, 1..N
  double frac;  // position within [t_{k-1}, t_k]
};

Bracket locate(const Trajectory& traj, double t) {
  if (!(t >= 0.0) || !(t <= traj.finalTime()))
    throw std::out_of_range("interpolant: time outside [0, T]");
  const double dt = traj.dt();
  int k = static_cast<int>(std::ceil(t / dt - 1e-12));
  k = std::clamp(k, 1, traj.steps());
  double frac = std::clamp(t / dt - (k - 1), 0.0, 1.0);
  // snap to grid nodes so that hat(t_k) reproduces x_k exactly
  if (frac > 1.0 - 1e-12) frac = 1.0;
  if (frac < 1e-12) frac = 0.0;
  return {k, frac};
}

}  // namespace

Vector velocityAt(const Trajectory& traj, double t, Interp kind) {
  const Bracket b = locate(traj, t);
  const Vector& right = traj[b.k].velocity;
  if (kind == Interp::Bar) return right;
  if (b.frac == 1.0) return right;
  const Vector& left = traj[b.k - 1].velocity;
  return left + b.frac * (right - left);
}

StressField stressAt(const Trajectory& traj, double t, Interp kind, StressKind which) {
  const Bracket b = locate(traj, t);
  const auto pick = [which](const SchemeState& s) -> const StressField& {
    return which == StressKind::Stress ? s.stress : s.trialStress;
  };
  const StressField& right = pick(traj[b.k]);
  if (kind == Interp::Bar || b.frac == 1.0) return right;
  const StressField& left = pick(traj[b.k - 1]);
  return left + b.frac * (right - left);
}

std::vector<Vector> accumulateDisplacement(const Trajectory& traj, const Vector& u0) {
  std::vector<Vector> u;
  u.reserve(traj.states().size());
  u.push_back(u0);
  for (int n = 1; n <= traj.steps(); ++n) u.push_back(u.back() + traj.dt() * traj[n].velocity);
  return u;
}

std::vector<StressField> plasticStrain(const Trajectory& traj, const std::vector<Vector>& displacement) {
  if (!traj.space()) throw std::invalid_argument("plasticStrain: needs a finite-element trajectory");
  if (displacement.size() != traj.states().size())
    throw std::invalid_argument("plasticStrain: displacement series length mismatch");
  std::vector<StressField> out;
  out.reserve(displacement.size());
  for (std::size_t n = 0; n < displacement.size(); ++n)
    out.push_back(strainOf(traj.space()->mesh(), displacement[n]) - traj.states()[n].stress);
  return out;
}

}  // namespace vmproj
