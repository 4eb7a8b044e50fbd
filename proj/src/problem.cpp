#include "vmproj/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace vmproj {

void ProblemSpec::validate() const {
  if (!(viscosity > 0.0)) throw std::invalid_argument("viscosity must be > 0");
  if (!(finalTime > 0.0)) throw std::invalid_argument("final time must be > 0");
  if (steps < 1) throw std::invalid_argument("number of steps must be >= 1");
  if (quadPoints < 1) throw std::invalid_argument("quadrature points must be >= 1");
  if (mode == Mode::Fem) {
    if (mesh.nx < 1 || mesh.ny < 1) throw std::invalid_argument("mesh nx and ny must be >= 1");
    if (!(mesh.lx > 0.0) || !(mesh.ly > 0.0)) throw std::invalid_argument("mesh side lengths must be > 0");
    if (!mesh.gamma1.any()) throw std::invalid_argument("Gamma1 must select at least one side");
  }
}

namespace catalog {

namespace {
double bump(const Point& x, const Point& centre, double width) {
  return std::exp(-(x - centre).squaredNorm() / (2.0 * width * width));
}
}  // namespace

ScalarFn constantScalar(double value) {
  return [value](double, const Point&) { return value; };
}

ScalarFn linearScalar(double value, double rate) {
  return [value, rate](double t, const Point&) { return value + rate * t; };
}

ScalarFn gaussianBumpScalar(double base, double amplitude, const Point& centre, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian bump width must be > 0");
  return [=](double, const Point& x) { return base + amplitude * bump(x, centre, width); };
}

VectorFn constantVector(const Eigen::Vector2d& value) {
  return [value](double, const Point&) { return value; };
}

VectorFn linearVector(const Eigen::Vector2d& value, const Eigen::Vector2d& rate) {
  return [value, rate](double t, const Point&) -> Eigen::Vector2d { return value + t * rate; };
}

VectorFn gaussianBumpVector(const Eigen::Vector2d& amplitude, const Point& centre, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian bump width must be > 0");
  return [=](double, const Point& x) -> Eigen::Vector2d { return amplitude * bump(x, centre, width); };
}

TensorFn constantTensor(const SymMatd& value) {
  return [value](double, const Point&) { return value; };
}

TensorFn linearTensor(const SymMatd& value, const SymMatd& rate) {
  value.requireSameDim(rate);
  return [value, rate](double t, const Point&) { return value + t * rate; };
}

TensorFn radialDeviatoric(double amplitude, const SymMatd& direction) {
  const SymMatd dev = deviator(direction);
  const double n = frobNorm(dev);
  if (n == 0.0) throw std::invalid_argument("radial_deviatoric direction has zero deviator");
  const SymMatd value = (amplitude / n) * dev;
  return [value](double, const Point&) { return value; };
}

TensorFn gaussianBumpTensor(const SymMatd& amplitude, const Point& centre, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian bump width must be > 0");
  return [=](double, const Point& x) { return bump(x, centre, width) * amplitude; };
}

}  // namespace catalog

namespace scenarios {

ProblemSpec cantilever(int steps) {
  ProblemSpec s;
  s.mode = Mode::Fem;
  s.viscosity = 1.0;
  s.finalTime = 1.0;
  s.steps = steps;
  s.mesh = MeshConfig{16, 16, 1.0, 1.0, BoundarySelector{.left = true}};
  s.force = catalog::constantVector(Eigen::Vector2d(0.0, -3.0));
  s.yield = catalog::constantScalar(1.0);
  return s;
}

ProblemSpec radialPointwise(int steps) {
  ProblemSpec s;
  s.mode = Mode::Pointwise;
  s.finalTime = 2.0;
  s.steps = steps;
  s.source = catalog::constantTensor(SymMatd::diag(1.0, -1.0));
  s.yield = catalog::constantScalar(1.0);
  return s;
}

ProblemSpec growingYieldPointwise(int steps) {
  ProblemSpec s = radialPointwise(steps);
  s.finalTime = 4.0;
  s.yield = catalog::linearScalar(1.0, 1.0);
  return s;
}

ProblemSpec explicitBlowup(int steps) {
  ProblemSpec s;
  s.mode = Mode::Fem;
  s.viscosity = 1e-3;
  s.finalTime = 2.0;
  s.steps = steps;
  s.mesh = MeshConfig{16, 16, 1.0, 1.0, BoundarySelector{.left = true}};
  s.force = catalog::constantVector(Eigen::Vector2d(0.0, -1.0));
  s.yield = catalog::constantScalar(1e6);
  return s;
}

}  // namespace scenarios

}  // namespace vmproj
