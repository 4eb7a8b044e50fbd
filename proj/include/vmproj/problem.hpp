#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

#include "vmproj/fem2d.hpp"
#include "vmproj/tensor.hpp"

namespace vmproj {

using Point = Eigen::Vector2d;
using ScalarFn = std::function<double(double, const Point&)>;
using VectorFn = std::function<Eigen::Vector2d(double, const Point&)>;
using TensorFn = std::function<SymMatd(double, const Point&)>;

enum class Mode {
  Fem,        ///< full momentum + stress system on a triangulated rectangle
  Pointwise,  ///< spatially homogeneous sweeping process, prescribed strain rate
};

struct MeshConfig {
  int nx = 8;
  int ny = 8;
  double lx = 1.0;
  double ly = 1.0;
  BoundarySelector gamma1{.left = true};
};

/// Continuous data of the Kelvin-Voigt / perfect-plasticity problem.
/// Unset functions are treated as zero.
struct ProblemSpec {
  Mode mode = Mode::Fem;
  double viscosity = 1.0;
  double finalTime = 1.0;
  int steps = 1;
  MeshConfig mesh;

  VectorFn force;      ///< f(t, x)
  TensorFn source;     ///< h(t, x)
  TensorFn shift;      ///< p(t, x)
  ScalarFn yield;      ///< g(t, x) >= 0
  TensorFn strainRate; ///< E(v)(t) in pointwise mode

  std::function<Eigen::Vector2d(const Point&)> initialVelocity;
  std::function<SymMatd(const Point&)> initialStress;

  /// Midpoint subintervals used for the time averages of f and h.
  int quadPoints = 2;

  double dt() const { return finalTime / steps; }
  double time(int n) const { return finalTime * n / steps; }

  /// Throws std::invalid_argument on nonsensical scalars (nu, T, N, ...).
  void validate() const;
};

// Built-in data-function catalogue. Every function is deterministic and
// parameterised by plain numbers so runs are reproducible from a config file.
namespace catalog {

ScalarFn constantScalar(double value);
/// value + rate * t
ScalarFn linearScalar(double value, double rate);
/// base + amplitude * exp(-|x - centre|^2 / (2 width^2))
ScalarFn gaussianBumpScalar(double base, double amplitude, const Point& centre, double width);

VectorFn constantVector(const Eigen::Vector2d& value);
VectorFn linearVector(const Eigen::Vector2d& value, const Eigen::Vector2d& rate);
VectorFn gaussianBumpVector(const Eigen::Vector2d& amplitude, const Point& centre, double width);

TensorFn constantTensor(const SymMatd& value);
TensorFn linearTensor(const SymMatd& value, const SymMatd& rate);
/// amplitude * D / |D| with D the deviator of `direction`.
TensorFn radialDeviatoric(double amplitude, const SymMatd& direction);
TensorFn gaussianBumpTensor(const SymMatd& amplitude, const Point& centre, double width);

}  // namespace catalog

/// Composite midpoint average (1/dt) * int_{t_{n-1}}^{t_n} fn(t, x) dt.
template <typename Fn>
auto timeAverage(const Fn& fn, int n, double dt, int quadPoints, const Point& x) {
  const double start = (n - 1) * dt;
  const double h = dt / quadPoints;
  auto sum = fn(start + 0.5 * h, x);
  for (int j = 1; j < quadPoints; ++j) sum += fn(start + (j + 0.5) * h, x);
  return (1.0 / quadPoints) * sum;
}

// Named scenarios.
namespace scenarios {

/// Unit-square cantilever: 16x16 mesh, Gamma1 = left edge, nu = 1,
/// body force f = (0, -3) (yield reached near t = 0.57), g = 1, p = h = 0, T = 1, at rest initially.
ProblemSpec cantilever(int steps);

/// Pointwise radial loading: h = diag(1,-1), g = 1, sigma0 = 0, T = 2.
ProblemSpec radialPointwise(int steps);

/// Pointwise radial loading with growing yield g(t) = 1 + t, T = 4.
ProblemSpec growingYieldPointwise(int steps);

/// Low-viscosity, coarse-step setup where the explicit stress coupling
/// loses stability (demonstration only).
ProblemSpec explicitBlowup(int steps);

}  // namespace scenarios

}  // namespace vmproj
