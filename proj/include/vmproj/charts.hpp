#pragma once

// Isometric charts of the von Mises set K_R on R^{d x d}.
//
//   psi1(lambda) = (lambda / sqrt(d)) E_d
//   psi2(x)      = sum_i a_i e_i + sum_{i != j} b_ij E_ij
//   e_i          = diag(1, ..., 1, -i, 0, ..., 0) / sqrt(i (i + 1))
//
// The coordinate vector x has length d^2 - 1 and is laid out as
// (a_1, ..., a_{d-1}) followed by b_ij for i != j in row-major order.
// Every A in R^{d x d} decomposes uniquely as psi1(lambda) + psi2(x), and
// A lies in K_R iff |x| <= R.

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <random>
#include <stdexcept>

#include <Eigen/Core>

#include "vmproj/tensor.hpp"

namespace vmproj {

template <typename Scalar>
using ChartVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, 8, 1>;

template <typename Scalar>
struct DevCoords {
  Scalar lambda{};
  ChartVec<Scalar> x;
};

inline int chartLength(int dim) { return dim * dim - 1; }

inline void requireChartDim(int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("chart: dimension must be 2 or 3");
}

/// Diagonal basis matrix e_i, i = 1 .. d-1 (one-based as in the chart formula).
template <typename Scalar>
SmallMat<Scalar> chartDiagBasis(int i, int dim) {
  using std::sqrt;
  SmallMat<Scalar> e = SmallMat<Scalar>::Zero(dim, dim);
  const Scalar scale = Scalar(1) / sqrt(Scalar(i * (i + 1)));
  for (int k = 0; k < i; ++k) e(k, k) = scale;
  e(i, i) = -Scalar(i) * scale;
  return e;
}

template <typename Scalar>
SmallMat<Scalar> psi1(Scalar lambda, int dim) {
  using std::sqrt;
  requireChartDim(dim);
  return (lambda / sqrt(Scalar(dim))) * SmallMat<Scalar>::Identity(dim, dim);
}

template <typename Scalar>
SmallMat<Scalar> psi2(const ChartVec<Scalar>& x, int dim) {
  requireChartDim(dim);
  if (x.size() != chartLength(dim)) throw std::invalid_argument("psi2: coordinate length must be d^2 - 1");
  SmallMat<Scalar> a = SmallMat<Scalar>::Zero(dim, dim);
  int k = 0;
  for (int i = 1; i < dim; ++i) a += x(k++) * chartDiagBasis<Scalar>(i, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (i != j) a(i, j) += x(k++);
  return a;
}

template <typename Scalar>
DevCoords<Scalar> decompose(const SmallMat<Scalar>& a) {
  using std::sqrt;
  const int dim = static_cast<int>(a.rows());
  requireChartDim(dim);
  if (a.cols() != dim) throw std::invalid_argument("decompose: matrix must be square");
  DevCoords<Scalar> c;
  c.lambda = a.trace() / sqrt(Scalar(dim));
  c.x.resize(chartLength(dim));
  int k = 0;
  // {E_d / sqrt(d), e_1, ..., e_{d-1}} is an orthonormal basis of the diagonal matrices.
  for (int i = 1; i < dim; ++i) c.x(k++) = (a.cwiseProduct(chartDiagBasis<Scalar>(i, dim))).sum();
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (i != j) c.x(k++) = a(i, j);
  return c;
}

template <typename Scalar>
DevCoords<Scalar> decompose(const SymMat<Scalar>& a) {
  return decompose<Scalar>(a.dense());
}

template <typename Scalar>
bool krContainsViaChart(const SymMat<Scalar>& a, Scalar radius) {
  if (!(radius >= Scalar(0))) throw std::invalid_argument("krContainsViaChart: radius must be >= 0");
  return decompose(a).x.norm() <= radius;
}

/// Frobenius inner product on general square matrices.
template <typename Scalar>
Scalar frobInner(const SmallMat<Scalar>& a, const SmallMat<Scalar>& b) {
  return a.cwiseProduct(b).sum();
}

/// Draws chart coordinates x uniformly from the closed ball of the given radius.
template <typename Scalar>
class ChartBallSampler {
 public:
  ChartBallSampler(int dim, std::uint64_t seed) : dim_(dim), rng_(seed) { requireChartDim(dim); }

  ChartVec<Scalar> uniformInBall(Scalar radius) {
    ChartVec<Scalar> x = direction();
    const Scalar u = unit_(rng_);
    return (radius * std::pow(u, Scalar(1) / Scalar(chartLength(dim_)))) * x;
  }

  ChartVec<Scalar> onSphere(Scalar radius) { return radius * direction(); }

  Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * unit_(rng_); }

  std::mt19937_64& engine() { return rng_; }

 private:
  ChartVec<Scalar> direction() {
    ChartVec<Scalar> x(chartLength(dim_));
    Scalar n(0);
    do {
      for (int k = 0; k < x.size(); ++k) x(k) = gauss_(rng_);
      n = x.norm();
    } while (n == Scalar(0));
    return x / n;
  }

  int dim_;
  std::mt19937_64 rng_;
  std::normal_distribution<Scalar> gauss_{Scalar(0), Scalar(1)};
  std::uniform_real_distribution<Scalar> unit_{Scalar(0), Scalar(1)};
};

template <typename Scalar>
struct OracleResult {
  SmallMat<Scalar> bestPoint;
  Scalar bestDistance{};
};

/// Brute-force minimiser of |tau - F| over chart samples of K_R. Never
/// evaluates the closed-form projection, so it can check it.
///
/// lambda runs over a 101-point grid on [lambda_F - 2|F|, lambda_F + 2|F|]
/// (sample i uses grid point i mod 101); x is uniform in the R-ball.
template <typename Scalar>
OracleResult<Scalar> argminOracle(const SymMat<Scalar>& f, Scalar radius, int samples,
                                  std::uint64_t seed) {
  using std::sqrt;
  if (!(radius >= Scalar(0))) throw std::invalid_argument("argminOracle: radius must be >= 0");
  if (samples < 1) throw std::invalid_argument("argminOracle: need at least one sample");
  constexpr int kGrid = 101;
  const int dim = f.dim();
  const SmallMat<Scalar> fd = f.dense();
  const Scalar centre = fd.trace() / sqrt(Scalar(dim));
  const Scalar halfWidth = Scalar(2) * fd.norm();
  ChartBallSampler<Scalar> sampler(dim, seed);

  OracleResult<Scalar> best;
  best.bestDistance = std::numeric_limits<Scalar>::infinity();
  for (int i = 0; i < samples; ++i) {
    const int g = i % kGrid;
    const Scalar lambda = centre + halfWidth * (Scalar(2 * g - (kGrid - 1)) / Scalar(kGrid - 1));
    const SmallMat<Scalar> tau = psi1(lambda, dim) + psi2(sampler.uniformInBall(radius), dim);
    const Scalar dist = (tau - fd).norm();
    if (dist < best.bestDistance) {
      best.bestDistance = dist;
      best.bestPoint = tau;
    }
  }
  return best;
}

template <typename Scalar>
struct InclusionReport {
  SymMat<Scalar> sigmaB;
  Scalar maxViolation{};
};

/// Computes sigma_b + p = P_g(F + p) with F = sigma_a + dt (E(v) + h) and
/// checks (F - sigma_b, tau - sigma_b) <= 0 for random tau in K = K~ - p.
/// Returns max(0, largest inner product seen).
template <typename Scalar>
InclusionReport<Scalar> inclusionEquivalenceCheck(const SymMat<Scalar>& sigmaA,
                                                  const SymMat<Scalar>& strain,
                                                  const SymMat<Scalar>& h,
                                                  const SymMat<Scalar>& shift, Scalar yield,
                                                  Scalar dt, int witnesses, std::uint64_t seed) {
  using std::sqrt;
  if (!(dt > Scalar(0))) throw std::invalid_argument("inclusionEquivalenceCheck: dt must be > 0");
  if (!(yield >= Scalar(0))) throw std::invalid_argument("inclusionEquivalenceCheck: yield must be >= 0");
  const int dim = sigmaA.dim();
  const SymMat<Scalar> trial = sigmaA + dt * (strain + h);
  InclusionReport<Scalar> report;
  report.sigmaB = projectConstraint(trial, shift, yield);

  const SmallMat<Scalar> normal = (trial - report.sigmaB).dense();
  const SmallMat<Scalar> base = report.sigmaB.dense();
  const SmallMat<Scalar> shiftD = shift.dense();
  const Scalar centre = (report.sigmaB + shift).dense().trace() / sqrt(Scalar(dim));
  const Scalar spread = Scalar(2) * (frobNorm(trial) + frobNorm(shift) + yield + Scalar(1));

  ChartBallSampler<Scalar> sampler(dim, seed);
  Scalar worst(0);
  for (int i = 0; i < witnesses; ++i) {
    const Scalar lambda = sampler.uniform(centre - spread, centre + spread);
    // half the witnesses sit on the yield surface, where the inequality is tight
    const ChartVec<Scalar> x = (i % 2 == 0) ? sampler.onSphere(yield) : sampler.uniformInBall(yield);
    const SmallMat<Scalar> tau = psi1(lambda, dim) + psi2(x, dim) - shiftD;
    worst = std::max(worst, frobInner<Scalar>(normal, tau - base));
  }
  report.maxViolation = worst;
  return report;
}

}  // namespace vmproj
