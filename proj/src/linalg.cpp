#include "vmproj/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vmproj {

SparseSym::SparseSym(Storage m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DimensionError("SparseSym: matrix must be square");
  m_.makeCompressed();
}

SparseSym SparseSym::fromTriplets(int n, const std::vector<Eigen::Triplet<double>>& triplets) {
  Storage m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseSym(std::move(m));
}

SparseSym SparseSym::identity(int n) {
  Storage m(n, n);
  m.setIdentity();
  return SparseSym(std::move(m));
}

SparseSym SparseSym::combined(double a, const SparseSym& other, double b) const {
  if (other.size() != size()) throw DimensionError("SparseSym::combined: size mismatch");
  return SparseSym(Storage(a * m_ + b * other.m_));
}

Vector spmv(const SparseSym& a, const Vector& x) {
  if (x.size() != a.size())
    throw DimensionError("spmv: vector of length " + std::to_string(x.size()) +
                         " does not match matrix of size " + std::to_string(a.size()));
  return a.storage() * x;
}

CgResult cgSolve(const SparseSym& a, const Vector& b, const CgOptions& options,
                 const Vector& guess) {
  const int n = a.size();
  if (b.size() != n) throw DimensionError("cgSolve: right-hand side size mismatch");
  if (guess.size() != 0 && guess.size() != n) throw DimensionError("cgSolve: initial guess size mismatch");
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("cgSolve: tolerance must be > 0");

  Vector invDiag = a.diagonal();
  for (int i = 0; i < n; ++i) {
    if (!(invDiag(i) > 0.0)) throw std::invalid_argument("cgSolve: matrix diagonal must be positive");
    invDiag(i) = 1.0 / invDiag(i);
  }

  CgResult result;
  result.x = guess.size() == n ? guess : Vector::Zero(n);
  if (options.recordHistory) result.history.push_back(result.x);

  const double bNorm = std::sqrt(b.dot(invDiag.cwiseProduct(b)));
  if (bNorm == 0.0) {
    result.x.setZero();
    result.converged = true;
    return result;
  }

  Vector r = b - a.storage() * result.x;
  Vector z = invDiag.cwiseProduct(r);
  double rz = r.dot(z);
  result.residual = std::sqrt(rz) / bNorm;
  if (result.residual <= options.tolerance) {
    result.converged = true;
    return result;
  }

  Vector p = z;
  Vector ap(n);
  while (result.iterations < options.maxIterations) {
    ap.noalias() = a.storage() * p;
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;  // not SPD along p
    const double alpha = rz / pap;
    result.x += alpha * p;
    r -= alpha * ap;
    ++result.iterations;
    if (options.recordHistory) result.history.push_back(result.x);

    z = invDiag.cwiseProduct(r);
    const double rzNext = r.dot(z);
    result.residual = std::sqrt(std::max(rzNext, 0.0)) / bNorm;
    if (result.residual <= options.tolerance) {
      result.converged = true;
      break;
    }
    p = z + (rzNext / rz) * p;
    rz = rzNext;
  }
  return result;
}

}  // namespace vmproj
