#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Core>

namespace vmproj {

/// Square matrix of order at most 3 with runtime size, used for general
/// (possibly non-symmetric) d x d values.
template <typename Scalar>
using SmallMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

/// Symmetric d x d matrix, d in {2, 3}. Only the upper triangle is stored,
/// row-major: (0,0) (0,1) [(0,2)] (1,1) [(1,2)] [(2,2)].
template <typename Scalar>
class SymMat {
 public:
  SymMat() : SymMat(2) {}

  explicit SymMat(int dim) : dim_(static_cast<std::int8_t>(dim)) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("SymMat: dimension must be 2 or 3");
    entries_.fill(Scalar(0));
  }

  static SymMat zero(int dim) { return SymMat(dim); }

  static SymMat identity(int dim) {
    SymMat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = Scalar(1);
    return m;
  }

  static SymMat diag(Scalar a, Scalar b) {
    SymMat m(2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
  }

  static SymMat diag(Scalar a, Scalar b, Scalar c) {
    SymMat m(3);
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    return m;
  }

  /// 2x2 from its three independent entries.
  static SymMat make2(Scalar xx, Scalar xy, Scalar yy) {
    SymMat m(2);
    m(0, 0) = xx;
    m(0, 1) = xy;
    m(1, 1) = yy;
    return m;
  }

  /// Symmetric part of a square matrix: (A + A^T) / 2.
  template <typename Derived>
  static SymMat symmetricPart(const Eigen::MatrixBase<Derived>& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("SymMat: matrix must be square");
    SymMat m(static_cast<int>(a.rows()));
    for (int i = 0; i < m.dim(); ++i)
      for (int j = i; j < m.dim(); ++j) m(i, j) = Scalar(0.5) * (a(i, j) + a(j, i));
    return m;
  }

  int dim() const { return dim_; }

  Scalar& operator()(int i, int j) { return entries_[slot(i, j)]; }
  Scalar operator()(int i, int j) const { return entries_[slot(i, j)]; }

  SmallMat<Scalar> dense() const {
    SmallMat<Scalar> a(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) a(i, j) = (*this)(i, j);
    return a;
  }

  SymMat& operator+=(const SymMat& o) {
    requireSameDim(o);
    for (int k = 0; k < storedCount(); ++k) entries_[k] += o.entries_[k];
    return *this;
  }
  SymMat& operator-=(const SymMat& o) {
    requireSameDim(o);
    for (int k = 0; k < storedCount(); ++k) entries_[k] -= o.entries_[k];
    return *this;
  }
  SymMat& operator*=(Scalar s) {
    for (int k = 0; k < storedCount(); ++k) entries_[k] *= s;
    return *this;
  }

  friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
  friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
  friend SymMat operator-(SymMat a) { return a *= Scalar(-1); }
  friend SymMat operator*(Scalar s, SymMat a) { return a *= s; }
  friend SymMat operator*(SymMat a, Scalar s) { return a *= s; }
  friend SymMat operator/(SymMat a, Scalar s) { return a *= Scalar(1) / s; }

  friend bool operator==(const SymMat& a, const SymMat& b) {
    return a.dim_ == b.dim_ && a.entries_ == b.entries_;
  }

  void requireSameDim(const SymMat& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("SymMat: dimension mismatch");
  }

 private:
  int storedCount() const { return dim_ * (dim_ + 1) / 2; }

  int slot(int i, int j) const {
    if (i > j) std::swap(i, j);
    // offset of row i in packed upper storage
    return i * dim_ - i * (i - 1) / 2 + (j - i);
  }

  std::array<Scalar, 6> entries_;
  std::int8_t dim_;
};

using SymMatd = SymMat<double>;

template <typename Scalar>
Scalar trace(const SymMat<Scalar>& a) {
  Scalar t(0);
  for (int i = 0; i < a.dim(); ++i) t += a(i, i);
  return t;
}

/// Spherical part (tr A / d) E_d.
template <typename Scalar>
SymMat<Scalar> spherical(const SymMat<Scalar>& a) {
  return (trace(a) / Scalar(a.dim())) * SymMat<Scalar>::identity(a.dim());
}

/// A^D = A - (tr A / d) E_d.
template <typename Scalar>
SymMat<Scalar> deviator(const SymMat<Scalar>& a) {
  SymMat<Scalar> d = a;
  const Scalar mean = trace(a) / Scalar(a.dim());
  for (int i = 0; i < a.dim(); ++i) d(i, i) -= mean;
  return d;
}

/// Full-matrix Frobenius product A : B. Off-diagonal entries count twice.
template <typename Scalar>
Scalar frobInner(const SymMat<Scalar>& a, const SymMat<Scalar>& b) {
  a.requireSameDim(b);
  Scalar s(0);
  for (int i = 0; i < a.dim(); ++i) {
    s += a(i, i) * b(i, i);
    for (int j = i + 1; j < a.dim(); ++j) s += Scalar(2) * a(i, j) * b(i, j);
  }
  return s;
}

template <typename Scalar>
Scalar frobNorm(const SymMat<Scalar>& a) {
  using std::sqrt;
  return sqrt(frobInner(a, a));
}

/// Cutoff map onto the closed unit Frobenius ball.
template <typename Scalar>
SymMat<Scalar> phiCap(const SymMat<Scalar>& a) {
  const Scalar n = frobNorm(a);
  if (n <= Scalar(1)) return a;
  return a / n;
}

/// Nearest point of K_R = {s : |s^D| <= R}. R * phiCap(A^D / R) is evaluated
/// as A^D or R A^D / |A^D| so that small R never divides.
template <typename Scalar>
SymMat<Scalar> projDevBall(const SymMat<Scalar>& a, Scalar radius) {
  if (!(radius >= Scalar(0))) throw std::invalid_argument("projDevBall: radius must be >= 0");
  const SymMat<Scalar> dev = deviator(a);
  const Scalar devNorm = frobNorm(dev);
  if (devNorm <= radius) return a;
  return spherical(a) + (radius / devNorm) * dev;
}

/// |(sigma + p)^D| <= g + tol.
template <typename Scalar>
bool isAdmissible(const SymMat<Scalar>& sigma, const SymMat<Scalar>& shift, Scalar yield,
                  Scalar tol = Scalar(0)) {
  return frobNorm(deviator(sigma + shift)) <= yield + tol;
}

/// Projection onto the shifted set K = K~ - p: P_g(sigma + p) - p.
template <typename Scalar>
SymMat<Scalar> projectConstraint(const SymMat<Scalar>& sigma, const SymMat<Scalar>& shift,
                                 Scalar yield) {
  if (!(yield >= Scalar(0))) throw std::invalid_argument("projectConstraint: yield must be >= 0");
  if (isAdmissible(sigma, shift, yield)) return sigma;
  return projDevBall(sigma + shift, yield) - shift;
}

/// g - |(sigma + p)^D|; negative means outside the yield surface.
template <typename Scalar>
Scalar yieldSlack(const SymMat<Scalar>& sigma, const SymMat<Scalar>& shift, Scalar yield) {
  return yield - frobNorm(deviator(sigma + shift));
}

}  // namespace vmproj
