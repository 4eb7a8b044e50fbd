#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace vmproj {

using Vector = Eigen::VectorXd;

/// Symmetric sparse matrix in compressed row storage. Both triangles are
/// stored; column indices are sorted within each row.
class SparseSym {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

  SparseSym() = default;
  explicit SparseSym(Storage m);

  /// Builds from (row, col, value) triplets; duplicates are summed.
  static SparseSym fromTriplets(int n, const std::vector<Eigen::Triplet<double>>& triplets);
  static SparseSym identity(int n);

  int size() const { return static_cast<int>(m_.rows()); }
  const Storage& storage() const { return m_; }
  Vector diagonal() const { return m_.diagonal(); }
  Eigen::MatrixXd toDense() const { return Eigen::MatrixXd(m_); }

  /// Linear combination a*this + b*other (same size).
  SparseSym combined(double a, const SparseSym& other, double b) const;

 private:
  Storage m_;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Vector spmv(const SparseSym& a, const Vector& x);

struct CgOptions {
  double tolerance = 1e-12;
  int maxIterations = 10000;
  bool recordHistory = false;
};

struct CgResult {
  Vector x;
  int iterations = 0;
  /// Final relative preconditioned residual (absolute when b = 0).
  double residual = 0.0;
  bool converged = false;
  /// Iterates x_0, x_1, ... when CgOptions::recordHistory is set.
  std::vector<Vector> history;
};

/// Jacobi-preconditioned conjugate gradients. `guess` seeds the iteration
/// when non-empty. Non-convergence is reported through CgResult::converged.
CgResult cgSolve(const SparseSym& a, const Vector& b, const CgOptions& options = {},
                 const Vector& guess = Vector());

}  // namespace vmproj
