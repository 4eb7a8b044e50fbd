#pragma once

// P1 (continuous, vector) velocity / P0 (element-constant, symmetric tensor)
// stress discretisation on a structured triangulation of a rectangle.
//
// Velocity dof layout: dof 2*node + component.

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vmproj/linalg.hpp"
#include "vmproj/tensor.hpp"

namespace vmproj {

enum class BoundaryTag { Gamma1, Gamma2 };
enum class Side { Bottom, Right, Top, Left };

/// Which sides of the rectangle carry the homogeneous Dirichlet condition.
struct BoundarySelector {
  bool left = false;
  bool right = false;
  bool bottom = false;
  bool top = false;

  static BoundarySelector all() { return {true, true, true, true}; }
  bool any() const { return left || right || bottom || top; }
  bool contains(Side s) const;
};

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::Gamma2;
  Side side = Side::Bottom;
};

class Mesh2D {
 public:
  using Triangle = std::array<int, 3>;
  /// Columns are the (constant) gradients of the three P1 hat functions.
  using HatGradients = Eigen::Matrix<double, 2, 3>;

  Mesh2D(Eigen::Matrix2Xd nodes, std::vector<Triangle> triangles, std::vector<BoundaryEdge> edges);

  int nodeCount() const { return static_cast<int>(nodes_.cols()); }
  int triangleCount() const { return static_cast<int>(triangles_.size()); }
  int dofCount() const { return 2 * nodeCount(); }

  const Eigen::Matrix2Xd& nodes() const { return nodes_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundaryEdges() const { return edges_; }

  double area(int e) const { return areas_[e]; }
  double totalArea() const;
  const HatGradients& gradients(int e) const { return gradients_[e]; }
  Eigen::Vector2d centroid(int e) const;

  /// True for nodes on a Gamma1 edge (velocity pinned to zero).
  bool isConstrained(int node) const { return constrained_[node]; }
  int constrainedNodeCount() const;
  int gamma1EdgeCount() const;

 private:
  Eigen::Matrix2Xd nodes_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> edges_;
  std::vector<double> areas_;
  std::vector<HatGradients> gradients_;
  std::vector<bool> constrained_;
};

/// (nx+1)(ny+1) nodes, each cell split along its lower-left to upper-right
/// diagonal into two counter-clockwise triangles.
Mesh2D buildRectMesh(int nx, int ny, double lx, double ly, const BoundarySelector& gamma1);

/// Element-constant symmetric 2x2 tensors, stored column-wise as (xx, xy, yy).
class StressField {
 public:
  StressField() = default;
  explicit StressField(int elements) : values_(Eigen::Matrix3Xd::Zero(3, elements)) {}

  static StressField uniform(int elements, const SymMatd& value);

  int size() const { return static_cast<int>(values_.cols()); }
  SymMatd at(int e) const { return SymMatd::make2(values_(0, e), values_(1, e), values_(2, e)); }
  void set(int e, const SymMatd& s);

  const Eigen::Matrix3Xd& raw() const { return values_; }
  Eigen::Matrix3Xd& raw() { return values_; }

  StressField& operator+=(const StressField& o);
  StressField& operator-=(const StressField& o);
  StressField& operator*=(double s);
  friend StressField operator+(StressField a, const StressField& b) { return a += b; }
  friend StressField operator-(StressField a, const StressField& b) { return a -= b; }
  friend StressField operator*(double s, StressField a) { return a *= s; }

 private:
  Eigen::Matrix3Xd values_;
};

SparseSym assembleMass(const Mesh2D& mesh);
/// Matrix of (E(phi_i), E(phi_j))_H.
SparseSym assembleStrainStiffness(const Mesh2D& mesh);
/// Matrix of (grad phi_i, grad phi_j)_H (full vector gradient).
SparseSym assembleGradientGram(const Mesh2D& mesh);

/// Per-element symmetric gradient of a P1 velocity.
StressField strainOf(const Mesh2D& mesh, const Vector& v);

/// Entries (sigma, E(phi_i))_H.
Vector stressLoad(const Mesh2D& mesh, const StressField& sigma);

/// Entries (f, phi_i) with one-point centroid quadrature.
Vector bodyLoad(const Mesh2D& mesh, const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f);

/// Nodal interpolant; Gamma1 nodes are set to zero.
Vector interpolateVelocity(const Mesh2D& mesh,
                           const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& fn);
/// Nodal interpolant with no boundary treatment.
Vector interpolateFree(const Mesh2D& mesh,
                       const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& fn);

void zeroConstrained(const Mesh2D& mesh, Vector& v);

struct ConstrainedSystem {
  SparseSym matrix;
  Vector rhs;
};

/// Symmetric elimination of Gamma1 dofs: row and column zeroed, unit
/// diagonal, zero right-hand side.
SparseSym constrainMatrix(const Mesh2D& mesh, const SparseSym& a);
ConstrainedSystem applyDirichlet(const SparseSym& a, const Vector& rhs, const Mesh2D& mesh);

/// Assembled operators reused across a run, plus the discrete norms.
class FemSpace {
 public:
  explicit FemSpace(Mesh2D mesh);

  const Mesh2D& mesh() const { return mesh_; }
  const SparseSym& mass() const { return mass_; }
  const SparseSym& stiffness() const { return stiffness_; }
  const SparseSym& gradientGram() const { return gradGram_; }
  /// M + G with Gamma1 eliminated: the Gram matrix of V.
  const SparseSym& h1Gram() const { return h1Constrained_; }

  double normH(const Vector& v) const;
  double innerH(const Vector& a, const Vector& b) const;
  /// Full H1 norm sqrt(v^T (M + G) v).
  double normV(const Vector& v) const;
  /// Riesz-map norm sqrt(r^T A^{-1} r) of a load vector, Gamma1 entries ignored.
  double dualNorm(const Vector& r, double cgTolerance = 1e-12) const;

  double normH(const StressField& s) const;
  double innerH(const StressField& a, const StressField& b) const;

 private:
  Mesh2D mesh_;
  SparseSym mass_;
  SparseSym stiffness_;
  SparseSym gradGram_;
  SparseSym h1Full_;
  SparseSym h1Constrained_;
};

/// Legacy ASCII VTK: triangles, CELL_DATA tensor "sigma" (and optional
/// "sigma_trial"), POINT_DATA vector "velocity".
void writeVtk(std::ostream& out, const Mesh2D& mesh, const Vector& velocity, const StressField& sigma,
              const StressField* trialStress = nullptr, const std::string& title = "vmproj");

}  // namespace vmproj
