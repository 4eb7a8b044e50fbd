#include "vmproj/fem2d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vmproj {

bool BoundarySelector::contains(Side s) const {
  switch (s) {
    case Side::Left: return left;
    case Side::Right: return right;
    case Side::Bottom: return bottom;
    case Side::Top: return top;
  }
  return false;
}

Mesh2D::Mesh2D(Eigen::Matrix2Xd nodes, std::vector<Triangle> triangles, std::vector<BoundaryEdge> edges)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles)), edges_(std::move(edges)) {
  areas_.reserve(triangles_.size());
  gradients_.reserve(triangles_.size());
  for (std::size_t e = 0; e < triangles_.size(); ++e) {
    const auto& t = triangles_[e];
    const Eigen::Vector2d p0 = nodes_.col(t[0]);
    const Eigen::Vector2d p1 = nodes_.col(t[1]);
    const Eigen::Vector2d p2 = nodes_.col(t[2]);
    const double twiceArea = (p1 - p0).x() * (p2 - p0).y() - (p2 - p0).x() * (p1 - p0).y();
    if (!(twiceArea > 0.0))
      throw std::invalid_argument("Mesh2D: triangle " + std::to_string(e) + " has non-positive signed area");
    areas_.push_back(0.5 * twiceArea);
    // grad of the hat at vertex i is the rotated opposite edge over 2|T|
    HatGradients g;
    g.col(0) = Eigen::Vector2d(p1.y() - p2.y(), p2.x() - p1.x()) / twiceArea;
    g.col(1) = Eigen::Vector2d(p2.y() - p0.y(), p0.x() - p2.x()) / twiceArea;
    g.col(2) = Eigen::Vector2d(p0.y() - p1.y(), p1.x() - p0.x()) / twiceArea;
    gradients_.push_back(g);
  }
  constrained_.assign(nodes_.cols(), false);
  for (const auto& edge : edges_) {
    if (edge.tag == BoundaryTag::Gamma1) {
      constrained_[edge.a] = true;
      constrained_[edge.b] = true;
    }
  }
  if (gamma1EdgeCount() == 0) throw std::invalid_argument("Mesh2D: Gamma1 must contain at least one edge");
}

double Mesh2D::totalArea() const {
  double s = 0.0;
  for (double a : areas_) s += a;
  return s;
}

Eigen::Vector2d Mesh2D::centroid(int e) const {
  const auto& t = triangles_[e];
  return (nodes_.col(t[0]) + nodes_.col(t[1]) + nodes_.col(t[2])) / 3.0;
}

int Mesh2D::constrainedNodeCount() const {
  int n = 0;
  for (bool c : constrained_) n += c ? 1 : 0;
  return n;
}

int Mesh2D::gamma1EdgeCount() const {
  int n = 0;
  for (const auto& e : edges_) n += e.tag == BoundaryTag::Gamma1 ? 1 : 0;
  return n;
}

Mesh2D buildRectMesh(int nx, int ny, double lx, double ly, const BoundarySelector& gamma1) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("buildRectMesh: nx and ny must be >= 1");
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("buildRectMesh: side lengths must be > 0");
  if (!gamma1.any()) throw std::invalid_argument("buildRectMesh: Gamma1 selection is empty");

  const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  Eigen::Matrix2Xd nodes(2, (nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) nodes.col(id(i, j)) << lx * i / nx, ly * j / ny;

  std::vector<Mesh2D::Triangle> tris;
  tris.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = id(i, j), n10 = id(i + 1, j), n01 = id(i, j + 1), n11 = id(i + 1, j + 1);
      tris.push_back({n00, n10, n11});
      tris.push_back({n00, n11, n01});
    }
  }

  std::vector<BoundaryEdge> edges;
  const auto tag = [&gamma1](Side s) { return gamma1.contains(s) ? BoundaryTag::Gamma1 : BoundaryTag::Gamma2; };
  for (int i = 0; i < nx; ++i) edges.push_back({id(i, 0), id(i + 1, 0), tag(Side::Bottom), Side::Bottom});
  for (int j = 0; j < ny; ++j) edges.push_back({id(nx, j), id(nx, j + 1), tag(Side::Right), Side::Right});
  for (int i = nx; i > 0; --i) edges.push_back({id(i, ny), id(i - 1, ny), tag(Side::Top), Side::Top});
  for (int j = ny; j > 0; --j) edges.push_back({id(0, j), id(0, j - 1), tag(Side::Left), Side::Left});

  return Mesh2D(std::move(nodes), std::move(tris), std::move(edges));
}

StressField StressField::uniform(int elements, const SymMatd& value) {
  StressField s(elements);
  for (int e = 0; e < elements; ++e) s.set(e, value);
  return s;
}

void StressField::set(int e, const SymMatd& s) {
  if (s.dim() != 2) throw std::invalid_argument("StressField: only 2x2 tensors are stored");
  values_(0, e) = s(0, 0);
  values_(1, e) = s(0, 1);
  values_(2, e) = s(1, 1);
}

StressField& StressField::operator+=(const StressField& o) {
  if (o.size() != size()) throw std::invalid_argument("StressField: size mismatch");
  values_ += o.values_;
  return *this;
}

StressField& StressField::operator-=(const StressField& o) {
  if (o.size() != size()) throw std::invalid_argument("StressField: size mismatch");
  values_ -= o.values_;
  return *this;
}

StressField& StressField::operator*=(double s) {
  values_ *= s;
  return *this;
}

namespace {

template <typename LocalBlock>
SparseSym assembleVector(const Mesh2D& mesh, LocalBlock block) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(36 * mesh.triangleCount());
  for (int e = 0; e < mesh.triangleCount(); ++e) {
    const auto& tri = mesh.triangles()[e];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) {
            const double v = block(e, a, b, k, l);
            if (v != 0.0) trips.emplace_back(2 * tri[a] + k, 2 * tri[b] + l, v);
          }
  }
  return SparseSym::fromTriplets(mesh.dofCount(), trips);
}

}  // namespace

SparseSym assembleMass(const Mesh2D& mesh) {
  return assembleVector(mesh, [&mesh](int e, int a, int b, int k, int l) {
    if (k != l) return 0.0;
    return mesh.area(e) / 12.0 * (a == b ? 2.0 : 1.0);
  });
}

SparseSym assembleStrainStiffness(const Mesh2D& mesh) {
  // E(phi_a e_k) : E(phi_b e_l) = (delta_kl ga.gb + ga_l gb_k) / 2
  return assembleVector(mesh, [&mesh](int e, int a, int b, int k, int l) {
    const auto& g = mesh.gradients(e);
    const double dot = g.col(a).dot(g.col(b));
    return mesh.area(e) * 0.5 * ((k == l ? dot : 0.0) + g(l, a) * g(k, b));
  });
}

SparseSym assembleGradientGram(const Mesh2D& mesh) {
  return assembleVector(mesh, [&mesh](int e, int a, int b, int k, int l) {
    if (k != l) return 0.0;
    const auto& g = mesh.gradients(e);
    return mesh.area(e) * g.col(a).dot(g.col(b));
  });
}

StressField strainOf(const Mesh2D& mesh, const Vector& v) {
  if (v.size() != mesh.dofCount()) throw std::invalid_argument("strainOf: velocity size mismatch");
  StressField out(mesh.triangleCount());
  for (int e = 0; e < mesh.triangleCount(); ++e) {
    const auto& tri = mesh.triangles()[e];
    const auto& g = mesh.gradients(e);
    Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();  // grad(i, j) = d v_i / d x_j
    for (int a = 0; a < 3; ++a) grad += Eigen::Vector2d(v(2 * tri[a]), v(2 * tri[a] + 1)) * g.col(a).transpose();
    out.raw().col(e) << grad(0, 0), 0.5 * (grad(0, 1) + grad(1, 0)), grad(1, 1);
  }
  return out;
}

Vector stressLoad(const Mesh2D& mesh, const StressField& sigma) {
  if (sigma.size() != mesh.triangleCount()) throw std::invalid_argument("stressLoad: stress size mismatch");
  Vector r = Vector::Zero(mesh.dofCount());
  for (int e = 0; e < mesh.triangleCount(); ++e) {
    const auto& tri = mesh.triangles()[e];
    const auto& g = mesh.gradients(e);
    const auto s = sigma.raw().col(e);
    Eigen::Matrix2d m;
    m << s(0), s(1), s(1), s(2);
    for (int a = 0; a < 3; ++a) {
      const Eigen::Vector2d c = mesh.area(e) * (m * g.col(a));
      r(2 * tri[a]) += c.x();
      r(2 * tri[a] + 1) += c.y();
    }
  }
  return r;
}

Vector bodyLoad(const Mesh2D& mesh, const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f) {
  Vector r = Vector::Zero(mesh.dofCount());
  for (int e = 0; e < mesh.triangleCount(); ++e) {
    const Eigen::Vector2d share = f(mesh.centroid(e)) * (mesh.area(e) / 3.0);
    for (int node : mesh.triangles()[e]) {
      r(2 * node) += share.x();
      r(2 * node + 1) += share.y();
    }
  }
  return r;
}

Vector interpolateFree(const Mesh2D& mesh,
                       const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& fn) {
  Vector v(mesh.dofCount());
  for (int n = 0; n < mesh.nodeCount(); ++n) {
    const Eigen::Vector2d val = fn(mesh.nodes().col(n));
    v(2 * n) = val.x();
    v(2 * n + 1) = val.y();
  }
  return v;
}

Vector interpolateVelocity(const Mesh2D& mesh,
                           const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& fn) {
  Vector v = interpolateFree(mesh, fn);
  zeroConstrained(mesh, v);
  return v;
}

void zeroConstrained(const Mesh2D& mesh, Vector& v) {
  for (int n = 0; n < mesh.nodeCount(); ++n) {
    if (mesh.isConstrained(n)) {
      v(2 * n) = 0.0;
      v(2 * n + 1) = 0.0;
    }
  }
}

SparseSym constrainMatrix(const Mesh2D& mesh, const SparseSym& a) {
  if (a.size() != mesh.dofCount()) throw DimensionError("constrainMatrix: size mismatch");
  const auto fixed = [&mesh](int dof) { return mesh.isConstrained(dof / 2); };
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(a.storage().nonZeros());
  const auto& m = a.storage();
  for (int row = 0; row < m.outerSize(); ++row) {
    if (fixed(row)) continue;
    for (SparseSym::Storage::InnerIterator it(m, row); it; ++it)
      if (!fixed(static_cast<int>(it.col()))) trips.emplace_back(row, static_cast<int>(it.col()), it.value());
  }
  for (int dof = 0; dof < a.size(); ++dof)
    if (fixed(dof)) trips.emplace_back(dof, dof, 1.0);
  return SparseSym::fromTriplets(a.size(), trips);
}

ConstrainedSystem applyDirichlet(const SparseSym& a, const Vector& rhs, const Mesh2D& mesh) {
  if (rhs.size() != a.size()) throw DimensionError("applyDirichlet: rhs size mismatch");
  ConstrainedSystem sys{constrainMatrix(mesh, a), rhs};
  zeroConstrained(mesh, sys.rhs);
  return sys;
}

FemSpace::FemSpace(Mesh2D mesh)
    : mesh_(std::move(mesh)),
      mass_(assembleMass(mesh_)),
      stiffness_(assembleStrainStiffness(mesh_)),
      gradGram_(assembleGradientGram(mesh_)),
      h1Full_(mass_.combined(1.0, gradGram_, 1.0)),
      h1Constrained_(constrainMatrix(mesh_, h1Full_)) {}

double FemSpace::innerH(const Vector& a, const Vector& b) const { return a.dot(mass_.storage() * b); }

double FemSpace::normH(const Vector& v) const { return std::sqrt(std::max(innerH(v, v), 0.0)); }

double FemSpace::normV(const Vector& v) const {
  return std::sqrt(std::max(v.dot(h1Full_.storage() * v), 0.0));
}

double FemSpace::dualNorm(const Vector& r, double cgTolerance) const {
  Vector rhs = r;
  zeroConstrained(mesh_, rhs);
  CgOptions opts;
  opts.tolerance = cgTolerance;
  const CgResult sol = cgSolve(h1Constrained_, rhs, opts);
  if (!sol.converged) throw std::runtime_error("dualNorm: Riesz solve did not converge");
  return std::sqrt(std::max(rhs.dot(sol.x), 0.0));
}

double FemSpace::innerH(const StressField& a, const StressField& b) const {
  if (a.size() != mesh_.triangleCount() || b.size() != mesh_.triangleCount())
    throw std::invalid_argument("innerH: stress size mismatch");
  double s = 0.0;
  for (int e = 0; e < mesh_.triangleCount(); ++e) {
    const auto x = a.raw().col(e);
    const auto y = b.raw().col(e);
    s += mesh_.area(e) * (x(0) * y(0) + 2.0 * x(1) * y(1) + x(2) * y(2));
  }
  return s;
}

double FemSpace::normH(const StressField& s) const { return std::sqrt(std::max(innerH(s, s), 0.0)); }

}  // namespace vmproj
