#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "vmproj/fem2d.hpp"

using namespace vmproj;

namespace {

const BoundarySelector kLeft{.left = true};

Vector interp(const Mesh2D& m, double (*fx)(double, double), double (*fy)(double, double)) {
  return interpolateFree(m, [&](const Eigen::Vector2d& p) {
    return Eigen::Vector2d(fx(p.x(), p.y()), fy(p.x(), p.y()));
  });
}

int gamma2Count(const Mesh2D& m) {
  int c = 0;
  for (const auto& e : m.boundaryEdges()) c += e.tag == BoundaryTag::Gamma2;
  return c;
}

}  // namespace

TEST_CASE("rectangular mesh") {
  const Mesh2D a = buildRectMesh(1, 1, 1, 1, kLeft);
  CHECK(a.nodeCount() == 4);
  CHECK(a.triangleCount() == 2);
  CHECK(a.gamma1EdgeCount() == 1);
  CHECK(gamma2Count(a) == 3);

  const Mesh2D b = buildRectMesh(2, 2, 1, 1, BoundarySelector::all());
  CHECK(b.nodeCount() == 9);
  CHECK(b.triangleCount() == 8);
  CHECK(b.gamma1EdgeCount() == 8);
  CHECK(gamma2Count(b) == 0);

  CHECK(buildRectMesh(1, 1, 2, 1, kLeft).totalArea() == doctest::Approx(2.0));
  CHECK(buildRectMesh(3, 4, 1.5, 1, kLeft).totalArea() == buildRectMesh(6, 8, 1.5, 1, kLeft).totalArea());
  CHECK(buildRectMesh(3, 5, 1.5, 0.7, kLeft).totalArea() ==
        doctest::Approx(buildRectMesh(6, 10, 1.5, 0.7, kLeft).totalArea()).epsilon(1e-15));
  for (int e = 0; e < b.triangleCount(); ++e) CHECK(b.area(e) > 0.0);

  CHECK_THROWS_AS(buildRectMesh(2, 2, 1, 1, BoundarySelector{}), std::invalid_argument);
  CHECK_THROWS_AS(buildRectMesh(0, 2, 1, 1, kLeft), std::invalid_argument);
}

TEST_CASE("mass matrix") {
  const Mesh2D m = buildRectMesh(1, 1, 1, 1, kLeft);
  const Eigen::MatrixXd mass = assembleMass(m).toDense();
  CHECK(m.area(0) == doctest::Approx(0.5));
  // node 1 lies only in the lower triangle {0, 1, 3}: diagonal area/12 * 2
  CHECK(mass(2, 2) == doctest::Approx(0.5 / 12 * 2));
  CHECK(mass(2, 6) == doctest::Approx(0.5 / 12));
  // per component the entries sum to the area
  double sum = 0.0;
  for (int i = 0; i < mass.rows(); i += 2)
    for (int j = 0; j < mass.cols(); j += 2) sum += mass(i, j);
  CHECK(sum == doctest::Approx(1.0));
  CHECK(mass(0, 1) == 0.0);
}

TEST_CASE("strain stiffness kernel and shear energy") {
  const Mesh2D m = buildRectMesh(4, 3, 1, 1, kLeft);
  const SparseSym k = assembleStrainStiffness(m);
  const Vector trans = interp(m, [](double, double) { return 1.0; }, [](double, double) { return 0.0; });
  CHECK(spmv(k, trans).norm() < 1e-12);
  const Vector rot = interp(m, [](double, double y) { return -y; }, [](double x, double) { return x; });
  CHECK(spmv(k, rot).norm() < 1e-12);
  const Vector shear = interp(m, [](double, double y) { return y; }, [](double, double) { return 0.0; });
  CHECK(shear.dot(spmv(k, shear)) == doctest::Approx(0.5));
}

TEST_CASE("strain of affine fields") {
  const Mesh2D m = buildRectMesh(3, 2, 2, 1, kLeft);
  const StressField s = strainOf(m, interp(m, [](double, double y) { return y; }, [](double, double) { return 0.0; }));
  const StressField c = strainOf(m, interp(m, [](double, double) { return 3.0; }, [](double, double) { return -1.0; }));
  const StressField d = strainOf(m, interp(m, [](double x, double) { return x; }, [](double, double y) { return -y; }));
  const StressField p = strainOf(m, interp(m, [](double x, double y) { return 2 * x + y; },
                                           [](double x, double y) { return 3 * x - y; }));
  for (int e = 0; e < m.triangleCount(); ++e) {
    CHECK(frobNorm(s.at(e) - SymMatd::make2(0, 0.5, 0)) < 1e-13);
    CHECK(frobNorm(c.at(e)) < 1e-13);
    CHECK(frobNorm(d.at(e) - SymMatd::diag(1, -1)) < 1e-13);
    CHECK(frobNorm(p.at(e) - SymMatd::make2(2, 2, -1)) < 1e-13);
  }
}

TEST_CASE("stress load") {
  const Mesh2D m = buildRectMesh(3, 3, 1, 1, kLeft);
  CHECK(stressLoad(m, StressField(m.triangleCount())).norm() == 0.0);
  const Vector vx = interp(m, [](double x, double) { return x; }, [](double, double) { return 0.0; });
  const StressField eye = StressField::uniform(m.triangleCount(), SymMatd::identity(2));
  CHECK(stressLoad(m, eye).dot(vx) == doctest::Approx(1.0));

  // adjoint of strainOf in the H inner product
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  StressField sigma(m.triangleCount());
  for (int e = 0; e < sigma.size(); ++e) sigma.set(e, SymMatd::make2(g(rng), g(rng), g(rng)));
  Vector v(m.dofCount());
  for (int i = 0; i < v.size(); ++i) v(i) = g(rng);
  const FemSpace space(m);
  CHECK(stressLoad(m, sigma).dot(v) == doctest::Approx(space.innerH(sigma, strainOf(m, v))).epsilon(1e-13));
}

TEST_CASE("galerkin consistency of the stress load") {
  const Mesh2D m = buildRectMesh(6, 6, 1, 1, kLeft);
  StressField sigma(m.triangleCount());
  for (int e = 0; e < sigma.size(); ++e) sigma.set(e, SymMatd::make2(std::sin(e), 0.3, std::cos(e)));
  const ConstrainedSystem sys = applyDirichlet(assembleStrainStiffness(m), stressLoad(m, sigma), m);
  const CgResult r = cgSolve(sys.matrix, sys.rhs, {1e-13, 5000, false});
  REQUIRE(r.converged);
  const Vector residual = spmv(sys.matrix, r.x) - sys.rhs;
  CHECK(residual.norm() <= 1e-10 * sys.rhs.norm());
}

TEST_CASE("dirichlet elimination") {
  const Mesh2D all = buildRectMesh(1, 1, 1, 1, BoundarySelector::all());
  const SparseSym a = constrainMatrix(all, assembleMass(all));
  CHECK((a.toDense() - Eigen::MatrixXd::Identity(8, 8)).norm() == 0.0);

  const Mesh2D m = buildRectMesh(2, 2, 1, 1, kLeft);
  int free = 0;
  for (int i = 0; i < m.nodeCount(); ++i) free += !m.isConstrained(i);
  CHECK(free * 2 == 12);

  const ConstrainedSystem sys =
      applyDirichlet(assembleMass(m).combined(1.0, assembleStrainStiffness(m), 1.0), Vector::Ones(m.dofCount()), m);
  const CgResult r = cgSolve(sys.matrix, sys.rhs);
  for (int i = 0; i < m.nodeCount(); ++i)
    if (m.isConstrained(i)) {
      CHECK(r.x(2 * i) == 0.0);
      CHECK(r.x(2 * i + 1) == 0.0);
    }
  const Eigen::MatrixXd d = sys.matrix.toDense();
  CHECK((d - d.transpose()).norm() == 0.0);
}

TEST_CASE("field norms") {
  const Mesh2D m = buildRectMesh(4, 4, 2, 1, kLeft);
  const FemSpace space(m);
  const Vector zero = Vector::Zero(m.dofCount());
  CHECK(space.normH(zero) == 0.0);
  CHECK(space.normV(zero) == 0.0);
  CHECK(space.dualNorm(zero) == 0.0);
  const Vector one = interp(m, [](double, double) { return 1.0; }, [](double, double) { return 0.0; });
  CHECK(space.normH(one) == doctest::Approx(std::sqrt(2.0)));
  CHECK(space.normV(one) == doctest::Approx(std::sqrt(2.0)));

  const Mesh2D unit = buildRectMesh(5, 5, 1, 1, kLeft);
  const FemSpace us(unit);
  CHECK(us.normH(StressField::uniform(unit.triangleCount(), SymMatd::diag(1, -1))) ==
        doctest::Approx(std::sqrt(2.0)));
  // the Riesz representative of A v has dual norm |v|_V
  Vector v = interpolateVelocity(unit, [](const Eigen::Vector2d& p) { return Eigen::Vector2d(p.x() * p.y(), p.x()); });
  const Vector r = spmv(us.h1Gram(), v);
  CHECK(us.dualNorm(r) == doctest::Approx(us.normV(v)).epsilon(1e-9));
}

TEST_CASE("body load integrates constants exactly") {
  const Mesh2D m = buildRectMesh(3, 2, 1.5, 1, kLeft);
  const Vector f = bodyLoad(m, [](const Eigen::Vector2d&) { return Eigen::Vector2d(0.0, -2.0); });
  double fx = 0, fy = 0;
  for (int i = 0; i < m.nodeCount(); ++i) {
    fx += f(2 * i);
    fy += f(2 * i + 1);
  }
  CHECK(fx == doctest::Approx(0.0));
  CHECK(fy == doctest::Approx(-3.0));
}

TEST_CASE("vtk writer") {
  const Mesh2D m = buildRectMesh(2, 1, 1, 1, kLeft);
  std::ostringstream out;
  writeVtk(out, m, Vector::Zero(m.dofCount()), StressField(m.triangleCount()));
  const std::string s = out.str();
  CHECK(s.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(s.find("POINTS 6") != std::string::npos);
  CHECK(s.find("CELLS 4 16") != std::string::npos);
  CHECK(s.find("TENSORS sigma") != std::string::npos);
  CHECK(s.find("VECTORS velocity") != std::string::npos);
}
