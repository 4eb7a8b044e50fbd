#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "vmproj/charts.hpp"
#include "vmproj/verify.hpp"

using namespace vmproj;

namespace {

const double kRt2 = std::sqrt(2.0);
const double kRt3 = std::sqrt(3.0);

ChartVec<double> coords(std::initializer_list<double> v) {
  ChartVec<double> x(static_cast<int>(v.size()));
  int k = 0;
  for (double e : v) x(k++) = e;
  return x;
}

}  // namespace

TEST_CASE("psi1") {
  CHECK((psi1(kRt2, 2) - SmallMat<double>::Identity(2, 2)).norm() < 1e-15);
  CHECK(psi1(0.0, 3).norm() == 0.0);
  CHECK((psi1(kRt3, 3) - SmallMat<double>::Identity(3, 3)).norm() < 1e-15);
  CHECK(psi1(-2.5, 3).norm() == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("psi2") {
  SmallMat<double> d(2, 2);
  d << 1, 0, 0, -1;
  CHECK((psi2(coords({kRt2, 0, 0}), 2) - d).norm() < 1e-15);
  CHECK(psi2(ChartVec<double>(ChartVec<double>::Zero(8)), 3).norm() == 0.0);
  SmallMat<double> e12 = SmallMat<double>::Zero(2, 2);
  e12(0, 1) = 1;
  CHECK((psi2(coords({0, 1, 0}), 2) - e12).norm() == 0.0);
  CHECK_THROWS_AS(psi2(coords({1, 2}), 2), std::invalid_argument);
}

TEST_CASE("diagonal basis is orthonormal and trace free") {
  for (int d : {2, 3}) {
    for (int i = 1; i < d; ++i) {
      const auto ei = chartDiagBasis<double>(i, d);
      CHECK(std::abs(ei.trace()) < 1e-15);
      for (int j = 1; j < d; ++j)
        CHECK(frobInner<double>(ei, chartDiagBasis<double>(j, d)) == doctest::Approx(i == j ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("decompose") {
  DevCoords<double> c = decompose(SymMatd::identity(2));
  CHECK(c.lambda == doctest::Approx(kRt2));
  CHECK(c.x.norm() < 1e-15);

  c = decompose(SymMatd::diag(1, -1));
  CHECK(std::abs(c.lambda) < 1e-15);
  CHECK(c.x(0) == doctest::Approx(kRt2));
  CHECK(std::abs(c.x(1)) + std::abs(c.x(2)) == 0.0);

  c = decompose(SymMatd::diag(3, 1));
  CHECK(c.lambda == doctest::Approx(2 * kRt2));
  CHECK(c.x(0) == doctest::Approx(kRt2));

  SmallMat<double> a(3, 3);
  a << 1, 2, 3, 4, 5, 6, 7, 8, 10;
  c = decompose<double>(a);
  CHECK((psi1(c.lambda, 3) + psi2(c.x, 3) - a).norm() < 1e-13);
}

TEST_CASE("chart membership") {
  CHECK(krContainsViaChart(SymMatd::identity(2), 0.0));
  CHECK_FALSE(krContainsViaChart(SymMatd::diag(1, -1), 1.0));
  CHECK(krContainsViaChart(SymMatd::diag(1, -1), kRt2 + 1e-15));
}

TEST_CASE("argmin oracle") {
  SUBCASE("F inside K_R") {
    const auto r = argminOracle(SymMatd::identity(2), 1.0, 100000, 3);
    // lambda grid contains lambda_F; the residual is the smallest sampled |x|
    CHECK(r.bestDistance < 0.15);
  }
  SUBCASE("F outside K_R") {
    const SymMatd f = SymMatd::diag(2, 0);
    const auto r = argminOracle(f, 1.0, 100000, 5);
    CHECK(r.bestDistance >= (kRt2 - 1) - 1e-6);
    CHECK(r.bestDistance < (kRt2 - 1) + 0.05);
  }
  SUBCASE("R = 0 gives spherical points") {
    const SymMatd f = SymMatd::make2(1, 0.5, -2);
    const auto r = argminOracle(f, 0.0, 2000, 7);
    const SmallMat<double> b = r.bestPoint;
    CHECK(std::abs(b(0, 1)) + std::abs(b(1, 0)) + std::abs(b(0, 0) - b(1, 1)) < 1e-14);
    CHECK(r.bestDistance >= frobNorm(deviator(f)) - 1e-12);
  }
  SUBCASE("deterministic in the seed") {
    const auto a = argminOracle(SymMatd::diag(2, 0), 1.0, 5000, 11);
    const auto b = argminOracle(SymMatd::diag(2, 0), 1.0, 5000, 11);
    CHECK(a.bestDistance == b.bestDistance);
  }
}

TEST_CASE("inclusion equivalence check") {
  const SymMatd zero = SymMatd::zero(2);
  const SymMatd h = SymMatd::diag(1, -1);
  SUBCASE("inactive constraint") {
    const auto r = inclusionEquivalenceCheck(zero, zero, h, zero, 100.0, 0.1, 1000, 1);
    CHECK(r.maxViolation == 0.0);
    CHECK(r.sigmaB == 0.1 * h);
  }
  SUBCASE("radial projection") {
    const auto r = inclusionEquivalenceCheck(zero, zero, h, zero, 1.0, 10.0, 1000, 2);
    CHECK(frobNorm(r.sigmaB - SymMatd::diag(1 / kRt2, -1 / kRt2)) < 1e-14);
    CHECK(r.maxViolation <= 1e-10);
  }
  SUBCASE("spherical shift leaves the deviator alone") {
    const SymMatd p = SymMatd::diag(5, 5);
    const auto r = inclusionEquivalenceCheck(zero, zero, h, p, 1.0, 10.0, 1000, 3);
    CHECK(frobNorm(r.sigmaB - SymMatd::diag(1 / kRt2, -1 / kRt2)) < 1e-13);
    CHECK(r.maxViolation <= 1e-10);
  }
}

TEST_CASE("property suites pass and catch broken tolerances") {
  for (int d : {2, 3}) {
    for (const auto& s : phiSuites(d, 2000, 17, 1e-10, 1e-12)) CHECK_MESSAGE(s.passed(), s.name);
    for (const auto& s : chartSuites(d, 2000, 19, 1e-12)) CHECK_MESSAGE(s.passed(), s.name);
    CHECK(inclusionSuite(d, 100, 50, 23, 1e-10).passed());
  }
  CHECK(oracleSuite(5, 20000, 29, 1e-12).passed());

  const auto broken = phiSuites(2, 200, 17, -1.0, -1.0);
  CHECK(std::none_of(broken.begin(), broken.end(), [](const SuiteResult& s) { return s.passed(); }));
}

TEST_CASE("verify report gating") {
  VerifyReport rep;
  SuiteResult ok;
  ok.name = "ok";
  ok.tolerance = 1.0;
  SuiteResult info;
  info.name = "info";
  info.maxViolation = 5.0;
  info.gating = false;
  rep.suites = {ok, info};
  CHECK(rep.passed());
  ok.maxViolation = 2.0;
  rep.suites.push_back(ok);
  CHECK_FALSE(rep.passed());
}
