#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "dimsim/errors.hpp"
#include "dimsim/stability.hpp"
#include "dimsim/tableau.hpp"

using namespace dimsim;

TEST_CASE("Lagrange integrals integrate the interpolation basis exactly") {
  Vector c(3);
  c << 0.0, 0.4, 1.0;
  const auto L = lagrange_integrals(c);
  for (int k = 0; k < 3; ++k) {
    const Vector ck = c.array().pow(k);
    for (int i = 0; i < 3; ++i) {
      CHECK(L.B0.row(i).dot(ck) == doctest::Approx(std::pow(1.0 + c(i), k + 1) / (k + 1)).epsilon(1e-13));
      CHECK(L.B1.row(i).dot(ck) == doctest::Approx(std::pow(1.0 + c(i), k)).epsilon(1e-13));
      CHECK(L.B2.row(i).dot(ck) == doctest::Approx(std::pow(c(i), k + 1) / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("coinciding abscissae are rejected") {
  Vector c(2);
  c << 0.5, 0.5;
  CHECK_THROWS_AS(lagrange_integrals(c), DegenerateBasisError);
}

TEST_CASE("every catalog method satisfies the order and stage-order conditions") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    const Tableau t = catalog(name);
    CHECK_NOTHROW(t.validate());
    CHECK(t.p == t.s);
    CHECK(t.q == t.p);
    CHECK(verify_order(t).max_residual() < 1e-10);
    for (int i = 0; i < t.s; ++i) {
      CHECK(t.Astar(i, i) == doctest::Approx(t.lambda));
      for (int j = i; j < t.s; ++j) CHECK(t.A(i, j) == 0.0);
    }
  }
}

TEST_CASE("transformed methods keep order and linear stability") {
  const Tableau t = catalog("DIMSIM3L");
  Matrix T(3, 3);
  T << 2.0, 0.3, -0.1, 0.0, 1.0, 0.5, 0.2, 0.0, 1.5;
  const Tableau tt = transform(t, T);
  CHECK(verify_order(tt).max_residual() < 1e-10);
  const Complex z0(-0.7, 0.4), z1(-3.0, 2.0);
  CHECK(spectral_radius(stability_matrix(tt, z0, z1)) ==
        doctest::Approx(spectral_radius(stability_matrix(t, z0, z1))).epsilon(1e-12));
  CHECK_THROWS_AS(transform(t, Matrix::Zero(3, 3)), SingularMatrixError);
}

TEST_CASE("perturbed coefficients fail the order check") {
  Tableau t = catalog("DIMSIM2A");
  t.B(0, 0) += 1e-3;
  CHECK(verify_order(t).max_residual() > 1e-5);
}

TEST_CASE("tableau JSON uses the documented field names and round-trips") {
  const Tableau t = catalog("DIMSIM4A");
  const nlohmann::json j = t;
  for (const char* key : {"s", "r", "p", "q", "c", "A", "Astar", "U", "B", "Bstar", "V", "lambda"})
    CHECK(j.contains(key));
  const Tableau back = j.get<Tableau>();
  CHECK(back.s == t.s);
  CHECK((back.A - t.A).norm() == 0.0);
  CHECK((back.Bstar - t.Bstar).norm() == 0.0);
  CHECK(back.lambda == t.lambda);
}

TEST_CASE("unknown catalog names are reported") { CHECK_THROWS_AS(catalog("BOGUS"), UnknownNameError); }
