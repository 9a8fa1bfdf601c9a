#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dimsim/integrator.hpp"
#include "dimsim/problems.hpp"
#include "dimsim/tableau.hpp"

using namespace dimsim;

namespace {

/// Largest entry of |J - J_cd| relative to max(1, |J|).
double jacobian_mismatch(const SplitProblem& p, const Vector& y) {
  const Matrix J = Matrix(p.jac_g(y));
  Matrix Jcd(p.dim, p.dim);
  for (int j = 0; j < p.dim; ++j) {
    const double d = 1e-6 * std::max(1.0, std::abs(y(j)));
    Vector yp = y, ym = y;
    yp(j) += d;
    ym(j) -= d;
    Jcd.col(j) = (p.g(yp) - p.g(ym)) / (2.0 * d);
  }
  return (J - Jcd).cwiseAbs().maxCoeff() / std::max(1.0, J.cwiseAbs().maxCoeff());
}

Vector random_state(const SplitProblem& p, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector y(p.dim);
  for (int i = 0; i < p.dim; ++i) y(i) = u(rng);
  if (p.time_index >= 0) y(p.time_index) = 0.5 * (lo + hi);
  return y;
}

}  // namespace

TEST_CASE("analytic Jacobians match central differences") {
  std::mt19937_64 rng(11);
  struct Case {
    SplitProblem p;
    double lo, hi;
  };
  std::vector<Case> cases{{test_equation(Complex(0.0, 1.0), Complex(-3.0, 2.0)), -1.0, 1.0},
                          {advection_reaction(400), 0.0, 1.0},
                          {adsorption_desorption(101), 0.0, 1.0},
                          {shallow_water(201, 1e-8), 0.5, 1.5},
                          {prothero_robinson(0.1), 1.0, 3.0}};
  for (const auto& c : cases) {
    CAPTURE(c.p.name);
    REQUIRE(c.p.jac_g);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) worst = std::max(worst, jacobian_mismatch(c.p, random_state(c.p, rng, c.lo, c.hi)));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("central stencils are exact on low-degree polynomials") {
  const int N = 40;
  const double dx = 1.0 / N;
  for (int deg = 0; deg <= 4; ++deg) {
    CAPTURE(deg);
    Vector u(N);
    for (int i = 0; i < N; ++i) u(i) = std::pow((i + 1) * dx, deg);
    const Vector d = central4_derivative(u, deg == 0 ? 1.0 : 0.0, dx);
    for (int i = 0; i < N; ++i) {
      const double x = (i + 1) * dx;
      const double exact = deg == 0 ? 0.0 : deg * std::pow(x, deg - 1);
      const bool boundary = i < 2 || i >= N - 2;
      if (boundary && deg > 3) continue;
      CHECK(d(i) == doctest::Approx(exact).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("WENO5 derivative of a constant is zero") {
  const Grid1D grid = Grid1D::make(32, BoundaryKind::Periodic);
  const Vector d = weno5_derivative(Vector::Constant(32, 2.5), 1.0, grid);
  CHECK(d.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("WENO5 converges at fifth order on smooth periodic data") {
  auto error = [](int N) {
    const Grid1D grid = Grid1D::make(N, BoundaryKind::Periodic);
    Vector u(N);
    for (int i = 0; i < N; ++i) u(i) = std::sin(2.0 * std::numbers::pi * grid.x(i));
    const Vector d = weno5_derivative(u, 1.0, grid);
    double e = 0.0;
    for (int i = 0; i < N; ++i)
      e = std::max(e, std::abs(d(i) - 2.0 * std::numbers::pi * std::cos(2.0 * std::numbers::pi * grid.x(i))));
    return e;
  };
  const double ratio = error(64) / error(128);
  CHECK(ratio > 32.0 * 0.8);
  CHECK(ratio < 32.0 * 1.2);
}

TEST_CASE("WENO5 reconstruction does not overshoot a step") {
  const int N = 64;
  const Grid1D grid = Grid1D::make(N, BoundaryKind::Periodic);
  Vector u(N);
  for (int i = 0; i < N; ++i) u(i) = grid.x(i) < 0.5 ? 1.0 : 0.0;
  WenoScheme scheme;
  for (int i = 2; i < N - 2; ++i) {
    const double v = scheme.reconstruct(u.data() + i - 2);
    CHECK(v >= -1e-10);
    CHECK(v <= 1.0 + 1e-10);
  }
}

TEST_CASE("shallow water: equilibrium start, mass conservation, cheap Newton") {
  const SplitProblem p = shallow_water(201, 1e-8);
  CHECK(p.g(p.y0).cwiseAbs().maxCoeff() < 1e-14);
  const int N = 201;
  const double dx = 1.0 / N;
  const Vector dydt = p.f(p.y0 + 0.1 * p.g(p.y0));
  CHECK(std::abs(dydt.head(N).sum() * dx) < 1e-12);

  IntegrateOptions io;
  io.record_trajectory = true;
  const double h = 0.125 / 64;
  const Trajectory tr = integrate(catalog("DIMSIM2L"), p, h, io);
  double mass0 = tr.y.front().head(N).sum() * dx;
  for (std::size_t k = 1; k < tr.y.size(); ++k) {
    const double mass = tr.y[k].head(N).sum() * dx;
    CHECK(std::abs(mass - mass0) < 1e-10);
    mass0 = mass;
  }
  const Counters& c = tr.final_state.counters;
  CHECK(double(c.newton_iters) / double(tr.n_steps * 2) <= 3.0);
  CHECK(p.admissible(tr.y_final));
}

TEST_CASE("adsorption-desorption stiffness and phases") {
  const SplitProblem p = adsorption_desorption(101);
  CHECK(p.g(p.y0).cwiseAbs().maxCoeff() == 0.0);
  const Matrix J = Matrix(p.jac_g(p.y0));
  const int N = 101;
  Eigen::Matrix2d block;
  block << J(0, 0), J(0, N), J(N, 0), J(N, N);
  const Eigen::Vector2cd ev = block.eigenvalues();
  const double big = std::max(std::abs(ev(0)), std::abs(ev(1)));
  const double small = std::min(std::abs(ev(0)), std::abs(ev(1)));
  CHECK(big >= 1e6);
  CHECK(small < 1e-6 * big);
  CHECK(p.t_end == 1.25);
}

TEST_CASE("problems have finite outputs over their time spans") {
  IntegrateOptions io;
  struct Run {
    SplitProblem p;
    double h;
  };
  std::vector<Run> runs{{advection_reaction(400), 1.0 / 1024},
                        {adsorption_desorption(101), 1.25 / 256},
                        {shallow_water(201, 1e-8), 0.125 / 32},
                        {prothero_robinson(0.1), 1.0 / 64}};
  for (const auto& r : runs) {
    CAPTURE(r.p.name);
    const Trajectory tr = integrate(catalog("DIMSIM2L"), r.p, r.h, io);
    CHECK(tr.y_final.allFinite());
  }
}

TEST_CASE("problem registry") {
  for (const auto& name : problem_names()) CHECK_NOTHROW(make_problem(name).validate());
  ProblemParams pp;
  pp.N = 50;
  CHECK(make_problem("shallow_water", pp).dim == 100);
  CHECK_THROWS(make_problem("nope"));
}
