#include <doctest.h>

#include <cmath>

#include "dimsim/convergence.hpp"
#include "dimsim/errors.hpp"
#include "dimsim/problems.hpp"

using namespace dimsim;

TEST_CASE("least-squares order of an exact power law") {
  std::vector<double> h{0.1, 0.05, 0.025}, e;
  for (double x : h) e.push_back(3.0 * std::pow(x, 2.5));
  REQUIRE(least_squares_order(h, e).has_value());
  CHECK(*least_squares_order(h, e) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK_FALSE(least_squares_order({0.1}, {1.0}).has_value());
  CHECK_FALSE(least_squares_order({0.1, 0.05}, {0.0, 0.0}).has_value());
}

TEST_CASE("halving sequence is exact in binary") {
  const auto h = halving_sequence(0.125, 4);
  REQUIRE(h.size() == 4);
  CHECK(h[3] == 0.125 / 8);
}

TEST_CASE("convergence study rows and reference bookkeeping") {
  const Tableau t = catalog("DIMSIM2L");
  const SplitProblem p = test_equation(Complex(0.0, 1.0), -5.0);
  ConvergenceOptions opt;
  opt.h_list = {0.025, 0.1, 0.05};
  opt.reference = ReferenceKind::Exact;
  opt.start.mode = StartMode::ExactStages;
  const ConvergenceResult r = convergence_study(t, p, opt);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].h == 0.1);
  CHECK_FALSE(r.rows[0].order.has_value());
  CHECK(r.rows[1].order.has_value());
  CHECK(std::abs(*r.summary_order - 2.0) < 0.2);
  CHECK(r.start_amplification.has_value());
  CHECK_FALSE(r.start_sensitive);

  ConvergenceOptions self = opt;
  self.reference = ReferenceKind::SelfRefined;
  const ConvergenceResult s = convergence_study(t, p, self);
  CHECK(s.h_reference == doctest::Approx(0.025 / 20));
  CHECK(s.reference_method == "DIMSIM2L");
  CHECK(std::abs(*s.summary_order - 2.0) < 0.2);

  ConvergenceOptions shared = self;
  shared.reference_value = p.exact(p.t_end);
  const ConvergenceResult x = convergence_study(t, p, shared);
  CHECK(x.rows.back().error == r.rows.back().error);
}

TEST_CASE("failed rows are recorded and the study continues") {
  const SplitProblem p = test_equation(0.0, 2.0);  // h = 0.5 hits the pole of the stage equation
  ConvergenceOptions opt;
  opt.h_list = {0.5, 0.0625, 0.03125};
  opt.reference = ReferenceKind::Exact;
  opt.start.mode = StartMode::ExactStages;
  const ConvergenceResult r = convergence_study(catalog("DIMSIM1L"), p, opt);
  CHECK(r.rows[0].failed);
  CHECK_FALSE(r.rows[0].failure.empty());
  CHECK_FALSE(r.rows[1].failed);
  CHECK_FALSE(r.rows[2].failed);
  CHECK(r.summary_order.has_value());
}

TEST_CASE("perturbation probe is reproducible for a fixed seed") {
  const SplitProblem p = prothero_robinson(1.0);
  ConvergenceOptions opt;
  opt.h_list = halving_sequence(0.05, 3);
  opt.reference = ReferenceKind::Exact;
  opt.seed = 42;
  const auto a = convergence_study(catalog("DIMSIM3A"), p, opt);
  const auto b = convergence_study(catalog("DIMSIM3A"), p, opt);
  CHECK(*a.start_amplification == *b.start_amplification);
}

TEST_CASE("grid mismatch is caught before any run") {
  ConvergenceOptions opt;
  opt.h_list = {0.3};
  CHECK_THROWS_AS(convergence_study(catalog("DIMSIM2A"), test_equation(0.0, -1.0), opt), GridMismatchError);
}
