#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "dimsim/linalg.hpp"
#include "dimsim/tableau.hpp"

namespace dimsim {

using RhsFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<SparseMatrix(const Vector&)>;

/// Taylor data at a point of the exact solution: y^(k), (f o y)^(k) and
/// (g o y)^(k) for k = 0..order.
struct TaylorData {
  std::vector<Vector> y;
  std::vector<Vector> f;
  std::vector<Vector> g;
};

/// y' = f(y) + g(y) with f non-stiff and g stiff. Non-autonomous problems carry
/// time as state component `time_index` with t' = 1 inside f.
struct SplitProblem {
  std::string name;
  int dim = 0;
  RhsFn f;
  RhsFn g;
  JacobianFn jac_g;  // empty: finite-difference fallback
  JacobianFn jac_f;  // optional, used only by the Radau reference solver
  Vector y0;
  double t0 = 0.0;
  double t_end = 1.0;
  std::function<Vector(double)> exact;                  // optional
  std::function<TaylorData(double, int)> taylor;        // optional
  std::function<bool(const Vector&)> admissible;        // optional physics check
  int time_index = -1;

  void validate() const;
};

/// Column-by-column forward differences of g; used when jac_g is empty.
SparseMatrix finite_difference_jacobian(const RhsFn& g, const Vector& y);

struct Counters {
  long f_evals = 0;
  long g_evals = 0;
  long newton_iters = 0;
  long jacobian_evals = 0;
  long factorizations = 0;
};

struct NewtonOptions {
  double tol = 0.0;  // 0 selects min(1e-12, h^(p+1))
  int max_iters = 25;
  double stall_ratio = 0.5;
};

/// Modified Newton for Y - hl g(Y) = rhs that keeps its factorization of
/// I - hl J across calls and refreshes it only when convergence stalls or hl
/// changes.
class NewtonSolver {
 public:
  NewtonSolver(RhsFn g, JacobianFn jac_g, NewtonOptions options = {});

  struct Result {
    Vector Y;
    Vector G;  // g(Y) consistent with the stage relation: (Y - rhs) / hl
    int iterations = 0;
  };

  Result solve(double hl, const Vector& rhs, const Vector& guess, double tol, Counters& counters);

  const NewtonOptions& options() const { return options_; }

 private:
  void refresh(double hl, const Vector& at, Counters& counters);

  RhsFn g_;
  JacobianFn jac_g_;
  NewtonOptions options_;
  Eigen::SparseLU<SparseMatrix, Eigen::AMDOrdering<int>> lu_;
  double factored_hl_ = -1.0;
  bool has_factorization_ = false;
};

/// One-shot stage solve: Y with ||Y - h lambda g(Y) - rhs||_inf <= tol.
Vector newton_stage_solve(double lambda, double h, const RhsFn& g, const JacobianFn& jac_g, const Vector& rhs,
                          const Vector& guess, double tol, int max_iters = 25);

enum class StartMode {
  ExactStages,         // y(t0 + c_i h) from prob.exact
  ExactDerivatives,    // Taylor expansion from prob.taylor
  ReferenceBootstrap,  // y(t0 + c_i h) from Radau IIA substeps
};

std::string to_string(StartMode mode);
StartMode parse_start_mode(const std::string& text);

struct StepperState {
  double t = 0.0;
  double h = 0.0;
  long step_index = 0;
  std::vector<Vector> y_ext;
  std::vector<Vector> stage_values;
  Counters counters;
};

struct StartOptions {
  StartMode mode = StartMode::ReferenceBootstrap;
  int bootstrap_substeps = 8;  // Radau steps per abscissa gap
};

class Stepper {
 public:
  Stepper(Tableau t, const SplitProblem& prob, NewtonOptions newton = {});

  StepperState start(double h, const StartOptions& options = {});

  /// Starting vector from stage values Y_i ~ y(t0 + c_i h):
  /// y^[0] = U^{-1}(Y - h A F(Y) - h A* G(Y)).
  StepperState start_from_stages(double t0, double h, const std::vector<Vector>& stages);

  void step(StepperState& state);

  /// Last stage of the most recent step, which approximates y(t_n).
  Vector finish(const StepperState& state) const;

  const Tableau& tableau() const { return tab_; }
  double newton_tol(double h) const;

 private:
  Tableau tab_;
  const SplitProblem& prob_;
  NewtonSolver newton_;
  Eigen::PartialPivLU<Matrix> U_lu_;
};

struct IntegrateOptions {
  StartOptions start;
  NewtonOptions newton;
  bool record_trajectory = false;
  bool record_stages = false;
  std::function<void(StepperState&)> after_start;  // e.g. to perturb y^[0]
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vector> y;
  std::vector<std::vector<Vector>> stages;
  Vector y_final;
  StepperState final_state;
  long n_steps = 0;
  double wall_time = 0.0;
};

/// Number of uniform steps of size h covering the problem interval; throws
/// GridMismatchError when (t_end - t0)/h is not an integer to rounding.
long step_count(const SplitProblem& prob, double h);

Trajectory integrate(const Tableau& t, const SplitProblem& prob, double h, const IntegrateOptions& options = {});

/// Three-stage Radau IIA (order 5) with simplified Newton on J_g (+ J_f when
/// provided). Steps of at most h_max, halved on Newton failure.
Vector radau_solve(const SplitProblem& prob, double t0, const Vector& y0, double t1, double h_max,
                   Counters* counters = nullptr);

}  // namespace dimsim
