#include "dimsim/integrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "dimsim/errors.hpp"

namespace dimsim {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double max_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

bool all_finite(const Vector& v) { return v.allFinite(); }

SparseMatrix identity(int n) {
  SparseMatrix I(n, n);
  I.setIdentity();
  return I;
}

SparseMatrix jacobian_of(const JacobianFn& jac, const RhsFn& fn, const Vector& y) {
  return jac ? jac(y) : finite_difference_jacobian(fn, y);
}

// Radau IIA, three stages.
struct RadauCoefficients {
  Matrix A;
  RadauCoefficients() : A(3, 3) {
    const double r6 = std::sqrt(6.0);
    A << (88 - 7 * r6) / 360, (296 - 169 * r6) / 1800, (-2 + 3 * r6) / 225,  //
        (296 + 169 * r6) / 1800, (88 + 7 * r6) / 360, (-2 - 3 * r6) / 225,   //
        (16 - r6) / 36, (16 + r6) / 36, 1.0 / 9;
  }
};

Vector radau_step(const SplitProblem& prob, const Vector& y, double h, Counters& counters) {
  static const RadauCoefficients rc;
  const int m = prob.dim;
  SparseMatrix J = jacobian_of(prob.jac_g, prob.g, y);
  ++counters.jacobian_evals;
  if (prob.jac_f) J += prob.jac_f(y);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(J.nonZeros()) * 9 + 3 * m);
  for (int k = 0; k < 3 * m; ++k) trip.emplace_back(k, k, 1.0);
  for (int col = 0; col < J.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(J, col); it; ++it)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          trip.emplace_back(a * m + static_cast<int>(it.row()), b * m + static_cast<int>(it.col()),
                            -h * rc.A(a, b) * it.value());
  SparseMatrix K(3 * m, 3 * m);
  K.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<SparseMatrix, Eigen::AMDOrdering<int>> lu;
  lu.compute(K);
  ++counters.factorizations;
  if (lu.info() != Eigen::Success) throw ConvergenceError("Radau Newton matrix is singular");

  const double scale = std::max(1.0, max_norm(y));
  Vector Z = Vector::Zero(3 * m);
  Vector F(3 * m), R(3 * m);
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 30; ++it) {
    for (int a = 0; a < 3; ++a) {
      const Vector Ya = y + Z.segment(a * m, m);
      F.segment(a * m, m) = prob.f(Ya) + prob.g(Ya);
      ++counters.f_evals;
      ++counters.g_evals;
    }
    if (!all_finite(F)) throw ConvergenceError("non-finite right-hand side in Radau step");
    for (int a = 0; a < 3; ++a) {
      R.segment(a * m, m) = Z.segment(a * m, m);
      for (int b = 0; b < 3; ++b) R.segment(a * m, m) -= h * rc.A(a, b) * F.segment(b * m, m);
    }
    const Vector dZ = lu.solve(-R);
    ++counters.newton_iters;
    Z += dZ;
    const double d = max_norm(dZ);
    if (d <= 1e-14 * scale) return y + Z.segment(2 * m, m);
    if (it >= 2 && d >= 0.9 * prev) {
      if (d <= 1e-10 * scale) return y + Z.segment(2 * m, m);  // roundoff plateau
      throw ConvergenceError("Radau Newton iteration diverges");
    }
    prev = d;
  }
  throw ConvergenceError("Radau Newton iteration did not converge");
}

}  // namespace

void SplitProblem::validate() const {
  if (dim <= 0) throw InvalidArgument("problem dimension must be positive");
  if (!f || !g) throw InvalidArgument("problem needs both f and g");
  if (y0.size() != dim) throw InvalidArgument("initial state has the wrong dimension");
  if (!(t_end > t0)) throw InvalidArgument("t_end must exceed t0");
  if (time_index >= dim) throw InvalidArgument("time_index out of range");
}

SparseMatrix finite_difference_jacobian(const RhsFn& g, const Vector& y) {
  const Vector g0 = g(y);
  const auto n = y.size();
  std::vector<Eigen::Triplet<double>> trip;
  Vector yp = y;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double delta = std::sqrt(kEps) * std::max(1.0, std::abs(y(j)));
    yp(j) = y(j) + delta;
    const Vector col = (g(yp) - g0) / delta;
    yp(j) = y(j);
    for (Eigen::Index i = 0; i < n; ++i)
      if (col(i) != 0.0) trip.emplace_back(static_cast<int>(i), static_cast<int>(j), col(i));
  }
  SparseMatrix J(n, n);
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

NewtonSolver::NewtonSolver(RhsFn g, JacobianFn jac_g, NewtonOptions options)
    : g_(std::move(g)), jac_g_(std::move(jac_g)), options_(options) {
  if (options_.max_iters < 1) throw InvalidArgument("Newton max_iters must be at least 1");
}

void NewtonSolver::refresh(double hl, const Vector& at, Counters& counters) {
  const SparseMatrix J = jacobian_of(jac_g_, g_, at);
  ++counters.jacobian_evals;
  SparseMatrix K = identity(static_cast<int>(at.size())) - hl * J;
  K.makeCompressed();
  lu_.compute(K);
  ++counters.factorizations;
  if (lu_.info() != Eigen::Success) {
    has_factorization_ = false;
    throw SingularMatrixError("Newton matrix I - h*lambda*J is singular");
  }
  // SparseLU reports success on some exactly singular inputs; check the pivots.
  const double det_abs = std::abs(lu_.logAbsDeterminant());
  if (!std::isfinite(det_abs)) {
    has_factorization_ = false;
    throw SingularMatrixError("Newton matrix I - h*lambda*J is singular");
  }
  factored_hl_ = hl;
  has_factorization_ = true;
}

NewtonSolver::Result NewtonSolver::solve(double hl, const Vector& rhs, const Vector& guess, double tol,
                                         Counters& counters) {
  if (!(tol > 0.0)) throw InvalidArgument("Newton tolerance must be positive");
  Result out;
  if (hl == 0.0) {
    out.Y = rhs;
    out.G = g_(rhs);
    ++counters.g_evals;
    return out;
  }
  Vector Y = guess;
  bool fresh = false;
  if (!has_factorization_ || factored_hl_ != hl) {
    refresh(hl, Y, counters);
    fresh = true;
  }
  const double scale = std::max({1.0, max_norm(rhs), max_norm(guess)});
  double prev_res = std::numeric_limits<double>::infinity();
  bool restarted = false;
  for (int it = 0;; ++it) {
    const Vector gY = g_(Y);
    ++counters.g_evals;
    if (!all_finite(gY)) throw ConvergenceError("non-finite g during Newton iteration");
    const Vector res = Y - hl * gY - rhs;
    const double rn = max_norm(res);
    if (rn <= tol * scale) {
      out.Y = Y;
      out.G = (Y - rhs) / hl;
      out.iterations = it;
      return out;
    }
    if (it >= options_.max_iters) {
      if (!restarted && !fresh) {
        // The stored factorization may be stale; one restart with a fresh one.
        refresh(hl, Y, counters);
        fresh = restarted = true;
        it = -1;
        prev_res = std::numeric_limits<double>::infinity();
        continue;
      }
      throw ConvergenceError("Newton iteration did not converge in " + std::to_string(options_.max_iters) +
                             " iterations (residual " + std::to_string(rn) + ")");
    }
    if (std::isfinite(prev_res) && rn > options_.stall_ratio * prev_res && !fresh) {
      refresh(hl, Y, counters);
      fresh = true;
    } else {
      fresh = false;
    }
    const Vector delta = lu_.solve(-res);
    ++counters.newton_iters;
    ++out.iterations;
    Y += delta;
    prev_res = rn;
    if (max_norm(delta) <= 4.0 * kEps * std::max(1.0, max_norm(Y))) {
      // Increment at rounding level: the residual cannot be reduced further.
      out.Y = Y;
      out.G = (Y - rhs) / hl;
      return out;
    }
  }
}

Vector newton_stage_solve(double lambda, double h, const RhsFn& g, const JacobianFn& jac_g, const Vector& rhs,
                          const Vector& guess, double tol, int max_iters) {
  NewtonOptions opt;
  opt.max_iters = max_iters;
  NewtonSolver solver(g, jac_g, opt);
  Counters c;
  return solver.solve(h * lambda, rhs, guess, tol, c).Y;
}

std::string to_string(StartMode mode) {
  switch (mode) {
    case StartMode::ExactStages:
      return "exact-stages";
    case StartMode::ExactDerivatives:
      return "exact-derivatives";
    case StartMode::ReferenceBootstrap:
      return "reference-bootstrap";
  }
  return "unknown";
}

StartMode parse_start_mode(const std::string& text) {
  for (StartMode m : {StartMode::ExactStages, StartMode::ExactDerivatives, StartMode::ReferenceBootstrap})
    if (to_string(m) == text) return m;
  throw UnknownNameError("unknown start mode: " + text);
}

Stepper::Stepper(Tableau t, const SplitProblem& prob, NewtonOptions newton)
    : tab_(std::move(t)), prob_(prob), newton_(prob.g, prob.jac_g, newton) {
  tab_.validate();
  prob_.validate();
  U_lu_.compute(tab_.U);
  if (tab_.U.rows() != tab_.U.cols() || std::abs(U_lu_.determinant()) < 1e-14)
    throw SingularMatrixError("starting procedure needs an invertible U");
}

double Stepper::newton_tol(double h) const {
  if (newton_.options().tol > 0.0) return newton_.options().tol;
  return std::min(1e-12, std::pow(h, tab_.p + 1));
}

StepperState Stepper::start_from_stages(double t0, double h, const std::vector<Vector>& stages) {
  const int s = tab_.s;
  if (static_cast<int>(stages.size()) != s) throw InvalidArgument("need one value per stage");
  StepperState st;
  std::vector<Vector> F(s), G(s);
  for (int j = 0; j < s; ++j) {
    F[j] = prob_.f(stages[j]);
    G[j] = prob_.g(stages[j]);
  }
  const int m = prob_.dim;
  Matrix W(s, m);  // row i: Y_i - h sum_j (a_ij F_j + a*_ij G_j)
  for (int i = 0; i < s; ++i) {
    Vector row = stages[i];
    for (int j = 0; j < s; ++j) row -= h * (tab_.A(i, j) * F[j] + tab_.Astar(i, j) * G[j]);
    W.row(i) = row.transpose();
  }
  const Matrix Y0 = U_lu_.solve(W);
  st.t = t0;
  st.h = h;
  st.y_ext.resize(tab_.r);
  for (int i = 0; i < tab_.r; ++i) st.y_ext[i] = Y0.row(i).transpose();
  return st;
}

StepperState Stepper::start(double h, const StartOptions& options) {
  if (!(h >= 0.0)) throw InvalidArgument("stepsize must be non-negative");
  const int s = tab_.s;
  const double t0 = prob_.t0;
  std::vector<Vector> stages(s);
  switch (options.mode) {
    case StartMode::ExactStages: {
      if (!prob_.exact) throw InvalidArgument("exact-stages start needs an exact solution");
      for (int i = 0; i < s; ++i) stages[i] = prob_.exact(t0 + tab_.c(i) * h);
      return start_from_stages(t0, h, stages);
    }
    case StartMode::ReferenceBootstrap: {
      if (options.bootstrap_substeps < 1) throw InvalidArgument("bootstrap needs at least one substep");
      std::vector<int> order(s);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) { return tab_.c(a) < tab_.c(b); });
      Vector y = prob_.y0;
      double at = 0.0;
      for (int i : order) {
        const double target = tab_.c(i) * h;
        if (target > at) {
          y = radau_solve(prob_, t0 + at, y, t0 + target, (target - at) / options.bootstrap_substeps);
          at = target;
        }
        stages[i] = y;
      }
      return start_from_stages(t0, h, stages);
    }
    case StartMode::ExactDerivatives: {
      if (!prob_.taylor) throw InvalidArgument("exact-derivatives start needs Taylor data");
      const int p = tab_.p;
      const TaylorData td = prob_.taylor(t0, p);
      if (static_cast<int>(td.y.size()) < p + 1 || static_cast<int>(td.f.size()) < p ||
          static_cast<int>(td.g.size()) < p)
        throw InvalidArgument("Taylor data too short for the method order");
      const int m = prob_.dim;
      Matrix W(s, m);
      for (int i = 0; i < s; ++i) {
        Vector row = Vector::Zero(m);
        double fact = 1.0;
        for (int k = 0; k <= p; ++k) {
          if (k > 0) fact *= k;
          row += std::pow(tab_.c(i) * h, k) / fact * td.y[k];
        }
        for (int j = 0; j < s; ++j) {
          double fk = 1.0;
          for (int k = 0; k < p; ++k) {
            if (k > 0) fk *= k;
            const double w = h * std::pow(tab_.c(j) * h, k) / fk;
            row -= w * (tab_.A(i, j) * td.f[k] + tab_.Astar(i, j) * td.g[k]);
          }
        }
        W.row(i) = row.transpose();
      }
      const Matrix Y0 = U_lu_.solve(W);
      StepperState st;
      st.t = t0;
      st.h = h;
      st.y_ext.resize(tab_.r);
      for (int i = 0; i < tab_.r; ++i) st.y_ext[i] = Y0.row(i).transpose();
      return st;
    }
  }
  throw InvalidArgument("unknown start mode");
}

void Stepper::step(StepperState& st) {
  const int s = tab_.s;
  const double h = st.h;
  const double hl = h * tab_.lambda;
  const double tol = newton_tol(h);
  std::vector<Vector> F(s), G(s), Y(s);
  for (int i = 0; i < s; ++i) {
    Vector rhs = tab_.U(i, 0) * st.y_ext[0];
    for (int j = 1; j < tab_.r; ++j) rhs += tab_.U(i, j) * st.y_ext[j];
    for (int j = 0; j < i; ++j) rhs += h * (tab_.A(i, j) * F[j] + tab_.Astar(i, j) * G[j]);
    const Vector& guess = i > 0 ? Y[i - 1] : (st.stage_values.empty() ? rhs : st.stage_values.back());
    try {
      auto res = newton_.solve(hl, rhs, guess, tol, st.counters);
      Y[i] = std::move(res.Y);
      G[i] = std::move(res.G);
    } catch (const Error& e) {
      throw StepFailure(std::string("stage ") + std::to_string(i + 1) + ": " + e.what(), st.step_index);
    }
    F[i] = prob_.f(Y[i]);
    ++st.counters.f_evals;
    if (!all_finite(F[i]) || !all_finite(G[i]))
      throw StepFailure("non-finite right-hand side at stage " + std::to_string(i + 1), st.step_index);
    if (prob_.admissible && !prob_.admissible(Y[i]))
      throw StepFailure("inadmissible state at stage " + std::to_string(i + 1), st.step_index);
  }
  std::vector<Vector> next(tab_.r);
  for (int i = 0; i < tab_.r; ++i) {
    Vector v = tab_.V(i, 0) * st.y_ext[0];
    for (int j = 1; j < tab_.r; ++j) v += tab_.V(i, j) * st.y_ext[j];
    for (int j = 0; j < s; ++j) v += h * (tab_.B(i, j) * F[j] + tab_.Bstar(i, j) * G[j]);
    next[i] = std::move(v);
  }
  st.y_ext = std::move(next);
  st.stage_values = std::move(Y);
  ++st.step_index;
  st.t = prob_.t0 + static_cast<double>(st.step_index) * h;
}

Vector Stepper::finish(const StepperState& st) const {
  if (st.step_index == 0 || st.stage_values.empty()) throw InvalidArgument("finish needs at least one step");
  return st.stage_values.back();
}

long step_count(const SplitProblem& prob, double h) {
  if (!(h > 0.0)) throw InvalidArgument("stepsize must be positive");
  const double q = (prob.t_end - prob.t0) / h;
  const double n = std::round(q);
  if (n < 1.0 || std::abs(q - n) > 4.0 * kEps * std::max(1.0, q))
    throw GridMismatchError("stepsize " + std::to_string(h) + " does not divide the interval");
  return static_cast<long>(n);
}

Trajectory integrate(const Tableau& t, const SplitProblem& prob, double h, const IntegrateOptions& options) {
  const auto t_begin = std::chrono::steady_clock::now();
  const long n = step_count(prob, h);
  Stepper stepper(t, prob, options.newton);
  Trajectory out;
  StepperState st = stepper.start(h, options.start);
  if (options.after_start) options.after_start(st);
  if (options.record_trajectory) {
    out.t.push_back(prob.t0);
    out.y.push_back(prob.y0);
  }
  for (long k = 0; k < n; ++k) {
    stepper.step(st);
    if (options.record_trajectory) {
      out.t.push_back(st.t);
      out.y.push_back(st.stage_values.back());
    }
    if (options.record_stages) out.stages.push_back(st.stage_values);
  }
  out.y_final = stepper.finish(st);
  out.n_steps = n;
  out.final_state = std::move(st);
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return out;
}

Vector radau_solve(const SplitProblem& prob, double t0, const Vector& y0, double t1, double h_max,
                   Counters* counters) {
  Counters local;
  Counters& c = counters ? *counters : local;
  const double total = t1 - t0;
  if (total < 0.0) throw InvalidArgument("radau_solve needs t1 >= t0");
  if (total == 0.0) return y0;
  if (!(h_max > 0.0)) throw InvalidArgument("radau_solve needs h_max > 0");
  const long n = std::max(1L, static_cast<long>(std::ceil(total / h_max - 1e-9)));
  const double h = total / static_cast<double>(n);
  Vector y = y0;
  double done = 0.0;
  double hc = h;
  while (total - done > 1e-14 * total) {
    const double step = std::min(hc, total - done);
    try {
      y = radau_step(prob, y, step, c);
      done += step;
    } catch (const ConvergenceError&) {
      hc = 0.5 * step;
      if (hc < 1e-12 * total) throw;
    }
  }
  return y;
}

}  // namespace dimsim
