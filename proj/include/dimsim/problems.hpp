#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dimsim/integrator.hpp"
#include "dimsim/linalg.hpp"

namespace dimsim {

enum class BoundaryKind { DirichletLeft, Periodic, Ghost };

/// Uniform grid on [0, length] with N intervals, dx = length / N.
struct Grid1D {
  int N = 0;
  double length = 1.0;
  double dx = 0.0;
  BoundaryKind boundary = BoundaryKind::Periodic;

  static Grid1D make(int N, BoundaryKind boundary, double length = 1.0);
  double x(int i) const { return i * dx; }
};

/// Three ghost values beyond each end, ordered outward from the boundary.
struct GhostValues {
  std::array<double, 3> left{};
  std::array<double, 3> right{};
};

/// WENO5-JS parameters: smoothness-indicator regularization and linear weights.
struct WenoScheme {
  double epsilon = 1e-6;
  std::array<double, 3> ideal{0.1, 0.6, 0.3};

  /// Value at x_{i+1/2} from the left-biased stencil v[0..4] = v_{i-2..i+2}.
  double reconstruct(const double* v) const;
};

/// d/dx of a flux split into F+ and F- (e.g. global Lax-Friedrichs). Both
/// inputs carry three ghost entries on each side, so their length is n + 6.
Vector weno5_split_derivative(const Vector& fplus_ext, const Vector& fminus_ext, double dx,
                              const WenoScheme& scheme = {});

/// Upwind WENO5 derivative of nodal values for transport with the given
/// velocity sign. Periodic grids wrap; other grids need ghost values.
Vector weno5_derivative(const Vector& values, double velocity_sign, const Grid1D& grid,
                        const std::optional<GhostValues>& ghosts = std::nullopt, const WenoScheme& scheme = {});

/// Derivative of nodal values u_1..u_N on [0, 1] with Dirichlet value u_0:
/// fourth-order central differences inside, third-order one-sided stencils
/// at the first and last two nodes.
Vector central4_derivative(const Vector& u, double u0, double dx);

/// y' = lambda0 y + lambda1 y on complex y stored as (Re y, Im y).
SplitProblem test_equation(Complex lambda0, Complex lambda1, Complex y0 = 1.0, double t_end = 1.0);

/// State (u_1..u_N, v_1..v_N, t).
SplitProblem advection_reaction(int N = 400);

/// State (u_1..u_N, v_1..v_N, t) on cell centers, with ghost cells.
SplitProblem adsorption_desorption(int N = 101);

/// State (h_0..h_{N-1}, hv_0..hv_{N-1}) on a periodic grid of N points.
SplitProblem shallow_water(int N = 201, double epsilon = 1e-8, double t_end = 0.125);

/// y' = [phi'(t) + phi(t)^2 - y^2] + [(phi(t) - y) / epsilon] with exact
/// solution y = phi(t) = 2 + sin(2t); state (y, t).
SplitProblem prothero_robinson(double epsilon = 0.1, double t_end = 1.0);

/// f = g = 0.
SplitProblem constant_problem(int dim = 1, double t_end = 1.0);

struct ProblemParams {
  std::optional<int> N;
  std::optional<double> epsilon;
  std::optional<double> t_end;
  Complex lambda0{0.0, 0.0};
  Complex lambda1{-1.0, 0.0};
};

const std::vector<std::string>& problem_names();

/// Throws UnknownNameError.
SplitProblem make_problem(const std::string& name, const ProblemParams& params = {});

}  // namespace dimsim
