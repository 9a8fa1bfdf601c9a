#include "dimsim/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dimsim/errors.hpp"

namespace dimsim {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOmega = 2.0;  // Prothero-Robinson solution frequency

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(int n, const Triplets& trip) {
  SparseMatrix M(n, n);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

Vector periodic_extend(const Vector& v) {
  const auto n = v.size();
  Vector ext(n + 6);
  ext.segment(3, n) = v;
  for (int k = 0; k < 3; ++k) {
    ext(2 - k) = v(n - 1 - k);
    ext(n + 3 + k) = v(k);
  }
  return ext;
}

Vector ghost_extend(const Vector& v, const GhostValues& g) {
  const auto n = v.size();
  Vector ext(n + 6);
  ext.segment(3, n) = v;
  for (int k = 0; k < 3; ++k) {
    ext(2 - k) = g.left[k];
    ext(n + 3 + k) = g.right[k];
  }
  return ext;
}

Vector complex_to_real(Complex z) { return Vector{{z.real(), z.imag()}}; }

SparseMatrix complex_multiplier(Complex a) {
  Triplets trip{{0, 0, a.real()}, {0, 1, -a.imag()}, {1, 0, a.imag()}, {1, 1, a.real()}};
  return from_triplets(2, trip);
}

}  // namespace

Grid1D Grid1D::make(int N, BoundaryKind boundary, double length) {
  if (N < 1 || !(length > 0.0)) throw InvalidArgument("grid needs N >= 1 and positive length");
  Grid1D g;
  g.N = N;
  g.length = length;
  g.dx = length / N;
  g.boundary = boundary;
  return g;
}

double WenoScheme::reconstruct(const double* v) const {
  const double q0 = (2 * v[0] - 7 * v[1] + 11 * v[2]) / 6;
  const double q1 = (-v[1] + 5 * v[2] + 2 * v[3]) / 6;
  const double q2 = (2 * v[2] + 5 * v[3] - v[4]) / 6;
  const auto sq = [](double x) { return x * x; };
  const double b0 = 13.0 / 12 * sq(v[0] - 2 * v[1] + v[2]) + 0.25 * sq(v[0] - 4 * v[1] + 3 * v[2]);
  const double b1 = 13.0 / 12 * sq(v[1] - 2 * v[2] + v[3]) + 0.25 * sq(v[1] - v[3]);
  const double b2 = 13.0 / 12 * sq(v[2] - 2 * v[3] + v[4]) + 0.25 * sq(3 * v[2] - 4 * v[3] + v[4]);
  const double a0 = ideal[0] / sq(epsilon + b0);
  const double a1 = ideal[1] / sq(epsilon + b1);
  const double a2 = ideal[2] / sq(epsilon + b2);
  return (a0 * q0 + a1 * q1 + a2 * q2) / (a0 + a1 + a2);
}

Vector weno5_split_derivative(const Vector& fplus_ext, const Vector& fminus_ext, double dx,
                              const WenoScheme& scheme) {
  if (fplus_ext.size() != fminus_ext.size() || fplus_ext.size() < 7)
    throw InvalidArgument("WENO5 needs matching extended arrays with three ghosts per side");
  const auto n = fplus_ext.size() - 6;
  // flux(k) approximates the interface to the right of extended index k + 2.
  Vector flux(n + 1);
  double mirrored[5];
  for (Eigen::Index k = 0; k <= n; ++k) {
    const Eigen::Index e = k + 2;
    const double left = scheme.reconstruct(fplus_ext.data() + e - 2);
    for (int j = 0; j < 5; ++j) mirrored[j] = fminus_ext(e + 3 - j);
    flux(k) = left + scheme.reconstruct(mirrored);
  }
  return (flux.tail(n) - flux.head(n)) / dx;
}

Vector weno5_derivative(const Vector& values, double velocity_sign, const Grid1D& grid,
                        const std::optional<GhostValues>& ghosts, const WenoScheme& scheme) {
  if (values.size() < 6) throw InvalidArgument("WENO5 needs at least 6 nodes");
  Vector ext;
  if (grid.boundary == BoundaryKind::Periodic) {
    ext = periodic_extend(values);
  } else {
    if (!ghosts) throw InvalidArgument("non-periodic WENO5 needs ghost values");
    ext = ghost_extend(values, *ghosts);
  }
  const Vector zero = Vector::Zero(ext.size());
  if (velocity_sign > 0) return weno5_split_derivative(ext, zero, grid.dx, scheme);
  if (velocity_sign < 0) return weno5_split_derivative(zero, ext, grid.dx, scheme);
  return Vector::Zero(values.size());
}

Vector central4_derivative(const Vector& u, double u0, double dx) {
  const auto N = u.size();
  if (N < 4) throw InvalidArgument("central4_derivative needs at least 4 nodes");
  // at(i) is u_i for i = 0..N with u_0 the boundary value.
  const auto at = [&](Eigen::Index i) { return i == 0 ? u0 : u(i - 1); };
  Vector d(N);
  d(0) = (-2 * at(0) - 3 * at(1) + 6 * at(2) - at(3)) / (6 * dx);
  for (Eigen::Index i = 2; i <= N - 2; ++i)
    d(i - 1) = (at(i - 2) - 8 * at(i - 1) + 8 * at(i + 1) - at(i + 2)) / (12 * dx);
  d(N - 2) = (at(N - 3) - 6 * at(N - 2) + 3 * at(N - 1) + 2 * at(N)) / (6 * dx);
  d(N - 1) = (-2 * at(N - 3) + 9 * at(N - 2) - 18 * at(N - 1) + 11 * at(N)) / (6 * dx);
  return d;
}

SplitProblem test_equation(Complex lambda0, Complex lambda1, Complex y0, double t_end) {
  SplitProblem p;
  p.name = "test";
  p.dim = 2;
  const SparseMatrix L0 = complex_multiplier(lambda0), L1 = complex_multiplier(lambda1);
  p.f = [L0](const Vector& y) -> Vector { return L0 * y; };
  p.g = [L1](const Vector& y) -> Vector { return L1 * y; };
  p.jac_g = [L1](const Vector&) { return L1; };
  p.jac_f = [L0](const Vector&) { return L0; };
  p.y0 = complex_to_real(y0);
  p.t_end = t_end;
  const Complex mu = lambda0 + lambda1;
  p.exact = [mu, y0](double t) { return complex_to_real(std::exp(mu * t) * y0); };
  p.taylor = [lambda0, lambda1, mu, y0](double t, int order) {
    TaylorData td;
    const Complex base = std::exp(mu * t) * y0;
    Complex mk = 1.0;
    for (int k = 0; k <= order; ++k) {
      td.y.push_back(complex_to_real(mk * base));
      td.f.push_back(complex_to_real(lambda0 * mk * base));
      td.g.push_back(complex_to_real(lambda1 * mk * base));
      mk *= mu;
    }
    return td;
  };
  return p;
}

SplitProblem advection_reaction(int N) {
  if (N < 8) throw InvalidArgument("advection_reaction needs N >= 8");
  constexpr double alpha1 = 1.0, k1 = 1e6, k2 = 2e6, s1 = 0.0, s2 = 1.0;
  const double dx = 1.0 / N;
  const int t_idx = 2 * N;
  const auto gamma1 = [](double t) { return 1.0 - std::pow(std::sin(12 * t), 4); };
  const auto dgamma1 = [](double t) { return -48.0 * std::pow(std::sin(12 * t), 3) * std::cos(12 * t); };

  SplitProblem p;
  p.name = "advection_reaction";
  p.dim = 2 * N + 1;
  p.time_index = t_idx;
  p.t_end = 1.0;
  p.f = [=](const Vector& y) -> Vector {
    Vector out = Vector::Zero(y.size());
    out.head(N) = -alpha1 * central4_derivative(y.head(N), gamma1(y(t_idx)), dx);
    out(t_idx) = 1.0;
    return out;
  };
  p.g = [=](const Vector& y) -> Vector {
    Vector out = Vector::Zero(y.size());
    const auto u = y.head(N), v = y.segment(N, N);
    out.head(N) = (-k1 * u + k2 * v).array() + s1;
    out.segment(N, N) = (k1 * u - k2 * v).array() + s2;
    return out;
  };
  Triplets gt;
  for (int i = 0; i < N; ++i) {
    gt.emplace_back(i, i, -k1);
    gt.emplace_back(i, N + i, k2);
    gt.emplace_back(N + i, i, k1);
    gt.emplace_back(N + i, N + i, -k2);
  }
  const SparseMatrix Jg = from_triplets(p.dim, gt);
  p.jac_g = [Jg](const Vector&) { return Jg; };

  // Advection operator: apply the stencil to unit vectors once.
  Triplets ft;
  {
    Vector e = Vector::Zero(N);
    for (int j = 0; j < N; ++j) {
      e(j) = 1.0;
      const Vector col = -alpha1 * central4_derivative(e, 0.0, dx);
      for (int i = 0; i < N; ++i)
        if (col(i) != 0.0) ft.emplace_back(i, j, col(i));
      e(j) = 0.0;
    }
  }
  const double boundary_weight = -alpha1 * (-2.0) / (6 * dx);  // d f_1 / d u_0
  p.jac_f = [=](const Vector& y) {
    Triplets t = ft;
    t.emplace_back(0, t_idx, boundary_weight * dgamma1(y(t_idx)));
    return from_triplets(2 * N + 1, t);
  };

  p.y0 = Vector::Zero(p.dim);
  for (int i = 1; i <= N; ++i) {
    const double u = 1.0 + s2 * i * dx;
    p.y0(i - 1) = u;
    p.y0(N + i - 1) = (k1 * u + s2) / k2;
  }
  p.y0(t_idx) = 0.0;
  return p;
}

SplitProblem adsorption_desorption(int N) {
  if (N < 16) throw InvalidArgument("adsorption_desorption needs N >= 16");
  constexpr double kappa = 1e6, k1 = 50.0, k2 = 100.0;
  const Grid1D grid = Grid1D::make(N, BoundaryKind::Ghost);
  const int t_idx = 2 * N;
  const auto velocity = [](double t) { return -std::atan(100.0 * (t - 1.0)) / kPi; };
  const auto inflow = [](double t) {
    const double c = std::cos(6 * kPi * t);
    return 1.0 - c * c;
  };
  const auto phi = [](double u) { return k1 * u / (1.0 + k2 * u); };
  const auto dphi = [](double u) { return k1 / ((1.0 + k2 * u) * (1.0 + k2 * u)); };

  SplitProblem p;
  p.name = "adsorption_desorption";
  p.dim = 2 * N + 1;
  p.time_index = t_idx;
  p.t_end = 1.25;
  p.f = [=](const Vector& y) -> Vector {
    Vector out = Vector::Zero(y.size());
    const double t = y(t_idx);
    const double a = velocity(t);
    const Vector u = y.head(N);
    GhostValues gv;
    if (a >= 0) {
      gv.left.fill(inflow(t));
      gv.right.fill(u(N - 1));
    } else {
      gv.left.fill(u(0));
      gv.right.fill(0.0);
    }
    out.head(N) = -a * weno5_derivative(u, a >= 0 ? 1.0 : -1.0, grid, gv);
    out(t_idx) = 1.0;
    return out;
  };
  p.g = [=](const Vector& y) -> Vector {
    Vector out = Vector::Zero(y.size());
    for (int i = 0; i < N; ++i) {
      const double r = kappa * (y(N + i) - phi(y(i)));
      out(i) = r;
      out(N + i) = -r;
    }
    return out;
  };
  p.jac_g = [=](const Vector& y) {
    Triplets t;
    for (int i = 0; i < N; ++i) {
      const double du = -kappa * dphi(y(i));
      t.emplace_back(i, i, du);
      t.emplace_back(i, N + i, kappa);
      t.emplace_back(N + i, i, -du);
      t.emplace_back(N + i, N + i, -kappa);
    }
    return from_triplets(2 * N + 1, t);
  };
  p.y0 = Vector::Zero(p.dim);
  p.admissible = [N](const Vector& y) { return (y.head(N).array() > -0.01 + 1e-12).all(); };
  return p;
}

SplitProblem shallow_water(int N, double epsilon, double t_end) {
  if (N < 16) throw InvalidArgument("shallow_water needs N >= 16");
  if (!(epsilon > 0.0)) throw InvalidArgument("shallow_water needs epsilon > 0");
  const Grid1D grid = Grid1D::make(N, BoundaryKind::Periodic);
  SplitProblem p;
  p.name = "shallow_water";
  p.dim = 2 * N;
  p.t_end = t_end;
  p.f = [=](const Vector& y) -> Vector {
    const Vector h = y.head(N), q = y.tail(N);
    const double alpha = (1.0 + h.array()).sqrt().maxCoeff();
    const Vector F1 = q;
    const Vector F2 = h.array() + 0.5 * h.array().square();
    Vector out(2 * N);
    out.head(N) = -weno5_split_derivative(periodic_extend(0.5 * (F1 + alpha * h)),
                                          periodic_extend(0.5 * (F1 - alpha * h)), grid.dx);
    out.tail(N) = -weno5_split_derivative(periodic_extend(0.5 * (F2 + alpha * q)),
                                          periodic_extend(0.5 * (F2 - alpha * q)), grid.dx);
    return out;
  };
  p.g = [=](const Vector& y) -> Vector {
    Vector out = Vector::Zero(2 * N);
    const auto h = y.head(N).array();
    out.tail(N) = (0.5 * h.square() - y.tail(N).array()) / epsilon;
    return out;
  };
  p.jac_g = [=](const Vector& y) {
    Triplets t;
    for (int i = 0; i < N; ++i) {
      t.emplace_back(N + i, i, y(i) / epsilon);
      t.emplace_back(N + i, N + i, -1.0 / epsilon);
    }
    return from_triplets(2 * N, t);
  };
  p.y0.resize(2 * N);
  for (int i = 0; i < N; ++i) {
    const double h = 1.0 + std::sin(8 * kPi * grid.x(i)) / 5.0;
    p.y0(i) = h;
    p.y0(N + i) = 0.5 * h * h;
  }
  p.admissible = [N](const Vector& y) { return (y.head(N).array() > 0.0).all(); };
  return p;
}

SplitProblem prothero_robinson(double epsilon, double t_end) {
  if (!(epsilon > 0.0)) throw InvalidArgument("prothero_robinson needs epsilon > 0");
  const auto phi = [](double t) { return 2.0 + std::sin(kOmega * t); };
  const auto dphi = [](double t) { return kOmega * std::cos(kOmega * t); };
  const auto ddphi = [](double t) { return -kOmega * kOmega * std::sin(kOmega * t); };
  SplitProblem p;
  p.name = "prothero_robinson";
  p.dim = 2;
  p.time_index = 1;
  p.t_end = t_end;
  p.f = [=](const Vector& y) -> Vector {
    const double t = y(1), ph = phi(t);
    return Vector{{dphi(t) + ph * ph - y(0) * y(0), 1.0}};
  };
  p.g = [=](const Vector& y) -> Vector { return Vector{{(phi(y(1)) - y(0)) / epsilon, 0.0}}; };
  p.jac_g = [=](const Vector& y) {
    return from_triplets(2, {{0, 0, -1.0 / epsilon}, {0, 1, dphi(y(1)) / epsilon}});
  };
  p.jac_f = [=](const Vector& y) {
    const double t = y(1);
    return from_triplets(2, {{0, 0, -2.0 * y(0)}, {0, 1, ddphi(t) + 2.0 * phi(t) * dphi(t)}});
  };
  p.y0 = Vector{{phi(0.0), 0.0}};
  p.exact = [=](double t) { return Vector{{phi(t), t}}; };
  return p;
}

SplitProblem constant_problem(int dim, double t_end) {
  if (dim < 1) throw InvalidArgument("constant_problem needs dim >= 1");
  SplitProblem p;
  p.name = "constant";
  p.dim = dim;
  p.t_end = t_end;
  p.f = [dim](const Vector&) -> Vector { return Vector::Zero(dim); };
  p.g = p.f;
  p.jac_g = [dim](const Vector&) { return SparseMatrix(dim, dim); };
  p.jac_f = p.jac_g;
  p.y0 = Vector::LinSpaced(dim, 1.0, static_cast<double>(dim));
  const Vector y0 = p.y0;
  p.exact = [y0](double) { return y0; };
  p.taylor = [y0, dim](double, int order) {
    TaylorData td;
    for (int k = 0; k <= order; ++k) {
      td.y.push_back(k == 0 ? y0 : Vector::Zero(dim));
      td.f.push_back(Vector::Zero(dim));
      td.g.push_back(Vector::Zero(dim));
    }
    return td;
  };
  return p;
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"test",          "advection_reaction", "adsorption_desorption",
                                              "shallow_water", "prothero_robinson",  "constant"};
  return names;
}

SplitProblem make_problem(const std::string& name, const ProblemParams& params) {
  SplitProblem p;
  if (name == "test")
    p = test_equation(params.lambda0, params.lambda1);
  else if (name == "advection_reaction")
    p = advection_reaction(params.N.value_or(400));
  else if (name == "adsorption_desorption")
    p = adsorption_desorption(params.N.value_or(101));
  else if (name == "shallow_water")
    p = shallow_water(params.N.value_or(201), params.epsilon.value_or(1e-8));
  else if (name == "prothero_robinson")
    p = prothero_robinson(params.epsilon.value_or(0.1));
  else if (name == "constant")
    p = constant_problem(params.N.value_or(1));
  else
    throw UnknownNameError("unknown problem: " + name);
  if (params.t_end) {
    if (!(*params.t_end > p.t0)) throw InvalidArgument("t_end must exceed t0");
    p.t_end = *params.t_end;
  }
  return p;
}

}  // namespace dimsim
