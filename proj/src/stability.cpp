#include "dimsim/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dimsim/errors.hpp"
#include "dimsim/parallel.hpp"

namespace dimsim {
namespace {

constexpr double kPi = std::numbers::pi;

// Complex copies of the tableau so that region scans do not re-cast on every
// evaluation.
class Evaluator {
 public:
  explicit Evaluator(const Tableau& t)
      : s_(t.s),
        lambda_(t.lambda),
        A_(t.A.cast<Complex>()),
        Astar_(t.Astar.cast<Complex>()),
        U_(t.U.cast<Complex>()),
        B_(t.B.cast<Complex>()),
        Bstar_(t.Bstar.cast<Complex>()),
        V_(t.V.cast<Complex>()),
        eig_(t.r) {}

  ComplexMatrix matrix(Complex z0, Complex z1) const {
    if (std::abs(1.0 - lambda_ * z1) < 1e-14) throw PoleError("stage matrix is singular at z1 = 1/lambda");
    ComplexMatrix S = ComplexMatrix::Identity(s_, s_) - z0 * A_ - z1 * Astar_;
    ComplexMatrix X = S.triangularView<Eigen::Lower>().solve(U_);
    return V_ + (z0 * B_ + z1 * Bstar_) * X;
  }

  double radius(Complex z0, Complex z1) {
    const ComplexMatrix M = matrix(z0, z1);
    if (M.rows() == 1) return std::abs(M(0, 0));
    eig_.compute(M, false);
    return eig_.eigenvalues().cwiseAbs().maxCoeff();
  }

  PointStability classify(Complex z0, Complex z1) {
    double rho = 0.0;
    try {
      rho = radius(z0, z1);
    } catch (const PoleError&) {
      return PointStability::Unstable;
    }
    if (!std::isfinite(rho)) return PointStability::Unstable;
    if (rho < 1.0 - kBoundaryBand) return PointStability::Stable;
    if (rho <= 1.0 + kBoundaryBand) return PointStability::Boundary;
    return PointStability::Unstable;
  }

 private:
  int s_;
  double lambda_;
  ComplexMatrix A_, Astar_, U_, B_, Bstar_, V_;
  Eigen::ComplexEigenSolver<ComplexMatrix> eig_;
};

// Intersection membership with a move-to-front hint: the z1 that rejected the
// previous point is tried first.
class Membership {
 public:
  Membership(const Tableau& t, const std::vector<Complex>& z1_points) : eval_(t), z1_(z1_points) {}

  bool operator()(Complex z0) {
    if (z1_.empty()) return true;
    if (eval_.classify(z0, z1_[hint_]) != PointStability::Stable) return false;
    for (std::size_t k = 0; k < z1_.size(); ++k) {
      if (k == hint_) continue;
      if (eval_.classify(z0, z1_[k]) != PointStability::Stable) {
        hint_ = k;
        return false;
      }
    }
    return true;
  }

 private:
  Evaluator eval_;
  const std::vector<Complex>& z1_;
  std::size_t hint_ = 0;
};

ComplexVector scaled(const ComplexVector& v) {
  const double m = v.cwiseAbs().maxCoeff();
  return m > 0.0 ? ComplexVector(v / m) : v;
}

std::vector<Complex> wedge_points(double alpha, const std::vector<double>& ys) {
  std::vector<Complex> out;
  out.reserve(ys.size());
  for (double y : ys) out.push_back(wedge_point(alpha, y));
  return out;
}

struct RayResult {
  Complex boundary;
  double area = 0.0;  // integral of r dr over the stable segments
  int crossings = 0;
  bool truncated = false;
};

double refine_crossing(Membership& member, Complex center, Complex dir, double inside, double outside,
                       double tol) {
  // inside/outside are radii with known membership; returns the inside-side end.
  while (std::abs(outside - inside) > tol) {
    const double mid = 0.5 * (inside + outside);
    if (member(center + mid * dir))
      inside = mid;
    else
      outside = mid;
  }
  return 0.5 * (inside + outside);
}

RayResult scan_ray(Membership& member, Complex center, double theta, const PolarGrid& g) {
  const Complex dir = std::polar(1.0, theta);
  const int steps = static_cast<int>(std::ceil(g.r_max / g.march_step));
  RayResult out;
  bool prev = true;  // the center is inside
  double prev_r = 0.0;
  double segment_start = 0.0;
  bool first_exit_found = false;
  for (int j = 1; j <= steps; ++j) {
    const double r = std::min(g.r_max, j * g.march_step);
    const bool cur = member(center + r * dir);
    if (cur != prev) {
      const double x = prev ? refine_crossing(member, center, dir, prev_r, r, g.radial_tol)
                            : refine_crossing(member, center, dir, r, prev_r, g.radial_tol);
      ++out.crossings;
      if (prev) {
        out.area += 0.5 * (x * x - segment_start * segment_start);
        if (!first_exit_found) {
          out.boundary = center + x * dir;
          first_exit_found = true;
        }
      } else {
        segment_start = x;
      }
    }
    prev = cur;
    prev_r = r;
  }
  if (prev) {
    out.truncated = true;
    out.area += 0.5 * (g.r_max * g.r_max - segment_start * segment_start);
    if (!first_exit_found) out.boundary = center + g.r_max * dir;
  }
  return out;
}

void validate_grid(const PolarGrid& g) {
  if (g.n_angles < 4) throw InvalidArgument("polar grid needs at least 4 angles");
  if (!(g.r_max > 0.0) || !(g.march_step > 0.0) || !(g.radial_tol > 0.0))
    throw InvalidArgument("polar grid radii and tolerances must be positive");
}

void validate_alpha(double alpha) {
  if (!(alpha > 0.0) || alpha > kPi / 2 + 1e-12) throw InvalidArgument("alpha must lie in (0, pi/2]");
}

double interval_with(Membership& member, double x_max, double step, double tol) {
  double x = step;
  double last_in = 0.0;
  while (x <= x_max) {
    if (!member(Complex(-x, 0.0))) {
      double lo = last_in, hi = x;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (member(Complex(-mid, 0.0)))
          lo = mid;
        else
          hi = mid;
      }
      return -lo;
    }
    last_in = x;
    x += step;
  }
  return -x_max;
}

Region scan_region(const Tableau& t, const std::vector<Complex>& z1_points, const PolarGrid& g, RegionKind kind,
                   double alpha, double y) {
  validate_grid(g);
  Region region;
  region.kind = kind;
  region.alpha = alpha;
  region.y = y;
  region.n_y = static_cast<int>(z1_points.size());

  {
    Membership member(t, z1_points);
    region.interval_left = interval_with(member, 20.0, 0.005, 1e-10);
    region.center = g.center;
    if (!member(region.center)) {
      const Complex midpoint(0.5 * region.interval_left, 0.0);
      if (region.interval_left < 0.0 && member(midpoint)) {
        region.center = midpoint;
        region.flags.recentered = true;
      } else {
        region.flags.empty = true;
      }
    }
  }

  const auto n = static_cast<std::size_t>(g.n_angles);
  region.theta.resize(n);
  region.boundary.resize(n);
  for (std::size_t k = 0; k < n; ++k) region.theta[k] = 2.0 * kPi * static_cast<double>(k) / g.n_angles;

  if (region.flags.empty) {
    std::fill(region.boundary.begin(), region.boundary.end(), region.center);
    return region;
  }

  std::vector<RayResult> rays(n);
  parallel_for(
      n,
      [&](std::size_t k) {
        Membership member(t, z1_points);
        rays[k] = scan_ray(member, region.center, region.theta[k], g);
      },
      g.threads);

  double area = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    area += rays[k].area;
    region.boundary[k] = rays[k].boundary;
    if (rays[k].crossings > 1) region.flags.non_star_shaped = true;
    if (rays[k].truncated) region.flags.truncated = true;
  }
  region.area = area * 2.0 * kPi / g.n_angles;

  if (kind != RegionKind::SE) {
    Evaluator ev(t);
    const double rho_inf = spectral_radius(stability_matrix_at_infinity(t));
    region.flags.unstable_asymptote = !(rho_inf < 1.0 - kBoundaryBand);
    (void)ev;
  }
  return region;
}

std::vector<double> refine_y_grid(std::vector<double> grid) {
  std::sort(grid.begin(), grid.end());
  std::vector<double> out;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out.push_back(grid[k]);
    if (k + 1 == grid.size()) break;
    const double a = grid[k], b = grid[k + 1];
    if (a == 0.0 || b == 0.0)
      out.push_back(0.5 * (a + b));
    else if ((a > 0) == (b > 0))
      out.push_back(std::copysign(std::sqrt(a * b), a));
    else
      out.push_back(0.5 * (a + b));
  }
  return out;
}

}  // namespace

ComplexMatrix stability_matrix(const Tableau& t, Complex z0, Complex z1) { return Evaluator(t).matrix(z0, z1); }

ComplexMatrix stability_matrix_at_infinity(const Tableau& t) {
  const Matrix X = t.Astar.triangularView<Eigen::Lower>().solve(t.U);
  return (t.V - t.Bstar * X).cast<Complex>();
}

double spectral_radius(const ComplexMatrix& M) {
  if (M.rows() == 1) return std::abs(M(0, 0));
  Eigen::ComplexEigenSolver<ComplexMatrix> eig(M, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

PointStability classify_point(const Tableau& t, Complex z0, Complex z1) { return Evaluator(t).classify(z0, z1); }

ComplexVector polynomial_roots(const ComplexVector& ascending) {
  Eigen::Index n = ascending.size() - 1;
  while (n > 0 && ascending(n) == Complex(0.0)) --n;
  if (n <= 0) return ComplexVector(0);
  ComplexMatrix companion = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) companion(i, n - 1) = -ascending(i) / ascending(n);
  Eigen::ComplexEigenSolver<ComplexMatrix> eig(companion, false);
  return eig.eigenvalues();
}

StabilityPolynomial::StabilityPolynomial(const Tableau& t) : r_(t.r), s_(t.s) {
  const int nw = r_ + 1;
  const int nz = s_ + 1;
  const int dim = s_ + r_;
  const ComplexMatrix A = t.A.cast<Complex>(), Astar = t.Astar.cast<Complex>(), U = t.U.cast<Complex>(),
                      B = t.B.cast<Complex>(), Bstar = t.Bstar.cast<Complex>(), V = t.V.cast<Complex>();
  const auto root = [](int k, int n) { return std::polar(1.0, 2.0 * kPi * k / n); };

  std::vector<Complex> values(static_cast<std::size_t>(nw) * nz * nz);
  ComplexMatrix K(dim, dim);
  for (int a = 0; a < nw; ++a)
    for (int b = 0; b < nz; ++b)
      for (int c = 0; c < nz; ++c) {
        const Complex w = root(a, nw), z0 = root(b, nz), z1 = root(c, nz);
        K.topLeftCorner(s_, s_) = ComplexMatrix::Identity(s_, s_) - z0 * A - z1 * Astar;
        K.topRightCorner(s_, r_) = -U;
        K.bottomLeftCorner(r_, s_) = -(z0 * B + z1 * Bstar);
        K.bottomRightCorner(r_, r_) = w * ComplexMatrix::Identity(r_, r_) - V;
        values[(static_cast<std::size_t>(a) * nz + b) * nz + c] = K.partialPivLu().determinant();
      }

  coef_.assign(values.size(), 0.0);
  const double norm = 1.0 / (static_cast<double>(nw) * nz * nz);
  for (int kw = 0; kw < nw; ++kw)
    for (int i0 = 0; i0 < nz; ++i0)
      for (int i1 = 0; i1 < nz; ++i1) {
        Complex acc = 0.0;
        for (int a = 0; a < nw; ++a)
          for (int b = 0; b < nz; ++b)
            for (int c = 0; c < nz; ++c)
              acc += values[(static_cast<std::size_t>(a) * nz + b) * nz + c] *
                     std::conj(root(a * kw, nw) * root(b * i0, nz) * root(c * i1, nz));
        coef_[index(kw, i0, i1)] = (acc * norm).real();
      }
}

ComplexVector StabilityPolynomial::w_coefficients(Complex z0, Complex z1) const {
  ComplexVector out(r_ + 1);
  for (int kw = 0; kw <= r_; ++kw) {
    // Horner in z1, then in z0.
    Complex acc0 = 0.0;
    for (int i0 = s_; i0 >= 0; --i0) {
      Complex acc1 = 0.0;
      for (int i1 = s_; i1 >= 0; --i1) acc1 = acc1 * z1 + coef_[index(kw, i0, i1)];
      acc0 = acc0 * z0 + acc1;
    }
    out(kw) = acc0;
  }
  return out;
}

Complex StabilityPolynomial::evaluate(Complex w, Complex z0, Complex z1) const {
  const ComplexVector c = w_coefficients(z0, z1);
  Complex acc = 0.0;
  for (Eigen::Index k = c.size() - 1; k >= 0; --k) acc = acc * w + c(k);
  return acc;
}

std::vector<Vector> StabilityPolynomial::implicit_coefficients() const {
  std::vector<Vector> out(r_ + 1, Vector::Zero(s_ + 1));
  for (int kw = 0; kw <= r_; ++kw)
    for (int i1 = 0; i1 <= s_; ++i1) out[kw](i1) = coef_[index(kw, 0, i1)];
  return out;
}

std::vector<int> StabilityPolynomial::implicit_degrees(double rel_tol) const {
  const auto coeffs = implicit_coefficients();
  double scale = 0.0;
  for (const auto& c : coeffs) scale = std::max(scale, c.cwiseAbs().maxCoeff());
  std::vector<int> degrees;
  for (int i = 1; i <= r_; ++i) {
    const Vector& c = coeffs[r_ - i];
    int deg = -1;
    for (int j = s_; j >= 0; --j)
      if (std::abs(c(j)) > rel_tol * scale) {
        deg = j;
        break;
      }
    degrees.push_back(deg);
  }
  return degrees;
}

ComplexVector StabilityPolynomial::asymptotic_roots(double rel_tol) const {
  const auto coeffs = implicit_coefficients();
  double scale = 0.0;
  for (const auto& c : coeffs) scale = std::max(scale, c.cwiseAbs().maxCoeff());
  ComplexVector lead(r_ + 1);
  for (int kw = 0; kw <= r_; ++kw) {
    const double v = coeffs[kw](s_);
    lead(kw) = std::abs(v) > rel_tol * scale ? v : 0.0;
  }
  ComplexVector roots = polynomial_roots(lead);
  // Missing low-order terms mean roots at w = 0.
  Eigen::Index zeros = 0;
  while (zeros < lead.size() - 1 && lead(zeros) == Complex(0.0)) ++zeros;
  if (zeros > 0 && roots.size() < r_) {
    ComplexVector all = ComplexVector::Zero(r_);
    all.head(roots.size()) = roots;
    return all;
  }
  return roots;
}

std::vector<SchurStep> schur_recursion(const ComplexVector& ascending) {
  std::vector<SchurStep> steps;
  ComplexVector phi = ascending;
  while (phi.size() >= 2) {
    phi = scaled(phi);
    const Eigen::Index k = phi.size() - 1;
    SchurStep step;
    step.phi = phi;
    step.phi_hat.resize(k + 1);
    for (Eigen::Index j = 0; j <= k; ++j) step.phi_hat(j) = std::conj(phi(k - j));
    step.gap = std::abs(step.phi_hat(0)) - std::abs(phi(0));
    ComplexVector next(k);
    for (Eigen::Index j = 1; j <= k; ++j) next(j - 1) = step.phi_hat(0) * phi(j) - phi(0) * step.phi_hat(j);
    steps.push_back(std::move(step));
    if (next.cwiseAbs().maxCoeff() <= 1e-14) break;
    phi = std::move(next);
  }
  return steps;
}

bool is_schur_polynomial(const ComplexVector& ascending) {
  const auto steps = schur_recursion(ascending);
  if (static_cast<Eigen::Index>(steps.size()) != ascending.size() - 1) return false;
  return std::all_of(steps.begin(), steps.end(), [](const SchurStep& s) { return s.gap > 0.0; });
}

AStabilityReport a_stability_check(const Tableau& t, double y_max, int n_samples, double gap_tol) {
  if (!(y_max > 0.0) || n_samples < 2) throw InvalidArgument("a_stability_check needs y_max > 0 and n >= 2");
  const StabilityPolynomial poly(t);
  AStabilityReport rep;
  rep.n_samples = n_samples;
  rep.y_max = y_max;
  rep.y_min = y_max * 1e-7;
  rep.min_gaps.assign(t.r, std::numeric_limits<double>::infinity());
  const double log_lo = std::log10(rep.y_min), log_hi = std::log10(y_max);
  for (int k = 0; k < n_samples; ++k) {
    const double y = std::pow(10.0, log_lo + (log_hi - log_lo) * k / (n_samples - 1));
    const ComplexVector coeffs = poly.w_coefficients(0.0, Complex(0.0, y));
    const auto steps = schur_recursion(coeffs);
    double sample_min = std::numeric_limits<double>::infinity();
    for (std::size_t level = 0; level < rep.min_gaps.size(); ++level) {
      const double gap = level < steps.size() ? steps[level].gap : 0.0;
      rep.min_gaps[level] = std::min(rep.min_gaps[level], gap);
      sample_min = std::min(sample_min, gap);
    }
    const ComplexVector roots = polynomial_roots(coeffs);
    const double modulus = roots.size() ? roots.cwiseAbs().maxCoeff() : 0.0;
    rep.max_root_modulus = std::max(rep.max_root_modulus, modulus);
    const bool schur_inside = sample_min > gap_tol, schur_outside = sample_min < -gap_tol;
    const bool roots_inside = modulus < 1.0 - kBoundaryBand, roots_outside = modulus > 1.0 + kBoundaryBand;
    if ((schur_inside && roots_outside) || (schur_outside && roots_inside)) ++rep.schur_root_disagreements;
  }
  rep.min_gap = *std::min_element(rep.min_gaps.begin(), rep.min_gaps.end());
  const ComplexVector asym = poly.asymptotic_roots();
  for (Eigen::Index k = 0; k < asym.size(); ++k) rep.asymptotic_moduli.push_back(std::abs(asym(k)));
  const bool asym_ok = std::all_of(rep.asymptotic_moduli.begin(), rep.asymptotic_moduli.end(),
                                   [](double m) { return m <= 1.0 + 1e-9; });
  rep.a_stable = rep.min_gap >= -gap_tol && asym_ok;
  return rep;
}

LStabilityReport l_stability_check(const Tableau& t) {
  LStabilityReport rep;
  rep.a_report = a_stability_check(t);
  rep.a_stable = rep.a_report.a_stable;
  rep.degrees = StabilityPolynomial(t).implicit_degrees();
  const bool low_degree = std::all_of(rep.degrees.begin(), rep.degrees.end(), [&](int d) { return d < t.s; });
  rep.l_stable = rep.a_stable && low_degree;
  for (int k = 2; k <= 8; ++k) {
    const double z = -std::pow(10.0, k);
    rep.radius_z.push_back(z);
    rep.radius.push_back(spectral_radius(stability_matrix(t, 0.0, z)));
  }
  return rep;
}

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::SE:
      return "SE";
    case RegionKind::SAlphaY:
      return "Salpha_y";
    case RegionKind::SAlpha:
      return "Salpha";
  }
  return "unknown";
}

Complex wedge_point(double alpha, double y) {
  validate_alpha(alpha);
  if (std::abs(alpha - kPi / 2) < 1e-14) return {0.0, y};
  return {-std::abs(y) / std::tan(alpha), y};
}

std::vector<double> default_y_grid(int n_per_side, double lo, double hi) {
  if (n_per_side < 2 || !(lo > 0.0) || !(hi > lo)) throw InvalidArgument("bad y-grid specification");
  std::vector<double> ys{0.0};
  const double a = std::log10(lo), b = std::log10(hi);
  for (int k = 0; k < n_per_side; ++k) {
    const double y = std::pow(10.0, a + (b - a) * k / (n_per_side - 1));
    ys.push_back(y);
    ys.push_back(-y);
  }
  return ys;
}

bool in_region(const Tableau& t, Complex z0, const std::vector<Complex>& z1_points) {
  Membership member(t, z1_points);
  return member(z0);
}

double stability_interval(const Tableau& t, const std::vector<Complex>& z1_points, double x_max, double step,
                          double tol) {
  Membership member(t, z1_points);
  return interval_with(member, x_max, step, tol);
}

Region region_SE(const Tableau& t, const PolarGrid& grid) {
  return scan_region(t, {Complex(0.0)}, grid, RegionKind::SE, kPi / 2, 0.0);
}

Region region_S_alpha_y(const Tableau& t, double alpha, double y, const PolarGrid& grid) {
  validate_alpha(alpha);
  return scan_region(t, {wedge_point(alpha, y)}, grid, RegionKind::SAlphaY, alpha, y);
}

Region region_S_alpha(const Tableau& t, double alpha, const std::vector<double>& y_grid, const PolarGrid& grid,
                      bool check_density) {
  validate_alpha(alpha);
  if (y_grid.empty()) throw InvalidArgument("y-grid must not be empty");
  if (std::find(y_grid.begin(), y_grid.end(), 0.0) == y_grid.end())
    throw InvalidArgument("y-grid must include 0");
  Region region = scan_region(t, wedge_points(alpha, y_grid), grid, RegionKind::SAlpha, alpha, 0.0);
  if (check_density) {
    const Region refined = scan_region(t, wedge_points(alpha, refine_y_grid(y_grid)), grid, RegionKind::SAlpha,
                                       alpha, 0.0);
    const double scale = std::max(region.area, 1e-12);
    region.flags.insufficient_y_density = std::abs(refined.area - region.area) > 0.01 * scale;
  }
  return region;
}

}  // namespace dimsim
