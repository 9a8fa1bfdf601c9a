#pragma once

#include <string>
#include <vector>

#include "dimsim/linalg.hpp"
#include "dimsim/tableau.hpp"

namespace dimsim {

/// M(z0, z1) = V + (z0 B + z1 B*)(I - z0 A - z1 A*)^{-1} U.
/// Throws PoleError when 1 - lambda z1 vanishes.
ComplexMatrix stability_matrix(const Tableau& t, Complex z0, Complex z1);

/// Limit of M(z0, z1) as |z1| -> infinity with z0 fixed: V - B* A*^{-1} U.
ComplexMatrix stability_matrix_at_infinity(const Tableau& t);

double spectral_radius(const ComplexMatrix& M);

enum class PointStability { Stable, Boundary, Unstable };

/// Width of the band around spectral radius 1 classified as boundary.
inline constexpr double kBoundaryBand = 1e-10;

/// Stable when rho(M) < 1 - 1e-10, boundary within 1e-10 of 1, unstable
/// otherwise. Poles classify as unstable.
PointStability classify_point(const Tableau& t, Complex z0, Complex z1);

inline bool is_stable_point(const Tableau& t, Complex z0, Complex z1) {
  return classify_point(t, z0, z1) == PointStability::Stable;
}

/// Roots of sum_k coeffs[k] w^k via companion-matrix eigenvalues.
/// Leading zeros are stripped.
ComplexVector polynomial_roots(const ComplexVector& ascending);

/// p(w, z0, z1) = (1 - lambda z1)^s det(w I - M(z0, z1)), stored as real
/// coefficients of w^k z0^i z1^j. Built by interpolating the block
/// determinant det([[I - z0 A - z1 A*, -U], [-(z0 B + z1 B*), w I - V]])
/// on roots of unity.
class StabilityPolynomial {
 public:
  explicit StabilityPolynomial(const Tableau& t);

  int degree_w() const { return r_; }
  int degree_z() const { return s_; }
  double coefficient(int kw, int i0, int i1) const { return coef_[index(kw, i0, i1)]; }

  /// Coefficients in ascending powers of w at a fixed (z0, z1).
  ComplexVector w_coefficients(Complex z0, Complex z1) const;
  Complex evaluate(Complex w, Complex z0, Complex z1) const;

  /// With z0 = 0: entry k holds the ascending z-coefficients of the factor
  /// multiplying w^k (size s + 1 each).
  std::vector<Vector> implicit_coefficients() const;

  /// Degrees of p_1(z)..p_s(z), the factors of w^{s-1}..w^0 at z0 = 0.
  /// Coefficients below rel_tol times the largest one count as zero.
  std::vector<int> implicit_degrees(double rel_tol = 1e-9) const;

  /// Roots of the leading z^s coefficients: the |z| -> infinity limit of the
  /// implicit-part roots.
  ComplexVector asymptotic_roots(double rel_tol = 1e-9) const;

 private:
  std::size_t index(int kw, int i0, int i1) const {
    return (static_cast<std::size_t>(kw) * (s_ + 1) + i0) * (s_ + 1) + i1;
  }
  int r_;
  int s_;
  std::vector<double> coef_;
};

/// One level of the Schur recursion: phi_k, its reciprocal-conjugate
/// phi_hat_k, and gap = |phi_hat_k(0)| - |phi_k(0)| computed on the
/// polynomial scaled to unit max-coefficient.
struct SchurStep {
  ComplexVector phi;
  ComplexVector phi_hat;
  double gap = 0.0;
};

/// Full recursion phi_n -> phi_{n-1} -> ... -> phi_1. If a level collapses to
/// the zero polynomial the recursion stops early and the result is shorter.
std::vector<SchurStep> schur_recursion(const ComplexVector& ascending);

/// All roots strictly inside the unit circle according to the recursion.
bool is_schur_polynomial(const ComplexVector& ascending);

struct AStabilityReport {
  bool a_stable = false;
  int n_samples = 0;
  double y_min = 0.0;
  double y_max = 0.0;
  std::vector<double> min_gaps;  // one per recursion level
  double min_gap = 0.0;
  double max_root_modulus = 0.0;  // over the imaginary-axis samples
  std::vector<double> asymptotic_moduli;
  int schur_root_disagreements = 0;
};

/// Schur recursion on p*(w, iy) at n_samples log-spaced y in [y_max*1e-7, y_max]
/// plus the y -> infinity limit. Negative y give conjugate roots and are
/// covered by symmetry.
AStabilityReport a_stability_check(const Tableau& t, double y_max = 1e4, int n_samples = 2000,
                                   double gap_tol = 1e-12);

struct LStabilityReport {
  bool a_stable = false;
  bool l_stable = false;
  std::vector<int> degrees;  // deg p_1 .. deg p_s
  std::vector<double> radius_z;  // z1 = -10^k, k = 2..8
  std::vector<double> radius;    // rho(M(0, z1)) at those points
  AStabilityReport a_report;
};

LStabilityReport l_stability_check(const Tableau& t);

enum class RegionKind { SE, SAlphaY, SAlpha };

std::string to_string(RegionKind kind);

/// Polar scan settings: rays from `center`, marched in steps of
/// `march_step` up to `r_max`, each transition refined to `radial_tol`.
struct PolarGrid {
  int n_angles = 720;
  double r_max = 6.0;
  double march_step = 0.02;
  double radial_tol = 1e-4;
  Complex center{-1.0, 0.0};
  unsigned threads = 0;
};

struct RegionFlags {
  bool non_star_shaped = false;    // some ray crosses the boundary more than once
  bool recentered = false;         // center was outside; moved to the interval midpoint
  bool truncated = false;          // region reaches r_max on some ray
  bool insufficient_y_density = false;
  bool unstable_asymptote = false; // M at |z1| = infinity is not stable
  bool empty = false;
};

struct Region {
  RegionKind kind = RegionKind::SE;
  double alpha = 0.0;
  double y = 0.0;
  int n_y = 1;
  Complex center{-1.0, 0.0};
  std::vector<double> theta;
  std::vector<Complex> boundary;  // first exit point along each ray
  double area = 0.0;
  double interval_left = 0.0;     // stability interval is (interval_left, 0)
  RegionFlags flags;
};

/// z1 = -|y|/tan(alpha) + i y, with alpha = pi/2 giving z1 = i y.
Complex wedge_point(double alpha, double y);

/// 0 plus +-logspace(lo, hi, n_per_side).
std::vector<double> default_y_grid(int n_per_side = 60, double lo = 1e-3, double hi = 1e4);

/// Membership test for the intersection of S_{alpha,y} over the grid.
bool in_region(const Tableau& t, Complex z0, const std::vector<Complex>& z1_points);

Region region_SE(const Tableau& t, const PolarGrid& grid = {});
Region region_S_alpha_y(const Tableau& t, double alpha, double y, const PolarGrid& grid = {});

/// Intersection of S_{alpha,y} over y_grid. With check_density the scan is
/// repeated on a grid with twice the points per side and the flag is raised
/// when the area changes by more than 1%.
Region region_S_alpha(const Tableau& t, double alpha, const std::vector<double>& y_grid,
                      const PolarGrid& grid = {}, bool check_density = false);

/// Left end of the stability interval (x, 0) along the negative real axis.
double stability_interval(const Tableau& t, const std::vector<Complex>& z1_points,
                          double x_max = 20.0, double step = 0.005, double tol = 1e-10);

}  // namespace dimsim
