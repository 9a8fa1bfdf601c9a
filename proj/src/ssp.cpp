#include "dimsim/ssp.hpp"

#include "dimsim/errors.hpp"

namespace dimsim {

bool spijker_feasible(const Tableau& t, double gamma, double tol) {
  if (gamma < 0.0) throw InvalidArgument("gamma must be non-negative");
  const Matrix I = Matrix::Identity(t.s, t.s);
  // I + gA is unit lower triangular, so the inverse always exists.
  const Matrix resolvent =
      (I + gamma * t.A).triangularView<Eigen::Lower>().solve(Matrix::Identity(t.s, t.s));
  const Matrix stage_weights = resolvent * t.U;
  const auto nonneg = [tol](const Matrix& M) { return M.size() == 0 || M.minCoeff() >= -tol; };
  return nonneg(stage_weights) && nonneg(I - resolvent) &&
         nonneg(t.V - gamma * t.B * stage_weights) && nonneg(gamma * t.B * resolvent);
}

SspCertificate ssp_coefficient(const Tableau& t, double bracket_tol, double tol) {
  if (!(bracket_tol > 0.0)) throw InvalidArgument("bracket tolerance must be positive");
  SspCertificate cert;
  if (!spijker_feasible(t, 0.0, tol)) {
    cert.infeasible_at_zero = true;
    cert.tolerance = 0.0;
    return cert;
  }

  constexpr double kGammaCeiling = 1e6;
  double lo = 0.0;
  double hi = 2.0 * t.s;
  while (spijker_feasible(t, hi, tol)) {
    lo = hi;
    hi *= 2.0;
    if (hi > kGammaCeiling) {
      cert.unbounded = true;
      cert.C = cert.gamma_feasible = lo;
      cert.gamma_infeasible = hi;
      cert.C_eff = cert.C / t.s;
      cert.tolerance = hi - lo;
      return cert;
    }
  }
  while (hi - lo > bracket_tol) {
    const double mid = 0.5 * (lo + hi);
    if (spijker_feasible(t, mid, tol))
      lo = mid;
    else
      hi = mid;
    ++cert.bisection_steps;
  }
  cert.gamma_feasible = lo;
  cert.gamma_infeasible = hi;
  cert.C = lo;
  cert.C_eff = cert.C / t.s;
  cert.tolerance = hi - lo;
  return cert;
}

}  // namespace dimsim
