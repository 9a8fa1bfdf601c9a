#pragma once

#include "dimsim/tableau.hpp"

namespace dimsim {

/// Result of certifying the SSP coefficient of the explicit part.
/// gamma_feasible <= C <= gamma_infeasible, and C_eff = C / s.
struct SspCertificate {
  double C = 0.0;
  double C_eff = 0.0;
  double gamma_feasible = 0.0;
  double gamma_infeasible = 0.0;
  double tolerance = 0.0;
  bool infeasible_at_zero = false;
  bool unbounded = false;  // still feasible at the largest tested gamma
  int bisection_steps = 0;
};

/// Checks the four componentwise conditions
///   (I + gA)^{-1} U >= 0,        I - (I + gA)^{-1} >= 0,
///   V - g B (I + gA)^{-1} U >= 0, g B (I + gA)^{-1} >= 0
/// with every entry allowed down to -tol.
bool spijker_feasible(const Tableau& t, double gamma, double tol = 1e-12);

/// Largest gamma for which spijker_feasible holds, bracketed by bisection
/// to within bracket_tol.
SspCertificate ssp_coefficient(const Tableau& t, double bracket_tol = 1e-8, double tol = 1e-12);

}  // namespace dimsim
