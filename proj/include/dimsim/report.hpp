#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dimsim/convergence.hpp"
#include "dimsim/integrator.hpp"
#include "dimsim/ssp.hpp"
#include "dimsim/stability.hpp"
#include "dimsim/tableau.hpp"

namespace dimsim {

struct SummaryOptions {
  PolarGrid grid;
  std::vector<double> y_grid = default_y_grid();
  bool regions = true;  // false skips the two region scans
};

/// Everything the verification tables report for one method.
struct MethodSummary {
  std::string name;
  int s = 0;
  int p = 0;
  OrderReport order;
  SspCertificate ssp;
  LStabilityReport stability;
  bool has_regions = false;
  Region region_SE;
  Region region_Salpha;  // alpha = pi/2
};

MethodSummary summarize_method(const Tableau& t, const SummaryOptions& options = {});

nlohmann::json as_json(const SspCertificate& c);
nlohmann::json as_json(const OrderReport& r);
nlohmann::json as_json(const AStabilityReport& r);
nlohmann::json as_json(const LStabilityReport& r);
nlohmann::json as_json(const RegionFlags& f);
/// Region sidecar: area, interval, flags and scan settings (no boundary).
nlohmann::json region_sidecar(const Region& r, const PolarGrid& grid);
nlohmann::json as_json(const Counters& c);
nlohmann::json as_json(const ConvergenceResult& r);

/// Flat record with the table columns (C, C_eff, area_SE, area_Salpha,
/// int_SE, int_Salpha) plus verdicts and the detailed reports.
nlohmann::json summary_json(const MethodSummary& m);

/// Default absolute tolerances used when an expectation gives a bare number.
const nlohmann::json& default_tolerances();

/// Compares `actual` (method name -> record) with `expected` of the same
/// shape. Expected fields are numbers, booleans, or {"value": x, "tol": t}.
/// Returns one message per mismatch; methods absent from `actual` are skipped.
std::vector<std::string> compare_with_expected(const nlohmann::json& actual, const nlohmann::json& expected);

}  // namespace dimsim
