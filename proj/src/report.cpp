#include "dimsim/report.hpp"

#include <cmath>
#include <numbers>

#include "dimsim/errors.hpp"
#include "dimsim/io.hpp"

namespace dimsim {

using nlohmann::json;

MethodSummary summarize_method(const Tableau& t, const SummaryOptions& options) {
  MethodSummary m;
  m.name = t.name;
  m.s = t.s;
  m.p = t.p;
  m.order = verify_order(t);
  m.ssp = ssp_coefficient(t);
  m.stability = l_stability_check(t);
  if (options.regions) {
    m.has_regions = true;
    m.region_SE = region_SE(t, options.grid);
    m.region_Salpha = region_S_alpha(t, std::numbers::pi / 2, options.y_grid, options.grid);
  }
  return m;
}

json as_json(const SspCertificate& c) {
  return json{{"C", c.C},
              {"C_eff", c.C_eff},
              {"gamma_feasible", c.gamma_feasible},
              {"gamma_infeasible", c.gamma_infeasible},
              {"tolerance", c.tolerance},
              {"infeasible_at_zero", c.infeasible_at_zero},
              {"unbounded", c.unbounded},
              {"bisection_steps", c.bisection_steps}};
}

json as_json(const OrderReport& r) {
  return json{{"stage_residual_explicit", r.stage_residual_explicit},
              {"stage_residual_implicit", r.stage_residual_implicit},
              {"update_residual_explicit", r.update_residual_explicit},
              {"update_residual_implicit", r.update_residual_implicit},
              {"max_residual", r.max_residual()}};
}

json as_json(const AStabilityReport& r) {
  return json{{"a_stable", r.a_stable},
              {"n_samples", r.n_samples},
              {"y_min", r.y_min},
              {"y_max", r.y_max},
              {"min_gaps", r.min_gaps},
              {"min_gap", r.min_gap},
              {"max_root_modulus", r.max_root_modulus},
              {"asymptotic_moduli", r.asymptotic_moduli},
              {"schur_root_disagreements", r.schur_root_disagreements}};
}

json as_json(const LStabilityReport& r) {
  json radius = json::array();
  for (std::size_t k = 0; k < r.radius.size(); ++k) radius.push_back({{"z1", r.radius_z[k]}, {"rho", r.radius[k]}});
  return json{{"a_stable", r.a_stable},
              {"l_stable", r.l_stable},
              {"degrees", r.degrees},
              {"radius_along_negative_axis", radius},
              {"a_stability", as_json(r.a_report)}};
}

json as_json(const RegionFlags& f) {
  return json{{"non_star_shaped", f.non_star_shaped},
              {"recentered", f.recentered},
              {"truncated", f.truncated},
              {"insufficient_y_density", f.insufficient_y_density},
              {"unstable_asymptote", f.unstable_asymptote},
              {"empty", f.empty}};
}

json region_sidecar(const Region& r, const PolarGrid& grid) {
  return json{{"kind", to_string(r.kind)},
              {"alpha", r.alpha},
              {"y", r.y},
              {"n_y", r.n_y},
              {"area", r.area},
              {"interval", json::array({r.interval_left, 0.0})},
              {"center", json::array({r.center.real(), r.center.imag()})},
              {"flags", as_json(r.flags)},
              {"grid",
               {{"n_angles", grid.n_angles},
                {"r_max", grid.r_max},
                {"march_step", grid.march_step},
                {"radial_tol", grid.radial_tol}}}};
}

json as_json(const Counters& c) {
  return json{{"f_evals", c.f_evals},
              {"g_evals", c.g_evals},
              {"newton_iters", c.newton_iters},
              {"jacobian_evals", c.jacobian_evals},
              {"factorizations", c.factorizations}};
}

json as_json(const ConvergenceResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j{{"h", row.h}, {"n_steps", row.n_steps}, {"failed", row.failed}, {"counters", as_json(row.counters)}};
    j["error"] = row.failed ? json(nullptr) : json(row.error);
    j["order"] = row.order ? json(*row.order) : json(nullptr);
    if (row.failed) j["failure"] = row.failure;
    rows.push_back(std::move(j));
  }
  json j{{"method", r.method},
         {"problem", r.problem},
         {"p", r.p},
         {"rows", rows},
         {"reference", to_string(r.reference)},
         {"reference_method", r.reference_method},
         {"h_reference", r.h_reference},
         {"start_sensitive", r.start_sensitive}};
  j["order"] = r.summary_order ? json(*r.summary_order) : json(nullptr);
  j["start_amplification"] = r.start_amplification ? json(*r.start_amplification) : json(nullptr);
  return j;
}

json summary_json(const MethodSummary& m) {
  json j{{"name", m.name},
         {"s", m.s},
         {"p", m.p},
         {"order_residual", m.order.max_residual()},
         {"C", m.ssp.C},
         {"C_eff", m.ssp.C_eff},
         {"a_stable", m.stability.a_stable},
         {"l_stable", m.stability.l_stable},
         {"rho_stiff", m.stability.radius.empty() ? 0.0 : m.stability.radius.back()},
         {"order_report", as_json(m.order)},
         {"ssp", as_json(m.ssp)},
         {"stability", as_json(m.stability)}};
  if (m.has_regions) {
    j["int_SE"] = m.region_SE.interval_left;
    j["int_Salpha"] = m.region_Salpha.interval_left;
    j["area_SE"] = m.region_SE.area;
    j["area_Salpha"] = m.region_Salpha.area;
    j["flags_SE"] = as_json(m.region_SE.flags);
    j["flags_Salpha"] = as_json(m.region_Salpha.flags);
  }
  return j;
}

const json& default_tolerances() {
  static const json tol{{"C", 0.01},         {"C_eff", 0.01},       {"int_SE", 0.01}, {"int_Salpha", 0.02},
                        {"area_SE", 0.05},   {"area_Salpha", 0.1},  {"area", 0.05},   {"interval", 0.01},
                        {"order", 0.2},      {"order_residual", 1e-10}};
  return tol;
}

std::vector<std::string> compare_with_expected(const json& actual, const json& expected) {
  if (!expected.is_object()) throw InvalidArgument("expectation file must be a JSON object");
  std::vector<std::string> out;
  for (auto m = expected.begin(); m != expected.end(); ++m) {
    if (!actual.contains(m.key())) continue;
    const json& rec = actual.at(m.key());
    if (!m.value().is_object()) throw InvalidArgument("expectation for " + m.key() + " must be an object");
    for (auto f = m.value().begin(); f != m.value().end(); ++f) {
      const std::string where = m.key() + "." + f.key();
      if (!rec.contains(f.key())) {
        out.push_back(where + ": not computed");
        continue;
      }
      const json& got = rec.at(f.key());
      const json& want = f.value();
      if (want.is_boolean()) {
        if (!got.is_boolean() || got.get<bool>() != want.get<bool>())
          out.push_back(where + ": expected " + want.dump() + ", got " + got.dump());
        continue;
      }
      double value = 0.0, tol = 0.0;
      if (want.is_number()) {
        value = want.get<double>();
        tol = default_tolerances().value(f.key(), 1e-9);
      } else if (want.is_object() && want.contains("value")) {
        value = want.at("value").get<double>();
        tol = want.contains("tol") ? want.at("tol").get<double>() : default_tolerances().value(f.key(), 1e-9);
      } else {
        throw InvalidArgument("unsupported expectation for " + where);
      }
      if (!got.is_number()) {
        out.push_back(where + ": expected a number, got " + got.dump());
        continue;
      }
      const double g = got.get<double>();
      if (!(std::abs(g - value) <= tol))
        out.push_back(where + ": expected " + format_number(value) + " +- " + format_number(tol) + ", got " +
                      format_number(g));
    }
  }
  return out;
}

}  // namespace dimsim
