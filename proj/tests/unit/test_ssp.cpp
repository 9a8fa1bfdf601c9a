#include <doctest.h>

#include <cmath>

#include "dimsim/ssp.hpp"

using namespace dimsim;

TEST_CASE("SSP coefficients of the catalog") {
  const std::vector<std::pair<std::string, double>> expected{
      {"DIMSIM1A", 1.0}, {"DIMSIM1L", 1.0}, {"DIMSIM2A", 1.38}, {"DIMSIM2L", 1.17},
      {"DIMSIM3A", 0.99}, {"DIMSIM3L", 0.85}, {"DIMSIM4A", 0.51}};
  for (const auto& [name, C] : expected) {
    CAPTURE(name);
    const Tableau t = catalog(name);
    const SspCertificate cert = ssp_coefficient(t);
    CHECK(std::abs(cert.C - C) <= 0.01);
    CHECK(cert.C_eff == cert.C / t.s);
    CHECK(cert.gamma_feasible <= cert.C);
    CHECK(cert.C <= cert.gamma_infeasible);
    CHECK(cert.gamma_infeasible - cert.gamma_feasible <= 1e-8);
    CHECK(spijker_feasible(t, cert.gamma_feasible));
    CHECK_FALSE(spijker_feasible(t, cert.gamma_infeasible * 1.01));
  }
}

TEST_CASE("feasibility at zero holds for the catalog") {
  for (const auto& name : catalog_names()) CHECK(spijker_feasible(catalog(name), 0.0));
}
