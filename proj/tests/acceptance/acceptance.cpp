#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "dimsim/convergence.hpp"
#include "dimsim/integrator.hpp"
#include "dimsim/io.hpp"
#include "dimsim/problems.hpp"
#include "dimsim/ssp.hpp"
#include "dimsim/stability.hpp"
#include "dimsim/tableau.hpp"

using namespace dimsim;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct TableRow {
  double C, int_SE, int_Salpha, area_SE, area_Salpha, area_Salpha_tol;
};

const std::map<std::string, TableRow>& table() {
  static const std::map<std::string, TableRow> rows{
      {"DIMSIM1A", {1.00, -2.00, -2.00, 3.14, 3.14, 0.1}}, {"DIMSIM1L", {1.00, -2.00, -2.00, 3.14, 3.14, 0.1}},
      {"DIMSIM2A", {1.38, -2.87, -2.87, 7.14, 4.66, 0.1}}, {"DIMSIM2L", {1.17, -3.01, -3.01, 7.46, 7.34, 0.1}},
      {"DIMSIM3A", {0.99, -3.57, -1.32, 9.68, 2.18, 0.1}}, {"DIMSIM3L", {0.85, -4.10, -1.85, 9.52, 3.84, 0.1}},
      {"DIMSIM4A", {0.51, -3.01, -0.30, 9.68, 0.15, 0.02}}};
  return rows;
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back(what);
    }
  }
};

std::string g(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::vector<Tableau> all_methods() {
  std::vector<Tableau> out;
  for (const auto& n : catalog_names()) out.push_back(catalog(n));
  return out;
}

Outcome criterion1() {
  Outcome o;
  const auto start = Clock::now();
  double worst = 0.0;
  for (const auto& n : catalog_names()) {
    const Tableau t = catalog(n);
    const double r = verify_order(t).max_residual();
    worst = std::max(worst, r);
    o.require(r < 1e-10, n + " residual " + g(r));
    o.require(t.q == t.p, n + " stage order");
  }
  const double wall = seconds_since(start);
  o.require(wall < 1.0, "runtime " + g(wall) + " s");
  o.notes.insert(o.notes.begin(), "max residual " + g(worst, 3) + ", " + g(wall, 3) + " s");
  return o;
}

Outcome criterion2() {
  Outcome o;
  std::string values;
  for (const auto& t : all_methods()) {
    const auto start = Clock::now();
    const SspCertificate c = ssp_coefficient(t);
    const double wall = seconds_since(start);
    const double want = table().at(t.name).C;
    values += t.name.substr(6) + " " + g(c.C) + " ";
    o.require(std::abs(c.C - want) <= 0.01, t.name + " C " + g(c.C, 6) + " vs " + g(want));
    o.require(c.C_eff == c.C / t.s, t.name + " C_eff");
    o.require(wall < 1.0, t.name + " runtime " + g(wall) + " s");
  }
  o.notes.insert(o.notes.begin(), values);
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto start = Clock::now();
  std::vector<Complex> wedge;
  for (double y : default_y_grid()) wedge.push_back(wedge_point(std::numbers::pi / 2, y));
  for (const auto& t : all_methods()) {
    const auto& row = table().at(t.name);
    const double se = stability_interval(t, {Complex(0.0, 0.0)});
    const double sa = stability_interval(t, wedge);
    o.require(std::abs(se - row.int_SE) <= 0.01, t.name + " int(S_E) " + g(se, 5) + " vs " + g(row.int_SE));
    o.require(std::abs(sa - row.int_Salpha) <= 0.02,
              t.name + " int(S_pi/2) " + g(sa, 5) + " vs " + g(row.int_Salpha));
  }
  const double wall = seconds_since(start);
  o.require(wall < 10.0, "runtime " + g(wall) + " s");
  o.notes.insert(o.notes.begin(), g(wall, 3) + " s");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto start = Clock::now();
  const auto y_grid = default_y_grid();
  for (const auto& t : all_methods()) {
    const auto& row = table().at(t.name);
    const Region se = region_SE(t);
    const Region sa = region_S_alpha(t, std::numbers::pi / 2, y_grid);
    o.require(std::abs(se.area - row.area_SE) <= 0.05, t.name + " area(S_E) " + g(se.area, 5) + " vs " + g(row.area_SE));
    o.require(std::abs(sa.area - row.area_Salpha) <= row.area_Salpha_tol,
              t.name + " area(S_pi/2) " + g(sa.area, 5) + " vs " + g(row.area_Salpha));
  }
  const double wall = seconds_since(start);
  o.require(wall < 300.0, "runtime " + g(wall) + " s");
  o.notes.insert(o.notes.begin(), g(wall, 3) + " s");
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (const auto& t : all_methods()) {
    const LStabilityReport r = l_stability_check(t);
    const bool l_method = t.name.back() == 'L';
    o.require(r.a_report.n_samples == 2000, t.name + " sample count");
    o.require(r.a_stable, t.name + " not A-stable (min gap " + g(r.a_report.min_gap, 3) + ")");
    if (l_method) {
      o.require(r.l_stable, t.name + " degree check failed");
      const double rho = spectral_radius(stability_matrix(t, 0.0, -1e8));
      o.require(rho < 1e-6, t.name + " rho(M(0,-1e8)) = " + g(rho, 3));
    } else {
      o.require(!r.l_stable, t.name + " unexpectedly L-stable");
    }
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> re(-3.0, 0.0), im(-3.0, 3.0);
  double worst = 0.0;
  for (const auto& t : all_methods()) {
    double w = 0.0;
    for (int k = 0; k < 20; ++k) {
      const Complex z0(re(rng), im(rng)), z1(10.0 * re(rng), 10.0 * im(rng));
      const double h = 0.1;
      const SplitProblem p = test_equation(z0 / h, z1 / h);
      Stepper st(t, p);
      StepperState s;
      s.h = h;
      ComplexVector y(t.r);
      for (int i = 0; i < t.r; ++i) {
        s.y_ext.push_back(Vector{{im(rng), im(rng)}});
        y(i) = Complex(s.y_ext[i](0), s.y_ext[i](1));
      }
      st.step(s);
      const ComplexVector m = stability_matrix(t, z0, z1) * y;
      for (int i = 0; i < t.r; ++i)
        w = std::max(w, std::abs(m(i) - Complex(s.y_ext[i](0), s.y_ext[i](1))) / std::max(1.0, std::abs(m(i))));
    }
    o.require(w < 1e-13, t.name + " difference " + g(w, 3));
    worst = std::max(worst, w);
  }
  o.notes.insert(o.notes.begin(), "worst relative difference " + g(worst, 3));
  return o;
}

std::string order_list(const std::vector<ConvergenceResult>& rs) {
  std::string s;
  for (const auto& r : rs) s += r.method.substr(6) + " " + (r.summary_order ? g(*r.summary_order) : "n/a") + " ";
  return s;
}

Outcome criterion7() {
  Outcome o;
  const auto start = Clock::now();
  const SplitProblem p = advection_reaction(400);
  ConvergenceOptions opt;
  opt.h_list = halving_sequence(1.0 / 1024, 5);
  opt.reference_method = catalog("DIMSIM3L");
  opt.reference_value = reference_solution(*opt.reference_method, p, opt, opt.h_list.back() / opt.reference_factor);
  std::vector<ConvergenceResult> rs;
  for (const char* n : {"DIMSIM2A", "DIMSIM2L", "DIMSIM3A", "DIMSIM3L", "DIMSIM4A"}) {
    rs.push_back(convergence_study(catalog(n), p, opt));
    const auto& r = rs.back();
    if (r.p == 4) {
      o.require(r.summary_order.has_value(), "DIMSIM4A produced no order");
      o.notes.push_back("DIMSIM4A start_sensitive=" + std::string(r.start_sensitive ? "true" : "false") +
                        " amplification " + (r.start_amplification ? g(*r.start_amplification, 3) : "n/a"));
      continue;
    }
    o.require(r.summary_order && *r.summary_order >= r.p - 0.2,
              r.method + " order " + (r.summary_order ? g(*r.summary_order) : "n/a"));
  }
  o.notes.insert(o.notes.begin(), order_list(rs) + "(" + g(seconds_since(start), 3) + " s)");
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto start = Clock::now();
  const SplitProblem p = shallow_water(201, 1e-8);
  ConvergenceOptions opt;
  opt.h_list = halving_sequence(p.t_end / 32, 5);
  std::vector<ConvergenceResult> rs;
  for (const char* n : {"DIMSIM2A", "DIMSIM2L", "DIMSIM3A", "DIMSIM3L"}) {
    rs.push_back(convergence_study(catalog(n), p, opt));
    const auto& r = rs.back();
    o.require(r.summary_order && *r.summary_order >= r.p - 0.3,
              r.method + " order " + (r.summary_order ? g(*r.summary_order) : "n/a"));
  }
  o.notes.insert(o.notes.begin(), order_list(rs) + "(" + g(seconds_since(start), 3) + " s)");
  return o;
}

Outcome criterion9() {
  Outcome o;
  auto error = [](int N) {
    const Grid1D grid = Grid1D::make(N, BoundaryKind::Periodic);
    Vector u(N);
    for (int i = 0; i < N; ++i) u(i) = std::sin(2.0 * std::numbers::pi * grid.x(i));
    const Vector d = weno5_derivative(u, 1.0, grid);
    double e = 0.0;
    for (int i = 0; i < N; ++i)
      e = std::max(e, std::abs(d(i) - 2.0 * std::numbers::pi * std::cos(2.0 * std::numbers::pi * grid.x(i))));
    return e;
  };
  const double ratio = error(64) / error(128);
  o.require(std::abs(ratio / 32.0 - 1.0) <= 0.2, "refinement ratio " + g(ratio));

  const int N = 201;
  const SplitProblem p = shallow_water(N, 1e-8);
  IntegrateOptions io;
  io.record_trajectory = true;
  double drift = 0.0;
  for (const char* n : {"DIMSIM2L", "DIMSIM3A"}) {
    const Trajectory tr = integrate(catalog(n), p, p.t_end / 64, io);
    for (std::size_t k = 1; k < tr.y.size(); ++k)
      drift = std::max(drift, std::abs(tr.y[k].head(N).sum() - tr.y[k - 1].head(N).sum()) / N);
  }
  o.require(drift <= 1e-10, "mass change per step " + g(drift, 3));
  o.notes.insert(o.notes.begin(), "ratio " + g(ratio) + ", mass change per step " + g(drift, 3));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion10() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "dimsim_acceptance_replay";
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> commands{
      {"solve", "--method", "DIMSIM3L", "--problem", "prothero_robinson", "--epsilon", "0.001", "--h", "0.015625"},
      {"converge", "--method", "DIMSIM2A,DIMSIM3A", "--problem", "shallow_water", "--N", "64", "--h", "0.0078125",
       "--levels", "3", "--seed", "5"},
      {"region", "--method", "DIMSIM2L", "--kind", "Salpha", "--alpha", "60", "--n-angles", "120", "--y-points", "20"},
      {"verify", "--ssp", "DIMSIM2L", "DIMSIM4A"}};
  std::ostringstream sink;
  int compared = 0;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    const fs::path first = root / std::to_string(c) / "first";
    std::vector<std::string> args = commands[c];
    args.push_back("--out");
    args.push_back(first.string());
    if (cli::run(args, sink, sink) != 0) {
      o.require(false, commands[c][0] + " failed");
      continue;
    }
    for (const auto& entry : fs::directory_iterator(first)) {
      const std::string name = entry.path().filename().string();
      if (name.size() < 14 || name.substr(name.size() - 14) != ".manifest.json") continue;
      const RunManifest m = read_json(entry.path()).get<RunManifest>();
      const fs::path second = root / std::to_string(c) / "second";
      if (cli::run({"replay", entry.path().string(), "--out", second.string()}, sink, sink) != 0) {
        o.require(false, "replay of " + name + " failed");
        continue;
      }
      std::vector<std::string> files = m.outputs;
      files.push_back(name);
      for (const auto& f : files) {
        if (std::find(m.nondeterministic_outputs.begin(), m.nondeterministic_outputs.end(), f) !=
            m.nondeterministic_outputs.end())
          continue;
        ++compared;
        o.require(fs::exists(second / f) && slurp(first / f) == slurp(second / f), f + " differs");
      }
    }
  }
  fs::remove_all(root);
  o.require(compared > 0, "nothing compared");
  o.notes.insert(o.notes.begin(), std::to_string(compared) + " files compared");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"coefficient and order reproduction", criterion1},
      {"SSP coefficients", criterion2},
      {"stability intervals", criterion3},
      {"region areas", criterion4},
      {"A-/L-stability verdicts", criterion5},
      {"stepper versus stability matrix", criterion6},
      {"convergence on advection-reaction", criterion7},
      {"convergence on shallow water", criterion8},
      {"WENO5 order and conservation", criterion9},
      {"manifest replay determinism", criterion10}};
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes.push_back(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::string detail;
    for (const auto& n : o.notes) detail += (detail.empty() ? "" : "; ") + n;
    std::printf("criterion %zu %s: %s (%s)\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
