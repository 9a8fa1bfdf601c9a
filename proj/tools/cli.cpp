#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dimsim/convergence.hpp"
#include "dimsim/errors.hpp"
#include "dimsim/integrator.hpp"
#include "dimsim/io.hpp"
#include "dimsim/problems.hpp"
#include "dimsim/report.hpp"
#include "dimsim/stability.hpp"
#include "dimsim/tableau.hpp"

namespace dimsim::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Files produced by one command, written together with the manifest once
/// the command has finished.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string text) { files_.emplace_back(name, std::move(text)); }
  void add_json(const std::string& name, const json& j) { add(name, dump_json(j) + "\n"); }
  void add_timing(const std::string& name, const json& j) {
    add_json(name, j);
    nondeterministic_.push_back(name);
  }

  void write(RunManifest manifest, const std::string& manifest_name) const {
    for (const auto& [name, text] : files_) {
      write_text(dir_ / name, text);
      manifest.outputs.push_back(name);
    }
    manifest.nondeterministic_outputs = nondeterministic_;
    manifest.tool_version = tool_version();
    json j = manifest;
    write_json(dir_ / manifest_name, j);
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
  std::vector<std::string> nondeterministic_;
};

std::vector<std::string> strip_out(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    kept.push_back(args[i]);
  }
  return kept;
}

Complex parse_complex(const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  double re = 0.0, im = 0.0;
  if (!(in >> re)) throw InvalidArgument("cannot parse complex value '" + text + "'");
  if (!(in >> im)) im = 0.0;
  std::string rest;
  if (in >> rest) throw InvalidArgument("cannot parse complex value '" + text + "'");
  return {re, im};
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

/// Options shared by the commands that build a problem.
struct ProblemArgs {
  std::string problem;
  std::optional<int> N;
  std::optional<double> epsilon;
  std::optional<double> t_end;
  std::string lambda0 = "0";
  std::string lambda1 = "-1";

  void attach(CLI::App* app) {
    app->add_option("--problem", problem, "Problem name")->required();
    app->add_option("--N", N, "Grid size");
    app->add_option("--epsilon", epsilon, "Stiffness parameter");
    app->add_option("--t-end", t_end, "Final time");
    app->add_option("--lambda0", lambda0, "Explicit coefficient of the test equation (re or re,im)");
    app->add_option("--lambda1", lambda1, "Implicit coefficient of the test equation (re or re,im)");
  }

  ProblemParams params() const {
    ProblemParams p;
    p.N = N;
    p.epsilon = epsilon;
    p.t_end = t_end;
    p.lambda0 = parse_complex(lambda0);
    p.lambda1 = parse_complex(lambda1);
    return p;
  }

  json describe() const {
    json j = json::object();
    if (N) j["N"] = *N;
    if (epsilon) j["epsilon"] = *epsilon;
    if (t_end) j["t_end"] = *t_end;
    if (problem == "test") {
      j["lambda0"] = complex_json(parse_complex(lambda0));
      j["lambda1"] = complex_json(parse_complex(lambda1));
    }
    return j;
  }
};

struct StartArgs {
  std::string mode = "reference-bootstrap";
  int substeps = 8;

  void attach(CLI::App* app) {
    app->add_option("--start", mode, "Starting procedure: exact-stages, exact-derivatives, reference-bootstrap");
    app->add_option("--substeps", substeps, "Radau substeps per abscissa gap for the bootstrap start");
  }

  StartOptions options() const {
    StartOptions s;
    s.mode = parse_start_mode(mode);
    s.bootstrap_substeps = substeps;
    return s;
  }
};

struct GridArgs {
  int n_angles = PolarGrid{}.n_angles;
  double r_max = PolarGrid{}.r_max;
  int y_points = 60;

  void attach(CLI::App* app) {
    app->add_option("--n-angles", n_angles, "Rays in the polar region scan");
    app->add_option("--r-max", r_max, "Largest radius of the region scan");
    app->add_option("--y-points", y_points, "Wedge samples per side of the real axis");
  }

  PolarGrid grid() const {
    PolarGrid g;
    g.n_angles = n_angles;
    g.r_max = r_max;
    return g;
  }

  json describe() const { return json{{"n_angles", n_angles}, {"r_max", r_max}, {"y_points", y_points}}; }
};

/// Keeps only expected fields that the command computed; the rest are
/// reported on `err` and skipped.
json restrict_expected(const json& expected, const json& actual, std::ostream& err) {
  json kept = json::object();
  if (!expected.is_object()) throw InvalidArgument("expectation file must be a JSON object");
  for (auto m = expected.begin(); m != expected.end(); ++m) {
    if (!actual.contains(m.key())) continue;
    const json& rec = actual.at(m.key());
    json fields = json::object();
    std::vector<std::string> skipped;
    for (auto f = m.value().begin(); f != m.value().end(); ++f) {
      if (rec.contains(f.key()))
        fields[f.key()] = f.value();
      else
        skipped.push_back(f.key());
    }
    if (!skipped.empty()) {
      err << "note: " << m.key() << ": not computed by this command:";
      for (const auto& s : skipped) err << ' ' << s;
      err << '\n';
    }
    kept[m.key()] = fields;
  }
  return kept;
}

int check_expectations(const std::string& expect_path, const json& actual, std::ostream& out, std::ostream& err) {
  if (expect_path.empty()) return kExitOk;
  const json expected = restrict_expected(read_json(expect_path), actual, err);
  const auto mismatches = compare_with_expected(actual, expected);
  if (mismatches.empty()) {
    out << "expectations: all matched\n";
    return kExitOk;
  }
  for (const auto& m : mismatches) err << "mismatch: " << m << '\n';
  return kExitMismatch;
}

std::string fmt(double x, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, x);
  return buf;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::vector<std::string> methods;
  bool all = false;
  bool ssp_only = false;
  GridArgs grid;
};

int cmd_verify(const VerifyArgs& a, const fs::path& out_dir, const std::string& expect, RunManifest manifest,
               std::ostream& out, std::ostream& err) {
  std::vector<std::string> names = a.all ? catalog_names() : a.methods;
  if (names.empty()) throw InvalidArgument("verify needs a method name or --all");
  std::vector<Tableau> tableaux;
  for (const auto& n : names) tableaux.push_back(catalog(n));

  SummaryOptions so;
  so.grid = a.grid.grid();
  so.y_grid = default_y_grid(a.grid.y_points);
  so.regions = !a.ssp_only;

  OutputSet files(out_dir);
  json table = json::object();
  json timing = json::object();
  CsvTable csv({"method", "s", "p", "order_residual", "C", "C_eff", "int_SE", "int_Salpha", "area_SE",
                "area_Salpha", "a_stable", "l_stable", "rho_stiff"});
  for (const auto& t : tableaux) {
    const auto start = Clock::now();
    const MethodSummary m = summarize_method(t, so);
    timing[t.name] = seconds_since(start);
    json rec = summary_json(m);
    files.add_json(t.name + ".json", rec);
    json row{{"s", rec["s"]},           {"p", rec["p"]},       {"order_residual", rec["order_residual"]},
             {"C", rec["C"]},           {"C_eff", rec["C_eff"]}, {"a_stable", rec["a_stable"]},
             {"l_stable", rec["l_stable"]}, {"rho_stiff", rec["rho_stiff"]}};
    for (const char* k : {"int_SE", "int_Salpha", "area_SE", "area_Salpha"})
      if (rec.contains(k)) row[k] = rec[k];
    table[t.name] = row;
    auto num = [&](const char* k) { return row.contains(k) ? format_number(row[k].get<double>()) : std::string(); };
    csv.add_row({t.name, std::to_string(m.s), std::to_string(m.p), num("order_residual"), num("C"), num("C_eff"),
                 num("int_SE"), num("int_Salpha"), num("area_SE"), num("area_Salpha"),
                 m.stability.a_stable ? "true" : "false", m.stability.l_stable ? "true" : "false", num("rho_stiff")});

    out << t.name << ": residual " << fmt(m.order.max_residual(), 3) << ", C " << fmt(m.ssp.C, 5) << ", C_eff "
        << fmt(m.ssp.C_eff, 5) << ", " << (m.stability.l_stable ? "L-stable" : m.stability.a_stable ? "A-stable" : "not A-stable");
    if (m.has_regions)
      out << ", int(S_E) " << fmt(m.region_SE.interval_left, 5) << ", int(S_pi/2) "
          << fmt(m.region_Salpha.interval_left, 5) << ", area(S_E) " << fmt(m.region_SE.area, 5)
          << ", area(S_pi/2) " << fmt(m.region_Salpha.area, 5);
    out << '\n';
  }
  files.add_json("table.json", table);
  files.add("table.csv", csv.str());
  files.add_timing("verify.timing.json", timing);

  manifest.methods = names;
  manifest.parameters = json{{"ssp_only", a.ssp_only}, {"grid", a.grid.describe()}};
  files.write(manifest, "verify.manifest.json");
  return check_expectations(expect, table, out, err);
}

// ---------------------------------------------------------------- region

struct RegionArgs {
  std::string method;
  std::string kind = "SE";
  double alpha_deg = 90.0;
  std::optional<double> y;
  bool check_density = false;
  GridArgs grid;
};

int cmd_region(const RegionArgs& a, const fs::path& out_dir, const std::string& expect, RunManifest manifest,
               std::ostream& out, std::ostream& err) {
  const Tableau t = catalog(a.method);
  const PolarGrid grid = a.grid.grid();
  const double alpha = a.alpha_deg * std::numbers::pi / 180.0;
  Region r;
  std::string stem = "region_" + t.name + "_";
  if (a.kind == "SE") {
    r = region_SE(t, grid);
    stem += "SE";
  } else if (a.kind == "Salpha") {
    if (a.y) {
      r = region_S_alpha_y(t, alpha, *a.y, grid);
      stem += "Salpha_" + fmt(a.alpha_deg, 10) + "_y" + fmt(*a.y, 10);
    } else {
      r = region_S_alpha(t, alpha, default_y_grid(a.grid.y_points), grid, a.check_density);
      stem += "Salpha_" + fmt(a.alpha_deg, 10);
    }
  } else {
    throw InvalidArgument("unknown region kind '" + a.kind + "' (expected SE or Salpha)");
  }

  CsvTable csv({"theta", "boundary_re", "boundary_im"});
  for (std::size_t k = 0; k < r.theta.size(); ++k)
    csv.add_row({format_number(r.theta[k]), format_number(r.boundary[k].real()), format_number(r.boundary[k].imag())});

  OutputSet files(out_dir);
  files.add(stem + ".csv", csv.str());
  files.add_json(stem + ".json", region_sidecar(r, grid));

  manifest.methods = {t.name};
  manifest.parameters = json{{"kind", a.kind}, {"grid", a.grid.describe()}, {"check_density", a.check_density}};
  if (a.kind == "Salpha") manifest.parameters["alpha_deg"] = a.alpha_deg;
  if (a.y) manifest.parameters["y"] = *a.y;
  files.write(manifest, stem + ".manifest.json");

  out << t.name << " " << to_string(r.kind) << ": area " << fmt(r.area, 6) << ", interval (" << fmt(r.interval_left, 6)
      << ", 0)";
  if (r.flags.recentered) out << " [recentered]";
  if (r.flags.non_star_shaped) out << " [non-star-shaped]";
  if (r.flags.truncated) out << " [truncated]";
  if (r.flags.unstable_asymptote) out << " [unstable asymptote]";
  if (r.flags.insufficient_y_density) out << " [insufficient y density]";
  out << '\n';

  json rec{{"area", r.area}, {"interval", r.interval_left}};
  if (r.kind == RegionKind::SE) {
    rec["area_SE"] = r.area;
    rec["int_SE"] = r.interval_left;
  } else if (r.kind == RegionKind::SAlpha && std::abs(a.alpha_deg - 90.0) < 1e-12) {
    rec["area_Salpha"] = r.area;
    rec["int_Salpha"] = r.interval_left;
  }
  return check_expectations(expect, json{{t.name, rec}}, out, err);
}

// ---------------------------------------------------------------- converge

struct ConvergeArgs {
  std::vector<std::string> methods;
  ProblemArgs problem;
  StartArgs start;
  std::vector<double> h;
  int levels = 5;
  std::string reference = "self";
  std::string reference_method;
  int reference_factor = 20;
  double perturbation = 1e-8;
  unsigned threads = 0;
};

int cmd_converge(const ConvergeArgs& a, const fs::path& out_dir, const std::string& expect, std::uint64_t seed,
                 RunManifest manifest, std::ostream& out, std::ostream& err) {
  if (a.methods.empty()) throw InvalidArgument("converge needs --method");
  if (a.h.empty()) throw InvalidArgument("converge needs --h");
  std::vector<Tableau> tableaux;
  for (const auto& n : a.methods) tableaux.push_back(catalog(n));
  const SplitProblem prob = make_problem(a.problem.problem, a.problem.params());

  ConvergenceOptions opt;
  opt.h_list = a.h.size() == 1 ? halving_sequence(a.h[0], a.levels) : a.h;
  opt.start = a.start.options();
  opt.reference = parse_reference_kind(a.reference);
  opt.reference_factor = a.reference_factor;
  opt.start_perturbation = a.perturbation;
  opt.seed = seed;
  opt.threads = a.threads;
  if (!a.reference_method.empty()) opt.reference_method = catalog(a.reference_method);

  json timing = json::object();
  const bool shared = opt.reference != ReferenceKind::Exact && (opt.reference_method || opt.reference == ReferenceKind::Radau);
  if (shared) {
    for (double h : opt.h_list) step_count(prob, h);
    const auto start = Clock::now();
    const double h_min = *std::min_element(opt.h_list.begin(), opt.h_list.end());
    opt.reference_value = reference_solution(tableaux.front(), prob, opt, h_min / opt.reference_factor);
    timing["reference"] = seconds_since(start);
  }

  std::vector<ConvergenceResult> results;
  for (const auto& t : tableaux) {
    const auto start = Clock::now();
    results.push_back(convergence_study(t, prob, opt));
    timing[t.name] = seconds_since(start);
  }

  CsvTable csv({"method", "h", "n_steps", "error", "order", "failed", "failure"});
  json record = json::object();
  json details = json::array();
  for (const auto& r : results) {
    for (const auto& row : r.rows)
      csv.add_row({r.method, format_number(row.h), std::to_string(row.n_steps), row.failed ? "" : format_number(row.error),
                   row.order ? format_number(*row.order) : "", row.failed ? "true" : "false", row.failure});
    details.push_back(as_json(r));
    json rec{{"p", r.p}, {"start_sensitive", r.start_sensitive}};
    if (r.summary_order) rec["order"] = *r.summary_order;
    if (r.start_amplification) rec["start_amplification"] = *r.start_amplification;
    record[r.method] = rec;

    out << r.method << " on " << r.problem << ": order ";
    out << (r.summary_order ? fmt(*r.summary_order, 4) : std::string("n/a")) << " (p = " << r.p << ")";
    if (r.start_sensitive) out << " [start-sensitive]";
    out << '\n';
    for (const auto& row : r.rows) {
      out << "  h " << fmt(row.h, 6) << "  ";
      if (row.failed)
        out << "failed: " << row.failure;
      else
        out << "error " << fmt(row.error, 6) << (row.order ? "  order " + fmt(*row.order, 4) : std::string());
      out << '\n';
    }
  }

  const std::string stem = "converge_" + prob.name;
  OutputSet files(out_dir);
  files.add(stem + ".csv", csv.str());
  files.add_json(stem + ".json", json{{"problem", prob.name},
                                      {"shared_reference", shared},
                                      {"summary", record},
                                      {"results", details}});
  files.add_timing(stem + ".timing.json", timing);

  manifest.methods = a.methods;
  manifest.problem = prob.name;
  manifest.h_list = opt.h_list;
  manifest.seed = seed;
  manifest.parameters = a.problem.describe();
  manifest.parameters["start"] = to_string(opt.start.mode);
  manifest.parameters["reference"] = to_string(opt.reference);
  manifest.parameters["reference_factor"] = opt.reference_factor;
  manifest.parameters["start_perturbation"] = opt.start_perturbation;
  if (opt.reference_method) manifest.parameters["reference_method"] = opt.reference_method->name;
  files.write(manifest, stem + ".manifest.json");
  return check_expectations(expect, record, out, err);
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string method;
  ProblemArgs problem;
  StartArgs start;
  double h = 0.0;
  long every = 1;
};

int cmd_solve(const SolveArgs& a, const fs::path& out_dir, const std::string& expect, RunManifest manifest,
              std::ostream& out, std::ostream& err) {
  if (a.every < 1) throw InvalidArgument("--every must be positive");
  const Tableau t = catalog(a.method);
  const SplitProblem prob = make_problem(a.problem.problem, a.problem.params());
  IntegrateOptions io;
  io.start = a.start.options();
  io.record_trajectory = true;
  const Trajectory tr = integrate(t, prob, a.h, io);

  std::vector<std::string> header{"t"};
  for (int i = 0; i < prob.dim; ++i) header.push_back("y" + std::to_string(i));
  CsvTable csv(header);
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    if (k % a.every != 0 && k + 1 != tr.t.size()) continue;
    std::vector<std::string> row{format_number(tr.t[k])};
    for (int i = 0; i < prob.dim; ++i) row.push_back(format_number(tr.y[k](i)));
    csv.add_row(std::move(row));
  }

  json meta{{"method", t.name},
            {"problem", prob.name},
            {"h", a.h},
            {"n_steps", tr.n_steps},
            {"t0", prob.t0},
            {"t_end", prob.t_end},
            {"dim", prob.dim},
            {"start", to_string(io.start.mode)},
            {"counters", as_json(tr.final_state.counters)},
            {"y_final", std::vector<double>(tr.y_final.data(), tr.y_final.data() + tr.y_final.size())}};
  if (prob.admissible) meta["admissible"] = prob.admissible(tr.y_final);
  json rec{{"n_steps", tr.n_steps}};
  if (prob.exact) {
    const double e = (tr.y_final - prob.exact(prob.t_end)).cwiseAbs().maxCoeff();
    meta["error"] = e;
    rec["error"] = e;
  }

  const std::string stem = "solve_" + t.name + "_" + prob.name;
  OutputSet files(out_dir);
  files.add(stem + ".csv", csv.str());
  files.add_json(stem + ".json", meta);
  files.add_timing(stem + ".timing.json", json{{"wall_time", tr.wall_time}});

  manifest.methods = {t.name};
  manifest.problem = prob.name;
  manifest.h_list = {a.h};
  manifest.parameters = a.problem.describe();
  manifest.parameters["start"] = to_string(io.start.mode);
  manifest.parameters["every"] = a.every;
  files.write(manifest, stem + ".manifest.json");

  out << t.name << " on " << prob.name << ": " << tr.n_steps << " steps of h = " << fmt(a.h, 10);
  if (meta.contains("error")) out << ", max error " << fmt(meta["error"].get<double>(), 6);
  out << '\n';
  return check_expectations(expect, json{{t.name, rec}}, out, err);
}

// ---------------------------------------------------------------- tableau

int cmd_tableau(const std::vector<std::string>& methods, bool all, const fs::path& out_dir, RunManifest manifest,
                std::ostream& out) {
  std::vector<std::string> names = all ? catalog_names() : methods;
  if (names.empty()) throw InvalidArgument("tableau needs a method name or --all");
  OutputSet files(out_dir);
  for (const auto& n : names) {
    const Tableau t = catalog(n);
    json j = t;
    files.add_json(t.name + ".tableau.json", j);
    out << t.name << ": s = " << t.s << ", p = " << t.p << ", lambda = " << format_number(t.lambda) << '\n';
  }
  manifest.methods = names;
  files.write(manifest, "tableau.manifest.json");
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"IMEX DIMSIM analysis and integration tool", "dimsim"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  std::string out_dir = ".";
  std::string expect;
  std::uint64_t seed = 0;
  auto common = [&](CLI::App* sub, bool with_expect) {
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Seed for randomized probes");
    if (with_expect) sub->add_option("--expect", expect, "JSON file with expected values");
  };

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Order, SSP, stability and region report for catalog methods");
  verify->add_option("methods,--method", va.methods, "Method names");
  verify->add_flag("--all", va.all, "Every catalog method");
  verify->add_flag("--ssp", va.ssp_only, "Skip the region scans");
  va.grid.attach(verify);
  common(verify, true);

  RegionArgs ra;
  auto* region = app.add_subcommand("region", "Stability region boundary of one method");
  region->add_option("--method", ra.method, "Method name")->required();
  region->add_option("--kind", ra.kind, "SE or Salpha");
  region->add_option("--alpha", ra.alpha_deg, "Wedge angle in degrees, in (0, 90]");
  region->add_option("--y", ra.y, "Single wedge point instead of the y-grid");
  region->add_flag("--check-density", ra.check_density, "Repeat the scan on a doubled y-grid");
  ra.grid.attach(region);
  common(region, true);

  ConvergeArgs ca;
  auto* converge = app.add_subcommand("converge", "Error versus stepsize study");
  converge->add_option("--method", ca.methods, "Method names")->required()->delimiter(',');
  ca.problem.attach(converge);
  ca.start.attach(converge);
  converge->add_option("--h", ca.h, "Stepsizes, or the largest stepsize of a halving sequence")->required()->delimiter(',');
  converge->add_option("--levels", ca.levels, "Length of the halving sequence when one --h is given");
  converge->add_option("--reference", ca.reference, "Reference: self, exact, radau");
  converge->add_option("--reference-method", ca.reference_method, "Method for a shared refined reference run");
  converge->add_option("--reference-factor", ca.reference_factor, "Reference stepsize is min(h) divided by this");
  converge->add_option("--perturbation", ca.perturbation, "Relative starting-value perturbation (0 disables)");
  converge->add_option("--threads", ca.threads, "Worker threads (0 = all cores)");
  common(converge, true);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Single fixed-step integration with trajectory output");
  solve->add_option("--method", sa.method, "Method name")->required();
  sa.problem.attach(solve);
  sa.start.attach(solve);
  solve->add_option("--h", sa.h, "Stepsize")->required();
  solve->add_option("--every", sa.every, "Write every k-th step");
  common(solve, true);

  std::vector<std::string> tab_methods;
  bool tab_all = false;
  auto* tableau = app.add_subcommand("tableau", "Write the reconstructed coefficient matrices");
  tableau->add_option("methods,--method", tab_methods, "Method names");
  tableau->add_flag("--all", tab_all, "Every catalog method");
  common(tableau, false);

  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "Rerun the command recorded in a manifest");
  replay->add_option("manifest", manifest_path, "Manifest file")->required();
  replay->add_option("--out", out_dir, "Output directory (default: <manifest dir>/replay)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  RunManifest manifest;
  manifest.args = strip_out(args);
  manifest.seed = seed;

  try {
    if (*verify) {
      manifest.command = "verify";
      return cmd_verify(va, out_dir, expect, manifest, out, err);
    }
    if (*region) {
      manifest.command = "region";
      return cmd_region(ra, out_dir, expect, manifest, out, err);
    }
    if (*converge) {
      manifest.command = "converge";
      return cmd_converge(ca, out_dir, expect, seed, manifest, out, err);
    }
    if (*solve) {
      manifest.command = "solve";
      return cmd_solve(sa, out_dir, expect, manifest, out, err);
    }
    if (*tableau) {
      manifest.command = "tableau";
      return cmd_tableau(tab_methods, tab_all, out_dir, manifest, out);
    }
    if (*replay) {
      const RunManifest m = read_json(manifest_path).get<RunManifest>();
      if (m.tool_version != tool_version())
        err << "warning: manifest written by version " << m.tool_version << ", running " << tool_version() << '\n';
      const bool out_given = replay->count("--out") > 0;
      const fs::path target = out_given ? fs::path(out_dir) : fs::path(manifest_path).parent_path() / "replay";
      std::vector<std::string> rerun = m.args;
      rerun.push_back("--out");
      rerun.push_back(target.string());
      return run(rerun, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace dimsim::cli
