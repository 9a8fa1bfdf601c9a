#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dimsim/integrator.hpp"

namespace dimsim {

enum class ReferenceKind { Exact, SelfRefined, Radau };

std::string to_string(ReferenceKind kind);
ReferenceKind parse_reference_kind(const std::string& text);

struct ConvergenceOptions {
  std::vector<double> h_list;
  StartOptions start;
  NewtonOptions newton;
  ReferenceKind reference = ReferenceKind::SelfRefined;
  int reference_factor = 20;  // h_ref = min(h_list) / reference_factor
  /// Method used for the refined reference run; the studied method if unset.
  std::optional<Tableau> reference_method;
  /// Precomputed reference value at t_end; skips the reference run.
  std::optional<Vector> reference_value;
  /// Rerun the finest stepsize with the starting vector perturbed by this
  /// relative amount (0 disables the probe).
  double start_perturbation = 1e-8;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct ConvergenceRow {
  double h = 0.0;
  long n_steps = 0;
  double error = 0.0;
  std::optional<double> order;  // against the previous (larger) h
  bool failed = false;
  std::string failure;
  Counters counters;
};

struct ConvergenceResult {
  std::string method;
  std::string problem;
  int p = 0;
  std::vector<ConvergenceRow> rows;
  std::optional<double> summary_order;  // least-squares slope of log error vs log h
  ReferenceKind reference = ReferenceKind::SelfRefined;
  std::string reference_method;
  double h_reference = 0.0;
  /// |error change| / perturbation at the finest h; large values mean the
  /// result depends strongly on the starting values.
  std::optional<double> start_amplification;
  bool start_sensitive = false;
};

/// Slope of the least-squares line through (log h, log error); needs two
/// positive errors.
std::optional<double> least_squares_order(const std::vector<double>& h, const std::vector<double>& error);

/// Halving sequence h0, h0/2, ... with `count` entries.
std::vector<double> halving_sequence(double h0, int count);

/// Terminal value used as the reference by convergence_study: the exact
/// solution, a run of `t` (or options.reference_method) at h_ref, or Radau IIA.
Vector reference_solution(const Tableau& t, const SplitProblem& prob, const ConvergenceOptions& options, double h_ref);

ConvergenceResult convergence_study(const Tableau& t, const SplitProblem& prob, const ConvergenceOptions& options);

}  // namespace dimsim
