#include "dimsim/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dimsim/errors.hpp"
#include "dimsim/parallel.hpp"

namespace dimsim {

std::string to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::Exact:
      return "exact";
    case ReferenceKind::SelfRefined:
      return "self";
    case ReferenceKind::Radau:
      return "radau";
  }
  return "unknown";
}

ReferenceKind parse_reference_kind(const std::string& text) {
  for (ReferenceKind k : {ReferenceKind::Exact, ReferenceKind::SelfRefined, ReferenceKind::Radau})
    if (to_string(k) == text) return k;
  throw UnknownNameError("unknown reference kind: " + text);
}

std::optional<double> least_squares_order(const std::vector<double>& h, const std::vector<double>& error) {
  if (h.size() != error.size()) throw InvalidArgument("h and error lists differ in length");
  std::vector<double> x, y;
  for (std::size_t k = 0; k < h.size(); ++k)
    if (h[k] > 0.0 && error[k] > 0.0 && std::isfinite(error[k])) {
      x.push_back(std::log(h[k]));
      y.push_back(std::log(error[k]));
    }
  if (x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

std::vector<double> halving_sequence(double h0, int count) {
  if (!(h0 > 0.0) || count < 1) throw InvalidArgument("halving sequence needs h0 > 0 and count >= 1");
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(std::ldexp(h0, -k));
  return out;
}

Vector reference_solution(const Tableau& t, const SplitProblem& prob, const ConvergenceOptions& opt, double h_ref) {
  switch (opt.reference) {
    case ReferenceKind::Exact:
      if (!prob.exact) throw InvalidArgument("problem has no exact solution");
      return prob.exact(prob.t_end);
    case ReferenceKind::SelfRefined: {
      IntegrateOptions io;
      io.start = opt.start;
      io.newton = opt.newton;
      return integrate(opt.reference_method ? *opt.reference_method : t, prob, h_ref, io).y_final;
    }
    case ReferenceKind::Radau:
      return radau_solve(prob, prob.t0, prob.y0, prob.t_end, h_ref);
  }
  throw InvalidArgument("unknown reference kind");
}

ConvergenceResult convergence_study(const Tableau& t, const SplitProblem& prob, const ConvergenceOptions& opt) {
  if (opt.h_list.empty()) throw InvalidArgument("convergence study needs at least one stepsize");
  if (opt.reference_factor < 1) throw InvalidArgument("reference factor must be at least 1");
  for (double h : opt.h_list) step_count(prob, h);

  ConvergenceResult out;
  out.method = t.name;
  out.problem = prob.name;
  out.p = t.p;
  out.reference = opt.reference;
  const double h_min = *std::min_element(opt.h_list.begin(), opt.h_list.end());
  out.h_reference = opt.reference == ReferenceKind::Exact ? 0.0 : h_min / opt.reference_factor;
  if (opt.reference == ReferenceKind::SelfRefined)
    out.reference_method = opt.reference_method ? opt.reference_method->name : t.name;
  const Vector ref = opt.reference_value ? *opt.reference_value : reference_solution(t, prob, opt, out.h_reference);
  if (ref.size() != prob.dim) throw InvalidArgument("reference value has the wrong dimension");

  std::vector<double> hs = opt.h_list;
  std::sort(hs.begin(), hs.end(), std::greater<>());
  out.rows.resize(hs.size());
  parallel_for(
      hs.size(),
      [&](std::size_t k) {
        ConvergenceRow& row = out.rows[k];
        row.h = hs[k];
        try {
          IntegrateOptions io;
          io.start = opt.start;
          io.newton = opt.newton;
          const Trajectory tr = integrate(t, prob, row.h, io);
          row.n_steps = tr.n_steps;
          row.counters = tr.final_state.counters;
          row.error = (tr.y_final - ref).cwiseAbs().maxCoeff();
          if (!std::isfinite(row.error)) throw ConvergenceError("non-finite error");
        } catch (const std::exception& e) {
          row.failed = true;
          row.failure = e.what();
          row.error = std::numeric_limits<double>::quiet_NaN();
        }
      },
      opt.threads);

  std::vector<double> h_ok, e_ok;
  for (std::size_t k = 0; k < out.rows.size(); ++k) {
    const auto& row = out.rows[k];
    if (row.failed) continue;
    if (k > 0 && !out.rows[k - 1].failed && row.error > 0.0 && out.rows[k - 1].error > 0.0)
      out.rows[k].order = std::log(out.rows[k - 1].error / row.error) / std::log(out.rows[k - 1].h / row.h);
    h_ok.push_back(row.h);
    e_ok.push_back(row.error);
  }
  out.summary_order = least_squares_order(h_ok, e_ok);

  if (opt.start_perturbation > 0.0 && !out.rows.back().failed && out.rows.back().error > 0.0) {
    const double delta = opt.start_perturbation;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double size = 0.0;
    IntegrateOptions io;
    io.start = opt.start;
    io.newton = opt.newton;
    io.after_start = [&](StepperState& st) {
      for (auto& y : st.y_ext) {
        for (Eigen::Index i = 0; i < y.size(); ++i) {
          if (i == prob.time_index) continue;
          const double bump = delta * dist(rng) * std::max(1.0, std::abs(y(i)));
          size = std::max(size, std::abs(bump));
          y(i) += bump;
        }
      }
    };
    try {
      const Trajectory tr = integrate(t, prob, out.rows.back().h, io);
      const double e = (tr.y_final - ref).cwiseAbs().maxCoeff();
      out.start_amplification = size > 0.0 ? std::abs(e - out.rows.back().error) / size : 0.0;
    } catch (const std::exception&) {
      out.start_amplification = std::numeric_limits<double>::infinity();
    }
  }
  const bool order_short = out.summary_order && *out.summary_order < t.p - 0.2;
  out.start_sensitive = order_short || (out.start_amplification && *out.start_amplification > 10.0);
  return out;
}

}  // namespace dimsim
