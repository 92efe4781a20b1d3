#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ccp/errors.hpp"
#include "ccp/milp.hpp"
#include "ccp/net.hpp"
#include "ccp/rng.hpp"
#include "ccp/simplex.hpp"

namespace ccp {

struct OptimizerConfig {
  double alpha = 1e-3;         // learning rate
  double beta = 1e-4;          // noise scale on the target point
  int max_outer = 100000;      // outer LP-solve iterations
  int max_inner = 1000;        // gradient steps per outer iteration
  long max_total_steps = 10000;
  double conv_tol = 1e-6;      // relative best-bound improvement threshold
  int conv_window = 50;        // outer iterations without improvement
  double cut_tol = 1e-6;       // a row counts as cutting only beyond this margin
  std::uint64_t seed = 0;
  bool measure_time = false;   // wall-clock in trace records breaks their byte reproducibility

  void validate() const {
    if (alpha <= 0.0) throw ValidationError("OptimizerConfig: alpha must be > 0");
    if (beta < 0.0) throw ValidationError("OptimizerConfig: beta must be >= 0");
    if (max_outer < 1 || max_inner < 1 || max_total_steps < 1)
      throw ValidationError("OptimizerConfig: iteration caps must be >= 1");
    if (conv_tol <= 0.0) throw ValidationError("OptimizerConfig: conv_tol must be > 0");
    if (conv_window < 1) throw ValidationError("OptimizerConfig: conv_window must be >= 1");
    if (cut_tol <= 0.0) throw ValidationError("OptimizerConfig: cut_tol must be > 0");
  }
};

struct TraceRecord {
  int outer_iter = 0;
  long total_grad_steps = 0;  // steps taken before the recorded bound was measured
  double dual_bound = 0.0;
  double best_bound = 0.0;
  std::optional<double> gap;  // present when the instance carries a known optimum
  int inner_steps = 0;        // gradient steps taken after this measurement
  int pivots = 0;
  double seconds = 0.0;
};

struct RunTrace {
  std::vector<TraceRecord> records;

  bool empty() const { return records.empty(); }
  const TraceRecord& back() const { return records.back(); }
};

/// The relaxation enlarged by the network's inequalities:
///   min c.x + h.z  s.t.  f(A) x + fbar(G) z >= f(b),  x, z >= 0.
/// Its first m rows are the original constraints.
inline LpProblem build_enlarged_lp(const NetForward& fwd, const MilpInstance& inst) {
  LpProblem lp;
  const int p = int(fwd.fb.size());
  lp.M.resize(p, inst.n);
  if (inst.ncont() > 0)
    lp.M << fwd.FA, fwd.FG;
  else
    lp.M = fwd.FA;
  lp.q = fwd.fb;
  lp.d.resize(inst.n);
  lp.d << inst.c, inst.h;
  return lp;
}

inline LpProblem build_enlarged_lp(const SubadditiveNet& net, const MilpInstance& inst) {
  inst.validate();
  if (net.input_dim != inst.m)
    throw ValidationError("build_enlarged_lp: net input_dim does not match instance row count");
  return build_enlarged_lp(net_forward(net, inst.A, inst.G, inst.b), inst);
}

/// True once the best bound stalled over the trailing window or a budget ran
/// out. The stopping criterion is ours; the alternation itself does not
/// prescribe one.
inline bool converged(const RunTrace& trace, const OptimizerConfig& config) {
  if (trace.empty()) throw ValidationError("converged: trace is empty");
  if (int(trace.records.size()) >= config.max_outer) return true;
  if (trace.back().total_grad_steps >= config.max_total_steps) return true;
  const int window = config.conv_window;
  if (int(trace.records.size()) < window) return false;
  const double now = trace.back().best_bound;
  const double then = trace.records[trace.records.size() - window].best_bound;
  return now - then < config.conv_tol * (1.0 + std::abs(now));
}

struct InnerLoopResult {
  int steps = 0;
  bool cut_achieved = false;
  Vector last_violation;
};

/// Gradient descent until some inequality cuts the (noisy) target. Each
/// iteration samples fresh noise, checks the current net at the target, and
/// only then takes a step, so an already-cut point costs zero steps.
///
/// A row counts as cutting only when its violation clears both the LP
/// feasibility noise and the noise injected into the target itself: rows
/// active at the LP vertex sit at violation ~ beta * N(0,1), and a bare
/// "< 0" test would fire on them immediately, before any step is taken.
inline InnerLoopResult run_inner_loop(SubadditiveNet& net, const MilpInstance& inst, const Vector& xstar,
                                      const Vector& zstar, const OptimizerConfig& config, Rng& rng,
                                      long budget_left) {
  InnerLoopResult res;
  const long cap = std::min<long>(config.max_inner, budget_left);
  for (;;) {
    const Vector eps = rng.gaussian_vector(inst.n);
    const Vector xbar = xstar + config.beta * eps.head(inst.k);
    const Vector zbar = zstar + config.beta * eps.tail(inst.ncont());
    LossResult loss = cutoff_loss(net, inst, xbar, zbar);
    res.last_violation = loss.violation;
    bool cut = false;
    for (int i = 0; i < loss.violation.size() && !cut; ++i) {
      const double row_norm = std::sqrt(loss.fwd.FA.row(i).squaredNorm() +
                                        (inst.ncont() > 0 ? loss.fwd.FG.row(i).squaredNorm() : 0.0));
      const double margin = config.cut_tol * (1.0 + std::abs(loss.fwd.fb(i))) +
                            6.0 * config.beta * row_norm;
      cut = loss.violation(i) < -margin;
    }
    if (cut) {
      res.cut_achieved = true;
      return res;
    }
    if (res.steps >= cap) return res;  // stalled; the outer loop proceeds anyway
    const GradientSet grads = loss_gradients(net, inst, xbar, zbar, loss.cache);
    if (!grads.all_finite()) throw NumericalError("inner loop: non-finite gradient");
    net = sgd_step(net, grads, config.alpha);
    ++res.steps;
  }
}

struct OptimizeResult {
  SubadditiveNet net_best;
  RunTrace trace;
  double best_bound = 0.0;
  double initial_bound = 0.0;
  long total_grad_steps = 0;
};

/// The two-step alternation: solve the enlarged LP (warm-started from the
/// previous basis), then descend on the cut-off loss until the LP optimum is
/// cut, and repeat. The dual bound is not monotone along the way; the best
/// bound and the net achieving it are tracked explicitly.
inline OptimizeResult two_step_optimize(const MilpInstance& inst, const SubadditiveNet& net0,
                                        const OptimizerConfig& config) {
  inst.validate();
  net0.validate();
  config.validate();
  if (net0.input_dim != inst.m)
    throw ValidationError("two_step_optimize: net input_dim does not match instance row count");

  SubadditiveNet net = net0;
  OptimizeResult out;
  out.net_best = net0;
  double best = -std::numeric_limits<double>::infinity();
  Rng rng(splitmix64(config.seed));
  SimplexSolver solver;
  std::optional<Basis> warm;
  long total = 0;
  const auto t0 = std::chrono::steady_clock::now();

  for (int outer = 1; outer <= config.max_outer; ++outer) {
    const LpProblem lp = build_enlarged_lp(net, inst);
    const LpSolution sol = warm ? solver.solve(lp, *warm) : solver.solve(lp);
    if (sol.status != LpStatus::optimal)
      throw NumericalError(std::string("two_step_optimize: enlarged LP ") + to_string(sol.status));
    warm = sol.basis;

    if (sol.objective > best) {
      best = sol.objective;
      out.net_best = net;
    }
    TraceRecord rec;
    rec.outer_iter = outer;
    rec.total_grad_steps = total;
    rec.dual_bound = sol.objective;
    rec.best_bound = best;
    if (inst.known_optimum) rec.gap = gap_for_report(sol.objective, *inst.known_optimum).value;
    rec.pivots = sol.pivots;
    if (config.measure_time)
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.trace.records.push_back(rec);

    if (converged(out.trace, config)) break;

    const Vector xstar = sol.primal.head(inst.k);
    const Vector zstar = sol.primal.tail(inst.ncont());
    const InnerLoopResult inner =
        run_inner_loop(net, inst, xstar, zstar, config, rng, config.max_total_steps - total);
    out.trace.records.back().inner_steps = inner.steps;
    total += inner.steps;
  }

  out.best_bound = best;
  out.initial_bound = out.trace.records.front().dual_bound;
  out.total_grad_steps = total;
  return out;
}

namespace detail {

inline std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Bit-stable trace schema: step,outer_iter,dual_bound,best_bound,gap,
/// inner_steps,pivots,seconds. Numbers use shortest round-trip formatting;
/// the gap field is empty when no optimum is known.
inline void write_trace_csv(const RunTrace& trace, std::ostream& os) {
  os << "step,outer_iter,dual_bound,best_bound,gap,inner_steps,pivots,seconds\n";
  for (const auto& r : trace.records) {
    os << r.total_grad_steps << ',' << r.outer_iter << ',' << detail::format_number(r.dual_bound) << ','
       << detail::format_number(r.best_bound) << ',' << (r.gap ? detail::format_number(*r.gap) : "")
       << ',' << r.inner_steps << ',' << r.pivots << ',' << detail::format_number(r.seconds) << '\n';
  }
}

}  // namespace ccp
