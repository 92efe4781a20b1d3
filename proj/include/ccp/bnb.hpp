#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <vector>

#include "ccp/errors.hpp"
#include "ccp/milp.hpp"
#include "ccp/simplex.hpp"

namespace ccp {

enum class BnbStatus { optimal, infeasible, node_limit };

struct BnbResult {
  BnbStatus status = BnbStatus::infeasible;
  double optimum = std::numeric_limits<double>::infinity();      // incumbent objective
  double lower_bound = -std::numeric_limits<double>::infinity(); // valid global dual bound
  std::optional<FeasiblePoint> incumbent;
  long nodes = 0;  // LP relaxations solved
  std::vector<std::pair<double, double>> bound_log;  // (lower bound, incumbent) per node
};

namespace detail {

struct BnbNode {
  double bound;
  long seq;
  // Branching decisions: (variable, value, is_lower). is_lower means
  // x_j >= value, otherwise x_j <= value; both become single >= rows.
  std::vector<std::tuple<int, double, bool>> branches;
};

struct BnbNodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.seq > b.seq;                              // FIFO among ties
  }
};

inline LpProblem node_lp(const MilpInstance& inst, const std::vector<std::tuple<int, double, bool>>& branches) {
  const int extra = int(branches.size());
  LpProblem lp;
  lp.M = Matrix::Zero(inst.m + extra, inst.n);
  lp.M.topLeftCorner(inst.m, inst.k) = inst.A;
  if (inst.ncont() > 0) lp.M.topRightCorner(inst.m, inst.ncont()) = inst.G;
  lp.q.resize(inst.m + extra);
  lp.q.head(inst.m) = inst.b;
  for (int e = 0; e < extra; ++e) {
    const auto& [j, value, is_lower] = branches[e];
    lp.M(inst.m + e, j) = is_lower ? 1.0 : -1.0;
    lp.q(inst.m + e) = is_lower ? value : -value;
  }
  lp.d.resize(inst.n);
  lp.d << inst.c, inst.h;
  return lp;
}

}  // namespace detail

/// Best-bound branch and bound over the dense simplex, branching on the
/// integer variable whose fractional part is closest to one half. Children
/// append the bound rows x_j >= ceil and -x_j >= -floor. Intended as a
/// desk-scale exact oracle, not a performant solver.
inline BnbResult branch_and_bound(const MilpInstance& inst, long node_limit = 100000,
                                  std::ostream* node_log = nullptr) {
  inst.validate();
  constexpr double int_tol = 1e-6;

  BnbResult res;
  SimplexSolver solver;
  std::priority_queue<detail::BnbNode, std::vector<detail::BnbNode>, detail::BnbNodeOrder> open;
  open.push({-std::numeric_limits<double>::infinity(), 0, {}});
  long seq = 1;
  double incumbent_value = std::numeric_limits<double>::infinity();

  while (!open.empty()) {
    detail::BnbNode node = open.top();
    open.pop();
    // Best-bound order makes the popped bound the smallest over the open
    // nodes, so min(it, incumbent) is a valid, nondecreasing global bound.
    res.lower_bound = std::max(res.lower_bound, std::min(node.bound, incumbent_value));
    if (node.bound >= incumbent_value - 1e-9) continue;  // cannot improve
    if (res.nodes >= node_limit) {
      res.status = BnbStatus::node_limit;
      res.optimum = incumbent_value;
      return res;
    }

    const LpSolution sol = solver.solve(detail::node_lp(inst, node.branches));
    ++res.nodes;
    if (sol.status == LpStatus::unbounded)
      throw NumericalError("branch_and_bound: node relaxation unbounded");
    if (sol.status == LpStatus::infeasible) {
      res.bound_log.push_back({res.lower_bound, incumbent_value});
      continue;
    }
    if (node.branches.empty())
      res.lower_bound = std::max(res.lower_bound, std::min(sol.objective, incumbent_value));
    if (sol.objective >= incumbent_value - 1e-9) {
      res.bound_log.push_back({res.lower_bound, incumbent_value});
      continue;
    }

    // Pick the most fractional integer variable.
    int branch_var = -1;
    double best_dist = 1.0;
    for (int j = 0; j < inst.k; ++j) {
      const double f = frac(sol.primal(j));
      if (f < int_tol || f > 1.0 - int_tol) continue;
      const double dist = std::abs(f - 0.5);
      if (branch_var < 0 || dist < best_dist) {
        best_dist = dist;
        branch_var = j;
      }
    }

    if (branch_var < 0) {
      // Integral within tolerance. Round, then certify feasibility exactly
      // (re-solving the continuous part when there is one).
      IntVector xr(inst.k);
      for (int j = 0; j < inst.k; ++j) xr(j) = int(std::llround(sol.primal(j)));
      bool accepted = false;
      double value = 0.0;
      Vector z = Vector::Zero(inst.ncont());
      if (xr.size() == 0 || xr.minCoeff() >= 0) {
        if (inst.ncont() == 0) {
          const Vector residual = inst.b - inst.A * xr.cast<double>();
          if (residual.maxCoeff() <= 1e-9) {
            accepted = true;
            value = inst.c.dot(xr.cast<double>());
          }
        } else {
          LpProblem zlp{inst.G, inst.b - inst.A * xr.cast<double>(), inst.h};
          const LpSolution zsol = solver.solve(zlp);
          if (zsol.status == LpStatus::optimal) {
            accepted = true;
            z = zsol.primal;
            value = inst.c.dot(xr.cast<double>()) + inst.h.dot(z);
          }
        }
      }
      if (accepted) {
        if (value < incumbent_value) {
          incumbent_value = value;
          res.incumbent = FeasiblePoint{xr, z};
        }
      } else {
        // Rounding broke feasibility; split on the variable farthest from an
        // integer so the children separate the point.
        double best = -1.0;
        for (int j = 0; j < inst.k; ++j) {
          const double f = frac(sol.primal(j));
          const double d = std::min(f, 1.0 - f);
          if (d > best) {
            best = d;
            branch_var = j;
          }
        }
      }
    }

    if (branch_var >= 0) {
      const double xj = sol.primal(branch_var);
      const double lo = std::floor(xj);
      const double hi = (std::ceil(xj) > lo) ? std::ceil(xj) : lo + 1.0;
      auto down = node.branches;
      down.push_back({branch_var, lo, false});
      auto up = node.branches;
      up.push_back({branch_var, hi, true});
      open.push({sol.objective, seq++, std::move(down)});
      open.push({sol.objective, seq++, std::move(up)});
    }

    res.bound_log.push_back({res.lower_bound, incumbent_value});
    if (node_log)
      (*node_log) << "node " << res.nodes << " bound " << res.lower_bound << " incumbent "
                  << incumbent_value << "\n";
  }

  if (res.incumbent) {
    res.status = BnbStatus::optimal;
    res.optimum = incumbent_value;
    res.lower_bound = incumbent_value;
  } else {
    res.status = BnbStatus::infeasible;
  }
  return res;
}

}  // namespace ccp
