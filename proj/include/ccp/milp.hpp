#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ccp/errors.hpp"
#include "ccp/simplex.hpp"
#include "ccp/types.hpp"

namespace ccp {

/// Mixed-integer program in the canonical form
///   min c.x + h.z   s.t.   A x + G z >= b,  x, z >= 0,  x integer,
/// with A holding the k integer-variable columns and G the n-k continuous
/// ones. All other senses are translated into this form up front.
struct MilpInstance {
  std::string name;
  int k = 0;  // integer variables
  int n = 0;  // total variables
  int m = 0;  // constraint rows
  Matrix A;   // m x k
  Matrix G;   // m x (n - k)
  Vector b;   // m
  Vector c;   // k
  Vector h;   // n - k
  std::optional<double> known_optimum;

  int ncont() const { return n - k; }

  void validate() const {
    if (m < 1) throw ValidationError("m: must be at least 1");
    if (k < 0 || k > n) throw ValidationError("k: must satisfy 0 <= k <= n");
    if (A.rows() != m || A.cols() != k) throw ValidationError("A: expected " + std::to_string(m) + "x" + std::to_string(k));
    if (G.rows() != m || G.cols() != n - k)
      throw ValidationError("G: expected " + std::to_string(m) + "x" + std::to_string(n - k));
    if (b.size() != m) throw ValidationError("b: expected length " + std::to_string(m));
    if (c.size() != k) throw ValidationError("c: expected length " + std::to_string(k));
    if (h.size() != n - k) throw ValidationError("h: expected length " + std::to_string(n - k));
    if (!A.allFinite()) throw ValidationError("A: non-finite entry");
    if (!G.allFinite()) throw ValidationError("G: non-finite entry");
    if (!b.allFinite()) throw ValidationError("b: non-finite entry");
    if (!c.allFinite()) throw ValidationError("c: non-finite entry");
    if (!h.allFinite()) throw ValidationError("h: non-finite entry");
    if (known_optimum && !std::isfinite(*known_optimum))
      throw ValidationError("known_optimum: non-finite entry");
  }

  double objective(const Vector& x, const Vector& z) const { return c.dot(x) + h.dot(z); }

  /// The plain LP relaxation (integrality dropped) in solver form.
  LpProblem relaxation() const {
    LpProblem lp;
    lp.M.resize(m, n);
    lp.M << A, G;
    lp.q = b;
    lp.d.resize(n);
    lp.d << c, h;
    return lp;
  }
};

struct FeasiblePoint {
  IntVector x;
  Vector z;
};

struct FeasiblePointSet {
  std::vector<FeasiblePoint> points;
  int exhaustive_bound = 0;

  bool empty() const { return points.empty(); }

  /// Smallest objective among the enumerated points, if any.
  std::optional<double> best_objective(const MilpInstance& inst) const {
    std::optional<double> best;
    for (const auto& p : points) {
      const double val = inst.objective(p.x.cast<double>(), p.z);
      if (!best || val < *best) best = val;
    }
    return best;
  }
};

/// Brute-force oracle: every integer x in [0, bound]^k paired with a cost-
/// minimal feasible z (an LP solve per x when continuous variables exist).
/// The minimum objective over the result is the exact optimum restricted to
/// the box.
inline FeasiblePointSet enumerate_feasible(const MilpInstance& inst, int bound) {
  inst.validate();
  if (bound < 0) throw ValidationError("enumerate_feasible: bound must be nonnegative");
  if (std::pow(double(bound) + 1.0, double(inst.k)) > 1e7)
    throw BudgetError("enumerate_feasible: (bound+1)^k exceeds the 1e7 enumeration budget");

  FeasiblePointSet out;
  out.exhaustive_bound = bound;
  IntVector x = IntVector::Zero(inst.k);
  SimplexSolver solver;
  for (;;) {
    const Vector residual = inst.b - inst.A * x.cast<double>();
    if (inst.ncont() == 0) {
      if (residual.size() == 0 || residual.maxCoeff() <= 1e-9)
        out.points.push_back({x, Vector::Zero(0)});
    } else {
      LpProblem zlp{inst.G, residual, inst.h};
      const LpSolution sol = solver.solve(zlp);
      if (sol.status == LpStatus::unbounded)
        throw NumericalError("enumerate_feasible: continuous subproblem unbounded, so the instance is unbounded");
      if (sol.status == LpStatus::optimal) out.points.push_back({x, sol.primal});
    }
    // odometer step
    int pos = 0;
    while (pos < inst.k && x(pos) == bound) x(pos++) = 0;
    if (pos == inst.k) break;
    ++x(pos);
  }
  return out;
}

/// Test tooling: one point per line, x entries then z entries, comma-separated.
inline void write_points_csv(const FeasiblePointSet& set, std::ostream& os) {
  for (const auto& p : set.points) {
    for (int i = 0; i < p.x.size(); ++i) {
      if (i) os << ',';
      os << p.x(i);
    }
    for (int i = 0; i < p.z.size(); ++i) {
      if (p.x.size() || i) os << ',';
      os << p.z(i);
    }
    os << '\n';
  }
}

/// Relative optimality gap (optimum - dual_bound) / |optimum|. Guards the
/// division: a zero optimum with a differing bound is an error; use
/// gap_for_report where a value is always needed.
inline double optimality_gap(double dual_bound, double optimum) {
  if (std::abs(optimum) < 1e-12) {
    if (dual_bound == optimum) return 0.0;
    throw NumericalError("optimality_gap: optimum is zero, relative gap undefined");
  }
  return (optimum - dual_bound) / std::abs(optimum);
}

struct GapValue {
  double value = 0.0;
  bool absolute = false;  // true when |optimum| ~ 0 forced an absolute difference
};

inline GapValue gap_for_report(double dual_bound, double optimum) {
  if (std::abs(optimum) < 1e-12) return {optimum - dual_bound, true};
  return {(optimum - dual_bound) / std::abs(optimum), false};
}

}  // namespace ccp
