#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "ccp/errors.hpp"
#include "ccp/types.hpp"

namespace ccp {

/// Linear program in the fixed form
///   min d.u   s.t.   M u >= q,  u >= 0.
/// Minimization only; >= rows only. Callers translate other senses.
struct LpProblem {
  Matrix M;  // rows x cols
  Vector q;  // rows
  Vector d;  // cols

  int rows() const { return int(M.rows()); }
  int cols() const { return int(M.cols()); }

  void validate() const {
    if (rows() < 1 || cols() < 1) throw ValidationError("LpProblem: needs at least one row and one column");
    if (q.size() != rows()) throw ValidationError("LpProblem: q length does not match row count");
    if (d.size() != cols()) throw ValidationError("LpProblem: d length does not match column count");
    if (!M.allFinite() || !q.allFinite() || !d.allFinite())
      throw ValidationError("LpProblem: non-finite entry");
  }
};

/// Ordered basic column indices into the equality-form matrix [M, -I].
/// Index j < cols is structural u_j; index cols + i is the slack of row i.
using Basis = std::vector<int>;

enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    default: return "unbounded";
  }
}

struct LpSolution {
  LpStatus status = LpStatus::optimal;
  double objective = 0.0;
  Vector primal;         // structural values, length cols
  Vector duals;          // row multipliers, length rows; >= 0 at optimality
  Basis basis;           // length rows
  Matrix basis_inverse;  // rows x rows
  int pivots = 0;        // simplex iterations spent over both phases
};

struct SimplexConfig {
  double feas_tol = 1e-7;
  double opt_tol = 1e-7;
  double pivot_tol = 1e-9;
  int refactor_every = 100;
  int bland_after = 50;  // consecutive degenerate pivots before Bland's rule
  long max_pivots = 0;   // 0 = scale with problem size
};

/// Dense revised primal simplex with an explicitly maintained basis inverse.
/// Phase 1 uses per-row artificials; pricing is Dantzig with a Bland fallback
/// once degeneracy persists. A solver instance is stateful during solve();
/// use separate instances for concurrent solves.
class SimplexSolver {
 public:
  explicit SimplexSolver(SimplexConfig cfg = {}) : cfg_(cfg) {}

  LpSolution solve(const LpProblem& lp) { return solve_impl(lp, nullptr); }
  LpSolution solve(const LpProblem& lp, const Basis& warm) { return solve_impl(lp, &warm); }

 private:
  SimplexConfig cfg_;

  const LpProblem* lp_ = nullptr;
  int r_ = 0, c_ = 0, nt_ = 0;  // rows, structural cols, nt_ = c_ + r_
  Vector art_sign_;             // +-1 orientation of phase-1 artificials
  std::vector<int> basis_;
  std::vector<char> in_basis_;  // size nt_ + r_
  Matrix binv_;
  Vector xb_;
  int phase_ = 2;
  long pivots_ = 0;
  long max_pivots_ = 0;
  int degen_run_ = 0;
  int since_refactor_ = 0;

  double q_scale() const { return 1.0 + lp_->q.cwiseAbs().maxCoeff(); }

  Vector column(int j) const {
    if (j < c_) return lp_->M.col(j);
    Vector e = Vector::Zero(r_);
    if (j < nt_)
      e(j - c_) = -1.0;
    else
      e(j - nt_) = art_sign_(j - nt_);
    return e;
  }

  // binv_ * column(j), exploiting unit columns for slacks and artificials.
  Vector ftran(int j) const {
    if (j < c_) return binv_ * lp_->M.col(j);
    if (j < nt_) return -binv_.col(j - c_);
    return art_sign_(j - nt_) * binv_.col(j - nt_);
  }

  double cost_of(int j) const {
    if (phase_ == 1) return j >= nt_ ? 1.0 : 0.0;
    return j < c_ ? lp_->d(j) : 0.0;
  }

  Vector dual_values() const {
    Vector cb(r_);
    for (int i = 0; i < r_; ++i) cb(i) = cost_of(basis_[i]);
    return binv_.transpose() * cb;
  }

  // Entering column, or -1 when the current phase is optimal. Artificials
  // never re-enter.
  int price(const Vector& y, bool bland) const {
    const Vector rc_struct = [&] {
      Vector rc = lp_->M.transpose() * y;
      for (int j = 0; j < c_; ++j) rc(j) = cost_of(j) - rc(j);
      return rc;
    }();
    int pick = -1;
    double best = -cfg_.opt_tol;
    auto consider = [&](int j, double rc) {
      if (in_basis_[j] || rc >= -cfg_.opt_tol) return false;
      if (bland) {
        if (pick < 0) pick = j;
        return pick == j;
      }
      if (rc < best) {
        best = rc;
        pick = j;
      }
      return false;
    };
    for (int j = 0; j < c_; ++j)
      if (consider(j, rc_struct(j)) && bland) return pick;
    for (int i = 0; i < r_; ++i)
      if (consider(c_ + i, y(i)) && bland) return pick;  // slack reduced cost is y_i
    return pick;
  }

  // Standard primal ratio test. Ties prefer expelling artificials, then the
  // smallest basic variable index (keeps Bland's rule sound).
  int ratio_test(const Vector& w) const {
    double best_t = std::numeric_limits<double>::infinity();
    for (int i = 0; i < r_; ++i) {
      if (w(i) <= cfg_.pivot_tol) continue;
      const double t = std::max(xb_(i), 0.0) / w(i);
      if (t < best_t) best_t = t;
    }
    if (!std::isfinite(best_t)) return -1;
    int leave = -1;
    const double tie = best_t + 1e-9 * (1.0 + best_t);
    for (int i = 0; i < r_; ++i) {
      if (w(i) <= cfg_.pivot_tol) continue;
      const double t = std::max(xb_(i), 0.0) / w(i);
      if (t > tie) continue;
      if (leave < 0) {
        leave = i;
        continue;
      }
      const bool cand_art = basis_[i] >= nt_, cur_art = basis_[leave] >= nt_;
      if (cand_art != cur_art) {
        if (cand_art) leave = i;
      } else if (basis_[i] < basis_[leave]) {
        leave = i;
      }
    }
    return leave;
  }

  void apply_pivot(int enter, int leave_pos, const Vector& w) {
    double xl = xb_(leave_pos);
    if (std::abs(xl) <= cfg_.feas_tol * q_scale()) xl = 0.0;
    const double t = std::max(xl, 0.0) / w(leave_pos);
    xb_ -= t * w;
    xb_(leave_pos) = t;

    // Product-form update: row operations that map w onto the unit vector.
    const Eigen::RowVectorXd pivot_row = binv_.row(leave_pos) / w(leave_pos);
    for (int i = 0; i < r_; ++i) {
      if (i == leave_pos) continue;
      if (w(i) != 0.0) binv_.row(i) -= w(i) * pivot_row;
    }
    binv_.row(leave_pos) = pivot_row;

    in_basis_[basis_[leave_pos]] = 0;
    in_basis_[enter] = 1;
    basis_[leave_pos] = enter;
    ++pivots_;
    ++since_refactor_;
    degen_run_ = (t <= 1e-9) ? degen_run_ + 1 : 0;
  }

  // Rebuilds binv_ and xb_ from scratch. Returns false on a singular basis.
  bool refactor() {
    Matrix B(r_, r_);
    for (int i = 0; i < r_; ++i) B.col(i) = column(basis_[i]);
    Eigen::PartialPivLU<Matrix> lu(B);
    Matrix inv = lu.inverse();
    if (!inv.allFinite()) return false;
    const double resid = (inv * B - Matrix::Identity(r_, r_)).cwiseAbs().maxCoeff();
    if (resid > 1e-8 * (1.0 + B.cwiseAbs().maxCoeff())) return false;
    binv_ = std::move(inv);
    xb_ = binv_ * lp_->q;
    since_refactor_ = 0;
    return true;
  }

  void run_phase() {
    for (;;) {
      if (pivots_ > max_pivots_)
        throw IterationLimitError("simplex: pivot limit exceeded (" + std::to_string(max_pivots_) + ")");
      const Vector y = dual_values();
      const int enter = price(y, degen_run_ >= cfg_.bland_after);
      if (enter < 0) return;
      const Vector w = ftran(enter);
      const int leave = ratio_test(w);
      if (leave < 0) {
        if (phase_ == 1) throw NumericalError("simplex: phase 1 objective unbounded, inconsistent state");
        throw_unbounded_ = true;
        return;
      }
      apply_pivot(enter, leave, w);
      if (since_refactor_ >= cfg_.refactor_every && !refactor())
        throw NumericalError("simplex: basis refactorization failed");
    }
  }

  bool throw_unbounded_ = false;

  // Pivots every artificial out of the basis. Always possible because the
  // slack block -I gives [M, -I] full row rank.
  void expel_artificials() {
    for (int pos = 0; pos < r_; ++pos) {
      if (basis_[pos] < nt_) continue;
      int enter = -1;
      for (int i = 0; i < r_ && enter < 0; ++i)
        if (!in_basis_[c_ + i] && std::abs(binv_(pos, i)) > cfg_.pivot_tol) enter = c_ + i;
      for (int j = 0; j < c_ && enter < 0; ++j)
        if (!in_basis_[j] && std::abs(binv_.row(pos).dot(lp_->M.col(j))) > cfg_.pivot_tol) enter = j;
      if (enter < 0) throw NumericalError("simplex: could not expel artificial from basis");
      if (std::abs(xb_(pos)) <= cfg_.feas_tol * q_scale()) xb_(pos) = 0.0;
      apply_pivot(enter, pos, ftran(enter));
      if (since_refactor_ >= cfg_.refactor_every && !refactor())
        throw NumericalError("simplex: basis refactorization failed");
    }
  }

  void setup_phase1() {
    art_sign_.resize(r_);
    for (int i = 0; i < r_; ++i) art_sign_(i) = lp_->q(i) >= 0.0 ? 1.0 : -1.0;
    basis_.resize(r_);
    std::fill(in_basis_.begin(), in_basis_.end(), 0);
    binv_ = Matrix::Zero(r_, r_);
    for (int i = 0; i < r_; ++i) {
      basis_[i] = nt_ + i;
      in_basis_[nt_ + i] = 1;
      binv_(i, i) = art_sign_(i);
    }
    xb_ = lp_->q.cwiseAbs();
    phase_ = 1;
    degen_run_ = 0;
    since_refactor_ = 0;
  }

  double phase1_objective() const {
    double obj = 0.0;
    for (int i = 0; i < r_; ++i)
      if (basis_[i] >= nt_) obj += xb_(i);
    return obj;
  }

  // Greedy repair of a stale basis: keep a maximal independent subset of the
  // proposed columns, complete with slacks.
  void repair_basis(const Basis& warm) {
    std::vector<int> kept;
    Matrix Q(r_, 0);
    auto try_add = [&](int j) {
      Vector v = column(j);
      Vector res = v - Q * (Q.transpose() * v);
      res -= Q * (Q.transpose() * res);  // second pass for orthogonality
      const double nrm = res.norm();
      if (nrm <= 1e-9 * (1.0 + v.norm())) return false;
      Q.conservativeResize(r_, Q.cols() + 1);
      Q.col(Q.cols() - 1) = res / nrm;
      kept.push_back(j);
      return true;
    };
    for (int j : warm) {
      if (int(kept.size()) == r_) break;
      try_add(j);
    }
    for (int i = 0; i < r_ && int(kept.size()) < r_; ++i) {
      if (std::find(kept.begin(), kept.end(), c_ + i) != kept.end()) continue;
      try_add(c_ + i);
    }
    if (int(kept.size()) != r_) throw NumericalError("simplex: basis repair failed");
    basis_ = kept;
    std::fill(in_basis_.begin(), in_basis_.end(), 0);
    for (int j : basis_) in_basis_[j] = 1;
  }

  LpSolution finish_optimal() {
    // Clean factorization so the returned inverse matches the basis tightly,
    // then re-verify optimality; resume pivoting if the refresh exposed a
    // negative reduced cost.
    for (int round = 0; round < 4; ++round) {
      if (!refactor()) throw NumericalError("simplex: final refactorization failed");
      const Vector y = dual_values();
      if (price(y, false) < 0) break;
      if (round == 3) throw NumericalError("simplex: optimality could not be certified");
      run_phase();
      if (throw_unbounded_) break;
    }
    LpSolution sol;
    if (throw_unbounded_) {
      sol.status = LpStatus::unbounded;
      sol.objective = -std::numeric_limits<double>::infinity();
      sol.pivots = int(pivots_);
      return sol;
    }
    sol.status = LpStatus::optimal;
    sol.primal = Vector::Zero(c_);
    for (int i = 0; i < r_; ++i)
      if (basis_[i] < c_) sol.primal(basis_[i]) = xb_(i);
    sol.objective = lp_->d.dot(sol.primal);
    sol.duals = dual_values();
    sol.basis = basis_;
    sol.basis_inverse = binv_;
    sol.pivots = int(pivots_);
    return sol;
  }

  LpSolution solve_impl(const LpProblem& lp, const Basis* warm) {
    lp.validate();
    lp_ = &lp;
    r_ = lp.rows();
    c_ = lp.cols();
    nt_ = c_ + r_;
    art_sign_ = Vector::Ones(r_);
    in_basis_.assign(nt_ + r_, 0);
    pivots_ = 0;
    degen_run_ = 0;
    throw_unbounded_ = false;
    max_pivots_ = cfg_.max_pivots > 0 ? cfg_.max_pivots : 10000 + 200L * (r_ + c_);

    bool warm_ok = false;
    if (warm) {
      if (int(warm->size()) != r_)
        throw ValidationError("simplex: warm basis cardinality does not match row count");
      for (int j : *warm)
        if (j < 0 || j >= nt_) throw ValidationError("simplex: warm basis index out of range");
      basis_ = *warm;
      std::fill(in_basis_.begin(), in_basis_.end(), 0);
      bool duplicates = false;
      for (int j : basis_) {
        if (in_basis_[j]) duplicates = true;
        in_basis_[j] = 1;
      }
      phase_ = 2;
      if (duplicates || !refactor()) {
        repair_basis(*warm);
        if (!refactor()) throw NumericalError("simplex: warm basis unusable after repair");
      }
      // Primal-feasible warm basis: go straight to phase 2. Otherwise fall
      // back to a cold solve.
      warm_ok = xb_.minCoeff() >= -cfg_.feas_tol * q_scale();
    }

    if (!warm_ok) {
      setup_phase1();
      run_phase();
      if (phase1_objective() > cfg_.feas_tol * q_scale()) {
        LpSolution sol;
        sol.status = LpStatus::infeasible;
        sol.objective = std::numeric_limits<double>::infinity();
        sol.pivots = int(pivots_);
        return sol;
      }
      expel_artificials();
    }

    phase_ = 2;
    degen_run_ = 0;
    run_phase();
    return finish_optimal();
  }
};

/// Debug dump of the simplex tableau at a solution: basic variables, their
/// values, and the transformed rows B^-1 [M, -I]. Test diagnosis only.
inline void dump_tableau(const LpProblem& lp, const LpSolution& sol, std::ostream& os) {
  if (sol.status != LpStatus::optimal) {
    os << "status " << to_string(sol.status) << "\n";
    return;
  }
  const int rows = lp.rows(), cols = lp.cols();
  const Matrix T = sol.basis_inverse * lp.M;
  const Vector beta = sol.basis_inverse * lp.q;
  os << "objective " << sol.objective << "\n";
  for (int i = 0; i < rows; ++i) {
    const int j = sol.basis[i];
    os << (j < cols ? "u" : "r") << (j < cols ? j : j - cols) << " = " << beta(i) << " |";
    for (int jj = 0; jj < cols; ++jj) os << ' ' << T(i, jj);
    os << " |";
    for (int ii = 0; ii < rows; ++ii) os << ' ' << -sol.basis_inverse(i, ii);
    os << "\n";
  }
}

/// One row of the optimal basis inverse together with its basic value, the
/// raw material of a Gomory mixed-integer round.
struct FractionalRow {
  int row;    // position in the basis
  Vector w;   // corresponding row of the basis inverse
  double v;   // basic value (B^-1 q at that position)
};

/// Rows whose basic variable is one of the first `num_integer` structural
/// variables and whose value has fractional part in [frac_tol, 1 - frac_tol].
/// Rows with near-integral values are the inert "dummy inequality" cases and
/// are excluded.
inline std::vector<FractionalRow> extract_fractional_rows(const LpSolution& sol, int num_integer,
                                                          double frac_tol) {
  if (sol.status != LpStatus::optimal)
    throw ValidationError("extract_fractional_rows: solution is not optimal");
  std::vector<FractionalRow> out;
  for (int i = 0; i < int(sol.basis.size()); ++i) {
    const int j = sol.basis[i];
    if (j >= num_integer) continue;
    const double value = sol.primal(j);
    const double f = frac(value);
    if (f < frac_tol || f > 1.0 - frac_tol) continue;
    out.push_back({i, sol.basis_inverse.row(i).transpose(), value});
  }
  return out;
}

}  // namespace ccp
