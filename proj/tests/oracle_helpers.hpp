#pragma once

// Test-only oracles, kept independent of the library code paths they check:
// hand-built instances, brute-force property checks, central finite
// differences, and a textbook tableau route to the Gomory mixed-integer cut.

#include <cmath>
#include <vector>

#include "ccp/ccp.hpp"

namespace oracle {

using namespace ccp;

/// Exact elementwise equality (empty matrices compare equal).
template <typename A, typename B>
bool bit_equal(const A& a, const B& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return (a.array() == b.array()).all();
}

/// min -x1 - x2  s.t.  -2 x1 - 2 x2 >= -3,  x >= 0 integer.
/// LP bound -1.5 at (1.5, 0) or (0, 1.5); integer optimum -1.
inline MilpInstance worked_instance() {
  MilpInstance inst;
  inst.name = "worked";
  inst.k = 2;
  inst.n = 2;
  inst.m = 1;
  inst.A.resize(1, 2);
  inst.A << -2.0, -2.0;
  inst.G = Matrix::Zero(1, 0);
  inst.b = Vector::Constant(1, -3.0);
  inst.c = Vector::Constant(2, -1.0);
  inst.h = Vector::Zero(0);
  inst.validate();
  return inst;
}

/// Random LP that is feasible and bounded by construction: the right-hand
/// side is backed off from a sampled nonnegative point and costs are >= 0.
inline LpProblem random_feasible_lp(Rng& rng, int rows, int cols) {
  LpProblem lp;
  lp.M.resize(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) lp.M(i, j) = double(rng.uniform_int(-5, 5));
  Vector u0(cols);
  for (int j = 0; j < cols; ++j) u0(j) = rng.uniform(0.0, 2.0);
  lp.q = lp.M * u0;
  for (int i = 0; i < rows; ++i) lp.q(i) -= rng.uniform(0.0, 3.0);
  lp.d.resize(cols);
  for (int j = 0; j < cols; ++j) lp.d(j) = double(rng.uniform_int(0, 9));
  return lp;
}

inline GmiLayer random_layer(Rng& rng, int indim, int width, double scale = 10.0) {
  GmiLayer layer;
  layer.W.resize(width, indim);
  for (int i = 0; i < width; ++i)
    for (int j = 0; j < indim; ++j) layer.W(i, j) = rng.uniform(-scale, scale);
  layer.v.resize(width);
  for (int i = 0; i < width; ++i) layer.v(i) = rng.uniform(-scale, scale);
  return layer;
}

inline SubadditiveNet random_net(Rng& rng, int m, int max_layers = 2, int max_width = 4,
                                 double scale = 3.0) {
  SubadditiveNet net;
  net.input_dim = m;
  const int layers = int(rng.uniform_int(1, max_layers));
  int indim = m;
  for (int k = 0; k < layers; ++k) {
    const int width = int(rng.uniform_int(1, max_width));
    net.layers.push_back(random_layer(rng, indim, width, scale));
    indim += width;
  }
  net.validate();
  return net;
}

/// Small feasible instances covering all three generator families,
/// k <= 6 and m <= 6 throughout.
inline MilpInstance random_tiny_instance(Rng& rng) {
  const auto seed = std::uint64_t(rng.uniform_int(0, 1000000000));
  switch (rng.uniform_int(0, 2)) {
    case 0:
      return generate_set_cover(int(rng.uniform_int(2, 5)), int(rng.uniform_int(3, 6)),
                                rng.uniform(0.4, 0.7), seed);
    case 1:
      return generate_max_indep_set(3, rng.uniform(0.5, 1.0), seed);
    default:
      return generate_random_mixed(int(rng.uniform_int(2, 5)), int(rng.uniform_int(2, 4)),
                                   int(rng.uniform_int(1, 2)), seed);
  }
}

/// Central finite differences of the cut-off loss over every parameter.
inline GradientSet finite_difference_gradients(const SubadditiveNet& net, const MilpInstance& inst,
                                               const Vector& xbar, const Vector& zbar,
                                               double step = 1e-6) {
  GradientSet fd;
  fd.layers.resize(net.layers.size());
  auto loss_at = [&](const SubadditiveNet& n) { return cutoff_loss(n, inst, xbar, zbar).loss; };
  for (size_t k = 0; k < net.layers.size(); ++k) {
    const GmiLayer& layer = net.layers[k];
    fd.layers[k].dW.resize(layer.width(), layer.indim());
    fd.layers[k].dv.resize(layer.width());
    for (int i = 0; i < layer.width(); ++i) {
      for (int j = 0; j < layer.indim(); ++j) {
        SubadditiveNet up = net, down = net;
        up.layers[k].W(i, j) += step;
        down.layers[k].W(i, j) -= step;
        fd.layers[k].dW(i, j) = (loss_at(up) - loss_at(down)) / (2.0 * step);
      }
      SubadditiveNet up = net, down = net;
      up.layers[k].v(i) += step;
      down.layers[k].v(i) -= step;
      fd.layers[k].dv(i) = (loss_at(up) - loss_at(down)) / (2.0 * step);
    }
  }
  return fd;
}

/// Largest elementwise error |a - b| / max(1, |a|, |b|) across all parameters.
inline double max_param_error(const GradientSet& a, const GradientSet& b) {
  double worst = 0.0;
  for (size_t k = 0; k < a.layers.size(); ++k) {
    for (int i = 0; i < a.layers[k].dW.rows(); ++i)
      for (int j = 0; j < a.layers[k].dW.cols(); ++j) {
        const double x = a.layers[k].dW(i, j), y = b.layers[k].dW(i, j);
        worst = std::max(worst, std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)}));
      }
    for (int i = 0; i < a.layers[k].dv.size(); ++i) {
      const double x = a.layers[k].dv(i), y = b.layers[k].dv(i);
      worst = std::max(worst, std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)}));
    }
  }
  return worst;
}

/// True when any recorded min/max sits within `margin` of a tie or any
/// fractional part within `margin` of an integer, i.e. when central
/// differences may straddle a kink. Exact zero weights are exempt from the
/// coefficient-branch tie: their kink is symmetric and two-sided differences
/// agree with the chosen subgradient.
inline bool probe_is_degenerate(const SubadditiveNet& net, const ForwardCache& cache, double margin = 1e-4) {
  for (size_t k = 0; k < net.layers.size(); ++k) {
    const GmiLayer& layer = net.layers[k];
    const LayerStatic& s = cache.layer_static[k];
    for (int i = 0; i < layer.width(); ++i) {
      const double rawf = frac(layer.v(i));
      if (std::min(rawf, 1.0 - rawf) < std::max(margin, 2.0 * kFracClampEps)) return true;
      for (int j = 0; j < layer.indim(); ++j) {
        const double w = layer.W(i, j);
        if (w == 0.0) continue;
        if (std::abs(-w / s.fv(i) - w / (1.0 - s.fv(i))) < margin) return true;
      }
    }
  }
  auto check_phi_chain = [&](const ChainTrace& tr) {
    for (size_t k = 0; k < tr.u.size(); ++k) {
      const LayerStatic& s = cache.layer_static[k];
      const Matrix& U = tr.u[k];
      for (int j = 0; j < U.cols(); ++j)
        for (int i = 0; i < U.rows(); ++i) {
          const double fu = frac(U(i, j));
          if (std::min(fu, 1.0 - fu) < margin) return true;
          if (std::abs(fu / s.fv(i) - (1.0 - fu) / (1.0 - s.fv(i))) < margin) return true;
        }
      if (!tr.raw.empty() && tr.raw[k].size() > 0 && (tr.raw[k].array() < -1.0 + 1e-3).any()) return true;
    }
    return false;
  };
  auto check_uddz_chain = [&](const ChainTrace& tr) {
    for (size_t k = 0; k < tr.u.size(); ++k) {
      const LayerStatic& s = cache.layer_static[k];
      const Matrix& U = tr.u[k];
      for (int j = 0; j < U.cols(); ++j)
        for (int i = 0; i < U.rows(); ++i) {
          const double u = U(i, j);
          if (std::abs(u / s.fv(i) + u / (1.0 - s.fv(i))) < margin) return true;
        }
    }
    return false;
  };
  return check_phi_chain(cache.ab) || check_uddz_chain(cache.g);
}

/// Textbook tableau route to the classical cut, fully independent of the
/// layer evaluation: write the cut over the nonbasic variables of the
/// equality form (in the >= 1 normalization), then substitute the slacks
/// r = M u - q back out. Returns one (coefficients, rhs) pair per fractional
/// integer-basic row.
struct TableauCut {
  int basis_row;
  Vector coef;  // length n, over the structural variables
  double rhs;
};

inline std::vector<TableauCut> tableau_gmi_cuts(const MilpInstance& inst, const LpSolution& sol,
                                                double frac_tol = 1e-6) {
  const LpProblem lp = inst.relaxation();
  const int rows = lp.rows(), cols = lp.cols();
  std::vector<bool> basic(cols + rows, false);
  for (int j : sol.basis) basic[j] = true;

  std::vector<TableauCut> cuts;
  for (int pos = 0; pos < rows; ++pos) {
    const int bj = sol.basis[pos];
    if (bj >= inst.k) continue;  // only integer-variable rows generate cuts
    const double beta = sol.primal(bj);
    const double f0 = frac(beta);
    if (f0 < frac_tol || f0 > 1.0 - frac_tol) continue;

    Vector coef = Vector::Zero(cols);
    double rhs = 1.0;
    for (int j = 0; j < cols + rows; ++j) {
      if (basic[j]) continue;
      // tableau entry of nonbasic column j in this row
      double alpha;
      if (j < cols)
        alpha = sol.basis_inverse.row(pos).dot(lp.M.col(j));
      else
        alpha = -sol.basis_inverse(pos, j - cols);
      double g;
      if (j < inst.k) {
        const double f = frac(alpha);
        g = (f <= f0) ? f / f0 : (1.0 - f) / (1.0 - f0);
      } else {
        g = (alpha > 0.0) ? alpha / f0 : -alpha / (1.0 - f0);
      }
      if (j < cols) {
        coef(j) += g;
      } else {
        // slack r_i = (M u)_i - q_i
        coef += g * lp.M.row(j - cols).transpose();
        rhs += g * lp.q(j - cols);
      }
    }
    cuts.push_back({pos, coef, rhs});
  }
  return cuts;
}

}  // namespace oracle
