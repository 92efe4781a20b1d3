#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "ccp/cutopt.hpp"
#include "ccp/milp.hpp"
#include "ccp/net.hpp"
#include "ccp/simplex.hpp"

namespace ccp {

struct WarmStartResult {
  SubadditiveNet net;
  std::vector<double> round_bounds;  // enlarged-LP bound after each round
  double lp_bound = 0.0;             // plain relaxation bound
};

/// Classical warm start: run the usual Gomory mixed-integer separation for
/// one round per requested width, each round reading (B^-1, B^-1 q) off the
/// optimal basis of the current enlarged LP. When a round yields more
/// candidate rows than its width, the most violated cuts (violation scaled by
/// the cut row norm) are kept; missing rows are padded with inert zero rows
/// so every layer keeps its requested width.
inline WarmStartResult gmi_warm_start(const MilpInstance& inst, const std::vector<int>& widths,
                                      LayerVariant variant = LayerVariant::gmi, double frac_tol = 1e-6) {
  inst.validate();
  if (widths.empty()) throw ValidationError("gmi_warm_start: widths must be nonempty");
  for (int w : widths)
    if (w < 1) throw ValidationError("gmi_warm_start: widths must be >= 1");

  WarmStartResult out;
  out.net.input_dim = inst.m;
  SimplexSolver solver;

  for (size_t round = 0; round < widths.size(); ++round) {
    const NetForward fwd = net_forward(out.net, inst.A, inst.G, inst.b);
    const LpProblem lp = build_enlarged_lp(fwd, inst);
    const LpSolution sol = solver.solve(lp);
    if (sol.status != LpStatus::optimal)
      throw NumericalError(std::string("gmi_warm_start: enlarged LP ") + to_string(sol.status));
    if (round == 0) out.lp_bound = sol.objective;

    const int width = widths[round];
    const int indim = lp.rows();
    const std::vector<FractionalRow> rows = extract_fractional_rows(sol, inst.k, frac_tol);

    GmiLayer layer = GmiLayer::dummy(width, indim, variant);
    if (!rows.empty()) {
      // Evaluate every candidate cut against the current system and rank by
      // normalized violation at the LP optimum.
      GmiLayer cands{Matrix(int(rows.size()), indim), Vector(int(rows.size())), LayerVariant::gmi};
      for (size_t i = 0; i < rows.size(); ++i) {
        cands.W.row(int(i)) = rows[i].w.transpose();
        cands.v(int(i)) = rows[i].v;
      }
      const Matrix coefA = layer_phi(cands, fwd.FA);
      const Matrix coefG = inst.ncont() > 0 ? layer_phi_bar(cands, fwd.FG) : Matrix(int(rows.size()), 0);
      const Vector rhs = layer_phi(cands, fwd.fb);
      const Vector xstar = sol.primal.head(inst.k);
      const Vector zstar = sol.primal.tail(inst.ncont());
      Vector score(int(rows.size()));
      for (int i = 0; i < int(rows.size()); ++i) {
        double moved = coefA.row(i).dot(xstar);
        if (inst.ncont() > 0) moved += coefG.row(i).dot(zstar);
        const double viol = rhs(i) - moved;
        const double norm = std::sqrt(coefA.row(i).squaredNorm() + coefG.row(i).squaredNorm());
        score(i) = viol / std::max(1.0, norm);
      }
      std::vector<int> order(rows.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score(a) > score(b); });
      const int keep = std::min<int>(width, int(rows.size()));
      for (int i = 0; i < keep; ++i) {
        layer.W.row(i) = cands.W.row(order[i]);
        layer.v(i) = cands.v(order[i]);
      }
    }
    out.net.layers.push_back(std::move(layer));

    const LpSolution enlarged = solver.solve(build_enlarged_lp(out.net, inst));
    if (enlarged.status != LpStatus::optimal)
      throw NumericalError(std::string("gmi_warm_start: enlarged LP ") + to_string(enlarged.status));
    out.round_bounds.push_back(enlarged.objective);
  }
  return out;
}

}  // namespace ccp
