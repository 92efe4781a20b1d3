#pragma once

#include <string>
#include <vector>

#include "ccp/errors.hpp"
#include "ccp/milp.hpp"
#include "ccp/rng.hpp"

namespace ccp {

/// Minimum set covering: min sum c_j x_j with c_j uniform on {1..100},
/// one covering row sum_{j in S_i} x_j >= 1 per row, memberships sampled at
/// `density`. Resampled until every row has a member and every column is used.
inline MilpInstance generate_set_cover(int rows, int cols, double density, std::uint64_t seed) {
  if (rows < 1) throw ValidationError("generate_set_cover: rows must be >= 1");
  if (cols < 2) throw ValidationError("generate_set_cover: cols must be >= 2");
  if (density <= 0.0 || density >= 1.0) throw ValidationError("generate_set_cover: density must lie in (0,1)");
  if (density * cols < 1.0) throw ValidationError("generate_set_cover: density*cols must be >= 1");

  Rng rng(seed);
  constexpr int max_attempts = 1000;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Matrix A = Matrix::Zero(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (rng.bernoulli(density)) A(i, j) = 1.0;
    bool ok = true;
    for (int i = 0; i < rows && ok; ++i) ok = A.row(i).sum() >= 1.0;
    for (int j = 0; j < cols && ok; ++j) ok = A.col(j).sum() >= 1.0;
    if (!ok) continue;

    MilpInstance inst;
    inst.name = "setcover_r" + std::to_string(rows) + "_c" + std::to_string(cols) + "_s" + std::to_string(seed);
    inst.k = cols;
    inst.n = cols;
    inst.m = rows;
    inst.A = A;
    inst.G = Matrix::Zero(rows, 0);
    inst.b = Vector::Ones(rows);
    inst.c.resize(cols);
    for (int j = 0; j < cols; ++j) inst.c(j) = double(rng.uniform_int(1, 100));
    inst.h = Vector::Zero(0);
    inst.validate();
    return inst;
  }
  throw BudgetError("generate_set_cover: could not reach full row/column coverage; increase density");
}

/// Maximum independent set on an Erdos-Renyi graph, written as a minimization:
/// min -sum x_u with one row -x_u - x_v >= -1 per edge. Explicit -x_u >= -1
/// rows keep isolated vertices bounded.
inline MilpInstance generate_max_indep_set(int nodes, double edge_prob, std::uint64_t seed) {
  if (nodes < 2) throw ValidationError("generate_max_indep_set: nodes must be >= 2");
  if (edge_prob <= 0.0 || edge_prob > 1.0)
    throw ValidationError("generate_max_indep_set: edge_prob must lie in (0,1]");

  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < nodes; ++u)
    for (int v = u + 1; v < nodes; ++v)
      if (rng.bernoulli(edge_prob)) edges.push_back({u, v});

  const int m = int(edges.size()) + nodes;
  MilpInstance inst;
  inst.name = "indepset_n" + std::to_string(nodes) + "_s" + std::to_string(seed);
  inst.k = nodes;
  inst.n = nodes;
  inst.m = m;
  inst.A = Matrix::Zero(m, nodes);
  inst.b = Vector::Zero(m);
  for (int e = 0; e < int(edges.size()); ++e) {
    inst.A(e, edges[e].first) = -1.0;
    inst.A(e, edges[e].second) = -1.0;
    inst.b(e) = -1.0;
  }
  for (int u = 0; u < nodes; ++u) {
    inst.A(int(edges.size()) + u, u) = -1.0;
    inst.b(int(edges.size()) + u) = -1.0;
  }
  inst.G = Matrix::Zero(m, 0);
  inst.c = Vector::Constant(nodes, -1.0);
  inst.h = Vector::Zero(0);
  inst.validate();
  return inst;
}

/// Feasible, bounded mixed instance: integer coefficients in [-5, 5], the
/// right-hand side backed off from a sampled point near the origin, and
/// nonnegative costs (so min c.x + h.z over x,z >= 0 cannot be unbounded).
inline MilpInstance generate_random_mixed(int m, int k, int ncont, std::uint64_t seed) {
  if (m < 1 || k < 1 || ncont < 1)
    throw ValidationError("generate_random_mixed: m, k and ncont must be >= 1");

  Rng rng(seed);
  constexpr int max_attempts = 100;
  SimplexSolver solver;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    MilpInstance inst;
    inst.name = "mixed_m" + std::to_string(m) + "_k" + std::to_string(k) + "_c" + std::to_string(ncont) +
                "_s" + std::to_string(seed);
    inst.k = k;
    inst.n = k + ncont;
    inst.m = m;
    inst.A.resize(m, k);
    inst.G.resize(m, ncont);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < k; ++j) inst.A(i, j) = double(rng.uniform_int(-5, 5));
      for (int j = 0; j < ncont; ++j) inst.G(i, j) = double(rng.uniform_int(-5, 5));
    }
    Vector x0(k), z0(ncont);
    for (int j = 0; j < k; ++j) x0(j) = double(rng.uniform_int(0, 1));
    for (int j = 0; j < ncont; ++j) z0(j) = double(rng.uniform_int(0, 1));
    const Vector activity = inst.A * x0 + inst.G * z0;
    inst.b.resize(m);
    for (int i = 0; i < m; ++i) inst.b(i) = std::floor(activity(i)) - double(rng.uniform_int(0, 3));
    inst.c.resize(k);
    inst.h.resize(ncont);
    for (int j = 0; j < k; ++j) inst.c(j) = double(rng.uniform_int(0, 10));
    for (int j = 0; j < ncont; ++j) inst.h(j) = double(rng.uniform_int(0, 10));
    inst.validate();

    // (x0, z0) is feasible by construction; double-check boundedness of the
    // relaxation before accepting.
    const LpSolution sol = solver.solve(inst.relaxation());
    if (sol.status == LpStatus::optimal) return inst;
  }
  throw BudgetError("generate_random_mixed: no feasible bounded instance within the attempt budget");
}

}  // namespace ccp
