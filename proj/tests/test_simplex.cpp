#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "ccp/ccp.hpp"
#include "oracle_helpers.hpp"

using namespace ccp;

using oracle::random_feasible_lp;

TEST_CASE("one-variable LP solves by hand", "[simplex]") {
  // min -u  s.t.  -u >= -2, u >= 0
  LpProblem lp{Matrix::Constant(1, 1, -1.0), Vector::Constant(1, -2.0), Vector::Constant(1, -1.0)};
  SimplexSolver solver;
  const LpSolution sol = solver.solve(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(-2.0, 1e-9));
  REQUIRE_THAT(sol.primal(0), Catch::Matchers::WithinAbs(2.0, 1e-9));
}

TEST_CASE("worked relaxation: objective -1.5 at a vertex", "[simplex]") {
  const MilpInstance inst = oracle::worked_instance();
  SimplexSolver solver;
  const LpSolution sol = solver.solve(inst.relaxation());
  REQUIRE(sol.status == LpStatus::optimal);
  REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(-1.5, 1e-9));
  const bool v1 = std::abs(sol.primal(0) - 1.5) < 1e-9 && std::abs(sol.primal(1)) < 1e-9;
  const bool v2 = std::abs(sol.primal(1) - 1.5) < 1e-9 && std::abs(sol.primal(0)) < 1e-9;
  REQUIRE((v1 || v2));
}

TEST_CASE("infeasible and unbounded verdicts", "[simplex]") {
  // x >= 1 and -x >= 0 cannot both hold
  LpProblem infeas;
  infeas.M.resize(2, 1);
  infeas.M << 1.0, -1.0;
  infeas.q.resize(2);
  infeas.q << 1.0, 0.0;
  infeas.d = Vector::Ones(1);
  SimplexSolver solver;
  REQUIRE(solver.solve(infeas).status == LpStatus::infeasible);

  // min -u s.t. u >= 1: unbounded below
  LpProblem unb{Matrix::Constant(1, 1, 1.0), Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
  REQUIRE(solver.solve(unb).status == LpStatus::unbounded);
}

TEST_CASE("duality holds on random feasible bounded LPs", "[simplex]") {
  Rng rng(20240915);
  SimplexSolver solver;
  for (int trial = 0; trial < 100; ++trial) {
    const int rows = int(rng.uniform_int(1, 10));
    const int cols = int(rng.uniform_int(1, 10));
    const LpProblem lp = random_feasible_lp(rng, rows, cols);
    const LpSolution sol = solver.solve(lp);
    REQUIRE(sol.status == LpStatus::optimal);

    // primal feasibility and a vertex solution
    const Vector slack = lp.M * sol.primal - lp.q;
    for (int i = 0; i < rows; ++i) REQUIRE(slack(i) >= -1e-7 * (1.0 + std::abs(lp.q(i))));
    REQUIRE(sol.primal.minCoeff() >= -1e-9);
    int positive = 0;
    for (int j = 0; j < cols; ++j) positive += sol.primal(j) > 1e-9;
    REQUIRE(positive <= rows);

    // dual feasibility and zero duality gap
    REQUIRE(sol.duals.minCoeff() >= -1e-9);
    const double dual_obj = sol.duals.dot(lp.q);
    REQUIRE(std::abs(sol.objective - dual_obj) <= 1e-7 * (1.0 + std::abs(sol.objective)));

    // returned inverse matches the basis columns
    Matrix B(rows, rows);
    for (int i = 0; i < rows; ++i) {
      const int j = sol.basis[i];
      B.col(i) = j < cols ? Vector(lp.M.col(j)) : Vector(-Vector::Unit(rows, j - cols));
    }
    REQUIRE((sol.basis_inverse * B - Matrix::Identity(rows, rows)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("warm start from the optimal basis re-solves in zero pivots", "[simplex]") {
  const MilpInstance inst = generate_set_cover(10, 20, 0.3, 5);
  SimplexSolver solver;
  const LpSolution cold = solver.solve(inst.relaxation());
  REQUIRE(cold.status == LpStatus::optimal);
  const LpSolution warm = solver.solve(inst.relaxation(), cold.basis);
  REQUIRE(warm.status == LpStatus::optimal);
  REQUIRE(warm.pivots == 0);
  REQUIRE_THAT(warm.objective, Catch::Matchers::WithinAbs(cold.objective, 1e-7));
}

TEST_CASE("warm start after a small perturbation beats a cold solve", "[simplex]") {
  Rng rng(77);
  SimplexSolver solver;
  std::vector<int> warm_pivots, cold_pivots;
  for (int trial = 0; trial < 20; ++trial) {
    const LpProblem lp = random_feasible_lp(rng, 8, 8);
    const LpSolution base = solver.solve(lp);
    REQUIRE(base.status == LpStatus::optimal);
    LpProblem perturbed = lp;
    for (int i = 0; i < perturbed.M.rows(); ++i)
      for (int j = 0; j < perturbed.M.cols(); ++j) perturbed.M(i, j) += rng.uniform(-1e-8, 1e-8);
    const LpSolution warm = solver.solve(perturbed, base.basis);
    const LpSolution cold = solver.solve(perturbed);
    REQUIRE(warm.status == LpStatus::optimal);
    REQUIRE(cold.status == LpStatus::optimal);
    REQUIRE(std::abs(warm.objective - cold.objective) <= 1e-6);
    REQUIRE(std::abs(warm.objective - base.objective) <= 1e-4);
    warm_pivots.push_back(warm.pivots);
    cold_pivots.push_back(cold.pivots);
  }
  std::sort(warm_pivots.begin(), warm_pivots.end());
  std::sort(cold_pivots.begin(), cold_pivots.end());
  REQUIRE(warm_pivots[warm_pivots.size() / 2] < cold_pivots[cold_pivots.size() / 2]);
}

TEST_CASE("stale warm basis is repaired, wrong cardinality rejected", "[simplex]") {
  const MilpInstance inst = generate_set_cover(6, 10, 0.4, 2);
  const LpProblem lp = inst.relaxation();
  SimplexSolver solver;
  const LpSolution cold = solver.solve(lp);

  Basis stale = cold.basis;
  stale[0] = stale[1];  // duplicate column makes the basis singular
  const LpSolution repaired = solver.solve(lp, stale);
  REQUIRE(repaired.status == LpStatus::optimal);
  REQUIRE_THAT(repaired.objective, Catch::Matchers::WithinAbs(cold.objective, 1e-7));

  Basis wrong(cold.basis.begin(), cold.basis.end() - 1);
  REQUIRE_THROWS_AS(solver.solve(lp, wrong), ValidationError);
}

TEST_CASE("terminates on the classic degenerate cycling example", "[simplex]") {
  // Beale's example, stated with <= rows and negated into >= form.
  LpProblem lp;
  lp.M.resize(3, 4);
  lp.M << -0.25, 60.0, 0.04, -9.0,
          -0.5, 90.0, 0.02, -3.0,
          0.0, 0.0, -1.0, 0.0;
  lp.q.resize(3);
  lp.q << 0.0, 0.0, -1.0;
  lp.d.resize(4);
  lp.d << -0.75, 150.0, -0.02, 6.0;
  SimplexSolver solver;
  const LpSolution sol = solver.solve(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(-0.05, 1e-9));
}

TEST_CASE("extract_fractional_rows on the worked instance", "[simplex]") {
  const MilpInstance inst = oracle::worked_instance();
  SimplexSolver solver;
  const LpSolution sol = solver.solve(inst.relaxation());
  const auto rows = extract_fractional_rows(sol, inst.k, 1e-6);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].w.size() == 1);
  REQUIRE_THAT(rows[0].w(0), Catch::Matchers::WithinAbs(-0.5, 1e-12));
  REQUIRE_THAT(rows[0].v, Catch::Matchers::WithinAbs(1.5, 1e-12));
}

TEST_CASE("extract_fractional_rows is empty at an integral optimum", "[simplex]") {
  // min x s.t. x >= 2: integral vertex
  LpProblem lp{Matrix::Constant(1, 1, 1.0), Vector::Constant(1, 2.0), Vector::Constant(1, 1.0)};
  SimplexSolver solver;
  const LpSolution sol = solver.solve(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  REQUIRE(extract_fractional_rows(sol, 1, 1e-6).empty());
}

TEST_CASE("heavily degenerate LPs: Dantzig mode agrees with pure Bland", "[simplex][property]") {
  // Pure Bland's rule terminates by theory, so it is an independent route
  // for both the verdict and the objective on cycling-prone inputs.
  Rng rng(4242);
  SimplexConfig bland_cfg;
  bland_cfg.bland_after = 0;
  SimplexSolver dantzig;
  SimplexSolver bland(bland_cfg);
  for (int trial = 0; trial < 50; ++trial) {
    const int rows = int(rng.uniform_int(2, 8));
    const int cols = int(rng.uniform_int(2, 8));
    LpProblem lp = oracle::random_feasible_lp(rng, rows, cols);
    for (int i = 0; i < rows; ++i)
      if (rng.bernoulli(0.7)) lp.q(i) = 0.0;  // degenerate vertex at the origin
    const LpSolution a = dantzig.solve(lp);
    const LpSolution b = bland.solve(lp);
    REQUIRE(a.status == b.status);
    if (a.status == LpStatus::optimal)
      REQUIRE(std::abs(a.objective - b.objective) <= 1e-7 * (1.0 + std::abs(a.objective)));
  }
}

TEST_CASE("tableau dump reports the basic rows", "[simplex]") {
  const MilpInstance inst = oracle::worked_instance();
  SimplexSolver solver;
  const LpSolution sol = solver.solve(inst.relaxation());
  std::ostringstream os;
  dump_tableau(inst.relaxation(), sol, os);
  REQUIRE(os.str().find("objective -1.5") != std::string::npos);
  REQUIRE(os.str().find("u0 = 1.5") != std::string::npos);
}

TEST_CASE("extract_fractional_rows respects the fractionality threshold", "[simplex]") {
  // min -u s.t. -u >= -1.3: optimum u = 1.3, fractional part 0.3
  LpProblem lp{Matrix::Constant(1, 1, -1.0), Vector::Constant(1, -1.3), Vector::Constant(1, -1.0)};
  SimplexSolver solver;
  const LpSolution sol = solver.solve(lp);
  REQUIRE(extract_fractional_rows(sol, 1, 0.2).size() == 1);
  REQUIRE(extract_fractional_rows(sol, 1, 0.4).empty());
}
