#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "symbsel/rng.hpp"
#include "symbsel/simplex.hpp"

using namespace symbsel;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MilpInstance make_lp(int n, std::vector<double> c,
                     std::vector<SparseRow> rows, std::vector<double> lo,
                     std::vector<double> hi) {
  MilpInstance inst;
  inst.name = "lp";
  inst.n = n;
  inst.p = 0;
  inst.c = std::move(c);
  inst.rows = std::move(rows);
  inst.lo = std::move(lo);
  inst.hi = std::move(hi);
  return inst;
}

// Vertex-enumeration oracle: tries every choice of n active constraints
// among rows and bounds, solves the square system, and keeps the best
// feasible point. Valid for bounded boxes, where an optimum sits at a vertex.
struct OracleResult {
  bool feasible = false;
  double objective = 0.0;
};

bool gauss_solve(std::vector<double> A, std::vector<double> b, int n,
                 std::vector<double>& x) {
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double mag = std::abs(A[static_cast<size_t>(k) * n + k]);
    for (int r = k + 1; r < n; ++r) {
      const double v = std::abs(A[static_cast<size_t>(r) * n + k]);
      if (v > mag) {
        mag = v;
        piv = r;
      }
    }
    if (mag < 1e-9) return false;
    if (piv != k) {
      for (int c = 0; c < n; ++c) {
        std::swap(A[static_cast<size_t>(k) * n + c],
                  A[static_cast<size_t>(piv) * n + c]);
      }
      std::swap(b[static_cast<size_t>(k)], b[static_cast<size_t>(piv)]);
    }
    for (int r = k + 1; r < n; ++r) {
      const double f =
          A[static_cast<size_t>(r) * n + k] / A[static_cast<size_t>(k) * n + k];
      for (int c = k; c < n; ++c) {
        A[static_cast<size_t>(r) * n + c] -=
            f * A[static_cast<size_t>(k) * n + c];
      }
      b[static_cast<size_t>(r)] -= f * b[static_cast<size_t>(k)];
    }
  }
  x.assign(static_cast<size_t>(n), 0.0);
  for (int k = n - 1; k >= 0; --k) {
    double acc = b[static_cast<size_t>(k)];
    for (int c = k + 1; c < n; ++c) {
      acc -= A[static_cast<size_t>(k) * n + c] * x[static_cast<size_t>(c)];
    }
    x[static_cast<size_t>(k)] = acc / A[static_cast<size_t>(k) * n + k];
  }
  return true;
}

OracleResult vertex_oracle(const MilpInstance& inst) {
  const int n = inst.n;
  const int m = static_cast<int>(inst.rows.size());
  // constraint list: rows (==b when active), then x_j == lo_j, x_j == hi_j
  const int total = m + 2 * n;
  std::vector<int> pick(static_cast<size_t>(n), 0);
  OracleResult best;

  std::vector<double> dense(static_cast<size_t>(m) * n, 0.0);
  for (int r = 0; r < m; ++r) {
    for (const auto& [idx, val] : inst.rows[static_cast<size_t>(r)].coeffs) {
      dense[static_cast<size_t>(r) * n + idx] += val;
    }
  }

  auto feasible = [&](const std::vector<double>& x) {
    for (int j = 0; j < n; ++j) {
      if (x[static_cast<size_t>(j)] < inst.lo[static_cast<size_t>(j)] - 1e-7 ||
          x[static_cast<size_t>(j)] > inst.hi[static_cast<size_t>(j)] + 1e-7) {
        return false;
      }
    }
    for (int r = 0; r < m; ++r) {
      double ax = 0.0;
      for (int j = 0; j < n; ++j) {
        ax += dense[static_cast<size_t>(r) * n + j] * x[static_cast<size_t>(j)];
      }
      if (ax > inst.rows[static_cast<size_t>(r)].rhs + 1e-7) return false;
    }
    return true;
  };

  auto consider = [&](const std::vector<int>& active) {
    std::vector<double> A(static_cast<size_t>(n) * n, 0.0);
    std::vector<double> b(static_cast<size_t>(n), 0.0);
    for (int k = 0; k < n; ++k) {
      const int a = active[static_cast<size_t>(k)];
      if (a < m) {
        for (int j = 0; j < n; ++j) {
          A[static_cast<size_t>(k) * n + j] =
              dense[static_cast<size_t>(a) * n + j];
        }
        b[static_cast<size_t>(k)] = inst.rows[static_cast<size_t>(a)].rhs;
      } else {
        const int which = a - m;
        const int j = which / 2;
        A[static_cast<size_t>(k) * n + j] = 1.0;
        b[static_cast<size_t>(k)] = (which % 2 == 0)
                                        ? inst.lo[static_cast<size_t>(j)]
                                        : inst.hi[static_cast<size_t>(j)];
      }
    }
    std::vector<double> x;
    if (!gauss_solve(std::move(A), std::move(b), n, x)) return;
    if (!feasible(x)) return;
    double obj = 0.0;
    for (int j = 0; j < n; ++j) {
      obj += inst.c[static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
    }
    if (!best.feasible || obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
    }
  };

  // enumerate n-subsets of constraints
  std::vector<int> active(static_cast<size_t>(n));
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == n) {
      consider(active);
      return;
    }
    for (int a = start; a < total; ++a) {
      active[static_cast<size_t>(depth)] = a;
      self(self, a + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return best;
}

}  // namespace

TEST_CASE("single-facet optimum") {
  // min -x1 - x2  s.t. x1 + x2 <= 1, x in [0,1]^2
  const auto inst = make_lp(2, {-1.0, -1.0}, {SparseRow{{{0, 1.0}, {1, 1.0}}, 1.0}},
                            {0.0, 0.0}, {1.0, 1.0});
  SimplexSolver lp(inst);
  const auto res = lp.solve();
  REQUIRE(res.status == LpStatus::Optimal);
  CHECK(res.objective == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(res.x[0] + res.x[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("no rows: optimum at the lower bounds") {
  const auto inst =
      make_lp(3, {1.0, 1.0, 1.0}, {}, {-1.0, 0.5, 2.0}, {4.0, 5.0, 6.0});
  SimplexSolver lp(inst);
  const auto res = lp.solve();
  REQUIRE(res.status == LpStatus::Optimal);
  CHECK(res.x[0] == doctest::Approx(-1.0));
  CHECK(res.x[1] == doctest::Approx(0.5));
  CHECK(res.x[2] == doctest::Approx(2.0));
  CHECK(res.objective == doctest::Approx(1.5));
}

TEST_CASE("negative rhs forces phase 1") {
  // -x1 - x2 <= -1 is x1 + x2 >= 1 with x in [0,1]^2, min x1 + 2 x2
  const auto inst =
      make_lp(2, {1.0, 2.0}, {SparseRow{{{0, -1.0}, {1, -1.0}}, -1.0}},
              {0.0, 0.0}, {1.0, 1.0});
  SimplexSolver lp(inst);
  const auto res = lp.solve();
  REQUIRE(res.status == LpStatus::Optimal);
  CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("infeasible and unbounded statuses") {
  SUBCASE("infeasible row versus bounds") {
    const auto inst = make_lp(1, {1.0}, {SparseRow{{{0, 1.0}}, -1.0}}, {0.0},
                              {1.0});
    SimplexSolver lp(inst);
    CHECK(lp.solve().status == LpStatus::Infeasible);
  }
  SUBCASE("crossing bound overrides") {
    const auto inst = make_lp(1, {1.0}, {}, {0.0}, {1.0});
    SimplexSolver lp(inst);
    const std::vector<double> lo = {2.0}, hi = {1.0};
    CHECK(lp.solve(lo, hi).status == LpStatus::Infeasible);
  }
  SUBCASE("unbounded ray") {
    const auto inst = make_lp(1, {-1.0}, {}, {0.0}, {kInf});
    SimplexSolver lp(inst);
    CHECK(lp.solve().status == LpStatus::Unbounded);
  }
}

TEST_CASE("random LPs match the vertex-enumeration oracle") {
  Rng rng(20240202);
  int feasible_count = 0;
  int infeasible_count = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.uniform_int(2, 5);
    const int m = rng.uniform_int(1, 6);
    MilpInstance inst;
    inst.name = "rand";
    inst.n = n;
    inst.p = 0;
    for (int j = 0; j < n; ++j) {
      inst.c.push_back(rng.uniform(-2.0, 2.0));
      const double lo = rng.uniform(-2.0, 0.0);
      inst.lo.push_back(lo);
      inst.hi.push_back(lo + rng.uniform(0.5, 3.0));
    }
    for (int r = 0; r < m; ++r) {
      SparseRow row;
      for (int j = 0; j < n; ++j) {
        if (rng.bernoulli(0.7)) {
          row.coeffs.emplace_back(j, rng.uniform(-3.0, 3.0));
        }
      }
      row.rhs = rng.uniform(-2.0, 4.0);
      if (row.coeffs.empty()) row.coeffs.emplace_back(0, 1.0);
      inst.rows.push_back(std::move(row));
    }

    const auto oracle = vertex_oracle(inst);
    SimplexSolver lp(inst);
    const auto res = lp.solve();
    if (oracle.feasible) {
      ++feasible_count;
      REQUIRE(res.status == LpStatus::Optimal);
      REQUIRE(res.objective ==
              doctest::Approx(oracle.objective).epsilon(1e-6));
    } else {
      ++infeasible_count;
      REQUIRE(res.status == LpStatus::Infeasible);
    }
  }
  // the mix should exercise both paths
  CHECK(feasible_count > 10);
  CHECK(infeasible_count > 2);
}

TEST_CASE("feasibility of the reported point") {
  Rng rng(777);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.uniform_int(3, 8);
    const int m = rng.uniform_int(2, 10);
    MilpInstance inst;
    inst.name = "feas";
    inst.n = n;
    inst.p = 0;
    for (int j = 0; j < n; ++j) {
      inst.c.push_back(rng.uniform(-1.0, 1.0));
      inst.lo.push_back(0.0);
      inst.hi.push_back(rng.uniform(1.0, 3.0));
    }
    for (int r = 0; r < m; ++r) {
      SparseRow row;
      for (int j = 0; j < n; ++j) {
        if (rng.bernoulli(0.5)) {
          row.coeffs.emplace_back(j, rng.uniform(-2.0, 2.0));
        }
      }
      if (row.coeffs.empty()) row.coeffs.emplace_back(0, 1.0);
      row.rhs = rng.uniform(0.5, 3.0);
      inst.rows.push_back(std::move(row));
    }
    SimplexSolver lp(inst);
    const auto res = lp.solve();
    REQUIRE(res.status == LpStatus::Optimal);  // x = 0 is feasible
    for (int r = 0; r < m; ++r) {
      double ax = 0.0;
      for (const auto& [idx, val] : inst.rows[static_cast<size_t>(r)].coeffs) {
        ax += val * res.x[static_cast<size_t>(idx)];
      }
      CHECK(ax <= inst.rows[static_cast<size_t>(r)].rhs + 1e-7);
    }
    for (int j = 0; j < n; ++j) {
      CHECK(res.x[static_cast<size_t>(j)] >=
            inst.lo[static_cast<size_t>(j)] - 1e-9);
      CHECK(res.x[static_cast<size_t>(j)] <=
            inst.hi[static_cast<size_t>(j)] + 1e-9);
    }
  }
}

TEST_CASE("classic cycling-prone instance terminates") {
  // Beale's example; the optimum is -1/20.
  MilpInstance inst;
  inst.name = "beale";
  inst.n = 4;
  inst.p = 0;
  inst.c = {-0.75, 150.0, -0.02, 6.0};
  inst.lo = {0.0, 0.0, 0.0, 0.0};
  inst.hi = {kInf, kInf, kInf, kInf};
  inst.rows = {
      SparseRow{{{0, 0.25}, {1, -60.0}, {2, -1.0 / 25.0}, {3, 9.0}}, 0.0},
      SparseRow{{{0, 0.5}, {1, -90.0}, {2, -1.0 / 50.0}, {3, 3.0}}, 0.0},
      SparseRow{{{2, 1.0}}, 1.0},
  };
  SimplexSolver lp(inst);
  const auto res = lp.solve();
  REQUIRE(res.status == LpStatus::Optimal);
  CHECK(res.objective == doctest::Approx(-0.05).epsilon(1e-9));
}

TEST_CASE("solve is deterministic") {
  const auto inst = make_lp(
      3, {-1.0, -1.0, -1.0},
      {SparseRow{{{0, 1.0}, {1, 1.0}}, 1.0}, SparseRow{{{1, 1.0}, {2, 1.0}}, 1.0}},
      {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  SimplexSolver lp(inst);
  const auto a = lp.solve();
  const auto b = lp.solve();
  CHECK(a.x == b.x);
  CHECK(a.objective == b.objective);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("bound overrides restrict the optimum") {
  const auto inst = make_lp(2, {-1.0, -1.0},
                            {SparseRow{{{0, 1.0}, {1, 1.0}}, 2.0}},
                            {0.0, 0.0}, {1.0, 1.0});
  SimplexSolver lp(inst);
  const auto base = lp.solve();
  CHECK(base.objective == doctest::Approx(-2.0));
  const std::vector<double> lo = {0.0, 0.0}, hi = {1.0, 0.25};
  const auto tight = lp.solve(lo, hi);
  CHECK(tight.objective == doctest::Approx(-1.25));
}
