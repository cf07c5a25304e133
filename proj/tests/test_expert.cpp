#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "symbsel/expert.hpp"
#include "symbsel/features.hpp"
#include "symbsel/instances.hpp"
#include "symbsel/rng.hpp"

using namespace symbsel;

namespace {

GenConfig small_cover_cfg(std::uint64_t seed, int rows = 12, int cols = 24) {
  GenConfig cfg;
  cfg.family = Family::Setcover;
  cfg.rows = rows;
  cfg.cols = cols;
  cfg.density = 0.2;
  cfg.cost_lo = 1;
  cfg.cost_hi = 20;
  cfg.seed = seed;
  cfg.name = "sc_" + std::to_string(seed);
  return cfg;
}

// first seed at or after `seed` whose cover has a fractional root LP,
// so the solve genuinely branches and comparisons happen
MilpInstance branchy_cover(std::uint64_t seed, int rows = 12, int cols = 24) {
  for (std::uint64_t s = seed; s < seed + 200; ++s) {
    auto inst = gen_setcover(small_cover_cfg(s, rows, cols));
    SearchTree probe(inst);
    probe.initialize_root();
    if (!probe.frontier.empty()) return inst;
  }
  throw std::runtime_error("no branchy cover found near the given seed");
}

// 2^n feasibility oracle over binary instances
double enumerate_optimum(const MilpInstance& inst) {
  double best = std::numeric_limits<double>::infinity();
  for (long mask = 0; mask < (1L << inst.n); ++mask) {
    double obj = 0.0;
    for (int j = 0; j < inst.n; ++j) {
      if ((mask >> j) & 1) obj += inst.c[static_cast<size_t>(j)];
    }
    bool ok = true;
    for (const auto& row : inst.rows) {
      double ax = 0.0;
      for (const auto& [var, coef] : row.coeffs) {
        ax += coef * ((mask >> var) & 1 ? 1.0 : 0.0);
      }
      if (ax > row.rhs + 1e-9) {
        ok = false;
        break;
      }
    }
    if (ok) best = std::min(best, obj);
  }
  return best;
}

}  // namespace

TEST_CASE("solve_to_optimal: integral relaxation returns the LP point") {
  MilpInstance inst;
  inst.name = "box";
  inst.n = 3;
  inst.p = 3;
  inst.c = {1.0, 2.0, 3.0};
  inst.lo = {0.0, 0.0, 0.0};
  inst.hi = {1.0, 1.0, 1.0};
  const auto res = solve_to_optimal(inst);
  CHECK(res.value == doctest::Approx(0.0));
  CHECK(res.x == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(res.stats.final_gap == doctest::Approx(0.0));
}

TEST_CASE("solve_to_optimal matches exhaustive enumeration") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto inst = gen_setcover(small_cover_cfg(seed, 8, 12));
    const auto res = solve_to_optimal(inst);
    CHECK(res.value == doctest::Approx(enumerate_optimum(inst)).epsilon(1e-9));
  }
}

TEST_CASE("solve_to_optimal error paths") {
  MilpInstance infeas;
  infeas.name = "bad";
  infeas.n = 1;
  infeas.p = 1;
  infeas.c = {1.0};
  infeas.lo = {0.0};
  infeas.hi = {1.0};
  infeas.rows = {SparseRow{{{0, 1.0}}, -1.0}};
  CHECK_THROWS_AS(solve_to_optimal(infeas), InfeasibleInstance);

  const auto inst = branchy_cover(7);
  CHECK_THROWS_AS(solve_to_optimal(inst, 1), InstanceRejected);
}

namespace {

struct PlungerFixture {
  MilpInstance inst;
  SearchTree tree;

  PlungerFixture() : inst(make_inst()), tree(inst) {
    tree.root_solved = true;
    tree.root_bound = 1.0;
    tree.root_lp_x = {0.5, 0.5};
    BnbNode root;
    root.id = 0;
    root.has_own_lp = true;
    root.bound = 1.0;
    tree.nodes.push_back(root);
  }

  static MilpInstance make_inst() {
    MilpInstance m;
    m.name = "plunge";
    m.n = 2;
    m.p = 2;
    m.c = {1.0, 1.0};
    m.lo = {0.0, 0.0};
    m.hi = {1.0, 1.0};
    return m;
  }

  BnbNode& add_node(int id, int depth, double bound,
                    std::vector<BoundDelta> deltas) {
    BnbNode n;
    n.id = id;
    n.parent_id = 0;
    n.depth = depth;
    n.bound = bound;
    n.has_own_lp = true;  // empty frac_ref: estimate equals the bound
    n.deltas = std::move(deltas);
    tree.nodes.push_back(n);
    return tree.nodes.back();
  }
};

}  // namespace

TEST_CASE("plunger_decide follows containment, depth, then estimate") {
  PlungerFixture fx;
  const std::vector<double> x_opt = {1.0, 0.0};

  // node 1 contains the optimum (x0 >= 1); node 2 excludes it (x0 <= 0)
  auto& n1 = fx.add_node(1, 1, 1.0, {BoundDelta{0, false, 1.0}});
  auto& n2 = fx.add_node(2, 1, 1.0, {BoundDelta{0, true, 0.0}});
  CHECK(plunger_decide(fx.tree, x_opt, n1, n2) == kPreferNode1);
  CHECK(plunger_decide(fx.tree, x_opt, n2, n1) == kPreferNode2);

  // both contain: depths 3 and 5, the deeper plunge wins
  auto& d3 = fx.add_node(3, 3, 1.0, {});
  auto& d5 = fx.add_node(4, 5, 1.0, {});
  CHECK(plunger_decide(fx.tree, x_opt, d3, d5) == kPreferNode2);
  CHECK(plunger_decide(fx.tree, x_opt, d5, d3) == kPreferNode1);

  // neither contains: the better (lower) estimate wins
  auto& e_hi = fx.add_node(5, 2, 7.0, {BoundDelta{0, true, 0.0}});
  auto& e_lo = fx.add_node(6, 2, 3.0, {BoundDelta{0, true, 0.0}});
  CHECK(fx.tree.estimate_score(e_lo) < fx.tree.estimate_score(e_hi));
  CHECK(plunger_decide(fx.tree, x_opt, e_hi, e_lo) == kPreferNode2);
  CHECK(plunger_decide(fx.tree, x_opt, e_lo, e_hi) == kPreferNode1);

  // full tie: the lower node id is preferred
  auto& t1 = fx.add_node(7, 2, 3.0, {});
  auto& t2 = fx.add_node(8, 2, 3.0, {});
  CHECK(plunger_decide(fx.tree, x_opt, t1, t2) == kPreferNode1);
  CHECK(plunger_decide(fx.tree, x_opt, t2, t1) == kPreferNode2);
}

TEST_CASE("collect: a one-node solve records nothing") {
  MilpInstance inst;
  inst.name = "trivial";
  inst.n = 2;
  inst.p = 2;
  inst.c = {1.0, 1.0};
  inst.lo = {0.0, 0.0};
  inst.hi = {1.0, 1.0};
  const auto res = collect({{"trivial", inst}});
  CHECK(res.dataset.samples.empty());
  REQUIRE(res.per_instance.size() == 1);
  CHECK(res.per_instance[0].second == 0);
}

TEST_CASE("collect: sample count equals the solver's comparison count") {
  const auto inst = branchy_cover(21);
  const auto res = collect({{"sc21", inst}});
  REQUIRE(res.rejected.empty());

  // replay the expert run and count comparisons
  const auto opt = solve_to_optimal(inst);
  ExpertComparator expert(opt.x);
  const auto replay = solve(inst, expert);
  CHECK(static_cast<long>(res.dataset.samples.size()) ==
        replay.stats.comparisons);
  CHECK(res.per_instance[0].second == replay.stats.comparisons);
}

TEST_CASE("collect: labels replay exactly") {
  const auto inst = branchy_cover(33);
  const auto res = collect({{"sc33", inst}});
  REQUIRE(!res.dataset.samples.empty());

  const auto opt = solve_to_optimal(inst);
  ExpertComparator expert(opt.x);
  size_t cursor = 0;
  auto hook = [&](const SearchTree& tree, const BnbNode& champ,
                  const BnbNode& chall, int decision) {
    REQUIRE(cursor < res.dataset.samples.size());
    const auto& stored = res.dataset.samples[cursor];
    CHECK(stored.decision ==
          plunger_decide(tree, opt.x, champ, chall));
    CHECK(stored.decision == decision);
    const auto pf = pair_features(extract(tree, champ), extract(tree, chall));
    for (size_t k = 0; k < pf.size(); ++k) {
      CHECK(stored.features[k] == pf[k]);
    }
    ++cursor;
  };
  solve(inst, expert, {}, hook);
  CHECK(cursor == res.dataset.samples.size());
}

TEST_CASE("collect: infeasible instances are skipped and logged") {
  MilpInstance bad;
  bad.name = "bad";
  bad.n = 1;
  bad.p = 1;
  bad.c = {1.0};
  bad.lo = {0.0};
  bad.hi = {1.0};
  bad.rows = {SparseRow{{{0, 1.0}}, -1.0}};
  const auto good = branchy_cover(44);
  const auto res = collect({{"bad", bad}, {"good", good}});
  REQUIRE(res.rejected.size() == 1);
  CHECK(res.rejected[0] == "bad");
  REQUIRE(res.per_instance.size() == 1);
  CHECK(res.per_instance[0].first == "good");
  for (const auto& s : res.dataset.samples) {
    CHECK(s.instance_id == "good");
  }
}

TEST_CASE("collect is deterministic and parallel-safe") {
  std::vector<std::pair<std::string, MilpInstance>> instances;
  for (std::uint64_t seed = 50; seed < 54; ++seed) {
    instances.emplace_back("sc" + std::to_string(seed),
                           branchy_cover(seed));
  }
  CollectOptions serial;
  serial.jobs = 1;
  CollectOptions parallel;
  parallel.jobs = 2;
  const auto a = collect(instances, serial);
  const auto b = collect(instances, parallel);
  REQUIRE(a.dataset.samples.size() == b.dataset.samples.size());
  for (size_t i = 0; i < a.dataset.samples.size(); ++i) {
    CHECK(a.dataset.samples[i].decision == b.dataset.samples[i].decision);
    CHECK(a.dataset.samples[i].features == b.dataset.samples[i].features);
    CHECK(a.dataset.samples[i].instance_id == b.dataset.samples[i].instance_id);
  }
}

TEST_CASE("expert explores no more nodes than DFS on most instances") {
  int expert_wins = 0;
  const int total = 10;
  for (int k = 0; k < total; ++k) {
    const auto inst =
        gen_setcover(small_cover_cfg(100 + static_cast<std::uint64_t>(k)));
    const auto opt = solve_to_optimal(inst);
    ExpertComparator expert(opt.x);
    DfsComparator dfs;
    const auto expert_run = solve(inst, expert);
    const auto dfs_run = solve(inst, dfs);
    REQUIRE(expert_run.stats.incumbent_value ==
            doctest::Approx(dfs_run.stats.incumbent_value).epsilon(1e-9));
    if (expert_run.stats.nodes <= dfs_run.stats.nodes) ++expert_wins;
  }
  CHECK(expert_wins >= 6);
}
