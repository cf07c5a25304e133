#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "symbsel/features.hpp"
#include "symbsel/rng.hpp"

using namespace symbsel;

namespace {

MilpInstance two_var_instance() {
  MilpInstance inst;
  inst.name = "fixture";
  inst.n = 2;
  inst.p = 2;
  inst.c = {2.0, 3.0};
  inst.lo = {0.0, 0.0};
  inst.hi = {1.0, 1.0};
  inst.rows = {SparseRow{{{0, -1.0}, {1, -1.0}}, -1.0}};
  return inst;
}

MilpInstance fractional_root_instance() {
  // LP optimum x = (2/3, 1, 0), fractional in x0
  MilpInstance inst;
  inst.name = "frac";
  inst.n = 3;
  inst.p = 3;
  inst.c = {-5.0, -4.0, -3.0};
  inst.lo = {0.0, 0.0, 0.0};
  inst.hi = {1.0, 1.0, 1.0};
  inst.rows = {SparseRow{{{0, 3.0}, {1, 2.0}, {2, 2.0}}, 4.0}};
  return inst;
}

// A hand-assembled three-level tree state with pinned numbers.
struct Fixture {
  MilpInstance inst = two_var_instance();
  SearchTree tree{inst};

  Fixture() {
    tree.root_solved = true;
    tree.root_bound = 10.0;
    tree.root_lp_x = {0.3, 0.6};
    tree.primal_cap = 21.0;
    tree.incumbent_set = true;
    tree.incumbent_value = 14.0;
    tree.incumbent_x = {1.0, 1.0};
    tree.max_depth = 3;
    tree.plunge_depth = 2;
    tree.processed = 4;

    BnbNode root;
    root.id = 0;
    root.parent_id = -1;
    root.depth = 0;
    root.bound = 10.0;
    root.has_own_lp = true;
    tree.nodes.push_back(root);

    BnbNode mid;  // the last expanded node
    mid.id = 1;
    mid.parent_id = 0;
    mid.depth = 1;
    mid.bound = 10.4;
    tree.nodes.push_back(mid);

    BnbNode probe;  // child of the last expanded node
    probe.id = 2;
    probe.parent_id = 1;
    probe.depth = 2;
    probe.bound = 11.0;
    probe.branch_var = 1;
    probe.branch_dir = BranchDir::Up;
    probe.branch_parent_value = 0.7;
    probe.branch_new_bound = 1.0;
    probe.frac_ref = {{0, 0.3}};
    tree.nodes.push_back(probe);

    BnbNode other;  // sibling of the last expanded node
    other.id = 3;
    other.parent_id = 0;
    other.depth = 1;
    other.bound = 10.5;
    tree.nodes.push_back(other);

    tree.frontier = {2, 3};
    tree.last_expanded = 1;

    tree.pc_down_stat.add(0, 2.0);  // up(0) falls back to |c0| = 2
    tree.pc_up_stat.add(1, 4.0);    // down(1) falls back to |c1| = 3
    tree.inf_up_stat.add(1, 3.0);
    tree.inf_up_stat.add(1, 5.0);
  }
};

}  // namespace

TEST_CASE("feature names: twenty canonical rows") {
  const auto& names = feature_names();
  REQUIRE(names.size() == 20);
  CHECK(names[kGapInf] == "GAPINF");
  CHECK(names[kEstimate] == "ESTIMATE");
  CHECK(names[kMaxDepth] == "MAXDEPTH");
}

TEST_CASE("scripted tree matches the hand-computed table") {
  Fixture fx;
  const auto f = extract(fx.tree, fx.tree.nodes[2]);

  CHECK(f[kGapInf] == 0.0);
  CHECK(f[kGap] == doctest::Approx((14.0 - 10.5) / 10.5).epsilon(1e-12));
  CHECK(f[kGlobalUpperBoundInf] == 0.0);
  CHECK(f[kGlobalUpperBound] == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(f[kPlungeDepth] == 2.0);
  CHECK(f[kRelativeDepth] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(f[kLowerBound] == doctest::Approx(1.1).epsilon(1e-12));
  // estimate: 11 + pc_up(1)*(1-0.7) + min(pc_down(0)*0.3, pc_up(0)*0.7)
  CHECK(f[kEstimate] ==
        doctest::Approx(11.0 + 4.0 * 0.3 + 0.6).epsilon(1e-12));
  CHECK(f[kRelativeBound] ==
        doctest::Approx((11.0 - 10.5) / 3.5).epsilon(1e-12));
  CHECK(f[kTypeSibling] == 0.0);
  CHECK(f[kTypeChild] == 1.0);
  CHECK(f[kTypeLeaf] == 0.0);
  CHECK(f[kBranchVarBoundLpDiff] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(f[kBranchVarRootLpDiff] == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(f[kBranchVarPrioDown] == 0.0);
  CHECK(f[kBranchVarPrioUp] == 1.0);
  CHECK(f[kBranchVarPseudocost] == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(f[kBranchVarInf] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(f[kNodeDepth] == 2.0);
  CHECK(f[kMaxDepth] == 3.0);
}

TEST_CASE("node type tags follow the last expanded node") {
  Fixture fx;
  // node 3 shares a parent with the last expanded node: sibling
  const auto sib = extract(fx.tree, fx.tree.nodes[3]);
  CHECK(sib[kTypeSibling] == 1.0);
  CHECK(sib[kTypeChild] == 0.0);
  CHECK(sib[kTypeLeaf] == 0.0);

  // with a different last-expanded, node 3 is unrelated: leaf
  fx.tree.last_expanded = 2;
  const auto leaf = extract(fx.tree, fx.tree.nodes[3]);
  CHECK(leaf[kTypeLeaf] == 1.0);
  CHECK(leaf[kTypeSibling] == 0.0);
}

TEST_CASE("root node at solve start") {
  const auto inst = fractional_root_instance();
  SearchTree tree(inst);
  tree.initialize_root();
  REQUIRE(tree.frontier.size() == 1);
  const auto f = extract(tree, tree.nodes[0]);
  CHECK(f[kGapInf] == 1.0);
  CHECK(f[kGap] == 0.0);
  CHECK(f[kGlobalUpperBoundInf] == 1.0);
  CHECK(f[kGlobalUpperBound] == 0.0);
  CHECK(f[kNodeDepth] == 0.0);
  CHECK(f[kPlungeDepth] == 0.0);
  CHECK(f[kRelativeDepth] == 0.0);
  CHECK(f[kTypeLeaf] == 1.0);
  CHECK(f[kBranchVarPrioDown] == 0.0);
  CHECK(f[kBranchVarPrioUp] == 0.0);
  // bound equals the root bound; normalization guards small magnitudes
  const double denom = std::max(std::abs(tree.root_bound), 1.0);
  CHECK(f[kLowerBound] == doctest::Approx(tree.root_bound / denom));
}

TEST_CASE("node with bound equal to the global lower bound") {
  Fixture fx;
  fx.tree.nodes[3].bound = 10.2;  // becomes the frontier minimum
  const auto f = extract(fx.tree, fx.tree.nodes[3]);
  CHECK(f[kRelativeBound] == 0.0);
}

TEST_CASE("extraction requires a solved root") {
  const auto inst = two_var_instance();
  SearchTree tree(inst);
  BnbNode node;
  CHECK_THROWS_AS(extract(tree, node), MissingRootBound);
}

TEST_CASE("guarded denominators never produce NaN or infinity") {
  Fixture fx;
  Rng rng(8080);
  for (int trial = 0; trial < 5000; ++trial) {
    fx.tree.incumbent_set = rng.bernoulli(0.5);
    fx.tree.incumbent_value = rng.bernoulli(0.3) ? fx.tree.nodes[3].bound
                                                 : rng.uniform(-20.0, 20.0);
    fx.tree.root_bound = rng.bernoulli(0.3) ? 0.0 : rng.uniform(-15.0, 15.0);
    fx.tree.nodes[2].bound = rng.uniform(-20.0, 20.0);
    fx.tree.nodes[3].bound = fx.tree.incumbent_value;  // zero-gap case
    fx.tree.max_depth = rng.uniform_int(0, 4);
    for (const int id : fx.tree.frontier) {
      const auto f = extract(fx.tree, fx.tree.nodes[static_cast<size_t>(id)]);
      for (const double v : f) REQUIRE(std::isfinite(v));
    }
  }
}

TEST_CASE("feature extraction is finite and stable throughout real solves") {
  // Odd-cycle covering rows make the root LP fractional (all x = 1/2), so
  // the solve genuinely branches and the frontier grows.
  MilpInstance inst;
  inst.name = "cover";
  inst.n = 7;
  inst.p = 7;
  for (int j = 0; j < 7; ++j) {
    inst.c.push_back(1.0 + 0.1 * static_cast<double>(j % 3));
    inst.lo.push_back(0.0);
    inst.hi.push_back(1.0);
  }
  for (int j = 0; j < 7; ++j) {
    SparseRow row;
    row.coeffs = {{j, -1.0}, {(j + 1) % 7, -1.0}};
    row.rhs = -1.0;
    inst.rows.push_back(std::move(row));
  }

  long checked = 0;
  auto hook = [&](const SearchTree& tree, const BnbNode& a, const BnbNode& b,
                  int) {
    const auto fa = extract(tree, a);
    const auto fb = extract(tree, b);
    for (const double v : fa) REQUIRE(std::isfinite(v));
    for (const double v : fb) REQUIRE(std::isfinite(v));
    REQUIRE(extract(tree, a) == fa);  // bit-identical on the same state
    const auto pair = pair_features(fa, fb);
    for (size_t i = 0; i < 20; ++i) {
      REQUIRE(pair[i] == fa[i]);
      REQUIRE(pair[i + 20] == fb[i]);
    }
    ++checked;
  };
  DfsComparator dfs;
  const auto res = solve(inst, dfs, {}, hook);
  CHECK(res.stats.status == SolveStatus::Optimal);
  CHECK(checked > 0);
}

TEST_CASE("pair layout swap symmetry") {
  Fixture fx;
  const auto a = extract(fx.tree, fx.tree.nodes[2]);
  const auto b = extract(fx.tree, fx.tree.nodes[3]);
  const auto ab = pair_features(a, b);
  const auto ba = pair_features(b, a);
  for (size_t i = 0; i < 20; ++i) {
    CHECK(ab[i] == ba[i + 20]);
    CHECK(ab[i + 20] == ba[i]);
  }
}
