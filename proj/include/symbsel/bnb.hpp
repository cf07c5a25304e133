#ifndef SYMBSEL_BNB_HPP_
#define SYMBSEL_BNB_HPP_

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "symbsel/expr.hpp"
#include "symbsel/milp.hpp"
#include "symbsel/simplex.hpp"

namespace symbsel {

struct EmptyFrontier : MilpError {
  using MilpError::MilpError;
};
struct NoFractionalVariable : MilpError {
  using MilpError::MilpError;
};

struct BnbTolerances {
  double integrality = 1e-6;
  double bound_prune = 1e-9;
  double propagation = 1e-7;
};

enum class BranchDir { None, Down, Up };

enum class NodeFate {
  Open,
  Expanded,       // branched into children
  IntegralLeaf,   // own LP integral
  BoundPruned,    // own LP bound >= incumbent
  Infeasible,     // own LP or propagation infeasible
  FrontierPruned, // removed by an incumbent sweep without being focused
  Abandoned       // left open when a node limit fired
};

struct BoundDelta {
  int var = 0;
  bool is_upper = false;
  double value = 0.0;
};

struct BnbNode {
  int id = 0;
  int parent_id = -1;
  int depth = 0;
  std::vector<BoundDelta> deltas;  // tightenings relative to the parent
  double bound = 0.0;              // lower bound (parent LP obj until solved)
  double parent_lp_obj = 0.0;
  int branch_var = -1;
  BranchDir branch_dir = BranchDir::None;
  double branch_parent_value = 0.0;  // LP value of branch_var in the parent
  double branch_new_bound = 0.0;
  // fractional (var, value) of the reference LP solution: the parent's,
  // excluding the branched variable, until the node solves its own LP
  std::vector<std::pair<int, double>> frac_ref;
  bool has_own_lp = false;
  bool propagation_infeasible = false;
  NodeFate fate = NodeFate::Open;

  double branch_frac() const {
    return branch_parent_value - std::floor(branch_parent_value);
  }
};

struct DirectionStat {
  std::vector<double> sum;
  std::vector<long> count;
  void init(int n) {
    sum.assign(static_cast<size_t>(n), 0.0);
    count.assign(static_cast<size_t>(n), 0);
  }
  void add(int var, double value) {
    sum[static_cast<size_t>(var)] += value;
    count[static_cast<size_t>(var)] += 1;
  }
  bool observed(int var) const { return count[static_cast<size_t>(var)] > 0; }
  double average(int var, double fallback) const {
    return observed(var)
               ? sum[static_cast<size_t>(var)] /
                     static_cast<double>(count[static_cast<size_t>(var)])
               : fallback;
  }
};

struct SolveEvent {
  long node = 0;
  double primal = 0.0;
  double dual = 0.0;
};

enum class SolveStatus { Optimal, NodeLimitReached, Infeasible };

struct SolveStats {
  SolveStatus status = SolveStatus::Optimal;
  long nodes = 0;        // processed (focused) nodes
  long lp_solves = 0;
  long decisions = 0;    // select_node calls
  long comparisons = 0;  // pairwise comparator invocations
  double pd_integral = 0.0;
  double final_gap = 0.0;
  bool has_incumbent = false;
  double incumbent_value = std::numeric_limits<double>::infinity();
  int max_depth = 0;
};

struct BnbLimits {
  long node_limit = -1;  // < 0 means unlimited
};

class SearchTree;

/// Pairwise node comparator following the node-pair convention:
/// compare() returns kPreferNode1 to keep a (the champion) or kPreferNode2
/// to switch to b (the challenger).
class NodeComparator {
 public:
  virtual ~NodeComparator() = default;
  virtual int compare(const SearchTree& tree, const BnbNode& a,
                      const BnbNode& b) const = 0;
  virtual std::string name() const = 0;
};

using ComparisonHook =
    std::function<void(const SearchTree&, const BnbNode& champion,
                       const BnbNode& challenger, int decision)>;

/// Mutable state of one branch-and-bound run. Members are public for
/// comparators, feature extraction and tests; only the solve loop mutates.
class SearchTree {
 public:
  explicit SearchTree(const MilpInstance& instance, BnbTolerances tol = {});

  const MilpInstance* inst;
  SimplexSolver lp;
  BnbTolerances tol;

  std::vector<BnbNode> nodes;
  std::vector<int> frontier;

  bool incumbent_set = false;
  double incumbent_value = std::numeric_limits<double>::infinity();
  std::vector<double> incumbent_x;

  bool root_solved = false;
  double root_bound = 0.0;
  std::vector<double> root_lp_x;
  double primal_cap = 0.0;  // primal placeholder before the first incumbent

  DirectionStat pc_down_stat, pc_up_stat;    // unit objective gains
  DirectionStat inf_down_stat, inf_up_stat;  // propagation tightening counts

  int last_expanded = -1;
  int plunge_depth = 0;
  int max_depth = 0;

  std::vector<SolveEvent> events;
  long processed = 0;
  long lp_solves = 0;
  long decisions = 0;
  long comparisons = 0;

  // --- operations ---------------------------------------------------------

  /// Solves the root LP; on optimal-and-integral sets the incumbent, else
  /// places the root on the frontier. Counts the root as processed.
  void initialize_root();

  bool finished() const { return frontier.empty(); }

  /// Champion scan over the frontier; removes and returns the winner's id.
  int select_node(const NodeComparator& cmp, const ComparisonHook& hook = {});

  /// Processes a selected node: LP, prune/incumbent checks, branching.
  void expand(int id);

  /// Two children tightened around the branching variable, with a bound
  /// propagation pass feeding the inference statistics.
  std::pair<int, int> branch(int id, const LpResult& lp_result);

  /// LP bound plus pseudocost-predicted cost of restoring integrality.
  double estimate_score(const BnbNode& node) const;

  double pc_down(int var) const;  // |c_var| fallback until observed
  double pc_up(int var) const;
  double inference_avg(int var, BranchDir dir) const;  // 0 until observed

  void node_bounds(const BnbNode& node, std::vector<double>& lo,
                   std::vector<double>& hi) const;
  bool node_contains(const BnbNode& node, std::span<const double> x) const;

  double global_lower_bound() const;

  void record_event();

 private:
  void set_incumbent(const LpResult& lp_result);
  void prune_frontier();
  bool propagate(std::vector<double>& lo, std::vector<double>& hi,
                 std::vector<BoundDelta>& extra, int& tightenings) const;
};

struct BnbResult {
  SolveStats stats;
  std::vector<double> incumbent;  // empty when none was found
};

BnbResult solve(const MilpInstance& inst, const NodeComparator& cmp,
                const BnbLimits& limits = {}, const ComparisonHook& hook = {},
                SearchTree* keep_tree = nullptr);

// --- built-in comparators ---------------------------------------------------

class DfsComparator : public NodeComparator {
 public:
  int compare(const SearchTree&, const BnbNode& a,
              const BnbNode& b) const override;
  std::string name() const override { return "dfs"; }
};

class BfsComparator : public NodeComparator {
 public:
  int compare(const SearchTree&, const BnbNode& a,
              const BnbNode& b) const override;
  std::string name() const override { return "bfs"; }
};

class BestFirstComparator : public NodeComparator {
 public:
  int compare(const SearchTree&, const BnbNode& a,
              const BnbNode& b) const override;
  std::string name() const override { return "bestfirst"; }
};

class EstimateComparator : public NodeComparator {
 public:
  int compare(const SearchTree& tree, const BnbNode& a,
              const BnbNode& b) const override;
  std::string name() const override { return "estimate"; }
};

/// Learned (or constant) expression deployed as the node comparator.
class ExpressionComparator : public NodeComparator {
 public:
  ExpressionComparator(ExprTree tree, TokenLibrary lib, std::string label);
  int compare(const SearchTree& tree, const BnbNode& a,
              const BnbNode& b) const override;
  std::string name() const override { return label_; }

 private:
  ExprTree expr_;
  TokenLibrary lib_;
  std::string label_;
};

}  // namespace symbsel

#endif  // SYMBSEL_BNB_HPP_
