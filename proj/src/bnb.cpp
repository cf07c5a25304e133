#include "symbsel/bnb.hpp"

#include <algorithm>
#include <cmath>

#include "symbsel/features.hpp"

namespace symbsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_integral(double v, double tol) {
  return std::abs(v - std::round(v)) <= tol;
}

}  // namespace

SearchTree::SearchTree(const MilpInstance& instance, BnbTolerances tolerances)
    : inst(&instance), lp(instance), tol(tolerances) {
  instance.validate();
  pc_down_stat.init(instance.n);
  pc_up_stat.init(instance.n);
  inf_down_stat.init(instance.n);
  inf_up_stat.init(instance.n);
}

void SearchTree::initialize_root() {
  if (root_solved || !nodes.empty()) throw MilpError("root already set up");
  BnbNode root;
  root.id = 0;
  root.parent_id = -1;
  root.depth = 0;
  nodes.push_back(root);

  const LpResult res = lp.solve(inst->lo, inst->hi);
  ++lp_solves;
  ++processed;
  if (res.status == LpStatus::Infeasible) {
    nodes[0].fate = NodeFate::Infeasible;
    return;
  }
  if (res.status == LpStatus::Unbounded) {
    throw MilpError(inst->name + ": LP relaxation is unbounded");
  }
  root_solved = true;
  root_bound = res.objective;
  root_lp_x = res.x;
  primal_cap = root_bound + std::abs(root_bound) + 1.0;

  nodes[0].bound = res.objective;
  nodes[0].parent_lp_obj = res.objective;
  nodes[0].has_own_lp = true;
  for (int j = 0; j < inst->p; ++j) {
    const double v = res.x[static_cast<size_t>(j)];
    if (!is_integral(v, tol.integrality)) {
      nodes[0].frac_ref.emplace_back(j, v);
    }
  }
  if (nodes[0].frac_ref.empty()) {
    set_incumbent(res);
    nodes[0].fate = NodeFate::IntegralLeaf;
  } else {
    frontier.push_back(0);
  }
  record_event();
}

int SearchTree::select_node(const NodeComparator& cmp,
                            const ComparisonHook& hook) {
  if (frontier.empty()) throw EmptyFrontier("select on an empty frontier");
  size_t champ_pos = 0;
  for (size_t i = 1; i < frontier.size(); ++i) {
    const BnbNode& champion = nodes[static_cast<size_t>(frontier[champ_pos])];
    const BnbNode& challenger = nodes[static_cast<size_t>(frontier[i])];
    const int decision = cmp.compare(*this, champion, challenger);
    ++comparisons;
    if (hook) hook(*this, champion, challenger, decision);
    if (decision == kPreferNode2) champ_pos = i;
  }
  ++decisions;
  const int id = frontier[champ_pos];
  frontier.erase(frontier.begin() + static_cast<ptrdiff_t>(champ_pos));
  return id;
}

void SearchTree::expand(int id) {
  BnbNode& node = nodes[static_cast<size_t>(id)];

  plunge_depth = (node.parent_id == last_expanded) ? plunge_depth + 1 : 0;
  last_expanded = id;

  if (id != 0) ++processed;

  if (node.propagation_infeasible) {
    node.fate = NodeFate::Infeasible;
    record_event();
    return;
  }

  if (!node.has_own_lp) {
    std::vector<double> lo, hi;
    node_bounds(node, lo, hi);
    const LpResult res = lp.solve(lo, hi);
    ++lp_solves;

    // pseudocost observation: objective degradation per unit bound change
    if (res.status == LpStatus::Optimal && node.branch_var >= 0) {
      const double gain = std::max(0.0, res.objective - node.parent_lp_obj);
      const double f = node.branch_frac();
      if (node.branch_dir == BranchDir::Down && f > tol.integrality) {
        pc_down_stat.add(node.branch_var, gain / f);
      } else if (node.branch_dir == BranchDir::Up &&
                 1.0 - f > tol.integrality) {
        pc_up_stat.add(node.branch_var, gain / (1.0 - f));
      }
    }

    if (res.status == LpStatus::Infeasible) {
      node.fate = NodeFate::Infeasible;
      record_event();
      return;
    }
    if (res.status == LpStatus::Unbounded) {
      throw MilpError(inst->name + ": node LP is unbounded");
    }
    node.bound = std::max(node.bound, res.objective);
    node.has_own_lp = true;
    node.frac_ref.clear();
    for (int j = 0; j < inst->p; ++j) {
      if (!is_integral(res.x[static_cast<size_t>(j)], tol.integrality)) {
        node.frac_ref.emplace_back(j, res.x[static_cast<size_t>(j)]);
      }
    }

    if (incumbent_set && node.bound >= incumbent_value - tol.bound_prune) {
      node.fate = NodeFate::BoundPruned;
      record_event();
      return;
    }
    if (node.frac_ref.empty()) {
      set_incumbent(res);
      node.fate = NodeFate::IntegralLeaf;
      prune_frontier();
      record_event();
      return;
    }
    branch(id, res);
    record_event();
    return;
  }

  // Root (or a node whose LP is already solved): prune/branch directly.
  if (incumbent_set && node.bound >= incumbent_value - tol.bound_prune) {
    node.fate = NodeFate::BoundPruned;
    record_event();
    return;
  }
  if (node.frac_ref.empty()) {
    node.fate = NodeFate::IntegralLeaf;
    record_event();
    return;
  }
  std::vector<double> lo, hi;
  node_bounds(node, lo, hi);
  LpResult res;
  res.status = LpStatus::Optimal;
  res.objective = node.bound;
  res.x = id == 0 ? root_lp_x : std::vector<double>{};
  if (res.x.empty()) {
    res = lp.solve(lo, hi);
    ++lp_solves;
  }
  branch(id, res);
  record_event();
}

std::pair<int, int> SearchTree::branch(int id, const LpResult& lp_result) {
  const BnbNode parent = nodes[static_cast<size_t>(id)];  // copy: we push_back
  std::vector<std::pair<int, double>> fractional;
  for (int j = 0; j < inst->p; ++j) {
    if (!is_integral(lp_result.x[static_cast<size_t>(j)], tol.integrality)) {
      fractional.emplace_back(j, lp_result.x[static_cast<size_t>(j)]);
    }
  }
  if (fractional.empty()) {
    throw NoFractionalVariable(inst->name +
                               ": branch called on an integral LP solution");
  }

  // Pseudocost branching with reliability threshold 1: while any fractional
  // variable lacks observations in either direction, pick the most
  // fractional among those; otherwise the best pseudocost product score.
  int chosen = -1;
  double chosen_value = 0.0;
  double best = -1.0;
  bool have_unreliable = false;
  for (const auto& [var, value] : fractional) {
    if (!(pc_down_stat.observed(var) && pc_up_stat.observed(var))) {
      have_unreliable = true;
      break;
    }
  }
  for (const auto& [var, value] : fractional) {
    const double f = value - std::floor(value);
    double score = 0.0;
    if (have_unreliable) {
      if (pc_down_stat.observed(var) && pc_up_stat.observed(var)) continue;
      score = std::min(f, 1.0 - f);
    } else {
      score = std::max(pc_down(var) * f, 1e-6) *
              std::max(pc_up(var) * (1.0 - f), 1e-6);
    }
    if (score > best) {
      best = score;
      chosen = var;
      chosen_value = value;
    }
  }

  const double floor_v = std::floor(chosen_value);
  auto make_child = [&](BranchDir dir) {
    BnbNode child;
    child.id = static_cast<int>(nodes.size());
    child.parent_id = id;
    child.depth = parent.depth + 1;
    child.bound = std::max(parent.bound, lp_result.objective);
    child.parent_lp_obj = lp_result.objective;
    child.branch_var = chosen;
    child.branch_dir = dir;
    child.branch_parent_value = chosen_value;
    child.branch_new_bound = dir == BranchDir::Down ? floor_v : floor_v + 1.0;
    child.deltas.push_back(BoundDelta{
        chosen, dir == BranchDir::Down, child.branch_new_bound});
    for (const auto& fv : fractional) {
      if (fv.first != chosen) child.frac_ref.push_back(fv);
    }

    std::vector<double> lo, hi;
    node_bounds(child, lo, hi);
    std::vector<BoundDelta> extra;
    int tightenings = 0;
    const bool feasible = propagate(lo, hi, extra, tightenings);
    for (const auto& d : extra) child.deltas.push_back(d);
    (dir == BranchDir::Down ? inf_down_stat : inf_up_stat)
        .add(chosen, static_cast<double>(tightenings));
    if (!feasible) child.propagation_infeasible = true;

    max_depth = std::max(max_depth, child.depth);
    nodes.push_back(child);
    frontier.push_back(child.id);
    return child.id;
  };

  const int down_id = make_child(BranchDir::Down);
  const int up_id = make_child(BranchDir::Up);
  nodes[static_cast<size_t>(id)].fate = NodeFate::Expanded;
  return {down_id, up_id};
}

double SearchTree::estimate_score(const BnbNode& node) const {
  double est = node.bound;
  if (!node.has_own_lp && node.branch_var >= 0) {
    const double f = node.branch_frac();
    est += node.branch_dir == BranchDir::Down ? pc_down(node.branch_var) * f
                                              : pc_up(node.branch_var) *
                                                    (1.0 - f);
  }
  for (const auto& [var, value] : node.frac_ref) {
    const double f = value - std::floor(value);
    est += std::min(pc_down(var) * f, pc_up(var) * (1.0 - f));
  }
  return est;
}

double SearchTree::pc_down(int var) const {
  return pc_down_stat.average(var,
                              std::abs(inst->c[static_cast<size_t>(var)]));
}

double SearchTree::pc_up(int var) const {
  return pc_up_stat.average(var, std::abs(inst->c[static_cast<size_t>(var)]));
}

double SearchTree::inference_avg(int var, BranchDir dir) const {
  if (var < 0 || dir == BranchDir::None) return 0.0;
  return (dir == BranchDir::Down ? inf_down_stat : inf_up_stat)
      .average(var, 0.0);
}

void SearchTree::node_bounds(const BnbNode& node, std::vector<double>& lo,
                             std::vector<double>& hi) const {
  lo = inst->lo;
  hi = inst->hi;
  // Walk via the node reference first: branch() asks about children that
  // are not yet stored in the node arena.
  const BnbNode* cur = &node;
  while (true) {
    for (const auto& d : cur->deltas) {
      if (d.is_upper) {
        hi[static_cast<size_t>(d.var)] =
            std::min(hi[static_cast<size_t>(d.var)], d.value);
      } else {
        lo[static_cast<size_t>(d.var)] =
            std::max(lo[static_cast<size_t>(d.var)], d.value);
      }
    }
    if (cur->parent_id < 0) break;
    cur = &nodes[static_cast<size_t>(cur->parent_id)];
  }
}

bool SearchTree::node_contains(const BnbNode& node,
                               std::span<const double> x) const {
  std::vector<double> lo, hi;
  node_bounds(node, lo, hi);
  for (int j = 0; j < inst->n; ++j) {
    if (x[static_cast<size_t>(j)] < lo[static_cast<size_t>(j)] - 1e-9 ||
        x[static_cast<size_t>(j)] > hi[static_cast<size_t>(j)] + 1e-9) {
      return false;
    }
  }
  return true;
}

double SearchTree::global_lower_bound() const {
  if (frontier.empty()) {
    return incumbent_set ? incumbent_value
                         : (root_solved ? root_bound : -kInf);
  }
  double lb = kInf;
  for (const int id : frontier) {
    lb = std::min(lb, nodes[static_cast<size_t>(id)].bound);
  }
  return lb;
}

void SearchTree::record_event() {
  SolveEvent e;
  e.node = processed;
  e.primal = incumbent_set ? incumbent_value : primal_cap;
  e.dual = global_lower_bound();
  events.push_back(e);
}

void SearchTree::set_incumbent(const LpResult& lp_result) {
  if (incumbent_set &&
      lp_result.objective >= incumbent_value - tol.bound_prune) {
    return;
  }
  incumbent_set = true;
  incumbent_value = lp_result.objective;
  incumbent_x = lp_result.x;
  for (int j = 0; j < inst->p; ++j) {
    incumbent_x[static_cast<size_t>(j)] =
        std::round(incumbent_x[static_cast<size_t>(j)]);
  }
}

void SearchTree::prune_frontier() {
  if (!incumbent_set) return;
  std::vector<int> survivors;
  survivors.reserve(frontier.size());
  for (const int id : frontier) {
    BnbNode& node = nodes[static_cast<size_t>(id)];
    if (node.bound >= incumbent_value - tol.bound_prune) {
      node.fate = NodeFate::FrontierPruned;
    } else {
      survivors.push_back(id);
    }
  }
  frontier = std::move(survivors);
}

bool SearchTree::propagate(std::vector<double>& lo, std::vector<double>& hi,
                           std::vector<BoundDelta>& extra,
                           int& tightenings) const {
  tightenings = 0;
  for (int round = 0; round < 3; ++round) {
    bool changed = false;
    for (const auto& row : inst->rows) {
      double minact = 0.0;
      for (const auto& [var, coef] : row.coeffs) {
        minact += coef > 0.0 ? coef * lo[static_cast<size_t>(var)]
                             : coef * hi[static_cast<size_t>(var)];
      }
      if (minact > row.rhs + tol.propagation) return false;
      const double slack = row.rhs - minact;
      for (const auto& [var, coef] : row.coeffs) {
        if (coef > 0.0) {
          double limit = lo[static_cast<size_t>(var)] + slack / coef;
          if (var < inst->p) limit = std::floor(limit + tol.integrality);
          if (limit < hi[static_cast<size_t>(var)] - 1e-9) {
            hi[static_cast<size_t>(var)] = limit;
            extra.push_back(BoundDelta{var, true, limit});
            ++tightenings;
            changed = true;
          }
        } else if (coef < 0.0) {
          double limit = hi[static_cast<size_t>(var)] + slack / coef;
          if (var < inst->p) limit = std::ceil(limit - tol.integrality);
          if (limit > lo[static_cast<size_t>(var)] + 1e-9) {
            lo[static_cast<size_t>(var)] = limit;
            extra.push_back(BoundDelta{var, false, limit});
            ++tightenings;
            changed = true;
          }
        }
        if (lo[static_cast<size_t>(var)] >
            hi[static_cast<size_t>(var)] + 1e-9) {
          return false;
        }
      }
    }
    if (!changed) break;
  }
  return true;
}

BnbResult solve(const MilpInstance& inst, const NodeComparator& cmp,
                const BnbLimits& limits, const ComparisonHook& hook,
                SearchTree* keep_tree) {
  SearchTree local(inst);
  SearchTree& tree = keep_tree ? *keep_tree : local;
  tree.initialize_root();

  SolveStatus status = SolveStatus::Optimal;
  while (!tree.finished()) {
    if (limits.node_limit > 0 && tree.processed >= limits.node_limit) {
      status = SolveStatus::NodeLimitReached;
      for (const int id : tree.frontier) {
        tree.nodes[static_cast<size_t>(id)].fate = NodeFate::Abandoned;
      }
      break;
    }
    const int id = tree.select_node(cmp, hook);
    tree.expand(id);
  }
  if (status == SolveStatus::Optimal && !tree.incumbent_set) {
    status = SolveStatus::Infeasible;
  }

  BnbResult out;
  out.stats.status = status;
  out.stats.nodes = tree.processed;
  out.stats.lp_solves = tree.lp_solves;
  out.stats.decisions = tree.decisions;
  out.stats.comparisons = tree.comparisons;
  out.stats.max_depth = tree.max_depth;
  out.stats.has_incumbent = tree.incumbent_set;
  out.stats.incumbent_value = tree.incumbent_value;
  double pdi = 0.0;
  for (const auto& e : tree.events) {
    pdi += std::max(0.0, e.primal - e.dual);
  }
  out.stats.pd_integral = pdi;
  if (tree.incumbent_set) {
    const double lb = tree.global_lower_bound();
    out.stats.final_gap = std::max(0.0, tree.incumbent_value - lb);
    out.incumbent = tree.incumbent_x;
  } else {
    out.stats.final_gap = kInf;
  }
  return out;
}

int DfsComparator::compare(const SearchTree&, const BnbNode& a,
                           const BnbNode& b) const {
  return b.depth > a.depth ? kPreferNode2 : kPreferNode1;
}

int BfsComparator::compare(const SearchTree&, const BnbNode& a,
                           const BnbNode& b) const {
  return b.depth < a.depth ? kPreferNode2 : kPreferNode1;
}

int BestFirstComparator::compare(const SearchTree&, const BnbNode& a,
                                 const BnbNode& b) const {
  return b.bound < a.bound ? kPreferNode2 : kPreferNode1;
}

int EstimateComparator::compare(const SearchTree& tree, const BnbNode& a,
                                const BnbNode& b) const {
  return tree.estimate_score(b) < tree.estimate_score(a) ? kPreferNode2
                                                         : kPreferNode1;
}

ExpressionComparator::ExpressionComparator(ExprTree tree, TokenLibrary lib,
                                           std::string label)
    : expr_(std::move(tree)), lib_(std::move(lib)), label_(std::move(label)) {}

int ExpressionComparator::compare(const SearchTree& tree, const BnbNode& a,
                                  const BnbNode& b) const {
  const auto pair = pair_features(extract(tree, a), extract(tree, b));
  return pair_decision(expr_, lib_, pair);
}

}  // namespace symbsel
