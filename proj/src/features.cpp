#include "symbsel/features.hpp"

#include <cmath>

namespace symbsel {

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = {
      "GAPINF",
      "GAP",
      "GLOBALUPPERBOUNDINF",
      "GLOBALUPPERBOUND",
      "PLUNGEDEPTH",
      "RELATIVEDEPTH",
      "LOWERBOUND",
      "ESTIMATE",
      "RELATIVEBOUND",
      "NODE_TYPE_SIBLING",
      "NODE_TYPE_CHILD",
      "NODE_TYPE_LEAF",
      "BRANCHVAR_BOUNDLPDIFF",
      "BRANCHVAR_ROOTLPDIFF",
      "BRANCHVAR_PRIO_DOWN",
      "BRANCHVAR_PRIO_UP",
      "BRANCHVAR_PSEUDOCOST",
      "BRANCHVAR_INF",
      "NODE_DEPTH",
      "MAXDEPTH",
  };
  return names;
}

NodeFeatures extract(const SearchTree& tree, const BnbNode& node) {
  if (!tree.root_solved) {
    throw MissingRootBound("feature extraction before the root LP is solved");
  }
  NodeFeatures f{};
  const double glb = tree.global_lower_bound();
  const bool gub_inf = !tree.incumbent_set;
  const double root_denom = std::max(std::abs(tree.root_bound), 1.0);

  const bool gap_inf = gub_inf || std::abs(glb) < 1e-9;
  f[kGapInf] = gap_inf ? 1.0 : 0.0;
  f[kGap] = gap_inf ? 0.0 : (tree.incumbent_value - glb) / std::abs(glb);

  f[kGlobalUpperBoundInf] = gub_inf ? 1.0 : 0.0;
  f[kGlobalUpperBound] = gub_inf ? 0.0 : tree.incumbent_value / root_denom;

  f[kPlungeDepth] = static_cast<double>(tree.plunge_depth);
  f[kRelativeDepth] =
      tree.max_depth > 0
          ? static_cast<double>(node.depth) / static_cast<double>(tree.max_depth)
          : 0.0;
  f[kLowerBound] = node.bound / root_denom;
  f[kEstimate] = tree.estimate_score(node);

  const double abs_gap = gub_inf ? 0.0 : tree.incumbent_value - glb;
  f[kRelativeBound] = (gub_inf || abs_gap < 1e-9)
                          ? 0.0
                          : (node.bound - glb) / abs_gap;

  // relation to the last expanded node: its child, its sibling, or a leaf
  const int last = tree.last_expanded;
  const int last_parent =
      last >= 0 ? tree.nodes[static_cast<size_t>(last)].parent_id : -2;
  if (last >= 0 && node.parent_id == last) {
    f[kTypeChild] = 1.0;
  } else if (last >= 0 && node.parent_id >= 0 &&
             node.parent_id == last_parent) {
    f[kTypeSibling] = 1.0;
  } else {
    f[kTypeLeaf] = 1.0;
  }

  if (node.branch_var >= 0) {
    f[kBranchVarBoundLpDiff] = node.branch_new_bound - node.branch_parent_value;
    f[kBranchVarRootLpDiff] =
        tree.root_lp_x[static_cast<size_t>(node.branch_var)] -
        node.branch_parent_value;
    f[kBranchVarPrioDown] = node.branch_dir == BranchDir::Down ? 1.0 : 0.0;
    f[kBranchVarPrioUp] = node.branch_dir == BranchDir::Up ? 1.0 : 0.0;
    const double frac = node.branch_frac();
    f[kBranchVarPseudocost] =
        node.branch_dir == BranchDir::Down
            ? tree.pc_down(node.branch_var) * frac
            : tree.pc_up(node.branch_var) * (1.0 - frac);
    f[kBranchVarInf] = tree.inference_avg(node.branch_var, node.branch_dir);
  }

  f[kNodeDepth] = static_cast<double>(node.depth);
  f[kMaxDepth] = static_cast<double>(tree.max_depth);
  return f;
}

PairFeatures pair_features(const NodeFeatures& node1,
                           const NodeFeatures& node2) {
  PairFeatures out{};
  for (size_t i = 0; i < node1.size(); ++i) {
    out[i] = node1[i];
    out[i + 20] = node2[i];
  }
  return out;
}

}  // namespace symbsel
