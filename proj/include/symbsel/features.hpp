#ifndef SYMBSEL_FEATURES_HPP_
#define SYMBSEL_FEATURES_HPP_

#include <array>
#include <string>
#include <vector>

#include "symbsel/bnb.hpp"

namespace symbsel {

struct MissingRootBound : MilpError {
  using MilpError::MilpError;
};

using NodeFeatures = std::array<double, 20>;
using PairFeatures = std::array<double, 40>;

// Row indices (0-based) of the 20-entry per-node feature vector.
enum FeatureIndex : int {
  kGapInf = 0,
  kGap = 1,
  kGlobalUpperBoundInf = 2,
  kGlobalUpperBound = 3,
  kPlungeDepth = 4,
  kRelativeDepth = 5,
  kLowerBound = 6,
  kEstimate = 7,
  kRelativeBound = 8,
  kTypeSibling = 9,
  kTypeChild = 10,
  kTypeLeaf = 11,
  kBranchVarBoundLpDiff = 12,
  kBranchVarRootLpDiff = 13,
  kBranchVarPrioDown = 14,
  kBranchVarPrioUp = 15,
  kBranchVarPseudocost = 16,
  kBranchVarInf = 17,
  kNodeDepth = 18,
  kMaxDepth = 19,
};

/// Canonical index-to-name map, emitted in dataset headers.
const std::vector<std::string>& feature_names();

/// Per-node feature vector over the current tree state. All entries are
/// finite; infinite-bound situations set the companion INF flag instead.
NodeFeatures extract(const SearchTree& tree, const BnbNode& node);

/// node1 features in x1..x20, node2 features in x21..x40.
PairFeatures pair_features(const NodeFeatures& node1,
                           const NodeFeatures& node2);

}  // namespace symbsel

#endif  // SYMBSEL_FEATURES_HPP_
