#ifndef SYMBSEL_DATASET_HPP_
#define SYMBSEL_DATASET_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "symbsel/expr.hpp"

namespace symbsel {

/// One recorded node-pair comparison: 40 features (node1 ⊕ node2) and the
/// expert decision (-1 prefers node 1, +1 prefers node 2).
struct BehaviorSample {
  std::vector<double> features;
  int decision = kPreferNode2;
  std::string instance_id;  // kept in memory; not part of the record line
  int step = 0;
};

struct Dataset {
  static constexpr int kFeatureWidth = 40;

  std::vector<BehaviorSample> samples;
  std::string split;                      // train | val | test
  std::vector<std::string> feature_names; // index-to-name map, 20 entries
  std::uint64_t instance_list_hash = 0;

  size_t size() const { return samples.size(); }
};

std::uint64_t hash_instance_ids(const std::vector<std::string>& ids);

/// Line-delimited records "d,x1,...,x40" after a '#'-prefixed header block.
void save_dataset(const std::string& path, const Dataset& data);
Dataset load_dataset(const std::string& path);

}  // namespace symbsel

#endif  // SYMBSEL_DATASET_HPP_
