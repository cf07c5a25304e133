#ifndef SYMBSEL_EXPERT_HPP_
#define SYMBSEL_EXPERT_HPP_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "symbsel/bnb.hpp"
#include "symbsel/dataset.hpp"

namespace symbsel {

struct InfeasibleInstance : MilpError {
  using MilpError::MilpError;
};
struct InstanceRejected : MilpError {
  using MilpError::MilpError;
};

struct OptimalSolveResult {
  std::vector<double> x;
  double value = 0.0;
  SolveStats stats;
};

/// Exact optimum via best-first search; the zero final gap is the
/// certificate. Throws InfeasibleInstance, or InstanceRejected when a
/// positive node limit fires first.
OptimalSolveResult solve_to_optimal(const MilpInstance& inst,
                                    long node_limit = -1);

/// Solution-aware preference between two open nodes: prefer the node whose
/// local bounds contain the optimum; both contained -> the deeper; neither
/// -> the better estimate; remaining ties -> the lower node id.
int plunger_decide(const SearchTree& tree, std::span<const double> x_opt,
                   const BnbNode& a, const BnbNode& b);

class ExpertComparator : public NodeComparator {
 public:
  explicit ExpertComparator(std::vector<double> x_opt)
      : x_opt_(std::move(x_opt)) {}
  int compare(const SearchTree& tree, const BnbNode& a,
              const BnbNode& b) const override {
    return plunger_decide(tree, x_opt_, a, b);
  }
  std::string name() const override { return "expert"; }

 private:
  std::vector<double> x_opt_;
};

struct CollectOptions {
  long solve_node_limit = 200000;    // cap for the certification solve
  long collect_node_limit = 200000;  // cap for the recorded expert run
  int jobs = 1;
  std::string split = "train";
};

struct CollectResult {
  Dataset dataset;
  // per instance id: recorded sample count (solved instances, in order)
  std::vector<std::pair<std::string, long>> per_instance;
  std::vector<std::string> rejected;  // skipped-and-logged instance ids
};

/// Runs the optimal plunger on every instance and records one sample per
/// pairwise comparison made by node selection.
CollectResult collect(
    const std::vector<std::pair<std::string, MilpInstance>>& instances,
    const CollectOptions& opts = {});

}  // namespace symbsel

#endif  // SYMBSEL_EXPERT_HPP_
