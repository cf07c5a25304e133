#include "symbsel/expert.hpp"

#include <algorithm>

#include "symbsel/features.hpp"
#include "symbsel/parallel.hpp"

namespace symbsel {

OptimalSolveResult solve_to_optimal(const MilpInstance& inst,
                                    long node_limit) {
  BestFirstComparator cmp;
  BnbLimits limits;
  limits.node_limit = node_limit;
  const auto res = solve(inst, cmp, limits);
  if (res.stats.status == SolveStatus::Infeasible) {
    throw InfeasibleInstance(inst.name + ": no feasible solution exists");
  }
  if (res.stats.status == SolveStatus::NodeLimitReached) {
    throw InstanceRejected(inst.name +
                           ": node limit reached before certification");
  }
  if (res.stats.final_gap > 1e-6) {
    throw InstanceRejected(inst.name + ": nonzero final gap");
  }
  OptimalSolveResult out;
  out.x = res.incumbent;
  out.value = res.stats.incumbent_value;
  out.stats = res.stats;
  return out;
}

int plunger_decide(const SearchTree& tree, std::span<const double> x_opt,
                   const BnbNode& a, const BnbNode& b) {
  const bool in_a = tree.node_contains(a, x_opt);
  const bool in_b = tree.node_contains(b, x_opt);
  if (in_a != in_b) return in_a ? kPreferNode1 : kPreferNode2;
  if (in_a) {
    if (b.depth != a.depth) {
      return b.depth > a.depth ? kPreferNode2 : kPreferNode1;
    }
    return b.id < a.id ? kPreferNode2 : kPreferNode1;
  }
  const double ea = tree.estimate_score(a);
  const double eb = tree.estimate_score(b);
  if (eb != ea) return eb < ea ? kPreferNode2 : kPreferNode1;
  return b.id < a.id ? kPreferNode2 : kPreferNode1;
}

CollectResult collect(
    const std::vector<std::pair<std::string, MilpInstance>>& instances,
    const CollectOptions& opts) {
  struct PerInstance {
    std::vector<BehaviorSample> samples;
    bool rejected = false;
    std::string reason;
  };
  std::vector<PerInstance> buffers(instances.size());

  parallel_for(instances.size(), opts.jobs, [&](size_t i) {
    const auto& [id, inst] = instances[i];
    PerInstance& buf = buffers[i];
    try {
      const auto opt = solve_to_optimal(inst, opts.solve_node_limit);
      ExpertComparator expert(opt.x);
      int step = 0;
      auto hook = [&](const SearchTree& tree, const BnbNode& champ,
                      const BnbNode& chall, int decision) {
        const auto pf =
            pair_features(extract(tree, champ), extract(tree, chall));
        BehaviorSample s;
        s.features.assign(pf.begin(), pf.end());
        s.decision = decision;
        s.instance_id = id;
        s.step = step++;
        buf.samples.push_back(std::move(s));
      };
      BnbLimits limits;
      limits.node_limit = opts.collect_node_limit;
      const auto res = solve(inst, expert, limits, hook);
      if (res.stats.status == SolveStatus::NodeLimitReached) {
        buf.rejected = true;
        buf.reason = "node limit during collection";
        buf.samples.clear();
      }
    } catch (const MilpError& e) {
      buf.rejected = true;
      buf.reason = e.what();
      buf.samples.clear();
    }
  });

  CollectResult out;
  out.dataset.split = opts.split;
  out.dataset.feature_names = feature_names();
  std::vector<std::string> solved_ids;
  for (size_t i = 0; i < instances.size(); ++i) {
    if (buffers[i].rejected) {
      out.rejected.push_back(instances[i].first);
      continue;
    }
    solved_ids.push_back(instances[i].first);
    out.per_instance.emplace_back(
        instances[i].first, static_cast<long>(buffers[i].samples.size()));
    for (auto& s : buffers[i].samples) {
      out.dataset.samples.push_back(std::move(s));
    }
  }
  out.dataset.instance_list_hash = hash_instance_ids(solved_ids);
  return out;
}

}  // namespace symbsel
