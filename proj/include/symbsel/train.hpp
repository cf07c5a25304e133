#ifndef SYMBSEL_TRAIN_HPP_
#define SYMBSEL_TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "symbsel/dataset.hpp"
#include "symbsel/expr.hpp"
#include "symbsel/policy.hpp"

namespace symbsel {

struct TrainerConfig {
  int batch_size = 500;           // expressions sampled per iteration
  int iterations = 300;
  double risk_factor = 0.2;       // top quantile kept for the update
  double ppo_clip = 0.2;
  double learning_rate = 5e-5;
  double entropy_weight = 0.005;  // w_H
  double entropy_gamma = 0.9;     // per-step decay of the entropy bonus
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  int hall_of_fame_size = 10;
  int reward_subsample = 20000;   // per-iteration reward sample cap
  double early_stop_reward = 1.0; // stop once full-data train reward reaches this
  int jobs = 1;

  void validate() const;  // throws ExprError on out-of-range fields
};

/// Behavioral-cloning accuracy of an expression over (a subset of) the
/// dataset: the fraction of samples whose pair_decision matches the label.
double compute_reward(const ExprTree& tree, const TokenLibrary& lib,
                      const Dataset& data,
                      std::span<const int> subset = {});

struct RiskFilterResult {
  std::vector<int> kept;  // ascending indices with reward >= quantile
  double quantile = 0.0;  // empirical (1 - eps) quantile of the batch
};

RiskFilterResult risk_filter(std::span<const double> rewards, double eps);

/// Mean over the batch of sum_t gamma^t H_t.
double hierarchical_entropy(
    const std::vector<std::vector<double>>& entropy_traces, double gamma);

struct SampleRecord {
  std::vector<int> tokens;
  double old_log_likelihood = 0.0;
  double reward = 0.0;
};

struct PpoResult {
  double loss = 0.0;       // -(surrogate + w_H * entropy term)
  double surrogate = 0.0;  // mean over kept of q_clip * advantage
  double entropy = 0.0;    // mean over kept of the hierarchical entropy
};

/// Clipped-surrogate loss and gradient over the kept samples. Samples
/// outside `kept` contribute nothing, including zero gradient.
PpoResult ppo_loss_and_grad(const PolicyNet& net, const TokenLibrary& lib,
                            std::span<const SampleRecord> batch,
                            std::span<const int> kept, double quantile,
                            const TrainerConfig& cfg, std::span<double> grad);

struct AdamState {
  std::vector<double> m, v;
  long t = 0;
  explicit AdamState(size_t n) : m(n, 0.0), v(n, 0.0) {}
  void update(std::vector<double>& params, std::span<const double> grad,
              const TrainerConfig& cfg);
};

struct IterationRecord {
  int iteration = 0;
  double best_reward = 0.0;   // best batch reward this iteration
  double mean_reward = 0.0;
  double quantile = 0.0;
  double entropy = 0.0;       // batch-mean hierarchical entropy at sampling
  double loss = 0.0;
  double best_val = 0.0;      // running best validation reward (monotone)
};

struct HallOfFameEntry {
  std::vector<int> tokens;
  double train_reward = 0.0;  // always on the full training set
};

struct TrainResult {
  std::vector<int> best_tokens;
  double best_val_reward = 0.0;
  double best_train_reward = 0.0;
  std::vector<IterationRecord> history;
  std::vector<HallOfFameEntry> hall_of_fame;
};

using CheckpointFn = std::function<void(int iteration, const PolicyNet&)>;

/// Risk-seeking PPO over sampled expressions; returns the hall-of-fame
/// entry with the highest validation reward.
TrainResult train(PolicyNet& net, const TokenLibrary& lib,
                  const Dataset& train_data, const Dataset& val_data,
                  const TrainerConfig& cfg,
                  const CheckpointFn& checkpoint = nullptr,
                  int checkpoint_every = 0);

void write_training_log(const std::string& path,
                        const std::vector<IterationRecord>& history);

}  // namespace symbsel

#endif  // SYMBSEL_TRAIN_HPP_
