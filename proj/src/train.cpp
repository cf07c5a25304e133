#include "symbsel/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "symbsel/parallel.hpp"
#include "symbsel/rng.hpp"

namespace symbsel {

void TrainerConfig::validate() const {
  if (batch_size < 2) throw ExprError("batch_size must be at least 2");
  if (iterations < 0) throw ExprError("iterations must be non-negative");
  if (!(risk_factor > 0.0 && risk_factor < 1.0)) {
    throw ExprError("risk_factor must lie in (0, 1)");
  }
  if (ppo_clip <= 0.0) throw ExprError("ppo_clip must be positive");
  if (learning_rate <= 0.0) throw ExprError("learning_rate must be positive");
  if (entropy_gamma < 0.0 || entropy_gamma > 1.0) {
    throw ExprError("entropy_gamma must lie in [0, 1]");
  }
  if (hall_of_fame_size < 1) throw ExprError("hall_of_fame_size must be >= 1");
  if (reward_subsample < 1) throw ExprError("reward_subsample must be >= 1");
  if (jobs < 1) throw ExprError("jobs must be >= 1");
}

double compute_reward(const ExprTree& tree, const TokenLibrary& lib,
                      const Dataset& data, std::span<const int> subset) {
  if (data.samples.empty()) throw ExprError("reward over an empty dataset");
  long hits = 0;
  long total = 0;
  auto score_one = [&](const BehaviorSample& s) {
    if (static_cast<int>(s.features.size()) != Dataset::kFeatureWidth) {
      throw DimensionMismatch("dataset sample is not 40-wide");
    }
    if (pair_decision(tree, lib, s.features) == s.decision) ++hits;
    ++total;
  };
  if (subset.empty()) {
    for (const auto& s : data.samples) score_one(s);
  } else {
    for (const int i : subset) score_one(data.samples[static_cast<size_t>(i)]);
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

RiskFilterResult risk_filter(std::span<const double> rewards, double eps) {
  if (rewards.empty()) throw ExprError("risk_filter over an empty batch");
  const int n = static_cast<int>(rewards.size());
  const int keep = std::max(
      1, static_cast<int>(std::ceil(eps * static_cast<double>(n))));
  std::vector<double> sorted(rewards.begin(), rewards.end());
  std::nth_element(sorted.begin(), sorted.begin() + (keep - 1), sorted.end(),
                   std::greater<double>());
  RiskFilterResult out;
  out.quantile = sorted[static_cast<size_t>(keep - 1)];
  for (int i = 0; i < n; ++i) {
    if (rewards[static_cast<size_t>(i)] >= out.quantile) {
      out.kept.push_back(i);
    }
  }
  return out;
}

double hierarchical_entropy(
    const std::vector<std::vector<double>>& entropy_traces, double gamma) {
  if (entropy_traces.empty()) return 0.0;
  double total = 0.0;
  for (const auto& trace : entropy_traces) {
    double w = 1.0;
    double h = 0.0;
    for (const double e : trace) {
      h += w * e;
      w *= gamma;
    }
    total += h;
  }
  return total / static_cast<double>(entropy_traces.size());
}

PpoResult ppo_loss_and_grad(const PolicyNet& net, const TokenLibrary& lib,
                            std::span<const SampleRecord> batch,
                            std::span<const int> kept, double quantile,
                            const TrainerConfig& cfg, std::span<double> grad) {
  PpoResult out;
  if (kept.empty()) return out;
  const double inv_n = 1.0 / static_cast<double>(kept.size());

  for (const int idx : kept) {
    const SampleRecord& rec = batch[static_cast<size_t>(idx)];
    SequenceForward fwd(net, lib, rec.tokens);
    const double q = std::exp(fwd.log_likelihood() - rec.old_log_likelihood);
    const double adv = rec.reward - quantile;
    const bool clip_hi = adv > 0.0 && q >= 1.0 + cfg.ppo_clip;
    const bool clip_lo = adv < 0.0 && q <= 1.0 - cfg.ppo_clip;
    const double q_clip =
        clip_hi ? 1.0 + cfg.ppo_clip : clip_lo ? 1.0 - cfg.ppo_clip : q;
    out.surrogate += q_clip * adv * inv_n;

    double gamma_t = 1.0;
    double ent = 0.0;
    std::vector<double> ent_coefs(fwd.step_entropies().size());
    for (size_t t = 0; t < ent_coefs.size(); ++t) {
      ent += gamma_t * fwd.step_entropies()[t];
      ent_coefs[t] = -cfg.entropy_weight * gamma_t * inv_n;
      gamma_t *= cfg.entropy_gamma;
    }
    out.entropy += ent * inv_n;

    // The clipped branch is constant in theta: only the entropy term flows.
    const double coef_ll = (clip_hi || clip_lo) ? 0.0 : -adv * q * inv_n;
    fwd.backward(coef_ll, ent_coefs, grad);
  }
  out.loss = -out.surrogate - cfg.entropy_weight * out.entropy;
  return out;
}

void AdamState::update(std::vector<double>& params,
                       std::span<const double> grad,
                       const TrainerConfig& cfg) {
  ++t;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(t));
  for (size_t i = 0; i < params.size(); ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
    v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
    const double mh = m[i] / corr1;
    const double vh = v[i] / corr2;
    params[i] -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.adam_eps);
  }
}

namespace {

// Deterministic ordering for hall-of-fame ties: higher reward, then shorter,
// then lexicographic token sequence.
bool hof_before(const HallOfFameEntry& a, const HallOfFameEntry& b) {
  if (a.train_reward != b.train_reward) return a.train_reward > b.train_reward;
  if (a.tokens.size() != b.tokens.size()) {
    return a.tokens.size() < b.tokens.size();
  }
  return a.tokens < b.tokens;
}

std::vector<int> draw_subsample(size_t data_size, int cap, Rng& rng) {
  std::vector<int> idx(data_size);
  std::iota(idx.begin(), idx.end(), 0);
  if (static_cast<int>(data_size) <= cap) return idx;
  // partial Fisher-Yates; the first `cap` entries are a uniform subset
  for (int i = 0; i < cap; ++i) {
    const int j =
        rng.uniform_int(i, static_cast<int>(data_size) - 1);
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  idx.resize(static_cast<size_t>(cap));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

TrainResult train(PolicyNet& net, const TokenLibrary& lib,
                  const Dataset& train_data, const Dataset& val_data,
                  const TrainerConfig& cfg, const CheckpointFn& checkpoint,
                  int checkpoint_every) {
  cfg.validate();
  if (train_data.samples.empty() || val_data.samples.empty()) {
    throw ExprError("train and validation datasets must be non-empty");
  }

  TrainResult result;
  std::vector<HallOfFameEntry> hof;
  std::map<std::vector<int>, double> full_reward_cache;
  std::map<std::vector<int>, double> val_reward_cache;
  double best_val_so_far = 0.0;

  AdamState adam(static_cast<size_t>(net.num_params()));
  std::vector<double> grad(static_cast<size_t>(net.num_params()), 0.0);

  const int K = cfg.batch_size;
  std::vector<SampleRecord> batch(static_cast<size_t>(K));
  std::vector<std::vector<double>> traces(static_cast<size_t>(K));
  std::vector<double> rewards(static_cast<size_t>(K));

  auto full_reward = [&](const std::vector<int>& tokens) {
    auto it = full_reward_cache.find(tokens);
    if (it != full_reward_cache.end()) return it->second;
    const double r =
        compute_reward(parse_prefix(tokens, lib), lib, train_data, {});
    full_reward_cache.emplace(tokens, r);
    return r;
  };
  auto val_reward = [&](const std::vector<int>& tokens) {
    auto it = val_reward_cache.find(tokens);
    if (it != val_reward_cache.end()) return it->second;
    const double r =
        compute_reward(parse_prefix(tokens, lib), lib, val_data, {});
    val_reward_cache.emplace(tokens, r);
    return r;
  };

  // Samples a batch, scores it, and refreshes the hall of fame. Returns the
  // filter result on the batch rewards.
  auto run_batch = [&](int iter) {
    Rng sub_rng(derive_seed(cfg.seed, 0xD5, static_cast<std::uint64_t>(iter)));
    const std::vector<int> subset = draw_subsample(
        train_data.samples.size(), cfg.reward_subsample, sub_rng);
    const bool subsampled = subset.size() < train_data.samples.size();

    parallel_for(static_cast<size_t>(K), cfg.jobs, [&](size_t k) {
      const auto res = sample_expression(
          net, lib,
          derive_seed(cfg.seed, 0x5A, static_cast<std::uint64_t>(iter), k));
      const auto tree = parse_prefix(res.tokens, lib);
      rewards[k] = compute_reward(tree, lib, train_data, subset);
      batch[k] = SampleRecord{res.tokens, res.log_likelihood, rewards[k]};
      traces[k] = res.step_entropies;
    });

    auto filter = risk_filter(rewards, cfg.risk_factor);

    // Hall-of-fame candidates: best unique expressions of this batch,
    // re-scored on the full training set when the batch used a subsample.
    std::vector<int> order(static_cast<size_t>(K));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (rewards[static_cast<size_t>(a)] != rewards[static_cast<size_t>(b)]) {
        return rewards[static_cast<size_t>(a)] >
               rewards[static_cast<size_t>(b)];
      }
      return batch[static_cast<size_t>(a)].tokens <
             batch[static_cast<size_t>(b)].tokens;
    });
    int added = 0;
    for (const int k : order) {
      if (added >= cfg.hall_of_fame_size) break;
      const auto& tokens = batch[static_cast<size_t>(k)].tokens;
      const bool seen =
          std::any_of(hof.begin(), hof.end(), [&](const HallOfFameEntry& e) {
            return e.tokens == tokens;
          });
      if (seen) continue;
      const double r = subsampled ? full_reward(tokens)
                                  : rewards[static_cast<size_t>(k)];
      full_reward_cache.emplace(tokens, r);
      hof.push_back(HallOfFameEntry{tokens, r});
      ++added;
    }
    std::sort(hof.begin(), hof.end(), hof_before);
    if (static_cast<int>(hof.size()) > cfg.hall_of_fame_size) {
      hof.resize(static_cast<size_t>(cfg.hall_of_fame_size));
    }
    for (const auto& e : hof) {
      best_val_so_far = std::max(best_val_so_far, val_reward(e.tokens));
    }
    return filter;
  };

  auto log_iteration = [&](int iter, const RiskFilterResult& filter,
                           const PpoResult& ppo) {
    IterationRecord rec;
    rec.iteration = iter;
    rec.best_reward = *std::max_element(rewards.begin(), rewards.end());
    rec.mean_reward =
        std::accumulate(rewards.begin(), rewards.end(), 0.0) /
        static_cast<double>(K);
    rec.quantile = filter.quantile;
    rec.entropy = hierarchical_entropy(traces, cfg.entropy_gamma);
    rec.loss = ppo.loss;
    rec.best_val = best_val_so_far;
    result.history.push_back(rec);
  };

  if (cfg.iterations == 0) {
    const auto filter = run_batch(0);
    log_iteration(0, filter, PpoResult{});
  }

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const auto filter = run_batch(iter);

    std::fill(grad.begin(), grad.end(), 0.0);
    const auto ppo = ppo_loss_and_grad(net, lib, batch, filter.kept,
                                       filter.quantile, cfg, grad);
    adam.update(net.params(), grad, cfg);

    log_iteration(iter, filter, ppo);
    if (checkpoint && checkpoint_every > 0 &&
        (iter + 1) % checkpoint_every == 0) {
      checkpoint(iter + 1, net);
    }
    if (!hof.empty() && hof.front().train_reward >= cfg.early_stop_reward) {
      break;
    }
  }

  // Final selection on the validation set, over the hall of fame. The hall
  // is sorted by hof_before, so the first maximum wins ties deterministically.
  result.hall_of_fame = hof;
  if (!hof.empty()) {
    size_t best_i = 0;
    double best_val = val_reward(hof[0].tokens);
    for (size_t i = 1; i < hof.size(); ++i) {
      const double vr = val_reward(hof[i].tokens);
      if (vr > best_val) {
        best_val = vr;
        best_i = i;
      }
    }
    result.best_tokens = hof[best_i].tokens;
    result.best_train_reward = hof[best_i].train_reward;
    result.best_val_reward = best_val;
  }
  return result;
}

void write_training_log(const std::string& path,
                        const std::vector<IterationRecord>& history) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ExprError("cannot open training log for writing: " + path);
  for (const auto& r : history) {
    std::fprintf(f,
                 "{\"iteration\":%d,\"best_r\":%.17g,\"mean_r\":%.17g,"
                 "\"quantile\":%.17g,\"entropy\":%.17g,\"loss\":%.17g,"
                 "\"best_val\":%.17g}\n",
                 r.iteration, r.best_reward, r.mean_reward, r.quantile,
                 r.entropy, r.loss, r.best_val);
  }
  if (std::ferror(f)) {
    std::fclose(f);
    throw ExprError("training log write failed: " + path);
  }
  std::fclose(f);
}

}  // namespace symbsel
