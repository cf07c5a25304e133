#ifndef SYMBSEL_POLICY_HPP_
#define SYMBSEL_POLICY_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "symbsel/expr.hpp"

namespace symbsel {

struct InvalidSequence : ExprError {
  using ExprError::ExprError;
};
struct LibraryMismatch : ExprError {
  using ExprError::ExprError;
};

/// Gaussian logit prior steering sampled lengths toward `target` tokens:
/// terminals are penalized before the target, non-terminals after it.
struct SoftLengthPrior {
  bool enabled = true;
  double target = 6.0;
  double sigma = 2.0;
};

struct RecurrentState {
  std::vector<double> h1, c1, h2, c2;
};

/// Two stacked LSTM layers plus a linear head over the token library.
/// Input is one-hot(parent) ⊕ one-hot(sibling), each with a blank slot.
/// Parameters live in one flat vector so the optimizer, serialization and
/// finite-difference checks all see the same layout.
class PolicyNet {
 public:
  PolicyNet(int lib_size, int hidden, SoftLengthPrior prior = {});

  void init_weights(std::uint64_t seed);

  int lib_size() const { return lib_size_; }
  int hidden() const { return hidden_; }
  int input_size() const { return 2 * (lib_size_ + 1); }
  int num_params() const { return static_cast<int>(params_.size()); }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  const SoftLengthPrior& prior() const { return prior_; }
  void set_prior(const SoftLengthPrior& p) { prior_ = p; }

  RecurrentState initial_state() const;

  /// One recurrent step: raw logits before masking; state advances in place.
  void step(std::span<const double> input, RecurrentState& state,
            std::span<double> logits) const;

  void save(const std::string& path, const TokenLibrary& lib) const;
  static PolicyNet load(const std::string& path, const TokenLibrary& lib);

 private:
  int lib_size_;
  int hidden_;
  SoftLengthPrior prior_;
  std::vector<double> params_;
};

/// (parent, sibling) context of the next pre-order position; -1 means blank.
struct SlotContext {
  int parent = -1;
  int sibling = -1;
};

/// Incremental pre-order generation state: the open-slot stack mirrors the
/// slots a partial sequence still has to fill.
class SamplerState {
 public:
  SamplerState();
  bool complete() const { return open_.empty(); }
  SlotContext current() const;
  const std::vector<int>& tokens() const { return tokens_; }
  void advance(int token, const TokenLibrary& lib);

 private:
  struct Slot {
    int parent;
    int sibling;
    bool fill_below;  // emitting this slot's token names the sibling beneath
  };
  std::vector<int> tokens_;
  std::vector<Slot> open_;
};

/// Slot contexts for every position of a complete or partial sequence,
/// reconstructed from the tokens alone.
std::vector<SlotContext> slot_contexts(std::span<const int> seq,
                                       const TokenLibrary& lib);

std::vector<double> encode_state(const SlotContext& slot,
                                 const TokenLibrary& lib);

/// In-place mask + soft-length adjustment. Invalid tokens drop to -infinity;
/// `step_index` counts tokens already emitted.
void apply_priors(std::span<double> logits, std::span<const char> mask,
                  int step_index, const SoftLengthPrior& prior,
                  const TokenLibrary& lib);

struct SampleResult {
  std::vector<int> tokens;
  double log_likelihood = 0.0;
  std::vector<double> step_log_probs;
  std::vector<double> step_entropies;
};

SampleResult sample_expression(const PolicyNet& net, const TokenLibrary& lib,
                               std::uint64_t seed);

/// Forward pass over a complete sequence with cached activations, exposing
/// the exact log-likelihood, per-step entropies, and analytic gradients.
class SequenceForward {
 public:
  SequenceForward(const PolicyNet& net, const TokenLibrary& lib,
                  std::span<const int> seq);

  double log_likelihood() const { return log_likelihood_; }
  const std::vector<double>& step_entropies() const { return entropies_; }
  const std::vector<double>& step_log_probs() const { return logp_chosen_; }
  int length() const { return static_cast<int>(seq_.size()); }

  /// Accumulates d/dθ of [coef_ll · logL + Σ_t ent_coefs[t] · H_t] into grad.
  void backward(double coef_ll, std::span<const double> ent_coefs,
                std::span<double> grad) const;

 private:
  const PolicyNet* net_;
  const TokenLibrary* lib_;
  std::vector<int> seq_;
  double log_likelihood_ = 0.0;
  std::vector<double> entropies_;
  std::vector<double> logp_chosen_;
  // per-step caches
  std::vector<std::vector<double>> inputs_;   // [T][I]
  std::vector<std::vector<char>> masks_;      // [T][L]
  std::vector<std::vector<double>> probs_;    // [T][L], 0 where invalid
  std::vector<std::vector<double>> logps_;    // [T][L], junk where invalid
  std::vector<std::vector<double>> gates1_;   // [T][4H] i,f,g,o
  std::vector<std::vector<double>> gates2_;
  std::vector<std::vector<double>> cells1_;   // [T][H]
  std::vector<std::vector<double>> cells2_;
  std::vector<std::vector<double>> hidden1_;  // [T][H]
  std::vector<std::vector<double>> hidden2_;
};

double log_likelihood(const PolicyNet& net, const TokenLibrary& lib,
                      std::span<const int> seq);

}  // namespace symbsel

#endif  // SYMBSEL_POLICY_HPP_
