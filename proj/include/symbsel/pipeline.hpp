#ifndef SYMBSEL_PIPELINE_HPP_
#define SYMBSEL_PIPELINE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "symbsel/expert.hpp"
#include "symbsel/instances.hpp"
#include "symbsel/train.hpp"

namespace symbsel {

struct PipelineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CorpusConfig {
  Family family = Family::Setcover;
  int rows = 100;
  int cols = 200;
  double density = 0.05;
  int cost_lo = 1;
  int cost_hi = 100;
  int customers = 15;
  int facilities = 8;
  double capacity_ratio = 1.5;
  int train_count = 200;
  int val_count = 40;
  int test_count = 20;
};

struct RunConfig {
  std::uint64_t seed = 0;
  int jobs = 1;
  bool force = false;

  std::string corpus_dir = "corpus";
  std::string dataset_dir = "datasets";
  std::string checkpoint_path = "policy.ckpt";
  std::string expression_path = "expression.txt";
  std::string report_dir = "reports";

  LibraryMode mode = LibraryMode::Pair;
  int max_length = 10;
  LibraryOptions lib_options;
  int hidden = 128;
  SoftLengthPrior prior;

  CorpusConfig corpus;
  TrainerConfig trainer;
  long solve_node_limit = 200000;
  long collect_node_limit = 200000;
  long eval_node_limit = 200000;
  int checkpoint_every = 50;

  std::vector<std::string> comparators = {"dfs", "bfs", "bestfirst",
                                          "estimate", "expert"};
  std::string eval_dataset;  // optional: selection accuracy against labels
};

/// Reads a JSON config; unknown keys are rejected. CLI flags overlay the
/// result afterwards.
RunConfig load_run_config(const std::string& path);

/// SYMBSEL_REPORT_DIR, when set, overrides cfg.report_dir.
void apply_env_overrides(RunConfig& cfg);

TokenLibrary make_library(const RunConfig& cfg);

struct LoadedExpression {
  ExprTree tree;
  TokenLibrary lib;
  std::string rendered;
};

/// Loads the first expression of an expression file, resolving the token
/// library from the file header (extended tokens enable the matching
/// library options).
LoadedExpression load_expression(const std::string& path);

// Subcommand drivers; they throw (PipelineError or module errors) on any
// failure and write outputs atomically.
void run_gen(const RunConfig& cfg);
void run_collect(const RunConfig& cfg);
void run_train(const RunConfig& cfg);
void run_eval(const RunConfig& cfg);

// --- evaluation helpers (exposed for tests) ---------------------------------

struct EvalRow {
  std::string comparator;
  std::string instance_id;
  int status = 0;  // 0 optimal, 1 node limit, 2 infeasible
  long nodes = 0;
  double pd_integral = 0.0;
  double incumbent = 0.0;
};

struct EvalAggregate {
  std::string comparator;
  long instances = 0;
  double nodes_sgm = 0.0;  // shifted geometric mean, shift 1
  double nodes_mean = 0.0;
  double nodes_std = 0.0;
  double pdi_sgm = 0.0;
  double pdi_mean = 0.0;
  double accuracy = -1.0;  // -1 when no dataset was supplied
};

double shifted_geometric_mean(const std::vector<double>& values, double shift);

/// Selection accuracy of a comparator spec over a labeled dataset, applying
/// the comparator's decision rule to the stored feature pairs. The expert
/// scores 1 by construction.
double dataset_accuracy(const std::string& comparator_spec,
                        const Dataset& data);

std::uint64_t file_hash(const std::string& path);

}  // namespace symbsel

#endif  // SYMBSEL_PIPELINE_HPP_
