// symbsel: learn and deploy symbolic node-selection heuristics for a
// miniature branch-and-bound MILP solver.
//
//   symbsel gen      generate a seeded instance corpus with a manifest
//   symbsel collect  record expert node-selection behavior as datasets
//   symbsel train    fit the expression policy on collected behavior
//   symbsel eval     benchmark comparators on the test corpus

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "symbsel/pipeline.hpp"

using namespace symbsel;

namespace {

struct CliState {
  std::string config_path;
  RunConfig cfg;

  // flag mirrors; only applied when the user passed them
  std::string family, mode, comparators_csv, eval_dataset;
  std::uint64_t seed = 0;
  int jobs = 0, iterations = -1, batch_size = -1;
  int rows = -1, cols = -1, customers = -1, facilities = -1;
  int train_count = -1, val_count = -1, test_count = -1;
  double density = -1.0;
  long node_limit = -1;
};

void add_common(CLI::App* cmd, CliState& st) {
  cmd->add_option("--config", st.config_path, "JSON config file");
  cmd->add_option("--seed", st.seed, "master seed");
  cmd->add_option("--jobs", st.jobs, "worker cap for parallel stages");
  cmd->add_option("--corpus-dir", st.cfg.corpus_dir, "instance corpus root");
  cmd->add_option("--dataset-dir", st.cfg.dataset_dir, "dataset directory");
  cmd->add_option("--checkpoint", st.cfg.checkpoint_path, "checkpoint path");
  cmd->add_option("--expression", st.cfg.expression_path,
                  "expression file path");
  cmd->add_option("--report-dir", st.cfg.report_dir, "report directory");
  cmd->add_flag("--force", st.cfg.force, "overwrite existing outputs");
}

// Re-parse layered sources: defaults <- config file <- explicit flags.
RunConfig resolve(const CLI::App& cmd, CliState& st) {
  RunConfig cfg;
  if (!st.config_path.empty()) cfg = load_run_config(st.config_path);

  auto passed = [&](const std::string& name) {
    const auto* opt = cmd.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (passed("--seed")) cfg.seed = st.seed;
  if (passed("--jobs")) cfg.jobs = st.jobs;
  if (passed("--corpus-dir")) cfg.corpus_dir = st.cfg.corpus_dir;
  if (passed("--dataset-dir")) cfg.dataset_dir = st.cfg.dataset_dir;
  if (passed("--checkpoint")) cfg.checkpoint_path = st.cfg.checkpoint_path;
  if (passed("--expression")) cfg.expression_path = st.cfg.expression_path;
  if (passed("--report-dir")) cfg.report_dir = st.cfg.report_dir;
  if (passed("--force")) cfg.force = true;

  if (passed("--family")) cfg.corpus.family = family_from_string(st.family);
  if (passed("--rows")) cfg.corpus.rows = st.rows;
  if (passed("--cols")) cfg.corpus.cols = st.cols;
  if (passed("--density")) cfg.corpus.density = st.density;
  if (passed("--customers")) cfg.corpus.customers = st.customers;
  if (passed("--facilities")) cfg.corpus.facilities = st.facilities;
  if (passed("--train-count")) cfg.corpus.train_count = st.train_count;
  if (passed("--val-count")) cfg.corpus.val_count = st.val_count;
  if (passed("--test-count")) cfg.corpus.test_count = st.test_count;

  if (passed("--mode")) cfg.mode = library_mode_from_string(st.mode);
  if (passed("--iterations")) cfg.trainer.iterations = st.iterations;
  if (passed("--batch-size")) cfg.trainer.batch_size = st.batch_size;
  if (passed("--node-limit")) {
    cfg.eval_node_limit = st.node_limit;
    cfg.collect_node_limit = st.node_limit;
    cfg.solve_node_limit = st.node_limit;
  }
  if (passed("--comparators")) {
    cfg.comparators.clear();
    std::string item;
    std::istringstream ss(st.comparators_csv);
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) cfg.comparators.push_back(item);
    }
  }
  if (passed("--eval-dataset")) cfg.eval_dataset = st.eval_dataset;

  cfg.jobs = std::max(1, cfg.jobs);
  apply_env_overrides(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symbolic node-selection toolkit"};
  app.require_subcommand(1);

  CliState st;

  auto* gen = app.add_subcommand("gen", "generate an instance corpus");
  add_common(gen, st);
  gen->add_option("--family", st.family, "setcover | facilities");
  gen->add_option("--rows", st.rows, "setcover rows");
  gen->add_option("--cols", st.cols, "setcover columns");
  gen->add_option("--density", st.density, "setcover density");
  gen->add_option("--customers", st.customers, "facility customers");
  gen->add_option("--facilities", st.facilities, "facility count");
  gen->add_option("--train-count", st.train_count, "training instances");
  gen->add_option("--val-count", st.val_count, "validation instances");
  gen->add_option("--test-count", st.test_count, "test instances");

  auto* collect = app.add_subcommand("collect", "record expert behavior");
  add_common(collect, st);
  collect->add_option("--node-limit", st.node_limit, "solver node limit");

  auto* train = app.add_subcommand("train", "train the expression policy");
  add_common(train, st);
  train->add_option("--mode", st.mode, "pair | symmetric");
  train->add_option("--iterations", st.iterations, "training iterations");
  train->add_option("--batch-size", st.batch_size, "expressions per batch");

  auto* eval = app.add_subcommand("eval", "benchmark node comparators");
  add_common(eval, st);
  eval->add_option("--comparators", st.comparators_csv,
                   "comma list: dfs,bfs,bestfirst,estimate,expert,expr:<file>");
  eval->add_option("--node-limit", st.node_limit, "solver node limit");
  eval->add_option("--eval-dataset", st.eval_dataset,
                   "labeled dataset for selection accuracy");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      run_gen(resolve(*gen, st));
    } else if (collect->parsed()) {
      run_collect(resolve(*collect, st));
    } else if (train->parsed()) {
      run_train(resolve(*train, st));
    } else if (eval->parsed()) {
      run_eval(resolve(*eval, st));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
