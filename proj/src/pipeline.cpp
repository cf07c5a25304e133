#include "symbsel/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "symbsel/features.hpp"
#include "symbsel/parallel.hpp"
#include "symbsel/policy.hpp"
#include "symbsel/rng.hpp"

namespace fs = std::filesystem;

namespace symbsel {

namespace {

void check_keys(const nlohmann::json& j,
                std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw PipelineError("unknown config key '" + key + "' in " + where);
    }
  }
}

// Writes through a temp file and renames into place on success.
template <typename Writer>
void atomic_write(const std::string& path, Writer&& writer) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  writer(tmp);
  fs::rename(tmp, target);
}

struct ManifestEntry {
  std::string id;
  std::string split;
  std::string file;
  std::uint64_t seed = 0;
};

struct Manifest {
  Family family = Family::Setcover;
  std::uint64_t master_seed = 0;
  std::vector<ManifestEntry> entries;
};

Manifest load_manifest(const std::string& corpus_dir) {
  const std::string path = corpus_dir + "/manifest.json";
  std::ifstream f(path);
  if (!f) throw PipelineError("missing corpus manifest: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw PipelineError(path + ": " + e.what());
  }
  Manifest m;
  m.family = family_from_string(j.at("family").get<std::string>());
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  for (const auto& e : j.at("instances")) {
    ManifestEntry entry;
    entry.id = e.at("id").get<std::string>();
    entry.split = e.at("split").get<std::string>();
    entry.file = e.at("file").get<std::string>();
    entry.seed = e.at("seed").get<std::uint64_t>();
    m.entries.push_back(std::move(entry));
  }
  return m;
}

std::vector<std::pair<std::string, MilpInstance>> load_split(
    const Manifest& m, const std::string& corpus_dir,
    const std::string& split) {
  std::vector<std::pair<std::string, MilpInstance>> out;
  for (const auto& e : m.entries) {
    if (e.split != split) continue;
    out.emplace_back(e.id, load_instance(corpus_dir + "/" + e.file));
  }
  return out;
}

GenConfig corpus_gen_config(const CorpusConfig& c, std::uint64_t seed,
                            const std::string& name) {
  GenConfig g;
  g.family = c.family;
  g.rows = c.rows;
  g.cols = c.cols;
  g.density = c.density;
  g.cost_lo = c.cost_lo;
  g.cost_hi = c.cost_hi;
  g.customers = c.customers;
  g.facilities = c.facilities;
  g.capacity_ratio = c.capacity_ratio;
  g.seed = seed;
  g.name = name;
  return g;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw PipelineError("cannot open config: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw PipelineError(path + ": " + e.what());
  }

  RunConfig cfg;
  check_keys(j,
             {"seed", "jobs", "force", "corpus_dir", "dataset_dir",
              "checkpoint", "expression", "report_dir", "mode", "max_length",
              "with_trig", "with_const_grid", "hidden", "prior", "gen",
              "collect", "train", "eval"},
             "top level");
  cfg.seed = j.value("seed", cfg.seed);
  cfg.jobs = j.value("jobs", cfg.jobs);
  cfg.force = j.value("force", cfg.force);
  cfg.corpus_dir = j.value("corpus_dir", cfg.corpus_dir);
  cfg.dataset_dir = j.value("dataset_dir", cfg.dataset_dir);
  cfg.checkpoint_path = j.value("checkpoint", cfg.checkpoint_path);
  cfg.expression_path = j.value("expression", cfg.expression_path);
  cfg.report_dir = j.value("report_dir", cfg.report_dir);
  if (j.contains("mode")) {
    cfg.mode = library_mode_from_string(j["mode"].get<std::string>());
  }
  cfg.max_length = j.value("max_length", cfg.max_length);
  cfg.lib_options.with_trig = j.value("with_trig", false);
  cfg.lib_options.with_const_grid = j.value("with_const_grid", false);
  cfg.hidden = j.value("hidden", cfg.hidden);

  if (j.contains("prior")) {
    const auto& p = j["prior"];
    check_keys(p, {"enabled", "target", "sigma"}, "prior");
    cfg.prior.enabled = p.value("enabled", cfg.prior.enabled);
    cfg.prior.target = p.value("target", cfg.prior.target);
    cfg.prior.sigma = p.value("sigma", cfg.prior.sigma);
  }
  if (j.contains("gen")) {
    const auto& g = j["gen"];
    check_keys(g,
               {"family", "rows", "cols", "density", "cost_lo", "cost_hi",
                "customers", "facilities", "capacity_ratio", "train_count",
                "val_count", "test_count"},
               "gen");
    if (g.contains("family")) {
      cfg.corpus.family = family_from_string(g["family"].get<std::string>());
    }
    cfg.corpus.rows = g.value("rows", cfg.corpus.rows);
    cfg.corpus.cols = g.value("cols", cfg.corpus.cols);
    cfg.corpus.density = g.value("density", cfg.corpus.density);
    cfg.corpus.cost_lo = g.value("cost_lo", cfg.corpus.cost_lo);
    cfg.corpus.cost_hi = g.value("cost_hi", cfg.corpus.cost_hi);
    cfg.corpus.customers = g.value("customers", cfg.corpus.customers);
    cfg.corpus.facilities = g.value("facilities", cfg.corpus.facilities);
    cfg.corpus.capacity_ratio =
        g.value("capacity_ratio", cfg.corpus.capacity_ratio);
    cfg.corpus.train_count = g.value("train_count", cfg.corpus.train_count);
    cfg.corpus.val_count = g.value("val_count", cfg.corpus.val_count);
    cfg.corpus.test_count = g.value("test_count", cfg.corpus.test_count);
  }
  if (j.contains("collect")) {
    const auto& c = j["collect"];
    check_keys(c, {"solve_node_limit", "collect_node_limit"}, "collect");
    cfg.solve_node_limit = c.value("solve_node_limit", cfg.solve_node_limit);
    cfg.collect_node_limit =
        c.value("collect_node_limit", cfg.collect_node_limit);
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    check_keys(t,
               {"batch_size", "iterations", "risk_factor", "ppo_clip",
                "learning_rate", "entropy_weight", "entropy_gamma",
                "reward_subsample", "hall_of_fame", "early_stop_reward",
                "checkpoint_every"},
               "train");
    cfg.trainer.batch_size = t.value("batch_size", cfg.trainer.batch_size);
    cfg.trainer.iterations = t.value("iterations", cfg.trainer.iterations);
    cfg.trainer.risk_factor = t.value("risk_factor", cfg.trainer.risk_factor);
    cfg.trainer.ppo_clip = t.value("ppo_clip", cfg.trainer.ppo_clip);
    cfg.trainer.learning_rate =
        t.value("learning_rate", cfg.trainer.learning_rate);
    cfg.trainer.entropy_weight =
        t.value("entropy_weight", cfg.trainer.entropy_weight);
    cfg.trainer.entropy_gamma =
        t.value("entropy_gamma", cfg.trainer.entropy_gamma);
    cfg.trainer.reward_subsample =
        t.value("reward_subsample", cfg.trainer.reward_subsample);
    cfg.trainer.hall_of_fame_size =
        t.value("hall_of_fame", cfg.trainer.hall_of_fame_size);
    cfg.trainer.early_stop_reward =
        t.value("early_stop_reward", cfg.trainer.early_stop_reward);
    cfg.checkpoint_every = t.value("checkpoint_every", cfg.checkpoint_every);
  }
  if (j.contains("eval")) {
    const auto& e = j["eval"];
    check_keys(e, {"comparators", "node_limit", "dataset"}, "eval");
    if (e.contains("comparators")) {
      cfg.comparators = e["comparators"].get<std::vector<std::string>>();
    }
    cfg.eval_node_limit = e.value("node_limit", cfg.eval_node_limit);
    cfg.eval_dataset = e.value("dataset", cfg.eval_dataset);
  }
  return cfg;
}

void apply_env_overrides(RunConfig& cfg) {
  if (const char* dir = std::getenv("SYMBSEL_REPORT_DIR")) {
    if (*dir) cfg.report_dir = dir;
  }
}

TokenLibrary make_library(const RunConfig& cfg) {
  return TokenLibrary::make(cfg.mode, cfg.max_length, cfg.lib_options);
}

LoadedExpression load_expression(const std::string& path) {
  const auto ef = read_expression_file(path);
  if (ef.expressions.empty()) {
    throw PipelineError("expression file has no expressions: " + path);
  }
  LibraryOptions opts;
  auto lib = TokenLibrary::make(ef.mode, ef.max_length, opts);
  const auto unknown = [&](const TokenLibrary& l) {
    for (const auto& sym : ef.expressions[0]) {
      if (l.index_of(sym) < 0) return true;
    }
    return false;
  };
  if (unknown(lib)) {
    opts.with_trig = true;
    opts.with_const_grid = true;
    lib = TokenLibrary::make(ef.mode, ef.max_length, opts);
  }
  LoadedExpression out{parse_prefix(ef.expressions[0], lib), std::move(lib),
                       ""};
  out.rendered = render(out.tree, out.lib);
  return out;
}

void run_gen(const RunConfig& cfg) {
  const std::string manifest_path = cfg.corpus_dir + "/manifest.json";
  if (fs::exists(manifest_path) && !cfg.force) {
    throw PipelineError("corpus already exists (use force to overwrite): " +
                        manifest_path);
  }
  // validate the geometry before any file is touched
  corpus_gen_config(cfg.corpus, 0, "probe").validate();

  const std::string tag =
      cfg.corpus.family == Family::Setcover ? "sc" : "fac";
  nlohmann::json instances = nlohmann::json::array();
  const std::vector<std::pair<std::string, int>> splits = {
      {"train", cfg.corpus.train_count},
      {"val", cfg.corpus.val_count},
      {"test", cfg.corpus.test_count}};
  long written = 0;
  for (const auto& [split, count] : splits) {
    fs::create_directories(fs::path(cfg.corpus_dir) / split);
    for (int i = 0; i < count; ++i) {
      char idbuf[64];
      std::snprintf(idbuf, sizeof(idbuf), "%s_%s_%04d", tag.c_str(),
                    split.c_str(), i);
      const std::string id = idbuf;
      const std::uint64_t seed = derive_seed(
          cfg.seed, static_cast<std::uint64_t>(cfg.corpus.family),
          std::hash<std::string>{}(split), static_cast<std::uint64_t>(i));
      auto gen_cfg = corpus_gen_config(cfg.corpus, seed, id);
      const auto inst = generate(gen_cfg);
      const std::string rel = split + "/" + id + ".json";
      atomic_write(cfg.corpus_dir + "/" + rel, [&](const std::string& tmp) {
        save_instance(tmp, inst);
      });
      instances.push_back({{"id", id},
                           {"split", split},
                           {"file", rel},
                           {"seed", seed},
                           {"optimum", nullptr}});
      ++written;
    }
  }

  nlohmann::json manifest;
  manifest["family"] = to_string(cfg.corpus.family);
  manifest["master_seed"] = cfg.seed;
  manifest["generator"] = {
      {"rows", cfg.corpus.rows},
      {"cols", cfg.corpus.cols},
      {"density", cfg.corpus.density},
      {"cost_lo", cfg.corpus.cost_lo},
      {"cost_hi", cfg.corpus.cost_hi},
      {"customers", cfg.corpus.customers},
      {"facilities", cfg.corpus.facilities},
      {"capacity_ratio", cfg.corpus.capacity_ratio},
  };
  manifest["instances"] = instances;
  atomic_write(manifest_path, [&](const std::string& tmp) {
    std::ofstream f(tmp);
    f << manifest.dump(1, '\t') << "\n";
    if (!f.good()) throw PipelineError("manifest write failed");
  });
  std::printf("generated %ld %s instances under %s\n", written,
              to_string(cfg.corpus.family), cfg.corpus_dir.c_str());
}

void run_collect(const RunConfig& cfg) {
  const auto manifest = load_manifest(cfg.corpus_dir);
  if (manifest.entries.empty()) {
    throw PipelineError("corpus manifest lists no instances");
  }
  fs::create_directories(cfg.dataset_dir);
  for (const std::string split : {"train", "val", "test"}) {
    const auto instances = load_split(manifest, cfg.corpus_dir, split);
    if (instances.empty()) {
      throw PipelineError("corpus has no instances for split " + split);
    }
    CollectOptions opts;
    opts.solve_node_limit = cfg.solve_node_limit;
    opts.collect_node_limit = cfg.collect_node_limit;
    opts.jobs = cfg.jobs;
    opts.split = split;
    const auto result = collect(instances, opts);
    const std::string path = cfg.dataset_dir + "/" + split + ".csv";
    atomic_write(path, [&](const std::string& tmp) {
      save_dataset(tmp, result.dataset);
    });
    long total = 0;
    for (const auto& [id, count] : result.per_instance) total += count;
    std::printf("%s: %zu instances, %ld samples", split.c_str(),
                result.per_instance.size(), total);
    if (!result.rejected.empty()) {
      std::printf(", %zu rejected", result.rejected.size());
    }
    std::printf(" -> %s\n", path.c_str());
  }
}

void run_train(const RunConfig& cfg) {
  const auto train_data = load_dataset(cfg.dataset_dir + "/train.csv");
  const auto val_data = load_dataset(cfg.dataset_dir + "/val.csv");
  const auto lib = make_library(cfg);

  PolicyNet net(lib.size(), cfg.hidden, cfg.prior);
  net.init_weights(derive_seed(cfg.seed, 0x11));
  TrainerConfig trainer = cfg.trainer;
  trainer.seed = derive_seed(cfg.seed, 0x22);
  trainer.jobs = cfg.jobs;

  auto checkpoint = [&](int iteration, const PolicyNet& n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), ".iter%04d", iteration);
    atomic_write(cfg.checkpoint_path + buf,
                 [&](const std::string& tmp) { n.save(tmp, lib); });
  };
  const auto result = train(net, lib, train_data, val_data, trainer,
                            checkpoint, cfg.checkpoint_every);
  if (result.best_tokens.empty()) {
    throw PipelineError("training produced no expression");
  }

  atomic_write(cfg.checkpoint_path,
               [&](const std::string& tmp) { net.save(tmp, lib); });
  atomic_write(cfg.expression_path, [&](const std::string& tmp) {
    write_expression_file(tmp, lib, {result.best_tokens});
  });
  fs::create_directories(cfg.report_dir);
  atomic_write(cfg.report_dir + "/train_log.jsonl",
               [&](const std::string& tmp) {
                 write_training_log(tmp, result.history);
               });

  const auto tree = parse_prefix(result.best_tokens, lib);
  nlohmann::json summary;
  summary["expression"] = render(tree, lib);
  summary["tokens"] = sequence_symbols(result.best_tokens, lib);
  summary["val_reward"] = result.best_val_reward;
  summary["train_reward"] = result.best_train_reward;
  summary["iterations"] = result.history.size();
  summary["mode"] = to_string(lib.mode());
  atomic_write(cfg.report_dir + "/train_summary.json",
               [&](const std::string& tmp) {
                 std::ofstream f(tmp);
                 f << summary.dump(1, '\t') << "\n";
                 if (!f.good()) throw PipelineError("summary write failed");
               });
  std::printf("best expression: %s  (train %.4f, val %.4f)\n",
              summary["expression"].get<std::string>().c_str(),
              result.best_train_reward, result.best_val_reward);
}

double shifted_geometric_mean(const std::vector<double>& values,
                              double shift) {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (const double v : values) acc += std::log(v + shift);
  return std::exp(acc / static_cast<double>(values.size())) - shift;
}

namespace {

// Decision rule of a named comparator applied to a stored feature pair.
int heuristic_pair_decision(const std::string& spec,
                            std::span<const double> f) {
  if (spec == "dfs") {
    return f[20 + kNodeDepth] > f[kNodeDepth] ? kPreferNode2 : kPreferNode1;
  }
  if (spec == "bfs") {
    return f[20 + kNodeDepth] < f[kNodeDepth] ? kPreferNode2 : kPreferNode1;
  }
  if (spec == "bestfirst") {
    return f[20 + kLowerBound] < f[kLowerBound] ? kPreferNode2 : kPreferNode1;
  }
  if (spec == "estimate") {
    return f[20 + kEstimate] < f[kEstimate] ? kPreferNode2 : kPreferNode1;
  }
  throw PipelineError("no feature-level decision rule for " + spec);
}

}  // namespace

double dataset_accuracy(const std::string& spec, const Dataset& data) {
  if (data.samples.empty()) {
    throw PipelineError("accuracy over an empty dataset");
  }
  if (spec == "expert") return 1.0;  // labels are the expert's own decisions
  long hits = 0;
  if (spec.rfind("expr:", 0) == 0) {
    const auto loaded = load_expression(spec.substr(5));
    for (const auto& s : data.samples) {
      if (pair_decision(loaded.tree, loaded.lib, s.features) == s.decision) {
        ++hits;
      }
    }
  } else {
    for (const auto& s : data.samples) {
      if (heuristic_pair_decision(spec, s.features) == s.decision) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(data.samples.size());
}

void run_eval(const RunConfig& cfg) {
  const auto manifest = load_manifest(cfg.corpus_dir);
  const auto instances = load_split(manifest, cfg.corpus_dir, "test");
  if (instances.empty()) {
    throw PipelineError("corpus has no test instances");
  }
  if (cfg.comparators.empty()) {
    throw PipelineError("no comparators requested");
  }

  // expression comparators resolve up front so bad paths fail fast
  std::map<std::string, LoadedExpression> expressions;
  bool want_expert = false;
  for (const auto& spec : cfg.comparators) {
    if (spec.rfind("expr:", 0) == 0) {
      expressions.emplace(spec, load_expression(spec.substr(5)));
    } else if (spec == "expert") {
      want_expert = true;
    } else if (spec != "dfs" && spec != "bfs" && spec != "bestfirst" &&
               spec != "estimate") {
      throw PipelineError("unknown comparator spec: " + spec);
    }
  }

  // the expert needs each instance's optimum; computed once, in parallel
  std::vector<std::vector<double>> optima(instances.size());
  if (want_expert) {
    parallel_for(instances.size(), cfg.jobs, [&](size_t i) {
      optima[i] = solve_to_optimal(instances[i].second,
                                   cfg.solve_node_limit).x;
    });
  }

  Dataset labels;
  if (!cfg.eval_dataset.empty()) labels = load_dataset(cfg.eval_dataset);

  std::vector<EvalRow> rows;
  std::vector<EvalAggregate> aggregates;
  for (const auto& spec : cfg.comparators) {
    std::vector<EvalRow> spec_rows(instances.size());
    parallel_for(instances.size(), cfg.jobs, [&](size_t i) {
      const auto& [id, inst] = instances[i];
      std::unique_ptr<NodeComparator> cmp;
      if (spec == "dfs") {
        cmp = std::make_unique<DfsComparator>();
      } else if (spec == "bfs") {
        cmp = std::make_unique<BfsComparator>();
      } else if (spec == "bestfirst") {
        cmp = std::make_unique<BestFirstComparator>();
      } else if (spec == "estimate") {
        cmp = std::make_unique<EstimateComparator>();
      } else if (spec == "expert") {
        cmp = std::make_unique<ExpertComparator>(optima[i]);
      } else {
        const auto& e = expressions.at(spec);
        cmp = std::make_unique<ExpressionComparator>(e.tree, e.lib, spec);
      }
      BnbLimits limits;
      limits.node_limit = cfg.eval_node_limit;
      const auto res = solve(inst, *cmp, limits);
      EvalRow row;
      row.comparator = spec;
      row.instance_id = id;
      row.status = res.stats.status == SolveStatus::Optimal ? 0
                   : res.stats.status == SolveStatus::NodeLimitReached ? 1
                                                                       : 2;
      row.nodes = res.stats.nodes;
      row.pd_integral = res.stats.pd_integral;
      row.incumbent = res.stats.has_incumbent ? res.stats.incumbent_value : 0;
      spec_rows[i] = std::move(row);
    });

    EvalAggregate agg;
    agg.comparator = spec;
    agg.instances = static_cast<long>(spec_rows.size());
    std::vector<double> nodes, pdis;
    for (const auto& r : spec_rows) {
      nodes.push_back(static_cast<double>(r.nodes));
      pdis.push_back(r.pd_integral);
    }
    agg.nodes_sgm = shifted_geometric_mean(nodes, 1.0);
    agg.pdi_sgm = shifted_geometric_mean(pdis, 1.0);
    agg.nodes_mean =
        std::accumulate(nodes.begin(), nodes.end(), 0.0) / nodes.size();
    agg.pdi_mean =
        std::accumulate(pdis.begin(), pdis.end(), 0.0) / pdis.size();
    double var = 0.0;
    for (const double v : nodes) {
      var += (v - agg.nodes_mean) * (v - agg.nodes_mean);
    }
    agg.nodes_std = std::sqrt(var / nodes.size());
    if (!labels.samples.empty()) {
      agg.accuracy = dataset_accuracy(spec, labels);
    }
    aggregates.push_back(agg);
    for (auto& r : spec_rows) rows.push_back(std::move(r));
  }

  fs::create_directories(cfg.report_dir);
  atomic_write(cfg.report_dir + "/eval_per_instance.csv",
               [&](const std::string& tmp) {
                 std::FILE* f = std::fopen(tmp.c_str(), "w");
                 if (!f) throw PipelineError("cannot write report");
                 std::fprintf(f,
                              "comparator,instance,status,nodes,pd_integral,"
                              "incumbent\n");
                 for (const auto& r : rows) {
                   std::fprintf(f, "%s,%s,%d,%ld,%.10g,%.10g\n",
                                r.comparator.c_str(), r.instance_id.c_str(),
                                r.status, r.nodes, r.pd_integral,
                                r.incumbent);
                 }
                 std::fclose(f);
               });
  atomic_write(
      cfg.report_dir + "/eval_summary.csv", [&](const std::string& tmp) {
        std::FILE* f = std::fopen(tmp.c_str(), "w");
        if (!f) throw PipelineError("cannot write report");
        std::fprintf(f,
                     "comparator,instances,nodes_sgm,nodes_mean,nodes_std,"
                     "pdi_sgm,pdi_mean,accuracy\n");
        for (const auto& a : aggregates) {
          std::fprintf(f, "%s,%ld,%.10g,%.10g,%.10g,%.10g,%.10g,",
                       a.comparator.c_str(), a.instances, a.nodes_sgm,
                       a.nodes_mean, a.nodes_std, a.pdi_sgm, a.pdi_mean);
          if (a.accuracy >= 0.0) {
            std::fprintf(f, "%.10g\n", a.accuracy);
          } else {
            std::fprintf(f, "n/a\n");
          }
        }
        std::fclose(f);
      });
  atomic_write(
      cfg.report_dir + "/eval_summary.json", [&](const std::string& tmp) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& a : aggregates) {
          nlohmann::json row = {
              {"comparator", a.comparator}, {"instances", a.instances},
              {"nodes_sgm", a.nodes_sgm},   {"nodes_mean", a.nodes_mean},
              {"nodes_std", a.nodes_std},   {"pdi_sgm", a.pdi_sgm},
              {"pdi_mean", a.pdi_mean},
          };
          if (a.accuracy >= 0.0) row["accuracy"] = a.accuracy;
          j.push_back(row);
        }
        std::ofstream f(tmp);
        f << j.dump(1, '\t') << "\n";
        if (!f.good()) throw PipelineError("summary write failed");
      });

  for (const auto& a : aggregates) {
    std::printf("%-24s nodes_sgm=%.2f nodes_mean=%.2f pdi_sgm=%.2f",
                a.comparator.c_str(), a.nodes_sgm, a.nodes_mean, a.pdi_sgm);
    if (a.accuracy >= 0.0) std::printf(" accuracy=%.4f", a.accuracy);
    std::printf("\n");
  }
}

std::uint64_t file_hash(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw PipelineError("cannot hash missing file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!f) break;
  }
  return h;
}

}  // namespace symbsel
