#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hat/annotation.hpp"
#include "hat/dataset.hpp"
#include "hat/eval.hpp"
#include "hat/io.hpp"
#include "hat/model_bank.hpp"
#include "hat/synth.hpp"
#include "hat/taxonomy.hpp"
#include "hat/transfer.hpp"

namespace hat {

enum class Method { Hat, Dap, Ens };

std::string_view to_string(Method method);
Method method_from_string(std::string_view text);

struct RunConfig {
  std::optional<fs::path> taxonomy;
  std::optional<fs::path> features;
  std::optional<fs::path> labels;      // sidecar labels for binary features
  std::optional<fs::path> attributes;  // class signatures, class occurrences or image labels
  std::optional<fs::path> split;
  std::optional<fs::path> out;
  std::optional<fs::path> model;
  std::optional<fs::path> predictions;
  std::optional<fs::path> dap_priors;  // attribute,prior CSV

  FeatureFormat feature_format = FeatureFormat::Csv;
  AnnotationMode mode = AnnotationMode::PerClass;
  bool occurrence_values = false;  // per-class attributes are rates to binarize
  bool l2_normalize = false;
  Method method = Method::Hat;
  bool normalize = true;  // applies to HAT and ENS
  bool fallback_parent = false;
  bool plain_accuracy = false;
  bool dump_support = false;
  std::vector<double> cost_grid{0.01, 0.1, 1.0, 10.0, 100.0};
  int folds = 5;
  std::uint64_t seed = 0;
  unsigned workers = 1;

  // Sweep: values below 1 are fractions of the leaf count, others are counts.
  std::vector<double> sizes{0.25, 0.375, 0.5, 0.625, 0.75};
  int repeats = 3;
  SynthSpec synth;

  TrainingConfig training() const;
};

// Keys mirror the long flag names with dashes replaced by underscores.
void apply_json(RunConfig& config, const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

// A taxonomy whose leaf kinds follow the split, signatures for every leaf
// class, and all samples.
struct Problem {
  Taxonomy taxonomy;
  AttributeSignatureMatrix signatures;
  Dataset data;
  std::vector<std::string> seen;
  std::vector<std::string> unseen;
  AnnotationMode mode = AnnotationMode::PerClass;
  std::optional<std::map<std::string, double>> dap_priors;  // p(a = 1); 0.5 when absent

  Dataset train_data() const;
  // Samples whose class is not a seen class.
  Dataset test_data() const;
  Problem with_split(std::vector<std::string> seen_classes) const;
};

// Requires taxonomy, attributes and split; features are optional (needed
// for training, for per-image mode and for support dumps).
Problem load_problem(const RunConfig& config, bool need_features = true);
Problem problem_from_synth(const SynthBenchmark& bench);

NodeAttributeTable problem_table(const Problem& problem);
ModelBank train_problem(const Problem& problem, const NodeAttributeTable& table, const TrainingConfig& config,
                        unsigned workers);

struct Scored {
  ScoreTable scores;
  std::vector<std::string> predicted;
};

// With `drop_untrained`, DAP ignores attributes that have no root classifier
// instead of raising MissingRootClassifier (their log-ratio is zero under
// the default 0.5 prior).
Scored predict(const Problem& problem, const NodeAttributeTable& table, const ModelBank& bank, const Dataset& test,
               Method method, bool normalize, bool fallback_parent, unsigned workers, bool drop_untrained = false);

// Per-attribute scores used for the attribute AUC: root classifier posteriors
// for DAP and ENS; for HAT the mean transferred score over the unseen classes
// the attribute can be transferred to, falling back to the root posterior.
ScoreTable attribute_scores(const Problem& problem, const NodeAttributeTable& table, const ModelBank& bank,
                            const Dataset& test, Method method);

EvalReport evaluate(const Problem& problem, const NodeAttributeTable& table, const ModelBank& bank,
                    const Dataset& test, const Scored& scored, Method method);

struct BenchEntry {
  std::string name;  // method, with "-fallback" for parent-fallback HAT
  Scored scored;
  EvalReport report;
};

struct BenchResult {
  SynthSpec spec;
  std::size_t n_unseen = 0;
  double chance = 0.0;
  std::size_t classifiers = 0;
  std::size_t skipped = 0;
  std::vector<BenchEntry> entries;  // hat, dap, ens, hat-fallback

  const BenchEntry& entry(std::string_view name) const;
};

BenchResult run_bench(const SynthSpec& spec, const TrainingConfig& training, unsigned workers, bool normalize = true);
nlohmann::json to_json(const BenchResult& result);
std::string bench_table(const BenchResult& result);

struct SweepRow {
  std::size_t source_size = 0;
  std::size_t n_unseen = 0;
  std::string method;
  double accuracy = 0.0;
  double class_auc = 0.0;
};

// For each repeat one keyed permutation of the leaf classes; the first k
// become seen for every requested size k, the rest unseen. Rows are means
// over repeats, ordered by size and then method (hat, dap, ens).
std::vector<SweepRow> run_sweep(const Problem& problem, const std::vector<std::size_t>& sizes, int repeats,
                                std::uint64_t seed, const TrainingConfig& training, unsigned workers, bool normalize);
std::vector<std::size_t> resolve_sizes(const std::vector<double>& sizes, std::size_t leaf_count);
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Command layer: each writes its outputs under config.out and returns a
// short summary for stdout.
std::string cmd_train(const RunConfig& config);
std::string cmd_predict(const RunConfig& config);
std::string cmd_eval(const RunConfig& config);
std::string cmd_bench(const RunConfig& config);
std::string cmd_sweep(const RunConfig& config);
std::string cmd_synth(const RunConfig& config);
std::string cmd_propagate(const RunConfig& config);

// Writes a generated benchmark as taxonomy / features / signatures / split files.
void write_synth(const SynthBenchmark& bench, const SynthSpec& spec, const fs::path& dir, FeatureFormat format);

}  // namespace hat
