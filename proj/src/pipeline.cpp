#include "hat/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "hat/baselines.hpp"
#include "hat/classifier.hpp"
#include "hat/error.hpp"
#include "hat/support_sets.hpp"

namespace hat {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Hat:
      return "hat";
    case Method::Dap:
      return "dap";
    case Method::Ens:
      return "ens";
  }
  return "?";
}

Method method_from_string(std::string_view text) {
  if (text == "hat") return Method::Hat;
  if (text == "dap") return Method::Dap;
  if (text == "ens") return Method::Ens;
  throw Error(ErrorCode::SchemaError, "unknown method '" + std::string(text) + "'");
}

TrainingConfig RunConfig::training() const {
  TrainingConfig t;
  t.cost_grid = cost_grid;
  t.folds = folds;
  t.seed = seed;
  t.mode = mode;
  return t;
}

namespace {

void read_path(const nlohmann::json& j, const char* key, std::optional<fs::path>& target) {
  if (j.contains(key)) target = fs::path(j.at(key).get<std::string>());
}

}  // namespace

void apply_json(RunConfig& config, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "config must be a JSON object");
  try {
    read_path(j, "taxonomy", config.taxonomy);
    read_path(j, "features", config.features);
    read_path(j, "labels", config.labels);
    read_path(j, "attributes", config.attributes);
    read_path(j, "split", config.split);
    read_path(j, "out", config.out);
    read_path(j, "model", config.model);
    read_path(j, "predictions", config.predictions);
    read_path(j, "dap_priors", config.dap_priors);
    if (j.contains("feature_format")) {
      config.feature_format = feature_format_from_string(j.at("feature_format").get<std::string>());
    }
    if (j.contains("attr_mode")) config.mode = annotation_mode_from_string(j.at("attr_mode").get<std::string>());
    if (j.contains("class_attr_values")) {
      const auto v = j.at("class_attr_values").get<std::string>();
      if (v != "binary" && v != "occurrence") throw Error(ErrorCode::SchemaError, "class_attr_values: " + v);
      config.occurrence_values = v == "occurrence";
    }
    config.l2_normalize = j.value("l2_normalize", config.l2_normalize);
    if (j.contains("method")) config.method = method_from_string(j.at("method").get<std::string>());
    config.normalize = j.value("normalize", config.normalize);
    if (j.value("no_normalize", false)) config.normalize = false;
    config.fallback_parent = j.value("fallback_parent", config.fallback_parent);
    config.plain_accuracy = j.value("plain_accuracy", config.plain_accuracy);
    config.dump_support = j.value("dump_support", config.dump_support);
    if (j.contains("c_grid")) config.cost_grid = j.at("c_grid").get<std::vector<double>>();
    config.folds = j.value("folds", config.folds);
    config.seed = j.value("seed", config.seed);
    config.workers = j.value("workers", config.workers);
    if (j.contains("sizes")) config.sizes = j.at("sizes").get<std::vector<double>>();
    config.repeats = j.value("repeats", config.repeats);
    if (j.contains("synth")) config.synth = synth_spec_from_json(j.at("synth"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("config: ") + e.what());
  }
}

nlohmann::json to_json(const RunConfig& config) {
  nlohmann::json j;
  auto put = [&](const char* key, const std::optional<fs::path>& p) {
    if (p) j[key] = p->string();
  };
  put("taxonomy", config.taxonomy);
  put("features", config.features);
  put("labels", config.labels);
  put("attributes", config.attributes);
  put("split", config.split);
  put("out", config.out);
  put("model", config.model);
  put("predictions", config.predictions);
  put("dap_priors", config.dap_priors);
  j["feature_format"] = config.feature_format == FeatureFormat::Csv ? "csv" : "binary";
  j["attr_mode"] = std::string(to_string(config.mode));
  j["class_attr_values"] = config.occurrence_values ? "occurrence" : "binary";
  j["l2_normalize"] = config.l2_normalize;
  j["method"] = std::string(to_string(config.method));
  j["normalize"] = config.normalize;
  j["fallback_parent"] = config.fallback_parent;
  j["plain_accuracy"] = config.plain_accuracy;
  j["dump_support"] = config.dump_support;
  j["c_grid"] = config.cost_grid;
  j["folds"] = config.folds;
  j["seed"] = config.seed;
  j["workers"] = config.workers;
  j["sizes"] = config.sizes;
  j["repeats"] = config.repeats;
  j["synth"] = to_json(config.synth);
  return j;
}

Dataset Problem::train_data() const { return data.restrict_to_classes({seen.begin(), seen.end()}); }

Dataset Problem::test_data() const {
  const std::set<std::string> s(seen.begin(), seen.end());
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!s.count(data.sample_classes[i])) rows.push_back(i);
  }
  return data.subset(rows);
}

Problem Problem::with_split(std::vector<std::string> seen_classes) const {
  std::sort(seen_classes.begin(), seen_classes.end());
  const std::set<std::string> s(seen_classes.begin(), seen_classes.end());
  Problem out;
  out.taxonomy = with_seen_leaves(taxonomy, s);
  out.signatures = signatures;
  out.data = data;
  out.mode = mode;
  out.dap_priors = dap_priors;
  out.seen = std::move(seen_classes);
  for (const auto& leaf : out.taxonomy.leaves(NodeKind::UnseenLeaf)) {
    if (signatures.find_row(leaf)) out.unseen.push_back(leaf);
  }
  return out;
}

namespace {

ImageAttributeLabels align_image_labels(const ImageAttributeLabels& labels, const Dataset& data) {
  ImageAttributeLabels out(data.sample_ids, labels.col_ids(), 0);
  for (std::size_t s = 0; s < data.size(); ++s) {
    auto r = labels.find_row(data.sample_ids[s]);
    if (!r) throw Error(ErrorCode::SchemaError, "no attribute labels for sample '" + data.sample_ids[s] + "'");
    for (std::size_t m = 0; m < labels.cols(); ++m) out(s, m) = labels(*r, m);
  }
  return out;
}

void check_leaf(const Taxonomy& t, const std::string& id) {
  if (!t.contains(id)) throw Error(ErrorCode::UnknownNode, "class '" + id + "' is not in the taxonomy");
  if (!t.node(id).is_leaf()) throw Error(ErrorCode::SchemaError, "class '" + id + "' is not a leaf");
}

const fs::path& require(const std::optional<fs::path>& p, const char* flag) {
  if (!p) throw Error(ErrorCode::SchemaError, std::string("missing required option --") + flag);
  if (!fs::exists(*p)) throw Error(ErrorCode::IoError, "no such file: " + p->string());
  return *p;
}

fs::path out_dir(const RunConfig& config) {
  fs::path dir = config.out.value_or(fs::path("."));
  fs::create_directories(dir);
  return dir;
}

std::string fixed(double value, int decimals = 4) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
  return buffer;
}

}  // namespace

Problem load_problem(const RunConfig& config, bool need_features) {
  Problem p;
  p.mode = config.mode;
  Taxonomy t = prune_single_child(load_taxonomy(require(config.taxonomy, "taxonomy")));
  if (config.split) {
    const SplitSpec split = load_split(require(config.split, "split"));
    for (const auto& c : split.seen) check_leaf(t, c);
    for (const auto& c : split.unseen) check_leaf(t, c);
    p.seen = split.seen;
    p.unseen = split.unseen;
    std::sort(p.seen.begin(), p.seen.end());
    std::sort(p.unseen.begin(), p.unseen.end());
    t = with_seen_leaves(t, {p.seen.begin(), p.seen.end()});
  } else {
    p.seen = t.leaves(NodeKind::SeenLeaf);
    p.unseen = t.leaves(NodeKind::UnseenLeaf);
  }
  p.taxonomy = std::move(t);
  if (config.dap_priors) p.dap_priors = load_attribute_priors(*config.dap_priors);

  if (need_features || config.mode == AnnotationMode::PerImage) {
    p.data = load_features(require(config.features, "features"), config.feature_format, config.labels,
                           config.l2_normalize);
    for (const auto& c : p.data.classes()) {
      if (!c.empty()) check_leaf(p.taxonomy, c);
    }
  }

  const fs::path& attributes = require(config.attributes, "attributes");
  if (config.mode == AnnotationMode::PerImage) {
    const ImageAttributeLabels aligned = align_image_labels(load_image_attributes(attributes), p.data);
    p.signatures = binarize_occurrence(class_occurrence(aligned, p.data.sample_classes));
    p.data.attribute_labels = aligned;
  } else if (config.occurrence_values) {
    p.signatures = binarize_occurrence(load_occurrence_csv(attributes));
  } else {
    p.signatures = load_signature_csv(attributes);
  }
  for (const auto& z : p.unseen) {
    if (!p.signatures.find_row(z) && !config.fallback_parent) {
      throw Error(ErrorCode::MissingSignature, "unseen class '" + z + "' has no signature");
    }
  }
  return p;
}

Problem problem_from_synth(const SynthBenchmark& bench) {
  Problem p;
  p.taxonomy = bench.taxonomy;
  p.signatures = bench.signatures;
  p.data = bench.data;
  p.seen = bench.seen;
  p.unseen = bench.unseen;
  return p;
}

NodeAttributeTable problem_table(const Problem& problem) { return propagate(problem.taxonomy, problem.signatures); }

ModelBank train_problem(const Problem& problem, const NodeAttributeTable& table, const TrainingConfig& config,
                        unsigned workers) {
  const Dataset train = problem.train_data();
  train.validate_against(problem.taxonomy);
  return train_model_bank(problem.taxonomy, table, train, problem.signatures, config, workers);
}

namespace {

AttributeSignatureMatrix with_root_classifiers(const AttributeSignatureMatrix& sigs, const ModelBank& bank,
                                               const std::string& root) {
  std::vector<std::string> kept;
  for (const auto& attr : sigs.col_ids()) {
    if (bank.find(root, attr)) kept.push_back(attr);
  }
  AttributeSignatureMatrix out(sigs.row_ids(), kept, 0);
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const std::size_t from = *sigs.find_col(kept[c]);
    for (std::size_t r = 0; r < sigs.rows(); ++r) out(r, c) = sigs(r, from);
  }
  return out;
}

std::optional<std::vector<double>> dap_prior_vector(const Problem& problem, const AttributeSignatureMatrix& sigs) {
  if (!problem.dap_priors) return std::nullopt;
  std::vector<double> out;
  for (const auto& attr : sigs.col_ids()) {
    auto it = problem.dap_priors->find(attr);
    if (it == problem.dap_priors->end()) throw Error(ErrorCode::SchemaError, "no prior for attribute '" + attr + "'");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

Scored predict(const Problem& problem, const NodeAttributeTable& table, const ModelBank& bank, const Dataset& test,
               Method method, bool normalize, bool fallback_parent, unsigned workers, bool drop_untrained) {
  bank.check_dimension(test.dim());
  AttributeSignatureMatrix sigs =
      unseen_signatures(problem.taxonomy, table, problem.signatures, problem.unseen, fallback_parent);
  if (drop_untrained && method == Method::Dap) sigs = with_root_classifiers(sigs, bank, problem.taxonomy.root());
  Scored out;
  switch (method) {
    case Method::Hat:
      out.scores = score_batch(bank, table, problem.taxonomy, sigs, test.features, test.sample_ids, workers);
      break;
    case Method::Dap:
      out.scores = dap_scores(bank, problem.taxonomy.root(), sigs, test.features, test.sample_ids,
                              dap_prior_vector(problem, sigs));
      break;
    case Method::Ens:
      out.scores = ens_scores(bank, problem.taxonomy.root(), sigs, test.features, test.sample_ids);
      break;
  }
  if (normalize && method != Method::Dap) out.scores = normalize_class_scores(out.scores);
  out.predicted = classify(out.scores);
  return out;
}

namespace {

Eigen::VectorXd posterior(const AttributeClassifier& c, const Eigen::MatrixXd& x) {
  Eigen::VectorXd z = (x * c.weights).array() + c.bias;
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

}  // namespace

ScoreTable attribute_scores(const Problem& problem, const NodeAttributeTable& table, const ModelBank& bank,
                            const Dataset& test, Method method) {
  bank.check_dimension(test.dim());
  const Taxonomy& t = problem.taxonomy;
  ScoreTable out;
  out.sample_ids = test.sample_ids;
  std::vector<Eigen::VectorXd> columns;
  for (std::size_t m = 0; m < table.cols(); ++m) {
    const std::string& attr = table.col_ids()[m];
    const AttributeClassifier* root = bank.find(t.root(), attr);
    Eigen::VectorXd column;
    if (method == Method::Hat) {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(test.size()));
      std::size_t classes = 0;
      for (const auto& z : problem.unseen) {
        if (!t.contains(z)) continue;
        Eigen::VectorXd per_class = Eigen::VectorXd::Zero(sum.size());
        std::size_t sources = 0;
        for (std::size_t a : t.ancestor_indices(t.index_of(z))) {
          if (!table(a, m)) continue;
          if (const auto* c = bank.find(t.node_at(a).id, attr)) {
            per_class += posterior(*c, test.features);
            ++sources;
          }
        }
        if (sources == 0) continue;
        sum += per_class / static_cast<double>(sources);
        ++classes;
      }
      if (classes > 0) column = sum / static_cast<double>(classes);
    }
    if (column.size() == 0 && root) column = posterior(*root, test.features);
    if (column.size() == 0) continue;
    out.targets.push_back(attr);
    columns.push_back(std::move(column));
  }
  out.values.resize(static_cast<Eigen::Index>(test.size()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) out.values.col(static_cast<Eigen::Index>(c)) = columns[c];
  return out;
}

EvalReport evaluate(const Problem& problem, const NodeAttributeTable& table, const ModelBank& bank,
                    const Dataset& test, const Scored& scored, Method method) {
  EvalReport report;
  report.method = std::string(to_string(method));
  report.accuracy = multiclass_accuracy(scored.predicted, test.sample_classes);
  report.class_auc = mean_class_auc(scored.scores, test.sample_classes);
  const ImageAttributeLabels truth = attribute_ground_truth(test, problem.signatures, problem.mode);
  report.attribute_auc = mean_attribute_auc(attribute_scores(problem, table, bank, test, method), truth);
  report.levels = level_diagnostics(bank, problem.taxonomy, test, truth);
  report.skipped = bank.skipped;
  return report;
}

const BenchEntry& BenchResult::entry(std::string_view name) const {
  for (const auto& e : entries) {
    if (e.name == name) return e;
  }
  throw Error(ErrorCode::SchemaError, "no bench entry '" + std::string(name) + "'");
}

BenchResult run_bench(const SynthSpec& spec, const TrainingConfig& training, unsigned workers, bool normalize) {
  const SynthBenchmark bench = generate(spec);
  const Problem problem = problem_from_synth(bench);
  const NodeAttributeTable table = problem_table(problem);
  const ModelBank bank = train_problem(problem, table, training, workers);
  const Dataset test = problem.test_data();

  BenchResult result;
  result.spec = spec;
  result.n_unseen = problem.unseen.size();
  result.chance = 1.0 / static_cast<double>(result.n_unseen);
  result.classifiers = bank.classifiers.size();
  result.skipped = bank.skipped.size();
  for (Method m : {Method::Hat, Method::Dap, Method::Ens}) {
    BenchEntry e;
    e.name = std::string(to_string(m));
    e.scored = predict(problem, table, bank, test, m, normalize, false, workers);
    e.report = evaluate(problem, table, bank, test, e.scored, m);
    result.entries.push_back(std::move(e));
  }
  BenchEntry fallback;
  fallback.name = "hat-fallback";
  fallback.scored = predict(problem, table, bank, test, Method::Hat, normalize, true, workers);
  fallback.report = evaluate(problem, table, bank, test, fallback.scored, Method::Hat);
  fallback.report.method = fallback.name;
  result.entries.push_back(std::move(fallback));
  return result;
}

nlohmann::json to_json(const BenchResult& result) {
  nlohmann::json methods = nlohmann::json::object();
  for (const auto& e : result.entries) methods[e.name] = to_json(e.report);
  return {{"spec", to_json(result.spec)},
          {"n_unseen", result.n_unseen},
          {"chance", result.chance},
          {"classifiers", result.classifiers},
          {"skipped", result.skipped},
          {"methods", methods}};
}

std::string bench_table(const BenchResult& result) {
  std::ostringstream os;
  os << "unseen classes " << result.n_unseen << ", chance " << fixed(result.chance) << ", classifiers "
     << result.classifiers << " (" << result.skipped << " skipped)\n";
  os << "method          accuracy  plain     class_auc  attr_auc\n";
  for (const auto& e : result.entries) {
    std::string name = e.name;
    name.resize(16, ' ');
    os << name << fixed(e.report.accuracy.normalized) << "    " << fixed(e.report.accuracy.plain) << "    "
       << fixed(e.report.class_auc.mean) << "     "
       << (e.report.attribute_auc ? fixed(e.report.attribute_auc->mean) : std::string("-")) << "\n";
  }
  return os.str();
}

std::vector<std::size_t> resolve_sizes(const std::vector<double>& sizes, std::size_t leaf_count) {
  std::set<std::size_t> out;
  for (double v : sizes) {
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidSpec, "source sizes must be positive");
    const auto k = static_cast<std::size_t>(v < 1.0 ? std::lround(v * static_cast<double>(leaf_count)) : std::lround(v));
    if (k < 2 || k + 2 > leaf_count) {
      throw Error(ErrorCode::InvalidSpec, "source size " + std::to_string(k) + " leaves fewer than two seen or unseen of " +
                                              std::to_string(leaf_count) + " classes");
    }
    out.insert(k);
  }
  return {out.begin(), out.end()};
}

std::vector<SweepRow> run_sweep(const Problem& problem, const std::vector<std::size_t>& sizes, int repeats,
                                std::uint64_t seed, const TrainingConfig& training, unsigned workers, bool normalize) {
  if (repeats < 1) throw Error(ErrorCode::InvalidSpec, "repeats must be positive");
  std::vector<std::string> leaves;
  {
    const std::set<std::string> with_samples(problem.data.sample_classes.begin(), problem.data.sample_classes.end());
    for (const auto& node : problem.taxonomy.nodes()) {
      if (node.is_leaf() && with_samples.count(node.id) && problem.signatures.find_row(node.id)) {
        leaves.push_back(node.id);
      }
    }
  }
  for (std::size_t k : sizes) {
    if (k < 2 || k + 2 > leaves.size()) throw Error(ErrorCode::InvalidSpec, "source size out of range");
  }
  const std::vector<Method> methods{Method::Hat, Method::Dap, Method::Ens};
  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, double>> sums;  // (size, method) -> sums
  for (int r = 0; r < repeats; ++r) {
    const std::uint64_t key = fold_hash("sweep-" + std::to_string(r), seed);
    std::vector<std::string> order = leaves;
    std::sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
      const auto ha = fold_hash(a, key);
      const auto hb = fold_hash(b, key);
      return ha != hb ? ha < hb : a < b;
    });
    for (std::size_t k : sizes) {
      const Problem p = problem.with_split({order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k)});
      const NodeAttributeTable table = problem_table(p);
      const ModelBank bank = train_problem(p, table, training, workers);
      const Dataset test = p.data.restrict_to_classes({p.unseen.begin(), p.unseen.end()});
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const Scored s = predict(p, table, bank, test, methods[mi], normalize, false, workers, true);
        auto& acc = sums[{k, mi}];
        acc.first += multiclass_accuracy(s.predicted, test.sample_classes).normalized;
        acc.second += mean_class_auc(s.scores, test.sample_classes).mean;
      }
    }
  }
  std::vector<SweepRow> rows;
  for (std::size_t k : sizes) {
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const auto& acc = sums[{k, mi}];
      rows.push_back({k, leaves.size() - k, std::string(to_string(methods[mi])), acc.first / repeats,
                      acc.second / repeats});
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "source_size,n_unseen,method,accuracy,mean_class_auc\n";
  for (const auto& r : rows) {
    out += std::to_string(r.source_size) + ',' + std::to_string(r.n_unseen) + ',' + r.method + ',' +
           format_double(r.accuracy, 9) + ',' + format_double(r.class_auc, 9) + '\n';
  }
  return out;
}

void write_synth(const SynthBenchmark& bench, const SynthSpec& spec, const fs::path& dir, FeatureFormat format) {
  fs::create_directories(dir);
  save_taxonomy(dir / "taxonomy.json", bench.taxonomy);
  if (format == FeatureFormat::Csv) {
    save_features_csv(dir / "features.csv", bench.data);
  } else {
    save_features_binary(dir / "features.bin", bench.data);
  }
  write_text_file(dir / "signatures.csv", matrix_csv(bench.signatures, "class_id"));
  ImageAttributeLabels images = attribute_ground_truth(bench.data, bench.signatures, AnnotationMode::PerClass);
  write_text_file(dir / "image_attributes.csv", matrix_csv(images, "sample_id"));
  save_split(dir / "split.json", SplitSpec{bench.seen, bench.unseen});
  write_text_file(dir / "spec.json", to_json(spec).dump(2) + "\n");
}

std::string cmd_train(const RunConfig& config) {
  const Problem problem = load_problem(config);
  const NodeAttributeTable table = problem_table(problem);
  const ModelBank bank = train_problem(problem, table, config.training(), config.workers);
  const fs::path dir = out_dir(config);
  const fs::path model = config.model.value_or(dir / "model_bank.json");
  save_model_bank(model, bank);
  write_text_file(dir / "skipped.csv", skip_report_csv(bank));
  write_text_file(dir / "propagated.csv", matrix_csv(table, "node"));
  if (config.dump_support) {
    const Dataset train = problem.train_data();
    const SupportSets supports(problem.taxonomy, table, train, problem.signatures, problem.mode);
    write_text_file(dir / "support_sizes.csv", support_sizes_csv(supports));
  }
  return "trained " + std::to_string(bank.classifiers.size()) + " classifiers (" +
         std::to_string(bank.skipped.size()) + " skipped) -> " + model.string() + "\n";
}

std::string cmd_predict(const RunConfig& config) {
  const Problem problem = load_problem(config);
  const NodeAttributeTable table = problem_table(problem);
  const fs::path dir = out_dir(config);
  const ModelBank bank = load_model_bank(config.model ? require(config.model, "model") : dir / "model_bank.json");
  const Dataset test = problem.test_data();
  const Scored scored =
      predict(problem, table, bank, test, config.method, config.normalize, config.fallback_parent, config.workers);
  const fs::path path = config.predictions.value_or(dir / "predictions.csv");
  save_predictions(path, scored.scores, scored.predicted);
  return "scored " + std::to_string(test.size()) + " samples against " + std::to_string(scored.scores.targets.size()) +
         " classes with " + std::string(to_string(config.method)) + " -> " + path.string() + "\n";
}

std::string cmd_eval(const RunConfig& config) {
  const Problem problem = load_problem(config);
  const fs::path dir = out_dir(config);
  const Predictions loaded = load_predictions(config.predictions ? require(config.predictions, "predictions")
                                                                 : dir / "predictions.csv");
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < problem.data.size(); ++i) row_of[problem.data.sample_ids[i]] = i;
  std::vector<std::size_t> rows;
  for (const auto& id : loaded.scores.sample_ids) {
    auto it = row_of.find(id);
    if (it == row_of.end()) throw Error(ErrorCode::SchemaError, "predicted sample '" + id + "' has no features");
    rows.push_back(it->second);
  }
  const Dataset test = problem.data.subset(rows);
  const Scored scored{loaded.scores, loaded.predicted};

  EvalReport report;
  const fs::path model = config.model.value_or(dir / "model_bank.json");
  if (fs::exists(model)) {
    const NodeAttributeTable table = problem_table(problem);
    report = evaluate(problem, table, load_model_bank(model), test, scored, config.method);
  } else {
    report.method = std::string(to_string(config.method));
    report.accuracy = multiclass_accuracy(scored.predicted, test.sample_classes);
    report.class_auc = mean_class_auc(scored.scores, test.sample_classes);
  }
  write_text_file(dir / "eval.json", to_json(report).dump(2) + "\n");
  write_text_file(dir / "eval.txt", to_text(report));
  write_text_file(dir / "confusion.csv", confusion_csv(report.accuracy));
  const double headline = config.plain_accuracy ? report.accuracy.plain : report.accuracy.normalized;
  return std::string(config.plain_accuracy ? "plain" : "normalized") + " accuracy " + fixed(headline) +
         ", mean class AUC " + fixed(report.class_auc.mean) + "\n";
}

std::string cmd_bench(const RunConfig& config) {
  const BenchResult result = run_bench(config.synth, config.training(), config.workers, config.normalize);
  const fs::path dir = out_dir(config);
  write_text_file(dir / "bench.json", to_json(result).dump(2) + "\n");
  const std::string table = bench_table(result);
  write_text_file(dir / "bench.txt", table);
  for (const auto& e : result.entries) {
    save_predictions(dir / ("predictions_" + e.name + ".csv"), e.scored.scores, e.scored.predicted);
  }
  return table;
}

std::string cmd_sweep(const RunConfig& config) {
  Problem problem;
  if (config.taxonomy) {
    problem = load_problem(config);
  } else {
    problem = problem_from_synth(generate(config.synth));
  }
  std::size_t leaf_count = 0;
  for (const auto& node : problem.taxonomy.nodes()) leaf_count += node.is_leaf() ? 1 : 0;
  const auto sizes = resolve_sizes(config.sizes, leaf_count);
  const auto rows =
      run_sweep(problem, sizes, config.repeats, config.seed, config.training(), config.workers, config.normalize);
  const std::string csv = sweep_csv(rows);
  write_text_file(out_dir(config) / "sweep.csv", csv);
  return csv;
}

std::string cmd_synth(const RunConfig& config) {
  const SynthBenchmark bench = generate(config.synth);
  const fs::path dir = out_dir(config);
  write_synth(bench, config.synth, dir, config.feature_format);
  return "wrote " + std::to_string(bench.data.size()) + " samples over " + std::to_string(bench.seen.size()) +
         " seen and " + std::to_string(bench.unseen.size()) + " unseen classes to " + dir.string() + "\n";
}

std::string cmd_propagate(const RunConfig& config) {
  const Problem problem = load_problem(config, config.dump_support);
  const NodeAttributeTable table = problem_table(problem);
  const fs::path dir = out_dir(config);
  save_taxonomy(dir / "taxonomy_pruned.json", problem.taxonomy);
  write_text_file(dir / "propagated.csv", matrix_csv(table, "node"));
  if (config.dump_support) {
    const Dataset train = problem.train_data();
    const SupportSets supports(problem.taxonomy, table, train, problem.signatures, problem.mode);
    write_text_file(dir / "support_sizes.csv", support_sizes_csv(supports));
  }
  return "propagated " + std::to_string(table.cols()) + " attributes over " + std::to_string(table.rows()) +
         " nodes -> " + (dir / "propagated.csv").string() + "\n";
}

}  // namespace hat
