#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hat/dataset.hpp"
#include "hat/labeled_matrix.hpp"
#include "hat/model_bank.hpp"
#include "hat/taxonomy.hpp"
#include "hat/transfer.hpp"

namespace hat {

struct AccuracyResult {
  double normalized = 0.0;  // mean of per-class accuracies
  double plain = 0.0;       // fraction of correct samples
  std::vector<std::string> classes;
  std::vector<double> per_class;
  LabeledMatrix<std::size_t> confusion;  // ground truth x predicted
};

// `classes`, when given, lists the ground-truth classes that must be present.
AccuracyResult multiclass_accuracy(const std::vector<std::string>& predicted, const std::vector<std::string>& truth,
                                   const std::vector<std::string>& classes = {});

// Area under the ROC curve as the Mann-Whitney statistic with ties counted
// half, via average ranks. Throws DegenerateLabels without both classes.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct MeanAuc {
  double mean = 0.0;
  std::vector<std::string> targets;  // included targets
  std::vector<double> auc;           // aligned with targets
  std::vector<std::string> excluded;  // degenerate ground truth on this set
};

MeanAuc mean_attribute_auc(const ScoreTable& attribute_scores, const ImageAttributeLabels& truth);
MeanAuc mean_class_auc(const ScoreTable& class_scores, const std::vector<std::string>& truth);

struct LevelStats {
  std::size_t depth = 0;
  std::size_t classifiers = 0;
  double precision = 0.0;  // mean over classifiers with a defined precision
  double recall = 0.0;     // mean over classifiers with a defined recall
  std::size_t precision_defined = 0;
  std::size_t recall_defined = 0;
};

// Precision and recall at threshold 0.5 of every classifier in the bank,
// averaged per taxonomy depth. Reporting only.
std::vector<LevelStats> level_diagnostics(const ModelBank& bank, const Taxonomy& t, const Dataset& data,
                                          const ImageAttributeLabels& truth);

// For every target column, the k highest-scoring sample ids (ties by id).
std::map<std::string, std::vector<std::string>> top_ranked(const ScoreTable& scores, std::size_t k);

struct EvalReport {
  std::string method;
  AccuracyResult accuracy;
  MeanAuc class_auc;
  std::optional<MeanAuc> attribute_auc;
  std::vector<LevelStats> levels;
  std::vector<SkipRecord> skipped;
};

nlohmann::json to_json(const EvalReport& report);
std::string to_text(const EvalReport& report);
std::string confusion_csv(const AccuracyResult& accuracy);

}  // namespace hat
