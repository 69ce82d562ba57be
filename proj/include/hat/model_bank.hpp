#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hat/annotation.hpp"
#include "hat/classifier.hpp"
#include "hat/dataset.hpp"
#include "hat/taxonomy.hpp"

namespace hat {

struct TrainingConfig {
  std::vector<double> cost_grid{0.01, 0.1, 1.0, 10.0, 100.0};
  int folds = 5;
  std::uint64_t seed = 0;
  AnnotationMode mode = AnnotationMode::PerClass;
  double fallback_cost = 1.0;
  SolverOptions solver;
};

struct SkipRecord {
  std::string node;
  std::string attribute;
  std::string reason;  // NoContrast or EmptyPositives

  friend bool operator==(const SkipRecord&, const SkipRecord&) = default;
};

// Trained classifiers keyed by (node, attribute), in key order.
struct ModelBank {
  std::size_t dim = 0;
  TrainingConfig config;
  std::map<std::pair<std::string, std::string>, AttributeClassifier> classifiers;
  std::vector<SkipRecord> skipped;

  const AttributeClassifier* find(const std::string& node, const std::string& attribute) const;
  // Throws DimensionMismatch unless `d` equals the bank's feature dimension.
  void check_dimension(std::size_t d) const;
};

// One-vs-all classifiers at the root and child-vs-parent classifiers at every
// other seen node, for every attribute active there. Pairs without positives
// or without contrast are skipped and recorded. Distinct pairs train in
// parallel on `workers` threads; the result does not depend on the count.
ModelBank train_model_bank(const Taxonomy& t, const NodeAttributeTable& table, const Dataset& data,
                           const AttributeSignatureMatrix& signatures, const TrainingConfig& config,
                           unsigned workers = 1);

}  // namespace hat
