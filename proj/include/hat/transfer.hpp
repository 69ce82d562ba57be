#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hat/labeled_matrix.hpp"
#include "hat/model_bank.hpp"
#include "hat/taxonomy.hpp"

namespace hat {

// Samples x targets (attributes or unseen classes).
struct ScoreTable {
  std::vector<std::string> sample_ids;
  std::vector<std::string> targets;
  Eigen::MatrixXd values;
  bool normalized = false;
};

// Mean score of the trained classifiers for `attribute` at the ancestors of
// `unseen` where the attribute is active. Throws AttributeUntransferable when
// no such classifier exists.
double hat_attribute_score(const ModelBank& bank, const NodeAttributeTable& table, const Taxonomy& t,
                           std::string_view unseen, std::string_view attribute, const Eigen::VectorXd& x);

// Mean transferred attribute score over the class's active attributes.
// `signature` is aligned with the table's attribute columns. Untransferable
// attributes are skipped; throws ClassUnscorable when nothing is left.
double hat_class_score(const ModelBank& bank, const NodeAttributeTable& table, const Taxonomy& t,
                       std::string_view unseen, const std::vector<std::uint8_t>& signature, const Eigen::VectorXd& x);

struct UntransferableAttribute {
  std::string unseen_class;
  std::string attribute;
};

// Resolves, once per unseen class, which classifiers feed each of its active
// attributes; scoring a batch then only evaluates those classifiers.
class TransferPlan {
 public:
  // `signatures` rows are unseen classes; columns are matched to the table by attribute id.
  TransferPlan(const ModelBank& bank, const NodeAttributeTable& table, const Taxonomy& t,
               const AttributeSignatureMatrix& signatures);

  ScoreTable score(const Eigen::MatrixXd& features, const std::vector<std::string>& sample_ids,
                   unsigned workers = 1) const;

  const std::vector<std::string>& classes() const { return classes_; }
  const std::vector<UntransferableAttribute>& untransferable() const { return untransferable_; }

 private:
  std::vector<std::string> classes_;
  // Per class, per transferable attribute: columns into weights_/biases_.
  std::vector<std::vector<std::vector<Eigen::Index>>> sources_;
  Eigen::MatrixXd weights_;  // d x classifiers
  Eigen::VectorXd biases_;
  std::vector<UntransferableAttribute> untransferable_;
};

ScoreTable score_batch(const ModelBank& bank, const NodeAttributeTable& table, const Taxonomy& t,
                       const AttributeSignatureMatrix& signatures, const Eigen::MatrixXd& features,
                       const std::vector<std::string>& sample_ids, unsigned workers = 1);

// Column-wise standardization over the batch with population statistics.
// Columns without spread become all zeros.
ScoreTable normalize_class_scores(const ScoreTable& scores);

// Row-wise argmax; ties go to the lexicographically smallest target id.
std::vector<std::string> classify(const ScoreTable& scores);

}  // namespace hat
