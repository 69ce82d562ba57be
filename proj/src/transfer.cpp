#include "hat/transfer.hpp"

#include <cmath>
#include <map>

#include "hat/error.hpp"
#include "hat/parallel.hpp"

namespace hat {

namespace {

std::size_t column_of(const NodeAttributeTable& table, std::string_view attribute) {
  auto c = table.find_col(attribute);
  if (!c) throw Error(ErrorCode::UnknownAttribute, "unknown attribute '" + std::string(attribute) + "'");
  return *c;
}

// Trained classifiers at ancestors of `unseen` (root first) where `attribute` is active.
std::vector<const AttributeClassifier*> transfer_sources(const ModelBank& bank, const NodeAttributeTable& table,
                                                         const Taxonomy& t, std::size_t unseen,
                                                         std::size_t attribute) {
  std::vector<const AttributeClassifier*> out;
  const std::string& attr = table.col_ids()[attribute];
  for (std::size_t a : t.ancestor_indices(unseen)) {
    if (!table(a, attribute)) continue;
    if (const auto* c = bank.find(t.node_at(a).id, attr)) out.push_back(c);
  }
  return out;
}

}  // namespace

double hat_attribute_score(const ModelBank& bank, const NodeAttributeTable& table, const Taxonomy& t,
                           std::string_view unseen, std::string_view attribute, const Eigen::VectorXd& x) {
  const auto sources = transfer_sources(bank, table, t, t.index_of(unseen), column_of(table, attribute));
  if (sources.empty()) {
    throw Error(ErrorCode::AttributeUntransferable,
                "no ancestor of '" + std::string(unseen) + "' has a classifier for '" + std::string(attribute) + "'");
  }
  double sum = 0.0;
  for (const auto* c : sources) sum += score(*c, x);
  return sum / static_cast<double>(sources.size());
}

double hat_class_score(const ModelBank& bank, const NodeAttributeTable& table, const Taxonomy& t,
                       std::string_view unseen, const std::vector<std::uint8_t>& signature, const Eigen::VectorXd& x) {
  if (signature.size() != table.cols()) throw Error(ErrorCode::DimensionMismatch, "signature width mismatch");
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t m = 0; m < signature.size(); ++m) {
    if (!signature[m]) continue;
    try {
      sum += hat_attribute_score(bank, table, t, unseen, table.col_ids()[m], x);
      ++used;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AttributeUntransferable) throw;
    }
  }
  if (used == 0) {
    throw Error(ErrorCode::ClassUnscorable, "class '" + std::string(unseen) + "' has no transferable attribute");
  }
  return sum / static_cast<double>(used);
}

TransferPlan::TransferPlan(const ModelBank& bank, const NodeAttributeTable& table, const Taxonomy& t,
                           const AttributeSignatureMatrix& signatures)
    : classes_(signatures.row_ids()) {
  std::map<const AttributeClassifier*, Eigen::Index> column;
  std::vector<const AttributeClassifier*> used;
  sources_.resize(classes_.size());
  for (std::size_t r = 0; r < classes_.size(); ++r) {
    const std::size_t z = t.index_of(classes_[r]);
    for (std::size_t m = 0; m < signatures.cols(); ++m) {
      if (!signatures(r, m)) continue;
      const std::string& attr = signatures.col_ids()[m];
      const auto sources = transfer_sources(bank, table, t, z, column_of(table, attr));
      if (sources.empty()) {
        untransferable_.push_back({classes_[r], attr});
        continue;
      }
      std::vector<Eigen::Index> cols;
      for (const auto* c : sources) {
        auto [it, inserted] = column.emplace(c, static_cast<Eigen::Index>(used.size()));
        if (inserted) used.push_back(c);
        cols.push_back(it->second);
      }
      sources_[r].push_back(std::move(cols));
    }
    if (sources_[r].empty()) {
      throw Error(ErrorCode::ClassUnscorable, "class '" + classes_[r] + "' has no transferable attribute");
    }
  }
  weights_.resize(static_cast<Eigen::Index>(bank.dim), static_cast<Eigen::Index>(used.size()));
  biases_.resize(static_cast<Eigen::Index>(used.size()));
  for (std::size_t k = 0; k < used.size(); ++k) {
    weights_.col(static_cast<Eigen::Index>(k)) = used[k]->weights;
    biases_(static_cast<Eigen::Index>(k)) = used[k]->bias;
  }
}

ScoreTable TransferPlan::score(const Eigen::MatrixXd& features, const std::vector<std::string>& sample_ids,
                               unsigned workers) const {
  if (features.cols() != weights_.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "feature dimension does not match model bank");
  }
  if (static_cast<std::size_t>(features.rows()) != sample_ids.size()) {
    throw Error(ErrorCode::LengthMismatch, "feature rows and sample ids differ");
  }
  ScoreTable out{sample_ids, classes_, Eigen::MatrixXd::Zero(features.rows(), static_cast<Eigen::Index>(classes_.size())),
                 false};
  constexpr Eigen::Index kChunk = 256;
  const auto chunks = static_cast<std::size_t>((features.rows() + kChunk - 1) / kChunk);
  parallel_for(chunks, workers, [&](std::size_t chunk) {
    const Eigen::Index begin = static_cast<Eigen::Index>(chunk) * kChunk;
    const Eigen::Index rows = std::min(kChunk, features.rows() - begin);
    Eigen::MatrixXd z = features.middleRows(begin, rows) * weights_;
    z.rowwise() += biases_.transpose();
    const Eigen::MatrixXd probs = z.unaryExpr([](double v) { return sigmoid(v); });
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (std::size_t r = 0; r < classes_.size(); ++r) {
        double class_sum = 0.0;
        for (const auto& cols : sources_[r]) {
          double attr_sum = 0.0;
          for (Eigen::Index c : cols) attr_sum += probs(i, c);
          class_sum += attr_sum / static_cast<double>(cols.size());
        }
        out.values(begin + i, static_cast<Eigen::Index>(r)) = class_sum / static_cast<double>(sources_[r].size());
      }
    }
  });
  return out;
}

ScoreTable score_batch(const ModelBank& bank, const NodeAttributeTable& table, const Taxonomy& t,
                       const AttributeSignatureMatrix& signatures, const Eigen::MatrixXd& features,
                       const std::vector<std::string>& sample_ids, unsigned workers) {
  return TransferPlan(bank, table, t, signatures).score(features, sample_ids, workers);
}

ScoreTable normalize_class_scores(const ScoreTable& scores) {
  if (scores.normalized) throw Error(ErrorCode::SchemaError, "scores are already normalized");
  const Eigen::Index n = scores.values.rows();
  if (n < 2) throw Error(ErrorCode::TooFewSamples, "normalization needs at least two samples");
  ScoreTable out = scores;
  for (Eigen::Index c = 0; c < scores.values.cols(); ++c) {
    auto col = out.values.col(c);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().mean();
    const double sd = std::sqrt(var);
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
      col.setZero();
    } else {
      col = (col.array() - mean) / sd;
    }
  }
  out.normalized = true;
  return out;
}

std::vector<std::string> classify(const ScoreTable& scores) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(scores.values.rows()));
  for (Eigen::Index i = 0; i < scores.values.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.targets.size(); ++c) {
      const double v = scores.values(i, static_cast<Eigen::Index>(c));
      const double b = scores.values(i, static_cast<Eigen::Index>(best));
      if (v > b || (v == b && scores.targets[c] < scores.targets[best])) best = c;
    }
    out.push_back(scores.targets.empty() ? std::string{} : scores.targets[best]);
  }
  return out;
}

}  // namespace hat
