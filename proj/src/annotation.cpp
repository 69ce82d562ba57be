#include "hat/annotation.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "hat/error.hpp"

namespace hat {

OccurrenceMatrix class_occurrence(const ImageAttributeLabels& labels, const std::vector<std::string>& sample_classes,
                                  std::vector<std::string> classes) {
  if (sample_classes.size() != labels.rows()) {
    throw Error(ErrorCode::LengthMismatch, "sample class list does not match label rows");
  }
  if (classes.empty()) {
    std::set<std::string> distinct(sample_classes.begin(), sample_classes.end());
    classes.assign(distinct.begin(), distinct.end());
  }
  OccurrenceMatrix out(classes, labels.col_ids(), 0.0);
  std::vector<std::size_t> counts(classes.size(), 0);
  for (std::size_t s = 0; s < labels.rows(); ++s) {
    auto r = out.find_row(sample_classes[s]);
    if (!r) continue;
    ++counts[*r];
    for (std::size_t m = 0; m < labels.cols(); ++m) out(*r, m) += labels(s, m);
  }
  for (std::size_t r = 0; r < classes.size(); ++r) {
    if (counts[r] == 0) throw Error(ErrorCode::EmptyClass, "class '" + classes[r] + "' has no samples");
    for (auto& v : out.row(r)) v /= static_cast<double>(counts[r]);
  }
  return out;
}

AttributeSignatureMatrix binarize_occurrence(const OccurrenceMatrix& occurrence) {
  if (occurrence.empty()) throw Error(ErrorCode::SchemaError, "empty occurrence matrix");
  double sum = 0.0;
  for (double v : occurrence.data()) sum += v;
  const double threshold = sum / static_cast<double>(occurrence.data().size());
  AttributeSignatureMatrix out(occurrence.row_ids(), occurrence.col_ids(), 0);
  for (std::size_t r = 0; r < occurrence.rows(); ++r) {
    for (std::size_t c = 0; c < occurrence.cols(); ++c) out(r, c) = occurrence(r, c) > threshold ? 1 : 0;
  }
  return out;
}

NodeAttributeTable propagate(const Taxonomy& t, const AttributeSignatureMatrix& signatures) {
  std::vector<std::string> ids;
  for (const auto& node : t.nodes()) ids.push_back(node.id);
  NodeAttributeTable table(std::move(ids), signatures.col_ids(), 0);
  const std::size_t m_count = signatures.cols();

  for (std::size_t v : t.post_order()) {
    const Node& node = t.node_at(v);
    if (node.kind == NodeKind::SeenLeaf) {
      auto r = signatures.find_row(node.id);
      if (!r) throw Error(ErrorCode::MissingSignature, "seen class '" + node.id + "' has no signature");
      std::copy_n(signatures.row(*r).begin(), m_count, table.row(v).begin());
    } else if (node.kind == NodeKind::UnseenLeaf) {
      if (auto r = signatures.find_row(node.id)) std::copy_n(signatures.row(*r).begin(), m_count, table.row(v).begin());
    } else {
      auto out = table.row(v);
      for (std::size_t c : t.child_indices(v)) {
        if (t.node_at(c).kind == NodeKind::UnseenLeaf) continue;
        auto in = table.row(c);
        for (std::size_t m = 0; m < m_count; ++m) out[m] |= in[m];
      }
    }
  }
  return table;
}

std::vector<std::uint8_t> parent_signature_fallback(const Taxonomy& t, const NodeAttributeTable& table,
                                                    std::string_view unseen_id) {
  const std::size_t z = t.index_of(unseen_id);
  if (t.node_at(z).kind != NodeKind::UnseenLeaf) {
    throw Error(ErrorCode::NotUnseenLeaf, "'" + std::string(unseen_id) + "' is not an unseen leaf");
  }
  const std::string& parent = t.node_at(t.parent_index(z)).id;
  auto r = table.find_row(parent);
  if (!r) throw Error(ErrorCode::UnknownNode, "no table row for '" + parent + "'");
  auto row = table.row(*r);
  return {row.begin(), row.end()};
}

AttributeSignatureMatrix unseen_signatures(const Taxonomy& t, const NodeAttributeTable& table,
                                           const AttributeSignatureMatrix& signatures,
                                           const std::vector<std::string>& classes, bool fallback_parent) {
  AttributeSignatureMatrix out(classes, table.col_ids(), 0);
  for (std::size_t r = 0; r < classes.size(); ++r) {
    if (fallback_parent) {
      auto row = parent_signature_fallback(t, table, classes[r]);
      std::copy(row.begin(), row.end(), out.row(r).begin());
      continue;
    }
    auto src = signatures.find_row(classes[r]);
    if (!src) throw Error(ErrorCode::MissingSignature, "unseen class '" + classes[r] + "' has no signature");
    for (std::size_t m = 0; m < table.cols(); ++m) {
      auto c = signatures.find_col(table.col_ids()[m]);
      if (!c) throw Error(ErrorCode::UnknownAttribute, "attribute '" + table.col_ids()[m] + "' missing");
      out(r, m) = signatures(*src, *c);
    }
  }
  return out;
}

}  // namespace hat
