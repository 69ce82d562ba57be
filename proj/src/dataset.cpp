#include "hat/dataset.hpp"

#include <cmath>
#include <unordered_set>

#include "hat/error.hpp"

namespace hat {

std::string_view to_string(AnnotationMode mode) {
  return mode == AnnotationMode::PerClass ? "per-class" : "per-image";
}

AnnotationMode annotation_mode_from_string(std::string_view text) {
  if (text == "per-class") return AnnotationMode::PerClass;
  if (text == "per-image") return AnnotationMode::PerImage;
  throw Error(ErrorCode::SchemaError, "unknown annotation mode '" + std::string(text) + "'");
}

void Dataset::validate() const {
  if (static_cast<std::size_t>(features.rows()) != sample_ids.size() || sample_classes.size() != sample_ids.size()) {
    throw Error(ErrorCode::LengthMismatch, "sample ids, features and classes disagree in length");
  }
  std::unordered_set<std::string> ids;
  for (const auto& id : sample_ids) {
    if (!ids.insert(id).second) throw Error(ErrorCode::SchemaError, "duplicate sample id '" + id + "'");
  }
  if (!features.allFinite()) throw Error(ErrorCode::NonFiniteFeature, "features contain NaN or infinity");
  if (attribute_labels) {
    for (const auto& id : sample_ids) {
      if (!attribute_labels->find_row(id)) {
        throw Error(ErrorCode::SchemaError, "sample '" + id + "' has no attribute labels");
      }
    }
  }
}

void Dataset::validate_against(const Taxonomy& t) const {
  for (const auto& c : sample_classes) {
    if (!t.contains(c) || t.node(c).kind != NodeKind::SeenLeaf) {
      throw Error(ErrorCode::SchemaError, "sample class '" + c + "' is not a seen leaf of the taxonomy");
    }
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.sample_ids.push_back(sample_ids[rows[i]]);
    out.sample_classes.push_back(sample_classes[rows[i]]);
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
  }
  out.attribute_labels = attribute_labels;
  return out;
}

Dataset Dataset::restrict_to_classes(const std::set<std::string>& classes) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < size(); ++i) {
    if (classes.count(sample_classes[i])) rows.push_back(i);
  }
  return subset(rows);
}

std::vector<std::string> Dataset::classes() const {
  std::set<std::string> distinct(sample_classes.begin(), sample_classes.end());
  return {distinct.begin(), distinct.end()};
}

ImageAttributeLabels attribute_ground_truth(const Dataset& data, const AttributeSignatureMatrix& signatures,
                                            AnnotationMode mode) {
  ImageAttributeLabels out(data.sample_ids, signatures.col_ids(), 0);
  const bool use_images = mode == AnnotationMode::PerImage && data.attribute_labels.has_value();
  for (std::size_t s = 0; s < data.size(); ++s) {
    for (std::size_t m = 0; m < signatures.cols(); ++m) {
      if (use_images) {
        const auto& labels = *data.attribute_labels;
        auto r = labels.find_row(data.sample_ids[s]);
        auto c = labels.find_col(signatures.col_ids()[m]);
        if (!r || !c) throw Error(ErrorCode::UnknownAttribute, "missing image label for " + data.sample_ids[s]);
        out(s, m) = labels(*r, *c);
      } else {
        auto r = signatures.find_row(data.sample_classes[s]);
        if (!r) throw Error(ErrorCode::MissingSignature, "class '" + data.sample_classes[s] + "' has no signature");
        out(s, m) = signatures(*r, m);
      }
    }
  }
  return out;
}

}  // namespace hat
