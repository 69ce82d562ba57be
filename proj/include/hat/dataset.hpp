#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hat/labeled_matrix.hpp"
#include "hat/taxonomy.hpp"

namespace hat {

enum class AnnotationMode { PerClass, PerImage };

std::string_view to_string(AnnotationMode mode);
AnnotationMode annotation_mode_from_string(std::string_view text);

// Feature rows with per-sample class labels and optional image-level attribute labels.
struct Dataset {
  std::vector<std::string> sample_ids;
  Eigen::MatrixXd features;  // one row per sample
  std::vector<std::string> sample_classes;
  std::optional<ImageAttributeLabels> attribute_labels;  // rows keyed by sample id

  std::size_t size() const { return sample_ids.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }

  // Shape, uniqueness and finiteness checks.
  void validate() const;
  // Every sample class must be a seen leaf of `t`.
  void validate_against(const Taxonomy& t) const;

  Dataset subset(const std::vector<std::size_t>& rows) const;
  Dataset restrict_to_classes(const std::set<std::string>& classes) const;
  std::vector<std::string> classes() const;
};

// Attribute ground truth per sample: image labels when present in per-image
// mode, otherwise the sample's class signature.
ImageAttributeLabels attribute_ground_truth(const Dataset& data, const AttributeSignatureMatrix& signatures,
                                            AnnotationMode mode);

}  // namespace hat
