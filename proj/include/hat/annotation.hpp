#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hat/labeled_matrix.hpp"
#include "hat/taxonomy.hpp"

namespace hat {

// Per-class mean of image-level attribute labels. `sample_classes` is aligned
// with the rows of `labels`. When `classes` is non-empty it fixes the output
// rows and any listed class without samples raises EmptyClass; otherwise the
// rows are the distinct classes in id order.
OccurrenceMatrix class_occurrence(const ImageAttributeLabels& labels, const std::vector<std::string>& sample_classes,
                                  std::vector<std::string> classes = {});

// Thresholds at the overall mean of the matrix; an entry becomes 1 iff it is
// strictly greater than the mean.
AttributeSignatureMatrix binarize_occurrence(const OccurrenceMatrix& occurrence);

// Bottom-up propagation of seen-leaf signatures. Internal nodes get the OR of
// their seen descendants; unseen-leaf rows are copied when present (zero
// otherwise) and never flow upward.
NodeAttributeTable propagate(const Taxonomy& t, const AttributeSignatureMatrix& signatures);

// Signature of an unseen class whose description is unknown: its parent's row.
std::vector<std::uint8_t> parent_signature_fallback(const Taxonomy& t, const NodeAttributeTable& table,
                                                    std::string_view unseen_id);

// Rows of `signatures` for `classes` (in that order), optionally replaced by
// the parent-fallback row. Columns follow the table's attribute order.
AttributeSignatureMatrix unseen_signatures(const Taxonomy& t, const NodeAttributeTable& table,
                                           const AttributeSignatureMatrix& signatures,
                                           const std::vector<std::string>& classes, bool fallback_parent);

}  // namespace hat
