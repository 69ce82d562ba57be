#include "hat/support_sets.hpp"

#include <algorithm>
#include <iterator>

#include "hat/error.hpp"

namespace hat {

SampleSet::SampleSet(std::vector<std::size_t> rows) : rows_(std::move(rows)) {
  std::sort(rows_.begin(), rows_.end());
  rows_.erase(std::unique(rows_.begin(), rows_.end()), rows_.end());
}

bool SampleSet::contains(std::size_t row) const { return std::binary_search(rows_.begin(), rows_.end(), row); }

SampleSet SampleSet::united(const SampleSet& other) const {
  SampleSet out;
  std::set_union(rows_.begin(), rows_.end(), other.rows_.begin(), other.rows_.end(), std::back_inserter(out.rows_));
  return out;
}

SampleSet SampleSet::minus(const SampleSet& other) const {
  SampleSet out;
  std::set_difference(rows_.begin(), rows_.end(), other.rows_.begin(), other.rows_.end(),
                      std::back_inserter(out.rows_));
  return out;
}

SampleSet SampleSet::intersected(const SampleSet& other) const {
  SampleSet out;
  std::set_intersection(rows_.begin(), rows_.end(), other.rows_.begin(), other.rows_.end(),
                        std::back_inserter(out.rows_));
  return out;
}

bool SampleSet::is_subset_of(const SampleSet& other) const {
  return std::includes(other.rows_.begin(), other.rows_.end(), rows_.begin(), rows_.end());
}

SupportSets::SupportSets(const Taxonomy& t, const NodeAttributeTable& table, const Dataset& data,
                         const AttributeSignatureMatrix& signatures, AnnotationMode mode)
    : taxonomy_(&t),
      table_(&table),
      data_(&data),
      signatures_(&signatures),
      mode_(mode),
      attribute_count_(table.cols()) {
  if (table.rows() != t.size()) throw Error(ErrorCode::SchemaError, "node table does not match taxonomy");
  class_rows_.assign(t.size(), {});
  for (std::size_t s = 0; s < data.size(); ++s) {
    class_rows_[t.index_of(data.sample_classes[s])].push_back(s);
  }
  if (mode == AnnotationMode::PerImage) {
    if (!data.attribute_labels) throw Error(ErrorCode::SchemaError, "per-image mode needs image attribute labels");
    const auto& labels = *data.attribute_labels;
    for (const auto& id : data.sample_ids) {
      auto r = labels.find_row(id);
      if (!r) throw Error(ErrorCode::SchemaError, "sample '" + id + "' has no attribute labels");
      image_label_rows_.push_back(*r);
    }
    for (const auto& attr : table.col_ids()) {
      auto c = labels.find_col(attr);
      if (!c) throw Error(ErrorCode::UnknownAttribute, "image labels lack attribute '" + attr + "'");
      image_label_cols_.push_back(*c);
    }
  }

  supports_.assign(t.size() * attribute_count_, {});
  for (std::size_t v : t.post_order()) {
    for (std::size_t m = 0; m < attribute_count_; ++m) {
      if (!table(v, m)) continue;
      SampleSet acc = label_set_at(v, m);
      for (std::size_t c : t.child_indices(v)) acc = acc.united(supports_[c * attribute_count_ + m]);
      supports_[v * attribute_count_ + m] = std::move(acc);
    }
  }
}

std::size_t SupportSets::attribute_index(std::string_view attribute) const {
  auto c = table_->find_col(attribute);
  if (!c) throw Error(ErrorCode::UnknownAttribute, "unknown attribute '" + std::string(attribute) + "'");
  return *c;
}

SampleSet SupportSets::label_set_at(std::size_t node, std::size_t attribute) const {
  const Node& n = taxonomy_->node_at(node);
  if (n.kind != NodeKind::SeenLeaf) return {};
  const auto& rows = class_rows_[node];
  if (mode_ == AnnotationMode::PerClass) {
    auto r = signatures_->find_row(n.id);
    auto c = signatures_->find_col(table_->col_ids()[attribute]);
    if (!r) throw Error(ErrorCode::MissingSignature, "seen class '" + n.id + "' has no signature");
    if (!c) throw Error(ErrorCode::UnknownAttribute, "signatures lack '" + table_->col_ids()[attribute] + "'");
    return (*signatures_)(*r, *c) ? SampleSet(rows) : SampleSet{};
  }
  std::vector<std::size_t> positive;
  const auto& labels = *data_->attribute_labels;
  for (std::size_t s : rows) {
    if (labels(image_label_rows_[s], image_label_cols_[attribute])) positive.push_back(s);
  }
  return SampleSet(std::move(positive));
}

SampleSet SupportSets::label_set(std::string_view node, std::string_view attribute) const {
  return label_set_at(taxonomy_->index_of(node), attribute_index(attribute));
}

const SampleSet& SupportSets::support_set(std::string_view node, std::string_view attribute) const {
  return support_at(taxonomy_->index_of(node), attribute_index(attribute));
}

SampleSet SupportSets::uncached_at(std::size_t node, std::size_t attribute) const {
  if (!(*table_)(node, attribute)) return {};
  SampleSet acc = label_set_at(node, attribute);
  for (std::size_t c : taxonomy_->child_indices(node)) acc = acc.united(uncached_at(c, attribute));
  return acc;
}

SampleSet SupportSets::support_set_uncached(std::string_view node, std::string_view attribute) const {
  return uncached_at(taxonomy_->index_of(node), attribute_index(attribute));
}

TrainingSets SupportSets::training_sets(std::string_view child, std::string_view attribute) const {
  const std::size_t c = taxonomy_->index_of(child);
  const std::size_t m = attribute_index(attribute);
  const std::size_t p = taxonomy_->parent_index(c);
  if (p == Taxonomy::npos) {
    throw Error(ErrorCode::InvalidParentKind, "the root has no parent; use root_training_sets");
  }
  if (!(*table_)(c, m)) {
    throw Error(ErrorCode::InactiveAttribute,
                "attribute '" + std::string(attribute) + "' is inactive at '" + std::string(child) + "'");
  }
  TrainingSets sets{support_at(c, m), support_at(p, m).minus(support_at(c, m))};
  if (sets.positives.empty()) throw Error(ErrorCode::EmptyPositives, "no positive samples");
  if (sets.negatives.empty()) throw Error(ErrorCode::NoContrast, "child and parent supports coincide");
  return sets;
}

TrainingSets SupportSets::root_training_sets(std::string_view attribute) const {
  const std::size_t root = taxonomy_->root_index();
  const std::size_t m = attribute_index(attribute);
  if (!(*table_)(root, m)) {
    throw Error(ErrorCode::InactiveAttribute, "attribute '" + std::string(attribute) + "' is inactive at the root");
  }
  std::vector<std::size_t> all(data_->size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  TrainingSets sets{support_at(root, m), SampleSet(std::move(all)).minus(support_at(root, m))};
  if (sets.positives.empty()) throw Error(ErrorCode::EmptyPositives, "no positive samples");
  if (sets.negatives.empty()) throw Error(ErrorCode::NoContrast, "attribute present in every training sample");
  return sets;
}

}  // namespace hat
