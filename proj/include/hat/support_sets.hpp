#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "hat/dataset.hpp"
#include "hat/labeled_matrix.hpp"
#include "hat/taxonomy.hpp"

namespace hat {

// Sorted, duplicate-free set of row indices into a Dataset.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(std::vector<std::size_t> rows);

  const std::vector<std::size_t>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  bool contains(std::size_t row) const;

  SampleSet united(const SampleSet& other) const;
  SampleSet minus(const SampleSet& other) const;
  SampleSet intersected(const SampleSet& other) const;
  bool is_subset_of(const SampleSet& other) const;

  friend bool operator==(const SampleSet&, const SampleSet&) = default;

 private:
  std::vector<std::size_t> rows_;
};

struct TrainingSets {
  SampleSet positives;
  SampleSet negatives;
};

// Attribute support sets over a taxonomy. All (node, attribute) supports are
// computed once at construction in a single bottom-up pass (each node reuses
// its children's sets), so the object is read-only afterwards and safe to
// share between training threads.
//
// supp(n, m) is empty whenever the attribute is inactive at n; otherwise it
// is the union of the children's supports and, for seen leaves, the label set.
class SupportSets {
 public:
  SupportSets(const Taxonomy& t, const NodeAttributeTable& table, const Dataset& data,
              const AttributeSignatureMatrix& signatures, AnnotationMode mode);

  SampleSet label_set(std::string_view node, std::string_view attribute) const;
  const SampleSet& support_set(std::string_view node, std::string_view attribute) const;
  const SampleSet& support_at(std::size_t node, std::size_t attribute) const {
    return supports_[node * attribute_count_ + attribute];
  }

  // Child-vs-parent sets; throws NoContrast / EmptyPositives.
  TrainingSets training_sets(std::string_view child, std::string_view attribute) const;
  // One-vs-all sets at the root; throws NoContrast / EmptyPositives.
  TrainingSets root_training_sets(std::string_view attribute) const;

  // Recomputes supp(n, m) recursively without the cache.
  SampleSet support_set_uncached(std::string_view node, std::string_view attribute) const;

  std::size_t attribute_index(std::string_view attribute) const;
  const Taxonomy& taxonomy() const { return *taxonomy_; }
  const NodeAttributeTable& table() const { return *table_; }

 private:
  SampleSet label_set_at(std::size_t node, std::size_t attribute) const;
  SampleSet uncached_at(std::size_t node, std::size_t attribute) const;

  const Taxonomy* taxonomy_;
  const NodeAttributeTable* table_;
  const Dataset* data_;
  const AttributeSignatureMatrix* signatures_;
  AnnotationMode mode_;
  std::size_t attribute_count_;
  std::vector<std::vector<std::size_t>> class_rows_;  // per taxonomy node
  std::vector<std::size_t> image_label_rows_;         // dataset row -> label row
  std::vector<std::size_t> image_label_cols_;         // attribute -> label column
  std::vector<SampleSet> supports_;
};

}  // namespace hat
