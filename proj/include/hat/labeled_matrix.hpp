#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hat/error.hpp"

namespace hat {

// Dense row-major matrix with string ids on both axes.
template <typename T>
class LabeledMatrix {
 public:
  using value_type = T;

  LabeledMatrix() = default;
  LabeledMatrix(std::vector<std::string> row_ids, std::vector<std::string> col_ids, T fill = T{})
      : row_ids_(std::move(row_ids)), col_ids_(std::move(col_ids)), data_(row_ids_.size() * col_ids_.size(), fill) {
    reindex();
  }

  std::size_t rows() const { return row_ids_.size(); }
  std::size_t cols() const { return col_ids_.size(); }
  bool empty() const { return data_.empty(); }
  const std::vector<std::string>& row_ids() const { return row_ids_; }
  const std::vector<std::string>& col_ids() const { return col_ids_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols(), cols()}; }
  const std::vector<T>& data() const { return data_; }

  std::optional<std::size_t> find_row(std::string_view id) const { return find(row_index_, id); }
  std::optional<std::size_t> find_col(std::string_view id) const { return find(col_index_, id); }

  friend bool operator==(const LabeledMatrix& a, const LabeledMatrix& b) {
    return a.row_ids_ == b.row_ids_ && a.col_ids_ == b.col_ids_ && a.data_ == b.data_;
  }

 private:
  static std::optional<std::size_t> find(const std::unordered_map<std::string, std::size_t>& index,
                                         std::string_view id) {
    auto it = index.find(std::string(id));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  void reindex() {
    for (std::size_t i = 0; i < row_ids_.size(); ++i) {
      if (!row_index_.emplace(row_ids_[i], i).second) throw Error(ErrorCode::SchemaError, "duplicate row id " + row_ids_[i]);
    }
    for (std::size_t i = 0; i < col_ids_.size(); ++i) {
      if (!col_index_.emplace(col_ids_[i], i).second) throw Error(ErrorCode::SchemaError, "duplicate column id " + col_ids_[i]);
    }
  }

  std::vector<std::string> row_ids_;
  std::vector<std::string> col_ids_;
  std::vector<T> data_;
  std::unordered_map<std::string, std::size_t> row_index_;
  std::unordered_map<std::string, std::size_t> col_index_;
};

// Binary class x attribute descriptions.
struct AttributeSignatureMatrix : LabeledMatrix<std::uint8_t> {
  using LabeledMatrix::LabeledMatrix;
};

// Class x attribute occurrence rates in [0, 1].
struct OccurrenceMatrix : LabeledMatrix<double> {
  using LabeledMatrix::LabeledMatrix;
};

// Binary node x attribute activations after bottom-up propagation.
struct NodeAttributeTable : LabeledMatrix<std::uint8_t> {
  using LabeledMatrix::LabeledMatrix;
};

// Binary sample x attribute labels.
struct ImageAttributeLabels : LabeledMatrix<std::uint8_t> {
  using LabeledMatrix::LabeledMatrix;
};

}  // namespace hat
