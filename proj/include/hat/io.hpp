#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "hat/dataset.hpp"
#include "hat/eval.hpp"
#include "hat/labeled_matrix.hpp"
#include "hat/model_bank.hpp"
#include "hat/support_sets.hpp"
#include "hat/taxonomy.hpp"
#include "hat/transfer.hpp"

namespace hat {

namespace fs = std::filesystem;

enum class FeatureFormat { Csv, Binary };
FeatureFormat feature_format_from_string(std::string_view text);

std::string read_text_file(const fs::path& path);
void write_text_file(const fs::path& path, const std::string& content);

// Comma-separated rows; the first row is the header. Blank lines are skipped.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Features:
//   csv    - header `sample_id,class_id,<f_1>,...,<f_d>`
//   binary - "ZSF1", u32 n, u32 d (little endian), n*d little-endian float32
//            row-major, with labels in a sidecar CSV `sample_id,class_id`
//            (default path: <features>.labels.csv)
Dataset load_features(const fs::path& path, FeatureFormat format, const std::optional<fs::path>& labels = std::nullopt,
                      bool l2_normalize = false);
void save_features_csv(const fs::path& path, const Dataset& data);
void save_features_binary(const fs::path& path, const Dataset& data,
                          const std::optional<fs::path>& labels = std::nullopt);
fs::path default_labels_path(const fs::path& features);

// `<id>,<attr_1>,...,<attr_M>` with binary cells.
AttributeSignatureMatrix load_signature_csv(const fs::path& path);
// `class_id,<attr_1>,...` with real cells in [0, 1].
OccurrenceMatrix load_occurrence_csv(const fs::path& path);
// `sample_id,<attr_1>,...` with binary cells.
ImageAttributeLabels load_image_attributes(const fs::path& path);
// `attribute,prior` with p(a = 1) in (0, 1).
std::map<std::string, double> load_attribute_priors(const fs::path& path);

std::string format_double(double value, int significant_digits = 17);

// CSV text for a labeled matrix; `first_column` names the row-id column.
template <typename T>
std::string matrix_csv(const LabeledMatrix<T>& m, const std::string& first_column) {
  std::string out = first_column;
  for (const auto& c : m.col_ids()) out += ',' + c;
  out += '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += m.row_ids()[r];
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if constexpr (std::is_floating_point_v<T>) {
        out += ',' + format_double(m(r, c));
      } else {
        out += ',' + std::to_string(m(r, c));
      }
    }
    out += '\n';
  }
  return out;
}

Taxonomy load_taxonomy(const fs::path& path);
void save_taxonomy(const fs::path& path, const Taxonomy& t);

struct SplitSpec {
  std::vector<std::string> seen;
  std::vector<std::string> unseen;

  // SchemaError on empty lists or overlap.
  void validate() const;
  friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

SplitSpec load_split(const fs::path& path);
SplitSpec split_from_json(const nlohmann::json& j);
void save_split(const fs::path& path, const SplitSpec& split);

nlohmann::json model_bank_to_json(const ModelBank& bank);
ModelBank model_bank_from_json(const nlohmann::json& j);
void save_model_bank(const fs::path& path, const ModelBank& bank);
ModelBank load_model_bank(const fs::path& path);

// `sample_id,predicted_class,<score per class>`, scores to 9 significant digits.
std::string predictions_csv(const ScoreTable& scores, const std::vector<std::string>& predicted);
void save_predictions(const fs::path& path, const ScoreTable& scores, const std::vector<std::string>& predicted);

struct Predictions {
  ScoreTable scores;
  std::vector<std::string> predicted;
};
Predictions load_predictions(const fs::path& path);

std::string skip_report_csv(const ModelBank& bank);
std::string support_sizes_csv(const SupportSets& supports);

}  // namespace hat
