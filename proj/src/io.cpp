#include "hat/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "hat/error.hpp"

namespace hat {

FeatureFormat feature_format_from_string(std::string_view text) {
  if (text == "csv") return FeatureFormat::Csv;
  if (text == "binary") return FeatureFormat::Binary;
  throw Error(ErrorCode::SchemaError, "unknown feature format '" + std::string(text) + "'");
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string format_double(double value, int significant_digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", significant_digits, value);
  return buffer;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

namespace {

double parse_number(const std::string& cell, const fs::path& path) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw Error(ErrorCode::ParseError, path.string() + ": bad number '" + cell + "'");
  return value;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, std::size_t min_columns) {
  auto rows = parse_csv(read_text_file(path));
  if (rows.empty()) throw Error(ErrorCode::ParseError, path.string() + ": missing header row");
  if (rows.front().size() < min_columns) throw Error(ErrorCode::ParseError, path.string() + ": too few columns");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) {
      throw Error(ErrorCode::DimensionMismatch, path.string() + ": row " + std::to_string(r) + " has " +
                                                    std::to_string(rows[r].size()) + " cells, header has " +
                                                    std::to_string(rows.front().size()));
    }
  }
  return rows;
}

template <typename Matrix>
Matrix read_matrix(const fs::path& path, bool binary_cells) {
  const auto rows = read_csv(path, 1);
  std::vector<std::string> row_ids;
  for (std::size_t r = 1; r < rows.size(); ++r) row_ids.push_back(rows[r][0]);
  Matrix out(row_ids, {rows.front().begin() + 1, rows.front().end()});
  for (std::size_t r = 1; r < rows.size(); ++r) {
    for (std::size_t c = 1; c < rows[r].size(); ++c) {
      const double v = parse_number(rows[r][c], path);
      if (binary_cells && v != 0.0 && v != 1.0) {
        throw Error(ErrorCode::SchemaError, path.string() + ": expected 0/1, got '" + rows[r][c] + "'");
      }
      if (!binary_cells && !(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::SchemaError, path.string() + ": occurrence outside [0, 1]: '" + rows[r][c] + "'");
      }
      out(r - 1, c - 1) = static_cast<typename Matrix::value_type>(v);
    }
  }
  return out;
}

void read_labels(const fs::path& path, Dataset& data) {
  const auto rows = read_csv(path, 2);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    data.sample_ids.push_back(rows[r][0]);
    data.sample_classes.push_back(rows[r][1]);
  }
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  return v;
}

}  // namespace

fs::path default_labels_path(const fs::path& features) { return fs::path(features.string() + ".labels.csv"); }

Dataset load_features(const fs::path& path, FeatureFormat format, const std::optional<fs::path>& labels,
                      bool l2_normalize) {
  Dataset data;
  if (format == FeatureFormat::Csv) {
    const auto rows = read_csv(path, 3);
    const std::size_t n = rows.size() - 1;
    const std::size_t d = rows.front().size() - 2;
    data.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < n; ++r) {
      data.sample_ids.push_back(rows[r + 1][0]);
      data.sample_classes.push_back(rows[r + 1][1]);
      for (std::size_t k = 0; k < d; ++k) {
        data.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = parse_number(rows[r + 1][k + 2], path);
      }
    }
    if (labels) {
      Dataset sidecar;
      read_labels(*labels, sidecar);
      data.sample_classes = sidecar.sample_classes;
    }
  } else {
    const std::string bytes = read_text_file(path);
    if (bytes.size() < 12 || bytes.compare(0, 4, "ZSF1") != 0) {
      throw Error(ErrorCode::ParseError, path.string() + ": not a ZSF1 feature file");
    }
    const std::uint32_t n = get_u32(bytes, 4);
    const std::uint32_t d = get_u32(bytes, 8);
    if (bytes.size() != 12 + std::size_t{4} * n * d) {
      throw Error(ErrorCode::ParseError, path.string() + ": payload size does not match header");
    }
    data.features.resize(n, d);
    std::size_t offset = 12;
    for (std::uint32_t r = 0; r < n; ++r) {
      for (std::uint32_t k = 0; k < d; ++k, offset += 4) {
        data.features(r, k) = static_cast<double>(std::bit_cast<float>(get_u32(bytes, offset)));
      }
    }
    read_labels(labels.value_or(default_labels_path(path)), data);
  }
  if (data.sample_classes.size() != data.size() || static_cast<std::size_t>(data.features.rows()) != data.size()) {
    throw Error(ErrorCode::DimensionMismatch, path.string() + ": labels do not match feature rows");
  }
  data.validate();
  if (l2_normalize) {
    for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
      const double norm = data.features.row(r).norm();
      if (norm > 0.0) data.features.row(r) /= norm;
    }
  }
  return data;
}

void save_features_csv(const fs::path& path, const Dataset& data) {
  std::string out = "sample_id,class_id";
  for (std::size_t k = 0; k < data.dim(); ++k) out += ",f" + std::to_string(k);
  out += '\n';
  for (std::size_t r = 0; r < data.size(); ++r) {
    out += data.sample_ids[r] + ',' + data.sample_classes[r];
    for (std::size_t k = 0; k < data.dim(); ++k) {
      out += ',' + format_double(data.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

void save_features_binary(const fs::path& path, const Dataset& data, const std::optional<fs::path>& labels) {
  std::string out = "ZSF1";
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  put_u32(out, static_cast<std::uint32_t>(data.dim()));
  for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
    for (Eigen::Index k = 0; k < data.features.cols(); ++k) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(data.features(r, k))));
    }
  }
  write_text_file(path, out);
  std::string sidecar = "sample_id,class_id\n";
  for (std::size_t r = 0; r < data.size(); ++r) sidecar += data.sample_ids[r] + ',' + data.sample_classes[r] + '\n';
  write_text_file(labels.value_or(default_labels_path(path)), sidecar);
}

AttributeSignatureMatrix load_signature_csv(const fs::path& path) {
  return read_matrix<AttributeSignatureMatrix>(path, true);
}

OccurrenceMatrix load_occurrence_csv(const fs::path& path) { return read_matrix<OccurrenceMatrix>(path, false); }

ImageAttributeLabels load_image_attributes(const fs::path& path) {
  return read_matrix<ImageAttributeLabels>(path, true);
}

std::map<std::string, double> load_attribute_priors(const fs::path& path) {
  const auto rows = read_csv(path, 2);
  std::map<std::string, double> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double p = parse_number(rows[r][1], path);
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::SchemaError, path.string() + ": prior outside (0, 1)");
    if (!out.emplace(rows[r][0], p).second) {
      throw Error(ErrorCode::SchemaError, path.string() + ": duplicate attribute '" + rows[r][0] + "'");
    }
  }
  return out;
}

Taxonomy load_taxonomy(const fs::path& path) { return parse_taxonomy(read_text_file(path)); }

void save_taxonomy(const fs::path& path, const Taxonomy& t) { write_text_file(path, taxonomy_to_json(t).dump(2) + "\n"); }

void SplitSpec::validate() const {
  if (seen.empty()) throw Error(ErrorCode::SchemaError, "split has no seen classes");
  if (unseen.empty()) throw Error(ErrorCode::SchemaError, "split has no unseen classes");
  std::set<std::string> s(seen.begin(), seen.end());
  std::set<std::string> u(unseen.begin(), unseen.end());
  if (s.size() != seen.size() || u.size() != unseen.size()) {
    throw Error(ErrorCode::SchemaError, "split lists a class twice");
  }
  for (const auto& c : unseen) {
    if (s.count(c)) throw Error(ErrorCode::SchemaError, "class '" + c + "' is both seen and unseen");
  }
}

SplitSpec split_from_json(const nlohmann::json& j) {
  SplitSpec split;
  try {
    split.seen = j.at("seen").get<std::vector<std::string>>();
    split.unseen = j.at("unseen").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, e.what());
  }
  split.validate();
  return split;
}

SplitSpec load_split(const fs::path& path) {
  try {
    return split_from_json(nlohmann::json::parse(read_text_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

void save_split(const fs::path& path, const SplitSpec& split) {
  write_text_file(path, nlohmann::json{{"seen", split.seen}, {"unseen", split.unseen}}.dump(2) + "\n");
}

nlohmann::json model_bank_to_json(const ModelBank& bank) {
  const auto& cfg = bank.config;
  nlohmann::json meta{{"d", bank.dim},
                      {"cost_grid", cfg.cost_grid},
                      {"folds", cfg.folds},
                      {"seed", cfg.seed},
                      {"annotation_mode", std::string(to_string(cfg.mode))},
                      {"fallback_cost", cfg.fallback_cost},
                      {"gradient_tolerance", cfg.solver.gradient_tolerance},
                      {"max_iterations", cfg.solver.max_iterations},
                      {"history", cfg.solver.history}};
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : bank.skipped) skipped.push_back({{"node", s.node}, {"attr", s.attribute}, {"reason", s.reason}});
  nlohmann::json classifiers = nlohmann::json::array();
  for (const auto& [key, c] : bank.classifiers) {
    classifiers.push_back({{"node", c.node},
                           {"attr", c.attribute},
                           {"scheme", std::string(to_string(c.scheme))},
                           {"cost", c.cost},
                           {"cost_from_fallback", c.cost_from_fallback},
                           {"bias", c.bias},
                           {"weights", std::vector<double>(c.weights.data(), c.weights.data() + c.weights.size())},
                           {"iterations", c.solver.iterations},
                           {"converged", c.solver.converged},
                           {"gradient_norm", c.solver.gradient_norm},
                           {"objective", c.solver.objective}});
  }
  return {{"meta", meta}, {"skipped", skipped}, {"classifiers", classifiers}};
}

ModelBank model_bank_from_json(const nlohmann::json& j) {
  ModelBank bank;
  try {
    const auto& meta = j.at("meta");
    bank.dim = meta.at("d").get<std::size_t>();
    bank.config.cost_grid = meta.at("cost_grid").get<std::vector<double>>();
    bank.config.folds = meta.at("folds").get<int>();
    bank.config.seed = meta.at("seed").get<std::uint64_t>();
    bank.config.mode = annotation_mode_from_string(meta.at("annotation_mode").get<std::string>());
    bank.config.fallback_cost = meta.value("fallback_cost", 1.0);
    bank.config.solver.gradient_tolerance = meta.value("gradient_tolerance", 1e-6);
    bank.config.solver.max_iterations = meta.value("max_iterations", 10000);
    bank.config.solver.history = meta.value("history", 10);
    for (const auto& s : j.at("skipped")) {
      bank.skipped.push_back({s.at("node").get<std::string>(), s.at("attr").get<std::string>(),
                              s.at("reason").get<std::string>()});
    }
    for (const auto& e : j.at("classifiers")) {
      AttributeClassifier c;
      c.node = e.at("node").get<std::string>();
      c.attribute = e.at("attr").get<std::string>();
      c.scheme = scheme_from_string(e.at("scheme").get<std::string>());
      c.cost = e.at("cost").get<double>();
      c.cost_from_fallback = e.value("cost_from_fallback", false);
      c.bias = e.at("bias").get<double>();
      const auto w = e.at("weights").get<std::vector<double>>();
      if (w.size() != bank.dim) {
        throw Error(ErrorCode::DimensionMismatch, "classifier (" + c.node + ", " + c.attribute + ") has " +
                                                      std::to_string(w.size()) + " weights, expected " +
                                                      std::to_string(bank.dim));
      }
      if (!(c.cost > 0.0)) throw Error(ErrorCode::SchemaError, "classifier cost must be positive");
      c.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
      c.solver.iterations = e.value("iterations", 0);
      c.solver.converged = e.value("converged", true);
      c.solver.gradient_norm = e.value("gradient_norm", 0.0);
      c.solver.objective = e.value("objective", 0.0);
      auto key = std::make_pair(c.node, c.attribute);
      if (!bank.classifiers.emplace(std::move(key), std::move(c)).second) {
        throw Error(ErrorCode::SchemaError, "duplicate classifier entry");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, e.what());
  }
  return bank;
}

void save_model_bank(const fs::path& path, const ModelBank& bank) {
  write_text_file(path, model_bank_to_json(bank).dump(1) + "\n");
}

ModelBank load_model_bank(const fs::path& path) {
  try {
    return model_bank_from_json(nlohmann::json::parse(read_text_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

std::string predictions_csv(const ScoreTable& scores, const std::vector<std::string>& predicted) {
  if (predicted.size() != scores.sample_ids.size()) throw Error(ErrorCode::LengthMismatch, "prediction count");
  std::string out = "sample_id,predicted_class";
  for (const auto& t : scores.targets) out += ',' + t;
  out += '\n';
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    out += scores.sample_ids[i] + ',' + predicted[i];
    for (std::size_t c = 0; c < scores.targets.size(); ++c) {
      out += ',' + format_double(scores.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)), 9);
    }
    out += '\n';
  }
  return out;
}

void save_predictions(const fs::path& path, const ScoreTable& scores, const std::vector<std::string>& predicted) {
  write_text_file(path, predictions_csv(scores, predicted));
}

Predictions load_predictions(const fs::path& path) {
  const auto rows = read_csv(path, 2);
  Predictions out;
  out.scores.targets.assign(rows.front().begin() + 2, rows.front().end());
  out.scores.values.resize(static_cast<Eigen::Index>(rows.size() - 1),
                           static_cast<Eigen::Index>(out.scores.targets.size()));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    out.scores.sample_ids.push_back(rows[r][0]);
    out.predicted.push_back(rows[r][1]);
    for (std::size_t c = 2; c < rows[r].size(); ++c) {
      out.scores.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 2)) =
          parse_number(rows[r][c], path);
    }
  }
  return out;
}

std::string skip_report_csv(const ModelBank& bank) {
  std::string out = "node,attribute,reason\n";
  for (const auto& s : bank.skipped) out += s.node + ',' + s.attribute + ',' + s.reason + '\n';
  return out;
}

std::string support_sizes_csv(const SupportSets& supports) {
  const auto& t = supports.taxonomy();
  const auto& table = supports.table();
  std::string out = "node,attribute,active,support_size\n";
  for (std::size_t v = 0; v < t.size(); ++v) {
    for (std::size_t m = 0; m < table.cols(); ++m) {
      out += t.node_at(v).id + ',' + table.col_ids()[m] + ',' + std::to_string(table(v, m)) + ',' +
             std::to_string(supports.support_at(v, m).size()) + '\n';
    }
  }
  return out;
}

}  // namespace hat
