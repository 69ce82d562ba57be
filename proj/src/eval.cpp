#include "hat/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "hat/error.hpp"

namespace hat {

AccuracyResult multiclass_accuracy(const std::vector<std::string>& predicted, const std::vector<std::string>& truth,
                                   const std::vector<std::string>& classes) {
  if (predicted.size() != truth.size()) throw Error(ErrorCode::LengthMismatch, "prediction and truth lengths differ");
  std::set<std::string> gt_classes(truth.begin(), truth.end());
  for (const auto& c : classes) {
    if (!gt_classes.count(c)) throw Error(ErrorCode::EmptyGtClass, "class '" + c + "' has no test samples");
  }
  if (gt_classes.empty()) throw Error(ErrorCode::EmptyGtClass, "no ground truth");
  std::set<std::string> all_labels(gt_classes);
  all_labels.insert(predicted.begin(), predicted.end());

  AccuracyResult out;
  out.classes.assign(gt_classes.begin(), gt_classes.end());
  out.confusion = LabeledMatrix<std::size_t>(out.classes, {all_labels.begin(), all_labels.end()}, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++out.confusion(*out.confusion.find_row(truth[i]), *out.confusion.find_col(predicted[i]));
    if (truth[i] == predicted[i]) ++correct;
  }
  for (std::size_t r = 0; r < out.classes.size(); ++r) {
    auto row = out.confusion.row(r);
    const std::size_t total = std::accumulate(row.begin(), row.end(), std::size_t{0});
    const std::size_t hits = out.confusion(r, *out.confusion.find_col(out.classes[r]));
    out.per_class.push_back(static_cast<double>(hits) / static_cast<double>(total));
  }
  out.normalized = std::accumulate(out.per_class.begin(), out.per_class.end(), 0.0) /
                   static_cast<double>(out.per_class.size());
  out.plain = static_cast<double>(correct) / static_cast<double>(truth.size());
  return out;
}

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1 .. j share their average.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        positive_rank_sum += rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw Error(ErrorCode::DegenerateLabels, "need positives and negatives");
  const double p = static_cast<double>(positives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

namespace {

MeanAuc finish(MeanAuc out) {
  if (!out.auc.empty()) {
    out.mean = std::accumulate(out.auc.begin(), out.auc.end(), 0.0) / static_cast<double>(out.auc.size());
  }
  return out;
}

}  // namespace

MeanAuc mean_attribute_auc(const ScoreTable& attribute_scores, const ImageAttributeLabels& truth) {
  MeanAuc out;
  const auto n = static_cast<std::size_t>(attribute_scores.values.rows());
  std::vector<std::size_t> truth_rows;
  for (const auto& id : attribute_scores.sample_ids) {
    auto r = truth.find_row(id);
    if (!r) throw Error(ErrorCode::SchemaError, "no attribute ground truth for sample '" + id + "'");
    truth_rows.push_back(*r);
  }
  for (std::size_t m = 0; m < attribute_scores.targets.size(); ++m) {
    const std::string& attr = attribute_scores.targets[m];
    auto c = truth.find_col(attr);
    if (!c) throw Error(ErrorCode::UnknownAttribute, "no ground truth for attribute '" + attr + "'");
    std::vector<double> scores(n);
    std::vector<std::uint8_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = attribute_scores.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m));
      labels[i] = truth(truth_rows[i], *c);
    }
    const auto positives = std::count(labels.begin(), labels.end(), 1);
    if (positives == 0 || static_cast<std::size_t>(positives) == n) {
      out.excluded.push_back(attr);
      continue;
    }
    out.targets.push_back(attr);
    out.auc.push_back(roc_auc(scores, labels));
  }
  return finish(std::move(out));
}

MeanAuc mean_class_auc(const ScoreTable& class_scores, const std::vector<std::string>& truth) {
  const auto n = static_cast<std::size_t>(class_scores.values.rows());
  if (truth.size() != n) throw Error(ErrorCode::LengthMismatch, "truth does not match score rows");
  MeanAuc out;
  for (std::size_t c = 0; c < class_scores.targets.size(); ++c) {
    std::vector<double> scores(n);
    std::vector<std::uint8_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = class_scores.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
      labels[i] = truth[i] == class_scores.targets[c] ? 1 : 0;
    }
    const auto positives = std::count(labels.begin(), labels.end(), 1);
    if (positives == 0 || static_cast<std::size_t>(positives) == n) {
      out.excluded.push_back(class_scores.targets[c]);
      continue;
    }
    out.targets.push_back(class_scores.targets[c]);
    out.auc.push_back(roc_auc(scores, labels));
  }
  return finish(std::move(out));
}

std::vector<LevelStats> level_diagnostics(const ModelBank& bank, const Taxonomy& t, const Dataset& data,
                                          const ImageAttributeLabels& truth) {
  bank.check_dimension(data.dim());
  std::vector<std::size_t> truth_rows;
  for (const auto& id : data.sample_ids) {
    auto r = truth.find_row(id);
    if (!r) throw Error(ErrorCode::SchemaError, "no attribute ground truth for sample '" + id + "'");
    truth_rows.push_back(*r);
  }
  struct Acc {
    std::size_t classifiers = 0;
    double precision = 0.0;
    double recall = 0.0;
    std::size_t precision_defined = 0;
    std::size_t recall_defined = 0;
  };
  std::map<std::size_t, Acc> by_depth;
  for (const auto& [key, c] : bank.classifiers) {
    if (!t.contains(c.node)) continue;
    auto col = truth.find_col(c.attribute);
    if (!col) continue;
    Acc& acc = by_depth[t.depth(c.node)];
    ++acc.classifiers;
    Eigen::VectorXd z = (data.features * c.weights).array() + c.bias;
    std::size_t tp = 0, fp = 0, fn = 0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const bool predicted = z(i) >= 0.0;  // sigmoid >= 0.5
      const bool actual = truth(truth_rows[static_cast<std::size_t>(i)], *col) != 0;
      if (predicted && actual) ++tp;
      if (predicted && !actual) ++fp;
      if (!predicted && actual) ++fn;
    }
    if (tp + fp > 0) {
      acc.precision += static_cast<double>(tp) / static_cast<double>(tp + fp);
      ++acc.precision_defined;
    }
    if (tp + fn > 0) {
      acc.recall += static_cast<double>(tp) / static_cast<double>(tp + fn);
      ++acc.recall_defined;
    }
  }
  std::vector<LevelStats> out;
  for (const auto& [depth, acc] : by_depth) {
    LevelStats row;
    row.depth = depth;
    row.classifiers = acc.classifiers;
    row.precision_defined = acc.precision_defined;
    row.recall_defined = acc.recall_defined;
    row.precision = acc.precision_defined ? acc.precision / static_cast<double>(acc.precision_defined) : 0.0;
    row.recall = acc.recall_defined ? acc.recall / static_cast<double>(acc.recall_defined) : 0.0;
    out.push_back(row);
  }
  return out;
}

std::map<std::string, std::vector<std::string>> top_ranked(const ScoreTable& scores, std::size_t k) {
  std::map<std::string, std::vector<std::string>> out;
  const auto n = static_cast<std::size_t>(scores.values.rows());
  for (std::size_t c = 0; c < scores.targets.size(); ++c) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto col = static_cast<Eigen::Index>(c);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double sa = scores.values(static_cast<Eigen::Index>(a), col);
      const double sb = scores.values(static_cast<Eigen::Index>(b), col);
      return sa != sb ? sa > sb : scores.sample_ids[a] < scores.sample_ids[b];
    });
    auto& ids = out[scores.targets[c]];
    for (std::size_t i = 0; i < std::min(k, n); ++i) ids.push_back(scores.sample_ids[order[i]]);
  }
  return out;
}

namespace {

nlohmann::json auc_json(const MeanAuc& auc) {
  nlohmann::json per = nlohmann::json::object();
  for (std::size_t i = 0; i < auc.targets.size(); ++i) per[auc.targets[i]] = auc.auc[i];
  return {{"mean", auc.mean}, {"per_target", per}, {"excluded", auc.excluded}};
}

}  // namespace

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json per_class = nlohmann::json::object();
  for (std::size_t i = 0; i < report.accuracy.classes.size(); ++i) {
    per_class[report.accuracy.classes[i]] = report.accuracy.per_class[i];
  }
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& row : report.levels) {
    levels.push_back({{"depth", row.depth},
                      {"classifiers", row.classifiers},
                      {"precision", row.precision},
                      {"recall", row.recall},
                      {"precision_defined", row.precision_defined},
                      {"recall_defined", row.recall_defined}});
  }
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : report.skipped) skipped.push_back({{"node", s.node}, {"attr", s.attribute}, {"reason", s.reason}});
  nlohmann::json out{{"method", report.method},
                     {"normalized_accuracy", report.accuracy.normalized},
                     {"plain_accuracy", report.accuracy.plain},
                     {"per_class_accuracy", per_class},
                     {"class_auc", auc_json(report.class_auc)},
                     {"levels", levels},
                     {"skipped", skipped}};
  if (report.attribute_auc) out["attribute_auc"] = auc_json(*report.attribute_auc);
  return out;
}

std::string to_text(const EvalReport& report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "method                      " << report.method << "\n";
  os << "normalized accuracy         " << report.accuracy.normalized << "\n";
  os << "plain accuracy              " << report.accuracy.plain << "\n";
  os << "mean class AUC              " << report.class_auc.mean << "\n";
  if (report.attribute_auc) os << "mean attribute AUC          " << report.attribute_auc->mean << "\n";
  os << "\nper-class accuracy\n";
  for (std::size_t i = 0; i < report.accuracy.classes.size(); ++i) {
    os << "  " << std::left << std::setw(26) << report.accuracy.classes[i] << report.accuracy.per_class[i] << "\n";
  }
  if (!report.levels.empty()) {
    os << "\ndepth  classifiers  precision  recall\n";
    for (const auto& row : report.levels) {
      os << std::right << std::setw(5) << row.depth << "  " << std::setw(11) << row.classifiers << "  "
         << std::setw(9) << row.precision << "  " << std::setw(6) << row.recall << "\n";
    }
  }
  if (!report.skipped.empty()) os << "\nskipped classifiers: " << report.skipped.size() << "\n";
  return os.str();
}

std::string confusion_csv(const AccuracyResult& accuracy) {
  std::ostringstream os;
  os << "truth";
  for (const auto& c : accuracy.confusion.col_ids()) os << ',' << c;
  os << '\n';
  for (std::size_t r = 0; r < accuracy.confusion.rows(); ++r) {
    os << accuracy.confusion.row_ids()[r];
    for (std::size_t c = 0; c < accuracy.confusion.cols(); ++c) os << ',' << accuracy.confusion(r, c);
    os << '\n';
  }
  return os.str();
}

}  // namespace hat
