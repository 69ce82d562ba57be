#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "hat/error.hpp"
#include "hat/eval.hpp"

namespace {

// Pairwise Mann-Whitney count with ties worth one half.
double pairwise_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

std::vector<std::uint8_t> random_labels(std::mt19937_64& rng, std::size_t n) {
  std::bernoulli_distribution coin(0.4);
  std::vector<std::uint8_t> y(n);
  for (auto& v : y) v = coin(rng) ? 1 : 0;
  y[0] = 1;
  y[1] = 0;
  return y;
}

}  // namespace

TEST_CASE("multiclass accuracy examples") {
  const auto r = hat::multiclass_accuracy({"a", "a", "b", "b"}, {"a", "a", "a", "b"});
  CHECK(r.plain == doctest::Approx(0.75));
  CHECK(r.normalized == doctest::Approx((2.0 / 3.0 + 1.0) / 2.0));
  CHECK(r.classes == std::vector<std::string>{"a", "b"});
  CHECK(r.confusion(0, 1) == 1);
  CHECK(hat::multiclass_accuracy({"a", "b", "c"}, {"a", "b", "c"}).normalized == 1.0);
  CHECK(hat::multiclass_accuracy({"b", "c", "a"}, {"a", "b", "c"}).normalized == 0.0);
  CHECK_THROWS_WITH_AS(hat::multiclass_accuracy({"a"}, {"a", "b"}), doctest::Contains("LengthMismatch"), hat::Error);
  CHECK_THROWS_WITH_AS(hat::multiclass_accuracy({"a"}, {"a"}, {"a", "z"}), doctest::Contains("EmptyGtClass"),
                       hat::Error);
}

TEST_CASE("multiclass accuracy matches a counting oracle and ignores order") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> label(0, 5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::string> truth, predicted;
    const int n = 10 + trial * 3;
    for (int i = 0; i < n; ++i) {
      truth.push_back("c" + std::to_string(label(rng)));
      predicted.push_back("c" + std::to_string(label(rng)));
    }
    std::map<std::string, std::pair<int, int>> counts;
    int correct = 0;
    for (int i = 0; i < n; ++i) {
      auto& [hit, total] = counts[truth[static_cast<std::size_t>(i)]];
      ++total;
      if (truth[static_cast<std::size_t>(i)] == predicted[static_cast<std::size_t>(i)]) {
        ++hit;
        ++correct;
      }
    }
    double mean = 0.0;
    for (const auto& [c, ht] : counts) mean += static_cast<double>(ht.first) / ht.second;
    mean /= static_cast<double>(counts.size());
    const auto r = hat::multiclass_accuracy(predicted, truth);
    CHECK(std::abs(r.normalized - mean) < 1e-12);
    CHECK(std::abs(r.plain - static_cast<double>(correct) / n) < 1e-12);
    std::size_t total = 0;
    for (std::size_t row = 0; row < r.confusion.rows(); ++row) {
      for (auto v : r.confusion.row(row)) total += v;
    }
    CHECK(total == static_cast<std::size_t>(n));

    std::vector<std::size_t> perm(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::string> t2, p2;
    for (auto i : perm) {
      t2.push_back(truth[i]);
      p2.push_back(predicted[i]);
    }
    CHECK(hat::multiclass_accuracy(p2, t2).normalized == doctest::Approx(r.normalized).epsilon(1e-14));
  }
}

TEST_CASE("roc_auc examples and errors") {
  const std::vector<double> perfect{0.1, 0.2, 0.8, 0.9};
  const std::vector<std::uint8_t> y{0, 0, 1, 1};
  CHECK(hat::roc_auc(perfect, y) == 1.0);
  const std::vector<double> reversed{0.9, 0.8, 0.2, 0.1};
  CHECK(hat::roc_auc(reversed, y) == 0.0);
  const std::vector<double> flat{0.5, 0.5, 0.5, 0.5};
  CHECK(hat::roc_auc(flat, y) == 0.5);
  const std::vector<std::uint8_t> ones{1, 1, 1, 1};
  CHECK_THROWS_WITH_AS(hat::roc_auc(perfect, ones), doctest::Contains("DegenerateLabels"), hat::Error);
  const std::vector<std::uint8_t> short_labels{1, 0};
  CHECK_THROWS_WITH_AS(hat::roc_auc(perfect, short_labels), doctest::Contains("LengthMismatch"), hat::Error);
}

TEST_CASE("roc_auc matches the pairwise count") {
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<int> coarse(0, 6);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 60);
    const auto y = random_labels(rng, n);
    std::vector<double> s(n);
    for (auto& v : s) v = trial % 2 ? static_cast<double>(coarse(rng)) : normal(rng);
    const double auc = hat::roc_auc(s, y);
    CHECK(std::abs(auc - pairwise_auc(s, y)) < 1e-12);
    std::vector<std::uint8_t> flipped(n);
    for (std::size_t i = 0; i < n; ++i) flipped[i] = 1 - y[i];
    CHECK(std::abs(hat::roc_auc(s, flipped) - (1.0 - auc)) < 1e-12);
    std::vector<double> squashed(n);
    for (std::size_t i = 0; i < n; ++i) squashed[i] = std::exp(s[i]) * 3.0 + 1.0;
    CHECK(std::abs(hat::roc_auc(squashed, y) - auc) < 1e-12);
  }
}

TEST_CASE("mean AUCs") {
  hat::ScoreTable attr;
  attr.sample_ids = {"s0", "s1", "s2", "s3"};
  attr.targets = {"m", "n", "q"};
  attr.values.resize(4, 3);
  attr.values << 0.9, 0.1, 0.5,  //
      0.8, 0.7, 0.5,             //
      0.2, 0.3, 0.5,             //
      0.1, 0.6, 0.5;
  hat::ImageAttributeLabels truth({"s3", "s2", "s1", "s0"}, {"q", "n", "m"}, 0);
  // s0, s1 have m; s1, s3 have n; q is constant.
  truth(3, 2) = truth(2, 2) = 1;
  truth(2, 1) = truth(0, 1) = 1;
  const auto a = hat::mean_attribute_auc(attr, truth);
  CHECK(a.targets == std::vector<std::string>{"m", "n"});
  CHECK(a.excluded == std::vector<std::string>{"q"});
  CHECK(a.auc[0] == 1.0);
  CHECK(a.auc[1] == 1.0);
  CHECK(a.mean == 1.0);

  hat::ScoreTable cls;
  cls.sample_ids = {"s0", "s1", "s2", "s3"};
  cls.targets = {"A", "B", "C"};
  cls.values.resize(4, 3);
  cls.values << 0.9, 0.1, 0.0,  //
      0.2, 0.8, 0.0,            //
      0.7, 0.3, 0.0,            //
      0.1, 0.9, 0.0;
  const auto c = hat::mean_class_auc(cls, {"A", "B", "A", "B"});
  CHECK(c.targets == std::vector<std::string>{"A", "B"});
  CHECK(c.excluded == std::vector<std::string>{"C"});
  CHECK(c.mean == 1.0);
  CHECK_THROWS_WITH_AS(hat::mean_class_auc(cls, {"A"}), doctest::Contains("LengthMismatch"), hat::Error);

  std::mt19937_64 rng(107);
  std::normal_distribution<double> normal(0.0, 1.0);
  hat::ScoreTable r;
  r.targets = {"c0", "c1", "c2", "c3"};
  r.values.resize(40, 4);
  std::vector<std::string> labels;
  for (int i = 0; i < 40; ++i) {
    r.sample_ids.push_back("s" + std::to_string(i));
    labels.push_back("c" + std::to_string(i % 3));
    for (int k = 0; k < 4; ++k) r.values(i, k) = normal(rng);
  }
  const auto rc = hat::mean_class_auc(r, labels);
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> s(40);
    std::vector<std::uint8_t> y(40);
    for (int i = 0; i < 40; ++i) {
      s[static_cast<std::size_t>(i)] = r.values(i, k);
      y[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(i)] == r.targets[static_cast<std::size_t>(k)];
    }
    sum += pairwise_auc(s, y);
  }
  CHECK(rc.excluded == std::vector<std::string>{"c3"});
  CHECK(std::abs(rc.mean - sum / 3.0) < 1e-12);
}

TEST_CASE("level diagnostics match a confusion count") {
  // root -> {P -> {A, B}, C}
  const std::vector<hat::Node> nodes{{"root", "root", hat::NodeKind::Internal},
                                     {"P", "P", hat::NodeKind::Internal},
                                     {"A", "A", hat::NodeKind::SeenLeaf},
                                     {"B", "B", hat::NodeKind::SeenLeaf},
                                     {"C", "C", hat::NodeKind::SeenLeaf}};
  const auto t = hat::Taxonomy::build(nodes, {{"root", "P"}, {"root", "C"}, {"P", "A"}, {"P", "B"}});
  std::mt19937_64 rng(109);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  hat::ModelBank bank;
  bank.dim = 2;
  const std::vector<std::pair<std::string, std::string>> keys{{"root", "m"}, {"root", "n"}, {"P", "m"}, {"A", "m"},
                                                              {"A", "n"}};
  for (const auto& [node, attr] : keys) {
    hat::AttributeClassifier c;
    c.node = node;
    c.attribute = attr;
    c.weights = Eigen::Vector2d(normal(rng), normal(rng));
    c.bias = normal(rng);
    bank.classifiers.emplace(std::make_pair(node, attr), c);
  }
  hat::Dataset data;
  data.features.resize(30, 2);
  std::vector<std::string> ids;
  for (int i = 0; i < 30; ++i) {
    ids.push_back("x" + std::to_string(i));
    data.features.row(i) = Eigen::Vector2d(normal(rng), normal(rng)).transpose();
  }
  data.sample_ids = ids;
  data.sample_classes.assign(30, "A");
  hat::ImageAttributeLabels truth(ids, {"m", "n"}, 0);
  for (std::size_t i = 0; i < 30; ++i) {
    truth(i, 0) = coin(rng);
    truth(i, 1) = coin(rng);
  }
  const auto levels = hat::level_diagnostics(bank, t, data, truth);
  REQUIRE(levels.size() == 3);
  std::map<std::size_t, std::vector<std::pair<double, double>>> expected;  // depth -> (precision, recall)
  std::map<std::size_t, int> counts;
  for (const auto& [node, attr] : keys) {
    const std::size_t depth = node == "root" ? 0 : (node == "P" ? 1 : 2);
    ++counts[depth];
    const auto& c = bank.classifiers.at({node, attr});
    const std::size_t col = attr == "m" ? 0 : 1;
    int tp = 0, fp = 0, fn = 0;
    for (int i = 0; i < 30; ++i) {
      const double p = 1.0 / (1.0 + std::exp(-(data.features.row(i).dot(c.weights) + c.bias)));
      const bool pred = p >= 0.5;
      const bool actual = truth(static_cast<std::size_t>(i), col);
      tp += pred && actual;
      fp += pred && !actual;
      fn += !pred && actual;
    }
    expected[depth].push_back({tp + fp ? static_cast<double>(tp) / (tp + fp) : -1.0,
                               tp + fn ? static_cast<double>(tp) / (tp + fn) : -1.0});
  }
  for (const auto& row : levels) {
    CHECK(row.classifiers == static_cast<std::size_t>(counts[row.depth]));
    double ps = 0.0, rs = 0.0;
    int pn = 0, rn = 0;
    for (auto [p, r] : expected[row.depth]) {
      if (p >= 0) {
        ps += p;
        ++pn;
      }
      if (r >= 0) {
        rs += r;
        ++rn;
      }
    }
    CHECK(row.precision_defined == static_cast<std::size_t>(pn));
    CHECK(row.recall_defined == static_cast<std::size_t>(rn));
    if (pn) CHECK(std::abs(row.precision - ps / pn) < 1e-12);
    if (rn) CHECK(std::abs(row.recall - rs / rn) < 1e-12);
  }
}

TEST_CASE("top_ranked") {
  hat::ScoreTable s;
  s.sample_ids = {"d", "b", "a", "c"};
  s.targets = {"x"};
  s.values.resize(4, 1);
  s.values << 0.5, 0.9, 0.5, 0.1;
  CHECK(hat::top_ranked(s, 1).at("x") == std::vector<std::string>{"b"});
  CHECK(hat::top_ranked(s, 3).at("x") == std::vector<std::string>{"b", "a", "d"});
  CHECK(hat::top_ranked(s, 10).at("x").size() == 4);

  std::mt19937_64 rng(113);
  std::uniform_int_distribution<int> coarse(0, 4);
  hat::ScoreTable r;
  r.targets = {"u", "v"};
  r.values.resize(25, 2);
  for (int i = 0; i < 25; ++i) {
    r.sample_ids.push_back("s" + std::to_string(100 + (i * 7) % 25));
    r.values(i, 0) = coarse(rng);
    r.values(i, 1) = coarse(rng);
  }
  const auto top = hat::top_ranked(r, 6);
  for (int c = 0; c < 2; ++c) {
    std::vector<std::pair<double, std::string>> keyed;
    for (int i = 0; i < 25; ++i) keyed.emplace_back(-r.values(i, c), r.sample_ids[static_cast<std::size_t>(i)]);
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::string> expected;
    for (int i = 0; i < 6; ++i) expected.push_back(keyed[static_cast<std::size_t>(i)].second);
    CHECK(top.at(r.targets[static_cast<std::size_t>(c)]) == expected);
  }
}

TEST_CASE("report serialization") {
  hat::EvalReport report;
  report.method = "hat";
  report.accuracy = hat::multiclass_accuracy({"a", "b", "b"}, {"a", "b", "a"});
  report.class_auc.mean = 0.75;
  report.skipped.push_back({"P", "m", "NoContrast"});
  const auto j = hat::to_json(report);
  CHECK(j.at("method") == "hat");
  CHECK(j.at("normalized_accuracy").get<double>() == doctest::Approx(0.75));
  CHECK(j.at("plain_accuracy").get<double>() == doctest::Approx(2.0 / 3.0));
  CHECK(j.at("skipped").size() == 1);
  CHECK_FALSE(j.contains("attribute_auc"));
  CHECK(hat::confusion_csv(report.accuracy) == "truth,a,b\na,1,1\nb,0,1\n");
  CHECK(hat::to_text(report).find("normalized accuracy") != std::string::npos);
}
