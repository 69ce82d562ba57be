#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "hat/error.hpp"
#include "hat/io.hpp"
#include "random_instances.hpp"

namespace {

hat::fs::path scratch(const std::string& name) {
  const auto dir = hat::fs::temp_directory_path() / "hat_io_tests";
  hat::fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("feature CSV") {
  const auto path = scratch("features.csv");
  hat::write_text_file(path, "sample_id,class_id,f0,f1,f2\ns1,A,1,2,3\r\n\ns2,B,-0.5,0,1e-3\n");
  const auto d = hat::load_features(path, hat::FeatureFormat::Csv);
  CHECK(d.sample_ids == std::vector<std::string>{"s1", "s2"});
  CHECK(d.sample_classes == std::vector<std::string>{"A", "B"});
  CHECK(d.features.rows() == 2);
  CHECK(d.features.cols() == 3);
  CHECK(d.features(1, 2) == 1e-3);

  const auto norm = hat::load_features(path, hat::FeatureFormat::Csv, std::nullopt, true);
  CHECK(norm.features.row(0).norm() == doctest::Approx(1.0));

  hat::write_text_file(path, "sample_id,class_id,f0\ns1,A,nan\n");
  CHECK_THROWS_WITH_AS(hat::load_features(path, hat::FeatureFormat::Csv), doctest::Contains("NonFiniteFeature"),
                       hat::Error);
  hat::write_text_file(path, "sample_id,class_id,f0,f1\ns1,A,1\n");
  CHECK_THROWS_WITH_AS(hat::load_features(path, hat::FeatureFormat::Csv), doctest::Contains("DimensionMismatch"),
                       hat::Error);
  hat::write_text_file(path, "sample_id,class_id,f0\ns1,A,abc\n");
  CHECK_THROWS_WITH_AS(hat::load_features(path, hat::FeatureFormat::Csv), doctest::Contains("ParseError"),
                       hat::Error);
  CHECK_THROWS_WITH_AS(hat::load_features(scratch("missing.csv"), hat::FeatureFormat::Csv),
                       doctest::Contains("IoError"), hat::Error);
}

TEST_CASE("binary features round trip exactly") {
  std::mt19937_64 rng(127);
  std::normal_distribution<float> normal(0.0f, 3.0f);
  hat::Dataset d;
  d.features.resize(5, 4);
  for (int i = 0; i < 5; ++i) {
    d.sample_ids.push_back("s" + std::to_string(i));
    d.sample_classes.push_back(i % 2 ? "A" : "B");
    for (int k = 0; k < 4; ++k) d.features(i, k) = static_cast<double>(normal(rng));
  }
  const auto path = scratch("features.bin");
  hat::save_features_binary(path, d);
  CHECK(hat::fs::exists(hat::default_labels_path(path)));
  const auto back = hat::load_features(path, hat::FeatureFormat::Binary);
  CHECK(back.features == d.features);
  CHECK(back.sample_ids == d.sample_ids);
  CHECK(back.sample_classes == d.sample_classes);
  std::ifstream in(path, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  CHECK(std::string(magic, 4) == "ZSF1");
  CHECK(hat::fs::file_size(path) == 12u + 5u * 4u * 4u);

  const auto csv = scratch("features_rt.csv");
  hat::save_features_csv(csv, d);
  CHECK(hat::load_features(csv, hat::FeatureFormat::Csv).features == d.features);
}

TEST_CASE("attribute tables") {
  const auto path = scratch("sig.csv");
  hat::write_text_file(path, "class_id,m,n\nA,1,0\nB,0,1\n");
  const auto sig = hat::load_signature_csv(path);
  CHECK(sig.row_ids() == std::vector<std::string>{"A", "B"});
  CHECK(sig(1, 1) == 1);
  hat::write_text_file(path, "class_id,m,n\nA,1,2\n");
  CHECK_THROWS_WITH_AS(hat::load_signature_csv(path), doctest::Contains("SchemaError"), hat::Error);
  hat::write_text_file(path, "class_id,m,n\nA,0.5,1.5\n");
  CHECK_THROWS_WITH_AS(hat::load_occurrence_csv(path), doctest::Contains("SchemaError"), hat::Error);
  hat::write_text_file(path, "class_id,m,n\nA,0.5,0.25\n");
  CHECK(hat::load_occurrence_csv(path)(0, 1) == 0.25);
}

TEST_CASE("attribute priors") {
  const auto path = scratch("priors.csv");
  hat::write_text_file(path, "attribute,prior\nm,0.25\nn,0.5\n");
  CHECK(hat::load_attribute_priors(path) == std::map<std::string, double>{{"m", 0.25}, {"n", 0.5}});
  hat::write_text_file(path, "attribute,prior\nm,1\n");
  CHECK_THROWS_WITH_AS(hat::load_attribute_priors(path), doctest::Contains("SchemaError"), hat::Error);
  hat::write_text_file(path, "attribute,prior\nm,0.2\nm,0.3\n");
  CHECK_THROWS_WITH_AS(hat::load_attribute_priors(path), doctest::Contains("SchemaError"), hat::Error);
}

TEST_CASE("split files") {
  const auto path = scratch("split.json");
  const hat::SplitSpec split{{"A", "B"}, {"C"}};
  hat::save_split(path, split);
  CHECK(hat::load_split(path) == split);
  CHECK_THROWS_WITH_AS(hat::split_from_json({{"seen", {"A"}}, {"unseen", {"A"}}}), doctest::Contains("SchemaError"),
                       hat::Error);
  CHECK_THROWS_WITH_AS(hat::split_from_json({{"seen", nlohmann::json::array()}, {"unseen", {"A"}}}),
                       doctest::Contains("SchemaError"), hat::Error);
  CHECK_THROWS_WITH_AS(hat::split_from_json({{"seen", {"A"}}}), doctest::Contains("SchemaError"), hat::Error);
}

TEST_CASE("taxonomy round trip") {
  std::mt19937_64 rng(131);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = testing::random_tree(rng);
    const auto path = scratch("taxonomy.json");
    hat::save_taxonomy(path, inst.taxonomy);
    CHECK(hat::load_taxonomy(path) == inst.taxonomy);
  }
}

TEST_CASE("model bank round trip") {
  std::mt19937_64 rng(137);
  std::normal_distribution<double> normal(0.0, 1.0);
  hat::ModelBank bank;
  bank.dim = 3;
  bank.config.seed = 99;
  bank.config.cost_grid = {0.5, 2.0};
  for (int i = 0; i < 6; ++i) {
    hat::AttributeClassifier c;
    c.node = "n" + std::to_string(i % 3);
    c.attribute = "a" + std::to_string(i);
    c.weights = Eigen::Vector3d(normal(rng), normal(rng), normal(rng)) * 1e3;
    c.bias = normal(rng) / 7.0;
    c.scheme = i % 2 ? hat::Scheme::ChildVsParent : hat::Scheme::OneVsAll;
    c.cost = 10.0;
    c.cost_from_fallback = i == 4;
    c.solver.iterations = i;
    c.solver.converged = true;
    bank.classifiers.emplace(std::make_pair(c.node, c.attribute), c);
  }
  bank.skipped.push_back({"n1", "a9", "NoContrast"});
  const auto path = scratch("bank.json");
  hat::save_model_bank(path, bank);
  const auto back = hat::load_model_bank(path);
  CHECK(back.dim == 3);
  CHECK(back.config.seed == 99);
  CHECK(back.config.cost_grid == bank.config.cost_grid);
  CHECK(back.skipped == bank.skipped);
  REQUIRE(back.classifiers.size() == bank.classifiers.size());
  for (const auto& [key, c] : bank.classifiers) {
    const auto* d = back.find(key.first, key.second);
    REQUIRE(d != nullptr);
    CHECK(d->weights == c.weights);
    CHECK(d->bias == c.bias);
    CHECK(d->scheme == c.scheme);
    CHECK(d->cost_from_fallback == c.cost_from_fallback);
    CHECK(d->solver.iterations == c.solver.iterations);
  }

  auto j = hat::model_bank_to_json(bank);
  j["classifiers"][0]["weights"] = {1.0};
  CHECK_THROWS_WITH_AS(hat::model_bank_from_json(j), doctest::Contains("DimensionMismatch"), hat::Error);
  CHECK_THROWS_WITH_AS(hat::model_bank_from_json({{"meta", 3}}), doctest::Contains("SchemaError"), hat::Error);
}

TEST_CASE("predictions round trip") {
  std::mt19937_64 rng(139);
  std::normal_distribution<double> normal(0.0, 1.0);
  hat::ScoreTable s;
  s.sample_ids = {"x", "y", "z"};
  s.targets = {"A", "B"};
  s.values.resize(3, 2);
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < 2; ++c) s.values(i, c) = normal(rng);
  }
  const std::vector<std::string> predicted{"B", "A", "A"};
  const auto path = scratch("predictions.csv");
  hat::save_predictions(path, s, predicted);
  const auto back = hat::load_predictions(path);
  CHECK(back.predicted == predicted);
  CHECK(back.scores.sample_ids == s.sample_ids);
  CHECK(back.scores.targets == s.targets);
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < 2; ++c) CHECK(std::abs(back.scores.values(i, c) - s.values(i, c)) <= 1e-8 * std::abs(s.values(i, c)));
  }
  // Values already at the written precision survive exactly.
  CHECK(hat::predictions_csv(back.scores, back.predicted) == hat::read_text_file(path));
  const auto again = scratch("predictions2.csv");
  hat::save_predictions(again, back.scores, back.predicted);
  CHECK(hat::load_predictions(again).scores.values == back.scores.values);
}
