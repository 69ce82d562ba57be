#include <doctest.h>

#include <cmath>

#include "hat/error.hpp"
#include "hat/io.hpp"
#include "hat/pipeline.hpp"

namespace {

hat::SynthSpec small_spec() {
  hat::SynthSpec s;
  s.depth = 2;
  s.branching = 4;
  s.feature_dim = 12;
  s.n_attributes = 8;
  s.samples_per_class = 8;
  s.seed = 11;
  return s;
}

hat::fs::path scratch(const std::string& name) {
  const auto dir = hat::fs::temp_directory_path() / "hat_pipeline_tests" / name;
  hat::fs::remove_all(dir);
  hat::fs::create_directories(dir);
  return dir;
}

hat::TrainingConfig quick_training() {
  hat::TrainingConfig t;
  t.cost_grid = {0.1, 1.0, 10.0};
  t.folds = 3;
  return t;
}

}  // namespace

TEST_CASE("method names") {
  for (auto m : {hat::Method::Hat, hat::Method::Dap, hat::Method::Ens}) {
    CHECK(hat::method_from_string(hat::to_string(m)) == m);
  }
  CHECK_THROWS_AS(hat::method_from_string("knn"), hat::Error);
}

TEST_CASE("run config JSON") {
  hat::RunConfig c;
  c.taxonomy = "t.json";
  c.method = hat::Method::Dap;
  c.normalize = false;
  c.cost_grid = {1.0, 3.0};
  c.folds = 4;
  c.seed = 12;
  c.sizes = {5, 9};
  c.synth.depth = 4;
  hat::RunConfig back;
  hat::apply_json(back, hat::to_json(c));
  CHECK(hat::to_json(back) == hat::to_json(c));
  CHECK(back.training().folds == 4);
  CHECK(back.training().cost_grid == c.cost_grid);

  hat::RunConfig d;
  hat::apply_json(d, {{"no_normalize", true}, {"c_grid", {0.5}}});
  CHECK_FALSE(d.normalize);
  CHECK(d.cost_grid == std::vector<double>{0.5});
  CHECK_THROWS_WITH_AS(hat::apply_json(d, nlohmann::json::array()), doctest::Contains("SchemaError"), hat::Error);
  CHECK_THROWS_WITH_AS(hat::apply_json(d, {{"folds", "five"}}), doctest::Contains("SchemaError"), hat::Error);
}

TEST_CASE("sweep sizes") {
  CHECK(hat::resolve_sizes({0.25, 0.375, 0.5, 0.625, 0.75}, 27) == std::vector<std::size_t>{7, 10, 14, 17, 20});
  CHECK(hat::resolve_sizes({8, 4, 4}, 16) == std::vector<std::size_t>{4, 8});
  CHECK_THROWS_WITH_AS(hat::resolve_sizes({1}, 16), doctest::Contains("InvalidSpec"), hat::Error);
  CHECK_THROWS_WITH_AS(hat::resolve_sizes({15}, 16), doctest::Contains("InvalidSpec"), hat::Error);
  CHECK_THROWS_WITH_AS(hat::resolve_sizes({-0.5}, 16), doctest::Contains("InvalidSpec"), hat::Error);
}

TEST_CASE("sweep bookkeeping") {
  const auto problem = hat::problem_from_synth(hat::generate(small_spec()));
  const auto rows = hat::run_sweep(problem, {4, 8}, 1, 3, quick_training(), 1, true);
  REQUIRE(rows.size() == 6);
  const std::vector<std::string> methods{"hat", "dap", "ens"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].source_size == (i < 3 ? 4u : 8u));
    CHECK(rows[i].n_unseen == 16 - rows[i].source_size);
    CHECK(rows[i].method == methods[i % 3]);
    CHECK(rows[i].accuracy >= 0.0);
    CHECK(rows[i].accuracy <= 1.0);
  }
  const auto csv = hat::sweep_csv(rows);
  CHECK(csv.rfind("source_size,n_unseen,method,accuracy,mean_class_auc\n4,12,hat,", 0) == 0);
  CHECK_THROWS_WITH_AS(hat::run_sweep(problem, {15}, 1, 3, quick_training(), 1, true),
                       doctest::Contains("InvalidSpec"), hat::Error);
}

TEST_CASE("pinned benchmark fixture") {
  const auto r = hat::run_bench(hat::SynthSpec{}, hat::TrainingConfig{}, 1);
  CHECK(r.n_unseen == 7);
  CHECK(r.chance == doctest::Approx(1.0 / 7.0));
  CHECK(r.classifiers == 168);
  CHECK(r.skipped == 46);
  CHECK(r.entry("hat").report.accuracy.normalized == doctest::Approx(0.9286).epsilon(1e-4));
  CHECK(r.entry("dap").report.accuracy.normalized == doctest::Approx(0.5667).epsilon(1e-4));
  CHECK(r.entry("ens").report.accuracy.normalized == doctest::Approx(0.5333).epsilon(1e-4));
  CHECK(r.entry("hat-fallback").report.accuracy.normalized == doctest::Approx(0.5952).epsilon(1e-4));
  const auto j = hat::to_json(r);
  CHECK(j.contains("methods"));
  CHECK(hat::bench_table(r).find("hat-fallback") != std::string::npos);
}

TEST_CASE("file commands reproduce the in-memory run") {
  const auto spec = small_spec();
  const auto dir = scratch("files");
  hat::RunConfig c;
  c.synth = spec;
  c.out = dir;
  hat::cmd_synth(c);
  for (const char* f : {"taxonomy.json", "features.csv", "signatures.csv", "image_attributes.csv", "split.json",
                        "spec.json"}) {
    CHECK(hat::fs::exists(dir / f));
  }
  c.taxonomy = dir / "taxonomy.json";
  c.features = dir / "features.csv";
  c.attributes = dir / "signatures.csv";
  c.split = dir / "split.json";
  c.cost_grid = quick_training().cost_grid;
  c.folds = quick_training().folds;
  c.dump_support = true;
  hat::cmd_train(c);
  CHECK(hat::fs::exists(dir / "model_bank.json"));
  CHECK(hat::fs::exists(dir / "skipped.csv"));
  CHECK(hat::fs::exists(dir / "support_sizes.csv"));
  hat::cmd_predict(c);
  hat::cmd_eval(c);
  const auto report = nlohmann::json::parse(hat::read_text_file(dir / "eval.json"));

  const auto bench = hat::generate(spec);
  const auto problem = hat::problem_from_synth(bench);
  const auto table = hat::problem_table(problem);
  const auto bank = hat::train_problem(problem, table, c.training(), 1);
  const auto scored = hat::predict(problem, table, bank, problem.test_data(), hat::Method::Hat, true, false, 1);
  const auto accuracy = hat::multiclass_accuracy(scored.predicted, problem.test_data().sample_classes);
  CHECK(report.at("normalized_accuracy").get<double>() == doctest::Approx(accuracy.normalized).epsilon(1e-12));
  CHECK(report.contains("attribute_auc"));
  CHECK(hat::load_model_bank(dir / "model_bank.json").classifiers.size() == bank.classifiers.size());

  // Per-image annotations from the same files.
  c.mode = hat::AnnotationMode::PerImage;
  c.attributes = dir / "image_attributes.csv";
  c.model = dir / "bank_images.json";
  CHECK_NOTHROW(hat::cmd_train(c));

  // Binary features score the same samples.
  const auto bin = scratch("binary");
  hat::RunConfig b = c;
  b.mode = hat::AnnotationMode::PerClass;
  b.attributes = dir / "signatures.csv";
  b.model.reset();
  b.out = bin;
  b.feature_format = hat::FeatureFormat::Binary;
  hat::cmd_synth(b);
  b.features = bin / "features.bin";
  hat::cmd_train(b);
  hat::cmd_predict(b);
  const auto from_binary = hat::load_predictions(bin / "predictions.csv");
  const auto from_csv = hat::load_predictions(dir / "predictions.csv");
  CHECK(from_binary.scores.sample_ids == from_csv.scores.sample_ids);
  CHECK(from_binary.scores.targets == from_csv.scores.targets);
}

TEST_CASE("problem loading errors") {
  const auto dir = scratch("errors");
  hat::RunConfig c;
  c.synth = small_spec();
  c.out = dir;
  hat::cmd_synth(c);
  c.taxonomy = dir / "taxonomy.json";
  c.features = dir / "features.csv";
  c.attributes = dir / "signatures.csv";
  c.split = dir / "split.json";
  hat::write_text_file(dir / "bad_split.json", R"({"seen":["c0_0","nope"],"unseen":["c0_1","c0_2"]})");
  c.split = dir / "bad_split.json";
  CHECK_THROWS_WITH_AS(hat::load_problem(c), doctest::Contains("UnknownNode"), hat::Error);
  hat::write_text_file(dir / "inner_split.json", R"({"seen":["c0_0","n0"],"unseen":["c0_1","c0_2"]})");
  c.split = dir / "inner_split.json";
  CHECK_THROWS_AS(hat::load_problem(c), hat::Error);
  c.split = dir / "split.json";
  const auto sigs = hat::load_signature_csv(dir / "signatures.csv");
  const auto split = hat::load_split(dir / "split.json");
  hat::AttributeSignatureMatrix seen_only(split.seen, sigs.col_ids(), 0);
  for (std::size_t r = 0; r < split.seen.size(); ++r) {
    for (std::size_t m = 0; m < sigs.cols(); ++m) seen_only(r, m) = sigs(*sigs.find_row(split.seen[r]), m);
  }
  hat::write_text_file(dir / "seen_signatures.csv", hat::matrix_csv(seen_only, "class_id"));
  c.attributes = dir / "seen_signatures.csv";
  CHECK_THROWS_WITH_AS(hat::load_problem(c), doctest::Contains("MissingSignature"), hat::Error);
  c.fallback_parent = true;
  CHECK_NOTHROW(hat::load_problem(c));
  c.taxonomy.reset();
  CHECK_THROWS_AS(hat::load_problem(c), hat::Error);
}
