#include <doctest.h>

#include <random>

#include "hat/annotation.hpp"
#include "hat/error.hpp"
#include "random_instances.hpp"

using hat::AttributeSignatureMatrix;
using hat::NodeKind;
using hat::Taxonomy;

TEST_CASE("class occurrence") {
  hat::ImageAttributeLabels labels({"s1", "s2", "s3"}, {"m"}, 0);
  labels(0, 0) = 1;
  labels(1, 0) = 1;
  auto occ = hat::class_occurrence(labels, {"c", "c", "c"});
  CHECK(occ(0, 0) == doctest::Approx(2.0 / 3.0));
  labels(2, 0) = 1;
  occ = hat::class_occurrence(labels, {"c", "c", "c"});
  CHECK(occ(0, 0) == 1.0);
  CHECK_THROWS_WITH_AS(hat::class_occurrence(labels, {"c", "c", "c"}, {"c", "empty"}),
                       doctest::Contains("EmptyClass"), hat::Error);
  CHECK_THROWS_WITH_AS(hat::class_occurrence(labels, {"c", "c"}), doctest::Contains("LengthMismatch"), hat::Error);
}

TEST_CASE("class occurrence matches per-class summation") {
  std::mt19937_64 rng(8);
  std::vector<std::string> ids, classes;
  for (int i = 0; i < 60; ++i) {
    ids.push_back("s" + std::to_string(i));
    classes.push_back("k" + std::to_string(rng() % 5));
  }
  hat::ImageAttributeLabels labels(ids, {"a", "b", "c"}, 0);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t m = 0; m < 3; ++m) labels(i, m) = rng() % 2;
  }
  const auto occ = hat::class_occurrence(labels, classes);
  for (std::size_t r = 0; r < occ.rows(); ++r) {
    for (std::size_t m = 0; m < 3; ++m) {
      double sum = 0.0;
      int count = 0;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (classes[i] != occ.row_ids()[r]) continue;
        sum += labels(i, m);
        ++count;
      }
      CHECK(occ(r, m) == doctest::Approx(sum / count).epsilon(1e-15));
    }
  }
}

TEST_CASE("binarize at the overall mean") {
  hat::OccurrenceMatrix o({"x", "y"}, {"p", "q"}, 0.0);
  o(0, 0) = 0.9;
  o(0, 1) = 0.1;
  o(1, 0) = 0.5;
  o(1, 1) = 0.3;
  const auto b = hat::binarize_occurrence(o);
  CHECK(b(0, 0) == 1);
  CHECK(b(0, 1) == 0);
  CHECK(b(1, 0) == 1);
  CHECK(b(1, 1) == 0);

  hat::OccurrenceMatrix constant({"x", "y"}, {"p", "q"}, 0.4);
  const auto z = hat::binarize_occurrence(constant);
  for (auto v : z.data()) CHECK(v == 0);
}

TEST_CASE("binarize matches mean-then-compare and is scale invariant") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> rows, cols;
    for (int i = 0; i < 10; ++i) rows.push_back("r" + std::to_string(i));
    for (int i = 0; i < 10; ++i) cols.push_back("c" + std::to_string(i));
    hat::OccurrenceMatrix o(rows, cols, 0.0);
    double sum = 0.0;
    for (std::size_t r = 0; r < 10; ++r) {
      for (std::size_t c = 0; c < 10; ++c) sum += (o(r, c) = u(rng));
    }
    const double mean = sum / 100.0;
    const auto b = hat::binarize_occurrence(o);
    for (std::size_t r = 0; r < 10; ++r) {
      for (std::size_t c = 0; c < 10; ++c) CHECK(b(r, c) == (o(r, c) > mean ? 1 : 0));
    }
    hat::OccurrenceMatrix scaled = o;
    for (std::size_t r = 0; r < 10; ++r) {
      for (std::size_t c = 0; c < 10; ++c) scaled(r, c) *= 0.5;
    }
    CHECK(hat::binarize_occurrence(scaled) == b);
  }
}

TEST_CASE("propagate small trees") {
  const auto single = Taxonomy::build({{"root", "root", NodeKind::Internal}, {"A", "A", NodeKind::SeenLeaf}},
                                      {{"root", "A"}});
  AttributeSignatureMatrix sig({"A"}, {"m0", "m1"}, 0);
  sig(0, 0) = 1;
  auto table = hat::propagate(single, sig);
  CHECK(table(*table.find_row("A"), 0) == 1);
  CHECK(table(*table.find_row("root"), 0) == 1);
  CHECK(table(*table.find_row("root"), 1) == 0);

  const auto pair = Taxonomy::build({{"root", "root", NodeKind::Internal},
                                     {"A", "A", NodeKind::SeenLeaf},
                                     {"B", "B", NodeKind::SeenLeaf},
                                     {"Z", "Z", NodeKind::UnseenLeaf}},
                                    {{"root", "A"}, {"root", "B"}, {"root", "Z"}});
  AttributeSignatureMatrix s2({"A", "B", "Z"}, {"m0", "m1", "m2"}, 0);
  s2(0, 0) = 1;
  s2(1, 1) = 1;
  s2(2, 2) = 1;
  table = hat::propagate(pair, s2);
  const auto root = *table.find_row("root");
  CHECK(table(root, 0) == 1);
  CHECK(table(root, 1) == 1);
  CHECK(table(root, 2) == 0);  // unseen rows never flow upward
  CHECK(table(*table.find_row("Z"), 2) == 1);

  AttributeSignatureMatrix missing({"A"}, {"m0"}, 1);
  CHECK_THROWS_WITH_AS(hat::propagate(pair, missing), doctest::Contains("MissingSignature"), hat::Error);
}

TEST_CASE("propagate matches the union-over-descendants oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = testing::random_tree(rng);
    const auto table = hat::propagate(inst.taxonomy, inst.signatures);
    const auto oracle = testing::propagation_oracle(inst);
    CHECK(table.rows() == inst.taxonomy.size());
    for (const auto& [id, row] : oracle) {
      const auto r = *table.find_row(id);
      const auto got = table.row(r);
      CHECK(std::vector<std::uint8_t>(got.begin(), got.end()) == row);
    }
    // Monotone along edges.
    for (const auto& [p, c] : inst.edges) {
      if (inst.taxonomy.node(c).kind == NodeKind::UnseenLeaf) continue;
      for (std::size_t m = 0; m < table.cols(); ++m) {
        if (table(*table.find_row(c), m)) CHECK(table(*table.find_row(p), m) == 1);
      }
    }
  }
}

TEST_CASE("propagate is minimal and monotone in its input") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = testing::random_tree(rng);
    const auto& t = inst.taxonomy;
    const auto table = hat::propagate(t, inst.signatures);
    // Minimality: every 1 at an internal node is witnessed by a child with a 1.
    for (const auto& n : t.nodes()) {
      if (n.is_leaf()) continue;
      for (std::size_t m = 0; m < table.cols(); ++m) {
        if (!table(t.index_of(n.id), m)) continue;
        bool witnessed = false;
        for (const auto& c : t.children(n.id)) {
          witnessed = witnessed || (t.node(c).kind != NodeKind::UnseenLeaf && table(t.index_of(c), m));
        }
        CHECK(witnessed);
      }
    }
    // Adding a 1 never clears anything.
    const auto seen = t.leaves(NodeKind::SeenLeaf);
    const auto leaf = seen[rng() % seen.size()];
    auto more = inst.signatures;
    more(*more.find_row(leaf), rng() % more.cols()) = 1;
    const auto bigger = hat::propagate(t, more);
    for (std::size_t i = 0; i < table.data().size(); ++i) CHECK(bigger.data()[i] >= table.data()[i]);
  }
}

TEST_CASE("parent signature fallback") {
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = testing::random_tree(rng);
    const auto table = hat::propagate(inst.taxonomy, inst.signatures);
    const auto parent = testing::parent_map(inst.edges);
    for (const auto& z : inst.taxonomy.leaves(NodeKind::UnseenLeaf)) {
      const auto row = hat::parent_signature_fallback(inst.taxonomy, table, z);
      const auto expected = table.row(*table.find_row(parent.at(z)));
      CHECK(row == std::vector<std::uint8_t>(expected.begin(), expected.end()));
      ++checked;
    }
    const auto seen = inst.taxonomy.leaves(NodeKind::SeenLeaf);
    CHECK_THROWS_WITH_AS(hat::parent_signature_fallback(inst.taxonomy, table, seen.front()),
                         doctest::Contains("NotUnseenLeaf"), hat::Error);
  }
  CHECK(checked > 0);

  // Under the root the fallback is the OR of all seen signatures.
  const auto t = Taxonomy::build({{"root", "root", NodeKind::Internal},
                                  {"A", "A", NodeKind::SeenLeaf},
                                  {"B", "B", NodeKind::SeenLeaf},
                                  {"Z", "Z", NodeKind::UnseenLeaf}},
                                 {{"root", "A"}, {"root", "B"}, {"root", "Z"}});
  AttributeSignatureMatrix sig({"A", "B"}, {"m0", "m1", "m2"}, 0);
  sig(0, 0) = 1;
  sig(1, 1) = 1;
  const auto table = hat::propagate(t, sig);
  CHECK(hat::parent_signature_fallback(t, table, "Z") == std::vector<std::uint8_t>{1, 1, 0});
  const auto fallback = hat::unseen_signatures(t, table, sig, {"Z"}, true);
  CHECK(fallback.row_ids() == std::vector<std::string>{"Z"});
  CHECK(fallback(0, 0) == 1);
  CHECK(fallback(0, 2) == 0);
}
