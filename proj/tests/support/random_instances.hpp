#pragma once

// Random taxonomies, signatures and datasets shared by the unit and
// acceptance tests, plus brute-force reference computations that avoid the
// library's traversal helpers.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hat/annotation.hpp"
#include "hat/dataset.hpp"
#include "hat/labeled_matrix.hpp"
#include "hat/taxonomy.hpp"

namespace testing {

struct TreeLimits {
  int max_levels = 6;  // node levels including the root
  int max_leaves = 64;
  int max_attributes = 16;
  int max_children = 4;
  double unseen_rate = 0.25;
};

struct Instance {
  std::vector<hat::Node> nodes;
  std::vector<hat::Edge> edges;
  hat::Taxonomy taxonomy;
  std::vector<std::string> attributes;
  hat::AttributeSignatureMatrix signatures;  // every leaf
  hat::Dataset data;                         // seen-leaf samples only
};

inline std::string attr_name(int m) { return "attr" + std::to_string(100 + m); }

// Grows a random rooted tree level by level. Internal nodes may have a single
// child; every internal node gets at least one child.
inline Instance random_tree(std::mt19937_64& rng, const TreeLimits& limits = {}) {
  Instance inst;
  std::vector<std::string> leaf_ids;
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::bernoulli_distribution coin(0.5);

  // Redraw until the leaf budget holds.
  do {
    inst.nodes.assign({{"r", "r", hat::NodeKind::Internal}});
    inst.edges.clear();
    leaf_ids.clear();
    std::vector<std::string> frontier{"r"};
    int leaves = 0;
    int next_id = 0;
    for (int level = 1; level < limits.max_levels && !frontier.empty(); ++level) {
      std::vector<std::string> next;
      for (const auto& parent : frontier) {
        const int children = uniform(1, limits.max_children);
        for (int c = 0; c < children; ++c) {
          const std::string id = "v" + std::to_string(1000 + next_id++);
          inst.edges.emplace_back(parent, id);
          const int remaining_frontier = static_cast<int>(next.size());
          const bool must_stop = level + 1 == limits.max_levels ||
                                 leaves + remaining_frontier + 2 > limits.max_leaves;
          if (!must_stop && coin(rng)) {
            inst.nodes.push_back({id, id, hat::NodeKind::Internal});
            next.push_back(id);
          } else {
            leaf_ids.push_back(id);
            ++leaves;
          }
        }
      }
      frontier = std::move(next);
    }
  } while (static_cast<int>(leaf_ids.size()) > limits.max_leaves);
  std::sort(leaf_ids.begin(), leaf_ids.end());
  std::bernoulli_distribution unseen(limits.unseen_rate);
  bool any_seen = false;
  for (std::size_t i = 0; i < leaf_ids.size(); ++i) {
    bool is_unseen = unseen(rng);
    if (i + 1 == leaf_ids.size() && !any_seen) is_unseen = false;
    any_seen = any_seen || !is_unseen;
    inst.nodes.push_back({leaf_ids[i], leaf_ids[i], is_unseen ? hat::NodeKind::UnseenLeaf : hat::NodeKind::SeenLeaf});
  }
  inst.taxonomy = hat::Taxonomy::build(inst.nodes, inst.edges);

  const int attributes = uniform(1, limits.max_attributes);
  for (int m = 0; m < attributes; ++m) inst.attributes.push_back(attr_name(m));
  inst.signatures = hat::AttributeSignatureMatrix(leaf_ids, inst.attributes, 0);
  std::bernoulli_distribution on(0.4);
  for (std::size_t r = 0; r < leaf_ids.size(); ++r) {
    for (std::size_t m = 0; m < inst.attributes.size(); ++m) inst.signatures(r, m) = on(rng) ? 1 : 0;
  }
  return inst;
}

// Samples for every seen leaf, `dim` Gaussian features, and image-level
// labels that agree with the class signature with probability 0.8.
inline void add_samples(Instance& inst, std::mt19937_64& rng, int dim = 3, int max_per_class = 4) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution agree(0.8);
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<std::uint8_t>> labels;
  for (const auto& leaf : inst.taxonomy.leaves(hat::NodeKind::SeenLeaf)) {
    const int count = std::uniform_int_distribution<int>(1, max_per_class)(rng);
    const auto sig = inst.signatures.row(*inst.signatures.find_row(leaf));
    for (int s = 0; s < count; ++s) {
      inst.data.sample_ids.push_back(leaf + "_s" + std::to_string(s));
      inst.data.sample_classes.push_back(leaf);
      std::vector<double> row(static_cast<std::size_t>(dim));
      for (auto& v : row) v = normal(rng);
      rows.push_back(row);
      std::vector<std::uint8_t> l(sig.size());
      for (std::size_t m = 0; m < sig.size(); ++m) l[m] = agree(rng) ? sig[m] : 1 - sig[m];
      labels.push_back(l);
    }
  }
  inst.data.features.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < dim; ++k) inst.data.features(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<std::size_t>(k)];
  }
  hat::ImageAttributeLabels image(inst.data.sample_ids, inst.attributes, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t m = 0; m < inst.attributes.size(); ++m) image(i, m) = labels[i][m];
  }
  inst.data.attribute_labels = image;
}

// Parent map straight from the edge list.
inline std::map<std::string, std::string> parent_map(const std::vector<hat::Edge>& edges) {
  std::map<std::string, std::string> parent;
  for (const auto& [p, c] : edges) parent[c] = p;
  return parent;
}

// Path from `node` up to the root, node first.
inline std::vector<std::string> upward_path(const std::map<std::string, std::string>& parent, std::string node) {
  std::vector<std::string> path{node};
  for (auto it = parent.find(node); it != parent.end(); it = parent.find(node)) {
    node = it->second;
    path.push_back(node);
  }
  return path;
}

// Node x attribute table by union over descendant seen leaves.
inline std::map<std::string, std::vector<std::uint8_t>> propagation_oracle(const Instance& inst) {
  const auto parent = parent_map(inst.edges);
  std::map<std::string, std::vector<std::uint8_t>> rows;
  for (const auto& n : inst.nodes) rows[n.id].assign(inst.attributes.size(), 0);
  for (const auto& n : inst.nodes) {
    if (n.kind == hat::NodeKind::UnseenLeaf) {
      const auto sig = inst.signatures.row(*inst.signatures.find_row(n.id));
      rows[n.id].assign(sig.begin(), sig.end());
    }
    if (n.kind != hat::NodeKind::SeenLeaf) continue;
    const auto sig = inst.signatures.row(*inst.signatures.find_row(n.id));
    for (const auto& v : upward_path(parent, n.id)) {
      for (std::size_t m = 0; m < sig.size(); ++m) rows[v][m] |= sig[m];
    }
  }
  return rows;
}

}  // namespace testing
