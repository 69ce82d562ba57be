#include "hat/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "hat/annotation.hpp"
#include "hat/classifier.hpp"
#include "hat/error.hpp"

namespace hat {

namespace {

constexpr double kOccurrenceHigh = 0.8;
constexpr double kOccurrenceLow = 0.2;
constexpr double kOccurrenceNoise = 0.25;

std::string path_suffix(const std::vector<int>& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '_';
    out += std::to_string(path[i]);
  }
  return out;
}

std::string padded(int value, int count) {
  std::string digits = std::to_string(value);
  const std::size_t width = std::to_string(std::max(count - 1, 0)).size();
  return std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

}  // namespace

KeyedRng::KeyedRng(std::uint64_t seed, std::initializer_list<std::string_view> keys) {
  std::uint64_t state = fold_hash("hat.synth", seed);
  for (auto key : keys) state = fold_hash(key, state);
  engine_.seed(state);
}

double KeyedRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double KeyedRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

int SynthSpec::leaf_count() const {
  int n = 1;
  for (int i = 0; i < depth; ++i) n *= branching;
  return n;
}

int SynthSpec::unseen_count() const {
  return static_cast<int>(std::lround(unseen_fraction * static_cast<double>(leaf_count())));
}

void SynthSpec::validate() const {
  if (depth < 2) throw Error(ErrorCode::InvalidSpec, "depth must be at least 2");
  if (branching < 2) throw Error(ErrorCode::InvalidSpec, "branching must be at least 2");
  if (std::pow(static_cast<double>(branching), depth) > 1e6) throw Error(ErrorCode::InvalidSpec, "tree too large");
  if (feature_dim < 1 || n_attributes < 1) throw Error(ErrorCode::InvalidSpec, "dimensions must be positive");
  if (samples_per_class < 2) throw Error(ErrorCode::InvalidSpec, "need at least two samples per class");
  if (!(subtree_shift_scale >= 0.0) || !(noise_sigma >= 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "scales must be non-negative");
  }
  if (!(unseen_fraction > 0.0 && unseen_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidSpec, "unseen_fraction must lie in (0, 1)");
  }
  const int unseen = unseen_count();
  if (unseen < 2 || leaf_count() - unseen < 2) {
    throw Error(ErrorCode::InvalidSpec, "need at least two seen and two unseen classes");
  }
}

nlohmann::json to_json(const SynthSpec& spec) {
  return {{"depth", spec.depth},
          {"branching", spec.branching},
          {"feature_dim", spec.feature_dim},
          {"n_attributes", spec.n_attributes},
          {"samples_per_class", spec.samples_per_class},
          {"subtree_shift_scale", spec.subtree_shift_scale},
          {"noise_sigma", spec.noise_sigma},
          {"unseen_fraction", spec.unseen_fraction},
          {"seed", spec.seed}};
}

SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  SynthSpec spec;
  try {
    spec.depth = j.value("depth", spec.depth);
    spec.branching = j.value("branching", spec.branching);
    spec.feature_dim = j.value("feature_dim", spec.feature_dim);
    spec.n_attributes = j.value("n_attributes", spec.n_attributes);
    spec.samples_per_class = j.value("samples_per_class", spec.samples_per_class);
    spec.subtree_shift_scale = j.value("subtree_shift_scale", spec.subtree_shift_scale);
    spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
    spec.unseen_fraction = j.value("unseen_fraction", spec.unseen_fraction);
    spec.seed = j.value("seed", spec.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, e.what());
  }
  return spec;
}

SynthBenchmark generate(const SynthSpec& spec) {
  spec.validate();
  const auto d = static_cast<Eigen::Index>(spec.feature_dim);
  const double unit = 1.0 / std::sqrt(static_cast<double>(spec.feature_dim));

  // Tree: root, internal nodes "n<path>", leaves "c<path>".
  std::vector<Node> nodes{{"root", "root", NodeKind::Internal}};
  std::vector<Edge> edges;
  std::vector<std::vector<std::string>> levels{{"root"}};
  std::map<std::string, std::vector<std::string>> internal_path;  // leaf -> non-root internal ancestors
  std::vector<std::string> leaves;
  {
    std::vector<std::pair<std::string, std::vector<int>>> frontier{{"root", {}}};
    for (int level = 1; level <= spec.depth; ++level) {
      std::vector<std::pair<std::string, std::vector<int>>> next;
      levels.emplace_back();
      for (const auto& [parent, path] : frontier) {
        for (int b = 0; b < spec.branching; ++b) {
          std::vector<int> child_path = path;
          child_path.push_back(b);
          const bool leaf = level == spec.depth;
          std::string id = (leaf ? "c" : "n") + path_suffix(child_path);
          nodes.push_back({id, id, leaf ? NodeKind::SeenLeaf : NodeKind::Internal});
          edges.emplace_back(parent, id);
          levels.back().push_back(id);
          if (leaf) leaves.push_back(id);
          next.emplace_back(id, child_path);
        }
      }
      frontier = std::move(next);
    }
  }
  std::sort(leaves.begin(), leaves.end());
  const Taxonomy full = Taxonomy::build(nodes, edges);
  for (const auto& leaf : leaves) {
    std::vector<std::string> path;
    for (const auto& a : full.ancestors(leaf)) {
      if (a != full.root()) path.push_back(a);
    }
    internal_path[leaf] = path;
  }

  std::vector<std::string> attributes;
  for (int m = 0; m < spec.n_attributes; ++m) {
    attributes.push_back("a" + padded(m, spec.n_attributes));
  }

  // Seen / unseen split: leaves ordered by a keyed hash.
  std::vector<std::string> shuffled = leaves;
  {
    KeyedRng rng(spec.seed, {"split"});
    const std::uint64_t split_key = rng.next();
    std::sort(shuffled.begin(), shuffled.end(), [&](const std::string& a, const std::string& b) {
      const auto ha = fold_hash(a, split_key);
      const auto hb = fold_hash(b, split_key);
      return ha != hb ? ha < hb : a < b;
    });
  }
  std::vector<std::string> unseen(shuffled.begin(), shuffled.begin() + spec.unseen_count());
  std::vector<std::string> seen(shuffled.begin() + spec.unseen_count(), shuffled.end());
  std::sort(unseen.begin(), unseen.end());
  std::sort(seen.begin(), seen.end());

  // Signatures: each attribute on in one random subtree below the root.
  OccurrenceMatrix occurrence(leaves, attributes, 0.0);
  for (std::size_t m = 0; m < attributes.size(); ++m) {
    KeyedRng pick(spec.seed, {"subtree", attributes[m]});
    const auto level = 1 + static_cast<std::size_t>(pick.next() % static_cast<std::uint64_t>(spec.depth - 1));
    const auto& candidates = levels[level];
    const std::string& subtree = candidates[pick.next() % candidates.size()];
    for (std::size_t c = 0; c < leaves.size(); ++c) {
      const auto& path = internal_path[leaves[c]];
      const bool inside = std::find(path.begin(), path.end(), subtree) != path.end();
      KeyedRng noise(spec.seed, {"occurrence", leaves[c], attributes[m]});
      const double value = (inside ? kOccurrenceHigh : kOccurrenceLow) + kOccurrenceNoise * noise.normal();
      occurrence(c, m) = std::clamp(value, 0.0, 1.0);
    }
  }
  AttributeSignatureMatrix signatures = binarize_occurrence(occurrence);
  for (std::size_t c = 0; c < leaves.size(); ++c) {
    auto row = signatures.row(c);
    if (std::find(row.begin(), row.end(), 1) != row.end()) continue;
    auto occ = occurrence.row(c);
    row[static_cast<std::size_t>(std::max_element(occ.begin(), occ.end()) - occ.begin())] = 1;
  }

  // Attribute realizations per leaf: base + displacement at each internal node on the path.
  std::map<std::string, Eigen::VectorXd> base;
  for (const auto& attr : attributes) {
    KeyedRng rng(spec.seed, {"base", attr});
    Eigen::VectorXd v(d);
    for (Eigen::Index k = 0; k < d; ++k) v(k) = unit * rng.normal();
    base[attr] = v;
  }
  auto shift = [&](const std::string& node, const std::string& attr) {
    KeyedRng rng(spec.seed, {"shift", node, attr});
    Eigen::VectorXd v(d);
    for (Eigen::Index k = 0; k < d; ++k) v(k) = spec.subtree_shift_scale * unit * rng.normal();
    return v;
  };

  SynthBenchmark out;
  out.data.features.resize(static_cast<Eigen::Index>(leaves.size()) * spec.samples_per_class, d);
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < leaves.size(); ++c) {
    const std::string& leaf = leaves[c];
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (std::size_t m = 0; m < attributes.size(); ++m) {
      if (!signatures(c, m)) continue;
      mean += base[attributes[m]];
      for (const auto& node : internal_path[leaf]) mean += shift(node, attributes[m]);
    }
    for (int s = 0; s < spec.samples_per_class; ++s) {
      const std::string sid = leaf + "_" + padded(s, spec.samples_per_class);
      KeyedRng rng(spec.seed, {"sample", sid});
      for (Eigen::Index k = 0; k < d; ++k) out.data.features(row, k) = mean(k) + spec.noise_sigma * rng.normal();
      out.data.sample_ids.push_back(sid);
      out.data.sample_classes.push_back(leaf);
      ++row;
    }
  }

  const std::set<std::string> seen_set(seen.begin(), seen.end());
  out.taxonomy = with_seen_leaves(full, seen_set);
  out.signatures = std::move(signatures);
  out.train = out.data.restrict_to_classes(seen_set);
  out.test = out.data.restrict_to_classes({unseen.begin(), unseen.end()});
  for (const auto& z : unseen) out.placement[z] = *out.taxonomy.parent(z);
  out.seen = std::move(seen);
  out.unseen = std::move(unseen);
  return out;
}

}  // namespace hat
