#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hat/dataset.hpp"
#include "hat/labeled_matrix.hpp"
#include "hat/taxonomy.hpp"

namespace hat {

// Random stream keyed by (seed, keys...): independent of the order in which
// streams are requested. Uniform and normal transforms are implemented here
// rather than through <random> distributions, whose output is not portable.
class KeyedRng {
 public:
  KeyedRng(std::uint64_t seed, std::initializer_list<std::string_view> keys);

  std::uint64_t next() { return engine_(); }
  double uniform();  // [0, 1)
  double normal();   // standard normal

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct SynthSpec {
  int depth = 3;
  int branching = 3;
  int feature_dim = 32;
  int n_attributes = 12;
  int samples_per_class = 30;
  double subtree_shift_scale = 1.0;
  double noise_sigma = 0.5;
  double unseen_fraction = 0.25;
  std::uint64_t seed = 7;

  // Throws InvalidSpec.
  void validate() const;
  int leaf_count() const;
  int unseen_count() const;
};

nlohmann::json to_json(const SynthSpec& spec);
SynthSpec synth_spec_from_json(const nlohmann::json& j);

struct SynthBenchmark {
  Taxonomy taxonomy;                    // leaf kinds follow the split
  AttributeSignatureMatrix signatures;  // every leaf class
  Dataset data;                         // samples of every leaf class
  Dataset train;                        // seen-class samples
  Dataset test;                         // unseen-class samples
  std::vector<std::string> seen;
  std::vector<std::string> unseen;
  std::map<std::string, std::string> placement;  // unseen class -> parent node
};

// Complete branching^depth tree. Each attribute has a base feature direction
// and an independent displacement at every non-root internal node, scaled by
// subtree_shift_scale; a class realizes an attribute as the base plus the
// displacements along its path. Samples sum the realizations of the class's
// active attributes and add isotropic Gaussian noise. Class signatures turn
// each attribute on in a random subtree, perturb the resulting occurrence
// rates and re-binarize them at their mean.
SynthBenchmark generate(const SynthSpec& spec);

}  // namespace hat
