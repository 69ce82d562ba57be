#include "hat/model_bank.hpp"

#include <optional>

#include "hat/error.hpp"
#include "hat/parallel.hpp"
#include "hat/support_sets.hpp"

namespace hat {

const AttributeClassifier* ModelBank::find(const std::string& node, const std::string& attribute) const {
  auto it = classifiers.find({node, attribute});
  return it == classifiers.end() ? nullptr : &it->second;
}

void ModelBank::check_dimension(std::size_t d) const {
  if (d != dim) {
    throw Error(ErrorCode::DimensionMismatch,
                "model bank expects " + std::to_string(dim) + " features, got " + std::to_string(d));
  }
}

namespace {

struct Job {
  std::size_t node;
  std::size_t attribute;
};

struct Outcome {
  std::optional<AttributeClassifier> classifier;
  std::optional<SkipRecord> skip;
};

}  // namespace

ModelBank train_model_bank(const Taxonomy& t, const NodeAttributeTable& table, const Dataset& data,
                           const AttributeSignatureMatrix& signatures, const TrainingConfig& config,
                           unsigned workers) {
  data.validate();
  data.validate_against(t);
  if (data.size() == 0) throw Error(ErrorCode::EmptySet, "training set is empty");
  const SupportSets supports(t, table, data, signatures, config.mode);

  // Nodes come in id order, so jobs are already in (node, attribute) key order.
  std::vector<Job> jobs;
  for (std::size_t v = 0; v < t.size(); ++v) {
    if (t.node_at(v).kind == NodeKind::UnseenLeaf) continue;
    for (std::size_t m = 0; m < table.cols(); ++m) {
      if (table(v, m)) jobs.push_back({v, m});
    }
  }

  std::vector<Outcome> outcomes(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const Job& job = jobs[j];
    const std::string& node = t.node_at(job.node).id;
    const std::string& attribute = table.col_ids()[job.attribute];
    const bool is_root = job.node == t.root_index();
    TrainingSets sets;
    try {
      sets = is_root ? supports.root_training_sets(attribute) : supports.training_sets(node, attribute);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoContrast && e.code() != ErrorCode::EmptyPositives) throw;
      outcomes[j].skip = SkipRecord{node, attribute, std::string(to_string(e.code()))};
      return;
    }
    const BinaryProblem problem = make_problem(data, sets);
    AttributeClassifier c;
    c.node = node;
    c.attribute = attribute;
    c.scheme = is_root ? Scheme::OneVsAll : Scheme::ChildVsParent;
    try {
      c.cost = select_cost(problem, config.cost_grid, config.folds, config.seed, config.solver);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::FallbackCost) throw;
      c.cost = config.fallback_cost;
      c.cost_from_fallback = true;
    }
    LinearFit model = fit(problem, c.cost, config.solver);
    c.weights = std::move(model.weights);
    c.bias = model.bias;
    c.solver = model.report;
    outcomes[j].classifier = std::move(c);
  });

  ModelBank bank;
  bank.dim = data.dim();
  bank.config = config;
  for (auto& outcome : outcomes) {
    if (outcome.classifier) {
      auto key = std::make_pair(outcome.classifier->node, outcome.classifier->attribute);
      bank.classifiers.emplace(std::move(key), std::move(*outcome.classifier));
    } else if (outcome.skip) {
      bank.skipped.push_back(std::move(*outcome.skip));
    }
  }
  return bank;
}

}  // namespace hat
