#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hat/dataset.hpp"
#include "hat/lbfgs.hpp"
#include "hat/support_sets.hpp"

namespace hat {

enum class Scheme { OneVsAll, ChildVsParent };

std::string_view to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view text);

// Linear logistic scorer for one attribute at one taxonomy node.
struct AttributeClassifier {
  std::string node;
  std::string attribute;
  Eigen::VectorXd weights;
  double bias = 0.0;
  Scheme scheme = Scheme::OneVsAll;
  double cost = 1.0;
  bool cost_from_fallback = false;  // cross-validation had too few samples
  SolverReport solver;
};

// Labelled binary problem: rows of `x` with targets +1 / -1.
struct BinaryProblem {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::string> ids;

  std::size_t positives() const;
  std::size_t negatives() const;
};

BinaryProblem make_problem(const Dataset& data, const TrainingSets& sets);
BinaryProblem make_problem(const Eigen::MatrixXd& positives, const Eigen::MatrixXd& negatives);

// 0.5 |w|^2 + cost * sum_i log(1 + exp(-y_i (w.x_i + b))); the bias is not regularized.
double logistic_objective(const BinaryProblem& problem, double cost, const Eigen::VectorXd& w, double b);
// Same objective with the gradient over (w, b) packed as [w; b].
double logistic_objective_and_gradient(const BinaryProblem& problem, double cost, const Eigen::VectorXd& theta,
                                       Eigen::VectorXd& gradient);

struct LinearFit {
  Eigen::VectorXd weights;
  double bias = 0.0;
  SolverReport report;
};

LinearFit fit(const BinaryProblem& problem, double cost, const SolverOptions& options = {});
LinearFit fit(const Eigen::MatrixXd& positives, const Eigen::MatrixXd& negatives, double cost,
              const SolverOptions& options = {});

double sigmoid(double z);
double score(const Eigen::VectorXd& weights, double bias, const Eigen::VectorXd& x);
double score(const AttributeClassifier& c, const Eigen::VectorXd& x);

// Stable 64-bit hash of a sample id under a seed.
std::uint64_t fold_hash(std::string_view id, std::uint64_t seed);

// Stratified fold assignment: positives and negatives are each ordered by
// fold_hash (ties by id) and dealt round-robin. Depends only on ids and seed.
std::vector<int> assign_folds(const BinaryProblem& problem, int folds, std::uint64_t seed);

// Grid value with the best mean validation accuracy; ties go to the smaller
// cost. Throws FallbackCost when a class has fewer samples than folds.
double select_cost(const BinaryProblem& problem, const std::vector<double>& grid, int folds, std::uint64_t seed,
                   const SolverOptions& options = {});

}  // namespace hat
