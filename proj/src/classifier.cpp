#include "hat/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hat/error.hpp"

namespace hat {

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::OneVsAll ? "one-vs-all" : "child-vs-parent";
}

Scheme scheme_from_string(std::string_view text) {
  if (text == "one-vs-all") return Scheme::OneVsAll;
  if (text == "child-vs-parent") return Scheme::ChildVsParent;
  throw Error(ErrorCode::SchemaError, "unknown scheme '" + std::string(text) + "'");
}

std::size_t BinaryProblem::positives() const { return static_cast<std::size_t>((y.array() > 0).count()); }
std::size_t BinaryProblem::negatives() const { return static_cast<std::size_t>((y.array() < 0).count()); }

BinaryProblem make_problem(const Dataset& data, const TrainingSets& sets) {
  BinaryProblem p;
  const auto n = static_cast<Eigen::Index>(sets.positives.size() + sets.negatives.size());
  p.x.resize(n, data.features.cols());
  p.y.resize(n);
  Eigen::Index i = 0;
  for (std::size_t r : sets.positives.rows()) {
    p.x.row(i) = data.features.row(static_cast<Eigen::Index>(r));
    p.y(i++) = 1.0;
    p.ids.push_back(data.sample_ids[r]);
  }
  for (std::size_t r : sets.negatives.rows()) {
    p.x.row(i) = data.features.row(static_cast<Eigen::Index>(r));
    p.y(i++) = -1.0;
    p.ids.push_back(data.sample_ids[r]);
  }
  return p;
}

BinaryProblem make_problem(const Eigen::MatrixXd& positives, const Eigen::MatrixXd& negatives) {
  if (positives.cols() != negatives.cols()) throw Error(ErrorCode::DimensionMismatch, "feature widths differ");
  BinaryProblem p;
  p.x.resize(positives.rows() + negatives.rows(), positives.cols());
  p.x << positives, negatives;
  p.y.resize(p.x.rows());
  p.y.head(positives.rows()).setOnes();
  p.y.tail(negatives.rows()).setConstant(-1.0);
  for (Eigen::Index i = 0; i < p.x.rows(); ++i) p.ids.push_back(std::to_string(i));
  return p;
}

namespace {

// log(1 + exp(t)) without overflow.
double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

void check_problem(const BinaryProblem& problem, double cost) {
  if (problem.positives() == 0 || problem.negatives() == 0) {
    throw Error(ErrorCode::EmptySet, "both positive and negative samples are required");
  }
  if (!(cost > 0.0) || !std::isfinite(cost)) throw Error(ErrorCode::InvalidCost, "cost must be positive");
  if (!problem.x.allFinite()) throw Error(ErrorCode::NonFiniteFeature, "non-finite feature value");
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_objective(const BinaryProblem& problem, double cost, const Eigen::VectorXd& w, double b) {
  Eigen::VectorXd margin = ((problem.x * w).array() + b).matrix().cwiseProduct(problem.y);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < margin.size(); ++i) loss += softplus(-margin(i));
  return 0.5 * w.squaredNorm() + cost * loss;
}

double logistic_objective_and_gradient(const BinaryProblem& problem, double cost, const Eigen::VectorXd& theta,
                                       Eigen::VectorXd& gradient) {
  const Eigen::Index d = problem.x.cols();
  const auto w = theta.head(d);
  const double b = theta(d);
  Eigen::VectorXd margin = ((problem.x * w).array() + b).matrix().cwiseProduct(problem.y);
  Eigen::VectorXd coef(margin.size());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < margin.size(); ++i) {
    loss += softplus(-margin(i));
    // d/dz log(1 + exp(-y z)) = -y * sigmoid(-y z)
    coef(i) = -problem.y(i) * sigmoid(-margin(i));
  }
  gradient.resize(d + 1);
  gradient.head(d) = w + cost * (problem.x.transpose() * coef);
  gradient(d) = cost * coef.sum();
  return 0.5 * w.squaredNorm() + cost * loss;
}

LinearFit fit(const BinaryProblem& problem, double cost, const SolverOptions& options) {
  check_problem(problem, cost);
  const Eigen::Index d = problem.x.cols();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  auto objective = [&](const Eigen::VectorXd& t, Eigen::VectorXd& g) {
    return logistic_objective_and_gradient(problem, cost, t, g);
  };
  LinearFit out;
  out.report = minimize_lbfgs(objective, theta, options);
  out.weights = theta.head(d);
  out.bias = theta(d);
  return out;
}

LinearFit fit(const Eigen::MatrixXd& positives, const Eigen::MatrixXd& negatives, double cost,
              const SolverOptions& options) {
  if (positives.rows() == 0 || negatives.rows() == 0) throw Error(ErrorCode::EmptySet, "empty training set");
  return fit(make_problem(positives, negatives), cost, options);
}

double score(const Eigen::VectorXd& weights, double bias, const Eigen::VectorXd& x) {
  if (weights.size() != x.size()) throw Error(ErrorCode::DimensionMismatch, "feature dimension does not match model");
  return sigmoid(weights.dot(x) + bias);
}

double score(const AttributeClassifier& c, const Eigen::VectorXd& x) { return score(c.weights, c.bias, x); }

std::uint64_t fold_hash(std::string_view id, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : id) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  // splitmix64 finalizer over the combined value
  std::uint64_t z = h ^ (seed + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<int> assign_folds(const BinaryProblem& problem, int folds, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(problem.y.size());
  std::vector<int> fold(n, 0);
  for (double label : {1.0, -1.0}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (problem.y(static_cast<Eigen::Index>(i)) == label) members.push_back(i);
    }
    std::vector<std::uint64_t> keys(n);
    for (std::size_t i : members) keys[i] = fold_hash(problem.ids[i], seed);
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return keys[a] != keys[b] ? keys[a] < keys[b] : problem.ids[a] < problem.ids[b];
    });
    for (std::size_t rank = 0; rank < members.size(); ++rank) {
      fold[members[rank]] = static_cast<int>(rank % static_cast<std::size_t>(folds));
    }
  }
  return fold;
}

double select_cost(const BinaryProblem& problem, const std::vector<double>& grid, int folds, std::uint64_t seed,
                   const SolverOptions& options) {
  if (grid.empty()) throw Error(ErrorCode::InvalidCost, "empty cost grid");
  if (folds < 2) throw Error(ErrorCode::InvalidSpec, "at least two folds are required");
  const auto k = static_cast<std::size_t>(folds);
  if (problem.positives() < k || problem.negatives() < k) {
    throw Error(ErrorCode::FallbackCost, "too few samples for stratified cross-validation");
  }
  const std::vector<int> fold = assign_folds(problem, folds, seed);

  std::vector<BinaryProblem> train(k);
  std::vector<BinaryProblem> valid(k);
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> tr;
    std::vector<Eigen::Index> va;
    for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? va : tr).push_back(static_cast<Eigen::Index>(i));
    auto take = [&](const std::vector<Eigen::Index>& rows) {
      BinaryProblem p;
      p.x = problem.x(rows, Eigen::all);
      p.y = problem.y(rows);
      for (auto r : rows) p.ids.push_back(problem.ids[static_cast<std::size_t>(r)]);
      return p;
    };
    train[static_cast<std::size_t>(f)] = take(tr);
    valid[static_cast<std::size_t>(f)] = take(va);
  }

  std::vector<double> costs = grid;
  std::sort(costs.begin(), costs.end());
  double best_cost = costs.front();
  double best_accuracy = -1.0;
  for (double cost : costs) {
    double total = 0.0;
    for (std::size_t f = 0; f < k; ++f) {
      LinearFit model = fit(train[f], cost, options);
      const auto& v = valid[f];
      Eigen::VectorXd z = (v.x * model.weights).array() + model.bias;
      std::size_t correct = 0;
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        // sigmoid(z) >= 0.5 <=> z >= 0
        if ((z(i) >= 0.0) == (v.y(i) > 0.0)) ++correct;
      }
      total += static_cast<double>(correct) / static_cast<double>(v.y.size());
    }
    const double accuracy = total / static_cast<double>(k);
    if (accuracy > best_accuracy + 1e-12) {
      best_accuracy = accuracy;
      best_cost = cost;
    }
  }
  return best_cost;
}

}  // namespace hat
