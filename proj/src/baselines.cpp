#include "hat/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "hat/error.hpp"

namespace hat {

namespace {

// Root classifier per signature column (nullptr where none was trained).
std::vector<const AttributeClassifier*> root_classifiers(const ModelBank& bank, const std::string& root,
                                                         const AttributeSignatureMatrix& signatures) {
  std::vector<const AttributeClassifier*> out;
  for (const auto& attr : signatures.col_ids()) out.push_back(bank.find(root, attr));
  return out;
}

Eigen::MatrixXd root_probabilities(const std::vector<const AttributeClassifier*>& roots, const Eigen::MatrixXd& x,
                                   std::size_t dim) {
  if (static_cast<std::size_t>(x.cols()) != dim) {
    throw Error(ErrorCode::DimensionMismatch, "feature dimension does not match model bank");
  }
  Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(x.rows(), static_cast<Eigen::Index>(roots.size()));
  for (std::size_t m = 0; m < roots.size(); ++m) {
    if (!roots[m]) continue;
    Eigen::VectorXd z = (x * roots[m]->weights).array() + roots[m]->bias;
    probs.col(static_cast<Eigen::Index>(m)) = z.unaryExpr([](double v) { return sigmoid(v); });
  }
  return probs;
}

}  // namespace

ScoreTable dap_scores(const ModelBank& bank, const std::string& root, const AttributeSignatureMatrix& signatures,
                      const Eigen::MatrixXd& features, const std::vector<std::string>& sample_ids,
                      const std::optional<std::vector<double>>& priors) {
  const auto roots = root_classifiers(bank, root, signatures);
  if (priors && priors->size() != signatures.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "one prior per attribute is required");
  }
  std::vector<std::size_t> used;
  for (std::size_t m = 0; m < roots.size(); ++m) {
    if (roots[m]) {
      used.push_back(m);
      continue;
    }
    for (std::size_t z = 0; z < signatures.rows(); ++z) {
      if (signatures(z, m)) {
        throw Error(ErrorCode::MissingRootClassifier,
                    "no root classifier for attribute '" + signatures.col_ids()[m] + "'");
      }
    }
  }
  const Eigen::MatrixXd probs = root_probabilities(roots, features, bank.dim);
  auto clamp = [](double p) { return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp); };

  // Prior term per class.
  std::vector<double> prior_term(signatures.rows(), 0.0);
  for (std::size_t z = 0; z < signatures.rows(); ++z) {
    for (std::size_t m : used) {
      const double p1 = priors ? clamp((*priors)[m]) : 0.5;
      prior_term[z] += std::log(signatures(z, m) ? p1 : 1.0 - p1);
    }
  }

  ScoreTable out{sample_ids, signatures.row_ids(),
                 Eigen::MatrixXd::Zero(features.rows(), static_cast<Eigen::Index>(signatures.rows())), false};
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (std::size_t z = 0; z < signatures.rows(); ++z) {
      double log_likelihood = 0.0;
      for (std::size_t m : used) {
        const double p = clamp(probs(i, static_cast<Eigen::Index>(m)));
        log_likelihood += std::log(signatures(z, m) ? p : 1.0 - p);
      }
      out.values(i, static_cast<Eigen::Index>(z)) = log_likelihood - prior_term[z];
    }
  }
  return out;
}

ScoreTable ens_scores(const ModelBank& bank, const std::string& root, const AttributeSignatureMatrix& signatures,
                      const Eigen::MatrixXd& features, const std::vector<std::string>& sample_ids) {
  const auto roots = root_classifiers(bank, root, signatures);
  std::vector<std::vector<std::size_t>> active(signatures.rows());
  for (std::size_t z = 0; z < signatures.rows(); ++z) {
    for (std::size_t m = 0; m < signatures.cols(); ++m) {
      if (signatures(z, m) && roots[m]) active[z].push_back(m);
    }
    if (active[z].empty()) {
      throw Error(ErrorCode::NoActiveAttributes, "class '" + signatures.row_ids()[z] + "' has no usable attribute");
    }
  }
  const Eigen::MatrixXd probs = root_probabilities(roots, features, bank.dim);
  ScoreTable out{sample_ids, signatures.row_ids(),
                 Eigen::MatrixXd::Zero(features.rows(), static_cast<Eigen::Index>(signatures.rows())), false};
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (std::size_t z = 0; z < signatures.rows(); ++z) {
      double sum = 0.0;
      for (std::size_t m : active[z]) sum += probs(i, static_cast<Eigen::Index>(m));
      out.values(i, static_cast<Eigen::Index>(z)) = sum / static_cast<double>(active[z].size());
    }
  }
  return out;
}

std::vector<double> dap_score(const ModelBank& bank, const std::string& root,
                              const AttributeSignatureMatrix& signatures, const Eigen::VectorXd& x,
                              const std::optional<std::vector<double>>& priors) {
  ScoreTable t = dap_scores(bank, root, signatures, x.transpose(), {"x"}, priors);
  return {t.values.data(), t.values.data() + t.values.size()};
}

std::vector<double> ens_score(const ModelBank& bank, const std::string& root,
                              const AttributeSignatureMatrix& signatures, const Eigen::VectorXd& x) {
  ScoreTable t = ens_scores(bank, root, signatures, x.transpose(), {"x"});
  return {t.values.data(), t.values.data() + t.values.size()};
}

}  // namespace hat
