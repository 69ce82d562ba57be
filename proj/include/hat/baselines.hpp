#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hat/labeled_matrix.hpp"
#include "hat/model_bank.hpp"
#include "hat/transfer.hpp"

namespace hat {

inline constexpr double kProbabilityClamp = 1e-12;

// Direct attribute prediction over the root (one-vs-all) classifiers:
//   sum_m log p(a_m = a_m^z | x) - sum_m log p(a_m^z)
// with posteriors clamped to [1e-12, 1 - 1e-12]. `priors` gives p(a_m = 1)
// per signature column and defaults to 0.5 everywhere. Attributes without a
// root classifier are dropped when no unseen class uses them and raise
// MissingRootClassifier otherwise.
ScoreTable dap_scores(const ModelBank& bank, const std::string& root, const AttributeSignatureMatrix& signatures,
                      const Eigen::MatrixXd& features, const std::vector<std::string>& sample_ids,
                      const std::optional<std::vector<double>>& priors = std::nullopt);

// Mean root-classifier score over each class's active attributes. Attributes
// without a root classifier are skipped; NoActiveAttributes if none remain.
ScoreTable ens_scores(const ModelBank& bank, const std::string& root, const AttributeSignatureMatrix& signatures,
                      const Eigen::MatrixXd& features, const std::vector<std::string>& sample_ids);

// Single-sample forms; one entry per signature row.
std::vector<double> dap_score(const ModelBank& bank, const std::string& root,
                              const AttributeSignatureMatrix& signatures, const Eigen::VectorXd& x,
                              const std::optional<std::vector<double>>& priors = std::nullopt);
std::vector<double> ens_score(const ModelBank& bank, const std::string& root,
                              const AttributeSignatureMatrix& signatures, const Eigen::VectorXd& x);

}  // namespace hat
