#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "hat/annotation.hpp"
#include "hat/classifier.hpp"
#include "hat/error.hpp"
#include "hat/eval.hpp"
#include "hat/pipeline.hpp"
#include "hat/synth.hpp"
#include "hat/taxonomy.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_python(const py::object& o) {
  if (o.is_none()) return nlohmann::json::object();
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

hat::AttributeSignatureMatrix signature_matrix(const std::vector<std::string>& classes,
                                               const std::vector<std::string>& attributes, const U8Array& values) {
  if (values.ndim() != 2 || static_cast<std::size_t>(values.shape(0)) != classes.size() ||
      static_cast<std::size_t>(values.shape(1)) != attributes.size()) {
    throw hat::Error(hat::ErrorCode::DimensionMismatch, "signature array shape does not match the id lists");
  }
  hat::AttributeSignatureMatrix out(classes, attributes, 0);
  auto v = values.unchecked<2>();
  for (std::size_t r = 0; r < classes.size(); ++r) {
    for (std::size_t c = 0; c < attributes.size(); ++c) out(r, c) = v(r, c) ? 1 : 0;
  }
  return out;
}

U8Array table_array(const hat::LabeledMatrix<std::uint8_t>& m) {
  U8Array out({m.rows(), m.cols()});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) v(r, c) = m(r, c);
  }
  return out;
}

py::dict scores_dict(const hat::Scored& s) {
  return py::dict("sample_ids"_a = s.scores.sample_ids, "classes"_a = s.scores.targets,
                  "scores"_a = Eigen::MatrixXd(s.scores.values), "predicted"_a = s.predicted,
                  "normalized"_a = s.scores.normalized);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hierarchical attribute transfer for zero-shot classification";
  py::register_exception<hat::Error>(m, "HatError", PyExc_ValueError);

  m.def(
      "prune_taxonomy", [](const std::string& document) {
        return hat::taxonomy_to_json(hat::prune_single_child(hat::parse_taxonomy(document))).dump();
      },
      "document"_a, "Validate a taxonomy JSON document and splice out single-child internal nodes.");

  m.def(
      "propagate",
      [](const std::string& taxonomy, const std::vector<std::string>& classes,
         const std::vector<std::string>& attributes, const U8Array& signatures) {
        const auto t = hat::parse_taxonomy(taxonomy);
        const auto table = hat::propagate(t, signature_matrix(classes, attributes, signatures));
        return py::make_tuple(table.row_ids(), table_array(table));
      },
      "taxonomy"_a, "classes"_a, "attributes"_a, "signatures"_a,
      "Node ids and the propagated node x attribute table.");

  m.def(
      "fit_logistic",
      [](const Eigen::MatrixXd& positives, const Eigen::MatrixXd& negatives, double cost) {
        const auto fit = hat::fit(positives, negatives, cost, {});
        return py::dict("weights"_a = fit.weights, "bias"_a = fit.bias, "iterations"_a = fit.report.iterations,
                        "objective"_a = fit.report.objective, "converged"_a = fit.report.converged);
      },
      "positives"_a, "negatives"_a, "cost"_a = 1.0);

  m.def(
      "roc_auc",
      [](const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
        return hat::roc_auc(scores, labels);
      },
      "scores"_a, "labels"_a);

  m.def(
      "multiclass_accuracy",
      [](const std::vector<std::string>& predicted, const std::vector<std::string>& truth) {
        const auto r = hat::multiclass_accuracy(predicted, truth);
        return py::dict("normalized"_a = r.normalized, "plain"_a = r.plain, "classes"_a = r.classes,
                        "per_class"_a = r.per_class);
      },
      "predicted"_a, "truth"_a);

  m.def(
      "synth",
      [](const py::object& spec) {
        const auto s = hat::synth_spec_from_json(from_python(spec));
        const auto b = hat::generate(s);
        return py::dict("taxonomy"_a = hat::taxonomy_to_json(b.taxonomy).dump(), "sample_ids"_a = b.data.sample_ids,
                        "sample_classes"_a = b.data.sample_classes, "features"_a = b.data.features,
                        "classes"_a = b.signatures.row_ids(), "attributes"_a = b.signatures.col_ids(),
                        "signatures"_a = table_array(b.signatures), "seen"_a = b.seen, "unseen"_a = b.unseen);
      },
      "spec"_a = py::none(), "Generate a synthetic benchmark from a spec dict (missing keys use defaults).");

  m.def(
      "zero_shot",
      [](const std::string& taxonomy, const std::vector<std::string>& classes,
         const std::vector<std::string>& attributes, const U8Array& signatures, const Eigen::MatrixXd& features,
         const std::vector<std::string>& sample_ids, const std::vector<std::string>& sample_classes,
         const std::vector<std::string>& seen, const std::string& method, bool normalize, bool fallback_parent,
         std::uint64_t seed, unsigned workers) {
        hat::Problem base;
        base.taxonomy = hat::prune_single_child(hat::parse_taxonomy(taxonomy));
        base.signatures = signature_matrix(classes, attributes, signatures);
        base.data.sample_ids = sample_ids;
        base.data.sample_classes = sample_classes;
        base.data.features = features;
        base.data.validate();
        const hat::Problem problem = base.with_split(seen);
        hat::TrainingConfig training;
        training.seed = seed;
        py::gil_scoped_release release;
        const auto table = hat::problem_table(problem);
        const auto bank = hat::train_problem(problem, table, training, workers);
        const auto scored = hat::predict(problem, table, bank, problem.test_data(), hat::method_from_string(method),
                                         normalize, fallback_parent, workers);
        py::gil_scoped_acquire acquire;
        return scores_dict(scored);
      },
      "taxonomy"_a, "classes"_a, "attributes"_a, "signatures"_a, "features"_a, "sample_ids"_a, "sample_classes"_a,
      "seen"_a, "method"_a = "hat", "normalize"_a = true, "fallback_parent"_a = false, "seed"_a = 0,
      "workers"_a = 1,
      "Train on the seen classes and score every other sample against the remaining leaf classes.");

  m.def(
      "bench",
      [](const py::object& spec, unsigned workers, bool normalize) {
        const auto s = hat::synth_spec_from_json(from_python(spec));
        nlohmann::json j;
        {
          py::gil_scoped_release release;
          j = hat::to_json(hat::run_bench(s, hat::TrainingConfig{}, workers, normalize));
        }
        return to_python(j);
      },
      "spec"_a = py::none(), "workers"_a = 1, "normalize"_a = true);

  m.def(
      "run",
      [](const std::string& command, const py::object& config) {
        hat::RunConfig c;
        hat::apply_json(c, from_python(config));
        py::gil_scoped_release release;
        if (command == "train") return hat::cmd_train(c);
        if (command == "predict") return hat::cmd_predict(c);
        if (command == "eval") return hat::cmd_eval(c);
        if (command == "bench") return hat::cmd_bench(c);
        if (command == "sweep") return hat::cmd_sweep(c);
        if (command == "synth") return hat::cmd_synth(c);
        if (command == "propagate") return hat::cmd_propagate(c);
        throw hat::Error(hat::ErrorCode::SchemaError, "unknown command '" + command + "'");
      },
      "command"_a, "config"_a = py::none(), "Run a CLI command with a config dict (keys as in the JSON config).");
}
