// Command-line front end: hat <train|predict|eval|bench|sweep|synth|propagate> [options]
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hat/error.hpp"
#include "hat/io.hpp"
#include "hat/pipeline.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct Flags {
  std::string config;
  std::string taxonomy, features, labels, attributes, split, out, model, predictions, dap_priors;
  std::string feature_format, attr_mode, class_attr_values, method;
  bool no_normalize = false;
  bool fallback_parent = false;
  bool l2_normalize = false;
  bool plain_accuracy = false;
  bool dump_support = false;
  std::vector<double> c_grid;
  int folds = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::vector<double> sizes;
  int repeats = 0;
  std::string synth_spec;
  int depth = 0, branching = 0, feature_dim = 0, n_attributes = 0, samples = 0;
  double shift = 0.0, noise = 0.0, unseen_fraction = 0.0;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  cmd->add_option("--taxonomy", f.taxonomy, "taxonomy JSON");
  cmd->add_option("--features", f.features, "feature file");
  cmd->add_option("--labels", f.labels, "sample_id,class_id sidecar for binary features");
  cmd->add_option("--feature-format", f.feature_format, "csv or binary")->check(CLI::IsMember({"csv", "binary"}));
  cmd->add_option("--attributes", f.attributes, "class signatures, class occurrences or image attribute labels");
  cmd->add_option("--attr-mode", f.attr_mode, "per-class or per-image")
      ->check(CLI::IsMember({"per-class", "per-image"}));
  cmd->add_option("--class-attr-values", f.class_attr_values, "binary or occurrence (per-class mode)")
      ->check(CLI::IsMember({"binary", "occurrence"}));
  cmd->add_option("--split", f.split, "split JSON with seen and unseen class lists");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--model", f.model, "model bank JSON");
  cmd->add_option("--predictions", f.predictions, "predictions CSV");
  cmd->add_option("--dap-priors", f.dap_priors, "attribute,prior CSV for DAP (default 0.5 each)");
  cmd->add_option("--method", f.method, "hat, dap or ens")->check(CLI::IsMember({"hat", "dap", "ens"}));
  cmd->add_flag("--no-normalize", f.no_normalize, "keep raw class scores");
  cmd->add_flag("--fallback-parent", f.fallback_parent, "use the parent's attributes as unseen signatures");
  cmd->add_flag("--l2-normalize", f.l2_normalize, "scale feature rows to unit length");
  cmd->add_flag("--plain-accuracy", f.plain_accuracy, "report plain instead of class-balanced accuracy");
  cmd->add_flag("--dump-support", f.dump_support, "write support set sizes");
  cmd->add_option("--c-grid", f.c_grid, "candidate costs")->delimiter(',');
  cmd->add_option("--folds", f.folds, "cross-validation folds")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "seed");
  cmd->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
}

void add_synth(CLI::App* cmd, Flags& f) {
  cmd->add_option("--synth-spec", f.synth_spec, "synthetic spec JSON")->check(CLI::ExistingFile);
  cmd->add_option("--depth", f.depth);
  cmd->add_option("--branching", f.branching);
  cmd->add_option("--dim", f.feature_dim);
  cmd->add_option("--n-attributes", f.n_attributes);
  cmd->add_option("--samples-per-class", f.samples);
  cmd->add_option("--shift", f.shift, "subtree shift scale");
  cmd->add_option("--noise", f.noise, "noise sigma");
  cmd->add_option("--unseen-fraction", f.unseen_fraction);
}

bool given(const CLI::App* cmd, const char* name) {
  const auto* opt = cmd->get_option_no_throw(name);
  return opt && opt->count() > 0;
}

hat::RunConfig resolve(const CLI::App* cmd, const Flags& f) {
  hat::RunConfig c;
  if (!f.config.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(hat::read_text_file(f.config));
    } catch (const nlohmann::json::parse_error& e) {
      throw hat::Error(hat::ErrorCode::ParseError, std::string("config: ") + e.what());
    }
    hat::apply_json(c, j);
  }
  auto path = [&](const char* name, const std::string& value, std::optional<hat::fs::path>& target) {
    if (given(cmd, name)) target = value;
  };
  path("--taxonomy", f.taxonomy, c.taxonomy);
  path("--features", f.features, c.features);
  path("--labels", f.labels, c.labels);
  path("--attributes", f.attributes, c.attributes);
  path("--split", f.split, c.split);
  path("--out", f.out, c.out);
  path("--model", f.model, c.model);
  path("--predictions", f.predictions, c.predictions);
  path("--dap-priors", f.dap_priors, c.dap_priors);
  if (given(cmd, "--feature-format")) c.feature_format = hat::feature_format_from_string(f.feature_format);
  if (given(cmd, "--attr-mode")) c.mode = hat::annotation_mode_from_string(f.attr_mode);
  if (given(cmd, "--class-attr-values")) c.occurrence_values = f.class_attr_values == "occurrence";
  if (given(cmd, "--method")) c.method = hat::method_from_string(f.method);
  if (f.no_normalize) c.normalize = false;
  if (f.fallback_parent) c.fallback_parent = true;
  if (f.l2_normalize) c.l2_normalize = true;
  if (f.plain_accuracy) c.plain_accuracy = true;
  if (f.dump_support) c.dump_support = true;
  if (given(cmd, "--c-grid")) c.cost_grid = f.c_grid;
  if (given(cmd, "--folds")) c.folds = f.folds;
  if (given(cmd, "--seed")) c.seed = f.seed;
  if (given(cmd, "--workers")) c.workers = f.workers;
  if (given(cmd, "--sizes")) c.sizes = f.sizes;
  if (given(cmd, "--repeats")) c.repeats = f.repeats;

  if (given(cmd, "--synth-spec")) {
    c.synth = hat::synth_spec_from_json(nlohmann::json::parse(hat::read_text_file(f.synth_spec)));
  }
  if (given(cmd, "--depth")) c.synth.depth = f.depth;
  if (given(cmd, "--branching")) c.synth.branching = f.branching;
  if (given(cmd, "--dim")) c.synth.feature_dim = f.feature_dim;
  if (given(cmd, "--n-attributes")) c.synth.n_attributes = f.n_attributes;
  if (given(cmd, "--samples-per-class")) c.synth.samples_per_class = f.samples;
  if (given(cmd, "--shift")) c.synth.subtree_shift_scale = f.shift;
  if (given(cmd, "--noise")) c.synth.noise_sigma = f.noise;
  if (given(cmd, "--unseen-fraction")) c.synth.unseen_fraction = f.unseen_fraction;
  // The synthetic generator follows --seed unless a spec pins its own.
  if (given(cmd, "--seed") && !given(cmd, "--synth-spec")) c.synth.seed = f.seed;
  return c;
}

int report_error(const std::string& code, const std::string& message, int exit_code) {
  std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << "\n";
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical attribute transfer for zero-shot classification"};
  app.require_subcommand(1);
  Flags flags;

  std::vector<CLI::App*> commands{
      app.add_subcommand("train", "train the attribute classifier bank"),
      app.add_subcommand("predict", "score unseen-class test samples"),
      app.add_subcommand("eval", "evaluate a predictions file"),
      app.add_subcommand("bench", "run all methods on a synthetic benchmark"),
      app.add_subcommand("sweep", "vary the number of seen classes"),
      app.add_subcommand("synth", "write a synthetic benchmark to disk"),
      app.add_subcommand("propagate", "propagate class signatures through the taxonomy"),
  };
  for (auto* cmd : commands) add_common(cmd, flags);
  for (auto* cmd : {commands[3], commands[4], commands[5]}) add_synth(cmd, flags);
  commands[4]->add_option("--sizes", flags.sizes, "source sizes; values below 1 are fractions of the leaves")
      ->delimiter(',');
  commands[4]->add_option("--repeats", flags.repeats)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report_error("UsageError", e.what(), kExitValidation);
  }

  try {
    for (auto* cmd : commands) {
      if (!cmd->parsed()) continue;
      const hat::RunConfig config = resolve(cmd, flags);
      const std::string name = cmd->get_name();
      std::string summary;
      if (name == "train") summary = hat::cmd_train(config);
      if (name == "predict") summary = hat::cmd_predict(config);
      if (name == "eval") summary = hat::cmd_eval(config);
      if (name == "bench") summary = hat::cmd_bench(config);
      if (name == "sweep") summary = hat::cmd_sweep(config);
      if (name == "synth") summary = hat::cmd_synth(config);
      if (name == "propagate") summary = hat::cmd_propagate(config);
      std::cout << summary;
    }
  } catch (const hat::Error& e) {
    return report_error(std::string(hat::to_string(e.code())), e.what(),
                        hat::is_validation_error(e.code()) ? kExitValidation : kExitRuntime);
  } catch (const std::exception& e) {
    return report_error("RuntimeError", e.what(), kExitRuntime);
  }
  return 0;
}
