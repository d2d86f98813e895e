// Command-line front end: one subcommand per experiment kind.

#include "wdru/config.hpp"
#include "wdru/errors.hpp"
#include "wdru/experiment.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Overrides {
  std::string config_path;
  std::optional<double> eps;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_labeled;
  std::optional<std::string> strategy;
  std::optional<std::string> output;
};

constexpr int kUsageError = 1;
constexpr int kInfeasible = 2;
constexpr int kNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributionally robust learning with unlabeled data"};
  app.require_subcommand(1);
  Overrides ov;

  const std::pair<const char*, const char*> commands[] = {
      {"train-dru", "Train with the unlabeled-data decision set and report its guarantee"},
      {"train-baseline", "Train over a plain Wasserstein ball"},
      {"bound", "Guarantee and confidence versus labeled-set size (bound-vs-nl or conf-vs-nl)"},
      {"min-radius", "Smallest radius with a nonempty decision set"},
      {"wasserstein", "Transport distance from the labeled sample to the full data"},
      {"radius-sweep", "Test likelihood and confidence versus excess radius"},
      {"robustness-sweep", "Baseline worst-case likelihood on enlarged balls"},
      {"active", "Active-learning curves and AULC"},
      {"oracle-check", "Primal LP versus dual solver on random small instances"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", ov.config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option_function<double>("--eps", [&](double v) { ov.eps = v; }, "Fixed radius (sets eps_policy = fixed)");
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { ov.seed = v; }, "Base seed");
    sub->add_option_function<std::size_t>("--n-labeled", [&](std::size_t v) { ov.n_labeled = v; },
                                           "Labeled sample size");
    sub->add_option_function<std::string>("--strategy", [&](const std::string& v) { ov.strategy = v; },
                                           "Active-learning strategy");
    sub->add_option_function<std::string>("--output", [&](const std::string& v) { ov.output = v; },
                                           "Result CSV path");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  wdru::ExperimentConfig config;
  try {
    config = wdru::load_config(ov.config_path);
    if (command == "bound") {
      if (config.kind != wdru::ExperimentKind::kConfVsNl) config.kind = wdru::ExperimentKind::kBoundVsNl;
    } else {
      config.kind = wdru::parse_kind(command);
    }
    if (ov.eps) {
      config.radius.policy = wdru::RadiusPolicy::kFixed;
      config.radius.eps = *ov.eps;
    }
    if (ov.seed) config.seed = *ov.seed;
    if (ov.n_labeled) {
      config.n_labeled = *ov.n_labeled;
      config.n_labeled_grid.clear();
    }
    if (ov.strategy) wdru::set_config_value(config, "strategies", *ov.strategy);
    if (ov.output) config.output = *ov.output;
    wdru::validate(config);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    const wdru::ExperimentReport report = wdru::run_experiment(config);
    for (const auto& t : report.trials) {
      if (t.status != "ok") std::cerr << "trial " << t.trial << " (seed " << t.seed << "): " << t.status << ": " << t.message << '\n';
    }
    for (const auto& path : report.outputs) std::cout << path << '\n';
    return report.exit_code();
  } catch (const wdru::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const wdru::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
}
