#include <atomic>
#include <csignal>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "umcmc/driver/config.hpp"
#include "umcmc/driver/experiment.hpp"

namespace {

std::atomic<bool> stop_requested{false};

extern "C" void on_signal(int) { stop_requested.store(true); }

}  // namespace

int main(int argc, char** argv) {
  using namespace umcmc::driver;

  CLI::App app{"Unbiased MCMC with lagged coupled chains"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string out = "out";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--workers", workers, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory");
  };

  auto* meetings = app.add_subcommand("meetings", "sample meeting times");
  auto* estimate = app.add_subcommand("estimate", "unbiased estimates of pi(h)");
  auto* tv = app.add_subcommand("tv-bounds", "total variation bound curves");
  auto* w1 = app.add_subcommand("w1-bounds", "1-Wasserstein bound curves");
  auto* avar = app.add_subcommand("avar", "asymptotic variance estimates");
  auto* inefficiency = app.add_subcommand("inefficiency", "inefficiency sweep over k");
  auto* tune = app.add_subcommand("tune", "choose k, L and ell from pilot meeting times");
  for (auto* sub : {meetings, estimate, tv, w1, avar, inefficiency, tune}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  try {
    const ExperimentConfig config = load_config(config_path, Overrides{seed, workers});
    const RunContext context{out, &stop_requested};
    RunStatus status = RunStatus::complete;
    if (*meetings) status = run_meetings(config, context);
    if (*estimate) status = run_estimate(config, context);
    if (*tv) status = run_bounds(config, umcmc::BoundMetric::tv, context);
    if (*w1) status = run_bounds(config, umcmc::BoundMetric::w1, context);
    if (*avar) status = run_avar(config, context);
    if (*inefficiency) status = run_inefficiency(config, context);
    if (*tune) status = run_tune(config, context);
    if (status != RunStatus::complete) std::cerr << "status: " << to_string(status) << "\n";
    return static_cast<int>(status);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
