#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "umcmc/coupled_chains.hpp"
#include "umcmc/diagnostics.hpp"
#include "umcmc/kernels.hpp"
#include "umcmc/targets.hpp"
#include "umcmc/test_functions.hpp"

namespace umcmc::driver {

using Json = nlohmann::ordered_json;

/// Thrown for any invalid configuration, before computation starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TuneSettings {
  double quantile_level = 0.99;
  std::size_t pilot_replicates = 1000;
};

struct BoundSettings {
  std::vector<std::int64_t> lags{1};
  std::optional<std::int64_t> k_max;
  Norm norm = Norm::euclidean;
};

struct AvarSettings {
  std::size_t replicates = 1000;
  std::size_t m_I = 1;
  std::optional<Point> y_anchor;  // defaults to the pi0 mean
  std::optional<std::int64_t> k;    // unset: use the tuned or configured k
  std::optional<std::int64_t> lag;
  std::optional<std::int64_t> ell;
};

struct SweepSettings {
  std::vector<std::int64_t> k_values;
  std::vector<std::string> lag_policies{"1", "k"};
};

/// A validated experiment description.
struct ExperimentConfig {
  Json source;  // effective configuration, after command-line overrides

  std::shared_ptr<const TargetDistribution> target;
  KernelPtr kernel;
  InitialSampler pi0;
  Point pi0_mean;

  std::int64_t lag = 1;
  std::optional<std::int64_t> k;    // unset: "auto"
  std::optional<std::int64_t> ell;  // unset: "auto"
  std::size_t replicates = 100;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  std::vector<NamedFunction> h;
  std::int64_t max_sweeps = 1'000'000;
  double alpha = 0.05;

  TuneSettings tune;
  BoundSettings bounds;
  AvarSettings avar;
  SweepSettings sweep;

  bool auto_tuned() const { return !k.has_value() || !ell.has_value(); }
};

/// Command-line values that take precedence over the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
};

ExperimentConfig parse_config(const Json& document, const Overrides& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

/// FNV-1a 64 of the canonical serialisation of the effective configuration,
/// excluding the worker count (which never affects results).
std::uint64_t config_hash(const ExperimentConfig& config);

std::shared_ptr<const TargetDistribution> build_target(const Json& spec);
KernelPtr build_kernel(const Json& spec, const std::shared_ptr<const TargetDistribution>& target);
/// Returns the sampler and the mean of pi0.
std::pair<InitialSampler, Point> build_initial(const Json& spec, Eigen::Index dimension,
                                               const std::shared_ptr<const TargetDistribution>& target);

}  // namespace umcmc::driver
