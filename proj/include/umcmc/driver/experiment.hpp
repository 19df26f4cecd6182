#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "umcmc/diagnostics.hpp"
#include "umcmc/driver/config.hpp"
#include "umcmc/estimators.hpp"
#include "umcmc/poisson.hpp"
#include "umcmc/replicates.hpp"

namespace umcmc::driver {

inline constexpr const char* kSoftwareVersion = "umcmc 0.1.0";

/// Phase identifiers mixed into the master seed; each phase has its own streams.
namespace phase {
inline constexpr std::uint64_t pilot = 1;
inline constexpr std::uint64_t main = 2;
inline constexpr std::uint64_t avar = 3;
inline constexpr std::uint64_t tv = 10;
inline constexpr std::uint64_t w1 = 11;
inline constexpr std::uint64_t sweep = 20;
inline constexpr std::uint64_t meetings = 30;
}  // namespace phase

struct RunContext {
  std::filesystem::path out;
  const std::atomic<bool>* stop = nullptr;
};

/// Exit status of a subcommand: 0 complete, 2 some runs unmet, 3 interrupted.
enum class RunStatus { complete = 0, partial = 2, interrupted = 3 };
std::string to_string(RunStatus status);

/// Estimation parameters after resolving "auto".
struct Plan {
  std::int64_t k = 0;
  std::int64_t lag = 1;
  std::int64_t ell = 0;
  std::optional<TuningAdvice> advice;
};

/// Lag-1 pilot meeting times and the tuning rule applied to them.
struct PilotResult {
  MeetingTimeSample sample;
  TuningAdvice advice;
  bool interrupted = false;
};
PilotResult run_pilot(const ExperimentConfig& config, const std::atomic<bool>* stop = nullptr);

/// Resolves k, L, ell, running the pilot when the config asks for "auto".
Plan resolve_plan(const ExperimentConfig& config, const std::atomic<bool>* stop = nullptr);

/// One replicate of H_{k:ell} for every test function.
struct ReplicateEstimate {
  std::uint64_t replicate = 0;
  bool met = false;
  std::int64_t tau = 0;
  double cost = 0.0;
  std::vector<double> values;  // one per test function; empty when unmet
};

/// C replicates with streams derived from (seed, c); results in index order.
struct EstimateBatch {
  std::vector<ReplicateEstimate> replicates;
  std::vector<ReplicateTiming> timings;
  bool interrupted = false;
  std::size_t unmet() const;
  /// Records for test function j over the met replicates, in index order.
  std::vector<EstimatorRecord> records(std::size_t j, const Plan& plan) const;
};
EstimateBatch run_estimates(const ExperimentConfig& config, const Plan& plan, std::uint64_t seed,
                            std::size_t replicates, const std::atomic<bool>* stop = nullptr);

/// Asymptotic-variance copies, one row per replicate and test function.
struct AvarBatch {
  Plan plan;
  Point y_anchor;
  std::vector<std::vector<AsymptoticVarianceSample>> samples;  // [replicate][h]
  std::vector<ReplicateTiming> timings;
  bool interrupted = false;
  /// Mean of the copies for test function j, in index order.
  AggregateReport report(std::size_t j, double alpha) const;
};
AvarBatch run_avar_batch(const ExperimentConfig& config, const Plan& plan, const std::atomic<bool>* stop = nullptr);

RunStatus run_meetings(const ExperimentConfig& config, const RunContext& context);
RunStatus run_estimate(const ExperimentConfig& config, const RunContext& context);
RunStatus run_bounds(const ExperimentConfig& config, BoundMetric metric, const RunContext& context);
RunStatus run_avar(const ExperimentConfig& config, const RunContext& context);
RunStatus run_inefficiency(const ExperimentConfig& config, const RunContext& context);
RunStatus run_tune(const ExperimentConfig& config, const RunContext& context);

}  // namespace umcmc::driver
