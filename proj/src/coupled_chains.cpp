#include "umcmc/coupled_chains.hpp"

#include <stdexcept>

#include "umcmc/replicates.hpp"

namespace umcmc {

CoupledInitialSampler independent_initial(InitialSampler pi0) {
  if (!pi0) throw std::invalid_argument("independent_initial: empty sampler");
  return [pi0 = std::move(pi0)](Stream& s) {
    Point x0 = pi0(s);
    Point y0 = pi0(s);
    return std::make_pair(std::move(x0), std::move(y0));
  };
}

StoragePolicy state_storage_policy(const StorageRequest& request) {
  if (request.estimators) return StoragePolicy::full;
  if (request.w1_bound) return StoragePolicy::pre_meeting;
  return StoragePolicy::meeting_time_only;
}

CoupledTrajectory run_lagged_coupling(const CoupledInitialSampler& initial, const Kernel& kernel,
                                      const LaggedCouplingOptions& options, Stream& stream) {
  if (options.lag < 1) throw std::invalid_argument("run_lagged_coupling: lag must be >= 1");
  if (options.length < 0) throw std::invalid_argument("run_lagged_coupling: length must be >= 0");
  if (options.max_sweeps < 1) throw std::invalid_argument("run_lagged_coupling: max_sweeps must be >= 1");

  const bool keep = options.storage != StoragePolicy::meeting_time_only;
  const bool keep_after = options.storage == StoragePolicy::full;

  CoupledTrajectory traj;
  traj.lag = options.lag;
  traj.length = options.length;
  traj.storage = options.storage;

  auto [x, y] = initial(stream);
  if (x.size() != kernel.dimension() || y.size() != kernel.dimension()) {
    throw std::invalid_argument("run_lagged_coupling: initial state dimension does not match kernel");
  }
  traj.x = StateTrace(x.size());
  traj.y = StateTrace(y.size());
  if (keep) {
    traj.x.reserve(static_cast<std::size_t>(options.lag + options.length) + 1);
    traj.x.push_back(x);
    traj.y.push_back(y);
  }

  for (std::int64_t t = 1; t <= options.lag; ++t) {
    x = kernel.step(x, stream);
    if (keep) traj.x.push_back(x);
  }

  std::int64_t t = options.lag;
  for (std::int64_t sweep = 0;; ++sweep) {
    if (sweep >= options.max_sweeps) return traj;  // unmet: met = false, tau = kUnmetTau
    CoupledStepResult next = kernel.coupled_step(x, y, stream);
    ++t;
    x = std::move(next.next_x);
    y = std::move(next.next_y);
    if (next.met) break;
    if (keep) {
      traj.x.push_back(x);
      traj.y.push_back(y);
    }
  }
  traj.tau = t;
  traj.met = true;

  if (keep_after) {
    traj.x.push_back(x);
    traj.y.push_back(x);
    while (t < options.length) {
      x = kernel.step(x, stream);
      ++t;
      traj.x.push_back(x);
      traj.y.push_back(x);
    }
  }
  return traj;
}

std::vector<std::int64_t> MeetingTimeSample::coupled_transitions() const {
  std::vector<std::int64_t> out;
  out.reserve(tau.size());
  for (std::int64_t value : tau) out.push_back(value - lag);
  return out;
}

MeetingTimeSample sample_meeting_times(const CoupledInitialSampler& initial, const Kernel& kernel,
                                       const MeetingTimeOptions& options,
                                       std::uint64_t master_seed) {
  if (options.replicates < 1) throw std::invalid_argument("sample_meeting_times: need at least one replicate");
  const LaggedCouplingOptions run{options.lag, 0, options.max_sweeps, StoragePolicy::meeting_time_only};

  auto batch = run_replicates<std::int64_t>(options.replicates, options.workers, [&](std::uint64_t c) {
    Stream stream = derive_stream(master_seed, c);
    return run_lagged_coupling(initial, kernel, run, stream).tau;
  });

  MeetingTimeSample sample;
  sample.lag = options.lag;
  sample.master_seed = master_seed;
  for (std::size_t c = 0; c < batch.results.size(); ++c) {
    const std::int64_t tau = *batch.results[c];
    if (tau == kUnmetTau) {
      sample.unmet_replicates.push_back(c);
    } else {
      sample.tau.push_back(tau);
      sample.replicate_indices.push_back(c);
    }
  }
  return sample;
}

}  // namespace umcmc
