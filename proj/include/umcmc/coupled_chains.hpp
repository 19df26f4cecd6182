#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "umcmc/kernels.hpp"
#include "umcmc/rng.hpp"
#include "umcmc/types.hpp"

namespace umcmc {

/// Initial distribution pi_0 of a single chain.
using InitialSampler = std::function<Point(Stream&)>;

/// Coupling of pi_0 with itself, producing (X_0, Y_0).
using CoupledInitialSampler = std::function<std::pair<Point, Point>(Stream&)>;

/// X_0 and Y_0 drawn independently from pi_0.
CoupledInitialSampler independent_initial(InitialSampler pi0);

/// Which states a run keeps.
enum class StoragePolicy {
  meeting_time_only,  // no states: memory independent of tau
  pre_meeting,        // X_0..X_{tau-1}, Y_0..Y_{tau-1-L}: what the W1 bound needs
  full,               // X_0..X_{max(ell, tau)}, Y_0..Y_{max(ell, tau)-L}: estimators
};

/// Downstream uses a caller declares before running chains.
struct StorageRequest {
  bool estimators = false;
  bool tv_bound = false;
  bool w1_bound = false;
};

/// Smallest storage policy that honours every declared use.
StoragePolicy state_storage_policy(const StorageRequest& request);

inline constexpr std::int64_t kUnmetTau = std::numeric_limits<std::int64_t>::max();

/// A realised lag-L pair of chains (X_t, Y_{t-L}).
///
/// tau is on the X clock: the first t >= L + 1 at which the coupled transition
/// reports a meeting, so X_t = Y_{t-L} for every t >= tau. Runs that hit the
/// sweep cap have met = false and tau = kUnmetTau; their partial states are kept.
struct CoupledTrajectory {
  std::int64_t lag = 1;
  std::int64_t length = 0;
  std::int64_t tau = kUnmetTau;
  bool met = false;
  StoragePolicy storage = StoragePolicy::full;
  StateTrace x;
  StateTrace y;

  /// Number of coupled transitions before the meeting, tau - L.
  std::int64_t coupled_transitions() const { return met ? tau - lag : kUnmetTau; }
  /// Largest X index available (x.size() - 1).
  std::int64_t last_x_index() const { return static_cast<std::int64_t>(x.size()) - 1; }
};

struct LaggedCouplingOptions {
  std::int64_t lag = 1;
  std::int64_t length = 0;
  /// Cap on coupled transitions before giving up on a meeting.
  std::int64_t max_sweeps = 1'000'000;
  StoragePolicy storage = StoragePolicy::full;
};

/// Runs a lag-L coupled pair: X alone for L steps, then coupled transitions
/// until the chains meet and X has reached time `length`. After the meeting
/// only X is propagated and Y_{t-L} is set to X_t.
CoupledTrajectory run_lagged_coupling(const CoupledInitialSampler& initial, const Kernel& kernel,
                                      const LaggedCouplingOptions& options, Stream& stream);

/// Independent meeting times for a fixed lag.
struct MeetingTimeSample {
  std::int64_t lag = 1;
  std::vector<std::int64_t> tau;                 // met runs only, replicate order
  std::vector<std::uint64_t> replicate_indices;  // stream index of each entry of tau
  std::vector<std::uint64_t> unmet_replicates;   // runs that hit the sweep cap
  std::uint64_t master_seed = 0;

  std::size_t size() const { return tau.size(); }
  /// tau - L for every met run.
  std::vector<std::int64_t> coupled_transitions() const;
};

struct MeetingTimeOptions {
  std::int64_t lag = 1;
  std::size_t replicates = 1;
  std::int64_t max_sweeps = 1'000'000;
  std::size_t workers = 1;
};

/// C independent runs with ell = 0 and no stored states. Replicate c uses the
/// stream derived from (master_seed, c); results are identical for any
/// number of workers.
MeetingTimeSample sample_meeting_times(const CoupledInitialSampler& initial, const Kernel& kernel,
                                       const MeetingTimeOptions& options,
                                       std::uint64_t master_seed);

}  // namespace umcmc
