#include "umcmc/driver/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "umcmc/driver/output.hpp"
#include "umcmc/replicates.hpp"

namespace umcmc::driver {

namespace {

struct PhaseRecord {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  std::size_t completed = 0;
  std::size_t unmet = 0;
  std::vector<ReplicateTiming> timings;
};

// Everything needed to reproduce the outputs, plus the completion order that
// shows no replicate was filtered out.
class Manifest {
 public:
  Manifest(const ExperimentConfig& config, std::string subcommand)
      : config_(config), subcommand_(std::move(subcommand)) {}

  void add(PhaseRecord phase) { phases_.push_back(std::move(phase)); }

  RunStatus status() const {
    RunStatus s = RunStatus::complete;
    for (const auto& p : phases_) {
      if (p.completed < p.replicates) return RunStatus::interrupted;
      if (p.unmet > 0) s = RunStatus::partial;
    }
    return s;
  }

  void write(const std::filesystem::path& out) const {
    Json doc;
    doc["software"] = kSoftwareVersion;
    doc["subcommand"] = subcommand_;
    doc["status"] = to_string(status());
    doc["config_hash"] = hex64(config_hash(config_));
    doc["master_seed"] = config_.seed;
    doc["workers"] = config_.workers;
    doc["stream_rule"] = "Philox4x32-10, key = phase seed, counter = (block, replicate index)";
    Json phases = Json::array();
    for (const auto& p : phases_) {
      Json entry;
      entry["name"] = p.name;
      entry["seed"] = p.seed;
      entry["replicates"] = p.replicates;
      entry["completed"] = p.completed;
      entry["unmet"] = p.unmet;
      Json order = Json::array();
      for (const auto& t : p.timings) order.push_back(t.index);
      entry["completion_order"] = std::move(order);
      phases.push_back(std::move(entry));
    }
    doc["phases"] = std::move(phases);
    doc["config"] = config_.source;
    write_atomic(out / "manifest.json", doc.dump(2) + "\n");
  }

  void write_chronology(const std::filesystem::path& out) const {
    CsvTable csv({"phase", "replicate", "worker", "start_seconds", "duration_seconds", "completion_rank"});
    for (const auto& p : phases_) {
      for (const auto& t : p.timings) {
        csv.row().cell(p.name).cell(t.index).cell(t.worker).cell(t.start_seconds).cell(t.duration_seconds)
            .cell(t.completion_rank);
      }
    }
    write_atomic(out / "chronology.csv", csv.text());
  }

 private:
  const ExperimentConfig& config_;
  std::string subcommand_;
  std::vector<PhaseRecord> phases_;
};

Json report_json(const AggregateReport& r) {
  Json j;
  j["mean"] = r.mean;
  j["sd"] = r.sd;
  j["std_error"] = r.std_error;
  j["alpha"] = r.alpha;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["count"] = r.count;
  j["mean_cost"] = r.mean_cost;
  j["inefficiency"] = r.inefficiency;
  return j;
}

Json advice_json(const TuningAdvice& a) {
  Json j;
  j["k"] = a.k;
  j["lag"] = a.lag;
  j["ell"] = a.ell;
  j["quantile_level"] = a.quantile_level;
  j["sample_size"] = a.sample_size;
  return j;
}

Json plan_json(const Plan& plan) {
  Json j;
  j["k"] = plan.k;
  j["lag"] = plan.lag;
  j["ell"] = plan.ell;
  j["tuning"] = plan.advice ? advice_json(*plan.advice) : Json(nullptr);
  return j;
}

Json header_json(const ExperimentConfig& config, const char* subcommand) {
  Json j;
  j["subcommand"] = subcommand;
  j["config_hash"] = hex64(config_hash(config));
  j["master_seed"] = config.seed;
  return j;
}

Json aggregate_or_null(const std::vector<EstimatorRecord>& records, double alpha) {
  if (records.size() < 2) return Json(nullptr);
  return report_json(aggregate(records, alpha));
}

std::string vector_text(const PointRef& x) {
  std::string out;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) out += ' ';
    out += format_double(x[i]);
  }
  return out;
}

struct MeetingOutcome {
  bool done = false;
  bool met = false;
  std::int64_t tau = 0;
};

// Meeting times for one lag, kept in index order (unmet runs included).
struct MeetingBatch {
  std::vector<MeetingOutcome> outcomes;
  std::vector<ReplicateTiming> timings;
  std::size_t completed = 0;

  MeetingTimeSample sample(std::int64_t lag, std::uint64_t seed) const {
    MeetingTimeSample s;
    s.lag = lag;
    s.master_seed = seed;
    for (std::size_t c = 0; c < outcomes.size(); ++c) {
      if (!outcomes[c].done) continue;
      if (outcomes[c].met) {
        s.tau.push_back(outcomes[c].tau);
        s.replicate_indices.push_back(c);
      } else {
        s.unmet_replicates.push_back(c);
      }
    }
    return s;
  }
};

MeetingBatch meeting_batch(const ExperimentConfig& config, std::int64_t lag, std::uint64_t seed,
                           std::size_t replicates, const std::atomic<bool>* stop) {
  const CoupledInitialSampler initial = independent_initial(config.pi0);
  LaggedCouplingOptions options;
  options.lag = lag;
  options.length = 0;
  options.max_sweeps = config.max_sweeps;
  options.storage = StoragePolicy::meeting_time_only;
  auto batch = run_replicates<MeetingOutcome>(
      replicates, config.workers,
      [&](std::uint64_t c) {
        Stream stream = derive_stream(seed, c);
        const CoupledTrajectory t = run_lagged_coupling(initial, *config.kernel, options, stream);
        return MeetingOutcome{true, t.met, t.tau};
      },
      stop);
  MeetingBatch out;
  out.completed = batch.completed();
  out.timings = std::move(batch.timings);
  for (auto& r : batch.results) out.outcomes.push_back(r.value_or(MeetingOutcome{}));
  return out;
}

CsvTable meetings_table() { return CsvTable({"replicate", "lag", "tau", "tau_minus_lag", "met"}); }

void add_meetings(CsvTable& csv, const std::vector<MeetingOutcome>& outcomes, std::int64_t lag) {
  for (std::size_t c = 0; c < outcomes.size(); ++c) {
    if (!outcomes[c].done) continue;
    csv.row().cell(c).cell(lag);
    if (outcomes[c].met) {
      csv.cell(outcomes[c].tau).cell(outcomes[c].tau - lag).cell(true);
    } else {
      csv.empty().empty().cell(false);
    }
  }
}

void write_curve(const std::filesystem::path& path, const BoundCurve& curve) {
  CsvTable csv({"metric", "L", "k", "value", "stderr", "C", "value_clipped"});
  for (std::size_t i = 0; i < curve.k.size(); ++i) {
    csv.row()
        .cell(to_string(curve.metric))
        .cell(curve.lag)
        .cell(curve.k[i])
        .cell(curve.values[i])
        .cell(curve.std_errors[i])
        .cell(curve.replicates)
        .cell(curve.clipped[i]);
  }
  write_atomic(path, csv.text());
}

double sample_variance(const std::vector<double>& values, double& variance_se) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : values) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  const double variance = m2 / (n - 1.0);
  m4 /= n;
  variance_se = std::sqrt(std::max(0.0, m4 - variance * variance) / n);
  return variance;
}

}  // namespace

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::complete: return "complete";
    case RunStatus::partial: return "partial";
    case RunStatus::interrupted: return "interrupted";
  }
  return "complete";
}

PilotResult run_pilot(const ExperimentConfig& config, const std::atomic<bool>* stop) {
  const std::uint64_t seed = phase_seed(config.seed, phase::pilot);
  MeetingBatch batch = meeting_batch(config, 1, seed, config.tune.pilot_replicates, stop);
  PilotResult result;
  result.interrupted = batch.completed < config.tune.pilot_replicates;
  result.sample = batch.sample(1, seed);
  if (result.interrupted) return result;
  if (!result.sample.unmet_replicates.empty()) {
    throw std::runtime_error("pilot: " + std::to_string(result.sample.unmet_replicates.size()) +
                             " runs did not meet within max_sweeps; tuning would be biased");
  }
  result.advice = tune(result.sample, config.tune.quantile_level);
  return result;
}

Plan resolve_plan(const ExperimentConfig& config, const std::atomic<bool>* stop) {
  Plan plan;
  if (!config.auto_tuned()) {
    plan.k = *config.k;
    plan.ell = *config.ell;
    plan.lag = config.lag;
    return plan;
  }
  PilotResult pilot = run_pilot(config, stop);
  if (pilot.interrupted) throw std::runtime_error("interrupted during the pilot phase");
  plan.k = pilot.advice.k;
  plan.lag = pilot.advice.lag;
  plan.ell = pilot.advice.ell;
  plan.advice = pilot.advice;
  return plan;
}

std::size_t EstimateBatch::unmet() const {
  return static_cast<std::size_t>(
      std::count_if(replicates.begin(), replicates.end(), [](const auto& r) { return !r.met; }));
}

std::vector<EstimatorRecord> EstimateBatch::records(std::size_t j, const Plan& plan) const {
  std::vector<EstimatorRecord> out;
  for (const auto& r : replicates) {
    if (!r.met) continue;
    EstimatorRecord rec;
    rec.value = r.values[j];
    rec.cost_units = r.cost;
    rec.replicate_index = r.replicate;
    rec.tau = r.tau;
    rec.k = plan.k;
    rec.ell = plan.ell;
    rec.lag = plan.lag;
    out.push_back(rec);
  }
  return out;
}

EstimateBatch run_estimates(const ExperimentConfig& config, const Plan& plan, std::uint64_t seed,
                            std::size_t replicates, const std::atomic<bool>* stop) {
  const CoupledInitialSampler initial = independent_initial(config.pi0);
  LaggedCouplingOptions options;
  options.lag = plan.lag;
  options.length = plan.ell;
  options.max_sweeps = config.max_sweeps;
  options.storage = StoragePolicy::full;
  auto batch = run_replicates<ReplicateEstimate>(
      replicates, config.workers,
      [&](std::uint64_t c) {
        Stream stream = derive_stream(seed, c);
        const CoupledTrajectory t = run_lagged_coupling(initial, *config.kernel, options, stream);
        ReplicateEstimate r;
        r.replicate = c;
        r.met = t.met;
        r.tau = t.tau;
        if (t.met) {
          for (const auto& h : config.h) {
            const EstimatorRecord rec = h_k_ell(t, h.fn, plan.k, plan.ell);
            r.values.push_back(rec.value);
            r.cost = rec.cost_units;
          }
        }
        return r;
      },
      stop);
  EstimateBatch out;
  out.interrupted = batch.interrupted;
  out.timings = std::move(batch.timings);
  for (auto& r : batch.results) {
    if (r) out.replicates.push_back(std::move(*r));
  }
  return out;
}

AggregateReport AvarBatch::report(std::size_t j, double alpha) const {
  std::vector<double> values;
  for (const auto& row : samples) values.push_back(row[j].value);
  return aggregate_values(values, alpha);
}

AvarBatch run_avar_batch(const ExperimentConfig& config, const Plan& base, const std::atomic<bool>* stop) {
  AvarBatch out;
  out.plan = base;
  if (config.avar.k) out.plan.k = *config.avar.k;
  if (config.avar.lag) out.plan.lag = *config.avar.lag;
  if (config.avar.ell) out.plan.ell = *config.avar.ell;
  if (out.plan.ell < out.plan.k) throw ConfigError("avar: ell must be >= k");
  out.y_anchor = config.avar.y_anchor.value_or(config.pi0_mean);

  AsymptoticVarianceOptions options;
  options.k = out.plan.k;
  options.lag = out.plan.lag;
  options.ell = out.plan.ell;
  options.m_I = config.avar.m_I;
  options.max_sweeps = config.max_sweeps;

  const CoupledInitialSampler initial = independent_initial(config.pi0);
  const std::uint64_t seed = phase_seed(config.seed, phase::avar);
  const std::size_t nh = config.h.size();
  auto batch = run_replicates<std::vector<AsymptoticVarianceSample>>(
      config.avar.replicates, config.workers,
      [&](std::uint64_t c) {
        std::vector<AsymptoticVarianceSample> row;
        for (std::size_t j = 0; j < nh; ++j) {
          // One stream per (replicate, test function) keeps rows independent of
          // how many test functions are configured.
          Stream stream = derive_stream(seed, c * nh + j);
          row.push_back(asymptotic_variance(config.h[j].fn, *config.kernel, initial, out.y_anchor, options, stream));
        }
        return row;
      },
      stop);
  out.interrupted = batch.interrupted;
  out.timings = std::move(batch.timings);
  for (auto& r : batch.results) {
    if (r) out.samples.push_back(std::move(*r));
  }
  return out;
}

RunStatus run_meetings(const ExperimentConfig& config, const RunContext& context) {
  Manifest manifest(config, "meetings");
  const std::uint64_t seed = phase_seed(config.seed, phase::meetings);
  MeetingBatch batch = meeting_batch(config, config.lag, seed, config.replicates, context.stop);
  const MeetingTimeSample sample = batch.sample(config.lag, seed);

  CsvTable csv = meetings_table();
  add_meetings(csv, batch.outcomes, config.lag);
  write_atomic(context.out / "meetings.csv", csv.text());

  Json report = header_json(config, "meetings");
  report["lag"] = config.lag;
  report["replicates"] = config.replicates;
  report["completed"] = batch.completed;
  report["met"] = sample.size();
  report["unmet"] = batch.completed - sample.size();
  if (!sample.tau.empty()) {
    std::vector<double> shifted;
    for (std::int64_t v : sample.coupled_transitions()) shifted.push_back(static_cast<double>(v));
    std::vector<double> sorted = shifted;
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    for (double v : sorted) total += v;
    Json summary;
    summary["mean"] = total / static_cast<double>(sorted.size());
    summary["median"] = empirical_quantile(sorted, 0.5);
    summary["q90"] = empirical_quantile(sorted, 0.9);
    summary["q99"] = empirical_quantile(sorted, 0.99);
    summary["max"] = sorted.back();
    report["tau_minus_lag"] = std::move(summary);
  }
  write_atomic(context.out / "report.json", report.dump(2) + "\n");

  manifest.add({"meetings", seed, config.replicates, batch.completed, batch.completed - sample.size(),
                std::move(batch.timings)});
  manifest.write(context.out);
  std::cout << "meetings: " << sample.size() << " met of " << batch.completed << " (lag " << config.lag << ")\n";
  return manifest.status();
}

RunStatus run_estimate(const ExperimentConfig& config, const RunContext& context) {
  Manifest manifest(config, "estimate");
  std::optional<PilotResult> pilot;
  Plan plan;
  if (config.auto_tuned()) {
    pilot = run_pilot(config, context.stop);
    if (pilot->interrupted) {
      manifest.add({"pilot", pilot->sample.master_seed, config.tune.pilot_replicates, 0, 0, {}});
      manifest.write(context.out);
      return RunStatus::interrupted;
    }
    plan.k = pilot->advice.k;
    plan.lag = pilot->advice.lag;
    plan.ell = pilot->advice.ell;
    plan.advice = pilot->advice;
    manifest.add({"pilot", pilot->sample.master_seed, config.tune.pilot_replicates,
                  config.tune.pilot_replicates, pilot->sample.unmet_replicates.size(), {}});
  } else {
    plan = resolve_plan(config);
  }

  const std::uint64_t seed = phase_seed(config.seed, phase::main);
  EstimateBatch batch = run_estimates(config, plan, seed, config.replicates, context.stop);

  std::vector<std::string> header{"replicate", "met", "tau", "k", "L", "ell", "cost"};
  for (const auto& h : config.h) header.push_back(h.name);
  CsvTable estimates(header);
  CsvTable meetings = meetings_table();
  for (const auto& r : batch.replicates) {
    estimates.row().cell(r.replicate).cell(r.met);
    if (r.met) {
      estimates.cell(r.tau);
    } else {
      estimates.empty();
    }
    estimates.cell(plan.k).cell(plan.lag).cell(plan.ell);
    if (r.met) {
      estimates.cell(r.cost);
      for (double v : r.values) estimates.cell(v);
    } else {
      estimates.empty();
      for (std::size_t j = 0; j < config.h.size(); ++j) estimates.empty();
    }
    meetings.row().cell(r.replicate).cell(plan.lag);
    if (r.met) {
      meetings.cell(r.tau).cell(r.tau - plan.lag).cell(true);
    } else {
      meetings.empty().empty().cell(false);
    }
  }
  write_atomic(context.out / "estimates.csv", estimates.text());
  write_atomic(context.out / "meetings.csv", meetings.text());

  Json report = header_json(config, "estimate");
  report["plan"] = plan_json(plan);
  report["replicates"] = config.replicates;
  report["completed"] = batch.replicates.size();
  report["unmet"] = batch.unmet();
  report["status"] = batch.interrupted ? "interrupted" : (batch.unmet() ? "partial" : "complete");
  Json per_h = Json::array();
  for (std::size_t j = 0; j < config.h.size(); ++j) {
    Json entry;
    entry["h"] = config.h[j].name;
    entry["report"] = aggregate_or_null(batch.records(j, plan), config.alpha);
    per_h.push_back(std::move(entry));
  }
  report["estimates"] = std::move(per_h);
  write_atomic(context.out / "report.json", report.dump(2) + "\n");

  manifest.add({"main", seed, config.replicates, batch.replicates.size(), batch.unmet(), std::move(batch.timings)});
  manifest.write(context.out);
  manifest.write_chronology(context.out);

  std::cout << "estimate: k=" << plan.k << " L=" << plan.lag << " ell=" << plan.ell << ", "
            << batch.replicates.size() - batch.unmet() << " met of " << batch.replicates.size() << "\n";
  for (const auto& entry : report["estimates"]) {
    if (entry["report"].is_null()) continue;
    std::cout << "  " << entry["h"].get<std::string>() << ": " << format_double(entry["report"]["mean"].get<double>())
              << " +/- " << format_double(entry["report"]["std_error"].get<double>()) << "\n";
  }
  return manifest.status();
}

namespace {

// Curves at the k maximising the smallest-lag curve; reported, never enforced.
Json lag_effect(std::vector<BoundCurve> curves) {
  std::sort(curves.begin(), curves.end(), [](const BoundCurve& a, const BoundCurve& b) { return a.lag < b.lag; });
  const BoundCurve& ref = curves.front();
  const auto peak = static_cast<std::size_t>(std::max_element(ref.values.begin(), ref.values.end()) - ref.values.begin());
  const std::int64_t k = ref.k[peak];
  Json out;
  out["reference_lag"] = ref.lag;
  out["k"] = k;
  out["reference_value"] = ref.values[peak];
  Json rows = Json::array();
  for (std::size_t i = 1; i < curves.size(); ++i) {
    const BoundCurve& c = curves[i];
    const auto it = std::find(c.k.begin(), c.k.end(), k);
    const std::size_t j = static_cast<std::size_t>(it - c.k.begin());
    const double value = it == c.k.end() ? 0.0 : c.values[j];
    const double se = it == c.k.end() ? 0.0 : c.std_errors[j];
    Json row;
    row["lag"] = c.lag;
    row["value"] = value;
    row["not_larger_within_3se"] = value <= ref.values[peak] + 3.0 * std::hypot(se, ref.std_errors[peak]);
    rows.push_back(std::move(row));
  }
  out["comparisons"] = std::move(rows);
  return out;
}

}  // namespace

RunStatus run_bounds(const ExperimentConfig& config, BoundMetric metric, const RunContext& context) {
  const bool tv = metric == BoundMetric::tv;
  Manifest manifest(config, tv ? "tv-bounds" : "w1-bounds");
  const std::uint64_t base = phase_seed(config.seed, tv ? phase::tv : phase::w1);
  const CoupledInitialSampler initial = independent_initial(config.pi0);

  Json report = header_json(config, tv ? "tv-bounds" : "w1-bounds");
  Json curves = Json::array();
  std::vector<BoundCurve> finished;
  bool interrupted = false;
  for (std::int64_t lag : config.bounds.lags) {
    if (interrupted) break;
    const std::uint64_t seed = phase_seed(base, static_cast<std::uint64_t>(lag));
    const std::string stem = std::string(tv ? "tv" : "w1") + "_L" + std::to_string(lag);
    BoundCurve curve;
    std::size_t completed = 0;
    std::size_t unmet = 0;
    std::vector<ReplicateTiming> timings;

    if (tv) {
      MeetingBatch batch = meeting_batch(config, lag, seed, config.replicates, context.stop);
      completed = batch.completed;
      interrupted = completed < config.replicates;
      const MeetingTimeSample sample = batch.sample(lag, seed);
      unmet = batch.completed - sample.size();
      CsvTable csv = meetings_table();
      add_meetings(csv, batch.outcomes, lag);
      write_atomic(context.out / (stem + "_meetings.csv"), csv.text());
      timings = std::move(batch.timings);
      if (!sample.tau.empty() && !interrupted) curve = tv_bound_curve(sample, config.bounds.k_max);
    } else {
      LaggedCouplingOptions options;
      options.lag = lag;
      options.max_sweeps = config.max_sweeps;
      options.storage = StoragePolicy::pre_meeting;
      const Norm norm = config.bounds.norm;
      auto batch = run_replicates<std::optional<std::vector<double>>>(
          config.replicates, config.workers,
          [&](std::uint64_t c) -> std::optional<std::vector<double>> {
            Stream stream = derive_stream(seed, c);
            const CoupledTrajectory t = run_lagged_coupling(initial, *config.kernel, options, stream);
            if (!t.met) return std::nullopt;
            return w1_summands(t, norm);
          },
          context.stop);
      completed = batch.completed();
      interrupted = batch.interrupted;
      timings = std::move(batch.timings);
      std::vector<std::vector<double>> summands;
      std::size_t longest = 0;
      for (auto& r : batch.results) {
        if (!r) continue;
        if (!*r) {
          ++unmet;
          continue;
        }
        longest = std::max(longest, (*r)->size());
        summands.push_back(std::move(**r));
      }
      if (!summands.empty() && !interrupted) {
        const std::int64_t last = config.bounds.k_max.value_or(static_cast<std::int64_t>(longest));
        std::vector<std::int64_t> grid;
        for (std::int64_t k = 0; k <= last; ++k) grid.push_back(k);
        curve = w1_curve_from_summands(lag, summands, grid);
      }
    }

    Json entry;
    entry["lag"] = lag;
    entry["file"] = stem + ".csv";
    entry["replicates"] = config.replicates;
    entry["completed"] = completed;
    entry["unmet"] = unmet;
    if (!curve.k.empty()) {
      write_curve(context.out / (stem + ".csv"), curve);
      entry["value_at_0"] = curve.values.front();
      entry["last_k"] = curve.k.back();
      finished.push_back(curve);
    }
    curves.push_back(std::move(entry));
    manifest.add({stem, seed, config.replicates, completed, unmet, std::move(timings)});
    std::cout << stem << ": " << completed - unmet << " met of " << completed << "\n";
  }
  if (!tv) report["norm"] = to_string(config.bounds.norm);
  report["curves"] = std::move(curves);
  if (tv && finished.size() > 1) report["lag_effect"] = lag_effect(finished);
  write_atomic(context.out / "report.json", report.dump(2) + "\n");
  manifest.write(context.out);
  return manifest.status();
}

RunStatus run_avar(const ExperimentConfig& config, const RunContext& context) {
  Manifest manifest(config, "avar");
  const Plan plan = resolve_plan(config, context.stop);
  AvarBatch batch = run_avar_batch(config, plan, context.stop);

  CsvTable csv({"replicate", "h", "value", "term_a", "term_b", "tau_first", "tau_second"});
  for (std::size_t c = 0; c < batch.samples.size(); ++c) {
    for (std::size_t j = 0; j < config.h.size(); ++j) {
      const auto& s = batch.samples[c][j];
      csv.row().cell(c).cell(config.h[j].name).cell(s.value).cell(s.term_a).cell(s.term_b).cell(s.tau_first)
          .cell(s.tau_second);
    }
  }
  write_atomic(context.out / "avar.csv", csv.text());

  Json report = header_json(config, "avar");
  report["plan"] = plan_json(batch.plan);
  report["y_anchor"] = vector_text(batch.y_anchor);
  report["m_I"] = config.avar.m_I;
  report["replicates"] = config.avar.replicates;
  report["completed"] = batch.samples.size();
  Json per_h = Json::array();
  for (std::size_t j = 0; j < config.h.size(); ++j) {
    Json entry;
    entry["h"] = config.h[j].name;
    entry["report"] = batch.samples.size() >= 2 ? report_json(batch.report(j, config.alpha)) : Json(nullptr);
    per_h.push_back(std::move(entry));
  }
  report["estimates"] = std::move(per_h);
  write_atomic(context.out / "report.json", report.dump(2) + "\n");

  manifest.add({"avar", phase_seed(config.seed, phase::avar), config.avar.replicates, batch.samples.size(), 0,
                std::move(batch.timings)});
  manifest.write(context.out);
  for (const auto& entry : report["estimates"]) {
    if (entry["report"].is_null()) continue;
    std::cout << "avar " << entry["h"].get<std::string>() << ": "
              << format_double(entry["report"]["mean"].get<double>()) << " +/- "
              << format_double(entry["report"]["std_error"].get<double>()) << "\n";
  }
  return manifest.status();
}

RunStatus run_inefficiency(const ExperimentConfig& config, const RunContext& context) {
  Manifest manifest(config, "inefficiency");
  const Plan plan = resolve_plan(config, context.stop);
  AvarBatch avar = run_avar_batch(config, plan, context.stop);
  manifest.add({"avar", phase_seed(config.seed, phase::avar), config.avar.replicates, avar.samples.size(), 0,
                avar.timings});
  if (avar.interrupted || avar.samples.size() < 2) {
    manifest.write(context.out);
    return RunStatus::interrupted;
  }
  std::vector<double> v_hat;
  std::vector<double> v_hat_se;
  for (std::size_t j = 0; j < config.h.size(); ++j) {
    const AggregateReport r = avar.report(j, config.alpha);
    v_hat.push_back(r.mean);
    v_hat_se.push_back(r.std_error);
  }

  std::vector<std::int64_t> k_values = config.sweep.k_values;
  if (k_values.empty()) {
    for (double f : {0.25, 0.5, 1.0, 2.0}) {
      k_values.push_back(std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(f * plan.k))));
    }
  }

  CsvTable csv({"h", "k", "L", "ell", "C", "unmet", "mean_cost", "variance", "variance_stderr", "inefficiency",
                "avar", "avar_stderr", "ratio", "ratio_stderr"});
  const std::uint64_t base = phase_seed(config.seed, phase::sweep);
  bool interrupted = false;
  std::uint64_t cell = 0;
  for (std::int64_t k : k_values) {
    for (const auto& policy : config.sweep.lag_policies) {
      Plan p;
      p.k = k;
      p.lag = policy == "k" ? k : 1;
      p.ell = 10 * k;
      const std::uint64_t seed = phase_seed(base, cell++);
      EstimateBatch batch = run_estimates(config, p, seed, config.replicates, context.stop);
      manifest.add({"sweep_k" + std::to_string(k) + "_L" + std::to_string(p.lag), seed, config.replicates,
                    batch.replicates.size(), batch.unmet(), std::move(batch.timings)});
      if (batch.interrupted) {
        interrupted = true;
        break;
      }
      for (std::size_t j = 0; j < config.h.size(); ++j) {
        const std::vector<EstimatorRecord> records = batch.records(j, p);
        if (records.size() < 2) continue;
        std::vector<double> values;
        double cost = 0.0;
        for (const auto& r : records) {
          values.push_back(r.value);
          cost += r.cost_units;
        }
        cost /= static_cast<double>(records.size());
        double variance_se = 0.0;
        const double variance = sample_variance(values, variance_se);
        const double inefficiency = cost * variance;
        const double ratio = inefficiency / v_hat[j];
        const double ratio_se = std::abs(ratio) * std::sqrt(std::pow(variance_se / variance, 2) +
                                                            std::pow(v_hat_se[j] / v_hat[j], 2));
        csv.row().cell(config.h[j].name).cell(k).cell(p.lag).cell(p.ell).cell(records.size()).cell(batch.unmet())
            .cell(cost).cell(variance).cell(variance_se).cell(inefficiency).cell(v_hat[j]).cell(v_hat_se[j])
            .cell(ratio).cell(ratio_se);
        std::cout << "inefficiency " << config.h[j].name << " k=" << k << " L=" << p.lag
                  << ": ratio " << format_double(ratio) << "\n";
      }
    }
    if (interrupted) break;
  }
  write_atomic(context.out / "inefficiency.csv", csv.text());

  Json report = header_json(config, "inefficiency");
  report["plan"] = plan_json(plan);
  Json avar_json = Json::array();
  for (std::size_t j = 0; j < config.h.size(); ++j) {
    Json e;
    e["h"] = config.h[j].name;
    e["avar"] = v_hat[j];
    e["avar_stderr"] = v_hat_se[j];
    avar_json.push_back(std::move(e));
  }
  report["avar"] = std::move(avar_json);
  report["k_values"] = k_values;
  write_atomic(context.out / "report.json", report.dump(2) + "\n");
  manifest.write(context.out);
  manifest.write_chronology(context.out);
  return manifest.status();
}

RunStatus run_tune(const ExperimentConfig& config, const RunContext& context) {
  Manifest manifest(config, "tune");
  const std::uint64_t seed = phase_seed(config.seed, phase::pilot);
  MeetingBatch batch = meeting_batch(config, 1, seed, config.tune.pilot_replicates, context.stop);
  const MeetingTimeSample sample = batch.sample(1, seed);
  CsvTable csv = meetings_table();
  add_meetings(csv, batch.outcomes, 1);
  write_atomic(context.out / "meetings.csv", csv.text());
  manifest.add({"pilot", seed, config.tune.pilot_replicates, batch.completed, batch.completed - sample.size(),
                std::move(batch.timings)});

  Json doc = header_json(config, "tune");
  const bool usable = batch.completed == config.tune.pilot_replicates && sample.unmet_replicates.empty();
  if (usable) {
    const TuningAdvice advice = tune(sample, config.tune.quantile_level);
    doc["advice"] = advice_json(advice);
    std::cout << "tune: k=" << advice.k << " L=" << advice.lag << " ell=" << advice.ell << "\n";
  } else {
    doc["advice"] = nullptr;
    doc["unmet"] = sample.unmet_replicates.size();
    std::cout << "tune: pilot incomplete, no advice\n";
  }
  write_atomic(context.out / "tune.json", doc.dump(2) + "\n");
  manifest.write(context.out);
  return manifest.status();
}

}  // namespace umcmc::driver
