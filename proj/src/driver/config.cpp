#include "umcmc/driver/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "umcmc/driver/output.hpp"

namespace umcmc::driver {

namespace {

const Json& require(const Json& spec, const char* key, const std::string& where) {
  if (!spec.is_object() || !spec.contains(key)) {
    throw ConfigError(where + ": missing '" + key + "'");
  }
  return spec.at(key);
}

double number(const Json& value, const std::string& where) {
  if (!value.is_number()) throw ConfigError(where + ": expected a number");
  return value.get<double>();
}

std::int64_t integer(const Json& value, const std::string& where) {
  if (!value.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return value.get<std::int64_t>();
}

std::int64_t positive_integer(const Json& value, const std::string& where) {
  const std::int64_t v = integer(value, where);
  if (v < 1) throw ConfigError(where + ": must be >= 1");
  return v;
}

std::vector<double> numbers(const Json& value, const std::string& where) {
  if (value.is_number()) return {value.get<double>()};
  if (!value.is_array() || value.empty()) throw ConfigError(where + ": expected a number or a nonempty array");
  std::vector<double> out;
  for (const auto& v : value) out.push_back(number(v, where));
  return out;
}

Point to_point(const std::vector<double>& v) {
  return Eigen::Map<const Point>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string name_of(const Json& spec, const std::string& where) {
  const Json& n = require(spec, "name", where);
  if (!n.is_string()) throw ConfigError(where + ": 'name' must be a string");
  return n.get<std::string>();
}

void reject_unknown(const Json& spec, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : spec.items()) {
    if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

std::optional<std::int64_t> auto_or_integer(const Json& doc, const char* key) {
  if (!doc.contains(key)) return std::nullopt;
  const Json& v = doc.at(key);
  if (v.is_string() && v.get<std::string>() == "auto") return std::nullopt;
  const std::int64_t out = integer(v, key);
  if (out < 0) throw ConfigError(std::string(key) + ": must be nonnegative");
  return out;
}

}  // namespace

std::shared_ptr<const TargetDistribution> build_target(const Json& spec) {
  const std::string name = name_of(spec, "target");
  try {
    if (name == "std_normal") {
      reject_unknown(spec, {"name", "dim"}, "target");
      const std::int64_t dim = spec.contains("dim") ? positive_integer(spec.at("dim"), "target.dim") : 1;
      return std::make_shared<const TargetDistribution>(make_std_normal(dim));
    }
    if (name == "mixture") {
      reject_unknown(spec, {"name", "weights", "means", "sds"}, "target");
      return std::make_shared<const TargetDistribution>(
          make_normal_mixture(numbers(require(spec, "weights", "target"), "target.weights"),
                              numbers(require(spec, "means", "target"), "target.means"),
                              numbers(require(spec, "sds", "target"), "target.sds")));
    }
    if (name == "normal") {
      reject_unknown(spec, {"name", "mean", "sd"}, "target");
      return std::make_shared<const TargetDistribution>(
          make_normal_mixture({1.0}, {number(require(spec, "mean", "target"), "target.mean")},
                              {number(require(spec, "sd", "target"), "target.sd")}));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("target: ") + e.what());
  }
  throw ConfigError("target: unknown name '" + name + "'");
}

KernelPtr build_kernel(const Json& spec, const std::shared_ptr<const TargetDistribution>& target) {
  const std::string name = name_of(spec, "kernel");
  auto need_target = [&]() {
    if (!target) throw ConfigError("kernel '" + name + "' needs a target");
    return target;
  };
  try {
    if (name == "mrth") {
      reject_unknown(spec, {"name", "sigma", "coupling", "eta"}, "kernel");
      const std::vector<double> sigma = numbers(require(spec, "sigma", "kernel"), "kernel.sigma");
      ProposalCoupling coupling = ProposalCoupling::reflection_maximal;
      if (spec.contains("coupling")) coupling = parse_proposal_coupling(spec.at("coupling").get<std::string>());
      EtaCouplingOptions eta;
      if (spec.contains("eta")) eta.eta = number(spec.at("eta"), "kernel.eta");
      if (!(eta.eta > 0.0 && eta.eta <= 1.0)) throw ConfigError("kernel.eta: must lie in (0, 1]");
      return std::make_shared<const MrthKernel>(need_target(), to_point(sigma), coupling, eta);
    }
    if (name == "independence") {
      reject_unknown(spec, {"name"}, "kernel");
      return std::make_shared<const IndependenceKernel>(need_target());
    }
    if (name == "ar1") {
      reject_unknown(spec, {"name", "rho"}, "kernel");
      return std::make_shared<const Ar1Kernel>(number(require(spec, "rho", "kernel"), "kernel.rho"));
    }
    if (name == "finite_state") {
      reject_unknown(spec, {"name", "matrix"}, "kernel");
      const Json& rows = require(spec, "matrix", "kernel");
      if (!rows.is_array() || rows.empty()) throw ConfigError("kernel.matrix: expected an array of rows");
      const auto n = static_cast<Eigen::Index>(rows.size());
      Eigen::MatrixXd p(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const std::vector<double> row = numbers(rows[static_cast<std::size_t>(i)], "kernel.matrix");
        if (static_cast<Eigen::Index>(row.size()) != n) throw ConfigError("kernel.matrix: must be square");
        for (Eigen::Index j = 0; j < n; ++j) p(i, j) = row[static_cast<std::size_t>(j)];
      }
      return std::make_shared<const FiniteStateKernel>(p);
    }
    if (name == "mixture") {
      reject_unknown(spec, {"name", "components"}, "kernel");
      const Json& list = require(spec, "components", "kernel");
      if (!list.is_array() || list.empty()) throw ConfigError("kernel.components: expected a nonempty array");
      std::vector<MixtureKernel::Component> components;
      for (const auto& c : list) {
        components.push_back({number(require(c, "weight", "kernel.components"), "kernel.components.weight"),
                              build_kernel(require(c, "kernel", "kernel.components"), target)});
      }
      return std::make_shared<const MixtureKernel>(std::move(components));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }
  throw ConfigError("kernel: unknown name '" + name + "'");
}

std::pair<InitialSampler, Point> build_initial(const Json& spec, Eigen::Index dimension,
                                               const std::shared_ptr<const TargetDistribution>& target) {
  const std::string name = name_of(spec, "pi0");
  auto expand = [dimension](const std::vector<double>& v, const std::string& where) {
    if (v.size() == 1) return Point(Point::Constant(dimension, v.front()));
    if (static_cast<Eigen::Index>(v.size()) != dimension) throw ConfigError(where + ": dimension mismatch");
    return to_point(v);
  };
  if (name == "normal") {
    reject_unknown(spec, {"name", "mean", "sd"}, "pi0");
    const Point mean = expand(numbers(require(spec, "mean", "pi0"), "pi0.mean"), "pi0.mean");
    const double sd = number(require(spec, "sd", "pi0"), "pi0.sd");
    if (!(sd > 0.0)) throw ConfigError("pi0.sd: must be positive");
    InitialSampler sampler = [mean, sd](Stream& s) {
      Point x(mean.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = mean[i] + sd * s.standard_normal();
      return x;
    };
    return {std::move(sampler), mean};
  }
  if (name == "point") {
    reject_unknown(spec, {"name", "x"}, "pi0");
    const Point x = expand(numbers(require(spec, "x", "pi0"), "pi0.x"), "pi0.x");
    return {[x](Stream&) { return x; }, x};
  }
  if (name == "target") {
    reject_unknown(spec, {"name"}, "pi0");
    if (!target || !target->has_direct_sampler() || !target->oracle()) {
      throw ConfigError("pi0 'target' needs a target with a direct sampler");
    }
    return {[target](Stream& s) { return target->sample(s); }, target->oracle()->mean};
  }
  throw ConfigError("pi0: unknown name '" + name + "'");
}

ExperimentConfig parse_config(const Json& document, const Overrides& overrides) {
  if (!document.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown(document,
                 {"target", "kernel", "pi0", "lag", "k", "ell", "replicates", "workers", "seed", "h",
                  "max_sweeps", "alpha", "tune", "bounds", "avar", "inefficiency"},
                 "config");

  ExperimentConfig config;
  config.source = document;
  if (overrides.seed) config.source["seed"] = *overrides.seed;
  if (overrides.workers) config.source["workers"] = *overrides.workers;
  const Json& doc = config.source;

  if (doc.contains("target")) config.target = build_target(doc.at("target"));
  config.kernel = build_kernel(require(doc, "kernel", "config"), config.target);
  std::tie(config.pi0, config.pi0_mean) =
      build_initial(require(doc, "pi0", "config"), config.kernel->dimension(), config.target);

  if (doc.contains("lag")) config.lag = positive_integer(doc.at("lag"), "lag");
  config.k = auto_or_integer(doc, "k");
  config.ell = auto_or_integer(doc, "ell");
  if (config.k.has_value() != config.ell.has_value()) {
    throw ConfigError("k and ell must both be integers or both be \"auto\"");
  }
  if (config.k && *config.ell < *config.k) throw ConfigError("ell must be >= k");
  if (doc.contains("replicates")) {
    config.replicates = static_cast<std::size_t>(positive_integer(doc.at("replicates"), "replicates"));
  }
  if (doc.contains("workers")) {
    config.workers = static_cast<std::size_t>(positive_integer(doc.at("workers"), "workers"));
  }
  if (doc.contains("seed")) {
    const Json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw ConfigError("seed: expected a nonnegative integer");
    }
    config.seed = s.get<std::uint64_t>();
  }
  std::vector<std::string> names{"x0"};
  if (doc.contains("h")) {
    const Json& list = doc.at("h");
    if (!list.is_array() || list.empty()) throw ConfigError("h: expected a nonempty array of names");
    names.clear();
    for (const auto& n : list) {
      if (!n.is_string()) throw ConfigError("h: expected strings");
      names.push_back(n.get<std::string>());
    }
  }
  try {
    config.h = parse_test_functions(names);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("h: ") + e.what());
  }
  if (doc.contains("max_sweeps")) config.max_sweeps = positive_integer(doc.at("max_sweeps"), "max_sweeps");
  if (doc.contains("alpha")) {
    config.alpha = number(doc.at("alpha"), "alpha");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw ConfigError("alpha: must lie in (0, 1)");
  }

  if (doc.contains("tune")) {
    const Json& t = doc.at("tune");
    reject_unknown(t, {"quantile_level", "pilot_replicates"}, "tune");
    if (t.contains("quantile_level")) config.tune.quantile_level = number(t.at("quantile_level"), "tune.quantile_level");
    if (!(config.tune.quantile_level > 0.0 && config.tune.quantile_level <= 1.0)) {
      throw ConfigError("tune.quantile_level: must lie in (0, 1]");
    }
    if (t.contains("pilot_replicates")) {
      config.tune.pilot_replicates =
          static_cast<std::size_t>(positive_integer(t.at("pilot_replicates"), "tune.pilot_replicates"));
    }
  }

  if (doc.contains("bounds")) {
    const Json& b = doc.at("bounds");
    reject_unknown(b, {"lags", "k_max", "norm"}, "bounds");
    if (b.contains("lags")) {
      config.bounds.lags.clear();
      if (!b.at("lags").is_array() || b.at("lags").empty()) throw ConfigError("bounds.lags: expected a nonempty array");
      for (const auto& l : b.at("lags")) config.bounds.lags.push_back(positive_integer(l, "bounds.lags"));
    } else {
      config.bounds.lags = {config.lag};
    }
    if (b.contains("k_max")) {
      const std::int64_t k_max = integer(b.at("k_max"), "bounds.k_max");
      if (k_max < 0) throw ConfigError("bounds.k_max: must be nonnegative");
      config.bounds.k_max = k_max;
    }
    if (b.contains("norm")) {
      try {
        config.bounds.norm = parse_norm(b.at("norm").get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bounds.norm: ") + e.what());
      }
    }
  } else {
    config.bounds.lags = {config.lag};
  }

  if (doc.contains("avar")) {
    const Json& a = doc.at("avar");
    reject_unknown(a, {"replicates", "m_I", "y_anchor", "k", "lag", "ell"}, "avar");
    if (a.contains("replicates")) {
      config.avar.replicates = static_cast<std::size_t>(positive_integer(a.at("replicates"), "avar.replicates"));
    }
    if (a.contains("m_I")) config.avar.m_I = static_cast<std::size_t>(positive_integer(a.at("m_I"), "avar.m_I"));
    if (a.contains("y_anchor")) {
      const std::vector<double> y = numbers(a.at("y_anchor"), "avar.y_anchor");
      if (static_cast<Eigen::Index>(y.size()) != config.kernel->dimension()) {
        throw ConfigError("avar.y_anchor: dimension mismatch");
      }
      config.avar.y_anchor = to_point(y);
    }
    if (a.contains("k")) config.avar.k = integer(a.at("k"), "avar.k");
    if (a.contains("lag")) config.avar.lag = positive_integer(a.at("lag"), "avar.lag");
    if (a.contains("ell")) config.avar.ell = integer(a.at("ell"), "avar.ell");
    if (config.avar.k && *config.avar.k < 0) throw ConfigError("avar.k: must be nonnegative");
    if (config.avar.k && config.avar.ell && *config.avar.ell < *config.avar.k) {
      throw ConfigError("avar.ell must be >= avar.k");
    }
  }

  if (doc.contains("inefficiency")) {
    const Json& s = doc.at("inefficiency");
    reject_unknown(s, {"k_values", "lag_policies"}, "inefficiency");
    if (s.contains("k_values")) {
      for (const auto& k : s.at("k_values")) config.sweep.k_values.push_back(positive_integer(k, "inefficiency.k_values"));
    }
    if (s.contains("lag_policies")) {
      config.sweep.lag_policies.clear();
      for (const auto& p : s.at("lag_policies")) {
        const std::string policy = p.is_string() ? p.get<std::string>() : p.dump();
        if (policy != "1" && policy != "k") throw ConfigError("inefficiency.lag_policies: expected \"1\" or \"k\"");
        config.sweep.lag_policies.push_back(policy);
      }
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json document;
  try {
    document = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(document, overrides);
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  // Sorted keys make the hash independent of key order in the file.
  nlohmann::json canonical = nlohmann::json::parse(config.source.dump());
  canonical.erase("workers");
  return fnv1a64(canonical.dump());
}

}  // namespace umcmc::driver
