// SPDX-License-Identifier: Apache-2.0
#include "tlsfit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tlsfit/adaptive.hpp"
#include "tlsfit/likelihood.hpp"
#include "tlsfit/spectral.hpp"

namespace tlsfit {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double noise_level(const NoiseSpec& noise) {
  switch (noise.kind) {
    case NoiseSpec::Kind::Gaussian: return noise.sigma;
    case NoiseSpec::Kind::Projection: return static_cast<double>(noise.ne);
    case NoiseSpec::Kind::None: return 0.0;
  }
  return 0.0;
}

std::uint64_t run_seed(std::uint64_t master, int model_idx, const NoiseSpec& noise,
                       int run) {
  std::uint64_t h = seed_combine(master, static_cast<std::uint64_t>(model_idx));
  h = seed_combine(h, noise.content_hash());
  return seed_combine(h, static_cast<std::uint64_t>(run));
}

struct RunningStats {
  std::vector<double> om, ga;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? kNaN : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return kNaN;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (static_cast<double>(v.size()) - 1.0));
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json cell_to_json(const ErrorStatsCell& c) {
  json j;
  j["model_idx"] = c.model_idx;
  j["omega_true"] = c.omega_true;
  j["gamma_true"] = c.gamma_true;
  j["noise_kind"] = to_string(c.noise.kind);
  j["noise_level"] = noise_level(c.noise);
  j["strategy"] = c.strategy;
  j["e_omega"] = c.e_omega;
  j["e_gamma"] = c.e_gamma;
  j["bias_omega"] = c.bias_omega;
  j["bias_gamma"] = c.bias_gamma;
  j["n_failed"] = c.n_failed;
  return j;
}

NoiseSpec noise_from_kind_level(const std::string& kind, double level) {
  if (kind == "gaussian") return NoiseSpec::gaussian(level);
  if (kind == "projection") return NoiseSpec::projection(static_cast<int>(level));
  if (kind == "none") return NoiseSpec::none();
  throw std::invalid_argument("unknown noise kind '" + kind + "'");
}

ErrorStatsCell cell_from_json(const json& j) {
  ErrorStatsCell c;
  c.model_idx = j.at("model_idx").get<int>();
  c.omega_true = j.at("omega_true").get<double>();
  c.gamma_true = j.at("gamma_true").get<double>();
  c.noise = noise_from_kind_level(j.at("noise_kind").get<std::string>(),
                                  j.at("noise_level").is_null()
                                      ? 0.0
                                      : j.at("noise_level").get<double>());
  c.strategy = j.at("strategy").get<int>();
  auto num = [&j](const char* key) {
    return j.at(key).is_null() ? kNaN : j.at(key).get<double>();
  };
  c.e_omega = num("e_omega");
  c.e_gamma = num("e_gamma");
  c.bias_omega = num("bias_omega");
  c.bias_gamma = num("bias_gamma");
  c.n_failed = j.at("n_failed").get<int>();
  return c;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (runs < 1) throw std::invalid_argument("config: runs >= 1 required");
  if (noise_sweep.empty()) throw std::invalid_argument("config: empty noise sweep");
  if (strategies.empty()) throw std::invalid_argument("config: no strategies selected");
  for (int s : strategies) {
    if (s < 1 || s > 3) throw std::invalid_argument("config: strategies must be in {1,2,3}");
  }
  if (nt < 5) throw std::invalid_argument("config: nt >= 5 required");
  if (!(horizon > 0.0)) throw std::invalid_argument("config: horizon must be > 0");
  for (const auto& m : models) m.validate();
  for (const auto& n : noise_sweep) n.validate();
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  for (const auto& entry : builtin_models()) {
    SystemParams p;
    p.omega = entry.omega;
    p.gamma = entry.gamma;
    cfg.models.push_back(p);
  }
  for (double s : {0.01, 0.02, 0.04, 0.06, 0.08, 0.10})
    cfg.noise_sweep.push_back(NoiseSpec::gaussian(s));
  cfg.strategies = {1, 2, 3};
  return cfg;
}

ErrorStats run_comparison(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  if (cfg.models.empty()) {
    for (const auto& entry : builtin_models()) {
      SystemParams p;
      p.omega = entry.omega;
      p.gamma = entry.gamma;
      cfg.models.push_back(p);
    }
  }
  cfg.validate();

  const std::vector<double> schedule =
      cfg.ld_sampling ? ld_schedule(cfg.nt, 0, 0, cfg.horizon).times
                      : uniform_schedule(cfg.nt, cfg.horizon);

  const bool wants_spectral =
      std::count(cfg.strategies.begin(), cfg.strategies.end(), 1) +
          std::count(cfg.strategies.begin(), cfg.strategies.end(), 2) >
      0;

  ErrorStats stats;
  for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
    const SystemParams& model = cfg.models[mi];
    const int model_idx = static_cast<int>(mi) + 1;
    for (const NoiseSpec& noise : cfg.noise_sweep) {
      std::array<RunningStats, 3> per_strategy;
      std::array<int, 3> failed{0, 0, 0};

      for (int run = 0; run < cfg.runs; ++run) {
        const std::uint64_t seed = run_seed(cfg.seed, model_idx, noise, run);
        const MeasurementTrace trace =
            simulate_trace(model, cfg.kind, schedule, noise, seed);

        PeakInfo peak{};
        bool have_peak = false;
        if (wants_spectral) {
          try {
            peak = trace_peak(trace);
            have_peak = true;
          } catch (const std::exception&) {
          }
        }

        for (int s : cfg.strategies) {
          double om = kNaN, ga = kNaN;
          try {
            if (s == 1) {
              if (!have_peak) throw std::runtime_error("no peak");
              std::tie(om, ga) = strategy1(peak);
            } else if (s == 2) {
              if (!have_peak) throw std::runtime_error("no peak");
              std::tie(om, ga) = strategy2(peak);
            } else {
              const FitResult fit = strategy3(trace, cfg.kind);
              om = fit.omega;
              ga = fit.gamma;
            }
          } catch (const std::exception&) {
          }
          auto& acc = per_strategy[static_cast<std::size_t>(s) - 1];
          if (std::isfinite(om) && std::isfinite(ga)) {
            acc.om.push_back(om);
            acc.ga.push_back(ga);
          } else {
            ++failed[static_cast<std::size_t>(s) - 1];
          }
        }
      }

      for (int s : cfg.strategies) {
        const auto& acc = per_strategy[static_cast<std::size_t>(s) - 1];
        ErrorStatsCell cell;
        cell.model_idx = model_idx;
        cell.omega_true = model.omega;
        cell.gamma_true = model.gamma;
        cell.noise = noise;
        cell.strategy = s;
        cell.n_failed = failed[static_cast<std::size_t>(s) - 1];
        double eo = 0.0, eg = 0.0;
        for (std::size_t r = 0; r < acc.om.size(); ++r) {
          eo += std::abs(acc.om[r] - model.omega) / model.omega;
          eg += std::abs(acc.ga[r] - model.gamma) / model.gamma;
        }
        const double nvalid = static_cast<double>(acc.om.size());
        cell.e_omega = nvalid > 0 ? eo / nvalid : kNaN;
        cell.e_gamma = nvalid > 0 ? eg / nvalid : kNaN;
        cell.bias_omega = mean_of(acc.om) - model.omega;
        cell.bias_gamma = mean_of(acc.ga) - model.gamma;
        cell.std_omega = std_of(acc.om);
        cell.std_gamma = std_of(acc.ga);
        stats.cells.push_back(std::move(cell));
      }
    }
  }
  return stats;
}

Aggregate aggregate_across_models(const ErrorStats& stats, const NoiseSpec& noise,
                                  int strategy, bool for_gamma) {
  std::vector<double> values;
  for (const auto& cell : stats.cells) {
    if (cell.noise == noise && cell.strategy == strategy) {
      const double v = for_gamma ? cell.e_gamma : cell.e_omega;
      if (std::isfinite(v)) values.push_back(v);
    }
  }
  if (values.empty()) throw std::invalid_argument("aggregate: no matching cells");
  Aggregate agg;
  agg.min = *std::min_element(values.begin(), values.end());
  agg.max = *std::max_element(values.begin(), values.end());
  agg.median = median_of(values);
  return agg;
}

EstimateHistograms bias_histogram(const ExperimentConfig& config, int model_index,
                                  const NoiseSpec& noise, int strategy, int bins) {
  if (config.runs < 100) throw std::invalid_argument("bias_histogram: runs >= 100");
  if (bins < 1) throw std::invalid_argument("bias_histogram: bins >= 1");
  ExperimentConfig cfg = config;
  if (cfg.models.empty()) {
    for (const auto& entry : builtin_models()) {
      SystemParams p;
      p.omega = entry.omega;
      p.gamma = entry.gamma;
      cfg.models.push_back(p);
    }
  }
  if (model_index < 1 || model_index > static_cast<int>(cfg.models.size()))
    throw std::invalid_argument("bias_histogram: model index out of range");

  const SystemParams& model = cfg.models[static_cast<std::size_t>(model_index) - 1];
  const std::vector<double> schedule = uniform_schedule(cfg.nt, cfg.horizon);
  std::vector<double> oms, gas;
  for (int run = 0; run < cfg.runs; ++run) {
    const std::uint64_t seed = run_seed(cfg.seed, model_index, noise, run);
    const MeasurementTrace trace = simulate_trace(model, cfg.kind, schedule, noise, seed);
    try {
      double om, ga;
      if (strategy == 1) {
        std::tie(om, ga) = estimate_strategy1(trace);
      } else if (strategy == 2) {
        std::tie(om, ga) = estimate_strategy2(trace);
      } else {
        const FitResult fit = strategy3(trace, cfg.kind);
        om = fit.omega;
        ga = fit.gamma;
      }
      oms.push_back(om);
      gas.push_back(ga);
    } catch (const std::exception&) {
    }
  }

  auto build = [bins](const std::vector<double>& v) {
    Histogram h;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    if (v.empty()) return h;
    h.lo = *std::min_element(v.begin(), v.end());
    h.hi = *std::max_element(v.begin(), v.end());
    if (h.hi == h.lo) {  // delta-distributed input: one occupied bin
      h.counts[0] = static_cast<int>(v.size());
      return h;
    }
    for (double x : v) {
      auto k = static_cast<std::size_t>((x - h.lo) / (h.hi - h.lo) *
                                        static_cast<double>(bins));
      if (k >= static_cast<std::size_t>(bins)) k = static_cast<std::size_t>(bins) - 1;
      ++h.counts[k];
    }
    return h;
  };
  return EstimateHistograms{build(oms), build(gas)};
}

void emit_results(const ErrorStats& stats, std::ostream& out, ResultFormat format) {
  if (format == ResultFormat::Json) {
    json arr = json::array();
    for (const auto& cell : stats.cells) arr.push_back(cell_to_json(cell));
    out << arr.dump(2) << '\n';
    return;
  }
  out << "model_idx,omega_true,gamma_true,noise_kind,noise_level,strategy,"
         "e_omega,e_gamma,bias_omega,bias_gamma,n_failed\n";
  char buf[256];
  for (const auto& c : stats.cells) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%s,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%d\n",
                  c.model_idx, c.omega_true, c.gamma_true,
                  to_string(c.noise.kind).c_str(), noise_level(c.noise), c.strategy,
                  c.e_omega, c.e_gamma, c.bias_omega, c.bias_gamma, c.n_failed);
    out << buf;
  }
}

void emit_results(const ErrorStats& stats, const std::string& path, ResultFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  emit_results(stats, out, format);
}

ErrorStats parse_results(std::istream& in, ResultFormat format) {
  ErrorStats stats;
  if (format == ResultFormat::Json) {
    json arr = json::parse(in);
    for (const auto& j : arr) stats.cells.push_back(cell_from_json(j));
    return stats;
  }
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty results CSV");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 11)
      throw std::invalid_argument("malformed results CSV row: " + line);
    ErrorStatsCell c;
    auto num = [](const std::string& s) {
      return s == "nan" || s == "-nan" ? kNaN : std::stod(s);
    };
    c.model_idx = std::stoi(fields[0]);
    c.omega_true = num(fields[1]);
    c.gamma_true = num(fields[2]);
    c.noise = noise_from_kind_level(fields[3], num(fields[4]));
    c.strategy = std::stoi(fields[5]);
    c.e_omega = num(fields[6]);
    c.e_gamma = num(fields[7]);
    c.bias_omega = num(fields[8]);
    c.bias_gamma = num(fields[9]);
    c.n_failed = std::stoi(fields[10]);
    stats.cells.push_back(std::move(c));
  }
  return stats;
}

std::string config_to_json(const ExperimentConfig& config) {
  json j;
  json models = json::array();
  for (const auto& m : config.models) {
    models.push_back({{"omega", m.omega},
                      {"gamma", m.gamma},
                      {"theta_i", m.theta_i},
                      {"theta_m", m.theta_m}});
  }
  j["models"] = models;
  j["kind"] = to_string(config.kind);
  j["schedule"] = {{"type", config.ld_sampling ? "ld" : "uniform"},
                   {"nt", config.nt},
                   {"tmax", config.horizon}};
  json noise = json::array();
  for (const auto& n : config.noise_sweep) {
    json item{{"kind", to_string(n.kind)}};
    if (n.kind == NoiseSpec::Kind::Gaussian) item["sigma"] = n.sigma;
    if (n.kind == NoiseSpec::Kind::Projection) item["ne"] = n.ne;
    noise.push_back(item);
  }
  j["noise"] = noise;
  j["strategies"] = config.strategies;
  j["runs"] = config.runs;
  j["seed"] = config.seed;
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig cfg;
  if (j.contains("models") && !j.at("models").empty()) {
    for (const auto& m : j.at("models")) {
      SystemParams p;
      p.omega = m.at("omega").get<double>();
      p.gamma = m.at("gamma").get<double>();
      p.theta_i = m.value("theta_i", p.theta_i);
      p.theta_m = m.value("theta_m", p.theta_m);
      cfg.models.push_back(p);
    }
  } else {
    for (const auto& entry : builtin_models()) {
      SystemParams p;
      p.omega = entry.omega;
      p.gamma = entry.gamma;
      cfg.models.push_back(p);
    }
  }
  cfg.kind = parse_model_kind(j.value("kind", "fid"));
  if (j.contains("schedule")) {
    const auto& s = j.at("schedule");
    cfg.nt = s.value("nt", cfg.nt);
    cfg.horizon = s.value("tmax", cfg.horizon);
    cfg.ld_sampling = s.value("type", "uniform") == std::string("ld");
  }
  if (j.contains("noise")) {
    for (const auto& n : j.at("noise")) {
      const std::string kind = n.at("kind").get<std::string>();
      if (kind == "gaussian") {
        cfg.noise_sweep.push_back(NoiseSpec::gaussian(n.at("sigma").get<double>()));
      } else if (kind == "projection") {
        cfg.noise_sweep.push_back(NoiseSpec::projection(n.at("ne").get<int>()));
      } else {
        cfg.noise_sweep.push_back(NoiseSpec::none());
      }
    }
  } else {
    for (double s : {0.01, 0.02, 0.04, 0.06, 0.08, 0.10})
      cfg.noise_sweep.push_back(NoiseSpec::gaussian(s));
  }
  cfg.strategies = j.value("strategies", std::vector<int>{1, 2, 3});
  cfg.runs = j.value("runs", 100);
  cfg.seed = j.value("seed", static_cast<std::uint64_t>(0));
  cfg.validate();
  return cfg;
}

}  // namespace tlsfit
