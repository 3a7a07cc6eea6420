// SPDX-License-Identifier: Apache-2.0
#include "tlsfit/noise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tlsfit {

using nlohmann::json;

NoiseSpec NoiseSpec::gaussian(double sigma) {
  NoiseSpec s;
  s.kind = Kind::Gaussian;
  s.sigma = sigma;
  s.validate();
  return s;
}

NoiseSpec NoiseSpec::projection(int ne) {
  NoiseSpec s;
  s.kind = Kind::Projection;
  s.ne = ne;
  s.validate();
  return s;
}

void NoiseSpec::validate() const {
  if (kind == Kind::Gaussian && !(sigma > 0.0))
    throw std::invalid_argument("Gaussian noise requires sigma > 0");
  if (kind == Kind::Projection && ne < 1)
    throw std::invalid_argument("projection noise requires ne >= 1");
}

std::uint64_t NoiseSpec::content_hash() const {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(kind) + 1);
  h = seed_combine(h, std::bit_cast<std::uint64_t>(sigma));
  h = seed_combine(h, static_cast<std::uint64_t>(ne));
  return h;
}

std::string to_string(NoiseSpec::Kind kind) {
  switch (kind) {
    case NoiseSpec::Kind::None: return "none";
    case NoiseSpec::Kind::Gaussian: return "gaussian";
    case NoiseSpec::Kind::Projection: return "projection";
  }
  return "none";
}

std::vector<double> uniform_schedule(int nt, double horizon) {
  if (nt < 1) throw std::invalid_argument("schedule needs nt >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  std::vector<double> t(static_cast<std::size_t>(nt));
  const double dt = horizon / nt;
  for (int k = 0; k < nt; ++k) t[static_cast<std::size_t>(k)] = k * dt;
  return t;
}

double gaussian_sigma_from_ensemble(int ne) {
  if (ne < 16) throw std::domain_error("gaussian_sigma_from_ensemble requires ne >= 16");
  return std::sqrt(std::log(std::log(static_cast<double>(ne))) / (2.0 * ne));
}

double projection_sample(double p, int ne, Rng& rng) {
  if (p < -1.0 || p > 1.0) throw std::invalid_argument("expectation outside [-1, 1]");
  if (ne < 1) throw std::invalid_argument("ne must be >= 1");
  const double p1hat = 0.5 * (1.0 + p);
  int n1 = 0;
  for (int i = 0; i < ne; ++i) {
    if (rng.u01() <= p1hat) ++n1;
  }
  return static_cast<double>(n1) / static_cast<double>(ne);
}

MeasurementTrace simulate_trace(const SystemParams& params, ModelKind kind,
                                std::span<const double> times, const NoiseSpec& noise,
                                std::uint64_t seed) {
  params.validate();
  noise.validate();
  if (times.empty()) throw std::invalid_argument("empty sampling schedule");

  MeasurementTrace trace;
  trace.times.assign(times.begin(), times.end());
  trace.values.resize(times.size());
  trace.noise = noise;
  trace.seed = seed;

  Rng rng(seed);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double p = ideal_signal(params, kind, times[i]);
    switch (noise.kind) {
      case NoiseSpec::Kind::None:
        trace.values[i] = p;
        break;
      case NoiseSpec::Kind::Gaussian:
        trace.values[i] = p + noise.sigma * rng.gauss();
        break;
      case NoiseSpec::Kind::Projection: {
        // p can overshoot +-1 by an ulp (e.g. sin^2 + cos^2 rounding)
        const double pc = std::clamp(p, -1.0, 1.0);
        trace.values[i] = 2.0 * projection_sample(pc, noise.ne, rng) - 1.0;
        break;
      }
    }
  }
  return trace;
}

// --- serialization ---

namespace {

void format_double(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

json noise_to_json_obj(const NoiseSpec& noise, int n_averaged) {
  json j;
  j["kind"] = to_string(noise.kind);
  if (noise.kind == NoiseSpec::Kind::Gaussian) j["sigma"] = noise.sigma;
  if (noise.kind == NoiseSpec::Kind::Projection) j["ne"] = noise.ne;
  if (n_averaged > 1) j["averaged"] = n_averaged;
  return j;
}

NoiseSpec noise_from_json_obj(const json& j, int* n_averaged) {
  NoiseSpec noise;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") {
    noise = NoiseSpec::gaussian(j.at("sigma").get<double>());
  } else if (kind == "projection") {
    noise = NoiseSpec::projection(j.at("ne").get<int>());
  } else if (kind != "none") {
    throw std::invalid_argument("unknown noise kind '" + kind + "'");
  }
  if (n_averaged) *n_averaged = j.value("averaged", 1);
  return noise;
}

}  // namespace

void write_trace_csv(const MeasurementTrace& trace, std::ostream& out) {
  out << "t,d\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    format_double(out, trace.times[i]);
    out << ',';
    format_double(out, trace.values[i]);
    out << '\n';
  }
}

MeasurementTrace read_trace_csv(std::istream& in) {
  MeasurementTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty trace CSV");
  // tolerate an optional UTF-8 BOM before the header
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (line != "t,d" && line.rfind("t,d", 0) != 0)
    throw std::invalid_argument("trace CSV must start with header 't,d'");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("malformed trace CSV row: " + line);
    trace.times.push_back(std::stod(line.substr(0, comma)));
    trace.values.push_back(std::stod(line.substr(comma + 1)));
  }
  if (trace.times.empty()) throw std::invalid_argument("trace CSV has no data rows");
  for (std::size_t i = 1; i < trace.times.size(); ++i) {
    if (!(trace.times[i] > trace.times[i - 1]))
      throw std::invalid_argument("trace times must be strictly increasing");
  }
  return trace;
}

std::string trace_to_json(const MeasurementTrace& trace) {
  json j;
  j["times"] = trace.times;
  j["values"] = trace.values;
  j["noise"] = noise_to_json_obj(trace.noise, trace.n_averaged);
  j["seed"] = trace.seed;
  return j.dump();
}

MeasurementTrace trace_from_json(const std::string& text) {
  const json j = json::parse(text);
  MeasurementTrace trace;
  trace.times = j.at("times").get<std::vector<double>>();
  trace.values = j.at("values").get<std::vector<double>>();
  trace.noise = noise_from_json_obj(j.at("noise"), &trace.n_averaged);
  trace.seed = j.at("seed").get<std::uint64_t>();
  if (trace.times.size() != trace.values.size())
    throw std::invalid_argument("trace times/values length mismatch");
  return trace;
}

}  // namespace tlsfit
