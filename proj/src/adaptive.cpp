// SPDX-License-Identifier: Apache-2.0
#include "tlsfit/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tlsfit {

namespace {
constexpr double kDuplicateTol = 1e-9;

// merge new measurements into a cumulative record, keeping times sorted
MeasurementTrace merge_traces(const MeasurementTrace& base, const MeasurementTrace& extra) {
  MeasurementTrace out = base;
  for (std::size_t i = 0; i < extra.times.size(); ++i) {
    const auto pos = std::lower_bound(out.times.begin(), out.times.end(), extra.times[i]);
    const auto idx = static_cast<std::size_t>(pos - out.times.begin());
    out.times.insert(pos, extra.times[i]);
    out.values.insert(out.values.begin() + static_cast<std::ptrdiff_t>(idx),
                      extra.values[i]);
  }
  return out;
}
}  // namespace

MeasurementTrace average_traces(std::span<const MeasurementTrace> traces) {
  if (traces.empty()) throw std::invalid_argument("average_traces: no traces");
  const auto& first = traces.front();
  MeasurementTrace out;
  out.times = first.times;
  out.values.assign(first.times.size(), 0.0);
  out.noise = first.noise;
  out.seed = first.seed;
  out.n_averaged = 0;
  for (const auto& tr : traces) {
    if (tr.times.size() != first.times.size())
      throw std::invalid_argument("average_traces: mismatched schedules");
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      if (tr.times[i] != first.times[i])
        throw std::invalid_argument("average_traces: mismatched schedules");
      out.values[i] += tr.values[i];
    }
    out.n_averaged += tr.n_averaged;
  }
  const double inv = 1.0 / static_cast<double>(traces.size());
  for (double& v : out.values) v *= inv;
  return out;
}

PosteriorSamples sample_posterior(const MeasurementTrace& trace, ModelKind kind,
                                  const Box& box, int j_samples, Rng& rng) {
  if (j_samples < 2) throw std::invalid_argument("sample_posterior: need J >= 2");

  constexpr int nx = 60, ny = 40;
  const double dx = (box.hi[0] - box.lo[0]) / (nx - 1);
  const double dy = (box.hi[1] - box.lo[1]) / (ny - 1);

  std::vector<double> logl(static_cast<std::size_t>(nx) * ny,
                           -std::numeric_limits<double>::infinity());
  double l_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      try {
        const double l = log_likelihood(box.lo[0] + i * dx, box.lo[1] + j * dy,
                                        trace, kind);
        logl[static_cast<std::size_t>(i) * ny + j] = l;
        l_max = std::max(l_max, l);
      } catch (const std::domain_error&) {
      }
    }
  }
  if (!std::isfinite(l_max))
    throw std::runtime_error("sample_posterior: degenerate likelihood surface");

  std::vector<double> cdf(logl.size());
  double total = 0.0;
  for (std::size_t k = 0; k < logl.size(); ++k) {
    total += std::isfinite(logl[k]) ? std::exp(logl[k] - l_max) : 0.0;
    cdf[k] = total;
  }
  if (!(total > 0.0)) throw std::runtime_error("sample_posterior: zero likelihood mass");

  PosteriorSamples samples;
  samples.params.reserve(static_cast<std::size_t>(j_samples));
  for (int s = 0; s < j_samples; ++s) {
    const double u = rng.u01() * total;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const auto k = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    const int i = static_cast<int>(k) / ny;
    const int j = static_cast<int>(k) % ny;
    // jitter uniformly within the cell, clipped to the box
    const double om = std::clamp(box.lo[0] + i * dx + (rng.u01() - 0.5) * dx,
                                 box.lo[0], box.hi[0]);
    const double ga = std::clamp(box.lo[1] + j * dy + (rng.u01() - 0.5) * dy,
                                 box.lo[1], box.hi[1]);
    samples.params.emplace_back(om, ga);
  }
  return samples;
}

std::vector<double> trace_variance_schedule(const PosteriorSamples& samples,
                                            ModelKind kind,
                                            std::span<const double> candidate_times,
                                            int n1) {
  if (candidate_times.empty())
    throw std::invalid_argument("trace_variance_schedule: no candidate times");
  if (n1 < 1) throw std::invalid_argument("trace_variance_schedule: need N1 >= 1");
  const std::size_t j = samples.params.size();
  if (j == 0) throw std::invalid_argument("trace_variance_schedule: no posterior samples");

  std::vector<double> var(candidate_times.size(), 0.0);
  for (std::size_t s = 0; s < candidate_times.size(); ++s) {
    double mean = 0.0, m2 = 0.0;
    for (const auto& [om, ga] : samples.params) {
      SystemParams p;
      p.omega = om;
      p.gamma = ga;
      const double v = ideal_signal(p, kind, candidate_times[s]);
      mean += v;
      m2 += v * v;
    }
    mean /= static_cast<double>(j);
    var[s] = m2 / static_cast<double>(j) - mean * mean;
    // roundoff of an exactly flat prediction cloud must not create peaks
    if (var[s] < 1e-14) var[s] = 0.0;
  }

  // local maxima on the candidate grid; plateau ties take the earliest time
  std::vector<std::size_t> peaks;
  for (std::size_t s = 1; s + 1 < var.size(); ++s) {
    if (var[s] > var[s - 1] && var[s] >= var[s + 1]) peaks.push_back(s);
  }
  if (peaks.empty()) {
    const auto k = static_cast<std::size_t>(
        std::max_element(var.begin(), var.end()) - var.begin());
    return {candidate_times[k]};
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&var](std::size_t a, std::size_t b) { return var[a] > var[b]; });
  if (peaks.size() > static_cast<std::size_t>(n1)) peaks.resize(static_cast<std::size_t>(n1));
  std::vector<double> out;
  out.reserve(peaks.size());
  for (std::size_t k : peaks) out.push_back(candidate_times[k]);
  return out;
}

double van_der_corput(std::uint64_t n, unsigned base) {
  if (n == 0) throw std::invalid_argument("van_der_corput: index starts at 1");
  if (base < 2) throw std::invalid_argument("van_der_corput: base must be >= 2");
  double value = 0.0;
  double denom = 1.0;
  while (n > 0) {
    denom *= static_cast<double>(base);
    value += static_cast<double>(n % base) / denom;
    n /= base;
  }
  return value;
}

SamplingSchedule ld_schedule(int n0, int ni, int iteration, double horizon) {
  if (n0 < 1 || ni < 0 || iteration < 0 || !(horizon > 0.0))
    throw std::invalid_argument("ld_schedule: bad arguments");
  SamplingSchedule sched;
  sched.origin = ScheduleOrigin::LowDiscrepancy;
  sched.n0 = n0;
  sched.ni = ni;
  sched.iteration = iteration;
  const int count = n0 + iteration * ni;
  sched.times.reserve(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k)
    sched.times.push_back(horizon * van_der_corput(static_cast<std::uint64_t>(k)));
  std::sort(sched.times.begin(), sched.times.end());
  return sched;
}

std::vector<FitResult> refine_loop(
    const SamplingSchedule& initial, ModelKind kind,
    const std::function<MeasurementTrace(const std::vector<double>&)>& acquire,
    const RefineConfig& config) {
  if (config.iterations < 1) throw std::invalid_argument("refine_loop: iterations >= 1");

  Rng rng(seed_combine(config.seed, 0x61646170));
  std::vector<double> candidates;
  candidates.reserve(static_cast<std::size_t>(config.n_candidates));
  for (int k = 1; k <= config.n_candidates; ++k)
    candidates.push_back(config.horizon * van_der_corput(static_cast<std::uint64_t>(k)));
  std::sort(candidates.begin(), candidates.end());

  std::vector<double> times = initial.times;
  std::sort(times.begin(), times.end());
  MeasurementTrace cumulative = acquire(times);

  std::vector<FitResult> results;
  results.reserve(static_cast<std::size_t>(config.iterations));
  int ld_consumed = static_cast<int>(times.size());

  for (int it = 0; it < config.iterations; ++it) {
    results.push_back(strategy3(cumulative, kind, config.box));
    if (it + 1 == config.iterations) break;

    std::vector<double> next;
    if (config.method == RefineMethod::LdSampling) {
      for (int k = ld_consumed + 1; k <= ld_consumed + config.ni; ++k)
        next.push_back(config.horizon * van_der_corput(static_cast<std::uint64_t>(k)));
      ld_consumed += config.ni;
    } else {
      PosteriorSamples post =
          sample_posterior(cumulative, kind, config.box, config.j_samples, rng);
      std::vector<double> fresh;
      for (double c : candidates) {
        const auto it2 = std::lower_bound(cumulative.times.begin(),
                                          cumulative.times.end(), c - kDuplicateTol);
        const bool taken = it2 != cumulative.times.end() && *it2 <= c + kDuplicateTol;
        if (!taken) fresh.push_back(c);
      }
      if (!fresh.empty())
        next = trace_variance_schedule(post, kind, fresh, config.ni);
    }
    // drop near-duplicates within the new batch as well
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end(),
                           [](double a, double b) { return std::abs(a - b) < kDuplicateTol; }),
               next.end());
    if (next.empty()) continue;
    cumulative = merge_traces(cumulative, acquire(next));
  }
  return results;
}

}  // namespace tlsfit
