// SPDX-License-Identifier: Apache-2.0
//
// tlsfit command-line front end.
//
//   simulate  - generate a measurement trace (CSV "t,d" or JSON)
//   estimate  - run one estimation strategy on a trace file, emit FitResult JSON
//   compare   - Monte-Carlo sweep over models x noise x strategies
//   adaptive  - iterative refinement, one FitResult JSON per line
//   fisher    - Cramer-Rao gap diagnostic over a sweep of shot counts
//
// Errors leave a machine-readable JSON object on stderr and exit nonzero.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tlsfit/adaptive.hpp"
#include "tlsfit/fisher.hpp"
#include "tlsfit/harness.hpp"
#include "tlsfit/likelihood.hpp"
#include "tlsfit/noise.hpp"
#include "tlsfit/spectral.hpp"

namespace {

using namespace tlsfit;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct OutputTarget {
  std::string path = "-";

  void write(const std::string& text) const {
    if (path == "-") {
      std::cout << text;
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
  }
};

struct NoiseArgs {
  std::string kind = "none";
  double sigma = 0.05;
  int ne = 100;

  NoiseSpec build() const {
    if (kind == "none") return NoiseSpec::none();
    if (kind == "gaussian") return NoiseSpec::gaussian(sigma);
    if (kind == "projection") return NoiseSpec::projection(ne);
    throw std::runtime_error("unknown noise kind '" + kind + "'");
  }
};

SystemParams resolve_model(int model_index, double omega, double gamma, double theta_i,
                           double theta_m) {
  SystemParams p;
  if (model_index > 0) {
    const auto models = builtin_models();
    if (model_index > static_cast<int>(models.size()))
      throw std::runtime_error("model index out of range (1..10)");
    p.omega = models[static_cast<std::size_t>(model_index) - 1].omega;
    p.gamma = models[static_cast<std::size_t>(model_index) - 1].gamma;
  } else {
    p.omega = omega;
    p.gamma = gamma;
  }
  p.theta_i = theta_i;
  p.theta_m = theta_m;
  return p;
}

MeasurementTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    std::stringstream ss;
    ss << in.rdbuf();
    return trace_from_json(ss.str());
  }
  return read_trace_csv(in);
}

int run(int argc, char** argv) {
  CLI::App app{"Simulation and estimation of two-level-system frequency and "
               "dephasing parameters"};
  app.require_subcommand(1);

  // --- simulate ---
  auto* sim = app.add_subcommand("simulate", "simulate a measurement trace");
  int sim_model = 0;
  double sim_omega = 1.0, sim_gamma = 0.1;
  double sim_ti = 1.5707963267948966, sim_tm = 1.5707963267948966;
  std::string sim_kind = "fid";
  NoiseArgs sim_noise;
  int sim_nt = 100;
  double sim_tmax = 30.0;
  bool sim_ld = false;
  std::uint64_t sim_seed = 0;
  OutputTarget sim_out;
  std::string sim_format = "csv";
  auto* sim_model_opt = sim->add_option("-m,--model-index", sim_model, "builtin model index 1..10");
  sim->add_option("--omega", sim_omega, "angular/Rabi frequency")->excludes(sim_model_opt);
  sim->add_option("--gamma", sim_gamma, "dephasing rate")->excludes(sim_model_opt);
  sim->add_option("--theta-i", sim_ti, "initialization angle [rad]");
  sim->add_option("--theta-m", sim_tm, "measurement angle [rad]");
  sim->add_option("--kind", sim_kind, "model kind: fid|rabi")
      ->check(CLI::IsMember({"fid", "rabi"}));
  sim->add_option("--noise", sim_noise.kind, "noise kind: none|gaussian|projection")
      ->check(CLI::IsMember({"none", "gaussian", "projection"}));
  sim->add_option("--sigma", sim_noise.sigma, "Gaussian noise sigma");
  sim->add_option("--ne", sim_noise.ne, "projection repetitions per point");
  sim->add_option("--nt", sim_nt, "number of samples");
  sim->add_option("--tmax", sim_tmax, "sampling horizon");
  sim->add_flag("--ld", sim_ld, "low-discrepancy instead of uniform sampling");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("-o,--out", sim_out.path, "output path ('-' = stdout)");
  sim->add_option("--format", sim_format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  sim->callback([&] {
    const SystemParams params =
        resolve_model(sim_model, sim_omega, sim_gamma, sim_ti, sim_tm);
    const auto schedule = sim_ld ? ld_schedule(sim_nt, 0, 0, sim_tmax).times
                                 : uniform_schedule(sim_nt, sim_tmax);
    const MeasurementTrace trace = simulate_trace(
        params, parse_model_kind(sim_kind), schedule, sim_noise.build(), sim_seed);
    if (sim_format == "json") {
      sim_out.write(trace_to_json(trace) + "\n");
    } else {
      std::ostringstream ss;
      write_trace_csv(trace, ss);
      sim_out.write(ss.str());
    }
  });

  // --- estimate ---
  auto* est = app.add_subcommand("estimate", "estimate parameters from a trace");
  int est_strategy = 3;
  std::string est_kind = "fid";
  std::string est_in;
  OutputTarget est_out;
  est->add_option("-s,--strategy", est_strategy, "estimation strategy 1|2|3")
      ->check(CLI::IsMember({1, 2, 3}));
  est->add_option("--kind", est_kind, "model kind: fid|rabi")
      ->check(CLI::IsMember({"fid", "rabi"}));
  est->add_option("-i,--in", est_in, "input trace (.csv with header t,d, or .json)")
      ->required();
  est->add_option("-o,--out", est_out.path, "output path ('-' = stdout)");
  est->callback([&] {
    const MeasurementTrace trace = load_trace(est_in);
    const ModelKind kind = parse_model_kind(est_kind);
    FitResult fit;
    if (est_strategy == 3) {
      fit = strategy3(trace, kind);
    } else {
      fit.log_l_max = kNaN;
      fit.sigma_est = kNaN;
      fit.alpha = {kNaN, kNaN};
      fit.d_omega = kNaN;
      fit.d_gamma = kNaN;
      const auto [om, ga] = est_strategy == 1 ? estimate_strategy1(trace)
                                              : estimate_strategy2(trace);
      fit.omega = om;
      fit.gamma = ga;
    }
    est_out.write(fit_to_json(fit) + "\n");
  });

  // --- compare ---
  auto* cmp = app.add_subcommand("compare", "Monte-Carlo strategy comparison");
  std::string cmp_config;
  OutputTarget cmp_out;
  std::string cmp_format = "csv";
  cmp->add_option("-c,--config", cmp_config, "experiment config JSON file")->required();
  cmp->add_option("-o,--out", cmp_out.path, "output path ('-' = stdout)");
  cmp->add_option("--format", cmp_format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmp->callback([&] {
    std::ifstream in(cmp_config, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config '" + cmp_config + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const ExperimentConfig cfg = config_from_json(ss.str());
    const ErrorStats stats = run_comparison(cfg);
    std::ostringstream out;
    emit_results(stats, out,
                 cmp_format == "json" ? ResultFormat::Json : ResultFormat::Csv);
    cmp_out.write(out.str());
  });

  // --- adaptive ---
  auto* ada = app.add_subcommand("adaptive", "iterative/adaptive refinement");
  std::string ada_method = "ld";
  int ada_model = 1;
  std::string ada_kind = "fid";
  NoiseArgs ada_noise{"gaussian", 0.05, 100};
  int ada_iters = 10, ada_n0 = 20, ada_ni = 8;
  double ada_tmax = 30.0;
  std::uint64_t ada_seed = 0;
  OutputTarget ada_out;
  ada->add_option("--method", ada_method, "ld|variance")
      ->check(CLI::IsMember({"ld", "variance"}));
  ada->add_option("-m,--model-index", ada_model, "builtin model index 1..10");
  ada->add_option("--kind", ada_kind, "model kind: fid|rabi")
      ->check(CLI::IsMember({"fid", "rabi"}));
  ada->add_option("--noise", ada_noise.kind, "noise kind: none|gaussian|projection")
      ->check(CLI::IsMember({"none", "gaussian", "projection"}));
  ada->add_option("--sigma", ada_noise.sigma, "Gaussian noise sigma");
  ada->add_option("--ne", ada_noise.ne, "projection repetitions per point");
  ada->add_option("--iterations", ada_iters, "refinement iterations");
  ada->add_option("--n0", ada_n0, "initial sample count");
  ada->add_option("--ni", ada_ni, "new samples per iteration");
  ada->add_option("--tmax", ada_tmax, "sampling horizon");
  ada->add_option("--seed", ada_seed, "RNG seed");
  ada->add_option("-o,--out", ada_out.path, "output path ('-' = stdout)");
  ada->callback([&] {
    const SystemParams params = resolve_model(ada_model, 1.0, 0.1, 1.5707963267948966,
                                              1.5707963267948966);
    const ModelKind kind = parse_model_kind(ada_kind);
    const NoiseSpec noise = ada_noise.build();

    RefineConfig cfg;
    cfg.method = ada_method == "ld" ? RefineMethod::LdSampling
                                    : RefineMethod::TraceVariance;
    cfg.iterations = ada_iters;
    cfg.ni = ada_ni;
    cfg.horizon = ada_tmax;
    cfg.seed = ada_seed;

    std::uint64_t acquisition = 0;
    const auto acquire = [&](const std::vector<double>& times) {
      return simulate_trace(params, kind, times, noise,
                            seed_combine(ada_seed, ++acquisition));
    };
    const SamplingSchedule initial = ld_schedule(ada_n0, ada_ni, 0, ada_tmax);
    const auto fits = refine_loop(initial, kind, acquire, cfg);
    std::string lines;
    for (const auto& fit : fits) lines += fit_to_json(fit) + "\n";
    ada_out.write(lines);
  });

  // --- fisher ---
  auto* fis = app.add_subcommand("fisher", "Cramer-Rao gap over a shot-count sweep");
  std::vector<int> fis_ne{100, 500, 1000, 5000, 10000};
  int fis_model = 1, fis_runs = 200, fis_nt = 100;
  double fis_tmax = 30.0;
  std::uint64_t fis_seed = 0;
  OutputTarget fis_out;
  fis->add_option("--ne-sweep", fis_ne, "projection shot counts")->delimiter(',');
  fis->add_option("-m,--model-index", fis_model, "builtin model index 1..10");
  fis->add_option("--runs", fis_runs, "estimation runs per shot count");
  fis->add_option("--nt", fis_nt, "samples per trace");
  fis->add_option("--tmax", fis_tmax, "sampling horizon");
  fis->add_option("--seed", fis_seed, "RNG seed");
  fis->add_option("-o,--out", fis_out.path, "output path ('-' = stdout)");
  fis->callback([&] {
    const SystemParams params = resolve_model(fis_model, 1.0, 0.1, 1.5707963267948966,
                                              1.5707963267948966);
    const auto schedule = uniform_schedule(fis_nt, fis_tmax);
    nlohmann::json arr = nlohmann::json::array();
    for (int ne : fis_ne) {
      const NoiseSpec noise = NoiseSpec::projection(ne);
      std::vector<std::pair<double, double>> estimates;
      estimates.reserve(static_cast<std::size_t>(fis_runs));
      for (int run = 0; run < fis_runs; ++run) {
        const std::uint64_t seed =
            seed_combine(seed_combine(fis_seed, noise.content_hash()),
                         static_cast<std::uint64_t>(run));
        const MeasurementTrace trace =
            simulate_trace(params, ModelKind::DephasingFID, schedule, noise, seed);
        const FitResult fit = strategy3(trace, ModelKind::DephasingFID);
        estimates.emplace_back(fit.omega, fit.gamma);
      }
      const FisherMatrix fi =
          fisher_matrix(params, schedule, 1.0 / std::sqrt(static_cast<double>(ne)));
      const CrbGap gap = crb_gap(estimates, fi);
      nlohmann::json item = nlohmann::json::parse(crb_gap_to_json(gap));
      item["ne"] = ne;
      arr.push_back(item);
    }
    fis_out.write(arr.dump(2) + "\n");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    nlohmann::json err{{"error", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  }
}
