// SPDX-License-Identifier: Apache-2.0
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "tlsfit/adaptive.hpp"
#include "tlsfit/fisher.hpp"
#include "tlsfit/harness.hpp"
#include "tlsfit/likelihood.hpp"
#include "tlsfit/model.hpp"
#include "tlsfit/noise.hpp"
#include "tlsfit/optim.hpp"
#include "tlsfit/rng.hpp"
#include "tlsfit/spectral.hpp"

namespace py = pybind11;
using namespace tlsfit;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-level-system frequency/dephasing simulation and estimation";

  py::enum_<ModelKind>(m, "ModelKind")
      .value("FID", ModelKind::DephasingFID)
      .value("RABI", ModelKind::DrivenRabi);
  m.def("parse_model_kind", &parse_model_kind, py::arg("name"));

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init([](double omega, double gamma, double theta_i, double theta_m) {
             SystemParams p{omega, gamma, theta_i, theta_m};
             p.validate();
             return p;
           }),
           py::arg("omega"), py::arg("gamma"),
           py::arg("theta_i") = 1.5707963267948966,
           py::arg("theta_m") = 1.5707963267948966)
      .def_readwrite("omega", &SystemParams::omega)
      .def_readwrite("gamma", &SystemParams::gamma)
      .def_readwrite("theta_i", &SystemParams::theta_i)
      .def_readwrite("theta_m", &SystemParams::theta_m)
      .def("__repr__", [](const SystemParams& p) {
        std::ostringstream ss;
        ss << "SystemParams(omega=" << p.omega << ", gamma=" << p.gamma
           << ", theta_i=" << p.theta_i << ", theta_m=" << p.theta_m << ")";
        return ss.str();
      });

  m.def("builtin_models", [] {
    std::vector<std::pair<double, double>> out;
    for (const auto& e : builtin_models()) out.emplace_back(e.omega, e.gamma);
    return out;
  });
  m.def("ideal_signal", &ideal_signal, py::arg("params"), py::arg("kind"), py::arg("t"));
  m.def("phi_x3", &phi_x3, py::arg("omega_rabi"), py::arg("gamma"), py::arg("t"));
  m.def("uniform_schedule", &uniform_schedule, py::arg("nt"), py::arg("horizon"));

  py::class_<NoiseSpec> noise(m, "NoiseSpec");
  py::enum_<NoiseSpec::Kind>(noise, "Kind")
      .value("NONE", NoiseSpec::Kind::None)
      .value("GAUSSIAN", NoiseSpec::Kind::Gaussian)
      .value("PROJECTION", NoiseSpec::Kind::Projection);
  noise.def_static("none", &NoiseSpec::none)
      .def_static("gaussian", &NoiseSpec::gaussian, py::arg("sigma"))
      .def_static("projection", &NoiseSpec::projection, py::arg("ne"))
      .def_readonly("kind", &NoiseSpec::kind)
      .def_readonly("sigma", &NoiseSpec::sigma)
      .def_readonly("ne", &NoiseSpec::ne);

  py::class_<MeasurementTrace>(m, "MeasurementTrace")
      .def(py::init<>())
      .def_readwrite("times", &MeasurementTrace::times)
      .def_readwrite("values", &MeasurementTrace::values)
      .def_readwrite("noise", &MeasurementTrace::noise)
      .def_readwrite("seed", &MeasurementTrace::seed)
      .def_readwrite("n_averaged", &MeasurementTrace::n_averaged)
      .def("to_json", &trace_to_json)
      .def_static("from_json", &trace_from_json, py::arg("text"))
      .def("__len__", [](const MeasurementTrace& t) { return t.times.size(); });

  m.def("gaussian_sigma_from_ensemble", &gaussian_sigma_from_ensemble, py::arg("ne"));
  m.def("simulate_trace",
        [](const SystemParams& p, ModelKind kind, const std::vector<double>& times,
           const NoiseSpec& noise_spec, std::uint64_t seed) {
          return simulate_trace(p, kind, times, noise_spec, seed);
        },
        py::arg("params"), py::arg("kind"), py::arg("times"), py::arg("noise"),
        py::arg("seed"));

  py::enum_<SpectrumKind>(m, "SpectrumKind")
      .value("DISCRETE_FFT", SpectrumKind::DiscreteFFT)
      .value("CONTINUOUS_TRAPEZOID", SpectrumKind::ContinuousTrapezoid);
  py::class_<Spectrum>(m, "Spectrum")
      .def_readonly("freqs", &Spectrum::freqs)
      .def_readonly("values", &Spectrum::values)
      .def_readonly("kind", &Spectrum::kind);
  py::class_<PeakInfo>(m, "PeakInfo")
      .def(py::init([](double omega_star, double p_star, double d) {
             return PeakInfo{omega_star, p_star, d};
           }),
           py::arg("omega_star"), py::arg("p_star"), py::arg("d"))
      .def_readonly("omega_star", &PeakInfo::omega_star)
      .def_readonly("p_star", &PeakInfo::p_star)
      .def_readonly("d", &PeakInfo::d)
      .def("__repr__", [](const PeakInfo& p) {
        std::ostringstream ss;
        ss << "PeakInfo(omega_star=" << p.omega_star << ", p_star=" << p.p_star
           << ", d=" << p.d << ")";
        return ss.str();
      });

  m.def("center_rescale",
        [](const std::vector<double>& v) { return center_rescale(v); }, py::arg("values"));
  m.def("dft",
        [](const std::vector<double>& v, const std::vector<double>& t) { return dft(v, t); },
        py::arg("rescaled"), py::arg("times"));
  m.def("continuous_ft",
        [](const std::vector<double>& v, const std::vector<double>& t,
           const std::vector<double>& grid) { return continuous_ft(v, t, grid); },
        py::arg("rescaled"), py::arg("times"), py::arg("omega_grid"));
  m.def("default_omega_grid", &default_omega_grid, py::arg("nt"), py::arg("horizon"),
        py::arg("npts") = 2048);
  m.def("locate_peak", &locate_peak, py::arg("spectrum"));
  m.def("closed_form_peak", &closed_form_peak, py::arg("omega0"), py::arg("gamma"));
  m.def("strategy1", &strategy1, py::arg("peak"));
  m.def("strategy2", &strategy2, py::arg("peak"));
  m.def("estimate_strategy1", &estimate_strategy1, py::arg("trace"));
  m.def("estimate_strategy2", &estimate_strategy2, py::arg("trace"));

  py::class_<Box>(m, "Box")
      .def(py::init([](std::array<double, 2> lo, std::array<double, 2> hi) {
             return Box{lo, hi};
           }),
           py::arg("lo"), py::arg("hi"))
      .def_readwrite("lo", &Box::lo)
      .def_readwrite("hi", &Box::hi);
  m.def("default_search_box", &default_search_box);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("omega", &FitResult::omega)
      .def_readonly("gamma", &FitResult::gamma)
      .def_readonly("log_l_max", &FitResult::log_l_max)
      .def_readonly("sigma_est", &FitResult::sigma_est)
      .def_readonly("alpha", &FitResult::alpha)
      .def_readonly("d_omega", &FitResult::d_omega)
      .def_readonly("d_gamma", &FitResult::d_gamma)
      .def_readonly("theta_i_est", &FitResult::theta_i_est)
      .def_readonly("theta_m_est", &FitResult::theta_m_est)
      .def("to_json", &fit_to_json)
      .def("__repr__", [](const FitResult& f) {
        std::ostringstream ss;
        ss << "FitResult(omega=" << f.omega << ", gamma=" << f.gamma
           << ", log_l_max=" << f.log_l_max << ", sigma_est=" << f.sigma_est << ")";
        return ss.str();
      });

  m.def("log_likelihood",
        [](double omega, double gamma, const MeasurementTrace& trace, ModelKind kind) {
          return log_likelihood(omega, gamma, trace, kind);
        },
        py::arg("omega"), py::arg("gamma"), py::arg("trace"), py::arg("kind"));
  m.def("strategy3", &strategy3, py::arg("trace"), py::arg("kind"),
        py::arg("search_box") = default_search_box());
  m.def("estimate_amplitudes", &estimate_amplitudes, py::arg("omega"), py::arg("gamma"),
        py::arg("trace"), py::arg("kind"));
  m.def("angles_from_alphas", &angles_from_alphas, py::arg("alpha1"), py::arg("alpha2"),
        py::arg("kind"), py::arg("tol") = 0.05);

  py::class_<FisherMatrix>(m, "FisherMatrix")
      .def_readonly("i11", &FisherMatrix::i11)
      .def_readonly("i12", &FisherMatrix::i12)
      .def_readonly("i22", &FisherMatrix::i22)
      .def_readonly("sigma", &FisherMatrix::sigma)
      .def("inverse", &FisherMatrix::inverse);
  m.def("fisher_matrix",
        [](const SystemParams& p, const std::vector<double>& times, double sigma) {
          return fisher_matrix(p, times, sigma);
        },
        py::arg("params"), py::arg("times"), py::arg("sigma"));
  py::class_<CrbGap>(m, "CrbGap")
      .def_readonly("covariance", &CrbGap::covariance)
      .def_readonly("inv_fisher", &CrbGap::inv_fisher)
      .def_readonly("min_eig", &CrbGap::min_eig)
      .def("to_json", &crb_gap_to_json);
  m.def("crb_gap",
        [](const std::vector<std::pair<double, double>>& estimates,
           const FisherMatrix& fisher) { return crb_gap(estimates, fisher); },
        py::arg("estimates"), py::arg("fisher"));

  m.def("van_der_corput", &van_der_corput, py::arg("n"), py::arg("base") = 2u);
  py::enum_<ScheduleOrigin>(m, "ScheduleOrigin")
      .value("UNIFORM", ScheduleOrigin::Uniform)
      .value("LOW_DISCREPANCY", ScheduleOrigin::LowDiscrepancy)
      .value("TRACE_VARIANCE", ScheduleOrigin::TraceVariance);
  py::class_<SamplingSchedule>(m, "SamplingSchedule")
      .def_readonly("times", &SamplingSchedule::times)
      .def_readonly("origin", &SamplingSchedule::origin)
      .def_readonly("iteration", &SamplingSchedule::iteration);
  m.def("ld_schedule", &ld_schedule, py::arg("n0"), py::arg("ni"), py::arg("iteration"),
        py::arg("horizon"));
  m.def("average_traces",
        [](const std::vector<MeasurementTrace>& traces) { return average_traces(traces); },
        py::arg("traces"));

  py::class_<PosteriorSamples>(m, "PosteriorSamples")
      .def_readonly("params", &PosteriorSamples::params);
  m.def("sample_posterior",
        [](const MeasurementTrace& trace, ModelKind kind, const Box& box, int j_samples,
           std::uint64_t seed) {
          Rng rng(seed);
          return sample_posterior(trace, kind, box, j_samples, rng);
        },
        py::arg("trace"), py::arg("kind"), py::arg("box"), py::arg("j_samples"),
        py::arg("seed"));
  m.def("trace_variance_schedule",
        [](const PosteriorSamples& samples, ModelKind kind,
           const std::vector<double>& candidates, int n1) {
          return trace_variance_schedule(samples, kind, candidates, n1);
        },
        py::arg("samples"), py::arg("kind"), py::arg("candidate_times"), py::arg("n1"));

  py::enum_<RefineMethod>(m, "RefineMethod")
      .value("LD_SAMPLING", RefineMethod::LdSampling)
      .value("TRACE_VARIANCE", RefineMethod::TraceVariance);
  py::class_<RefineConfig>(m, "RefineConfig")
      .def(py::init<>())
      .def_readwrite("method", &RefineConfig::method)
      .def_readwrite("iterations", &RefineConfig::iterations)
      .def_readwrite("ni", &RefineConfig::ni)
      .def_readwrite("j_samples", &RefineConfig::j_samples)
      .def_readwrite("n_candidates", &RefineConfig::n_candidates)
      .def_readwrite("horizon", &RefineConfig::horizon)
      .def_readwrite("box", &RefineConfig::box)
      .def_readwrite("seed", &RefineConfig::seed);
  m.def("refine_loop",
        [](const SamplingSchedule& initial, ModelKind kind, const py::function& acquire,
           const RefineConfig& config) {
          const auto fn = [&acquire](const std::vector<double>& ts) {
            return acquire(ts).cast<MeasurementTrace>();
          };
          return refine_loop(initial, kind, fn, config);
        },
        py::arg("initial"), py::arg("kind"), py::arg("acquire"), py::arg("config"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init(&ExperimentConfig::defaults))
      .def_readwrite("models", &ExperimentConfig::models)
      .def_readwrite("kind", &ExperimentConfig::kind)
      .def_readwrite("nt", &ExperimentConfig::nt)
      .def_readwrite("horizon", &ExperimentConfig::horizon)
      .def_readwrite("ld_sampling", &ExperimentConfig::ld_sampling)
      .def_readwrite("noise_sweep", &ExperimentConfig::noise_sweep)
      .def_readwrite("strategies", &ExperimentConfig::strategies)
      .def_readwrite("runs", &ExperimentConfig::runs)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def("to_json", &config_to_json)
      .def_static("from_json", &config_from_json, py::arg("text"));
  py::class_<ErrorStatsCell>(m, "ErrorStatsCell")
      .def_readonly("model_idx", &ErrorStatsCell::model_idx)
      .def_readonly("omega_true", &ErrorStatsCell::omega_true)
      .def_readonly("gamma_true", &ErrorStatsCell::gamma_true)
      .def_readonly("noise", &ErrorStatsCell::noise)
      .def_readonly("strategy", &ErrorStatsCell::strategy)
      .def_readonly("e_omega", &ErrorStatsCell::e_omega)
      .def_readonly("e_gamma", &ErrorStatsCell::e_gamma)
      .def_readonly("bias_omega", &ErrorStatsCell::bias_omega)
      .def_readonly("bias_gamma", &ErrorStatsCell::bias_gamma)
      .def_readonly("std_omega", &ErrorStatsCell::std_omega)
      .def_readonly("std_gamma", &ErrorStatsCell::std_gamma)
      .def_readonly("n_failed", &ErrorStatsCell::n_failed);
  py::class_<ErrorStats>(m, "ErrorStats").def_readonly("cells", &ErrorStats::cells);
  m.def("run_comparison", &run_comparison, py::arg("config"));

#ifdef TLSFIT_VERSION
  m.attr("__version__") = TLSFIT_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
