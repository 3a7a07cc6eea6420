"""Simulation and estimation toolkit for two-level systems under dephasing.

The heavy lifting lives in the compiled extension ``tlsfit._core``; this
package re-exports its public surface.
"""

from ._core import (  # noqa: F401
    Box,
    CrbGap,
    ErrorStats,
    ErrorStatsCell,
    ExperimentConfig,
    FisherMatrix,
    FitResult,
    MeasurementTrace,
    ModelKind,
    NoiseSpec,
    PeakInfo,
    PosteriorSamples,
    RefineConfig,
    RefineMethod,
    SamplingSchedule,
    ScheduleOrigin,
    Spectrum,
    SpectrumKind,
    SystemParams,
    __version__,
    angles_from_alphas,
    average_traces,
    builtin_models,
    center_rescale,
    closed_form_peak,
    continuous_ft,
    crb_gap,
    default_omega_grid,
    default_search_box,
    dft,
    estimate_amplitudes,
    estimate_strategy1,
    estimate_strategy2,
    fisher_matrix,
    gaussian_sigma_from_ensemble,
    ideal_signal,
    ld_schedule,
    locate_peak,
    log_likelihood,
    parse_model_kind,
    phi_x3,
    refine_loop,
    run_comparison,
    sample_posterior,
    simulate_trace,
    trace_variance_schedule,
    strategy1,
    strategy2,
    strategy3,
    uniform_schedule,
    van_der_corput,
)
