"""Smoke tests for the tlsfit python bindings."""

import math

import pytest

import tlsfit


def test_builtin_models():
    models = tlsfit.builtin_models()
    assert len(models) == 10
    assert models[0] == (1.0, 0.1)
    assert models[6] == (0.2218, 0.1234)


def test_ideal_signal_values():
    params = tlsfit.SystemParams(omega=1.0, gamma=0.1)
    fid = tlsfit.ModelKind.FID
    assert tlsfit.ideal_signal(params, fid, 0.0) == pytest.approx(1.0)
    assert tlsfit.ideal_signal(params, fid, 30.0) == pytest.approx(
        math.exp(-3.0) * math.cos(30.0), rel=1e-12
    )


def test_phi_x3_critical_point():
    assert tlsfit.phi_x3(0.1, 0.2, 10.0) == pytest.approx(2.0 * math.exp(-1.0), rel=1e-12)


def test_simulation_is_deterministic():
    params = tlsfit.SystemParams(1.0, 0.1)
    times = tlsfit.uniform_schedule(50, 30.0)
    noise = tlsfit.NoiseSpec.gaussian(0.05)
    a = tlsfit.simulate_trace(params, tlsfit.ModelKind.FID, times, noise, 42)
    b = tlsfit.simulate_trace(params, tlsfit.ModelKind.FID, times, noise, 42)
    assert a.values == b.values
    assert len(a) == 50


def test_closed_form_round_trip():
    for omega, gamma in tlsfit.builtin_models():
        peak = tlsfit.closed_form_peak(omega, gamma)
        om2, ga2 = tlsfit.strategy2(peak)
        assert om2 == pytest.approx(omega, rel=1e-9)
        assert ga2 == pytest.approx(gamma, rel=1e-9)


def test_strategy3_noiseless_recovery():
    params = tlsfit.SystemParams(1.0, 0.1)
    times = tlsfit.uniform_schedule(100, 30.0)
    trace = tlsfit.simulate_trace(
        params, tlsfit.ModelKind.FID, times, tlsfit.NoiseSpec.none(), 0
    )
    fit = tlsfit.strategy3(trace, tlsfit.ModelKind.FID)
    assert fit.omega == pytest.approx(1.0, rel=1e-6)
    assert fit.gamma == pytest.approx(0.1, rel=1e-6)
    assert fit.theta_i_est == pytest.approx(math.pi / 2, abs=1e-3)


def test_noisy_estimate_is_reasonable():
    params = tlsfit.SystemParams(1.0, 0.1)
    times = tlsfit.uniform_schedule(100, 30.0)
    trace = tlsfit.simulate_trace(
        params, tlsfit.ModelKind.FID, times, tlsfit.NoiseSpec.gaussian(0.05), 7
    )
    fit = tlsfit.strategy3(trace, tlsfit.ModelKind.FID)
    assert fit.omega == pytest.approx(1.0, abs=0.05)
    assert fit.sigma_est == pytest.approx(0.05, rel=0.3)
    om1, ga1 = tlsfit.estimate_strategy1(trace)
    assert om1 == pytest.approx(1.0, abs=0.1)
    assert ga1 > 0


def test_van_der_corput_prefix():
    assert [tlsfit.van_der_corput(n) for n in range(1, 6)] == [
        0.5,
        0.25,
        0.75,
        0.125,
        0.625,
    ]


def test_fisher_and_crb():
    params = tlsfit.SystemParams(1.0, 0.1)
    times = tlsfit.uniform_schedule(100, 30.0)
    fi = tlsfit.fisher_matrix(params, times, 0.05)
    assert fi.i11 > 0 and fi.i22 > 0
    half = tlsfit.fisher_matrix(params, times, 0.1)
    assert half.i11 == pytest.approx(fi.i11 / 4, rel=1e-12)


def test_trace_json_round_trip():
    params = tlsfit.SystemParams(1.0, 0.1)
    times = tlsfit.uniform_schedule(10, 30.0)
    trace = tlsfit.simulate_trace(
        params, tlsfit.ModelKind.FID, times, tlsfit.NoiseSpec.projection(64), 3
    )
    back = tlsfit.MeasurementTrace.from_json(trace.to_json())
    assert back.values == trace.values
    assert back.seed == 3


def test_error_propagation():
    with pytest.raises(Exception):
        tlsfit.gaussian_sigma_from_ensemble(4)
    with pytest.raises(Exception):
        tlsfit.closed_form_peak(1.0, 10.0)


def test_refine_loop_with_python_callback():
    params = tlsfit.SystemParams(1.0, 0.1)

    def acquire(times):
        return tlsfit.simulate_trace(
            params, tlsfit.ModelKind.FID, times, tlsfit.NoiseSpec.none(), 0
        )

    cfg = tlsfit.RefineConfig()
    cfg.method = tlsfit.RefineMethod.LD_SAMPLING
    cfg.iterations = 3
    fits = tlsfit.refine_loop(
        tlsfit.ld_schedule(20, 8, 0, 30.0), tlsfit.ModelKind.FID, acquire, cfg
    )
    assert len(fits) == 3
    assert fits[-1].omega == pytest.approx(1.0, rel=1e-6)

