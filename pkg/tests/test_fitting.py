import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import brentq

from driveline import acceptance, coupling, designs, dynamics, fitting
from driveline.coupling import LossChannels, TransmonParams
from driveline.errors import DegenerateFitError, FitStageError

seeds = st.integers(0, 2**32 - 1)
LOSS = LossChannels(tan_delta=3e-6, temperature=0.02)


# --------------------------------------------------------------------------
# exact recovery


def test_exponential_decay_exact():
    t = np.linspace(0, 40e-6, 101)
    res = fitting.fit("exponential_decay", t, np.exp(-t / 7.446e-6))
    assert res["t1"] == pytest.approx(7.446e-6, rel=1e-6)
    assert res.converged


def test_decaying_cosine_exact():
    t = np.linspace(0, 400e-9, 401)
    y = 0.5 + 0.5 * np.exp(-t / 2e-6) * np.cos(2 * math.pi * 13e6 * t + 0.4)
    res = fitting.fit("decaying_cosine", t, y)
    assert res["frequency"] == pytest.approx(13e6, rel=1e-9)
    assert res["decay_rate"] == pytest.approx(5e5, rel=1e-6)


def test_flux_arch_exact():
    p = [7.64e9, 234.5e6, 0.03]
    x = np.linspace(-0.4, 0.4, 41)
    res = fitting.fit("flux_arch", x, fitting.get_model("flux_arch")(x, p))
    np.testing.assert_allclose(res.values, p, rtol=1e-8, atol=1e-10)


def test_polynomial_exact():
    x = np.linspace(-1, 1, 11)
    res = fitting.fit("polynomial(2)", x, 1 - 2 * x + 3 * x**2)
    np.testing.assert_allclose(res.values, [1, -2, 3], atol=1e-12)


def test_constant_lorentzian_is_degenerate():
    with pytest.raises(DegenerateFitError):
        fitting.fit("lorentzian", np.linspace(-1, 1, 51), np.full(51, 0.7))


def test_fit_input_checks():
    with pytest.raises(ValueError):
        fitting.fit("lorentzian", [0, 1, 2], [0, 1, 2])
    with pytest.raises(ValueError):
        fitting.fit("exponential_decay", np.arange(5.0), [1, 2, np.nan, 4, 5])
    with pytest.raises(ValueError):
        fitting.get_model("gaussian")


def test_iteration_cap_is_flagged():
    t = np.linspace(0, 1, 301)
    y = np.exp(-t / 0.3) * np.cos(2 * math.pi * 7 * t)
    res = fitting.fit("decaying_cosine", t, y, initial=[2.0, 0.0, 0.1, 0.0, 0.5], max_iter=2)
    assert not res.converged
    assert res.iterations <= 2


def test_levenberg_marquardt_rosenbrock():
    def r(p):
        return np.array([10 * (p[1] - p[0] ** 2), 1 - p[0]])

    def j(p):
        return np.array([[-20 * p[0], 10.0], [-1.0, 0.0]])

    p, *_, ok = fitting.levenberg_marquardt(r, j, np.array([-1.2, 1.0]))
    np.testing.assert_allclose(p, [1, 1], atol=1e-10)
    assert ok


@given(seeds)
def test_exact_recovery(seed):
    name, p, x = acceptance.random_fit_case(np.random.default_rng(seed))
    res = fitting.fit(name, x, fitting.get_model(name)(x, p))
    scale = np.maximum(np.abs(p), 1.0 if name != "flux_arch" else 1e-3)
    assert np.max(np.abs(res.values - p) / scale) <= 1e-6


# --------------------------------------------------------------------------
# power laws


def test_stark_rabi_scaling():
    v = np.linspace(0.2, 1.0, 8)
    sf = fitting.fit_stark_rabi_scaling(v, -73e6 * v**2, 43e6 * v**3)
    assert sf.c2 == pytest.approx(-73e6, rel=1e-12)
    assert sf.c3 == pytest.approx(43e6, rel=1e-6)
    assert sf.stark_residual < 1e-12 and sf.rabi_residual < 1e-12


def test_zero_stark_column():
    v = np.linspace(0.2, 1.0, 8)
    sf = fitting.fit_stark_rabi_scaling(v, np.zeros(8), 43e6 * v**3)
    assert sf.c2 == 0.0
    assert sf.stark_residual == 0.0


def test_wrong_power_law_leaves_residual():
    v = np.linspace(0.1, 1.0, 10)
    sf = fitting.fit_stark_rabi_scaling(v, -73e6 * v**2, 43e6 * v**2)
    assert sf.rabi_residual > 0.05


def test_scaling_needs_four_points():
    with pytest.raises(ValueError):
        fitting.fit_stark_rabi_scaling([1, 2, 3], [1, 4, 9], [1, 8, 27])


# --------------------------------------------------------------------------
# synthetic data and uncertainties


def test_noise_free_trace_is_the_model():
    x = np.linspace(-1, 1, 21)
    p = [0.1, 0.3, 1.0, 0.2]
    np.testing.assert_array_equal(fitting.synthesize_trace("lorentzian", p, x), fitting.get_model("lorentzian")(x, p))


def test_seeded_traces_are_identical():
    x = np.linspace(-1, 1, 101)
    a = fitting.synthesize_trace("lorentzian", [0, 0.3, 1, 0], x, 0.05, seed=42)
    b = fitting.synthesize_trace("lorentzian", [0, 0.3, 1, 0], x, 0.05, seed=42)
    assert a.tobytes() == b.tobytes()
    c = fitting.synthesize_trace("lorentzian", [0, 0.3, 1, 0], x, 0.05, seed=43)
    assert not np.array_equal(a, c)


def test_lorentzian_coverage():
    x = np.linspace(-3, 3, 201)
    p = [0.2, 0.5, 1.0, 0.1]
    hits = 0
    for seed in range(200):
        y = fitting.synthesize_trace("lorentzian", p, x, 0.02, seed)
        res = fitting.fit("lorentzian", x, y)
        hits += abs(res["center"] - p[0]) <= 3 * res.uncertainties["center"]
    assert hits >= 190


def test_uncertainty_scales_with_root_n():
    p = [0.2, 0.5, 1.0, 0.1]
    ns = (50, 200, 800)
    sig = []
    for n in ns:
        x = np.linspace(-3, 3, n)
        vals = [fitting.fit("lorentzian", x, fitting.synthesize_trace("lorentzian", p, x, 0.02, s))
                .uncertainties["center"] for s in range(20)]
        sig.append(np.mean(vals))
    for n, s in zip(ns, sig):
        assert s * math.sqrt(n) == pytest.approx(sig[0] * math.sqrt(ns[0]), rel=0.2)


# --------------------------------------------------------------------------
# characterisation sequence


def stopband_device(netlist, g=30e6):
    p = TransmonParams.from_frequency(6e9, 233e6, f_max=6e9)
    return fitting.DeviceModel(p, 6.9e9, g, 2e6, LOSS, netlist)


def bias_for(p, f_q):
    return brentq(lambda x: dynamics.flux_to_frequency(p, x) - f_q, 0.0, 0.45)


def test_noise_free_sequence_is_exact():
    dev = stopband_device(designs.standard_drive())
    phi = 0.2
    rep = fitting.emulate_characterization_sequence(dev, phi, 0.0)
    p = dynamics.params_at_flux(dev.params, phi)
    assert rep.f_q == pytest.approx(p.f_q, rel=1e-12)
    assert rep.f_r == pytest.approx(dev.f_r + dev.g**2 / (dev.f_r - p.f_q), rel=1e-12)
    gamma = coupling.gamma_from_netlist(dev.netlist, p.f_q, p.c_q)
    assert rep.f_rabi == pytest.approx(coupling.rabi_from_admittance(gamma, p.f_q, 50.0, dev.v_drive), rel=1e-3)
    assert rep.t1 == pytest.approx(coupling.t1_total(rep.t1_components.values()), rel=1e-9)


def test_sweet_spot_of_q2_like_device():
    q2 = TransmonParams.from_frequency(7.852e9, 234e6, f_max=7.852e9)
    dev = fitting.DeviceModel(q2, 6.97e9, 70e6, 2e6, LOSS, designs.standard_drive())
    rep = fitting.emulate_characterization_sequence(dev, 0.0, 0.01, seed=1)
    assert abs(rep.f_q - 7.852e9) <= dev.linewidth


def test_stopband_bias_is_dielectric_limited():
    dev = stopband_device(designs.lambda4_filter())
    rep = fitting.emulate_characterization_sequence(dev, bias_for(dev.params, 5e9), 0.01, seed=3)
    assert rep.t1_components["ext"] > 1.0
    assert rep.t1 == pytest.approx(rep.t1_components["dielectric"], rel=0.05)
    assert rep.t1 == pytest.approx(10e-6, rel=0.05)


def test_sequence_is_deterministic():
    dev = stopband_device(designs.standard_drive())
    a = fitting.emulate_characterization_sequence(dev, 0.2, 0.01, seed=5)
    b = fitting.emulate_characterization_sequence(dev, 0.2, 0.01, seed=5)
    assert a == b


def test_undriveable_qubit_reports_zero_rabi():
    rep = fitting.emulate_characterization_sequence(stopband_device(None), 0.2, 0.0)
    assert rep.f_rabi == 0.0
    assert rep.t1_components["ext"] == math.inf


def test_failed_stage_is_named():
    dev = stopband_device(designs.standard_drive())
    with pytest.raises(FitStageError, match="stage"):
        fitting.emulate_characterization_sequence(dev, 0.2, 1e6)
