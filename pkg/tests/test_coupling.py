import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from driveline import coupling, designs
from driveline.coupling import LossChannels, TransmonParams
from driveline.errors import DivergenceError, PassivityError

P5 = TransmonParams.from_frequency(5e9, 233e6)


def test_transmon_from_frequency():
    assert P5.e_j == pytest.approx(14.69e9, rel=1e-3)
    assert P5.c_q == pytest.approx(83.1e-15, rel=1e-3)
    assert P5.alpha == -233e6


@pytest.mark.parametrize("kw", [
    dict(alpha=10e6), dict(e_j=233e6 * 10), dict(f_q=6e9), dict(c_q=50e-15),
])
def test_transmon_validation(kw):
    base = dict(f_q=P5.f_q, alpha=P5.alpha, e_c=P5.e_c, e_j=P5.e_j, c_q=P5.c_q)
    with pytest.raises(ValueError):
        TransmonParams(**(base | kw))


def test_decoupled_qubit():
    assert coupling.gamma_q(0.0, 83e-15) == 0.0
    assert coupling.t1_ext(0.0, 83e-15) == math.inf


def test_t1_ext_from_conductance():
    assert coupling.t1_ext(8.3e-11, 83e-15) == pytest.approx(1e-3, rel=1e-12)


def test_round_off_conductance_is_clamped():
    assert coupling.gamma_q(-1e-15, 83e-15) == 0.0


def test_passivity_violation():
    with pytest.raises(PassivityError):
        coupling.gamma_q(np.array([1e-9, -1e-9]), 83e-15)


def test_standard_drive_t1_ext():
    t1 = 1 / coupling.gamma_from_netlist(designs.standard_drive(), 5e9, designs.C_Q)
    assert 0.15e-3 <= t1 <= 0.6e-3


def test_gamma_from_netlist_shapes():
    net = designs.standard_drive()
    assert isinstance(coupling.gamma_from_netlist(net, 5e9, designs.C_Q), float)
    assert coupling.gamma_from_netlist(net, [4e9, 5e9], designs.C_Q).shape == (2,)


def test_analytic_rate():
    assert coupling.gamma_q_analytic(P5, 0.0) == 0.0
    g = coupling.gamma_q_analytic(P5, 80e-18)
    assert g == pytest.approx(3.99e3, rel=0.01)
    assert 1 / g == pytest.approx(0.25e-3, rel=0.02)


def test_analytic_matches_network_for_small_coupling():
    f = np.linspace(4e9, 6.5e9, 11)
    num = coupling.gamma_from_netlist(designs.standard_drive(), f, designs.C_Q)
    ana = [coupling.gamma_q_analytic(TransmonParams.from_frequency(fk, 233e6), 80e-18) for fk in f]
    np.testing.assert_allclose(num, ana, rtol=0.1)


@given(st.floats(1e-18, 1e-15), st.floats(4e9, 7e9))
def test_analytic_rate_is_quadratic_in_coupling(c_d, f_q):
    p = TransmonParams.from_frequency(f_q, 233e6)
    assert coupling.gamma_q_analytic(p, 2 * c_d) == pytest.approx(4 * coupling.gamma_q_analytic(p, c_d), rel=1e-12)


def test_rabi_voltage_conversion():
    assert coupling.rabi_from_admittance(1000.0, 5e9, 50.0, 0.0) == 0.0
    v = coupling.voltage_for_rabi(1000.0, 5e9, 50.0, 50e6)
    assert v == pytest.approx(9.04e-5, rel=2e-3)


def test_voltage_for_decoupled_qubit_diverges():
    with pytest.raises(DivergenceError):
        coupling.voltage_for_rabi(0.0, 5e9, 50.0, 50e6)


@given(st.floats(1e-2, 1e6), st.floats(1e9, 1e10), st.floats(1e-9, 1e-2))
def test_rabi_voltage_inverse(gamma, f, v):
    f_r = coupling.rabi_from_admittance(gamma, f, 50.0, v)
    assert coupling.voltage_for_rabi(gamma, f, 50.0, f_r) == pytest.approx(v, rel=1e-12)


@given(st.floats(1e-2, 1e6), st.floats(1e9, 1e10), st.floats(1e-9, 1e-2))
def test_rabi_is_linear_in_voltage_and_root_gamma(gamma, f, v):
    base = coupling.rabi_from_admittance(gamma, f, 50.0, v)
    assert coupling.rabi_from_admittance(gamma, f, 50.0, 2 * v) == pytest.approx(2 * base, rel=1e-12)
    assert coupling.rabi_from_admittance(4 * gamma, f, 50.0, v) == pytest.approx(2 * base, rel=1e-12)


def test_dielectric_limit():
    cold = coupling.t1_dielectric(P5, LossChannels(tan_delta=3e-6, temperature=1e-4))
    assert cold == pytest.approx(10.1e-6, rel=0.01)
    half = coupling.t1_dielectric(P5, LossChannels(tan_delta=1.5e-6, temperature=1e-4))
    assert half == pytest.approx(2 * cold, rel=1e-12)
    warm = coupling.t1_dielectric(P5, LossChannels(tan_delta=3e-6, temperature=0.02))
    assert 0 < 1 - warm / cold < 0.002
    assert coupling.t1_dielectric(P5, LossChannels()) == math.inf


def test_purcell():
    q1 = LossChannels(f_r=6.8913e9, kappa=2.076e6, g=72.455e6)
    assert coupling.t1_purcell(q1, 7.773e9) == pytest.approx(11.4e-6, rel=0.01)
    assert coupling.t1_purcell(LossChannels(f_r=6.8913e9, kappa=2.076e6, g=0.0), 7.773e9) == math.inf
    with pytest.raises(DivergenceError):
        coupling.t1_purcell(q1, 6.8913e9)
    with pytest.raises(ValueError):
        coupling.t1_purcell(LossChannels(), 7e9)


def test_total_t1():
    assert coupling.t1_total([7e-6]) == 7e-6
    assert coupling.t1_total([math.inf, 10e-6]) == pytest.approx(10e-6)
    assert coupling.t1_total([0.3e-3, 10.1e-6]) == pytest.approx(9.77e-6, rel=1e-3)
    assert coupling.t1_total([math.inf]) == math.inf
    with pytest.raises(ValueError):
        coupling.t1_total([0.0])


@given(st.lists(st.floats(1e-7, 1.0), min_size=1, max_size=6))
def test_total_t1_is_below_every_channel(ts):
    total = coupling.t1_total(ts)
    assert total <= min(ts) * (1 + 1e-12)
    assert total >= min(ts) / len(ts) * (1 - 1e-12)


def test_dispersive_shift_q3():
    p = TransmonParams.from_frequency(7.640e9, 234.52e6, alpha=-234.520e6)
    assert coupling.dispersive_shift(p, 0.0, 6.765e9) == 0.0
    assert coupling.dispersive_shift(p, 68.75e6, 6.765e9) == pytest.approx(-1.978e6, rel=0.005)


def test_dispersive_shift_q1():
    # The closed form gives -2.14 MHz for these parameters.
    p = TransmonParams.from_frequency(7.773e9, 232.916e6, alpha=-232.916e6)
    assert coupling.dispersive_shift(p, 72.455e6, 6.8913e9) == pytest.approx(-2.1375e6, rel=1e-3)


def test_dispersive_shift_poles():
    p = TransmonParams.from_frequency(7.0e9, 230e6)
    with pytest.raises(DivergenceError):
        coupling.dispersive_shift(p, 70e6, 7.0e9)
    with pytest.raises(DivergenceError):
        coupling.dispersive_shift(p, 70e6, 7.0e9 - 230e6)
