import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from driveline import acceptance, constants, designs, network
from driveline.errors import NumericRangeError, TopologyError
from driveline.network import Element, FrequencyGrid, Netlist, Port

EPS = 6.45
F0 = 5e9
QUARTER = constants.c / (F0 * math.sqrt(EPS)) / 4

seeds = st.integers(0, 2**32 - 1)


def one_port(*els, node="a", z=50.0):
    return Netlist(tuple(els), (Port(1, node, z),))


# --------------------------------------------------------------------------
# line two-port


def test_quarter_wave_abcd():
    m = network.tline_two_port(50.0, EPS, QUARTER, 0.0, F0)
    assert abs(m[0, 0]) < 1e-12 and abs(m[1, 1]) < 1e-12
    assert m[0, 1] == pytest.approx(50j, rel=1e-12)
    assert m[1, 0] == pytest.approx(1j / 50, rel=1e-12)


def test_eighth_wave_abcd():
    m = network.tline_two_port(50.0, EPS, QUARTER / 2, 0.0, F0)
    assert m[0, 0] == pytest.approx(0.70711, abs=1e-5)
    assert m[0, 1] == pytest.approx(35.355j, abs=1e-3)
    assert m[1, 0] == pytest.approx(0.0141421j, abs=1e-7)
    assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-12)


def test_zero_length_is_identity():
    m = network.tline_two_port(50.0, EPS, 0.0, 0.0, np.array([1e9, 5e9]))
    np.testing.assert_allclose(m, np.broadcast_to(np.eye(2), (2, 2, 2)), atol=0)


def test_overflowing_loss_raises():
    with pytest.raises(NumericRangeError):
        network.tline_two_port(50.0, EPS, 1.0, 1e5, 5e9)


@given(seeds)
def test_lossy_abcd_is_reciprocal(seed):
    rng = np.random.default_rng(seed)
    f = rng.uniform(1e8, 2e10, 4)
    m = network.tline_two_port(rng.uniform(10, 120), rng.uniform(1, 12), rng.uniform(0, 0.05),
                               rng.uniform(0, 50), f)
    np.testing.assert_allclose(np.linalg.det(m), 1.0, atol=1e-9)


# --------------------------------------------------------------------------
# stamps


def test_shunt_capacitor_stamp():
    net = one_port(Element.capacitor("a", "0", 1e-12))
    y = network.assemble_admittance_matrix(net, 1e9)
    assert y.nodes == ["a"]
    assert y.y[0, 0] == pytest.approx(6.2832e-3j, rel=1e-4)


def test_series_capacitor_stamp():
    net = Netlist((Element.capacitor("a", "b", 1e-12),), (Port(1, "a"), Port(2, "b")))
    y = network.assemble_admittance_matrix(net, 1e9).y
    yc = 2j * math.pi * 1e9 * 1e-12
    np.testing.assert_allclose(y, [[yc, -yc], [-yc, yc]], rtol=1e-12)


def test_line_stamp_at_eighth_wave():
    net = Netlist((Element.tline("a", "b", 50.0, EPS, QUARTER / 2),), (Port(1, "a"), Port(2, "b")))
    y = network.assemble_admittance_matrix(net, F0).y
    assert y[0, 0] == pytest.approx(-0.02j, abs=1e-9)
    assert y[0, 1] == pytest.approx(0.0282843j, abs=1e-7)
    np.testing.assert_allclose(y, y.T, atol=0)


def test_pole_shift_is_flagged():
    net = Netlist((Element.tline("a", "b", 50.0, EPS, 2 * QUARTER),), (Port(1, "a"), Port(2, "b")))
    m = network.assemble_admittance_matrix(net, np.array([4e9, F0]))
    assert list(m.shifted) == [False, True]
    assert np.all(np.isfinite(m.y))


# --------------------------------------------------------------------------
# S-parameters and driving-point admittance


def test_matched_load_does_not_reflect():
    res = network.s_parameters(one_port(Element.resistor("a", "0", 50.0)), FrequencyGrid.linspace(1e9, 2e9, 3))
    np.testing.assert_allclose(res.s[:, 0, 0], 0, atol=1e-15)


def test_open_lossless_stub_reflects_fully():
    net = one_port(Element.tline("a", "b", 50.0, EPS, 0.013), Element.capacitor("a", "0", 1e-15))
    res = network.s_parameters(net, FrequencyGrid.linspace(1e9, 10e9, 101))
    np.testing.assert_allclose(np.abs(res.s[:, 0, 0]), 1.0, atol=1e-12)


def test_standard_line_transmission_at_5ghz():
    res = network.s_parameters(designs.standard_drive(), FrequencyGrid(np.array([F0])), {3: "grounded"})
    assert res.s_db(2, 1)[0] == pytest.approx(-72.0, abs=3.0)


def test_resistor_driving_point():
    y = network.driving_point_admittance(one_port(Element.resistor("a", "0", 50.0)), 1, {},
                                         FrequencyGrid(np.array([1e9])))
    assert y[0] == pytest.approx(0.02)


def test_shorted_eighth_wave_driving_point():
    # a shorted line of electrical length pi/4 presents -j/Z0; an open one +j/Z0
    net = one_port(Element.tline("a", "b", 50.0, EPS, QUARTER / 2))
    grid = FrequencyGrid(np.array([F0]))
    y_open = network.driving_point_admittance(net, 1, {}, grid)[0]
    assert y_open == pytest.approx(0.02j, abs=1e-9)
    shorted = Netlist(net.elements, net.ports, frozenset({"0", "b"}))
    assert network.driving_point_admittance(shorted, 1, {}, grid)[0] == pytest.approx(-0.02j, abs=1e-9)


def test_lambda4_conductance_minimum_near_design_frequency():
    net = designs.lambda4_filter()
    f_min, g_min = network.minimum_conductance(net, 2, {1: "matched", 3: "grounded"}, 4.5e9, 5.5e9)
    assert abs(f_min - F0) < 50e6
    assert g_min > 0


def test_lossless_filter_null_is_deep():
    net = designs.lambda4_filter(atten=0.0)
    terms = {1: "matched", 3: "grounded"}
    g2 = np.real(network.driving_point_admittance(net, 2, terms, FrequencyGrid(np.array([2e9]))))[0]
    _, g_null = network.minimum_conductance(net, 2, terms, 4.9e9, 5.1e9)
    assert g_null < g2 * 1e-6


def test_zero_length_line_merges_nodes():
    a = one_port(Element.tline("a", "b", 50.0, EPS, 0.0), Element.resistor("b", "0", 25.0))
    b = one_port(Element.resistor("a", "0", 25.0))
    grid = FrequencyGrid(np.array([1e9, 3e9]))
    np.testing.assert_allclose(network.s_parameters(a, grid).s, network.s_parameters(b, grid).s, atol=1e-15)


def test_subdivision_is_exact():
    net = Netlist((Element.tline("a", "b", 35.0, EPS, 0.03, 3.0), Element.resistor("b", "0", 80.0)),
                  (Port(1, "a"),))
    fine = network.subdivide(net, 10e9)
    assert len(fine.elements) > len(net.elements)
    grid = FrequencyGrid.linspace(1e9, 3e9, 7)
    y_whole = network.assemble_admittance_matrix(net, grid.freqs).y
    reduced = network._schur(y_whole, [0])
    np.testing.assert_allclose(network.port_admittance(net, grid), reduced, rtol=1e-9)


# --------------------------------------------------------------------------
# stopbands and asymmetry


def test_constant_admittance_has_no_stopband():
    grid = FrequencyGrid.linspace(4e9, 6e9, 11)
    res = network.FrequencySweepResult(grid, np.zeros((11, 1, 1)), np.full(11, 1e-9 + 0j))
    assert network.find_stopband(res, 83e-15, 1e-3) == []


def test_stopband_edges_are_interpolated():
    grid = FrequencyGrid(np.array([1.0, 2.0, 3.0, 4.0, 5.0]))
    g = np.array([1.0, 0.01, 1e-4, 0.01, 1.0]) + 0j
    res = network.FrequencySweepResult(grid, np.zeros((5, 1, 1)), g)
    (centre, width), = network.find_stopband(res, 1.0, 10.0)
    assert centre == pytest.approx(3.0)
    assert width == pytest.approx(2 * (1 + 0.5))


def test_symmetric_lambda2_has_one_stopband():
    (_, mins), = network.asymmetry_scan(designs.lambda2_filter(), designs.C_D_LAMBDA2 / 2, [0.0])
    assert len(mins) == 1
    assert network.asymmetry_splitting(designs.lambda2_filter(), designs.C_D_LAMBDA2 / 2, [0.0]) == [(0.0, 0.0)]


def test_asymmetry_splits_the_stopband():
    (off, split), = network.asymmetry_splitting(designs.lambda2_filter(), designs.C_D_LAMBDA2 / 2, [0.012])
    assert split == pytest.approx(493e6, rel=0.02)


def test_asymmetry_offset_range():
    with pytest.raises(ValueError):
        network.asymmetry_scan(designs.lambda2_filter(), 4.6e-15, [0.6])


# --------------------------------------------------------------------------
# errors


def test_floating_island_is_rejected():
    net = Netlist((Element.resistor("a", "0", 50.0), Element.capacitor("x", "y", 1e-15)), (Port(1, "a"),))
    with pytest.raises(TopologyError, match="floating"):
        network.s_parameters(net, FrequencyGrid(np.array([1e9])))


def test_port_on_ground_is_rejected():
    with pytest.raises(TopologyError):
        Netlist((Element.resistor("a", "0", 50.0),), (Port(1, "0"),))


@pytest.mark.parametrize("kw", [dict(z0=-1.0), dict(eps_eff=0.5), dict(length=-1e-3), dict(atten=float("nan"))])
def test_line_parameter_validation(kw):
    args = dict(z0=50.0, eps_eff=EPS, length=1e-3, atten=0.0) | kw
    with pytest.raises(ValueError):
        Element.tline("a", "b", **args)


def test_grid_validation():
    for bad in ([], [0.0], [2.0, 1.0], [1.0, float("inf")]):
        with pytest.raises(ValueError):
            FrequencyGrid(np.array(bad))


# --------------------------------------------------------------------------
# randomized properties


@given(seeds)
def test_reciprocity(seed):
    rng = np.random.default_rng(seed)
    s = network.s_parameters(acceptance.random_netlist(rng), acceptance.random_grid(rng)).s
    np.testing.assert_allclose(s, np.swapaxes(s, 1, 2), atol=1e-9)


@given(seeds)
def test_lossless_unitarity(seed):
    rng = np.random.default_rng(seed)
    s = network.s_parameters(acceptance.random_netlist(rng, lossless=True), acceptance.random_grid(rng)).s
    eye = np.eye(s.shape[1])
    np.testing.assert_allclose(np.conj(np.swapaxes(s, 1, 2)) @ s, np.broadcast_to(eye, s.shape), atol=1e-9)


@given(seeds)
def test_passive_driving_point(seed):
    rng = np.random.default_rng(seed)
    net = acceptance.random_netlist(rng)
    at = int(rng.integers(1, len(net.ports) + 1))
    terms = {p.index: network.TERMINATIONS[int(rng.integers(3))] for p in net.ports if p.index != at}
    try:
        y = network.driving_point_admittance(net, at, terms, acceptance.random_grid(rng))
    except TopologyError:
        return
    assert np.min(np.real(y)) >= -1e-12


@given(seeds)
def test_cascade_matches_nodal_solver(seed):
    rng = np.random.default_rng(seed)
    stages = acceptance.random_chain(rng)
    grid = acceptance.random_grid(rng)
    a = network.abcd_to_s(network.cascade_abcd(stages, grid.freqs))
    b = network.s_parameters(network.chain_netlist(stages), grid).s
    np.testing.assert_allclose(a, b, atol=1e-9)
