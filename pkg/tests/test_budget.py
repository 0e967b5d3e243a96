import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from driveline import acceptance, budget, constants, coupling, designs
from driveline.budget import AttenuationChain, GateBudget, Stage
from driveline.coupling import TransmonParams
from driveline.errors import DriveTooWeakError

seeds = st.integers(0, 2**32 - 1)
P5 = TransmonParams.from_frequency(5e9, 233e6)


# --------------------------------------------------------------------------
# chains


def test_chain_parse_and_format():
    chain = AttenuationChain.parse("4K:40dB@4K, MXC:20@0.01")
    assert chain.stages == (Stage("4K", 40.0, 4.0), Stage("MXC", 20.0, 0.01))
    assert chain.total_db == 60.0
    assert AttenuationChain.parse(chain.format()) == chain
    assert chain.cooling_monotone


@pytest.mark.parametrize("text", ["", "4K40@4", "4K:-3@4", "4K:3@0", "4K:x@4"])
def test_chain_parse_errors(text):
    with pytest.raises(ValueError):
        AttenuationChain.parse(text)


def test_warmer_stage_is_flagged():
    assert not AttenuationChain.parse("MXC:20@0.01,4K:40@4").cooling_monotone


# --------------------------------------------------------------------------
# thermal photons


def test_occupation_values():
    assert budget.bose_einstein_occupation(5e9, 0.01) == pytest.approx(3.8e-11, rel=0.05)
    assert budget.bose_einstein_occupation(5e9, 300.0) == pytest.approx(1250, rel=1e-3)
    t_one = constants.h * 5e9 / (constants.k_B * math.log(2))
    assert budget.bose_einstein_occupation(5e9, t_one) == pytest.approx(1.0, rel=1e-12)


def test_transparent_chain_passes_source_photons():
    chain = AttenuationChain((Stage("a", 0.0, 4.0), Stage("b", 0.0, 0.01)))
    assert budget.chain_photon_number(chain, 5e9) == pytest.approx(budget.bose_einstein_occupation(5e9, 300.0))


def test_single_cold_stage():
    n = budget.chain_photon_number(AttenuationChain.parse("MXC:60@0.01"), 5e9)
    assert n == pytest.approx(1.25e-3, rel=0.01)
    assert n < 2.5e-3


def test_distributed_43_db_chain():
    n = budget.chain_photon_number(AttenuationChain.parse(budget.PRIOR_WORK_CHAIN), 5e9)
    assert 0.145 / 2 <= n <= 0.145 * 2


@given(seeds)
def test_photons_fall_with_attenuation(seed):
    rng = np.random.default_rng(seed)
    stages = [Stage(f"s{k}", float(rng.uniform(0, 30)), float(t))
              for k, t in enumerate(np.sort(rng.uniform(0.005, 50, int(rng.integers(1, 5))))[::-1])]
    chain = AttenuationChain(tuple(stages))
    k = int(rng.integers(len(stages)))
    more = list(stages)
    more[k] = Stage(stages[k].label, stages[k].db + float(rng.uniform(0.1, 10)), stages[k].temperature)
    assert budget.chain_photon_number(AttenuationChain(tuple(more)), 5e9) <= \
        budget.chain_photon_number(chain, 5e9) * (1 + 1e-12)


@given(seeds)
def test_photons_rise_with_stage_temperature(seed):
    rng = np.random.default_rng(seed)
    db = float(rng.uniform(1, 30))
    t = float(rng.uniform(0.005, 4))
    cold = AttenuationChain((Stage("a", db, t),))
    warm = AttenuationChain((Stage("a", db, t * float(rng.uniform(1.01, 10))),))
    assert budget.chain_photon_number(warm, 5e9) >= budget.chain_photon_number(cold, 5e9)


@given(seeds)
def test_splitting_a_stage_is_invariant(seed):
    rng = np.random.default_rng(seed)
    db, t = float(rng.uniform(0, 60)), float(rng.uniform(0.005, 4))
    x = float(rng.uniform(0, 1))
    one = AttenuationChain((Stage("a", db, t),))
    two = AttenuationChain((Stage("a", x * db, t), Stage("b", (1 - x) * db, t)))
    f = float(rng.uniform(1e9, 10e9))
    assert budget.chain_photon_number(two, f) == pytest.approx(budget.chain_photon_number(one, f), rel=1e-12)


# --------------------------------------------------------------------------
# power and heat


def test_resonant_budget():
    g = GateBudget(10e-9, 1e3, "resonant")
    chain = AttenuationChain.parse(budget.DEFAULT_CHAIN)
    chip = budget.chip_power_dbm(g, 5e9)
    assert chip == pytest.approx(-70.9, abs=0.05)
    room = budget.required_room_temperature_power(g, chain, f_drive=5e9)
    assert room == pytest.approx(-10.9, abs=0.05)


def test_resonant_default_drive_frequency():
    g = GateBudget(10e-9, 1e3, "resonant", P5)
    chain = AttenuationChain.parse(budget.DEFAULT_CHAIN)
    assert budget.required_room_temperature_power(g, chain) == \
        budget.required_room_temperature_power(g, chain, f_drive=5e9)
    with pytest.raises(ValueError):
        budget.required_room_temperature_power(GateBudget(10e-9, 1e3), chain)


def test_subharmonic_budget_through_filters():
    # eta follows from the cubic law, Omega_R from eta at f_q/3 and the voltage
    # from the drive-line coupling there.
    pw4 = acceptance.subharmonic_budget("lambda4")
    pw2 = acceptance.subharmonic_budget("lambda2")
    assert pw4 == pytest.approx(-9.47, abs=0.05)
    assert pw2 == pytest.approx(-14.42, abs=0.05)
    g4 = coupling.gamma_from_netlist(designs.lambda4_filter(), P5.f_q / 3, designs.C_Q)
    g2 = coupling.gamma_from_netlist(designs.lambda2_filter(), P5.f_q / 3, designs.C_Q)
    assert pw4 - pw2 == pytest.approx(10 * math.log10(g2 / g4), abs=1e-9)


@given(st.floats(2e-9, 200e-9))
def test_halving_the_gate_costs_cubic_root_power(duration):
    chain = AttenuationChain.parse(budget.DEFAULT_CHAIN)
    a = GateBudget(duration, 1e4, "subharmonic", P5)
    b = GateBudget(duration / 2, 1e4, "subharmonic", P5)
    try:
        pa = budget.required_room_temperature_power(a, chain)
        pb = budget.required_room_temperature_power(b, chain)
    except DriveTooWeakError:
        return
    assert pb - pa == pytest.approx(20 * math.log10(2) / 3, abs=1e-9)


@given(st.floats(1e-9, 1e-6))
def test_halving_the_resonant_gate_costs_6_db(duration):
    chain = AttenuationChain.parse(budget.DEFAULT_CHAIN)
    pa = budget.required_room_temperature_power(GateBudget(duration, 1e3), chain, f_drive=5e9)
    pb = budget.required_room_temperature_power(GateBudget(duration / 2, 1e3), chain, f_drive=5e9)
    assert pb - pa == pytest.approx(20 * math.log10(2), abs=1e-9)


def test_unreachable_subharmonic_gate():
    g = GateBudget(0.1e-9, 1e4, "subharmonic", P5)
    with pytest.raises(DriveTooWeakError, match="eta"):
        budget.required_room_temperature_power(g, AttenuationChain.parse(budget.DEFAULT_CHAIN))


def test_gate_validation():
    with pytest.raises(ValueError):
        GateBudget(0.0, 1e3)
    with pytest.raises(ValueError):
        GateBudget(1e-8, 0.0)
    with pytest.raises(ValueError):
        GateBudget(1e-8, 1e3, "subharmonic")
    with pytest.raises(ValueError):
        GateBudget(1e-8, 1e3, "parametric")


def test_base_plate_heat():
    chain = AttenuationChain.parse(budget.DEFAULT_CHAIN)
    # 40 dB leaves -51 dBm entering the final stage, which keeps 99% of it.
    assert budget.base_plate_heat(-11.0, chain) == pytest.approx(-51.0 + 10 * math.log10(0.99), abs=1e-9)
    assert budget.base_plate_heat(-11.0, AttenuationChain.parse("4K:60@4,MXC:0@0.01")) == -math.inf


@given(st.floats(-40, 20), st.floats(0.1, 30), st.floats(0.1, 30))
def test_heat_follows_input_power(p_in, a, b):
    chain = AttenuationChain((Stage("a", a, 4.0), Stage("b", b, 0.01)))
    h1 = budget.base_plate_heat(p_in, chain)
    h2 = budget.base_plate_heat(p_in + 3.0, chain)
    assert h2 - h1 == pytest.approx(3.0, abs=1e-9)
    assert h1 < p_in - a
