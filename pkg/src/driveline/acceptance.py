"""Acceptance checks with pinned targets and tolerances.

Each ``criterion_N`` returns a list of :class:`Check` records, one per printed
line. The test suite asserts on them and ``driveline reproduce`` prints them.
Lines marked informational report context and never fail.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import budget, coupling, designs, dynamics, fitting, network, rfio
from .coupling import LossChannels, TransmonParams

# Reference device numbers used by several criteria.
E_C_REF = 233e6
F_STOP = 5e9
Q3 = dict(f_q=7.640e9, alpha=-234.520e6, g=68.75e6, f_r=6.7650e9)
Q1 = dict(f_q=7.773e9, alpha=-232.916e6, g=72.455e6, f_r=6.8913e9, kappa=2.076e6)
SUBHARMONIC_QUBIT = dict(f_q=5.6e9, e_c=234.52e6)
PROPERTY_CASES = 200
PROPERTY_SEED = 20240


@dataclass(frozen=True)
class Check:
    criterion: int
    label: str
    value: str
    target: str
    passed: bool
    informational: bool = False

    @property
    def status(self):
        if self.informational:
            return "INFO"
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        return f"[{self.status}] C{self.criterion} {self.label}: {self.value} (target {self.target})"


def _within(value, target, rel):
    return abs(value / target - 1) <= rel


# --------------------------------------------------------------------------
# 1-5: network and coupling


def criterion_1():
    net = designs.standard_drive()
    f = np.linspace(4e9, 6.5e9, 251)
    g_num = coupling.gamma_from_netlist(net, f, designs.C_Q)
    g_an = np.array([coupling.gamma_q_analytic(TransmonParams.from_frequency(fk, E_C_REF),
                                               designs.C_D_STANDARD) for fk in f])
    dev = float(np.max(np.abs(g_num / g_an - 1)))
    t1 = 1 / coupling.gamma_from_netlist(net, F_STOP, designs.C_Q)
    return [
        Check(1, "standard drive numeric vs analytic gamma, 4-6.5 GHz", f"max deviation {dev:.2%}",
              "<= 10%", dev <= 0.10),
        Check(1, "standard drive T1_ext at 5 GHz", f"{t1 * 1e3:.3f} ms", "0.15-0.6 ms",
              0.15e-3 <= t1 <= 0.6e-3),
    ]


def stopband_peak_t1(net, f_lo=4.5e9, f_hi=5.5e9):
    """Frequency and T1_ext at the conductance minimum of a filter netlist."""
    f, g = network.minimum_conductance(net, 2, coupling.drive_terminations(net), f_lo, f_hi)
    return f, coupling.t1_ext(g, designs.C_Q)


def criterion_2():
    std = designs.standard_drive()
    out = []
    for name, paper_t1 in (("lambda4", 7.161), ("lambda2", 2.421)):
        f, t1 = stopband_peak_t1(designs.DESIGNS[name]())
        t1_std = 1 / coupling.gamma_from_netlist(std, f, designs.C_Q)
        ratio = t1 / t1_std
        out.append(Check(2, f"{name} T1_ext enhancement at {f / 1e9:.4f} GHz", f"x{ratio:.3g}",
                         "> 1000", ratio > 1000))
        out.append(Check(2, f"{name} stopband T1_ext", f"{t1:.3g} s",
                         f"{paper_t1 / 10:.3g}-{paper_t1 * 10:.3g} s", paper_t1 / 10 <= t1 <= paper_t1 * 10))
    return out


def stopband_widths(name, f_lo=4e9, f_hi=6e9, n=4001, threshold=1e-3):
    net = designs.DESIGNS[name]()
    grid = network.FrequencyGrid.linspace(f_lo, f_hi, n)
    res = network.sweep(net, grid, at_port=2, terminations=coupling.drive_terminations(net))
    return network.find_stopband(res, designs.C_Q, threshold)


def criterion_3():
    out = []
    for name, paper_w in (("lambda4", 70e6), ("lambda2", 450e6)):
        bands = stopband_widths(name)
        w = max((b[1] for b in bands), default=0.0)
        out.append(Check(3, f"{name} width with T1_ext > 1 ms", f"{w / 1e6:.1f} MHz",
                         f"{paper_w / 2e6:.0f}-{paper_w * 2 / 1e6:.0f} MHz",
                         paper_w / 2 <= w <= paper_w * 2))
    return out


def passband_excess(name, f_lo=1e9, f_hi=2e9, n=201):
    """Smallest |S21| gain of a filter over the standard drive in dB."""
    grid = network.FrequencyGrid.linspace(f_lo, f_hi, n)

    def s21(net):
        res = network.s_parameters(net, grid, {3: "grounded"})
        return res.s_db(2, 1)

    return float(np.min(s21(designs.DESIGNS[name]()) - s21(designs.standard_drive())))


def criterion_4():
    return [Check(4, f"{name} |S21| excess over standard, 1-2 GHz", f"min {ex:.1f} dB", "> 30 dB", ex > 30)
            for name, ex in ((n, passband_excess(n)) for n in ("lambda4", "lambda2"))]


def symmetric_stopband_centre(grid=None):
    """Midpoint of the symmetric lambda/2 filter's transmission stopband."""
    grid = grid or network.FrequencyGrid.linspace(3e9, 7e9, 4001)
    res = network.s_parameters(designs.lambda2_filter(), grid, {3: "grounded"})
    bands = network.stopband_intervals(grid.freqs, res.s_db(2, 1))
    return min(bands, key=lambda b: abs(b[0] - F_STOP))[0]


ASYMMETRY_OFFSETS = (0.0, 0.005, 0.01, 0.012, 0.02, 0.03, 0.04, 0.049, 0.06)


def criterion_5():
    scan = network.asymmetry_scan(designs.lambda2_filter(), designs.C_D_LAMBDA2 / 2, ASYMMETRY_OFFSETS)
    split = {off: (abs(m[0] - m[1]) if len(m) >= 2 else 0.0) for off, m in scan}
    minima = dict(scan)
    s49 = split[0.049]
    values = [split[o] for o in ASYMMETRY_OFFSETS]
    monotone = all(b >= a for a, b in zip(values, values[1:]))
    centre = symmetric_stopband_centre()
    far = max(abs(f - centre) for f in minima[0.012][:2])
    return [
        Check(5, "splitting at 4.9% offset", f"{s49 / 1e6:.0f} MHz", "700-1300 MHz", 0.7e9 <= s49 <= 1.3e9),
        Check(5, "splitting monotone in offset", " ".join(f"{v / 1e6:.0f}" for v in values) + " MHz",
              "non-decreasing", monotone),
        Check(5, "1.2% offset minima around the symmetric centre",
              f"max |f - {centre / 1e9:.4f} GHz| = {far / 1e6:.1f} MHz", "<= 250 MHz", far <= 250e6),
    ]


# --------------------------------------------------------------------------
# 6-9: dynamics, fitting, closed forms and budget


def subharmonic_qubit():
    q = SUBHARMONIC_QUBIT
    return TransmonParams.from_frequency(q["f_q"], q["e_c"])


def criterion_6(etas=(0.1, 0.2, 0.3), d=5, model="kerr"):
    p = subharmonic_qubit()
    out = []
    for eta in etas:
        t0 = time.perf_counter()
        r = dynamics.subharmonic_resonance(p, eta, d, model)
        rabi = r.oscillation / r.predicted_rabi
        stark = r.stark / r.predicted_stark
        out.append(Check(6, f"eta={eta:g} lab-frame Rabi / closed form", f"{rabi:.4f}", "1 +- 0.05",
                         abs(rabi - 1) <= 0.05))
        out.append(Check(6, f"eta={eta:g} lab-frame Stark / closed form", f"{stark:.4f}", "1 +- 0.10",
                         abs(stark - 1) <= 0.10))
        out.append(Check(6, f"eta={eta:g} runtime", f"{time.perf_counter() - t0:.2f} s", "< 40 s",
                         True, informational=True))
    return out


def criterion_7():
    v = np.linspace(0.1, 1.0, 10)
    stark = -73e6 * v ** 2
    rabi = 43e6 * v ** 3
    sf = fitting.fit_stark_rabi_scaling(v, stark, rabi)
    worst = max(sf.stark_residual, sf.rabi_residual)
    coef = max(abs(sf.c2 / -73e6 - 1), abs(sf.c3 / 43e6 - 1))
    # a quadratic Rabi law must not pass the cubic test
    wrong = fitting.fit_stark_rabi_scaling(v, stark, 43e6 * v ** 2).rabi_residual
    return [
        Check(7, "Stark V^2 and Rabi V^3 residual norms", f"{sf.stark_residual:.1e}, {sf.rabi_residual:.1e}",
              "< 1%", worst < 0.01),
        Check(7, "recovered endpoint coefficients", f"{sf.c2 / 1e6:.3f} MHz, {sf.c3 / 1e6:.3f} MHz",
              "-73, 43 MHz within 1e-6", coef < 1e-6),
        Check(7, "cubic fit of quadratic data is rejected", f"residual {wrong:.1%}", ">= 1%", wrong >= 0.01),
    ]


def criterion_8():
    def chi(q):
        p = TransmonParams.from_frequency(q["f_q"], -q["alpha"], alpha=q["alpha"])
        return coupling.dispersive_shift(p, q["g"], q["f_r"])

    c3, c1 = chi(Q3), chi(Q1)
    p5 = TransmonParams.from_frequency(F_STOP, E_C_REF)
    t_diel = coupling.t1_dielectric(p5, LossChannels(tan_delta=3e-6, temperature=0.01))
    t_purc = coupling.t1_purcell(LossChannels(f_r=Q1["f_r"], kappa=Q1["kappa"], g=Q1["g"]), Q1["f_q"])
    return [
        Check(8, "Q3 dispersive shift", f"{c3 / 1e6:.4f} MHz", "-1.978 MHz +- 0.5%", _within(c3, -1.978e6, 0.005)),
        Check(8, "Q1 dispersive shift", f"{c1 / 1e6:.4f} MHz", "-2.300 MHz +- 2%", _within(c1, -2.300e6, 0.02)),
        Check(8, "dielectric T1 at tan_delta 3e-6, 5 GHz", f"{t_diel * 1e6:.3f} us", "10.1 us +- 5%",
              _within(t_diel, 10.1e-6, 0.05)),
        Check(8, "Q1 Purcell T1", f"{t_purc * 1e6:.3f} us", "11.4 us +- 1%", _within(t_purc, 11.4e-6, 0.01)),
    ]


def subharmonic_budget(name, duration=10e-9, chain=budget.DEFAULT_CHAIN):
    """Room-temperature power of a subharmonic pi pulse through a filter design."""
    p = TransmonParams.from_frequency(F_STOP, E_C_REF)
    f_d = p.f_q / 3
    gamma = coupling.gamma_from_netlist(designs.DESIGNS[name](), f_d, designs.C_Q)
    g = budget.GateBudget(duration, gamma, "subharmonic", p)
    return budget.required_room_temperature_power(g, budget.AttenuationChain.parse(chain), f_drive=f_d)


def resonant_budget(duration=10e-9, t1_ext=1e-3, chain=budget.DEFAULT_CHAIN):
    g = budget.GateBudget(duration, 1 / t1_ext, "resonant")
    return budget.required_room_temperature_power(g, budget.AttenuationChain.parse(chain), f_drive=F_STOP)


def criterion_9():
    chain = budget.AttenuationChain.parse(budget.DEFAULT_CHAIN)
    alt = budget.AttenuationChain.parse("4K:42@4,MXC:20@0.01")
    res = resonant_budget()
    out = [Check(9, "resonant 10 ns gate, T1_ext 1 ms, 60 dB", f"{res:.2f} dBm", "-11 +- 0.5 dBm",
                 abs(res + 11) <= 0.5)]
    for name, target in (("lambda4", -16.0), ("lambda2", -22.0)):
        pw = subharmonic_budget(name)
        out.append(Check(9, f"{name} subharmonic 10 ns gate, 60 dB", f"{pw:.2f} dBm", f"{target:g} +- 5 dBm",
                         abs(pw - target) <= 5))
        out.append(Check(9, f"{name} power with eta taken from half the Rabi rate",
                         f"{pw - 20 * math.log10(2):.2f} dBm", f"{target:g} dBm", True, informational=True))
    for p_in, target in ((-11, -53), (-16, -58), (-22, -64)):
        h = budget.base_plate_heat(p_in, chain)
        out.append(Check(9, f"base-plate heat for {p_in} dBm, 40/20 split", f"{h:.2f} dBm",
                         f"{target} +- 1 dBm", abs(h - target) <= 1))
    for p_in, target in ((-11, -53), (-16, -58), (-22, -64)):
        h = budget.base_plate_heat(p_in, alt)
        out.append(Check(9, f"base-plate heat for {p_in} dBm, 42/20 split", f"{h:.2f} dBm", f"{target} dBm",
                         True, informational=True))
    n60 = budget.chain_photon_number(budget.AttenuationChain.parse("MXC:60@0.01"), F_STOP)
    n43 = budget.chain_photon_number(budget.AttenuationChain.parse(budget.PRIOR_WORK_CHAIN), F_STOP)
    out.append(Check(9, "photons after one 60 dB stage at 10 mK", f"{n60:.3e}", "< 2.5e-3", n60 < 2.5e-3))
    out.append(Check(9, f"photons after 43 dB chain {budget.PRIOR_WORK_CHAIN}", f"{n43:.4f}",
                     "0.145 within x2", 0.145 / 2 <= n43 <= 0.145 * 2))
    return out


# --------------------------------------------------------------------------
# 10: randomized property battery


def random_netlist(rng, lossless=False, n_ports=None):
    """A connected random netlist with 1-3 ports."""
    k = int(rng.integers(2, 6))
    nodes = [f"n{i}" for i in range(k)]

    def element(a, b):
        kinds = ["C", "L", "TL"] if lossless else ["C", "L", "TL", "R"]
        kind = kinds[int(rng.integers(len(kinds)))]
        if kind == "TL":
            return network.Element.tline(a, b, float(rng.uniform(20, 100)), float(rng.uniform(1, 12)),
                                         float(rng.uniform(0, 0.02)),
                                         0.0 if lossless else float(rng.uniform(0, 5)))
        value = {"C": lambda: 10 ** rng.uniform(-15, -12), "L": lambda: 10 ** rng.uniform(-10, -8),
                 "R": lambda: 10 ** rng.uniform(0, 3)}[kind]()
        return network.Element(kind, a, b, value=float(value))

    els = [element(nodes[i], nodes[i + 1]) for i in range(k - 1)]
    els += [element(n, "0") for n in nodes if rng.random() < 0.7]
    if not any("0" in (e.n1, e.n2) for e in els):
        els.append(element(nodes[0], "0"))
    for _ in range(int(rng.integers(0, 3))):
        a, b = rng.choice(k, 2, replace=False)
        els.append(element(nodes[a], nodes[b]))
    n_ports = n_ports or int(rng.integers(1, min(3, k) + 1))
    picks = rng.choice(k, n_ports, replace=False)
    ports = tuple(network.Port(i + 1, nodes[j], float(rng.uniform(25, 75))) for i, j in enumerate(picks))
    return network.Netlist(tuple(els), ports, frozenset({"0"}))


def random_grid(rng, n=5):
    return network.FrequencyGrid(np.unique(np.sort(rng.uniform(0.5e9, 10e9, n))))


def random_chain(rng):
    stages = []
    for _ in range(int(rng.integers(1, 6))):
        r = rng.random()
        if r < 0.4:
            stages.append(("tline", float(rng.uniform(20, 100)), float(rng.uniform(1, 12)),
                           float(rng.uniform(0, 0.02)), float(rng.uniform(0, 5))))
        else:
            kind = ["C", "L", "R"][int(rng.integers(3))]
            value = {"C": 10 ** rng.uniform(-14, -11), "L": 10 ** rng.uniform(-10, -8),
                     "R": 10 ** rng.uniform(0, 3)}[kind]
            stages.append(("series" if r < 0.7 else "shunt", kind, float(value)))
    if not any(s[0] in ("tline", "series") for s in stages):
        stages.append(("series", "C", 1e-13))
    return stages


def random_fit_case(rng):
    """(model name, true parameters, x) for exact-recovery checks."""
    name = ["lorentzian", "decaying_cosine", "exponential_decay", "flux_arch"][int(rng.integers(4))]
    if name == "lorentzian":
        p = [rng.uniform(-1, 1), rng.uniform(0.1, 0.5), rng.choice([-1, 1]) * rng.uniform(0.5, 2),
             rng.uniform(-1, 1)]
        x = np.linspace(-3, 3, 201)
    elif name == "decaying_cosine":
        p = [rng.uniform(3, 10), rng.uniform(0, 3), rng.uniform(0.3, 1), rng.uniform(-2.5, 2.5),
             rng.uniform(-0.5, 0.5)]
        x = np.linspace(0, 1, 301)
    elif name == "exponential_decay":
        p = [rng.uniform(0.5, 2), rng.uniform(0.2, 1), rng.uniform(-0.2, 0.2)]
        x = np.linspace(0, 3, 101)
    else:
        off = rng.uniform(-0.1, 0.1)
        p = [rng.uniform(5e9, 8e9), rng.uniform(1.8e8, 3e8), off]
        x = np.linspace(-0.4, 0.4, 41) + off
    return name, np.array(p, dtype=float), x


def random_transmon(rng):
    return TransmonParams.from_frequency(float(rng.uniform(4e9, 7e9)), float(rng.uniform(1.8e8, 3e8)))


def random_generator(rng):
    p = random_transmon(rng)
    d = int(rng.integers(3, 7))
    frame = dynamics.FRAMES[int(rng.integers(3))]
    env = "cosine" if rng.random() < 0.5 else "rectangular"
    if frame == "lab":
        pulse = dynamics.PulseSpec(p.f_q * rng.uniform(0.95, 1.05), float(rng.uniform(1e6, 5e7)),
                                   float(rng.uniform(0, 2 * math.pi)), 2e-9, env, 0.25)
    elif frame == "rotating-resonant":
        pulse = dynamics.PulseSpec(p.f_q + rng.uniform(-2e7, 2e7), float(rng.uniform(1e6, 5e7)),
                                   float(rng.uniform(0, 2 * math.pi)), 100e-9, env, 0.25)
    else:
        pulse = dynamics.PulseSpec(p.f_q / 3 * rng.uniform(0.99, 1.01), float(rng.uniform(1e8, 1e9)),
                                   float(rng.uniform(0, 2 * math.pi)), 100e-9, env, 0.25)
    return dynamics.build_hamiltonian(frame, p, pulse, d)


def _battery(rng, n, fn):
    """Worst value of ``fn(rng)`` over ``n`` cases."""
    return max(float(fn(rng)) for _ in range(n))


def property_results(n=PROPERTY_CASES, seed=PROPERTY_SEED):
    """Worst-case deviation for each randomized property."""
    ss = np.random.SeedSequence(seed).spawn(10)
    rngs = [np.random.default_rng(s) for s in ss]

    def reciprocity(rng):
        s = network.s_parameters(random_netlist(rng), random_grid(rng)).s
        return np.max(np.abs(s - np.swapaxes(s, 1, 2)))

    def unitarity(rng):
        s = network.s_parameters(random_netlist(rng, lossless=True), random_grid(rng)).s
        eye = np.eye(s.shape[1])
        return np.max(np.abs(np.conj(np.swapaxes(s, 1, 2)) @ s - eye))

    def passivity(rng):
        net = random_netlist(rng, n_ports=None)
        at = int(rng.integers(1, len(net.ports) + 1))
        terms = {p.index: network.TERMINATIONS[int(rng.integers(3))] for p in net.ports if p.index != at}
        try:
            y = network.driving_point_admittance(net, at, terms, random_grid(rng))
        except network.TopologyError:
            return -np.inf
        return -np.min(np.real(y))

    def cascade(rng):
        stages = random_chain(rng)
        grid = random_grid(rng)
        a = network.abcd_to_s(network.cascade_abcd(stages, grid.freqs))
        b = network.s_parameters(network.chain_netlist(stages), grid).s
        return np.max(np.abs(a - b))

    def touchstone(rng):
        n_p = int(rng.integers(1, 5))
        nf = int(rng.integers(1, 6))
        f = np.cumsum(rng.uniform(1e6, 1e9, nf))
        s = rng.normal(size=(nf, n_p, n_p)) + 1j * rng.normal(size=(nf, n_p, n_p))
        block = rfio.TouchstoneBlock(f, s, float(rng.uniform(10, 100)), rfio.FORMATS[int(rng.integers(3))],
                                     list(rfio.FREQ_UNITS)[int(rng.integers(4))])
        back = rfio.parse_touchstone(rfio.write_touchstone(block), n_p)
        return max(np.max(np.abs(back.s - s) / np.maximum(np.abs(s), 1e-300)),
                   np.max(np.abs(back.freqs / f - 1)))

    def netlist_roundtrip(rng):
        net = random_netlist(rng)
        return 0.0 if rfio.parse_netlist(rfio.format_netlist(net)) == net else 1.0

    def fit_recovery(rng):
        name, p, x = random_fit_case(rng)
        y = fitting.get_model(name)(x, p)
        res = fitting.fit(name, x, y)
        return np.max(np.abs(res.values - p) / np.maximum(np.abs(p), 1.0 if name != "flux_arch" else 1e-3))

    def determinism(rng):
        name, p, x = random_fit_case(rng)
        seed_ = int(rng.integers(2 ** 31))
        sigma = float(rng.uniform(1e-3, 1e-2)) * float(np.ptp(fitting.get_model(name)(x, p)))
        runs = []
        for _ in range(2):
            y = fitting.synthesize_trace(name, p, x, sigma, seed_)
            runs.append((y.tobytes(), fitting.fit(name, x, y).values.tobytes()))
        return 0.0 if runs[0] == runs[1] else 1.0

    def norm(rng):
        gen = random_generator(rng)
        dur = gen.pulse.duration
        return np.max(np.abs(dynamics.evolve(gen, (0.0, dur), n_samples=21).norms - 1))

    def truncation(rng):
        p = random_transmon(rng)
        eta = float(rng.uniform(0.05, 0.3))
        a = dynamics.subharmonic_resonance(p, eta, 5, evolve_check=False).f_rabi
        b = dynamics.subharmonic_resonance(p, eta, 7, evolve_check=False).f_rabi
        return abs(b / a - 1)

    table = (
        ("network reciprocity |S - S^T|", reciprocity, 1e-9),
        ("lossless unitarity |S^H S - I|", unitarity, 1e-9),
        ("passivity -min Re[Y_in] (S)", passivity, 1e-12),
        ("ABCD cascade vs nodal S", cascade, 1e-9),
        ("Touchstone round trip (relative)", touchstone, 1e-9),
        ("netlist round trip mismatches", netlist_roundtrip, 0.0),
        ("fit exact recovery (relative)", fit_recovery, 1e-6),
        ("seeded determinism mismatches", determinism, 0.0),
        ("evolution norm drift", norm, 1e-8),
        ("Rabi change d=5 -> 7, eta <= 0.3", truncation, 0.01),
    )
    return [(label, _battery(rng, n, fn), tol) for (label, fn, tol), rng in zip(table, rngs)]


def criterion_10(n=PROPERTY_CASES, seed=PROPERTY_SEED):
    return [Check(10, f"{label}, {n} random cases", f"worst {worst:.2e}", f"<= {tol:g}", worst <= tol)
            for label, worst, tol in property_results(n, seed)]


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 11)}


def run(selected=None):
    """Checks for the selected criteria (all by default), in order."""
    out = []
    for k in sorted(selected or CRITERIA):
        out.extend(CRITERIA[k]())
    return out
