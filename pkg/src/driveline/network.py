"""Frequency-domain nodal analysis of transmission-line and lumped circuits.

Circuits are described by a :class:`Netlist` of two-terminal elements between
named nodes. Transmission-line segments are stamped through their exact
two-port admittance parameters, lumped elements through their immittance.
Ports sit between a node and ground with a positive reference impedance.

Units are SI throughout: Hz, ohm, F, H, m, and dB/m for line attenuation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import constants
from .errors import NetlistError, NumericRangeError, TopologyError

DB_PER_NEPER = 20.0 / math.log(10.0)

# Relative distance to a cot/csc pole inside which a lossless line is
# evaluated at f*(1 + POLE_SHIFT) instead.
POLE_SHIFT = 1e-6

# Lines are cut into segments no longer than this electrical length before
# solving, which keeps every stamp far from its poles.
MAX_SEGMENT_RAD = math.pi / 4

# Transmission below this level counts as stopband when separating split dips.
STOPBAND_LEVEL_DB = -110.0

LUMPED_KINDS = {"C", "L", "R"}
KIND_NAMES = {
    ("TL", False): "TLine",
    ("TL", True): "TLine",
    ("C", False): "SeriesCap",
    ("C", True): "ShuntCap",
    ("L", False): "SeriesInd",
    ("L", True): "ShuntInd",
    ("R", False): "Resistor",
    ("R", True): "Resistor",
}


@dataclass(frozen=True)
class Element:
    """One two-terminal circuit element.

    ``kind`` is ``"TL"`` for a transmission-line segment (ground return
    implied) or ``"C"``, ``"L"``, ``"R"`` for a lumped element whose ``value``
    is in F, H or ohm.
    """

    kind: str
    n1: str
    n2: str
    value: float = 0.0
    z0: float = 50.0
    eps_eff: float = 1.0
    length: float = 0.0
    atten: float = 0.0
    name: str | None = None

    def __post_init__(self):
        if self.kind not in LUMPED_KINDS | {"TL"}:
            raise NetlistError(f"unknown element kind {self.kind!r}")
        if self.n1 == self.n2:
            raise NetlistError(f"element {self.label} connects node {self.n1!r} to itself")
        if self.kind == "TL":
            if not (math.isfinite(self.z0) and self.z0 > 0):
                raise NetlistError(f"{self.label}: z0 must be positive, got {self.z0}")
            if not (math.isfinite(self.eps_eff) and self.eps_eff >= 1):
                raise NetlistError(f"{self.label}: eps_eff must be >= 1, got {self.eps_eff}")
            if not (math.isfinite(self.length) and self.length >= 0):
                raise NetlistError(f"{self.label}: length must be >= 0, got {self.length}")
            if not (math.isfinite(self.atten) and self.atten >= 0):
                raise NetlistError(f"{self.label}: attenuation must be >= 0, got {self.atten}")
        elif not (math.isfinite(self.value) and self.value > 0):
            raise NetlistError(f"{self.label}: value must be positive, got {self.value}")

    @property
    def label(self):
        return self.name or f"{self.kind}({self.n1},{self.n2})"

    @classmethod
    def tline(cls, n1, n2, z0, eps_eff, length, atten=0.0, name=None):
        return cls("TL", n1, n2, z0=z0, eps_eff=eps_eff, length=length, atten=atten, name=name)

    @classmethod
    def capacitor(cls, n1, n2, value, name=None):
        return cls("C", n1, n2, value=value, name=name)

    @classmethod
    def inductor(cls, n1, n2, value, name=None):
        return cls("L", n1, n2, value=value, name=name)

    @classmethod
    def resistor(cls, n1, n2, value, name=None):
        return cls("R", n1, n2, value=value, name=name)


@dataclass(frozen=True)
class Port:
    index: int
    node: str
    z_ref: float = 50.0


@dataclass(frozen=True)
class Netlist:
    """Elements, ports and the set of ground node names.

    Validated on construction; instances are immutable.
    """

    elements: tuple[Element, ...]
    ports: tuple[Port, ...] = ()
    grounds: frozenset[str] = frozenset({"0"})

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "ports", tuple(sorted(self.ports, key=lambda p: p.index)))
        object.__setattr__(self, "grounds", frozenset(self.grounds))
        if not self.grounds:
            raise TopologyError("no ground node")
        indices = [p.index for p in self.ports]
        if len(set(indices)) != len(indices):
            raise NetlistError(f"duplicate port index in {indices}")
        if indices != list(range(1, len(indices) + 1)):
            raise NetlistError(f"port indices must be consecutive from 1, got {indices}")
        nodes = self.nodes
        seen_nodes = set()
        for p in self.ports:
            if p.node not in nodes:
                raise TopologyError(f"port {p.index} references undefined node {p.node!r}")
            if p.node in self.grounds:
                raise TopologyError(f"port {p.index} sits on a ground node")
            if p.node in seen_nodes:
                raise TopologyError(f"two ports share node {p.node!r}")
            seen_nodes.add(p.node)
            if not (math.isfinite(p.z_ref) and p.z_ref > 0):
                raise NetlistError(f"port {p.index}: reference impedance must be positive")

    @property
    def nodes(self) -> frozenset[str]:
        out = set(self.grounds)
        for el in self.elements:
            out.update((el.n1, el.n2))
        return frozenset(out)

    @property
    def signal_nodes(self) -> list[str]:
        """Non-ground nodes in first-appearance order."""
        order = []
        for el in self.elements:
            for n in (el.n1, el.n2):
                if n not in self.grounds and n not in order:
                    order.append(n)
        return order

    def kind_name(self, el: Element) -> str:
        shunt = el.n1 in self.grounds or el.n2 in self.grounds
        return KIND_NAMES[(el.kind, shunt)]

    def port(self, index: int) -> Port:
        for p in self.ports:
            if p.index == index:
                return p
        raise NetlistError(f"no port {index}")

    def element(self, name: str) -> Element:
        for el in self.elements:
            if el.name == name:
                return el
        raise NetlistError(f"no element named {name!r}")

    def with_element(self, name: str, **changes) -> "Netlist":
        """Copy with the named element's fields replaced."""
        self.element(name)
        els = tuple(replace(el, **changes) if el.name == name else el for el in self.elements)
        return replace(self, elements=els)


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing positive frequencies in Hz."""

    freqs: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.freqs, dtype=float).ravel()
        if f.size < 1:
            raise ValueError("frequency grid is empty")
        if not np.all(np.isfinite(f)) or np.any(f <= 0):
            raise ValueError("frequencies must be positive and finite")
        if np.any(np.diff(f) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        f.setflags(write=False)
        object.__setattr__(self, "freqs", f)

    @classmethod
    def linspace(cls, start, stop, n):
        if n < 2:
            raise ValueError("a frequency range needs at least 2 points")
        return cls(np.linspace(start, stop, int(n)))

    @classmethod
    def default(cls):
        return cls.linspace(1e9, 10e9, 2001)

    def __len__(self):
        return self.freqs.size


@dataclass(frozen=True)
class FrequencySweepResult:
    grid: FrequencyGrid
    s: np.ndarray  # (F, N, N)
    y_driving: np.ndarray | None = None
    shifted: np.ndarray | None = None  # bool mask of pole-shifted points
    port_z: tuple[float, ...] = ()

    @property
    def freqs(self):
        return self.grid.freqs

    def s_db(self, i, j):
        return 20 * np.log10(np.maximum(np.abs(self.s[:, i - 1, j - 1]), 1e-300))


# --------------------------------------------------------------------------
# two-port primitives


def propagation_constant(eps_eff, atten_db_per_m, f):
    """Complex propagation constant alpha + j*beta in 1/m."""
    beta = 2 * np.pi * np.asarray(f, dtype=float) * math.sqrt(eps_eff) / constants.c
    alpha = atten_db_per_m / DB_PER_NEPER
    return alpha + 1j * beta


def tline_two_port(z0, eps_eff, length, atten, f):
    """ABCD matrix of a uniform line segment.

    Returns a complex ``(2, 2)`` array, or ``(F, 2, 2)`` when ``f`` is an
    array.
    """
    Element.tline("a", "b", z0, eps_eff, length, atten)
    f_arr = np.asarray(f, dtype=float)
    if np.any(f_arr <= 0):
        raise ValueError("frequency must be positive")
    gl = propagation_constant(eps_eff, atten, f_arr) * length
    with np.errstate(over="ignore", invalid="ignore"):
        ch, sh = np.cosh(gl), np.sinh(gl)
    if not (np.all(np.isfinite(ch)) and np.all(np.isfinite(sh))):
        raise NumericRangeError(f"line loss {atten} dB/m over {length} m overflows")
    out = np.empty(f_arr.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = ch
    out[..., 0, 1] = z0 * sh
    out[..., 1, 0] = sh / z0
    out[..., 1, 1] = ch
    return out


def _pole_shift(el: Element, f: np.ndarray):
    """Frequencies with lossless-line poles nudged, plus the mask of nudged points."""
    f = np.asarray(f, dtype=float)
    if el.atten > 0 or el.length == 0:
        return f, np.zeros(f.shape, dtype=bool)
    turns = 2 * f * math.sqrt(el.eps_eff) * el.length / constants.c  # beta*l/pi
    n = np.round(turns)
    near = (n >= 1) & (np.abs(turns - n) <= POLE_SHIFT * np.maximum(n, 1))
    return np.where(near, f * (1 + POLE_SHIFT), f), near


def tline_y_params(el: Element, f):
    """(y11, y12) of a line segment; y22 = y11 and y21 = y12 by symmetry."""
    f_eval, shifted = _pole_shift(el, f)
    gl = propagation_constant(el.eps_eff, el.atten, f_eval) * el.length
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        sh = np.sinh(gl)
        y11 = np.cosh(gl) / sh / el.z0
        y12 = -1.0 / sh / el.z0
    if not (np.all(np.isfinite(y11)) and np.all(np.isfinite(y12))):
        raise NumericRangeError(f"{el.label}: admittance parameters are not finite")
    return y11, y12, shifted


def lumped_admittance(el: Element, f):
    w = 2 * np.pi * np.asarray(f, dtype=float)
    if el.kind == "C":
        return 1j * w * el.value
    if el.kind == "L":
        return 1.0 / (1j * w * el.value)
    return np.full(w.shape, 1.0 / el.value, dtype=complex)


# --------------------------------------------------------------------------
# assembly


def _union_find(nodes):
    parent = {n: n for n in nodes}

    def find(n):
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    def union(a, b):
        parent[find(a)] = find(b)

    return find, union


def check_connectivity(netlist: Netlist):
    """Raise :class:`TopologyError` for node groups with no path to ground or a port."""
    find, union = _union_find(netlist.nodes)
    g0 = next(iter(netlist.grounds))
    for g in netlist.grounds:
        union(g, g0)
    for el in netlist.elements:
        union(el.n1, el.n2)
        if el.kind == "TL":  # shared return conductor
            union(el.n1, g0)
    anchored = {find(g0)} | {find(p.node) for p in netlist.ports}
    floating = sorted(n for n in netlist.signal_nodes if find(n) not in anchored)
    if floating:
        raise TopologyError(f"floating subcircuit with no ground or port reference: nodes {floating}")


def _merge_zero_length(netlist: Netlist) -> Netlist:
    """Collapse zero-length lines into direct node connections."""
    shorts = [el for el in netlist.elements if el.kind == "TL" and el.length == 0]
    if not shorts:
        return netlist
    find, union = _union_find(netlist.nodes)
    g0 = sorted(netlist.grounds)[0]
    for g in netlist.grounds:
        union(g, g0)
    for el in shorts:
        # keep ground or port nodes as representatives
        a, b = el.n1, el.n2
        if b in netlist.grounds or b in {p.node for p in netlist.ports}:
            a, b = b, a
        union(b, a)
    rep = {n: find(n) for n in netlist.nodes}
    ground_reps = {rep[g] for g in netlist.grounds}
    els = []
    for el in netlist.elements:
        if el in shorts:
            continue
        a, b = rep[el.n1], rep[el.n2]
        if a == b:
            continue
        els.append(replace(el, n1=a, n2=b))
    ports = tuple(replace(p, node=rep[p.node]) for p in netlist.ports)
    return Netlist(tuple(els), ports, frozenset(ground_reps) | netlist.grounds)


def subdivide(netlist: Netlist, f_max: float, max_rad: float = MAX_SEGMENT_RAD) -> Netlist:
    """Split line segments so none exceeds ``max_rad`` electrical length at ``f_max``.

    The cascade of segments is exactly equivalent to the original line.
    """
    els = []
    for i, el in enumerate(netlist.elements):
        if el.kind != "TL" or el.length == 0:
            els.append(el)
            continue
        bl = float(np.imag(propagation_constant(el.eps_eff, 0.0, f_max))) * el.length
        n = max(1, math.ceil(bl / max_rad))
        if n == 1:
            els.append(el)
            continue
        seg = el.length / n
        names = [el.n1] + [f"{el.n1}~{i}~{k}" for k in range(1, n)] + [el.n2]
        for k in range(n):
            els.append(replace(el, n1=names[k], n2=names[k + 1], length=seg))
    return replace(netlist, elements=tuple(els))


@dataclass(frozen=True)
class NodalMatrix:
    y: np.ndarray  # (N, N) or (F, N, N)
    nodes: list[str]
    shifted: np.ndarray | bool = False


def _stamp(netlist: Netlist, f: np.ndarray):
    nodes = netlist.signal_nodes
    for p in netlist.ports:
        if p.node not in nodes:
            nodes.append(p.node)
    idx = {n: i for i, n in enumerate(nodes)}
    F = f.size
    Y = np.zeros((F, len(nodes), len(nodes)), dtype=complex)
    shifted = np.zeros(F, dtype=bool)
    for el in netlist.elements:
        i = idx.get(el.n1)
        j = idx.get(el.n2)
        if el.kind == "TL":
            y11, y12, sh = tline_y_params(el, f)
            shifted |= sh
            if i is not None:
                Y[:, i, i] += y11
            if j is not None:
                Y[:, j, j] += y11
            if i is not None and j is not None:
                Y[:, i, j] += y12
                Y[:, j, i] += y12
        else:
            y = lumped_admittance(el, f)
            if i is not None:
                Y[:, i, i] += y
            if j is not None:
                Y[:, j, j] += y
            if i is not None and j is not None:
                Y[:, i, j] -= y
                Y[:, j, i] -= y
    return Y, nodes, shifted


def assemble_admittance_matrix(netlist: Netlist, f) -> NodalMatrix:
    """Node-admittance matrix over the non-ground nodes at frequency ``f``.

    Each element is stamped whole (no segmentation). A scalar ``f`` gives an
    ``(N, N)`` matrix, an array gives ``(F, N, N)``.
    """
    f_arr = np.atleast_1d(np.asarray(f, dtype=float))
    if np.any(f_arr <= 0):
        raise ValueError("frequency must be positive")
    Y, nodes, shifted = _stamp(_merge_zero_length(netlist), f_arr)
    if np.ndim(f) == 0:
        return NodalMatrix(Y[0], nodes, bool(shifted[0]))
    return NodalMatrix(Y, nodes, shifted)


def _solver_netlist(netlist: Netlist, f_max: float) -> Netlist:
    check_connectivity(netlist)
    return subdivide(_merge_zero_length(netlist), f_max)


def _schur(Y, keep: Sequence[int]):
    """Reduce ``Y`` (F, N, N) onto the ``keep`` nodes."""
    n = Y.shape[-1]
    keep = list(keep)
    drop = [i for i in range(n) if i not in keep]
    Ykk = Y[:, keep][:, :, keep]
    if not drop:
        return Ykk
    Ykd = Y[:, keep][:, :, drop]
    Ydk = Y[:, drop][:, :, keep]
    Ydd = Y[:, drop][:, :, drop]
    try:
        X = np.linalg.solve(Ydd, Ydk)
    except np.linalg.LinAlgError as exc:
        raise NumericRangeError("internal node block is singular") from exc
    out = Ykk - Ykd @ X
    if not np.all(np.isfinite(out)):
        raise NumericRangeError("reduced admittance is not finite")
    return out


def port_admittance(netlist: Netlist, grid: FrequencyGrid, return_shifted=False):
    """Port-reduced admittance matrix (F, P, P), reference loads excluded."""
    if not netlist.ports:
        raise NetlistError("netlist has no ports")
    f = grid.freqs
    work = _solver_netlist(netlist, float(f[-1]))
    Y, nodes, shifted = _stamp(work, f)
    keep = [nodes.index(p.node) for p in work.ports]
    out = _schur(Y, keep)
    return (out, shifted) if return_shifted else out


def y_to_s(Yp: np.ndarray, z_ref: Sequence[float]) -> np.ndarray:
    """Convert admittance matrices (..., P, P) to scattering matrices."""
    sq = np.sqrt(np.asarray(z_ref, dtype=float))
    A = sq[:, None] * Yp * sq[None, :]
    eye = np.eye(len(sq))
    # S = (I - A)(I + A)^-1 ; solve from the right via transposes
    return np.swapaxes(np.linalg.solve(np.swapaxes(eye + A, -1, -2), np.swapaxes(eye - A, -1, -2)), -1, -2)


TERMINATIONS = ("matched", "grounded", "open")


def apply_terminations(netlist: Netlist, terminations: Mapping[int, str]) -> Netlist:
    """Close the listed ports and renumber the rest consecutively.

    ``matched`` puts the port's reference resistance to ground, ``grounded``
    shorts the port node to ground and ``open`` leaves it floating.
    """
    els = list(netlist.elements)
    grounds = set(netlist.grounds)
    remaining = []
    for p in netlist.ports:
        how = terminations.get(p.index)
        if how is None:
            remaining.append(p)
        elif how == "matched":
            els.append(Element.resistor(p.node, sorted(netlist.grounds)[0], p.z_ref))
        elif how == "grounded":
            grounds.add(p.node)
        elif how == "open":
            pass
        else:
            raise NetlistError(f"unknown termination {how!r} for port {p.index}; use {TERMINATIONS}")
    els = [el for el in els if not (el.n1 in grounds and el.n2 in grounds)]
    ports = tuple(replace(p, index=k) for k, p in enumerate(remaining, start=1))
    return Netlist(tuple(els), ports, frozenset(grounds))


def s_parameters(netlist: Netlist, grid: FrequencyGrid | None = None,
                 terminations: Mapping[int, str] | None = None) -> FrequencySweepResult:
    """Scattering matrices of the netlist's ports over ``grid``.

    Ports listed in ``terminations`` are closed first and excluded from S.
    """
    grid = grid or FrequencyGrid.default()
    work = apply_terminations(netlist, terminations or {})
    if not work.ports:
        raise NetlistError("netlist has no ports")
    Yp, shifted = port_admittance(work, grid, return_shifted=True)
    z = [p.z_ref for p in work.ports]
    return FrequencySweepResult(grid, y_to_s(Yp, z), None, shifted, tuple(z))


def driving_point_admittance(netlist: Netlist, at_port: int, terminations: Mapping[int, str],
                             grid: FrequencyGrid | None = None) -> np.ndarray:
    """Admittance seen in parallel at ``at_port`` with the other ports terminated.

    The port's own reference load is not included.
    """
    grid = grid or FrequencyGrid.default()
    target = netlist.port(at_port)
    others = [p.index for p in netlist.ports if p.index != at_port]
    missing = [i for i in others if i not in terminations]
    if missing:
        raise NetlistError(f"ports {missing} need a termination")
    if at_port in terminations:
        raise NetlistError(f"port {at_port} is the measurement port and cannot be terminated")
    work = apply_terminations(netlist, {i: terminations[i] for i in others})
    work = replace(work, ports=(replace(work.ports[0], index=1),))
    assert work.ports[0].node == target.node
    return port_admittance(work, grid)[:, 0, 0]


def sweep(netlist: Netlist, grid: FrequencyGrid | None = None, at_port: int | None = None,
          terminations: Mapping[int, str] | None = None) -> FrequencySweepResult:
    """S-parameters of all ports plus, optionally, the driving-point admittance."""
    grid = grid or FrequencyGrid.default()
    res = s_parameters(netlist, grid)
    if at_port is None:
        return res
    y = driving_point_admittance(netlist, at_port, terminations or {}, grid)
    return replace(res, y_driving=y)


# --------------------------------------------------------------------------
# stopband analysis


def _runs(mask):
    """(start, stop) index pairs of contiguous True runs, stop inclusive."""
    idx = np.flatnonzero(np.diff(np.concatenate(([0], mask.astype(int), [0]))))
    return list(zip(idx[::2], idx[1::2] - 1))


def find_stopband(sweep: FrequencySweepResult, c_q: float, t1_threshold: float):
    """Frequency intervals where ``c_q / Re[Y_in]`` exceeds ``t1_threshold``.

    Band edges are interpolated linearly in log(T1) between grid points.
    Returns a list of ``(center_hz, width_hz)``.
    """
    if sweep.y_driving is None:
        raise ValueError("sweep has no driving-point admittance")
    if c_q <= 0 or t1_threshold <= 0:
        raise ValueError("c_q and t1_threshold must be positive")
    f = sweep.freqs
    g = np.real(sweep.y_driving)
    with np.errstate(divide="ignore"):
        t1 = np.where(g > 0, c_q / np.where(g > 0, g, 1.0), np.inf)
    mask = t1 > t1_threshold
    logt = np.log(np.clip(t1, 1e-300, 1e300))
    lt = math.log(t1_threshold)

    def edge(i_in, i_out):
        if np.isinf(t1[i_in]):
            return f[i_in]
        a, b = logt[i_out], logt[i_in]
        return f[i_out] + (lt - a) / (b - a) * (f[i_in] - f[i_out])

    out = []
    for s, e in _runs(mask):
        lo = edge(s, s - 1) if s > 0 else f[s]
        hi = edge(e, e + 1) if e < f.size - 1 else f[e]
        out.append(((lo + hi) / 2, hi - lo))
    return out


def stopband_minima(f, s21_db, level_db=STOPBAND_LEVEL_DB):
    """Deepest point of each stopband, deepest stopband first.

    A stopband is a contiguous run of grid points with transmission below
    ``level_db``; dips that never rise above the level between them belong to
    the same stopband.
    """
    f = np.asarray(f, dtype=float)
    s21_db = np.asarray(s21_db, dtype=float)
    out = []
    for a, b in _runs(s21_db < level_db):
        k = a + int(np.argmin(s21_db[a:b + 1]))
        out.append((s21_db[k], float(f[k])))
    return [fk for _, fk in sorted(out)]


def stopband_intervals(f, s21_db, level_db=STOPBAND_LEVEL_DB):
    """``(center, width)`` of each contiguous run below ``level_db``, in frequency order."""
    f = np.asarray(f, dtype=float)
    return [((f[a] + f[b]) / 2, f[b] - f[a]) for a, b in _runs(np.asarray(s21_db) < level_db)]


def asymmetry_scan(base_netlist: Netlist, c_bot: float, relative_offsets: Iterable[float],
                   grid: FrequencyGrid | None = None, top="Ctop", bottom="Cbot",
                   drive_port=1, qubit_port=2, level_db=STOPBAND_LEVEL_DB):
    """Stopband minima of a two-point coupled filter against tap asymmetry.

    For each offset the open-end tap is set to ``c_bot * (1 - offset)`` and
    the drive-to-qubit transmission is computed with every other port
    grounded. Returns ``(offset, minima)`` pairs, minima deepest first.
    """
    grid = grid or FrequencyGrid.linspace(3e9, 7e9, 4001)
    base = base_netlist.with_element(bottom, value=c_bot)
    others = {p.index: "grounded" for p in base.ports if p.index not in (drive_port, qubit_port)}
    # remaining ports are renumbered consecutively
    i_q, i_d = (1, 0) if drive_port < qubit_port else (0, 1)
    out = []
    for off in relative_offsets:
        if not 0 <= off < 0.5:
            raise ValueError(f"offset {off} outside [0, 0.5)")
        net = base.with_element(top, value=c_bot * (1 - off))
        res = s_parameters(net, grid, others)
        s21 = 20 * np.log10(np.maximum(np.abs(res.s[:, i_q, i_d]), 1e-300))
        out.append((off, stopband_minima(grid.freqs, s21, level_db)))
    return out


def asymmetry_splitting(base_netlist: Netlist, c_bot: float, relative_offsets: Iterable[float],
                        **kwargs):
    """Stopband splitting against tap asymmetry.

    The splitting is the distance between the minima of the two deepest
    stopbands, or 0 while only one stopband exists. Keyword arguments are
    those of :func:`asymmetry_scan`.
    """
    out = []
    for off, mins in asymmetry_scan(base_netlist, c_bot, relative_offsets, **kwargs):
        out.append((off, abs(mins[0] - mins[1]) if len(mins) >= 2 else 0.0))
    return out


def minimum_conductance(netlist: Netlist, at_port: int, terminations: Mapping[int, str],
                        f_lo: float, f_hi: float, n: int = 2001):
    """Frequency and value of the smallest Re[Y_in] in ``[f_lo, f_hi]``.

    A grid search is refined by a bounded scalar minimisation.
    """
    from scipy.optimize import minimize_scalar

    grid = FrequencyGrid.linspace(f_lo, f_hi, n)
    g = np.real(driving_point_admittance(netlist, at_port, terminations, grid))
    k = int(np.argmin(g))
    f = grid.freqs

    def cond(x):
        one = FrequencyGrid(np.array([x]))
        return float(np.real(driving_point_admittance(netlist, at_port, terminations, one))[0])

    lo, hi = f[max(k - 1, 0)], f[min(k + 1, f.size - 1)]
    res = minimize_scalar(cond, bounds=(lo, hi), method="bounded", options={"xatol": 1e-3 * (hi - lo)})
    if res.fun < g[k]:
        return float(res.x), float(res.fun)
    return float(f[k]), float(g[k])


# --------------------------------------------------------------------------
# two-port cascade (independent of the nodal solver)


def series_abcd(z):
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = 1
    out[..., 0, 1] = z
    out[..., 1, 1] = 1
    return out


def shunt_abcd(y):
    y = np.asarray(y, dtype=complex)
    out = np.zeros(y.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = 1
    out[..., 1, 0] = y
    out[..., 1, 1] = 1
    return out


def abcd_to_s(abcd, z1=50.0, z2=50.0):
    """Two-port S-parameters from ABCD with real reference impedances."""
    A, B, C, D = abcd[..., 0, 0], abcd[..., 0, 1], abcd[..., 1, 0], abcd[..., 1, 1]
    den = A * z2 + B + C * z1 * z2 + D * z1
    s = np.empty(abcd.shape, dtype=complex)
    s[..., 0, 0] = (A * z2 + B - C * z1 * z2 - D * z1) / den
    s[..., 0, 1] = 2 * (A * D - B * C) * math.sqrt(z1 * z2) / den
    s[..., 1, 0] = 2 * math.sqrt(z1 * z2) / den
    s[..., 1, 1] = (-A * z2 + B - C * z1 * z2 + D * z1) / den
    return s


def cascade_abcd(stages, f):
    """Multiply the ABCD matrices of a chain of stages.

    Each stage is ``("tline", z0, eps_eff, length, atten)``,
    ``("series", kind, value)`` or ``("shunt", kind, value)`` with kind in
    ``C``, ``L``, ``R``.
    """
    f = np.asarray(f, dtype=float)
    total = np.broadcast_to(np.eye(2, dtype=complex), f.shape + (2, 2)).copy()
    for st in stages:
        if st[0] == "tline":
            m = tline_two_port(*st[1:], f)
        else:
            y = lumped_admittance(Element(st[1], "a", "b", value=st[2]), f)
            m = series_abcd(1 / y) if st[0] == "series" else shunt_abcd(y)
        total = total @ m
    return total


def chain_netlist(stages, z1=50.0, z2=50.0) -> Netlist:
    """The same chain as :func:`cascade_abcd`, written as a two-port netlist."""
    els = []
    node = "n0"
    k = 0
    for st in stages:
        if st[0] == "tline":
            nxt = f"n{k + 1}"
            els.append(Element.tline(node, nxt, *st[1:]))
            node, k = nxt, k + 1
        elif st[0] == "series":
            nxt = f"n{k + 1}"
            els.append(Element(st[1], node, nxt, value=st[2]))
            node, k = nxt, k + 1
        else:
            els.append(Element(st[1], node, "0", value=st[2]))
    ports = (Port(1, "n0", z1), Port(2, node, z2))
    if node == "n0":
        raise NetlistError("chain needs at least one series stage")
    return Netlist(tuple(els), ports, frozenset({"0"}))
