"""Text formats: circuit netlists, version-1 Touchstone S-parameter files, CSV tables.

Netlist grammar, one statement per line, ``#`` starts a comment::

    GND 0
    TL x0 x1 z0=50 eeff=6.45 len=5.9022mm atten=2e-5 name=stub
    C  x0 q 4.5fF name=Cd
    L  a b 1nH
    R  a 0 50
    PORT 1 x0 50

Keywords are case-insensitive, node names are case-sensitive. Values accept
engineering prefixes (a f p n u m k M G T) with an optional unit.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DrivelineError, NetlistError, ParseError, UnsupportedFeatureError
from .network import Element, Netlist, Port

PREFIXES = {
    "a": 1e-18, "f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "μ": 1e-6,
    "m": 1e-3, "k": 1e3, "K": 1e3, "M": 1e6, "G": 1e9, "T": 1e12,
}
# Units recognised after an optional prefix, longest first.
UNITS = ("ohm", "Ohm", "OHM", "Hz", "dB/m", "F", "H", "m", "s", "V", "K", "Ω")

_NUMBER = re.compile(r"^[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")

TL_KEYS = {"z0": "z0", "eeff": "eps_eff", "eps_eff": "eps_eff", "len": "length",
           "length": "length", "atten": "atten", "name": "name"}


def parse_value(token: str, unit: str | None = None) -> float:
    """Number with optional engineering prefix and unit, e.g. ``80aF`` or ``5.9mm``.

    ``unit`` names the expected unit; a bare ``m`` is read as metres when the
    unit is ``m`` and as milli otherwise.
    """
    m = _NUMBER.match(token)
    if not m:
        raise ValueError(f"malformed number {token!r}")
    value = float(m.group(0))
    rest = token[m.end():]
    scale = _suffix_scale(rest, unit)
    if scale is None:
        raise ValueError(f"unknown suffix {rest!r} in {token!r}")
    out = value * scale
    if not math.isfinite(out):
        raise ValueError(f"value {token!r} is not finite")
    return out


def _suffix_scale(rest: str, unit: str | None):
    if rest == "":
        return 1.0
    # the expected unit wins, so "5mm" is 5 millimetres and "1m" one metre
    if unit and rest.endswith(unit) and (rest == unit or rest[: -len(unit)] in PREFIXES):
        return PREFIXES.get(rest[: -len(unit)], 1.0)
    if rest in PREFIXES:
        return PREFIXES[rest]
    for u in UNITS:
        head = rest[: -len(u)]
        if rest.endswith(u) and (head == "" or head in PREFIXES):
            return PREFIXES.get(head, 1.0)
    return None


def _tokens(line: str):
    """Whitespace-separated tokens with their 1-based start columns."""
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]


def _split_option(tok: str, lineno: int, col: int):
    if "=" not in tok:
        raise ParseError(f"expected key=value, got {tok!r}", lineno, col)
    key, _, val = tok.partition("=")
    return key.lower(), val


def parse_netlist(text: str | bytes) -> Netlist:
    """Parse netlist text into a validated :class:`Netlist`.

    Every syntax or reference problem raises :class:`ParseError` naming the
    line and column; a document without ``GND`` raises a topology error.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8 ({exc.reason})") from None
    elements: list[Element] = []
    ports: dict[int, tuple[str, float, int]] = {}
    grounds: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        kw = toks[0][0].upper()
        args = toks[1:]

        def need(n, what):
            if len(args) < n:
                raise ParseError(f"{kw} needs {what}", lineno, toks[0][1])

        def number(tok, col, unit=None):
            try:
                return parse_value(tok, unit)
            except ValueError as exc:
                raise ParseError(str(exc), lineno, col) from None

        if kw == "GND":
            need(1, "a node name")
            grounds.update(t for t, _ in args)
        elif kw == "PORT":
            need(2, "an index and a node")
            idx_tok, idx_col = args[0]
            if not re.fullmatch(r"\d+", idx_tok):
                raise ParseError(f"port index must be a positive integer, got {idx_tok!r}", lineno, idx_col)
            idx = int(idx_tok)
            if idx in ports:
                raise ParseError(f"duplicate port index {idx}", lineno, idx_col)
            z = 50.0
            for tok, col in args[2:]:
                if "=" in tok:
                    key, val = _split_option(tok, lineno, col)
                    if key not in ("z", "z0", "zref"):
                        raise ParseError(f"unknown PORT option {key!r}", lineno, col)
                    z = number(val, col, "ohm")
                else:
                    z = number(tok, col, "ohm")
            ports[idx] = (args[1][0], z, lineno)
        elif kw == "TL":
            need(2, "two nodes")
            opts = {"z0": 50.0, "eps_eff": 1.0, "length": None, "atten": 0.0, "name": None}
            units = {"z0": "ohm", "eps_eff": None, "length": "m", "atten": "dB/m"}
            for tok, col in args[2:]:
                key, val = _split_option(tok, lineno, col)
                if key not in TL_KEYS:
                    raise ParseError(f"unknown TL option {key!r}", lineno, col)
                field_ = TL_KEYS[key]
                opts[field_] = val if field_ == "name" else number(val, col, units[field_])
            if opts["length"] is None:
                raise ParseError("TL needs len=", lineno, toks[0][1])
            try:
                elements.append(Element.tline(args[0][0], args[1][0], opts["z0"], opts["eps_eff"],
                                              opts["length"], opts["atten"], name=opts["name"]))
            except NetlistError as exc:
                raise ParseError(str(exc), lineno, toks[0][1]) from None
        elif kw in ("C", "L", "R"):
            need(3, "two nodes and a value")
            unit = {"C": "F", "L": "H", "R": "ohm"}[kw]
            value = number(args[2][0], args[2][1], unit)
            name = None
            for tok, col in args[3:]:
                key, val = _split_option(tok, lineno, col)
                if key != "name":
                    raise ParseError(f"unknown {kw} option {key!r}", lineno, col)
                name = val
            try:
                elements.append(Element(kw, args[0][0], args[1][0], value=value, name=name))
            except NetlistError as exc:
                raise ParseError(str(exc), lineno, toks[0][1]) from None
        else:
            raise ParseError(f"unknown element kind {toks[0][0]!r}", lineno, toks[0][1],
                             hint="valid statements: TL, C, L, R, PORT, GND")
    nodes = set(grounds)
    for el in elements:
        nodes.update((el.n1, el.n2))
    for idx, (node, _, lineno) in ports.items():
        if node not in nodes:
            raise ParseError(f"PORT {idx} references undefined node {node!r}", lineno)
    port_objs = tuple(Port(i, node, z) for i, (node, z, _) in ports.items())
    return Netlist(tuple(elements), port_objs, frozenset(grounds))


def _num(x: float) -> str:
    return repr(float(x))


def format_netlist(netlist: Netlist) -> str:
    """Serialise a netlist; :func:`parse_netlist` reads it back unchanged."""
    lines = [f"GND {' '.join(sorted(netlist.grounds))}"]
    for el in netlist.elements:
        name = f" name={el.name}" if el.name else ""
        if el.kind == "TL":
            lines.append(f"TL {el.n1} {el.n2} z0={_num(el.z0)} eeff={_num(el.eps_eff)} "
                         f"len={_num(el.length)} atten={_num(el.atten)}{name}")
        else:
            lines.append(f"{el.kind} {el.n1} {el.n2} {_num(el.value)}{name}")
    for p in netlist.ports:
        lines.append(f"PORT {p.index} {p.node} {_num(p.z_ref)}")
    return "\n".join(lines) + "\n"


def read_netlist(path) -> Netlist:
    with open(path, "rb") as fh:
        return parse_netlist(fh.read())


# --------------------------------------------------------------------------
# Touchstone v1

FREQ_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
FORMATS = ("RI", "MA", "DB")


@dataclass(frozen=True)
class TouchstoneBlock:
    """S-parameters of an N-port, ``s[k, i, j]`` = S_(i+1)(j+1) at ``freqs[k]`` (Hz)."""

    freqs: np.ndarray
    s: np.ndarray
    z_ref: float = 50.0
    fmt: str = "RI"
    unit: str = "GHz"

    def __post_init__(self):
        f = np.asarray(self.freqs, dtype=float).ravel()
        s = np.asarray(self.s, dtype=complex)
        if s.ndim != 3 or s.shape[0] != f.size or s.shape[1] != s.shape[2]:
            raise ValueError(f"S array shape {s.shape} does not match {f.size} frequencies")
        if not 1 <= s.shape[1] <= 4:
            raise UnsupportedFeatureError(f"{s.shape[1]}-port data")
        if f.size and np.any(np.diff(f) <= 0):
            raise ParseError("frequencies must be strictly increasing")
        if not self.z_ref > 0:
            raise ParseError("reference resistance must be positive")
        if self.fmt.upper() not in FORMATS:
            raise ParseError(f"unknown data format {self.fmt!r}")
        if self.unit.upper() not in FREQ_UNITS:
            raise ParseError(f"unknown frequency unit {self.unit!r}")
        object.__setattr__(self, "freqs", f)
        object.__setattr__(self, "s", s)

    @property
    def n_ports(self) -> int:
        return self.s.shape[1]


def _to_complex(a, b, fmt):
    if fmt == "RI":
        return a + 1j * b
    mag = a if fmt == "MA" else 10.0 ** (a / 20.0)
    return mag * np.exp(1j * np.deg2rad(b))


def _from_complex(z, fmt):
    if fmt == "RI":
        return z.real, z.imag
    mag = np.abs(z)
    ang = np.rad2deg(np.angle(z))
    if fmt == "MA":
        return mag, ang
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(mag), ang


def _order(n):
    """(i, j) index order of the entries in a data row."""
    if n == 2:
        return [(0, 0), (1, 0), (0, 1), (1, 1)]
    return [(i, j) for i in range(n) for j in range(n)]


def _parse_option_line(tokens, lineno):
    unit, fmt, z = "GHZ", "MA", 50.0
    it = iter(tokens[1:])
    for tok in it:
        t = tok.upper()
        if t in FREQ_UNITS:
            unit = t
        elif t in FORMATS:
            fmt = t
        elif t == "S":
            pass
        elif t in ("Y", "Z", "G", "H"):
            raise UnsupportedFeatureError(f"parameter type {tok!r}", lineno)
        elif t == "R":
            nxt = next(it, None)
            if nxt is None:
                raise ParseError("R needs a resistance", lineno)
            try:
                z = float(nxt)
            except ValueError:
                raise ParseError(f"malformed resistance {nxt!r}", lineno) from None
            if not z > 0:
                raise ParseError("reference resistance must be positive", lineno)
        else:
            raise ParseError(f"unknown option {tok!r}", lineno)
    return unit, fmt, z


def parse_touchstone(text: str, n_ports: int | None = None) -> TouchstoneBlock:
    """Parse version-1 Touchstone text.

    Without ``n_ports`` the port count is inferred from the row layout: each
    frequency row starts on a new line and holds ``1 + 2N**2`` numbers.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8 ({exc.reason})") from None
    option = None
    lines = []  # (lineno, [floats])
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            if option is None:
                option = _parse_option_line(line.split(), lineno)
            continue
        if line.startswith("["):
            raise UnsupportedFeatureError("Touchstone version 2 keyword", lineno)
        vals = []
        for tok in line.split():
            try:
                vals.append(float(tok))
            except ValueError:
                raise ParseError(f"malformed number {tok!r}", lineno) from None
        lines.append((lineno, vals))
    unit, fmt, z = option or ("GHZ", "MA", 50.0)
    counts = [len(v) for _, v in lines]
    total = sum(counts)
    candidates = [n_ports] if n_ports else [1, 2, 3, 4]
    n = None
    for cand in candidates:
        if not 1 <= cand <= 4:
            raise UnsupportedFeatureError(f"{cand}-port data")
        per_row = 1 + 2 * cand * cand
        if total % per_row:
            continue
        # rows must begin at line starts
        pos, ok = 0, True
        starts = set()
        for c in counts:
            starts.add(pos)
            pos += c
        if any(k * per_row not in starts for k in range(total // per_row)):
            ok = False
        if ok:
            n = cand
            break
    if n is None:
        raise ParseError(f"{total} numbers do not form rows of 1+2N^2 values for 1-4 ports")
    flat = np.array([x for _, v in lines for x in v], dtype=float)
    per_row = 1 + 2 * n * n
    rows = flat.reshape(-1, per_row) if flat.size else np.zeros((0, per_row))
    freqs = rows[:, 0] * FREQ_UNITS[unit]
    if np.any(np.diff(freqs) <= 0):
        k = int(np.flatnonzero(np.diff(freqs) <= 0)[0]) + 1
        row_line = [ln for ln, v in lines][0] if lines else None
        raise ParseError(f"frequencies not strictly increasing at row {k + 1}", row_line)
    pairs = rows[:, 1:].reshape(-1, n * n, 2)
    vals = _to_complex(pairs[..., 0], pairs[..., 1], fmt)
    s = np.zeros((rows.shape[0], n, n), dtype=complex)
    for k, (i, j) in enumerate(_order(n)):
        s[:, i, j] = vals[:, k]
    pretty_unit = {"HZ": "Hz", "KHZ": "kHz", "MHZ": "MHz", "GHZ": "GHz"}[unit]
    return TouchstoneBlock(freqs, s, z, fmt, pretty_unit)


def write_touchstone(block: TouchstoneBlock) -> str:
    """Version-1 Touchstone text in the block's own unit and format."""
    n = block.n_ports
    fmt = block.fmt.upper()
    scale = FREQ_UNITS[block.unit.upper()]
    out = [f"# {block.unit} S {fmt} R {_num(block.z_ref)}"]
    order = _order(n)
    for k, f in enumerate(block.freqs):
        nums = []
        for i, j in order:
            a, b = _from_complex(block.s[k, i, j], fmt)
            nums.append(f"{_num(a)} {_num(b)}")
        head = _num(f / scale)
        if n <= 2:
            out.append(" ".join([head] + nums))
        else:
            for r in range(n):
                chunk = nums[r * n:(r + 1) * n]
                out.append(" ".join(([head] if r == 0 else []) + chunk))
    return "\n".join(out) + "\n"


def convert_format(block: TouchstoneBlock, fmt: str) -> TouchstoneBlock:
    return TouchstoneBlock(block.freqs, block.s, block.z_ref, fmt.upper(), block.unit)


# --------------------------------------------------------------------------
# CSV


def _fmt_cell(x) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def write_csv(table: Mapping[str, Sequence[float]]) -> str:
    """Comma-separated text with a header row and round-trip float precision."""
    names = list(table)
    cols = [np.asarray(table[k], dtype=float).ravel() for k in names]
    lengths = {c.size for c in cols}
    if len(lengths) > 1:
        raise ValueError(f"ragged columns: lengths {sorted(lengths)}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in zip(*cols):
        w.writerow([_fmt_cell(v) for v in row])
    return buf.getvalue()


def read_csv(text: str) -> dict[str, np.ndarray]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ParseError("empty CSV")
    names = rows[0]
    data = rows[1:]
    for k, r in enumerate(data, start=2):
        if len(r) != len(names):
            raise ParseError(f"expected {len(names)} fields, got {len(r)}", k)
    try:
        cols = np.array(data, dtype=float).reshape(len(data), len(names))
    except ValueError as exc:
        raise ParseError(f"non-numeric CSV cell ({exc})") from None
    return {n: cols[:, i].copy() for i, n in enumerate(names)}


__all__ = [
    "parse_value", "parse_netlist", "format_netlist", "read_netlist", "TouchstoneBlock",
    "parse_touchstone", "write_touchstone", "convert_format", "write_csv", "read_csv",
    "DrivelineError",
]
