"""Command-line front end.

Every subcommand writes CSV (and, unless ``--no-plot``, an SVG line plot) to
the output directory: ``--out``, else ``$DRIVELINE_OUT``, else
``./driveline-out``. Physical inputs accept SI suffixes (``83fF``, ``10ns``,
``5GHz``); grids are ``start:stop:count``. ``--config FILE`` reads flat
``key = value`` lines whose keys are the long option names; flags given on
the command line win.

Exit status is 0 on success, 1 on domain errors (and failed acceptance
criteria under ``reproduce``) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import acceptance, budget, coupling, designs, dynamics, fitting, network, rfio
from .errors import DrivelineError
from .svgplot import LinePlot

OUT_ENV = "DRIVELINE_OUT"
DEFAULT_OUT = "driveline-out"


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# argument types


def si(unit=None):
    def conv(text):
        try:
            return rfio.parse_value(text.strip(), unit)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    conv.__name__ = f"value[{unit or ''}]"
    return conv


def grid_spec(unit=None):
    def conv(text):
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"grid {text!r} is not start:stop:count")
        try:
            lo, hi = (rfio.parse_value(p.strip(), unit) for p in parts[:2])
            n = int(parts[2])
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
        if n < 1 or (n > 1 and not hi > lo):
            raise argparse.ArgumentTypeError(f"grid {text!r} needs stop > start and count >= 1")
        return np.linspace(lo, hi, n) if n > 1 else np.array([lo])
    conv.__name__ = "grid"
    return conv


def chain_spec(text):
    try:
        return budget.AttenuationChain.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def existing_file(text):
    if not Path(text).is_file():
        raise argparse.ArgumentTypeError(f"file {text!r} does not exist")
    return text


def int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of integers") from None


def float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of numbers") from None


def terminations(text):
    out = {}
    for part in filter(None, (t.strip() for t in text.split(","))):
        idx, _, how = part.partition("=")
        if not idx.isdigit() or how not in network.TERMINATIONS:
            raise argparse.ArgumentTypeError(f"termination {part!r} is not port=matched|grounded|open")
        out[int(idx)] = how
    return out


# --------------------------------------------------------------------------
# helpers


def _load_netlist(args):
    if getattr(args, "netlist", None):
        return rfio.read_netlist(args.netlist), Path(args.netlist).stem
    return designs.DESIGNS[args.design](), args.design


def _write(out: Path, name: str, text: str):
    path = out / name
    path.write_text(text, encoding="utf-8")
    return path


def _plot(args, out, name, plot: LinePlot):
    if not args.no_plot:
        plot.save(out / name)


def _report(lines):
    for ln in lines:
        print(ln)


# --------------------------------------------------------------------------
# subcommands


def cmd_net(args, out):
    net, stem = _load_netlist(args)
    f = args.grid
    grid = network.FrequencyGrid(f)
    term = args.terminate or {}
    res = network.s_parameters(net, grid, term)
    zs = set(res.port_z)
    if len(zs) != 1:
        raise UsageError("Touchstone output needs one reference impedance for all ports")
    n = res.s.shape[1]
    block = rfio.TouchstoneBlock(f, res.s, zs.pop(), args.format, "GHz")
    ts = _write(out, f"{stem}.s{n}p", rfio.write_touchstone(block))
    y_terms = coupling.drive_terminations(net, args.drive_port, args.qubit_port)
    y = network.driving_point_admittance(net, args.qubit_port, y_terms, grid)
    table = {"f_hz": f, "re_y_s": np.real(y), "im_y_s": np.imag(y)}
    if args.cq:
        table["t1_ext_s"] = coupling.t1_ext(np.real(y), args.cq)
    csv = _write(out, f"{stem}_yin.csv", rfio.write_csv(table))
    plot = LinePlot(f"{stem}: |S| in dB", "frequency (GHz)", "dB")
    for j in range(n):
        for i in range(n):
            if i >= j:
                plot.add(f / 1e9, res.s_db(i + 1, j + 1), f"S{i + 1}{j + 1}")
    _plot(args, out, f"{stem}_s.svg", plot)
    print(f"wrote {ts} ({f.size} rows) and {csv}")
    return 0


def cmd_sweep(args, out):
    net, stem = _load_netlist(args)
    f = args.grid
    gam = np.atleast_1d(coupling.gamma_from_netlist(net, f, args.cq, args.drive_port, args.qubit_port))
    gam3 = np.atleast_1d(coupling.gamma_from_netlist(net, f / 3, args.cq, args.drive_port, args.qubit_port))
    with np.errstate(divide="ignore"):
        t1 = np.where(gam > 0, 1 / np.where(gam > 0, gam, 1), np.inf)
    f_rabi = coupling.rabi_from_admittance(gam, f, args.z, args.vdrive)
    f_sub = np.empty_like(f)
    for k, fk in enumerate(f):
        p = coupling.TransmonParams.from_frequency(fk, args.ec)
        omega = 2 * math.pi * coupling.rabi_from_admittance(gam3[k], fk / 3, args.z, args.vdrive)
        f_sub[k] = abs(dynamics.subharmonic_effective(p, fk / 3, omega)[2])
    table = {"f_q_hz": f, "gamma_per_s": gam, "t1_ext_s": t1, "f_rabi_resonant_hz": f_rabi,
             "gamma_subharmonic_per_s": gam3, "f_rabi_subharmonic_hz": f_sub}
    csv = _write(out, f"{stem}_sweep.csv", rfio.write_csv(table))
    _plot(args, out, f"{stem}_t1.svg",
          LinePlot(f"{stem}: drive-line T1", "qubit frequency (GHz)", "T1_ext (s)", logy=True).add(f / 1e9, t1))
    _plot(args, out, f"{stem}_rabi.svg",
          LinePlot(f"{stem}: Rabi frequency at {args.vdrive:g} V", "qubit frequency (GHz)", "Hz", logy=True)
          .add(f / 1e9, f_rabi, "resonant").add(f / 1e9, f_sub, "subharmonic"))
    k = int(np.argmax(t1))
    print(f"wrote {csv}; peak T1_ext {t1[k]:.4g} s at {f[k] / 1e9:.4f} GHz")
    bands = []
    if f.size > 1:
        terms = coupling.drive_terminations(net, args.drive_port, args.qubit_port)
        res = network.sweep(net, network.FrequencyGrid(f), args.qubit_port, terms)
        bands = network.find_stopband(res, args.cq, args.threshold)
    for c, w in bands:
        print(f"T1_ext > {args.threshold:g} s: centre {c / 1e9:.4f} GHz, width {w / 1e6:.1f} MHz")
    return 0


def _transmon(args):
    return coupling.TransmonParams.from_frequency(args.fq, args.ec, -args.ec if args.alpha is None else args.alpha,
                                                  f_max=args.fq)


def cmd_dynamics(args, out):
    p = _transmon(args)
    pulse = dynamics.PulseSpec(args.fd or p.f_q, args.frabi, args.phase, args.duration, args.envelope, args.ramp)
    gen = dynamics.build_hamiltonian(args.frame, p, pulse, args.levels, args.model)
    tr = dynamics.evolve(gen, (0.0, pulse.duration), n_samples=args.samples,
                         method="ode" if args.ode else "auto")
    pops = tr.populations
    table = {"t_s": tr.t}
    table.update({f"p{k}": pops[:, k] for k in range(tr.d)})
    csv = _write(out, "dynamics.csv", rfio.write_csv(table))
    plot = LinePlot(f"{args.frame} evolution", "time (ns)", "population")
    for k in range(min(tr.d, 3)):
        plot.add(tr.t * 1e9, pops[:, k], f"|{k}>")
    _plot(args, out, "dynamics.svg", plot)
    print(f"wrote {csv}; final excited population {tr.excited[-1]:.6f}")
    return 0


def cmd_scan(args, out):
    p = _transmon(args)
    fds = args.fd
    pulse = dynamics.PulseSpec(float(fds[0]), args.frabi, 0.0, args.duration, args.envelope, args.ramp)
    pe = dynamics.spectroscopy_scan(p, args.flux, fds, pulse, args.levels, args.mode)
    phi, fd = np.meshgrid(args.flux, fds, indexing="ij")
    csv = _write(out, f"scan_{args.mode}.csv",
                 rfio.write_csv({"flux": phi.ravel(), "f_drive_hz": fd.ravel(), "p_excited": pe.ravel()}))
    peak = fds[np.argmax(pe, axis=1)]
    _plot(args, out, f"scan_{args.mode}.svg",
          LinePlot(f"{args.mode} spectroscopy: brightest drive frequency", "flux (Phi0)", "GHz")
          .add(args.flux, peak / 1e9))
    print(f"wrote {csv} ({pe.size} points)")
    return 0


def cmd_fit(args, out):
    data = rfio.read_csv(Path(args.input).read_text(encoding="utf-8"))
    for col in (args.x, args.y):
        if col not in data:
            raise UsageError(f"column {col!r} not in {sorted(data)}")
    model = fitting.get_model(args.model)
    res = fitting.fit(model, data[args.x], data[args.y], initial=args.initial)
    lines = [f"model {res.model}: converged={res.converged} iterations={res.iterations} "
             f"residual_norm={res.residual_norm:.6g}"]
    lines += [f"  {n} = {v:.10g} +- {s:.3g}" for n, v, s in zip(res.names, res.values, res.sigma)]
    _report(lines)
    _write(out, f"fit_{res.model}.txt", "\n".join(lines) + "\n")
    _write(out, f"fit_{res.model}.csv", rfio.write_csv({"index": range(len(res.names)), "value": res.values,
                                                        "sigma": res.sigma}))
    x = data[args.x]
    order = np.argsort(x)
    _plot(args, out, f"fit_{res.model}.svg",
          LinePlot(f"{res.model} fit", args.x, args.y).add(x[order], data[args.y][order], "data")
          .add(x[order], model(x[order], res.values), "fit"))
    return 0


def cmd_sequence(args, out):
    net, stem = _load_netlist(args)
    p = coupling.TransmonParams.from_frequency(args.fmax, args.ec, f_max=args.fmax)
    loss = coupling.LossChannels(tan_delta=args.tan_delta, temperature=args.temperature)
    dev = fitting.DeviceModel(p, args.fr, args.g, args.kappa, loss, net, v_drive=args.vdrive, z_line=args.z,
                              flux_offset=args.flux_offset)
    rep = fitting.emulate_characterization_sequence(dev, args.bias, args.noise, args.seed)
    lines = [
        f"device {stem}, bias {args.bias:g} Phi0, noise {args.noise:g}, seed {args.seed}",
        f"  resonator  f_r = {rep.f_r / 1e9:.6f} GHz +- {rep.f_r_sigma / 1e3:.3g} kHz",
        f"  qubit      f_q = {rep.f_q / 1e9:.6f} GHz +- {rep.f_q_sigma / 1e3:.3g} kHz",
        f"  Rabi       f_R = {rep.f_rabi / 1e6:.6g} MHz +- {rep.f_rabi_sigma / 1e3:.3g} kHz",
        f"  T1             = {rep.t1 * 1e6:.6g} us +- {rep.t1_sigma * 1e6:.3g} us",
    ]
    lines += [f"    T1 {k:<10} = {v:.4g} s" for k, v in rep.t1_components.items()]
    _report(lines)
    _write(out, f"sequence_{stem}.txt", "\n".join(lines) + "\n")
    return 0


def cmd_budget(args, out):
    chain = args.chain
    p = coupling.TransmonParams.from_frequency(args.fq, args.ec)
    f_drive = p.f_q if args.mode == "resonant" else p.f_q / 3
    if args.t1ext is not None and args.mode == "resonant":
        gamma = 1 / args.t1ext
    elif args.netlist or args.design:
        net, _ = _load_netlist(args)
        gamma = coupling.gamma_from_netlist(net, f_drive, args.cq)
    else:
        raise UsageError("give --t1ext (resonant) or a --netlist/--design for the drive line")
    g = budget.GateBudget(args.gate, gamma, args.mode, p)
    chip = budget.chip_power_dbm(g, f_drive, args.z)
    room = chip + chain.total_db
    heat = budget.base_plate_heat(room, chain)
    n_q = budget.chain_photon_number(chain, p.f_q)
    n_d = budget.chain_photon_number(chain, f_drive)
    rows = [("mode", args.mode), ("chain", chain.format()), ("gate_s", f"{args.gate:g}"),
            ("f_drive_hz", f"{f_drive:.6g}"), ("gamma_at_drive_per_s", f"{gamma:.6g}"),
            ("chip_power_dbm", f"{chip:.2f}"), ("room_power_dbm", f"{room:.2f}"),
            ("base_plate_heat_dbm", f"{heat:.2f}"), ("photons_at_f_q", f"{n_q:.4g}"),
            ("photons_at_f_drive", f"{n_d:.4g}")]
    if not chain.cooling_monotone:
        print("warning: a stage sits warmer than the stage above it", file=sys.stderr)
    width = max(len(k) for k, _ in rows)
    _report(f"{k:<{width}}  {v}" for k, v in rows)
    _write(out, "budget.csv", "quantity,value\n" + "".join(f"{k},{v}\n" for k, v in rows))
    return 0


def cmd_reproduce(args, out):
    selected = args.criteria or list(acceptance.CRITERIA)
    bad = [k for k in selected if k not in acceptance.CRITERIA]
    if bad:
        raise UsageError(f"unknown criteria {bad}; choose from 1-10")
    failed = 0
    lines = []
    for k in selected:
        checks = acceptance.criterion_10(args.cases, acceptance.PROPERTY_SEED + args.seed) if k == 10 else acceptance.CRITERIA[k]()
        for c in checks:
            print(c.line(), flush=True)
            lines.append(c.line())
            failed += c.status == "FAIL"
    summary = f"{failed} failing line(s)" if failed else "all criteria pass"
    print(summary)
    _write(out, "reproduce.txt", "\n".join(lines + [summary]) + "\n")
    return 1 if failed else 0


# --------------------------------------------------------------------------
# parser


def _netlist_args(sp, default_design=None):
    g = sp.add_mutually_exclusive_group(required=default_design is None)
    g.add_argument("--netlist", type=existing_file, help="netlist file")
    g.add_argument("--design", choices=sorted(designs.DESIGNS), default=default_design,
                   help="built-in design (default: %(default)s)")
    sp.add_argument("--drive-port", type=int, default=1, help="drive port index (default: %(default)s)")
    sp.add_argument("--qubit-port", type=int, default=2, help="qubit port index (default: %(default)s)")


def _transmon_args(sp, fq="5.6GHz"):
    sp.add_argument("--fq", type=si("Hz"), default=fq, help="qubit (sweet-spot) frequency (default: %(default)s)")
    sp.add_argument("--ec", type=si("Hz"), default="234.52MHz", help="charging energy E_C/h (default: %(default)s)")
    sp.add_argument("--alpha", type=si("Hz"), default=None, help="anharmonicity (default: -E_C)")
    sp.add_argument("--levels", type=int, default=dynamics.DEFAULT_LEVELS, help="truncation d (default: %(default)s)")
    sp.add_argument("--duration", type=si("s"), default="200ns", help="pulse duration (default: %(default)s)")
    sp.add_argument("--envelope", choices=("rectangular", "cosine"), default="rectangular")
    sp.add_argument("--ramp", type=float, default=0.0, help="cosine ramp fraction (default: %(default)s)")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    common.add_argument("--seed", type=int, default=0, help="random seed (default: %(default)s)")
    common.add_argument("--no-plot", action="store_true", help="skip SVG output")

    ap = argparse.ArgumentParser(prog="driveline", description=__doc__.split("\n\n")[0])
    ap.add_argument("--config", type=existing_file, help="flat key = value file mirroring the long options")
    sub = ap.add_subparsers(dest="command", metavar="command", required=True)

    sp = sub.add_parser("net", parents=[common], help="netlist -> Touchstone and Y_in CSV")
    _netlist_args(sp)
    sp.add_argument("--grid", type=grid_spec("Hz"), default="1e9:10e9:2001", help="start:stop:count (default: %(default)s)")
    sp.add_argument("--terminate", type=terminations, help="close ports before export, e.g. 3=grounded")
    sp.add_argument("--format", choices=rfio.FORMATS, default="RI")
    sp.add_argument("--cq", type=si("F"), default=None, help="qubit capacitance for a T1_ext column")
    sp.set_defaults(func=cmd_net)

    sp = sub.add_parser("sweep", parents=[common], help="T1_ext and Rabi frequency against qubit frequency")
    _netlist_args(sp)
    sp.add_argument("--grid", type=grid_spec("Hz"), default="4e9:6.5e9:2501", help="qubit frequencies (default: %(default)s)")
    sp.add_argument("--cq", type=si("F"), default="83fF", help="qubit capacitance (default: %(default)s)")
    sp.add_argument("--ec", type=si("Hz"), default="233MHz", help="charging energy E_C/h (default: %(default)s)")
    sp.add_argument("--vdrive", type=si("V"), default="10uV", help="peak chip voltage (default: %(default)s)")
    sp.add_argument("--z", type=si("ohm"), default=50.0, help="line impedance (default: %(default)s)")
    sp.add_argument("--threshold", type=si("s"), default="1ms", help="stopband T1 threshold (default: %(default)s)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("dynamics", parents=[common], help="single time evolution -> population CSV")
    _transmon_args(sp)
    sp.add_argument("--frame", choices=dynamics.FRAMES, default="rotating-resonant")
    sp.add_argument("--model", choices=dynamics.LAB_MODELS, default="kerr")
    sp.add_argument("--fd", type=si("Hz"), default=None, help="drive frequency (default: f_q)")
    sp.add_argument("--frabi", type=si("Hz"), default="10MHz", help="Rabi frequency Omega_R/2pi (default: %(default)s)")
    sp.add_argument("--phase", type=float, default=0.0)
    sp.add_argument("--samples", type=int, default=201)
    sp.add_argument("--ode", action="store_true", help="force the adaptive integrator")
    sp.set_defaults(func=cmd_dynamics)

    sp = sub.add_parser("scan", parents=[common], help="flux x drive-frequency spectroscopy map")
    _transmon_args(sp, fq="7.64GHz")
    sp.add_argument("--mode", choices=("resonant", "subharmonic"), default="resonant")
    sp.add_argument("--flux", type=grid_spec(), default="0.3:0.36:7", help="flux grid in Phi0 (default: %(default)s)")
    sp.add_argument("--fd", type=grid_spec("Hz"), required=True, help="drive-frequency grid")
    sp.add_argument("--frabi", type=si("Hz"), default="2MHz", help="drive strength Omega_R/2pi (default: %(default)s)")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("fit", parents=[common], help="fit a CSV column pair")
    sp.add_argument("--input", type=existing_file, required=True)
    sp.add_argument("--x", required=True, help="x column name")
    sp.add_argument("--y", required=True, help="y column name")
    sp.add_argument("--model", required=True, help="lorentzian, decaying_cosine, exponential_decay, flux_arch, polynomialN")
    sp.add_argument("--initial", type=float_list, default=None, help="comma-separated starting values")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("sequence", parents=[common], help="emulated characterisation pipeline")
    _netlist_args(sp, default_design="lambda4")
    sp.add_argument("--fmax", type=si("Hz"), default="6GHz", help="sweet-spot frequency (default: %(default)s)")
    sp.add_argument("--ec", type=si("Hz"), default="233MHz")
    sp.add_argument("--fr", type=si("Hz"), default="6.9GHz", help="readout resonator (default: %(default)s)")
    sp.add_argument("--g", type=si("Hz"), default="70MHz", help="qubit-resonator g/2pi (default: %(default)s)")
    sp.add_argument("--kappa", type=si("Hz"), default="2MHz", help="resonator kappa/2pi (default: %(default)s)")
    sp.add_argument("--tan-delta", type=float, default=3e-6)
    sp.add_argument("--temperature", type=si("K"), default="20mK")
    sp.add_argument("--vdrive", type=si("V"), default="10uV")
    sp.add_argument("--z", type=si("ohm"), default=50.0)
    sp.add_argument("--flux-offset", type=float, default=0.0)
    sp.add_argument("--bias", type=float, default=0.2, help="flux bias in Phi0 (default: %(default)s)")
    sp.add_argument("--noise", type=float, default=0.01, help="relative noise level (default: %(default)s)")
    sp.set_defaults(func=cmd_sequence)

    sp = sub.add_parser("budget", parents=[common], help="room-temperature power, heat and photons")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--netlist", type=existing_file)
    g.add_argument("--design", choices=sorted(designs.DESIGNS))
    sp.add_argument("--drive-port", type=int, default=1)
    sp.add_argument("--qubit-port", type=int, default=2)
    sp.add_argument("--chain", type=chain_spec, default=budget.DEFAULT_CHAIN, help="label:dB@T,... (default: %(default)s)")
    sp.add_argument("--gate", type=si("s"), default="10ns", help="pi-pulse length (default: %(default)s)")
    sp.add_argument("--t1ext", type=si("s"), default=None, help="drive-line T1 at f_q (resonant mode)")
    sp.add_argument("--mode", choices=("resonant", "subharmonic"), default="resonant")
    sp.add_argument("--fq", type=si("Hz"), default="5GHz")
    sp.add_argument("--ec", type=si("Hz"), default="233MHz")
    sp.add_argument("--cq", type=si("F"), default="83fF")
    sp.add_argument("--z", type=si("ohm"), default=50.0)
    sp.set_defaults(func=cmd_budget)

    sp = sub.add_parser("reproduce", parents=[common], help="run the acceptance checks")
    sp.add_argument("--criteria", type=int_list, default=None, help="e.g. 1,2,9 (default: all)")
    sp.add_argument("--cases", type=int, default=acceptance.PROPERTY_CASES,
                    help="random cases per property (default: %(default)s)")
    sp.set_defaults(func=cmd_reproduce)
    return ap


def read_config(path) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"{path}:{lineno}: expected key = value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _apply_config(parser, argv, cfg):
    """Re-parse with config values as defaults; command-line flags still win."""
    pre = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[pre.command]
    known = {a.dest: a for a in sub._actions}
    for key, value in cfg.items():
        if key not in known or key in ("help",):
            raise UsageError(f"config key {key!r} is not an option of {pre.command!r}")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            sub.set_defaults(**{key: value.lower() in ("1", "true", "yes", "on")})
        else:
            conv = action.type or str
            try:
                sub.set_defaults(**{key: conv(value)})
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"config key {key!r}: {exc}") from None
    return parser.parse_args(argv)


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            args = _apply_config(parser, argv, read_config(args.config))
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"driveline: usage error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)
    try:
        out.mkdir(parents=True, exist_ok=True)
        return args.func(args, out)
    except UsageError as exc:
        print(f"driveline: usage error: {exc}", file=sys.stderr)
        return 2
    except DrivelineError as exc:
        hint = f"\n  hint: {exc.hint}" if exc.hint else ""
        print(f"driveline: error in {exc.module}: {exc}{hint}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"driveline: error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
