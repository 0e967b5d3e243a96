"""Damped Gauss-Newton (Levenberg-Marquardt) curve fitting.

Five model shapes cover the characterisation data: Lorentzian lines, decaying
cosines for Rabi oscillations, exponential decays for T1, the flux arch of a
symmetric SQUID transmon and plain polynomials. Each model carries an
analytic Jacobian and a data-driven initial guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateFitError, DrivelineError, FitStageError

MAX_ITER = 200
LAMBDA0 = 1e-3
LAMBDA_UP = 3.0
LAMBDA_DOWN = 2.0
GTOL = 1e-10
# Frequency scatter (Hz) of the flux-arch points per unit of relative noise.
ARCH_NOISE_HZ = 1e7
RANK_TOL = 1e-10
# Residual norm, relative to the data norm, treated as an exact fit.
ROUNDOFF = 1e-13
# Gradient cosine accepted when the iteration stalls at round-off level.
STALL_GTOL = 1e-6


@dataclass(frozen=True)
class FitModel:
    """A named model y = f(x, p) with Jacobian and auto-initialiser."""

    name: str
    param_names: tuple[str, ...]
    func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    jac: Callable[[np.ndarray, np.ndarray], np.ndarray]
    guess: Callable[[np.ndarray, np.ndarray], np.ndarray]

    @property
    def n_params(self):
        return len(self.param_names)

    def __call__(self, x, p):
        return self.func(np.asarray(x, dtype=float), np.asarray(p, dtype=float))


@dataclass(frozen=True)
class FitResult:
    model: str
    names: tuple[str, ...]
    values: np.ndarray
    sigma: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    gradient_norm: float = 0.0

    @property
    def params(self) -> dict[str, float]:
        return dict(zip(self.names, map(float, self.values)))

    @property
    def uncertainties(self) -> dict[str, float]:
        return dict(zip(self.names, map(float, self.sigma)))

    def __getitem__(self, name):
        return float(self.values[self.names.index(name)])


# --------------------------------------------------------------------------
# models


def _lorentzian(x, p):
    c, w, a, o = p
    u = 2 * (x - c) / w
    return o + a / (1 + u * u)


def _lorentzian_jac(x, p):
    c, w, a, o = p
    u = 2 * (x - c) / w
    d = 1 + u * u
    dy_du = -2 * a * u / d ** 2
    return np.column_stack([dy_du * (-2 / w), dy_du * (-u / w), 1 / d, np.ones_like(x)])


def _lorentzian_guess(x, y):
    off = float(np.median(y))
    hi, lo = float(np.max(y)), float(np.min(y))
    k = int(np.argmax(y)) if hi - off >= off - lo else int(np.argmin(y))
    amp = float(y[k] - off)
    above = np.abs(y - off) >= abs(amp) / 2
    i0 = i1 = k
    while i0 > 0 and above[i0 - 1]:
        i0 -= 1
    while i1 < x.size - 1 and above[i1 + 1]:
        i1 += 1
    step = float(np.min(np.abs(np.diff(x)))) if x.size > 1 else 1.0
    width = max(float(x[i1] - x[i0]), step)
    return np.array([x[k], width, amp, off])


def _dcos(x, p):
    f, gam, a, ph, o = p
    return o + a * np.exp(-gam * x) * np.cos(2 * np.pi * f * x + ph)


def _dcos_jac(x, p):
    f, gam, a, ph, o = p
    e = np.exp(-gam * x)
    arg = 2 * np.pi * f * x + ph
    c, s = np.cos(arg), np.sin(arg)
    return np.column_stack([-a * e * s * 2 * np.pi * x, -x * a * e * c, e * c, -a * e * s,
                            np.ones_like(x)])


def _dcos_guess(x, y):
    off = float(np.mean(y))
    n = x.size
    dt = float(np.mean(np.diff(x)))
    pad = 16 * n
    spec = np.abs(np.fft.rfft(y - off, pad))
    freqs = np.fft.rfftfreq(pad, dt)
    k = 1 + int(np.argmax(spec[1:]))
    f0 = float(freqs[k])
    # amplitude and phase by linear least squares at the detected frequency
    basis = np.column_stack([np.cos(2 * np.pi * f0 * x), np.sin(2 * np.pi * f0 * x)])
    (ca, sb), *_ = np.linalg.lstsq(basis, y - off, rcond=None)
    amp = math.hypot(ca, sb)
    phase = math.atan2(-sb, ca)
    return np.array([f0, 0.0, amp, phase, off])


def _exp(x, p):
    a, t1, o = p
    return o + a * np.exp(-x / t1)


def _exp_jac(x, p):
    a, t1, o = p
    e = np.exp(-x / t1)
    return np.column_stack([e, a * e * x / t1 ** 2, np.ones_like(x)])


def _exp_guess(x, y):
    rising = y[-1] > y[0]
    z = -y if rising else y
    span = float(np.ptp(z)) or 1.0
    off = float(np.min(z)) - 1e-3 * span
    pos = z - off
    slope, icept = np.polyfit(x, np.log(pos), 1)
    t1 = -1.0 / slope if slope < 0 else float(np.ptp(x)) or 1.0
    a = math.exp(icept)
    if rising:
        a, off = -a, -off
    return np.array([a, t1, off])


def _arch(x, p):
    fmax, ec, x0 = p
    return (fmax + ec) * np.sqrt(np.abs(np.cos(np.pi * (x - x0)))) - ec


def _arch_jac(x, p):
    fmax, ec, x0 = p
    c = np.cos(np.pi * (x - x0))
    r = np.sqrt(np.abs(c))
    # d sqrt|c| / d x0 = sign(c) * pi sin / (2 sqrt|c|)
    with np.errstate(divide="ignore", invalid="ignore"):
        dr = np.where(r > 0, np.sign(c) * np.pi * np.sin(np.pi * (x - x0)) / (2 * r), 0.0)
    return np.column_stack([r, r - 1, (fmax + ec) * dr])


def _arch_guess(x, y):
    k = int(np.argmax(y))
    return np.array([float(y[k]), 0.03 * float(y[k]), float(x[k])])


MODELS = {
    "lorentzian": FitModel("lorentzian", ("center", "width", "amplitude", "offset"),
                           _lorentzian, _lorentzian_jac, _lorentzian_guess),
    "decaying_cosine": FitModel("decaying_cosine", ("frequency", "decay_rate", "amplitude", "phase", "offset"),
                                _dcos, _dcos_jac, _dcos_guess),
    "exponential_decay": FitModel("exponential_decay", ("amplitude", "t1", "offset"),
                                  _exp, _exp_jac, _exp_guess),
    "flux_arch": FitModel("flux_arch", ("f_max", "e_c", "phi_offset"), _arch, _arch_jac, _arch_guess),
}


def polynomial(degree: int) -> FitModel:
    """Polynomial with coefficients c0..c_degree in increasing power."""
    if degree < 0:
        raise ValueError("degree must be >= 0")

    def func(x, p):
        return np.polynomial.polynomial.polyval(x, p)

    def jac(x, p):
        return np.vander(x, degree + 1, increasing=True)

    def guess(x, y):
        return np.polynomial.polynomial.polyfit(x, y, degree)

    return FitModel(f"polynomial({degree})", tuple(f"c{k}" for k in range(degree + 1)), func, jac, guess)


def get_model(name: str) -> FitModel:
    if name in MODELS:
        return MODELS[name]
    if name.startswith("polynomial"):
        deg = name[len("polynomial"):].strip("()") or "1"
        return polynomial(int(deg))
    raise ValueError(f"unknown model {name!r}; choose from {sorted(MODELS)} or polynomial(N)")


# --------------------------------------------------------------------------
# engine


def _scaled_gradient(J, r):
    """Largest |cosine| between the residual and a Jacobian column."""
    rn = np.linalg.norm(r)
    cn = np.linalg.norm(J, axis=0)
    if rn == 0:
        return 0.0
    ok = cn > 0
    if not np.any(ok):
        return 0.0
    return float(np.max(np.abs(J[:, ok].T @ r) / (cn[ok] * rn)))


def levenberg_marquardt(residual, jacobian, p0, max_iter=MAX_ITER, gtol=GTOL, xtol=1e-14, ftol=1e-15,
                        cost_floor=0.0):
    """Minimise ``sum(residual(p)**2)`` from ``p0``.

    Damping follows Marquardt's diagonal scaling, starting at 1e-3 and moving
    x3 up on a rejected step and /2 down on an accepted one. A cost at or
    below ``cost_floor`` (the round-off level of the data) counts as an exact
    fit.

    Returns
    -------
    p, J, r, iterations, converged
    """
    p = np.array(p0, dtype=float)
    r = residual(p)
    cost = float(r @ r)
    lam = LAMBDA0
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        J = jacobian(p)
        g = J.T @ r
        if _scaled_gradient(J, r) <= gtol or cost <= cost_floor:
            converged = True
            it -= 1
            break
        A = J.T @ J
        d = np.diag(A).copy()
        d[d == 0] = 1.0
        accepted = False
        while lam < 1e16:
            try:
                step = np.linalg.solve(A + lam * np.diag(d), -g)
            except np.linalg.LinAlgError:
                lam *= LAMBDA_UP
                continue
            p_new = p + step
            # trial points may leave the model's domain; those are rejected below
            with np.errstate(over="ignore", invalid="ignore"):
                r_new = residual(p_new)
                cost_new = float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new < cost:
                accepted = True
                break
            lam *= LAMBDA_UP
        if not accepted:
            converged = _scaled_gradient(J, r) <= STALL_GTOL or cost <= cost_floor
            break
        small_step = np.all(np.abs(step) <= xtol * (np.abs(p) + xtol))
        small_drop = cost - cost_new <= ftol * cost
        p, r, cost = p_new, r_new, cost_new
        lam = max(lam / LAMBDA_DOWN, 1e-15)
        if small_step or small_drop:
            converged = _scaled_gradient(jacobian(p), r) <= STALL_GTOL or cost <= cost_floor
            break
    J = jacobian(p)
    return p, J, r, it, converged


def fit(model: FitModel | str, x: Sequence[float], y: Sequence[float], initial=None,
        max_iter: int = MAX_ITER) -> FitResult:
    """Least-squares fit of ``model`` to the samples.

    Raises
    ------
    DegenerateFitError
        When the Jacobian at the optimum does not have full column rank.
    """
    model = get_model(model) if isinstance(model, str) else model
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise ValueError("x and y lengths differ")
    if x.size < model.n_params + 1:
        raise ValueError(f"{model.name} needs at least {model.n_params + 1} points, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("data contain non-finite values")
    p0 = model.guess(x, y) if initial is None else np.asarray(initial, dtype=float)
    p, J, r, it, ok = levenberg_marquardt(lambda q: model.func(x, q) - y, lambda q: model.jac(x, q),
                                          p0, max_iter=max_iter,
                                          cost_floor=(ROUNDOFF * float(np.linalg.norm(y))) ** 2)
    cn = np.linalg.norm(J, axis=0)
    Js = J / np.where(cn > 0, cn, 1.0)
    sv = np.linalg.svd(Js, compute_uv=False)
    if np.any(cn == 0) or sv[-1] <= RANK_TOL * sv[0]:
        raise DegenerateFitError(f"{model.name} fit is degenerate: parameters are not all constrained")
    rss = float(r @ r)
    dof = x.size - model.n_params
    cov = np.linalg.inv(J.T @ J) * (rss / dof)
    sigma = np.sqrt(np.clip(np.diag(cov), 0, None))
    return FitResult(model.name, model.param_names, p, sigma, math.sqrt(rss), it, ok,
                     _scaled_gradient(J, r))


# --------------------------------------------------------------------------
# amplitude scaling laws


@dataclass(frozen=True)
class ScalingFit:
    """Pure power laws stark = c2 V^2 and rabi = c3 V^3 with relative residual norms."""

    c2: float
    c3: float
    stark_residual: float
    rabi_residual: float


def _power_fit(v, y, k):
    b = v ** k
    denom = float(b @ b)
    c = float(b @ y) / denom if denom > 0 else 0.0
    res = y - c * b
    ny = float(np.linalg.norm(y))
    return c, (float(np.linalg.norm(res)) / ny if ny > 0 else float(np.linalg.norm(res)))


def fit_stark_rabi_scaling(amplitudes, stark, rabi) -> ScalingFit:
    """Fit Stark shifts to c2 V^2 and Rabi rates to c3 V^3 without lower-order terms."""
    v = np.asarray(amplitudes, dtype=float)
    s = np.asarray(stark, dtype=float)
    r = np.asarray(rabi, dtype=float)
    if v.size < 4 or s.size != v.size or r.size != v.size:
        raise ValueError("need at least 4 amplitude points with matching stark and rabi values")
    c2, rs = _power_fit(v, s, 2)
    c3, rr = _power_fit(v, r, 3)
    return ScalingFit(c2, c3, rs, rr)


def synthesize_trace(model: FitModel | str, params, x, noise_sigma=0.0, seed=0) -> np.ndarray:
    """Model values plus seeded Gaussian noise."""
    model = get_model(model) if isinstance(model, str) else model
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    y = model(x, params)
    if noise_sigma > 0:
        y = y + np.random.default_rng(seed).normal(0.0, noise_sigma, y.shape)
    return y


# --------------------------------------------------------------------------
# characterisation sequence


@dataclass(frozen=True)
class DeviceModel:
    """A simulated flux-tunable qubit with its readout resonator and drive line.

    ``params`` is the sweet-spot transmon (``f_max`` set); ``netlist`` is the
    drive circuit with the drive on port 1 and the qubit on port 2.
    """

    params: object
    f_r: float
    g: float
    kappa: float
    loss: object
    netlist: object = None
    v_drive: float = 1e-5
    z_line: float = 50.0
    flux_offset: float = 0.0
    linewidth: float = 2e6


@dataclass(frozen=True)
class SequenceReport:
    f_r: float
    f_r_sigma: float
    f_q: float
    f_q_sigma: float
    f_rabi: float
    f_rabi_sigma: float
    t1: float
    t1_sigma: float
    t1_components: dict = field(default_factory=dict)


def _stage(name, fn):
    try:
        res = fn()
    except DrivelineError as exc:
        raise FitStageError(f"{name} stage failed: {exc}") from exc
    if not res.converged:
        raise FitStageError(f"{name} stage did not converge")
    return res


def emulate_characterization_sequence(device: DeviceModel, bias: float, noise_sigma: float = 0.0,
                                      seed: int = 0) -> SequenceReport:
    """Resonator, flux arch, qubit spectroscopy, Rabi and T1 fits on synthetic data.

    ``bias`` is the flux in units of the flux quantum. Data come from the
    dispersive resonator pull, the symmetric-SQUID dispersion, the drive-line
    admittance and the loss model; each stage fits its own trace and feeds the
    next one its starting point. ``noise_sigma`` is relative to each trace's
    scale.
    """
    from . import coupling, dynamics

    p0 = device.params
    rng_seeds = np.random.SeedSequence(seed).generate_state(5)
    phi = bias - device.flux_offset
    p = dynamics.params_at_flux(p0, phi)
    f_q = p.f_q

    # resonator: dip at the dispersively pulled frequency
    pull = device.g ** 2 / (device.f_r - f_q)
    f_r_true = device.f_r + pull
    xr = np.linspace(f_r_true - 10 * device.kappa, f_r_true + 10 * device.kappa, 201)
    yr = synthesize_trace("lorentzian", [f_r_true, device.kappa, -1.0, 1.0], xr, noise_sigma, rng_seeds[0])
    res_r = _stage("resonator", lambda: fit("lorentzian", xr, yr))

    # flux arch: qubit frequency over a bias sweep
    xa = np.linspace(-0.4, 0.4, 41) + device.flux_offset
    fa = dynamics.flux_to_frequency(p0, xa - device.flux_offset)
    ya = fa + np.random.default_rng(rng_seeds[1]).normal(0.0, noise_sigma * ARCH_NOISE_HZ, fa.shape)
    res_a = _stage("flux arch", lambda: fit("flux_arch", xa, ya))
    f_pred = float(MODELS["flux_arch"](np.array([bias]), res_a.values)[0])

    # qubit spectroscopy around the arch prediction
    w = device.linewidth
    xs = np.linspace(f_pred - 15 * w, f_pred + 15 * w, 301)
    ys = synthesize_trace("lorentzian", [f_q, w, 1.0, 0.0], xs, noise_sigma, rng_seeds[2])
    res_s = _stage("qubit spectroscopy", lambda: fit("lorentzian", xs, ys))
    f_q_fit = res_s["center"]

    # Rabi: resonant drive through the drive line
    if device.netlist is not None:
        gamma_ext = coupling.gamma_from_netlist(device.netlist, f_q, p.c_q)
    else:
        gamma_ext = 0.0
    t1_ext = math.inf if gamma_ext == 0 else 1.0 / gamma_ext
    f_rabi_true = coupling.rabi_from_admittance(gamma_ext, f_q, device.z_line, device.v_drive) \
        if gamma_ext > 0 else 0.0
    t1_diel = coupling.t1_dielectric(p, device.loss)
    loss = device.loss
    t1_p = coupling.t1_purcell(coupling.LossChannels(loss.tan_delta, loss.temperature, device.f_r,
                                                     device.kappa, device.g), f_q)
    parts = {"ext": t1_ext, "dielectric": t1_diel, "purcell": t1_p}
    if loss.t1_other:
        parts["other"] = loss.t1_other
    t1 = coupling.t1_total(parts.values())
    if f_rabi_true > 0:
        pulse = dynamics.PulseSpec(f_d=f_q, f_rabi=f_rabi_true, duration=4.0 / f_rabi_true)
        h = dynamics.build_hamiltonian("rotating-resonant", p, pulse, d=3)
        tr = dynamics.evolve(h, (0.0, pulse.duration), n_samples=161)
        yrab = tr.excited + (np.random.default_rng(rng_seeds[3]).normal(0, noise_sigma, tr.t.size)
                             if noise_sigma > 0 else 0.0)
        res_rabi = _stage("Rabi", lambda: fit("decaying_cosine", tr.t, yrab))
        f_rabi, f_rabi_sig = abs(res_rabi["frequency"]), res_rabi.uncertainties["frequency"]
    else:
        f_rabi, f_rabi_sig = 0.0, 0.0

    # T1: excited population after a pi pulse
    xt = np.linspace(0, 5 * t1, 101) if math.isfinite(t1) else np.linspace(0, 1, 101)
    yt = synthesize_trace("exponential_decay", [1.0, t1, 0.0], xt, noise_sigma, rng_seeds[4])
    res_t = _stage("T1", lambda: fit("exponential_decay", xt, yt))

    return SequenceReport(res_r["center"], res_r.uncertainties["center"], f_q_fit,
                          res_s.uncertainties["center"], f_rabi, f_rabi_sig, res_t["t1"],
                          res_t.uncertainties["t1"], parts)
