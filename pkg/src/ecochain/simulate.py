"""Adaptive Dormand-Prince 5(4) integration and long-term behaviour checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibria import Equilibrium
from .model import ModelVariant, ParameterSet, check_params, make_rhs, total_population

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

H_MIN = 1e-14

# PI step control with the DOPRI5 gains: h *= 0.9 * err**-0.17 * err_prev**0.04
_ALPHA = 0.2 - 0.75 * 0.04
_BETA = 0.04
_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-8
    atol: float = 1e-10
    h0: float = 1e-2
    hmax: float = 1.0
    tmax: float = 100.0
    max_steps: int = 2_000_000

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("rtol and atol must be positive")
        if not (0 < self.h0 <= self.hmax):
            raise ValueError("need 0 < h0 <= hmax")
        if not self.tmax > 0:
            raise ValueError("tmax must be positive")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), 4)
    variant: ModelVariant
    params: ParameterSet
    accepted: int = 0
    rejected: int = 0
    nfev: int = 0
    terminated: str | None = None

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def tail(self, fraction: float = 0.2) -> tuple[np.ndarray, np.ndarray]:
        start = self.times[-1] * (1.0 - fraction)
        mask = self.times >= start
        return self.times[mask], self.states[mask]


def _hermite(t0, x0, f0, t1, x1, f1, t):
    h = t1 - t0
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * x0 + h10 * h * f0 + h01 * x1 + h11 * h * f1


def integrate(variant: ModelVariant | str, p: ParameterSet, x0,
              cfg: IntegratorConfig | None = None, t_eval=None) -> Trajectory:
    """Integrate from ``x0`` over ``[0, cfg.tmax]``.

    States are stored at every accepted step, plus at the requested
    ``t_eval`` times by cubic Hermite interpolation.  A step that pushes any
    component below ``-atol`` is rejected and halved; smaller negative
    excursions are snapped to zero.  Steps shrinking below 1e-14 end the
    run early with the reason in ``Trajectory.terminated``.
    """
    variant = ModelVariant.parse(variant)
    cfg = cfg or IntegratorConfig()
    check_params(p, variant)
    x = np.array(x0, dtype=float)
    if x.shape != (4,) or not np.all(np.isfinite(x)) or np.any(x < 0):
        raise ValueError(f"initial state must be 4 finite nonnegative values, got {x0}")
    if variant.disease_free and x[2] != 0:
        raise ValueError("disease-free variants require I = 0")

    rhs = make_rhs(variant, p)
    rtol, atol, tmax = cfg.rtol, cfg.atol, cfg.tmax
    samples = np.sort(np.unique(np.asarray(t_eval, dtype=float))) if t_eval is not None else np.empty(0)
    samples = samples[(samples > 0) & (samples < tmax)]
    si = 0

    t = 0.0
    fx = rhs(x)
    nfev = 1
    times = [t]
    states = [x.copy()]
    h = min(cfg.h0, tmax)
    err_prev = 1e-4
    accepted = rejected = 0
    reason = None
    k = np.empty((7, 4))

    while t < tmax:
        if accepted + rejected >= cfg.max_steps:
            reason = f"step budget of {cfg.max_steps} exhausted at t={t:.6g}"
            break
        if h < H_MIN:
            reason = f"step size underflow (h={h:.3g}) at t={t:.6g}"
            break
        last = t + h >= tmax
        if last:
            h = tmax - t
        k[0] = fx
        for i in range(1, 7):
            k[i] = rhs(x + h * (np.dot(_A[i], k[:i])))
        nfev += 6
        x_new = x + h * (_B5 @ k)
        f_new = k[6].copy()
        scale = atol + rtol * np.maximum(np.abs(x), np.abs(x_new))
        err = float(np.max(np.abs(h * (_E @ k)) / scale))

        if not np.all(np.isfinite(x_new)):
            rejected += 1
            h *= 0.5
            continue
        if err > 1.0:
            rejected += 1
            h *= max(_MIN_FACTOR, _SAFETY * err ** -_ALPHA)
            continue
        if np.any(x_new < -atol):
            rejected += 1
            h *= 0.5
            continue

        neg = x_new < 0
        if np.any(neg):
            x_new[neg] = 0.0
            f_new = rhs(x_new)
            nfev += 1

        t_new = tmax if last else t + h
        while si < len(samples) and samples[si] < t_new:
            times.append(float(samples[si]))
            states.append(_hermite(t, x, fx, t_new, x_new, f_new, samples[si]))
            si += 1
        t, x, fx = t_new, x_new, f_new
        times.append(t)
        states.append(x.copy())
        accepted += 1

        err = max(err, 1e-10)
        factor = _SAFETY * err ** -_ALPHA * err_prev ** _BETA
        h = min(cfg.hmax, h * min(_MAX_FACTOR, max(_MIN_FACTOR, factor)))
        err_prev = err

    return Trajectory(np.array(times), np.array(states), variant, p,
                      accepted, rejected, nfev, reason)


# -- monitors -----------------------------------------------------------------

@dataclass(frozen=True)
class BoundednessReport:
    theta: float
    psi_star: float
    bound: float
    w_max: float
    holds: bool


def boundedness_constants(p: ParameterSet) -> tuple[float, float]:
    """``theta = min(tau, mu, nu)`` and the parabola vertex ``(r+theta)^2 K / (4r)``."""
    theta = min(p.tau, p.mu, p.nu)
    return theta, (p.r + theta) ** 2 * p.K / (4.0 * p.r)


def boundedness_monitor(traj: Trajectory, p: ParameterSet) -> BoundednessReport:
    """Check ``W(t) <= max(W(0), psi*/theta)`` along a logistic trajectory."""
    if not traj.variant.logistic:
        raise ValueError("boundedness theorem requires finite K (logistic variant)")
    theta, psi = boundedness_constants(p)
    w = traj.states.sum(axis=1)
    bound = max(total_population(traj.states[0]), psi / theta)
    w_max = float(np.max(w))
    return BoundednessReport(theta, psi, bound, w_max, w_max <= bound + 1e-9 * bound)


def lv_first_integral(p: ParameterSet, S, V):
    """Classical Lotka-Volterra invariant of the ``P = I = 0`` Malthus face."""
    S = np.asarray(S, dtype=float)
    V = np.asarray(V, dtype=float)
    if np.any(S <= 0) or np.any(V <= 0):
        raise ValueError("first integral needs S > 0 and V > 0")
    C = p.b * S - p.r * np.log(S) + p.l * V - p.mu * np.log(V)
    return C if C.ndim else float(C)


EXTINCT = 1e-6


@dataclass(frozen=True)
class LongTermClass:
    kind: str  # "converged" | "oscillatory" | "undetermined"
    state: tuple[float, ...]
    label: str | None
    minima: tuple[float, ...]
    maxima: tuple[float, ...]
    extinct: tuple[str, ...]

    @property
    def peak_to_trough(self) -> np.ndarray:
        return np.array(self.maxima) - np.array(self.minima)


def detect_longterm(traj: Trajectory, equilibria: list[Equilibrium] = (),
                    tol: float = 1e-6, window: float = 0.2) -> LongTermClass:
    """Classify the tail of a trajectory (last ``window`` fraction of time).

    Converged when every component varies by less than ``tol`` over the tail,
    with the final state matched to the nearest feasible equilibrium within
    ``10 * tol``.  Oscillatory when some component's peak-to-trough exceeds
    ``10 * tol``.
    """
    _, tail = traj.tail(window)
    lo, hi = tail.min(axis=0), tail.max(axis=0)
    spread = hi - lo
    final = traj.final
    extinct = tuple(n for n, m in zip("PSIV", hi) if m < EXTINCT)
    kind, label = "undetermined", None
    if np.all(spread < tol):
        kind = "converged"
        best = math.inf
        for e in equilibria:
            if not e.feasible:
                continue
            d = float(np.max(np.abs(e.x - final)))
            if d < best:
                best, label = d, e.label
        if best > 10 * tol:
            label = None
    elif np.any(spread > 10 * tol):
        kind = "oscillatory"
    return LongTermClass(kind, tuple(final), label, tuple(lo), tuple(hi), extinct)
