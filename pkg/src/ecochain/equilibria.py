"""Equilibria of every model variant, their feasibility and the rho thresholds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import ModelVariant, ParameterSet, make_rhs

NAN_STATE = (math.nan,) * 4

# condition-number ceiling for the coexistence linear solve
COND_LIMIT = 1e12


@dataclass(frozen=True)
class Equilibrium:
    """A labeled equilibrium point.

    ``status`` is ``"ok"`` for a computed point, ``"absent"`` for points that
    only exist at infinity in this variant, and ``"degenerate"`` when the
    defining formula has a vanishing denominator.  Non-ok records carry a NaN
    state and are never feasible.
    """

    label: str
    state: tuple[float, float, float, float]
    variant: ModelVariant
    feasible: bool
    provenance: str = "closed-form"
    residual: float = math.nan
    status: str = "ok"
    note: str = ""

    @property
    def x(self) -> np.ndarray:
        return np.array(self.state)


def _make(label: str, state, variant: ModelVariant, p: ParameterSet,
          provenance: str = "closed-form", feasible: bool | None = None) -> Equilibrium:
    x = np.asarray(state, dtype=float)
    finite = bool(np.all(np.isfinite(x)))
    if feasible is None:
        feasible = finite and bool(np.all(x >= 0))
    residual = float(np.linalg.norm(make_rhs(variant, p)(x))) if finite else math.nan
    return Equilibrium(label, tuple(float(v) for v in x), variant, feasible and finite,
                       provenance, residual)


def _absent(label: str, variant: ModelVariant, note: str, status: str = "absent") -> Equilibrium:
    return Equilibrium(label, NAN_STATE, variant, False, "closed-form", math.nan, status, note)


@dataclass(frozen=True)
class ThresholdPair:
    rho1: float
    rho2: float


def rho1(p: ParameterSet) -> float:
    return p.l * p.K / p.mu


def rho2(p: ParameterSet) -> float:
    return p.f * p.r / (p.b * p.tau) * (1.0 - p.mu / (p.l * p.K))


def thresholds(p: ParameterSet) -> ThresholdPair:
    return ThresholdPair(rho1(p), rho2(p))


def disease_free_equilibria(p: ParameterSet) -> list[Equilibrium]:
    """D1, Dhat and Dstar of the logistic demographic (disease-free) model."""
    v = ModelVariant.LOGISTIC_DISEASE_FREE
    K, r, b, l, mu, q, f, tau = p.K, p.r, p.b, p.l, p.mu, p.q, p.f, p.tau
    t = thresholds(p)
    d1 = _make("D1", (0.0, 0.0, 0.0, K), v, p)
    dhat_state = (0.0, r / b * (1.0 - mu / (l * K)), 0.0, mu / l)
    dhat = _make("Dhat", dhat_state, v, p, feasible=t.rho1 >= 1)
    shrink = 1.0 - b * tau / (r * f)
    dstar_state = ((l * K * shrink - mu) / q, tau / f, 0.0, K * shrink)
    dstar = _make("Dstar", dstar_state, v, p, feasible=t.rho2 >= 1)
    return [d1, dhat, dstar]


def malthus_disease_free_equilibria(p: ParameterSet) -> list[Equilibrium]:
    v = ModelVariant.MALTHUS_DISEASE_FREE
    return [
        _make("E0t", (0.0, 0.0, 0.0, 0.0), v, p),
        _absent("D1", v, "bottom-prey-only point lies at infinity without carrying capacity"),
        _make("Dhat", (0.0, p.r / p.b, 0.0, p.mu / p.l), v, p),
        _absent("Dstar", v, "coexistence needs tau/f == r/b, which is non-generic"),
    ]


def malthus_equilibria(p: ParameterSet) -> list[Equilibrium]:
    v = ModelVariant.MALTHUS
    g, f, c, l, q, b = p.g, p.f, p.c, p.l, p.q, p.b
    beta, tau, nu, mu, r = p.beta, p.tau, p.nu, p.mu, p.r
    out = [
        _make("E0t", (0.0, 0.0, 0.0, 0.0), v, p),
        _make("E1t", (0.0, r / b, 0.0, mu / l), v, p),
        _absent("E2t", v, "bottom-prey-only point lies at infinity without carrying capacity"),
    ]
    if f * c == g * q:
        out.append(_absent("Estar_t", v, "fc == gq: coexistence formula degenerates", "degenerate"))
        return out
    v_num = beta * r * g * q - beta * r * f * c + b * g * mu * c - b * g * q * nu + b * tau * beta * c
    state = (
        (beta * r - nu * b) / (b * c),
        r / b,
        (b * tau - r * f) / (g * b),
        v_num / (g * b * c * l),
    )
    out.append(_make("Estar_t", state, v, p))
    return out


def malthus_feasibility_conditions(p: ParameterSet, printed: bool = False) -> tuple[bool, bool, bool]:
    """Closed-form feasibility tests for the Malthus coexistence point.

    The third test compares ``b(tau beta c + g(mu c - q nu)) / (r beta (fc - gq))``
    with 1.  Its direction flips with the sign of ``fc - gq``: the ratio must
    be ``<= 1`` when ``fc < gq`` and ``>= 1`` when ``fc > gq``.  Pass
    ``printed=True`` to always use ``<= 1``, which is only right for ``fc < gq``.
    """
    g, f, c, q, b = p.g, p.f, p.c, p.q, p.b
    beta, tau, nu, mu, r = p.beta, p.tau, p.nu, p.mu, p.r
    den = f * c - g * q
    ratio = b * (tau * beta * c + g * (mu * c - q * nu)) / (r * beta * den)
    third = ratio <= 1 if (printed or den < 0) else ratio >= 1
    return (r * beta / (b * nu) >= 1, r * f / (b * tau) <= 1, third)


def logistic_boundary_equilibria(p: ParameterSet) -> list[Equilibrium]:
    v = ModelVariant.LOGISTIC
    g, f, l, q, b = p.g, p.f, p.l, p.q, p.b
    beta, tau, nu, mu, r, K = p.beta, p.tau, p.nu, p.mu, p.r, p.K
    e1 = (0.0, r / b * (1.0 - mu / (l * K)), 0.0, mu / l)
    e3 = (
        0.0,
        nu / beta,
        (l * K * r * beta - l * K * b * nu - mu * r * beta) / (r * beta ** 2),
        K * (r * beta - b * nu) / (r * beta),
    )
    e4 = (
        (r * f * l * K - r * f * mu - tau * l * K * b) / (r * f * q),
        tau / f,
        0.0,
        K * (r * f - b * tau) / (r * f),
    )
    return [
        _make("E0", (0.0, 0.0, 0.0, 0.0), v, p),
        _make("E1", e1, v, p, feasible=rho1(p) >= 1),
        _make("E2", (0.0, 0.0, 0.0, K), v, p),
        _make("E3", e3, v, p),
        _make("E4", e4, v, p),
    ]


def coexistence_system(p: ParameterSet) -> tuple[np.ndarray, np.ndarray]:
    """Matrix and right-hand side of the linear equations for interior equilibria."""
    A = np.array([
        [0.0, p.f, p.g, 0.0],
        [-p.q, 0.0, -p.beta, p.l],
        [-p.c, p.beta, 0.0, 0.0],
        [0.0, p.b, 0.0, p.r / p.K],
    ])
    return A, np.array([p.tau, p.mu, p.nu, p.r])


def logistic_coexistence(p: ParameterSet) -> Equilibrium:
    """Interior equilibrium of the logistic model by one dense linear solve.

    Returns a ``"degenerate"`` record when the interaction matrix is
    numerically singular.
    """
    v = ModelVariant.LOGISTIC
    A, rhs = coexistence_system(p)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        return _absent("Estar", v, f"singular interaction matrix (cond={cond:.3g})", "degenerate")
    return _make("Estar", np.linalg.solve(A, rhs), v, p, provenance="linear-solve")


def logistic_equilibria(p: ParameterSet) -> list[Equilibrium]:
    return logistic_boundary_equilibria(p) + [logistic_coexistence(p)]


def find_equilibria(variant: ModelVariant | str, p: ParameterSet) -> list[Equilibrium]:
    """All equilibria of ``variant``, including absent/degenerate records."""
    variant = ModelVariant.parse(variant)
    return {
        ModelVariant.MALTHUS: malthus_equilibria,
        ModelVariant.LOGISTIC: logistic_equilibria,
        ModelVariant.LOGISTIC_DISEASE_FREE: disease_free_equilibria,
        ModelVariant.MALTHUS_DISEASE_FREE: malthus_disease_free_equilibria,
    }[variant](p)


@dataclass(frozen=True)
class InfeasibilityReport:
    state: tuple[float, float, float, float]
    negative: tuple[str, ...] = field(default=())

    @property
    def infeasible(self) -> bool:
        return bool(self.negative)


def remark1_infeasibility(p: ParameterSet) -> InfeasibilityReport:
    """Evaluate the Malthus point with the bottom prey wiped out (V = 0).

    Solving the P, S, I equilibrium conditions with V = 0 forces
    ``beta*I + q*P = -mu``, so P or I must come out negative.  The report
    lists which of the first three components are negative.
    """
    g, f, c, q = p.g, p.f, p.c, p.q
    beta, tau, nu, mu = p.beta, p.tau, p.nu, p.mu
    den = f * c - g * q
    if den == 0:
        raise ZeroDivisionError("fc == gq: the V = 0 point is undefined")
    state = (
        -(nu * f - g * mu - tau * beta) / den,
        (g * mu * c - g * q * nu + tau * beta * c) / (beta * den),
        -(mu * c * f - q * nu * f + q * tau * beta) / (beta * den),
        0.0,
    )
    neg = tuple(name for name, val in zip("PSI", state) if val < 0)
    return InfeasibilityReport(state, neg)


def remark2_gap(p: ParameterSet) -> float:
    """``nu/beta - r/b``: zero only when the predator-free Malthus subsystem has an equilibrium."""
    return p.nu / p.beta - p.r / p.b
