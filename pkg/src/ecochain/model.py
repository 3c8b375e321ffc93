"""Parameters, model variants, vector fields and Jacobians of the food chain.

State vectors are always 4 long and ordered ``(P, S, I, V)``: top predator,
susceptible and infected intermediate population, bottom prey.  The
disease-free variants store ``Q = S + I`` in the ``S`` slot and keep ``I = 0``.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

PARAM_NAMES = ("g", "f", "c", "l", "q", "b", "beta", "tau", "nu", "mu", "r", "K")
STATE_NAMES = ("P", "S", "I", "V")


class ModelVariant(enum.Enum):
    MALTHUS = "malthus"
    LOGISTIC = "logistic"
    LOGISTIC_DISEASE_FREE = "logistic-disease-free"
    MALTHUS_DISEASE_FREE = "malthus-disease-free"

    @property
    def logistic(self) -> bool:
        return self in (ModelVariant.LOGISTIC, ModelVariant.LOGISTIC_DISEASE_FREE)

    @property
    def disease_free(self) -> bool:
        return self in (ModelVariant.LOGISTIC_DISEASE_FREE, ModelVariant.MALTHUS_DISEASE_FREE)

    @property
    def dim(self) -> int:
        return 3 if self.disease_free else 4

    @classmethod
    def parse(cls, name: "str | ModelVariant") -> "ModelVariant":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower().replace("_", "-"))
        except ValueError:
            choices = ", ".join(v.value for v in cls)
            raise ValueError(f"unknown variant {name!r} (expected one of {choices})") from None


@dataclass(frozen=True)
class ParameterSet:
    """The twelve rates of the model.

    ``nu`` is the infected mortality, i.e. natural plus disease-induced
    mortality.  Use :meth:`from_mu0` to build it from the disease-induced
    part.  ``K`` is ignored by the Malthus variants and may be ``inf``.
    """

    g: float
    f: float
    c: float
    l: float
    q: float
    b: float
    beta: float
    tau: float
    nu: float
    mu: float
    r: float
    K: float = math.inf

    @classmethod
    def from_mu0(cls, *, mu0: float, **kw: float) -> "ParameterSet":
        if "nu" in kw:
            raise TypeError("give either nu or mu0, not both")
        return cls(nu=kw["mu"] + mu0, **kw)

    @classmethod
    def from_mapping(cls, values: Mapping[str, float]) -> "ParameterSet":
        return cls(**{k: float(values[k]) for k in PARAM_NAMES if k in values})

    def replace(self, **changes: float) -> "ParameterSet":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in PARAM_NAMES}

    @property
    def mu0(self) -> float:
        return self.nu - self.mu


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "valid" if self.ok else "violated: " + ", ".join(self.violations)


class ParameterError(ValueError):
    """Raised when a parameter set fails validation."""

    def __init__(self, report: ValidationReport):
        super().__init__(str(report))
        self.report = report


def validate_params(p: ParameterSet, variant: ModelVariant | str) -> ValidationReport:
    """List every violated constraint by name; an empty report means valid."""
    variant = ModelVariant.parse(variant)
    bad: list[str] = []
    for name in PARAM_NAMES[:-1]:
        v = getattr(p, name)
        if not (math.isfinite(v) and v > 0):
            bad.append(f"{name}>0")
    if variant.logistic and not (math.isfinite(p.K) and p.K > 0):
        bad.append("K>0")
    for small, big in (("g", "c"), ("f", "q"), ("l", "b")):
        if not getattr(p, small) < getattr(p, big):
            bad.append(f"{small}<{big}")
    if not p.nu >= p.mu:
        bad.append("nu>=mu")
    return ValidationReport(tuple(bad))


def check_params(p: ParameterSet, variant: ModelVariant | str) -> None:
    report = validate_params(p, variant)
    if not report.ok:
        raise ParameterError(report)


def _as_state(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (4,):
        raise ValueError(f"state must have 4 components (P, S, I, V), got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"non-finite state {x}")
    return x


def make_rhs(variant: ModelVariant | str, p: ParameterSet) -> Callable[[np.ndarray], np.ndarray]:
    """Unchecked right-hand side ``x -> dx/dt`` for the integrator's inner loop."""
    variant = ModelVariant.parse(variant)
    g, f, c, l, q, b = p.g, p.f, p.c, p.l, p.q, p.b
    beta, tau, nu, mu, r = p.beta, p.tau, p.nu, p.mu, p.r
    inv_k = 1.0 / p.K if variant.logistic else 0.0

    if variant.disease_free:
        def rhs(x):
            P, S, _, V = x
            return np.array([
                P * (f * S - tau),
                S * (l * V - q * P - mu),
                0.0,
                V * (r * (1.0 - V * inv_k) - b * S),
            ])
    else:
        def rhs(x):
            P, S, I, V = x
            return np.array([
                P * (g * I + f * S - tau),
                S * (l * V - beta * I - q * P - mu),
                I * (beta * S - c * P - nu),
                V * (r * (1.0 - V * inv_k) - b * S),
            ])
    return rhs


def vector_field(variant: ModelVariant | str, p: ParameterSet, x) -> np.ndarray:
    """Time derivative of the state ``(P, S, I, V)``.

    Negative components are rejected rather than clamped, and disease-free
    variants require ``I == 0``.
    """
    variant = ModelVariant.parse(variant)
    x = _as_state(x)
    if np.any(x < 0):
        raise ValueError(f"negative state component in {x}")
    if variant.disease_free and x[2] != 0:
        raise ValueError("disease-free variants require I = 0")
    return make_rhs(variant, p)(x)


def _full_jacobian(variant: ModelVariant, p: ParameterSet, x: np.ndarray) -> np.ndarray:
    P, S, I, V = x
    g, f, c, l, q, b = p.g, p.f, p.c, p.l, p.q, p.b
    beta, tau, nu, mu, r = p.beta, p.tau, p.nu, p.mu, p.r
    if variant.disease_free:
        I, g, beta = 0.0, 0.0, 0.0
    if variant.logistic:
        vv = r * (1.0 - V / p.K) - b * S - V * r / p.K
    else:
        vv = r - b * S
    return np.array([
        [g * I + f * S - tau, f * P, g * P, 0.0],
        [-q * S, l * V - mu - beta * I - q * P, -beta * S, l * S],
        [-I * c, beta * I, -nu + beta * S - c * P, 0.0],
        [0.0, -V * b, 0.0, vv],
    ])


_REDUCED = [0, 1, 3]


def jacobian(variant: ModelVariant | str, p: ParameterSet, x) -> np.ndarray:
    """Analytic Jacobian; 3x3 in ``(P, Q, V)`` for the disease-free variants."""
    variant = ModelVariant.parse(variant)
    J = _full_jacobian(variant, p, _as_state(x))
    if variant.disease_free:
        return J[np.ix_(_REDUCED, _REDUCED)]
    return J


def jacobian_fd(variant: ModelVariant | str, p: ParameterSet, x, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian with per-component step ``h * max(1, |x_i|)``."""
    variant = ModelVariant.parse(variant)
    if not (h > 0 and math.isfinite(h)):
        raise ValueError(f"step size must be positive, got {h}")
    x = _as_state(x)
    rhs = make_rhs(variant, p)
    idx = _REDUCED if variant.disease_free else range(4)
    J = np.zeros((4, 4))
    for j in idx:
        step = h * max(1.0, abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += step
        xm[j] -= step
        width = xp[j] - xm[j]
        if width == 0.0:
            raise ValueError(f"step {h} underflows at component {STATE_NAMES[j]}={x[j]}")
        J[:, j] = (rhs(xp) - rhs(xm)) / width
    if variant.disease_free:
        return J[np.ix_(_REDUCED, _REDUCED)]
    return J


def total_population(x) -> float:
    return float(np.sum(np.asarray(x, dtype=float)))


# Parameter sets printed in the figure captions.  Figure 1 is Malthus (no K).
_BASE = dict(g=0.3, f=0.2, c=0.4, l=0.6, q=0.7, b=0.9, beta=0.3, tau=0.2,
             nu=0.2, mu=0.2, r=1.3, K=1.0)

FIGURE_PARAMS: dict[str, ParameterSet] = {
    "fig1": ParameterSet(g=0.3, f=0.2, c=0.4, l=0.2, q=0.3, b=0.4, beta=0.3,
                         tau=0.4, nu=0.3, mu=0.2, r=0.5),
    "fig2": ParameterSet(**{**_BASE, "beta": 0.1}),
    "fig3": ParameterSet(**{**_BASE, "f": 0.1}),
    "fig4": ParameterSet(**_BASE),
}
