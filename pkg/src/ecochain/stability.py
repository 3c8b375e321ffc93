"""Eigenvalue and Routh-Hurwitz stability analysis, and threshold sweeps."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import equilibria as eqm
from .equilibria import Equilibrium
from .model import PARAM_NAMES, ModelVariant, ParameterSet, check_params, jacobian

RH_TOL = 1e-12


class InternalError(RuntimeError):
    """Two independent stability routes disagree."""


def _as_matrix(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def eigenvalues(M) -> np.ndarray:
    """Eigenvalues of a small real matrix, sorted by descending real part.

    Complex eigenvalues come out as exact conjugate pairs.
    """
    M = _as_matrix(M)
    lam = np.linalg.eigvals(M).astype(complex)
    # snap rounding-level imaginary parts and pair up conjugates
    scale = 1.0 + np.max(np.abs(lam), initial=0.0)
    lam = np.where(np.abs(lam.imag) <= 1e-14 * scale, lam.real + 0j, lam)
    cplx = lam[lam.imag > 0]
    real = lam[lam.imag == 0]
    out = list(real) + [z for z in cplx] + [z.conjugate() for z in cplx]
    if len(out) != len(lam):
        # unmatched complex values, leave LAPACK's answer alone
        out = list(lam)
    return np.array(sorted(out, key=lambda z: (-z.real, -z.imag)))


@dataclass(frozen=True)
class CharPoly:
    """Monic characteristic polynomial ``lambda^n + a1 lambda^(n-1) + ... + an``."""

    coeffs: tuple[float, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> float:
        return self.coeffs[k]

    def roots(self) -> np.ndarray:
        return np.roots(self.coeffs)


def char_poly(M) -> CharPoly:
    """Faddeev-LeVerrier recursion; ``a1 = -trace(M)`` exactly."""
    M = _as_matrix(M)
    n = M.shape[0]
    coeffs = [1.0]
    B = np.eye(n)
    for k in range(1, n + 1):
        AB = M @ B
        a = -np.trace(AB) / k
        coeffs.append(float(a))
        B = AB + a * np.eye(n)
    return CharPoly(tuple(coeffs))


@dataclass(frozen=True)
class RHVerdict:
    status: str  # "pass" | "fail" | "marginal"
    condition: str | None = None
    values: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def routh_hurwitz(cp: CharPoly, tol: float = RH_TOL) -> RHVerdict:
    """Full Routh-Hurwitz test for a monic cubic or quartic.

    ``condition`` names the first condition that is not strictly satisfied;
    the verdict is ``"marginal"`` when that quantity is within ``tol`` of zero.
    """
    a = cp.coeffs
    if a[0] != 1.0:
        raise ValueError("polynomial must be monic")
    if cp.degree == 3:
        _, a1, a2, a3 = a
        tests = [("a1>0", a1), ("a3>0", a3), ("a1a2>a3", a1 * a2 - a3)]
    elif cp.degree == 4:
        _, a1, a2, a3, a4 = a
        tests = [("a1>0", a1), ("a3>0", a3), ("a4>0", a4),
                 ("a1a2a3>a3^2+a1^2a4", a1 * a2 * a3 - a3 ** 2 - a1 ** 2 * a4)]
    else:
        raise ValueError(f"Routh-Hurwitz implemented for degree 3 or 4, got {cp.degree}")
    values = dict(tests)
    for name, value in tests:
        if abs(value) <= tol:
            return RHVerdict("marginal", name, values)
        if value < 0:
            return RHVerdict("fail", name, values)
    return RHVerdict("pass", None, values)


class Stability(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    NONHYPERBOLIC = "nonhyperbolic"


@dataclass(frozen=True)
class StabilityClass:
    """Stability of an equilibrium from its Jacobian spectrum.

    ``kind`` is UNSTABLE as soon as one eigenvalue has positive real part,
    even when other eigenvalues sit on the imaginary axis; ``n_neutral``
    still reports those.
    """

    kind: Stability
    eigenvalues: tuple[complex, ...]
    tol: float
    n_unstable: int
    n_neutral: int
    char_poly: CharPoly | None = None
    rh: RHVerdict | None = None

    @property
    def stable(self) -> bool:
        return self.kind is Stability.STABLE

    @property
    def hyperbolic(self) -> bool:
        return self.n_neutral == 0


def hyperbolicity_tol(lam) -> float:
    return 1e-9 * (1.0 + float(np.max(np.abs(lam), initial=0.0)))


def classify_matrix(J, tol: float | None = None) -> StabilityClass:
    lam = eigenvalues(J)
    if tol is None:
        tol = hyperbolicity_tol(lam)
    re = lam.real
    n_unstable = int(np.sum(re > tol))
    n_neutral = int(np.sum(np.abs(re) <= tol))
    if n_unstable:
        kind = Stability.UNSTABLE
    elif n_neutral:
        kind = Stability.NONHYPERBOLIC
    else:
        kind = Stability.STABLE
    cp = rh = None
    if J.shape[0] in (3, 4):
        cp = char_poly(J)
        rh = routh_hurwitz(cp)
        if rh.status != "marginal" and n_neutral == 0 and rh.passed != (kind is Stability.STABLE):
            raise InternalError(
                f"Routh-Hurwitz says {rh.status} but eigenvalues {lam} give {kind.value}")
    return StabilityClass(kind, tuple(lam), tol, n_unstable, n_neutral, cp, rh)


def classify(variant: ModelVariant | str, p: ParameterSet, eq: Equilibrium | np.ndarray,
             tol: float | None = None) -> StabilityClass:
    """Classify an equilibrium from the eigenvalues of the Jacobian there."""
    variant = ModelVariant.parse(variant)
    x = eq.x if isinstance(eq, Equilibrium) else np.asarray(eq, dtype=float)
    if isinstance(eq, Equilibrium) and eq.status != "ok":
        raise ValueError(f"{eq.label} is {eq.status}: {eq.note}")
    return classify_matrix(jacobian(variant, p, x), tol)


@dataclass(frozen=True)
class CoexistenceCertificate:
    state: tuple[float, ...]
    trace: float
    scale: float
    char_poly: CharPoly
    rh: RHVerdict
    stability: StabilityClass

    @property
    def trace_vanishes(self) -> bool:
        return abs(self.trace) < 1e-10 * self.scale


def malthus_coexistence_certificate(p: ParameterSet) -> CoexistenceCertificate:
    """Show that the Jacobian at the Malthus coexistence point is traceless.

    Every diagonal entry is one of the bracketed equilibrium conditions, so
    the trace cancels, the first Routh-Hurwitz condition fails and the point
    can never be asymptotically stable.
    """
    estar = next(e for e in eqm.malthus_equilibria(p) if e.label == "Estar_t")
    if not estar.feasible:
        raise ValueError("Malthus coexistence point is not feasible for these parameters")
    J = jacobian(ModelVariant.MALTHUS, p, estar.x)
    cp = char_poly(J)
    scale = 1.0 + float(np.max(np.abs(J)))
    return CoexistenceCertificate(estar.state, float(np.trace(J)), scale, cp,
                                  routh_hurwitz(cp), classify_matrix(J))


# -- threshold sweeps ---------------------------------------------------------

# pairs that collide when rho1 / rho2 crosses 1
COLLISIONS = {
    ModelVariant.LOGISTIC_DISEASE_FREE: {"rho1": ("D1", "Dhat"), "rho2": ("Dhat", "Dstar")},
    ModelVariant.LOGISTIC: {"rho1": ("E2", "E1"), "rho2": ("E1", "E4")},
}


@dataclass(frozen=True)
class BranchRow:
    value: float
    rho1: float
    rho2: float
    equilibria: tuple[Equilibrium, ...]
    classes: tuple[StabilityClass | None, ...]

    def get(self, label: str) -> tuple[Equilibrium, StabilityClass | None]:
        for e, c in zip(self.equilibria, self.classes):
            if e.label == label:
                return e, c
        raise KeyError(label)


@dataclass(frozen=True)
class Crossing:
    threshold: str  # "rho1" | "rho2"
    value: float
    lower: int  # index of the bracketing row below
    upper: int
    row: BranchRow
    colliding: tuple[str, str] | None = None
    gap: float = math.nan


@dataclass(frozen=True)
class BranchTable:
    param: str
    variant: ModelVariant
    rows: tuple[BranchRow, ...]
    crossings: tuple[Crossing, ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(e.label for e in self.rows[0].equilibria) if self.rows else ()


def _row(variant: ModelVariant, p: ParameterSet, value: float) -> BranchRow:
    eqs = tuple(eqm.find_equilibria(variant, p))
    classes = tuple(classify(variant, p, e) if e.status == "ok" else None for e in eqs)
    if variant.logistic:
        t = eqm.thresholds(p)
        r1, r2 = t.rho1, t.rho2
    else:
        r1 = r2 = math.nan
    return BranchRow(value, r1, r2, eqs, classes)


def _refine(p: ParameterSet, name: str, which: str, lo: float, hi: float,
            xtol: float = 1e-8) -> float:
    fn = eqm.rho1 if which == "rho1" else eqm.rho2

    def s(v: float) -> float:
        return fn(p.replace(**{name: v})) - 1.0

    s_lo = s(lo)
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        s_mid = s(mid)
        if s_mid == 0.0:
            return mid
        if (s_mid < 0) == (s_lo < 0):
            lo, s_lo = mid, s_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bifurcation_sweep(p: ParameterSet, param_name: str, lo: float, hi: float, n: int,
                      variant: ModelVariant | str = ModelVariant.LOGISTIC_DISEASE_FREE
                      ) -> BranchTable:
    """Evaluate equilibria and their stability on an even grid of one parameter.

    Sign changes of ``rho1 - 1`` and ``rho2 - 1`` between neighbouring rows
    are refined by bisection to 1e-8 in the parameter; each crossing records
    how far apart the two colliding equilibria are there.
    """
    variant = ModelVariant.parse(variant)
    if param_name not in PARAM_NAMES:
        raise ValueError(f"unknown parameter {param_name!r}")
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > 1 and not lo < hi:
        raise ValueError("need lo < hi")
    grid = np.linspace(lo, hi, n) if n > 1 else np.array([lo])
    rows = []
    for v in grid:
        q = p.replace(**{param_name: float(v)})
        check_params(q, variant)
        rows.append(_row(variant, q, float(v)))

    crossings = []
    if variant.logistic:
        for which in ("rho1", "rho2"):
            s = [getattr(r, which) - 1.0 for r in rows]
            for i in range(len(rows) - 1):
                if (s[i] < 0) != (s[i + 1] < 0):
                    at = _refine(p, param_name, which, rows[i].value, rows[i + 1].value)
                    crow = _row(variant, p.replace(**{param_name: at}), at)
                    pair = COLLISIONS.get(variant, {}).get(which)
                    gap = math.nan
                    if pair:
                        a, _ = crow.get(pair[0])
                        b, _ = crow.get(pair[1])
                        gap = float(np.max(np.abs(a.x - b.x)))
                    crossings.append(Crossing(which, at, i, i + 1, crow, pair, gap))
    crossings.sort(key=lambda c: c.value)
    return BranchTable(param_name, variant, tuple(rows), tuple(crossings))
