import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ecochain.model import ParameterSet

settings.register_profile(
    "default", deadline=None, max_examples=100, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def random_params(rng: np.random.Generator, logistic: bool = True) -> ParameterSet:
    """A random parameter set satisfying g<c, f<q, l<b and nu >= mu."""
    c, q, b = rng.uniform(0.2, 1.5, 3)
    mu = rng.uniform(0.05, 1.0)
    return ParameterSet(
        g=c * rng.uniform(0.05, 0.95),
        f=q * rng.uniform(0.05, 0.95),
        c=c, q=q, b=b,
        l=b * rng.uniform(0.05, 0.95),
        beta=rng.uniform(0.05, 1.5),
        tau=rng.uniform(0.05, 1.0),
        mu=mu,
        nu=mu + rng.uniform(0.0, 1.0),
        r=rng.uniform(0.1, 2.0),
        K=rng.uniform(0.5, 5.0) if logistic else math.inf,
    )


def random_dstar_params(rng: np.random.Generator) -> ParameterSet:
    """Random logistic parameters with rho2 > 1 (feasible disease-free coexistence)."""
    p = random_params(rng)
    u = rng.uniform(0.1, 0.9)
    tau = p.f * p.r / p.b * u  # fr/(b tau) = 1/u > 1
    # rho2 > 1  <=>  K > mu / (l (1 - u))
    k_min = p.mu / (p.l * (1.0 - u))
    return p.replace(tau=tau, K=k_min * rng.uniform(1.05, 4.0))


def random_malthus_coexistence(rng: np.random.Generator) -> ParameterSet:
    """Random Malthus parameters whose coexistence point is feasible."""
    from ecochain.equilibria import malthus_equilibria

    while True:
        p = random_params(rng, logistic=False)
        estar = malthus_equilibria(p)[-1]
        if estar.feasible:
            return p


@st.composite
def param_sets(draw, logistic: bool = True) -> ParameterSet:
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_params(np.random.default_rng(seed), logistic)


@st.composite
def states(draw, lo: float = 0.0, hi: float = 3.0):
    return np.array([draw(st.floats(lo, hi)) for _ in range(4)])


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


# -- acceptance summary ---------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    def record(label: str, passed: bool, detail: str = "") -> None:
        line = f"{'PASS' if passed else 'FAIL'}  criterion {label}: {detail}".rstrip()
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
