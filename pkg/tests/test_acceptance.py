"""Acceptance criteria 1-6, one PASS/FAIL line each, with wall-clock limits."""

import time

import numpy as np
import pytest

from ecochain import equilibria as eqm
from ecochain.figures import FIG2_NOTE, FIG3_E3, FIG4_ESTAR, run_figure
from ecochain.model import FIGURE_PARAMS, ModelVariant, jacobian, jacobian_fd
from ecochain.simulate import IntegratorConfig, boundedness_monitor, integrate, lv_first_integral
from ecochain.stability import Stability, bifurcation_sweep, char_poly, classify, routh_hurwitz

from conftest import random_dstar_params, random_params

FIG1 = FIGURE_PARAMS["fig1"]
FIG4 = FIGURE_PARAMS["fig4"]
DF = ModelVariant.LOGISTIC_DISEASE_FREE


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def _fail_lines(report):
    return "; ".join(c.line() for c in report.checks if not c.passed)


def test_criterion_1_fig4(criterion):
    def work():
        est = eqm.logistic_coexistence(FIG4)
        traj = integrate("logistic", FIG4, (0.1, 0.5, 0.2, 0.5), IntegratorConfig(tmax=500))
        return est, traj

    (est, traj), dt = _timed(work)
    d_solve = float(np.max(np.abs(est.x - FIG4_ESTAR)))
    d_int = float(np.max(np.abs(traj.final - FIG4_ESTAR)))
    ok = est.feasible and d_solve <= 1e-3 and d_int <= 1e-3 and dt < 1.0
    criterion("1", ok, f"linear-solve dev {d_solve:.2g}, integration dev {d_int:.2g}, {dt:.2f}s < 1s")
    assert ok


def test_criterion_2_fig3(criterion):
    report, dt = _timed(lambda: run_figure("fig3"))
    e3 = {e.label: e for e in eqm.logistic_boundary_equilibria(FIGURE_PARAMS["fig3"])}["E3"]
    dev = float(np.max(np.abs(e3.x - FIG3_E3)))
    ok = report.passed and dev <= 1e-3 and dt < 1.0
    criterion("2", ok, f"E3 dev {dev:.2g}, stable and attained, {dt:.2f}s < 1s {_fail_lines(report)}")
    assert ok


def test_criterion_3_fig1(criterion):
    report, dt = _timed(lambda: run_figure("fig1"))
    _, tail = report.trajectory.tail()
    ptp = float(np.ptp(tail[:, 0]))
    ok = report.passed and report.longterm.kind != "converged" and ptp > 0.05 and dt < 5.0
    criterion("3", ok, f"tail P peak-to-trough {ptp:.3g}, a1~0, RH fails at a1, {dt:.2f}s < 5s "
              f"{_fail_lines(report)}")
    assert ok


def test_criterion_4_fig2(criterion, capsys):
    from ecochain.cli import main

    report, dt = _timed(lambda: run_figure("fig2"))
    capsys.readouterr()
    code = main(["reproduce", "fig2"])
    printed = capsys.readouterr().out
    dev = float(np.max(np.abs(report.trajectory.final - np.array([0, 0.96296, 0, 0.33333]))))
    ok = report.passed and dev <= 1e-3 and FIG2_NOTE in printed and code == 0 and dt < 1.0
    criterion("4", ok, f"converges to E1 (dev {dev:.2g}), E3/E4 infeasible, note printed, {dt:.2f}s < 1s")
    assert ok


def test_criterion_5_transcritical(criterion):
    table = bifurcation_sweep(FIG4, "K", 0.1, 2.0, 191, DF)
    by = {c.threshold: c for c in table.crossings}
    k1 = FIG4.mu / FIG4.l
    u = FIG4.b * FIG4.tau / (FIG4.f * FIG4.r)
    k2 = FIG4.mu / (FIG4.l * (1.0 - u))  # rho2 = 1 solved for K
    c1, c2 = by["rho1"], by["rho2"]

    def exchange(c, low, high):
        below, above = table.rows[c.lower], table.rows[c.upper]
        return (below.get(low)[1].kind is Stability.STABLE
                and not below.get(high)[0].feasible
                and above.get(low)[1].kind is Stability.UNSTABLE
                and above.get(high)[1].kind is Stability.STABLE)

    ok = (abs(c1.value - k1) < 1e-8 and abs(c2.value - k2) < 1e-8
          and c1.colliding == ("D1", "Dhat") and c2.colliding == ("Dhat", "Dstar")
          and c1.gap < 1e-6 and c2.gap < 1e-6
          and exchange(c1, "D1", "Dhat") and exchange(c2, "Dhat", "Dstar"))
    criterion("5", ok, f"rho1 at K={c1.value:.10f} (mu/l={k1:.10f}), "
              f"rho2 at K={c2.value:.10f} (inverted {k2:.10f}), stability exchanged, branches collide")
    assert ok


def _first_orbit_end(times, S, s0):
    down = np.nonzero((S[:-1] >= s0) & (S[1:] < s0))[0]
    up = np.nonzero((S[:-1] < s0) & (S[1:] >= s0))[0]
    up = up[up > down[0]]
    return times[up[0] + 1]


def _6a(rng):
    worst = 0.0
    for variant in ModelVariant:
        for _ in range(100):
            p = random_params(rng)
            x = rng.uniform(0.0, 3.0, 4)
            if variant.disease_free:
                x[2] = 0.0
            Ja, Jf = jacobian(variant, p, x), jacobian_fd(variant, p, x, 1e-6)
            worst = max(worst, float(np.max(np.abs(Ja - Jf) / np.maximum(np.abs(Ja), 1.0))))
    return worst < 1e-6, f"max relative error {worst:.2g} over 4x100 samples"


def _6b(rng):
    held = 0
    for _ in range(100):
        p = random_params(rng)
        traj = integrate("logistic", p, rng.uniform(0.0, 4.0, 4), IntegratorConfig(tmax=50))
        held += boundedness_monitor(traj, p).holds
    return held == 100, f"{held}/100 runs within max(W0, psi*/theta)"


def _6c(rng):
    cfg = IntegratorConfig(rtol=1e-10, atol=1e-12, tmax=80)
    traj = integrate("malthus", FIG1, (0, 1.0, 0, 2.0), cfg)
    mask = traj.times <= _first_orbit_end(traj.times, traj.states[:, 1], 1.0)
    C = lv_first_integral(FIG1, traj.states[mask, 1], traj.states[mask, 3])
    drift = float(np.max(np.abs(C - C[0])))
    return drift < 1e-5, f"first-integral drift {drift:.2g} over one orbit"


def _6d(rng):
    agree = checked = 0
    while checked < 500:
        n = 3 + checked % 2
        M = rng.normal(size=(n, n)) - rng.uniform(-1.0, 3.0) * np.eye(n)
        re = np.linalg.eigvals(M).real
        if np.min(np.abs(re)) < 1e-6:
            continue
        agree += routh_hurwitz(char_poly(M)).passed == bool(np.all(re < 0))
        checked += 1
    return agree == 500, f"{agree}/500 matrices agree"


def _6e(rng):
    stable = 0
    for _ in range(200):
        p = random_dstar_params(rng)
        dstar = {e.label: e for e in eqm.disease_free_equilibria(p)}["Dstar"]
        stable += dstar.feasible and classify(DF, p, dstar).kind is Stability.STABLE
    return stable == 200, f"{stable}/200 with rho2>1 stable"


def _6f(rng):
    neg = sum(eqm.remark1_infeasibility(random_params(rng, logistic=False)).infeasible for _ in range(100))
    return neg == 100, f"{neg}/100 certified infeasible"


@pytest.mark.parametrize("part", ["a", "b", "c", "d", "e", "f"])
def test_criterion_6_parts(criterion, part, rng):
    fn = globals()[f"_6{part}"]
    (ok, detail), dt = _timed(lambda: fn(rng))
    _PART_TIMES[part] = dt
    criterion(f"6{part}", ok, f"{detail}, {dt:.2f}s")
    assert ok


_PART_TIMES: dict[str, float] = {}


def test_criterion_6_total_runtime(criterion):
    total = sum(_PART_TIMES.values())
    ok = len(_PART_TIMES) == 6 and total < 60.0
    criterion("6", ok, f"all six property suites in {total:.2f}s < 60s")
    assert ok
