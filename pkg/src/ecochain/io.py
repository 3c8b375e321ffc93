"""Run configuration parsing, CSV tables and SVG line plots."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .model import PARAM_NAMES, ModelVariant, ParameterSet
from .simulate import IntegratorConfig, Trajectory
from .stability import BranchTable

STATE_KEYS = ("P0", "S0", "I0", "V0")
INTEGRATOR_KEYS = ("rtol", "atol", "h0", "hmax", "tmax")
OPTION_KEYS = ("param", "lo", "hi", "n", "out", "svg")
DEFAULT_X0 = (0.1, 0.5, 0.2, 0.5)
ALL_KEYS = ("variant", *PARAM_NAMES, "mu0", *STATE_KEYS, *INTEGRATOR_KEYS, *OPTION_KEYS)


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.key = key
        self.line = line


@dataclass
class RunConfig:
    variant: ModelVariant
    params: ParameterSet
    x0: tuple[float, float, float, float] = DEFAULT_X0
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    param: str | None = None
    lo: float | None = None
    hi: float | None = None
    n: int | None = None
    out: str | None = None
    svg: str | None = None

    def to_dict(self) -> dict:
        d: dict = {"variant": self.variant.value}
        for k, v in self.params.as_dict().items():
            if k == "K" and not self.variant.logistic and math.isinf(v):
                continue
            d[k] = v
        d.update(zip(STATE_KEYS, self.x0))
        d.update({k: getattr(self.integrator, k) for k in INTEGRATOR_KEYS})
        for k in OPTION_KEYS:
            if getattr(self, k) is not None:
                d[k] = getattr(self, k)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _line_of(text: str, key: str, last: bool = False) -> int | None:
    needle = json.dumps(key)
    found = None
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            found = i
            if not last:
                break
    return found


def _reject_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ConfigError("duplicate key", key=k)
        out[k] = v
    return out


def _number(values: Mapping, key: str, text: str) -> float:
    v = values[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"value {v!r} is not a number", key, _line_of(text, key))
    return float(v)


def parse_config(text: str) -> RunConfig:
    """Parse a flat JSON run configuration.

    Parameter keys are the model symbols (``beta``, ``tau``, ``nu``, ...);
    ``mu0`` may replace ``nu``.  Without an explicit ``variant`` the model
    is logistic when ``K`` is present and Malthus otherwise.  Parameter
    constraints are not checked here, see :func:`validate_params`.
    """
    try:
        raw = json.loads(text, object_pairs_hook=_reject_duplicates)
    except ConfigError as e:
        raise ConfigError("duplicate key", e.key, _line_of(text, e.key, last=True)) from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", line=e.lineno) from None
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    for k, v in raw.items():
        if k not in ALL_KEYS:
            raise ConfigError("unknown key", k, _line_of(text, k))
        if isinstance(v, (dict, list)):
            raise ConfigError("nested values are not allowed", k, _line_of(text, k))

    if "variant" in raw:
        try:
            variant = ModelVariant.parse(raw["variant"])
        except ValueError as e:
            raise ConfigError(str(e), "variant", _line_of(text, "variant")) from None
    else:
        variant = ModelVariant.LOGISTIC if "K" in raw else ModelVariant.MALTHUS

    values = {k: _number(raw, k, text) for k in (*PARAM_NAMES, "mu0") if k in raw}
    if "nu" in raw and "mu0" in raw:
        raise ConfigError("give either nu or mu0, not both", "mu0", _line_of(text, "mu0"))
    required = [k for k in PARAM_NAMES if k not in ("K", "nu")]
    if "mu0" not in raw:
        required.append("nu")
    if variant.logistic:
        required.append("K")
    for k in required:
        if k not in raw:
            raise ConfigError("missing required key", k)
    if "mu0" in values:
        values["nu"] = values["mu"] + values.pop("mu0")
    params = ParameterSet.from_mapping(values)

    x0 = list(DEFAULT_X0)
    for i, k in enumerate(STATE_KEYS):
        if k in raw:
            x0[i] = _number(raw, k, text)
    integ = {k: _number(raw, k, text) for k in INTEGRATOR_KEYS if k in raw}
    try:
        integrator = IntegratorConfig(**integ)
    except ValueError as e:
        raise ConfigError(str(e)) from None

    opts: dict = {}
    for k in ("lo", "hi"):
        if k in raw:
            opts[k] = _number(raw, k, text)
    if "n" in raw:
        n = raw["n"]
        if isinstance(n, bool) or not isinstance(n, int):
            raise ConfigError(f"value {n!r} is not an integer", "n", _line_of(text, "n"))
        opts["n"] = n
    for k in ("param", "out", "svg"):
        if k in raw:
            if not isinstance(raw[k], str):
                raise ConfigError(f"value {raw[k]!r} is not a string", k, _line_of(text, k))
            opts[k] = raw[k]
    return RunConfig(variant, params, tuple(x0), integrator, **opts)


def apply_overrides(cfg: RunConfig, overrides: Mapping[str, str]) -> RunConfig:
    """Apply ``KEY=VALUE`` command-line overrides by re-parsing the merged dict."""
    d = cfg.to_dict()
    for k, v in overrides.items():
        if k in ("variant", "param", "out", "svg"):
            d[k] = v
            continue
        try:
            d[k] = int(v) if k == "n" else float(v)
        except ValueError:
            raise ConfigError(f"value {v!r} is not a number", k) from None
    if "mu0" in overrides:
        d.pop("nu", None)
    if "variant" in overrides and not ModelVariant.parse(overrides["variant"]).logistic:
        d.pop("K", None)
    return parse_config(json.dumps(d))


# -- CSV ----------------------------------------------------------------------

def fmt(v: float) -> str:
    return f"{v:.12g}"


def emit_csv(data: Trajectory | BranchTable) -> str:
    """Render a trajectory (``t,P,S,I,V``) or a branch table as CSV text."""
    if isinstance(data, BranchTable):
        return _emit_branch_csv(data)
    if len(data.times) == 0:
        raise ValueError("empty trajectory")
    lines = ["t,P,S,I,V"]
    for t, x in zip(data.times, data.states):
        lines.append(",".join(fmt(v) for v in (t, *x)))
    return "\n".join(lines) + "\n"


def _class_name(c) -> str:
    return c.kind.value if c is not None else "absent"


def _emit_branch_csv(table: BranchTable) -> str:
    if not table.rows:
        raise ValueError("empty branch table")
    labels = table.labels
    header = ["param", "rho1", "rho2"]
    for lab in labels:
        header += [f"{lab}_feasible", f"{lab}_class"]
    header.append("crossing")
    entries = [(r, "") for r in table.rows] + [(c.row, c.threshold) for c in table.crossings]
    entries.sort(key=lambda e: e[0].value)
    lines = [",".join(header)]
    for row, tag in entries:
        cells = [fmt(row.value), fmt(row.rho1), fmt(row.rho2)]
        for e, c in zip(row.equilibria, row.classes):
            cells += ["1" if e.feasible else "0", _class_name(c)]
        cells.append(tag)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> tuple[list[str], list[list[str]]]:
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def read_trajectory_csv(text: str) -> tuple[np.ndarray, np.ndarray]:
    header, rows = parse_csv(text)
    if header != ["t", "P", "S", "I", "V"]:
        raise ValueError(f"not a trajectory table: {header}")
    arr = np.array([[float(v) for v in r] for r in rows])
    return arr[:, 0], arr[:, 1:]


# -- SVG ----------------------------------------------------------------------

COLORS = {"P": "#d62728", "S": "#1f77b4", "I": "#ff7f0e", "V": "#2ca02c"}
_PALETTE = ("#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 12))
        v += step
    return out


def emit_svg(times: Sequence[float], series: Mapping[str, Sequence[float]],
             title: str = "", width: int = 720, height: int = 420) -> str:
    """Standalone SVG line plot with one polyline per series."""
    t = np.asarray(times, dtype=float)
    if not series:
        raise ValueError("no series to plot")
    if len(t) < 2:
        raise ValueError("need at least two points per series")
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    for k, y in ys.items():
        if y.shape != t.shape:
            raise ValueError(f"series {k!r} has {len(y)} points, expected {len(t)}")

    left, right, top, bottom = 60, 90, 30, 40
    pw, ph = width - left - right, height - top - bottom
    x0, x1 = float(t[0]), float(t[-1])
    y0 = min(0.0, min(float(y.min()) for y in ys.values()))
    y1 = max(float(y.max()) for y in ys.values())
    if y1 <= y0:
        y1 = y0 + 1.0
    if x1 <= x0:
        x1 = x0 + 1.0

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{left}" y="18" font-size="13">{escape(title)}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for v in _ticks(x0, x1):
        px = sx(v)
        out.append(f'<line x1="{px:.2f}" y1="{top + ph}" x2="{px:.2f}" y2="{top + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{top + ph + 16}" text-anchor="middle">{v:g}</text>')
    for v in _ticks(y0, y1):
        py = sy(v)
        out.append(f'<line x1="{left - 4}" y1="{py:.2f}" x2="{left}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{py + 4:.2f}" text-anchor="end">{v:g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 6}" text-anchor="middle">t</text>')

    for i, (name, y) in enumerate(ys.items()):
        color = COLORS.get(name, _PALETTE[i % len(_PALETTE)])
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" '
                   f'data-label="{escape(name)}" points="{pts}"/>')
        ly = top + 14 + 16 * i
        out.append(f'<line x1="{left + pw + 10}" y1="{ly - 4}" x2="{left + pw + 30}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def trajectory_svg(traj: Trajectory, title: str = "") -> str:
    return emit_svg(traj.times, {n: traj.states[:, i] for i, n in enumerate("PSIV")}, title)

