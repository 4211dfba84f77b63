"""Chart-based manifolds, metric fields, causal classification and lengths.

A chart is a coordinate box with a closed-form metric coefficient function;
an atlas is a collection of charts plus transition maps. All values are
immutable after construction and every operation is pure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (BasePointMismatch, InvalidCurve, NonFiniteCoefficient,
                     PointOutsideChart)

DEFAULT_CAUSAL_TOL = 1e-9
_SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class Chart:
    """One coordinate box with its metric coefficient function.

    ``metric`` maps a coordinate sequence to a symmetric n x n matrix. It must
    be written with the :mod:`leafcausal.dual` math wrappers so that the same
    closed form serves plain evaluation, batched evaluation and forward-mode
    differentiation.
    """

    chart_id: str
    names: tuple
    lo: np.ndarray
    hi: np.ndarray
    periodic: np.ndarray
    metric: Callable

    def __post_init__(self):
        object.__setattr__(self, "lo", np.asarray(self.lo, dtype=float))
        object.__setattr__(self, "hi", np.asarray(self.hi, dtype=float))
        object.__setattr__(self, "periodic", np.asarray(self.periodic, dtype=bool))
        if np.any(self.hi <= self.lo):
            raise ValueError(f"chart {self.chart_id}: empty coordinate box")
        if np.any(~np.isfinite(self.hi[self.periodic])):
            raise ValueError(f"chart {self.chart_id}: periodic axis with infinite period")

    @property
    def dim(self):
        return len(self.lo)

    def period(self):
        return self.hi - self.lo

    def reduce(self, x):
        """Wrap periodic axes into [lo, hi); leave the others untouched."""
        x = np.array(x, dtype=float)
        p = self.periodic
        if np.any(p):
            x[p] = self.lo[p] + np.mod(x[p] - self.lo[p], self.period()[p])
        return x

    def contains(self, x, slack=0.0):
        x = np.asarray(x, dtype=float)
        free = ~self.periodic
        return bool(np.all(x[free] > self.lo[free] - slack)
                    and np.all(x[free] < self.hi[free] + slack))

    def axis(self, name):
        return self.names.index(name)


@dataclass(frozen=True)
class Transition:
    """Smooth coordinate map between two charts together with its differential."""

    src: str
    dst: str
    map: Callable          # point -> point
    differential: Callable  # point -> n x n Jacobian matrix


@dataclass(frozen=True)
class ChartAtlas:
    dim: int
    charts: dict = field(default_factory=dict)
    transitions: dict = field(default_factory=dict)

    @staticmethod
    def build(charts: Sequence[Chart], transitions: Sequence[Transition] = ()):
        dim = charts[0].dim
        for c in charts:
            if c.dim != dim:
                raise ValueError("all charts must share one dimension")
        return ChartAtlas(dim=dim,
                          charts={c.chart_id: c for c in charts},
                          transitions={(t.src, t.dst): t for t in transitions})

    def chart(self, chart_id):
        try:
            return self.charts[chart_id]
        except KeyError:
            raise PointOutsideChart(f"unknown chart {chart_id!r}") from None


@dataclass(frozen=True)
class TangentVector:
    chart_id: str
    base: np.ndarray
    comps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "base", np.asarray(self.base, dtype=float))
        object.__setattr__(self, "comps", np.asarray(self.comps, dtype=float))


class CausalClass(enum.Enum):
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"
    SPACELIKE = "spacelike"   # includes the zero vector by convention


@dataclass(frozen=True)
class CurveSamples:
    """Piecewise-C^1 curve: a parameter grid with per-sample chart, point, velocity."""

    params: np.ndarray
    chart_ids: tuple
    points: np.ndarray      # (m, n)
    velocities: np.ndarray  # (m, n)
    breakpoints: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "params", np.asarray(self.params, dtype=float))
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))
        object.__setattr__(self, "velocities", np.asarray(self.velocities, dtype=float))
        object.__setattr__(self, "breakpoints", frozenset(self.breakpoints))
        m = len(self.params)
        if m < 2:
            raise InvalidCurve("a curve needs at least two samples")
        if np.any(np.diff(self.params) <= 0):
            raise InvalidCurve("curve parameters must be strictly increasing")
        if self.points.shape[0] != m or self.velocities.shape[0] != m:
            raise InvalidCurve("sample arrays disagree with the parameter grid")

    @property
    def n_samples(self):
        return len(self.params)


def curve_from_function(gamma, dgamma, a, b, m, chart_id, breakpoints=()):
    """Sample a closed-form curve onto a uniform grid."""
    params = np.linspace(a, b, m)
    pts = np.array([gamma(s) for s in params], dtype=float)
    vels = np.array([dgamma(s) for s in params], dtype=float)
    return CurveSamples(params, (chart_id,) * m, pts, vels, frozenset(breakpoints))


def eval_metric(atlas: ChartAtlas, chart_id, x):
    """Metric matrix at ``x``, symmetrized as (A + A^T)/2."""
    chart = atlas.chart(chart_id)
    x = chart.reduce(x)
    if not chart.contains(x):
        raise PointOutsideChart(f"{x} outside chart {chart_id!r}")
    g = np.asarray(chart.metric(x), dtype=float)
    if not np.all(np.isfinite(g)):
        raise NonFiniteCoefficient(f"metric at {x} in chart {chart_id!r}")
    if np.max(np.abs(g - g.T)) > _SYMMETRY_TOL * max(1.0, np.max(np.abs(g))):
        raise NonFiniteCoefficient(f"metric asymmetric at {x} in chart {chart_id!r}")
    return 0.5 * (g + g.T)


def quadratic_form(atlas, v: TangentVector):
    g = eval_metric(atlas, v.chart_id, v.base)
    return float(v.comps @ g @ v.comps)


def classify(atlas, v: TangentVector, tol=DEFAULT_CAUSAL_TOL):
    """Causal class of ``v``, with the tolerance band applied to the vector
    rescaled to max-abs 1 so the decision is scale-free."""
    scale = np.max(np.abs(v.comps))
    if scale == 0.0:
        return CausalClass.SPACELIKE
    u = v.comps / scale
    g = eval_metric(atlas, v.chart_id, v.base)
    q = float(u @ g @ u)
    if q < -tol:
        return CausalClass.TIMELIKE
    if q <= tol:
        return CausalClass.LIGHTLIKE
    return CausalClass.SPACELIKE


def inner(atlas, v: TangentVector, w: TangentVector):
    """g(v, w) for two vectors at the same base point."""
    if v.chart_id != w.chart_id:
        raise BasePointMismatch(f"charts differ: {v.chart_id!r} vs {w.chart_id!r}")
    chart = atlas.chart(v.chart_id)
    if np.max(np.abs(chart.reduce(v.base) - chart.reduce(w.base))) > 1e-12:
        raise BasePointMismatch("base points differ")
    g = eval_metric(atlas, v.chart_id, v.base)
    return float(v.comps @ g @ w.comps)


def _speed_samples(atlas, curve: CurveSamples, form):
    out = np.empty(curve.n_samples)
    for i in range(curve.n_samples):
        out[i] = form(curve.chart_ids[i], curve.points[i], curve.velocities[i])
    return out


def composite_simpson(params, values, breaks=frozenset()):
    """Composite Simpson on a sample grid, split at breakpoints, with a
    Richardson error estimate from the half-resolution rule.

    Returns (integral, error_estimate).
    """
    cuts = sorted({0, len(params) - 1} | {b for b in breaks if 0 < b < len(params) - 1})
    total, err = 0.0, 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        p, v = params[lo:hi + 1], values[lo:hi + 1]
        total += _simpson_piece(p, v)
        if len(p) >= 5:
            coarse = _simpson_piece(p[::2], v[::2]) if (len(p) - 1) % 2 == 0 else None
            if coarse is not None:
                err += abs(_simpson_piece(p, v) - coarse) / 15.0
    return total, err


def _simpson_piece(p, v):
    m = len(p) - 1
    if m == 0:
        return 0.0
    if m == 1:
        return 0.5 * (p[1] - p[0]) * (v[0] + v[1])
    total = 0.0
    i = 0
    while i + 2 <= m:
        h0, h1 = p[i + 1] - p[i], p[i + 2] - p[i + 1]
        # non-uniform Simpson weights
        h = h0 + h1
        total += (h / 6.0) * ((2 - h1 / h0) * v[i]
                              + (h * h / (h0 * h1)) * v[i + 1]
                              + (2 - h0 / h1) * v[i + 2])
        i += 2
    if i == m - 1:  # odd leftover interval: trapezoid
        total += 0.5 * (p[m] - p[m - 1]) * (v[m - 1] + v[m])
    return total


def lorentz_length(atlas, curve: CurveSamples, with_error=False):
    """Length functional: integral of sqrt(|g(curve', curve')|)."""
    def form(cid, x, vel):
        g = eval_metric(atlas, cid, x)
        return np.sqrt(abs(float(vel @ g @ vel)))
    speeds = _speed_samples(atlas, curve, form)
    val, err = composite_simpson(curve.params, speeds, curve.breakpoints)
    val = max(val, 0.0)
    return (val, err) if with_error else val


def signature(atlas, chart_id, x):
    """Number of negative eigenvalues of the metric at ``x``."""
    g = eval_metric(atlas, chart_id, x)
    return int(np.sum(np.linalg.eigvalsh(g) < 0.0))


def sample_points(chart: Chart, count, rng, margin=0.05):
    """Random points in the interior of a chart box (relative inset ``margin``)."""
    lo, hi = chart.lo, chart.hi
    span = hi - lo
    u = rng.uniform(margin, 1.0 - margin, size=(count, chart.dim))
    return lo + u * span


def audit_signature(atlas, chart_id, count=1000, seed=0):
    """Check the metric index is constant over random chart samples.

    Returns the common index; raises if it wavers.
    """
    chart = atlas.chart(chart_id)
    rng = np.random.default_rng(seed)
    pts = sample_points(chart, count, rng)
    idx = {signature(atlas, chart_id, p) for p in pts}
    if len(idx) != 1:
        raise NonFiniteCoefficient(
            f"metric index not constant on chart {chart_id!r}: saw {sorted(idx)}")
    return idx.pop()
