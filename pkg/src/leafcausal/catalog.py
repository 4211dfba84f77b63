"""Registry of fully specified example foliations.

Each entry packages adapted charts with a bundle-like metric, the transverse
metric, a time orientation, leaf-space metadata, optional causal-graph data
(discretization coordinates, degenerate transverse form, barriers for
deleted-region examples) and a list of expected claims with provenance tags.

All coefficient functions are written against the dispatching math wrappers
in :mod:`leafcausal.dual`, so one closed form serves scalar evaluation,
batched (column-array) evaluation and forward-mode differentiation.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import dual
from .errors import UnknownExample
from .foliation import (FoliatedAtlas, SuspensionSpec, TimeOrientation,
                        TransverseMetricField, audit_orientation,
                        audit_transition_basicity, audit_transverse_field)
from .geometry import Chart, ChartAtlas, Transition

_PROVENANCE = ("paper", "derived", "trivial")

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
DESITTER_L = SQRT2 / 4.0


@dataclass(frozen=True)
class ExpectedClaim:
    claim_id: str
    value: object
    provenance: str

    def __post_init__(self):
        if self.provenance not in _PROVENANCE:
            raise ValueError(f"claim {self.claim_id!r}: bad provenance "
                             f"{self.provenance!r}, need one of {_PROVENANCE}")


@dataclass(frozen=True)
class Barrier:
    """Deleted-region data for graph construction: which sample points are
    inside the removed set and which straight chords cross it."""

    node_blocked: Callable   # pts (N, n) -> bool mask
    chord_blocked: Callable  # (a (N, n), b (N, n)) -> bool mask


@dataclass(frozen=True)
class GraphSpec:
    """Discretization data for the causal graph of one example.

    The graph may live in different coordinates than the adapted chart (the
    torus examples discretize the original flat coordinates, where the
    periodic identifications are axis-aligned). ``transverse_form`` is the
    full-coordinate degenerate quadratic form whose kernel contains the leaf
    directions; ``reference`` is a constant future transversely timelike
    component vector in graph coordinates.
    """

    chart: Chart
    transverse_form: Callable     # column list -> n x n nested entries
    reference: np.ndarray
    leaf_label: Callable          # (pts (N, n), spacing (n,)) -> list of labels
    axis_cells: Callable          # resolution int -> per-axis cell counts
    barrier: Optional[Barrier] = None
    step_radius: int = 3


@dataclass(frozen=True)
class ExampleSpec:
    example_id: str
    fol: FoliatedAtlas
    gT: Optional[TransverseMetricField]
    orient: Optional[TimeOrientation]
    expected: tuple
    graph: Optional[GraphSpec] = None
    suspension: Optional[SuspensionSpec] = None
    extras: dict = field(default_factory=dict)

    @property
    def atlas(self):
        return self.fol.base

    def chart_id(self):
        """The single adapted chart id (every registered entry has one)."""
        return next(iter(self.fol.base.charts))


def _box_chart(chart_id, names, lo, hi, periodic, metric):
    return Chart(chart_id, tuple(names), np.asarray(lo, dtype=float),
                 np.asarray(hi, dtype=float), np.asarray(periodic, dtype=bool),
                 metric)


def _cells_from_labels(pts, spacing, axes, lo):
    cols = []
    for k in axes:
        cols.append(np.floor((pts[:, k] - lo[k]) / spacing[k]).astype(int))
    return cols


def _transverse_cell_labels(axes, lo):
    def label(pts, spacing):
        cols = _cells_from_labels(pts, spacing, axes, lo)
        return list(zip(*cols))
    return label


# ---------------------------------------------------------------- mink3

def _mink3():
    # Minkowski R^3 foliated by vertical y-lines; adapted order (y, t, x).
    def g(x):
        return [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]

    chart = _box_chart("box", ("y", "t", "x"), [-1, -1, -1], [1, 1, 1],
                       [False] * 3, g)
    fol = FoliatedAtlas(ChartAtlas.build([chart]), leaf_dim=1, codim=2,
                        leaf_space_meta={
                            "identification": "leaf space is the (t, x) plane",
                            "hausdorff": True, "compact_leaves": False,
                            "transversely_globally_hyperbolic": True})
    gT = TransverseMetricField(fol, {"box": lambda xq: [[-1.0, 0.0], [0.0, 1.0]]})
    orient = TimeOrientation({"box": lambda x: np.array([0.0, 1.0, 0.0])})
    graph = GraphSpec(
        chart=chart,
        transverse_form=lambda c: [[0.0, 0.0, 0.0], [0.0, -1.0, 0.0],
                                   [0.0, 0.0, 1.0]],
        reference=np.array([0.0, 1.0, 0.0]),
        leaf_label=_transverse_cell_labels((1, 2), chart.lo),
        axis_cells=lambda r: (r, r, r))
    expected = (
        ExpectedClaim("transverse_metric_form", "-dt^2 + dx^2", "paper"),
        ExpectedClaim("pushup_violations", 0, "derived"),
        ExpectedClaim("openness_violations", 0, "derived"),
        ExpectedClaim("closed_transverse_timelike_cycle", None, "trivial"),
    )
    return ExampleSpec("mink3_vertical", fol, gT, orient, expected, graph=graph)


# ---------------------------------------------------------------- kronecker

def _kronecker():
    lam = SQRT2

    def g(x):
        return [[1.0 + lam * lam, lam], [lam, 1.0]]

    chart = _box_chart("box", ("a", "u"), [0, 0], [1, 1], [False, True], g)
    fol = FoliatedAtlas(ChartAtlas.build([chart]), leaf_dim=1, codim=1,
                        allow_low_codim=True,
                        leaf_space_meta={
                            "identification": "irrational-slope line flow on the"
                                              " 2-torus; every leaf is dense",
                            "hausdorff": False, "compact_leaves": False,
                            "transversely_globally_hyperbolic": False})
    gT = TransverseMetricField(
        fol, {"box": lambda xq: [[1.0 / (1.0 + lam * lam)]]}, index=0)
    expected = (
        ExpectedClaim("transverse_index", 0, "paper"),
        ExpectedClaim("leaf_space_hausdorff", False, "paper"),
    )
    return ExampleSpec("kronecker_T2", fol, gT, None, expected,
                       extras={"slope": lam})


# ---------------------------------------------------------------- torus3

def _torus3():
    a, b = SQRT2, SQRT3
    s = -1.0 + a * a + b * b  # g(leaf direction, leaf direction)

    def g_adapted(x):
        return [[s, a, b], [a, 1.0, 0.0], [b, 0.0, 1.0]]

    chart = _box_chart("box", ("l", "u", "v"), [0, 0, 0], [1, 1, 1],
                       [False] * 3, g_adapted)
    fol = FoliatedAtlas(ChartAtlas.build([chart]), leaf_dim=1, codim=2,
                        leaf_space_meta={
                            "identification": "dense spacelike line flow on the"
                                              " flat Lorentzian 3-torus",
                            "hausdorff": False, "compact_leaves": False,
                            "transversely_globally_hyperbolic": False})
    guu = 1.0 - a * a / s
    gvv = 1.0 - b * b / s
    guv = -a * b / s
    gT = TransverseMetricField(
        fol, {"box": lambda xq: [[guu, guv], [guv, gvv]]})
    orient = TimeOrientation({"box": lambda x: np.array([0.0, -a, -b])})

    # Graph in the original flat coordinates (t, x, y), where the torus
    # identifications are axis-aligned. The transverse form is the flat
    # metric with the leaf direction X = (1, a, b) projected out.
    G = np.diag([-1.0, 1.0, 1.0])
    X = np.array([1.0, a, b])
    Q = G - np.outer(G @ X, G @ X) / float(X @ G @ X)

    def torus_metric(x):
        return [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]

    gchart = _box_chart("torus", ("t", "x", "y"), [0, 0, 0], [1, 1, 1],
                        [True] * 3, torus_metric)

    def node_labels(pts, spacing):
        cols = _cells_from_labels(pts, spacing, (0, 1, 2), gchart.lo)
        return list(zip(*cols))

    graph = GraphSpec(
        chart=gchart,
        transverse_form=lambda c: [[Q[0, 0], Q[0, 1], Q[0, 2]],
                                   [Q[1, 0], Q[1, 1], Q[1, 2]],
                                   [Q[2, 0], Q[2, 1], Q[2, 2]]],
        reference=np.array([1.0, 0.0, 0.0]),
        leaf_label=node_labels,
        axis_cells=lambda r: (r, r, r))
    expected = (
        ExpectedClaim("closed_transverse_timelike_cycle", "exists", "paper"),
        ExpectedClaim("transversely_chronological", False, "paper"),
    )
    return ExampleSpec("torus3_dense", fol, gT, orient, expected, graph=graph,
                       extras={"slopes": (a, b), "full_form": Q})


# ---------------------------------------------------------------- helix

def _helix():
    # Minkowski R^3 with (t, x + 2, y) ~ (t, x, y), foliated by integral
    # curves of X = dt + 2 dx. Adapted coordinates (a, s, y) via t = a,
    # x = s + 2a, with s periodic of period 2.
    def g(x):
        return [[3.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]]

    chart = _box_chart("box", ("a", "s", "y"), [0, 0, -2], [1, 2, 2],
                       [False, True, False], g)
    fol = FoliatedAtlas(ChartAtlas.build([chart]), leaf_dim=1, codim=2,
                        leaf_space_meta={
                            "identification": "spacelike helices; leaf space is"
                                              " a cylinder",
                            "hausdorff": True, "compact_leaves": False,
                            "transversely_globally_hyperbolic": False})
    gT = TransverseMetricField(
        fol, {"box": lambda xq: [[-1.0 / 3.0, 0.0], [0.0, 1.0]]})
    orient = TimeOrientation({"box": lambda x: np.array([0.0, 1.0, 0.0])})
    graph = GraphSpec(
        chart=chart,
        transverse_form=lambda c: [[0.0, 0.0, 0.0],
                                   [0.0, -1.0 / 3.0, 0.0],
                                   [0.0, 0.0, 1.0]],
        reference=np.array([0.0, 1.0, 0.0]),
        leaf_label=_transverse_cell_labels((1, 2), chart.lo),
        axis_cells=lambda r: (1, r, r))
    expected = (
        ExpectedClaim("transversely_totally_vicious_evidence", 1.0, "paper"),
        ExpectedClaim("closed_transverse_timelike_cycle", "exists", "paper"),
    )
    return ExampleSpec("helix_foliation", fol, gT, orient, expected, graph=graph)


# ---------------------------------------------------------------- misner

def _misner():
    # Suspension of the boost with parameter 1 on Minkowski R^2. Local
    # adapted chart (c, T, X) with leaf coordinate c along the suspension
    # direction; the holonomy generator acts on the transverse block alone.
    alpha = 1.0
    ch, sh = math.cosh(alpha), math.sinh(alpha)
    boost = np.array([[ch, sh], [sh, ch]])

    def g(x):
        return [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]

    chart = _box_chart("box", ("c", "T", "X"), [0, -2, -2], [1, 2, 2],
                       [False] * 3, g)

    def holo_map(x):
        x = np.asarray(x, dtype=float)
        return np.concatenate([[x[0] - 1.0], boost @ x[1:]])

    jac = np.zeros((3, 3))
    jac[0, 0] = 1.0
    jac[1:, 1:] = boost
    transition = Transition("box", "box", holo_map, lambda x: jac)

    fol = FoliatedAtlas(ChartAtlas.build([chart], [transition]),
                        leaf_dim=1, codim=2,
                        leaf_space_meta={
                            "identification": "boost suspension; non-Hausdorff"
                                              " leaf space near the null orbits",
                            "hausdorff": False, "compact_leaves": False,
                            "transversely_globally_hyperbolic": False})
    gT = TransverseMetricField(
        fol, {"box": lambda xq: [[-1.0, 0.0], [0.0, 1.0]]})
    orient = TimeOrientation({"box": lambda x: np.array([0.0, 1.0, 0.0])})
    suspension = SuspensionSpec(
        model_dim=2,
        model_metric=lambda x: [[-1.0, 0.0], [0.0, 1.0]],
        holonomy=lambda x: boost @ np.asarray(x, dtype=float),
        holonomy_differential=lambda x: boost,
        reference=lambda x: np.array([1.0, 0.0]),
        probe_box=(np.array([-2.0, -2.0]), np.array([2.0, 2.0])))
    expected = (
        ExpectedClaim("transversely_time_orientable", True, "paper"),
    )
    return ExampleSpec("misner_suspension", fol, gT, orient, expected,
                       suspension=suspension, extras={"boost": boost})


def reversed_suspension():
    """Suspension of the antipodal map (t, x) -> (-t, -x) on Minkowski R^2;
    the standard non-transversely-time-orientable companion case."""
    flip = -np.eye(2)
    return SuspensionSpec(
        model_dim=2,
        model_metric=lambda x: [[-1.0, 0.0], [0.0, 1.0]],
        holonomy=lambda x: flip @ np.asarray(x, dtype=float),
        holonomy_differential=lambda x: flip,
        reference=lambda x: np.array([1.0, 0.0]),
        probe_box=(np.array([-2.0, -2.0]), np.array([2.0, 2.0])))


# ---------------------------------------------------------------- deleted

def _segment_barrier():
    # removed set: {(t, x, 0) : 0 <= t <= 1}; chart order is (y, t, x)
    def node_blocked(pts):
        return (pts[:, 0] == 0.0) & (pts[:, 1] >= 0.0) & (pts[:, 1] <= 1.0)

    def chord_blocked(a, b):
        ya, yb = a[:, 0], b[:, 0]
        crosses = (ya * yb < 0) | (ya == 0.0) | (yb == 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            srel = np.where(ya != yb, ya / (ya - yb), 0.0)
        t_at = a[:, 1] + srel * (b[:, 1] - a[:, 1])
        return crosses & (t_at >= -1e-12) & (t_at <= 1.0 + 1e-12)

    return Barrier(node_blocked, chord_blocked)


def _deleted_segment():
    def g(x):
        return [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]

    chart = _box_chart("box", ("y", "t", "x"), [-2, -0.5, -2], [2, 1.5, 2],
                       [False] * 3, g)
    fol = FoliatedAtlas(ChartAtlas.build([chart]), leaf_dim=1, codim=2,
                        leaf_space_meta={
                            "identification": "fibers of (t, x, y) -> (t, x) on"
                                              " R^3 minus {(t, x, 0): 0<=t<=1};"
                                              " fibers over 0<=t<=1 split in two",
                            "hausdorff": False, "compact_leaves": False,
                            "transversely_globally_hyperbolic": False,
                            "leaf_label": _deleted_segment_leaf_label})
    gT = TransverseMetricField(fol, {"box": lambda xq: [[-1.0, 0.0], [0.0, 1.0]]})
    orient = TimeOrientation({"box": lambda x: np.array([0.0, 1.0, 0.0])})

    def node_labels(pts, spacing):
        cols = _cells_from_labels(pts, spacing, (1, 2), chart.lo)
        split = (pts[:, 1] >= -1e-9) & (pts[:, 1] <= 1.0 + 1e-9)
        comp = np.where(split, np.sign(pts[:, 0]).astype(int), 0)
        return list(zip(cols[0], cols[1], comp))

    graph = GraphSpec(
        chart=chart,
        transverse_form=lambda c: [[0.0, 0.0, 0.0], [0.0, -1.0, 0.0],
                                   [0.0, 0.0, 1.0]],
        reference=np.array([0.0, 1.0, 0.0]),
        leaf_label=node_labels,
        axis_cells=lambda r: (r, r, r),
        barrier=_segment_barrier())
    expected = (
        ExpectedClaim("reach_hits_lower_components", True, "paper"),
        ExpectedClaim("reach_misses_upper_components", True, "paper"),
    )
    return ExampleSpec("deleted_segment", fol, gT, orient, expected, graph=graph)


def _deleted_segment_leaf_label(chart_id, x):
    x = np.asarray(x, dtype=float)
    y, t, xx = x[0], x[1], x[2]
    comp = int(np.sign(y)) if 0.0 <= t <= 1.0 else 0
    return (round(float(t), 9), round(float(xx), 9), comp)


def _box_barrier():
    # removed set: {|t| <= 1, |x| <= 4, y <= 4}; chart order is (y, t, x)
    lo = np.array([-np.inf, -1.0, -4.0])
    hi = np.array([4.0, 1.0, 4.0])

    def inside(pts):
        return np.all((pts >= lo) & (pts <= hi), axis=1)

    def chord_blocked(a, b):
        # segment/axis-aligned-box intersection by slab clipping
        d = b - a
        t0 = np.zeros(len(a))
        t1 = np.ones(len(a))
        miss = np.zeros(len(a), dtype=bool)
        for k in range(3):
            dk = d[:, k]
            par = dk == 0.0
            miss |= par & ((a[:, k] < lo[k]) | (a[:, k] > hi[k]))
            with np.errstate(divide="ignore", invalid="ignore"):
                ta = np.where(par, 0.0, (lo[k] - a[:, k]) / dk)
                tb = np.where(par, 1.0, (hi[k] - a[:, k]) / dk)
            enter = np.minimum(ta, tb)
            leave = np.maximum(ta, tb)
            t0 = np.where(par, t0, np.maximum(t0, enter))
            t1 = np.where(par, t1, np.minimum(t1, leave))
        return ~miss & (t0 <= t1)

    return Barrier(inside, chord_blocked)


def _deleted_box():
    def g(x):
        return [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]

    chart = _box_chart("box", ("y", "t", "x"), [-2, -2.5, -2.5],
                       [8, 0.5, 2.5], [False] * 3, g)
    fol = FoliatedAtlas(ChartAtlas.build([chart]), leaf_dim=1, codim=2,
                        leaf_space_meta={
                            "identification": "fibers of (t, x, y) -> (t, x) on"
                                              " R^3 minus a closed box and the"
                                              " point (-2, 0, 0)",
                            "hausdorff": False, "compact_leaves": False,
                            "transversely_globally_hyperbolic": False,
                            "leaf_label": _deleted_box_leaf_label})
    gT = TransverseMetricField(fol, {"box": lambda xq: [[-1.0, 0.0], [0.0, 1.0]]})
    orient = TimeOrientation({"box": lambda x: np.array([0.0, 1.0, 0.0])})

    def node_labels(pts, spacing):
        cols = _cells_from_labels(pts, spacing, (1, 2), chart.lo)
        split = (np.abs(pts[:, 1] + 2.0) <= spacing[1] / 2 + 1e-9) \
            & (np.abs(pts[:, 2]) <= spacing[2] / 2 + 1e-9)
        comp = np.where(split, np.sign(pts[:, 0]).astype(int), 0)
        return list(zip(cols[0], cols[1], comp))

    graph = GraphSpec(
        chart=chart,
        transverse_form=lambda c: [[0.0, 0.0, 0.0], [0.0, -1.0, 0.0],
                                   [0.0, 0.0, 1.0]],
        reference=np.array([0.0, 1.0, 0.0]),
        leaf_label=node_labels,
        axis_cells=lambda r: (10, r, r),
        barrier=_box_barrier())
    expected = (
        ExpectedClaim("probe_in_saturated_transverse_future", True, "paper"),
        ExpectedClaim("probe_in_saturated_metric_future", False, "paper"),
    )
    return ExampleSpec("deleted_box", fol, gT, orient, expected, graph=graph,
                       extras={"probe_point": np.array([6.0, 0.0, 0.0]),
                               "seed_point": np.array([-1.0, -2.0, 0.0])})


def _deleted_box_leaf_label(chart_id, x):
    x = np.asarray(x, dtype=float)
    y, t, xx = x[0], x[1], x[2]
    comp = int(np.sign(y)) if (abs(t + 2.0) < 1e-9 and abs(xx) < 1e-9) else 0
    return (round(float(t), 9), round(float(xx), 9), comp)


# ---------------------------------------------------------------- warped

def desitter_base_metric(x):
    """4-d de Sitter slab metric -dt^2 + cosh^2(t) (round 3-sphere), in
    coordinates (t, psi, th, ph)."""
    c2 = dual.cosh(x[0]) ** 2
    sp2 = dual.sin(x[1]) ** 2
    st2 = dual.sin(x[2]) ** 2
    return [[-1.0, 0.0, 0.0, 0.0],
            [0.0, c2, 0.0, 0.0],
            [0.0, 0.0, c2 * sp2, 0.0],
            [0.0, 0.0, 0.0, c2 * sp2 * st2]]


def desitter_base_ricci(x):
    g = np.array([[dual.value(v) for v in row] for row in desitter_base_metric(x)])
    return 3.0 * g


def _desitter():
    # 6-d warped product: flat 2-torus leaves over the de Sitter slab base
    # (0, L) x S^3 with warping f(t) = sqrt(t), L = sqrt(2)/4. Adapted order
    # (u1, u2, t, psi, th, ph).
    eps = 0.3

    def g(x):
        t = x[2]
        base = desitter_base_metric(x[2:])
        return [[t, 0.0, 0.0, 0.0, 0.0, 0.0],
                [0.0, t, 0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, base[0][0], 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, base[1][1], 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, base[2][2], 0.0],
                [0.0, 0.0, 0.0, 0.0, 0.0, base[3][3]]]

    chart = _box_chart("box", ("u1", "u2", "t", "psi", "th", "ph"),
                       [0, 0, 0, eps, eps, 0],
                       [1, 1, DESITTER_L, math.pi - eps, math.pi - eps,
                        2 * math.pi],
                       [True, True, False, False, False, True], g)
    fol = FoliatedAtlas(ChartAtlas.build([chart]), leaf_dim=2, codim=4,
                        leaf_space_meta={
                            "identification": "flat torus fibers over the"
                                              " warped de Sitter slab",
                            "hausdorff": True, "compact_leaves": True,
                            "transversely_globally_hyperbolic": True})
    gT = TransverseMetricField(fol, {"box": desitter_base_metric})
    orient = TimeOrientation(
        {"box": lambda x: np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.0])})
    expected = (
        ExpectedClaim("base_ricci_identity_factor", 3.0, "paper"),
        ExpectedClaim("min_full_ricci_timelike", 1.0, "paper"),
        ExpectedClaim("max_transverse_ricci_timelike", -3.0, "paper"),
    )
    extras = {
        "warping": lambda xb: dual.sqrt(xb[0]),
        "base_metric": desitter_base_metric,
        "base_ricci": desitter_base_ricci,
        "fiber_metric": lambda xf: [[1.0, 0.0], [0.0, 1.0]],
        "fiber_ricci": lambda xf: np.zeros((2, 2)),
        "fiber_dim": 2,
        "base_axes": (2, 3, 4, 5),
        "fiber_axes": (0, 1),
        "L": DESITTER_L,
    }
    return ExampleSpec("desitter_warp", fol, gT, orient, expected, extras=extras)


def logt_quotient_metric(x):
    """3-d transverse metric -dt^2 + log^2(t) (hyperbolic plane), in
    coordinates (t, a, b) with the upper-half-plane model."""
    w = dual.log(x[0]) ** 2 / (x[2] * x[2])
    return [[-1.0, 0.0, 0.0], [0.0, w, 0.0], [0.0, 0.0, w]]


def _logt():
    # 5-d metric: flat 2-torus leaves (u1, u2), transverse block
    # -dt^2 + log^2(t) g_hyp on (t, a, b). Equals the warped product of the
    # flat Lorentzian base (t, u1, u2) with hyperbolic fiber (a, b) and
    # warping f = log t; the foliation runs along the flat directions so the
    # transverse Ricci is the paper's p/(t^2 log t) on dt.
    def g(x):
        w = dual.log(x[2]) ** 2 / (x[4] * x[4])
        return [[1.0, 0.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, -1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, w, 0.0],
                [0.0, 0.0, 0.0, 0.0, w]]

    chart = _box_chart("box", ("u1", "u2", "t", "a", "b"),
                       [0, 0, 1.0, -1, 0.5], [1, 1, math.e, 1, 2],
                       [True, True, False, False, False], g)
    fol = FoliatedAtlas(ChartAtlas.build([chart]), leaf_dim=2, codim=3,
                        leaf_space_meta={
                            "identification": "flat torus fibers; transverse"
                                              " space (1, e) x hyperbolic plane",
                            "hausdorff": True, "compact_leaves": True,
                            "transversely_globally_hyperbolic": True})
    gT = TransverseMetricField(fol, {"box": logt_quotient_metric})
    orient = TimeOrientation(
        {"box": lambda x: np.array([0.0, 0.0, 1.0, 0.0, 0.0])})
    expected = (
        ExpectedClaim("min_transverse_ricci_dt", 2.0 / math.e ** 2, "paper"),
        ExpectedClaim("transverse_ricci_dt_at_2", 1.0 / (2.0 * math.log(2.0)),
                      "derived"),
        ExpectedClaim("negative_full_ricci_exists", True, "paper"),
    )
    extras = {
        "warping": lambda xb: dual.log(xb[0]),
        "base_metric": lambda xb: [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0],
                                   [0.0, 0.0, 1.0]],
        "base_ricci": lambda xb: np.zeros((3, 3)),
        "fiber_metric": lambda xf: [[1.0 / (xf[1] * xf[1]), 0.0],
                                    [0.0, 1.0 / (xf[1] * xf[1])]],
        "fiber_ricci": None,  # computed numerically; curvature -1 closed form
        "fiber_dim": 2,
        "base_axes": (2, 0, 1),
        "fiber_axes": (3, 4),
        "ricci_dt_closed_form": lambda t: 2.0 / (t * t * math.log(t)),
    }
    return ExampleSpec("logt_warp", fol, gT, orient, expected, extras=extras)


# ---------------------------------------------------------------- cos warp

def _cos_warp_entry(example_id, root_c, eps=0.05):
    half = math.pi / (2.0 * root_c) - eps

    def g(x):
        w = dual.cos(root_c * x[1]) ** 2
        return [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, w]]

    chart = _box_chart("box", ("phi", "t", "th"), [0, -half, 0],
                       [1, half, 2 * math.pi], [True, False, True], g)
    fol = FoliatedAtlas(ChartAtlas.build([chart]), leaf_dim=1, codim=2,
                        leaf_space_meta={
                            "identification": "circle fibers over the cosine-"
                                              "warped Lorentzian cylinder",
                            "hausdorff": True, "compact_leaves": True,
                            "transversely_globally_hyperbolic": True})

    def gt(xq):
        return [[-1.0, 0.0], [0.0, dual.cos(root_c * xq[0]) ** 2]]

    gT = TransverseMetricField(fol, {"box": gt})
    orient = TimeOrientation({"box": lambda x: np.array([0.0, 1.0, 0.0])})
    graph = GraphSpec(
        chart=chart,
        transverse_form=lambda c: [[0.0, 0.0, 0.0], [0.0, -1.0, 0.0],
                                   [0.0, 0.0, dual.cos(root_c * c[1]) ** 2]],
        reference=np.array([0.0, 1.0, 0.0]),
        leaf_label=_transverse_cell_labels((1, 2), chart.lo),
        axis_cells=lambda r: (1, r, r))
    C = root_c * root_c
    diameter = 2.0 * half
    expected = (
        ExpectedClaim("transverse_ricci_bound_min", C, "derived"),
        ExpectedClaim("analytic_diameter", diameter, "derived"),
        ExpectedClaim("diameter_bound", math.pi / root_c, "paper"),
    )
    extras = {
        "C": C, "eps": eps, "analytic_diameter": diameter,
        "quotient_metric": lambda xq: [[-1.0, 0.0],
                                       [0.0, dual.cos(root_c * xq[0]) ** 2]],
        "t_axis": 1,
    }
    return ExampleSpec(example_id, fol, gT, orient, expected, graph=graph,
                       extras=extras)


def _flat_slab():
    def g(x):
        return [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]

    chart = _box_chart("box", ("phi", "t", "th"), [0, 0, 0],
                       [1, 1, 2 * math.pi], [True, False, True], g)
    fol = FoliatedAtlas(ChartAtlas.build([chart]), leaf_dim=1, codim=2,
                        leaf_space_meta={
                            "identification": "circle fibers over the flat"
                                              " Lorentzian slab cylinder",
                            "hausdorff": True, "compact_leaves": True,
                            "transversely_globally_hyperbolic": True})
    gT = TransverseMetricField(fol, {"box": lambda xq: [[-1.0, 0.0], [0.0, 1.0]]})
    orient = TimeOrientation({"box": lambda x: np.array([0.0, 1.0, 0.0])})
    graph = GraphSpec(
        chart=chart,
        transverse_form=lambda c: [[0.0, 0.0, 0.0], [0.0, -1.0, 0.0],
                                   [0.0, 0.0, 1.0]],
        reference=np.array([0.0, 1.0, 0.0]),
        leaf_label=_transverse_cell_labels((1, 2), chart.lo),
        axis_cells=lambda r: (1, r, r))
    expected = (
        ExpectedClaim("analytic_diameter", 1.0, "derived"),
    )
    extras = {"analytic_diameter": 1.0,
              "quotient_metric": lambda xq: [[-1.0, 0.0], [0.0, 1.0]],
              "t_axis": 1}
    return ExampleSpec("flat_slab", fol, gT, orient, expected, graph=graph,
                       extras=extras)


# ---------------------------------------------------------------- registry

_BUILDERS = {
    "mink3_vertical": _mink3,
    "kronecker_T2": _kronecker,
    "torus3_dense": _torus3,
    "helix_foliation": _helix,
    "misner_suspension": _misner,
    "deleted_segment": _deleted_segment,
    "deleted_box": _deleted_box,
    "desitter_warp": _desitter,
    "logt_warp": _logt,
    "cos_warp": lambda: _cos_warp_entry("cos_warp", 1.0),
    "cos_warp_c4": lambda: _cos_warp_entry("cos_warp_c4", 2.0),
    "flat_slab": _flat_slab,
}


def list_examples():
    return sorted(_BUILDERS)


@functools.lru_cache(maxsize=None)
def get(example_id):
    try:
        builder = _BUILDERS[example_id]
    except KeyError:
        raise UnknownExample(f"no example {example_id!r}; "
                             f"known: {', '.join(list_examples())}") from None
    spec = builder()
    _audit(spec)
    return spec


def _audit(spec: ExampleSpec, samples=200):
    if spec.gT is not None:
        audit_transverse_field(spec.fol, spec.gT, samples=samples)
    if spec.orient is not None:
        audit_orientation(spec.fol, spec.gT, spec.orient, samples=samples)
    if spec.fol.base.transitions:
        audit_transition_basicity(spec.fol, samples=samples // 4)
