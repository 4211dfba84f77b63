"""Foliations in adapted charts: transverse metrics, bundle-like assembly,
vertical/horizontal splitting, transverse causal classification, the
waterfall construction, curve lifting and time-orientability decisions.

Convention used throughout: in every adapted chart the first ``p``
coordinates run along the leaves and the last ``q`` are transverse; the
local submersion is projection onto the last ``q`` coordinates, and the
transition maps act on the transverse block through the transverse
coordinates alone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (ChartChainNotFound, IndexMismatch, InvalidCurve,
                     NoTimelikeDirections, NonFiniteCoefficient,
                     NotAnIsometry, NotSameLeaf, SingularMetric)
from .geometry import (DEFAULT_CAUSAL_TOL, Chart, ChartAtlas, CurveSamples,
                       TangentVector, composite_simpson, eval_metric,
                       sample_points)

_BASIC_TOL = 1e-8
_ISOMETRY_TOL = 1e-8
_ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class FoliatedAtlas:
    """A foliation presented by adapted charts.

    ``leaf_space_meta`` is a per-example declaration about the quotient:
    expected keys are ``identification`` (free-text rule), ``hausdorff`` and
    ``compact_leaves`` (booleans) and optionally ``leaf_label``, a callable
    ``(chart_id, point) -> hashable`` naming the leaf through a point (the
    component label for examples whose leaves split into declared pieces).
    """

    base: ChartAtlas
    leaf_dim: int
    codim: int
    leaf_space_meta: dict = field(default_factory=dict)
    allow_low_codim: bool = False

    def __post_init__(self):
        if self.leaf_dim < 1:
            raise ValueError("leaf dimension must be at least 1")
        if self.leaf_dim + self.codim != self.base.dim:
            raise ValueError("leaf_dim + codim must equal the manifold dimension")
        if self.codim < 2 and not self.allow_low_codim:
            raise ValueError("codimension below 2 needs allow_low_codim")

    @property
    def dim(self):
        return self.base.dim

    def transverse(self, x):
        """Transverse coordinates of a point (the local submersion)."""
        return np.asarray(x, dtype=float)[-self.codim:]

    def leaf_part(self, x):
        return np.asarray(x, dtype=float)[:self.leaf_dim]

    def split_components(self, v):
        """(leaf components, transverse components) of a component vector."""
        v = np.asarray(v, dtype=float)
        return v[:self.leaf_dim], v[self.leaf_dim:]

    def leaf_label(self, chart_id, x):
        label = self.leaf_space_meta.get("leaf_label")
        if label is None:
            return tuple(np.round(self.transverse(x), 9))
        return label(chart_id, x)


@dataclass(frozen=True)
class TransverseMetricField:
    """Per-chart transverse metric: a function of the q transverse coordinates
    returning a symmetric q x q matrix of index ``index``."""

    fol: FoliatedAtlas
    fns: dict
    index: int = 1

    def chart_fn(self, chart_id):
        try:
            return self.fns[chart_id]
        except KeyError:
            raise ChartChainNotFound(f"no transverse metric for chart {chart_id!r}") from None

    def matrix(self, chart_id, x):
        """q x q matrix at the transverse coordinates of the full point ``x``."""
        chart = self.fol.base.chart(chart_id)
        xq = self.fol.transverse(chart.reduce(x))
        g = np.asarray(self.chart_fn(chart_id)(xq), dtype=float)
        if not np.all(np.isfinite(g)):
            raise NonFiniteCoefficient(f"transverse metric at {xq} in {chart_id!r}")
        return 0.5 * (g + g.T)

    def full_tensor(self, chart_id, x):
        """The n x n tensor: zero on leaf rows/columns, g-transverse block last."""
        q = self.fol.codim
        out = np.zeros((self.fol.dim, self.fol.dim))
        out[-q:, -q:] = self.matrix(chart_id, x)
        return out

    def form(self, chart_id, x, v, w=None):
        """g-transverse quadratic/bilinear form on component vectors."""
        g = self.matrix(chart_id, x)
        vq = np.asarray(v, dtype=float)[-self.fol.codim:]
        wq = vq if w is None else np.asarray(w, dtype=float)[-self.fol.codim:]
        return float(vq @ g @ wq)


@dataclass(frozen=True)
class TimeOrientation:
    """Per-chart reference field spanning the future transverse timewedge.

    ``fields`` maps chart ids to callables ``point -> n components``; the
    reference must be transversely timelike everywhere on its chart.
    """

    fields: dict

    def ref(self, chart_id, x):
        try:
            fn = self.fields[chart_id]
        except KeyError:
            raise ChartChainNotFound(f"no reference field for chart {chart_id!r}") from None
        return np.asarray(fn(np.asarray(x, dtype=float)), dtype=float)


class TransverseKind(enum.Enum):
    TIMELIKE = "transversely timelike"
    LIGHTLIKE = "transversely lightlike"
    SPACELIKE = "transversely spacelike"


class Wedge(enum.Enum):
    FUTURE = "future"
    PAST = "past"


@dataclass(frozen=True)
class TransverseCausalClass:
    kind: TransverseKind
    wedge: Optional[Wedge] = None
    wedge_ambiguous: bool = False

    @property
    def causal(self):
        return self.kind is not TransverseKind.SPACELIKE


def classify_transverse(fol: FoliatedAtlas, gT: TransverseMetricField,
                        orient: Optional[TimeOrientation], v: TangentVector,
                        tol=DEFAULT_CAUSAL_TOL):
    """Transverse causal class of ``v``; vertical vectors are spacelike.

    The tolerance band applies to the vector rescaled to max-abs 1 so the
    decision is scale-free. Wedge labels come from the sign of
    g-transverse(v, X_ref) and are flagged ambiguous inside the band.
    """
    _, vq = fol.split_components(v.comps)
    scale = np.max(np.abs(vq))
    if scale == 0.0:
        return TransverseCausalClass(TransverseKind.SPACELIKE)
    u = v.comps / scale
    qform = gT.form(v.chart_id, v.base, u)
    if qform > tol:
        return TransverseCausalClass(TransverseKind.SPACELIKE)
    kind = TransverseKind.TIMELIKE if qform < -tol else TransverseKind.LIGHTLIKE
    if orient is None:
        return TransverseCausalClass(kind)
    pairing = gT.form(v.chart_id, v.base, u, orient.ref(v.chart_id, v.base))
    wedge = Wedge.FUTURE if pairing < 0 else Wedge.PAST
    return TransverseCausalClass(kind, wedge, wedge_ambiguous=abs(pairing) <= tol)


def assemble_bundle_like(fol: FoliatedAtlas, gT: TransverseMetricField,
                         h_fns: dict, audit_points=200, seed=0):
    """Bundle-like metric functions from a transverse metric and a Riemannian
    auxiliary metric: g(X, Y) = g-transverse(dpi X, dpi Y) + h(X_vert, Y_vert),
    with the vertical part taken in h's orthogonal splitting.

    ``h_fns`` maps chart ids to positive-definite n x n coefficient functions.
    Returns a dict of per-chart metric functions; audits that the result has
    index equal to the transverse index at sampled points.
    """
    p, n = fol.leaf_dim, fol.dim
    ev = np.eye(n)[:, :p]
    funcs = {}
    for cid in fol.base.charts:
        hfn = h_fns[cid]
        tfn = gT.chart_fn(cid)
        q = fol.codim

        def metric(x, hfn=hfn, tfn=tfn):
            x = np.asarray(x, dtype=float)
            h = np.asarray(hfn(x), dtype=float)
            # vertical projector along h's horizontal complement
            block = ev.T @ h @ ev
            proj = ev @ np.linalg.solve(block, ev.T @ h)
            gt = np.asarray(tfn(x[-q:]), dtype=float)
            out = proj.T @ h @ proj
            out[-q:, -q:] += gt
            return 0.5 * (out + out.T)

        funcs[cid] = metric
    _audit_assembled_index(fol, funcs, gT.index, audit_points, seed)
    return funcs


def _audit_assembled_index(fol, funcs, mu, count, seed):
    rng = np.random.default_rng(seed)
    for cid, fn in funcs.items():
        chart = fol.base.chart(cid)
        for x in sample_points(chart, count, rng):
            w = np.linalg.eigvalsh(np.asarray(fn(x), dtype=float))
            if int(np.sum(w < 0)) != mu:
                raise IndexMismatch(
                    f"assembled metric index {int(np.sum(w < 0))} != {mu} "
                    f"at {x} in chart {cid!r}")


def split(fol: FoliatedAtlas, atlas_with_g: ChartAtlas, v: TangentVector):
    """g-orthogonal decomposition v = v_vertical + v_horizontal.

    The vertical part lies along the leaf coordinates; the horizontal part is
    its g-orthogonal complement. Works for any metric adapted to the charts.
    """
    p = fol.leaf_dim
    g = eval_metric(atlas_with_g, v.chart_id, v.base)
    ev = np.eye(fol.dim)[:, :p]
    a = np.linalg.solve(ev.T @ g @ ev, ev.T @ g @ v.comps)
    v_vert = ev @ a
    v_hor = v.comps - v_vert
    residual = abs(float(v_vert @ g @ v_hor))
    scale = max(1.0, float(np.abs(v.comps).max()) ** 2 * float(np.abs(g).max()))
    if residual > _ORTHO_TOL * scale:
        raise SingularMetric(f"split residual {residual} at {v.base}")
    return (TangentVector(v.chart_id, v.base, v_vert),
            TangentVector(v.chart_id, v.base, v_hor))


def transverse_length(fol: FoliatedAtlas, gT: TransverseMetricField,
                      curve: CurveSamples, with_error=False):
    """Integral of sqrt(|g-transverse(curve', curve')|) along the curve."""
    speeds = np.empty(curve.n_samples)
    for i in range(curve.n_samples):
        speeds[i] = np.sqrt(abs(gT.form(curve.chart_ids[i], curve.points[i],
                                        curve.velocities[i])))
    val, err = composite_simpson(curve.params, speeds, curve.breakpoints)
    val = max(val, 0.0)
    return (val, err) if with_error else val


def waterfall(fol: FoliatedAtlas, gT: TransverseMetricField,
              orient: Optional[TimeOrientation], alpha: CurveSamples, z,
              leaf_tol=1e-9):
    """Replace the start of a transversely causal curve by a given point on
    the same leaf, preserving the transverse quadratic form exactly.

    The new curve keeps alpha's transverse coordinates sample-for-sample and
    slants a straight leaf-coordinate segment from ``z`` to alpha's endpoint,
    so g-transverse(beta', beta') equals g-transverse(alpha', alpha') at every
    parameter (the transverse data are untouched).
    """
    z = np.asarray(z, dtype=float)
    cid = alpha.chart_ids[0]
    if any(c != cid for c in alpha.chart_ids):
        raise ChartChainNotFound("waterfall needs a single-chart curve; "
                                 "concatenate per-chart pieces instead")
    chart = fol.base.chart(cid)
    q = fol.codim
    dz = chart.reduce(z)[-q:] - chart.reduce(alpha.points[0])[-q:]
    per = chart.period()[-q:]
    wrap = chart.periodic[-q:]
    dz[wrap] = (dz[wrap] + per[wrap] / 2) % per[wrap] - per[wrap] / 2
    if np.max(np.abs(dz)) > leaf_tol:
        raise NotSameLeaf(f"start point transverse offset {dz}")
    if fol.leaf_label(cid, z) != fol.leaf_label(cid, alpha.points[0]):
        raise NotSameLeaf("start point lies on a different declared leaf component")

    a, b = alpha.params[0], alpha.params[-1]
    s = (alpha.params - a) / (b - a)
    z_leaf = z[:fol.leaf_dim]
    end_leaf = alpha.points[-1][:fol.leaf_dim]
    pts = alpha.points.copy()
    pts[:, :fol.leaf_dim] = z_leaf + np.outer(s, end_leaf - z_leaf)
    vels = alpha.velocities.copy()
    vels[:, :fol.leaf_dim] = (end_leaf - z_leaf) / (b - a)
    for x in pts:
        if not chart.contains(chart.reduce(x)):
            raise ChartChainNotFound(f"slanted curve exits chart {cid!r} at {x}")
    return CurveSamples(alpha.params, alpha.chart_ids, pts, vels, alpha.breakpoints)


def lift_curve(fol: FoliatedAtlas, params, base_points, base_velocities,
               chart_id, start_leaf_point, breakpoints=()):
    """Lift a curve given in transverse coordinates through the constant local
    section at ``start_leaf_point``.

    The lift projects to the base curve exactly and its transverse length
    equals the base curve's quotient-metric length (same integrand).
    """
    base_points = np.asarray(base_points, dtype=float)
    base_velocities = np.asarray(base_velocities, dtype=float)
    start_leaf_point = np.asarray(start_leaf_point, dtype=float)
    m = len(params)
    chart = fol.base.chart(chart_id)
    p = fol.leaf_dim
    pts = np.empty((m, fol.dim))
    pts[:, :p] = start_leaf_point[:p]
    pts[:, p:] = base_points
    vels = np.zeros((m, fol.dim))
    vels[:, p:] = base_velocities
    for x in pts:
        if not chart.contains(chart.reduce(x)):
            raise ChartChainNotFound(f"lift exits chart {chart_id!r} at {x}")
    return CurveSamples(params, (chart_id,) * m, pts, vels, frozenset(breakpoints))


@dataclass(frozen=True)
class SuspensionSpec:
    """Suspension data: a transverse Lorentzian model plus the generating
    holonomy map with its differential and a future reference field."""

    model_dim: int
    model_metric: Callable          # q coords -> q x q matrix
    holonomy: Callable              # q coords -> q coords
    holonomy_differential: Callable  # q coords -> q x q Jacobian
    reference: Callable             # q coords -> q components, future timelike
    probe_box: tuple                # (lo, hi) arrays for probe sampling


def check_transverse_time_orientability(spec: SuspensionSpec, n_probes=64,
                                        seed=0, tol=_ISOMETRY_TOL):
    """Whether wedge transport under the suspension holonomy preserves the
    future timewedge.

    Audits first that the holonomy is an isometry of the transverse model
    (pullback residual above ``tol`` raises), then pushes a probe set of
    future timelike vectors through the differential and checks they stay
    future. Any flipped probe means the suspension is not transversely
    time-orientable.
    """
    rng = np.random.default_rng(seed)
    lo, hi = (np.asarray(a, dtype=float) for a in spec.probe_box)
    pts = lo + rng.uniform(0.05, 0.95, size=(max(n_probes // 4, 1), spec.model_dim)) * (hi - lo)
    probes_per_point = max(n_probes // len(pts), 1)

    for x in pts:
        g_here = np.asarray(spec.model_metric(x), dtype=float)
        y = np.asarray(spec.holonomy(x), dtype=float)
        dh = np.asarray(spec.holonomy_differential(x), dtype=float)
        g_there = np.asarray(spec.model_metric(y), dtype=float)
        residual = np.max(np.abs(dh.T @ g_there @ dh - g_here))
        if residual > tol * max(1.0, np.max(np.abs(g_here))):
            raise NotAnIsometry(f"holonomy pullback residual {residual} at {x}")

        x_ref = np.asarray(spec.reference(x), dtype=float)
        if float(x_ref @ g_here @ x_ref) >= 0:
            raise NoTimelikeDirections(f"reference field not timelike at {x}")
        for v in _future_timelike_probes(g_here, x_ref, probes_per_point, rng):
            w = dh @ v
            ref_there = np.asarray(spec.reference(y), dtype=float)
            if float(w @ g_there @ ref_there) >= 0:
                return False
    return True


def _future_timelike_probes(g, x_ref, count, rng):
    w, u = np.linalg.eigh(g)
    order = np.argsort(w)
    e0 = u[:, order[0]] / np.sqrt(-w[order[0]])
    if float(e0 @ g @ x_ref) > 0:
        e0 = -e0
    spatial = [u[:, k] / np.sqrt(w[k]) for k in order[1:]]
    out = []
    for _ in range(count):
        chi = rng.uniform(0.0, 3.0)
        coeff = rng.normal(size=len(spatial))
        coeff /= np.linalg.norm(coeff)
        d = sum(c * s for c, s in zip(coeff, spatial))
        out.append(np.cosh(chi) * e0 + np.sinh(chi) * d)
    return out


def audit_transition_basicity(fol: FoliatedAtlas, samples=50, seed=0,
                              step=1e-4, tol=_BASIC_TOL):
    """Check every transition's transverse block ignores leaf coordinates
    (central finite differences along each leaf direction)."""
    rng = np.random.default_rng(seed)
    p, q = fol.leaf_dim, fol.codim
    for key, tr in fol.base.transitions.items():
        chart = fol.base.chart(tr.src)
        for x in sample_points(chart, samples, rng):
            for k in range(p):
                xp, xm = x.copy(), x.copy()
                xp[k] += step
                xm[k] -= step
                d = (np.asarray(tr.map(xp), dtype=float)[-q:]
                     - np.asarray(tr.map(xm), dtype=float)[-q:]) / (2 * step)
                if np.max(np.abs(d)) > tol:
                    raise NonFiniteCoefficient(
                        f"transition {key} transverse block varies along leaf "
                        f"coordinate {k} at {x} (derivative {np.max(np.abs(d))})")


def audit_cocycle_isometry(fol: FoliatedAtlas, gT: TransverseMetricField,
                           samples=50, seed=0, tol=_ISOMETRY_TOL):
    """Check transition maps carry the transverse metric to the transverse
    metric (pullback residual on overlap samples)."""
    rng = np.random.default_rng(seed)
    q = fol.codim
    for key, tr in fol.base.transitions.items():
        src_chart = fol.base.chart(tr.src)
        dst_chart = fol.base.chart(tr.dst)
        for x in sample_points(src_chart, samples, rng):
            y = np.asarray(tr.map(x), dtype=float)
            if not dst_chart.contains(dst_chart.reduce(y)):
                continue
            jac = np.asarray(tr.differential(x), dtype=float)[-q:, -q:]
            h_src = gT.matrix(tr.src, x)
            h_dst = gT.matrix(tr.dst, y)
            residual = np.max(np.abs(jac.T @ h_dst @ jac - h_src))
            if residual > tol * max(1.0, np.max(np.abs(h_src))):
                raise NotAnIsometry(f"cocycle residual {residual} for {key} at {x}")


def audit_transverse_field(fol: FoliatedAtlas, gT: TransverseMetricField,
                           samples=1000, seed=0):
    """Nondegeneracy and constant index of the transverse metric, plus the
    structural basicity of its full-tensor embedding."""
    rng = np.random.default_rng(seed)
    p = fol.leaf_dim
    for cid in gT.fns:
        chart = fol.base.chart(cid)
        for x in sample_points(chart, samples, rng):
            full = gT.full_tensor(cid, x)
            if np.max(np.abs(full[:p, :])) != 0.0 or np.max(np.abs(full[:, :p])) != 0.0:
                raise NonFiniteCoefficient("leaf rows of transverse tensor not zero")
            w = np.linalg.eigvalsh(gT.matrix(cid, x))
            if np.min(np.abs(w)) < 1e-12:
                raise SingularMetric(f"degenerate transverse metric at {x} in {cid!r}")
            if int(np.sum(w < 0)) != gT.index:
                raise IndexMismatch(
                    f"transverse index {int(np.sum(w < 0))} != {gT.index} at {x}")


def audit_orientation(fol: FoliatedAtlas, gT: TransverseMetricField,
                      orient: TimeOrientation, samples=200, seed=0):
    """Reference fields must be transversely timelike across their charts."""
    rng = np.random.default_rng(seed)
    for cid in orient.fields:
        chart = fol.base.chart(cid)
        for x in sample_points(chart, samples, rng):
            ref = orient.ref(cid, x)
            if gT.form(cid, x, ref) >= 0:
                raise NoTimelikeDirections(
                    f"reference field not transversely timelike at {x} in {cid!r}")
