"""Geodesics, matrix Jacobi focal scans and shooting diameter estimates.

All integrators are fixed-step classical Runge-Kutta (order 4) with a final
bisection onto the chart boundary, so runs are deterministic and the energy
conservation drift is an honest accuracy certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .curvature import DerivEngine, _gamma_from, _inverse, _riemann_from
from .errors import (EmptyGrid, LeftAtlas, NotNormal, NotTimelike,
                     StepUnderflow)
from .foliation import (FoliatedAtlas, TimeOrientation, TransverseMetricField,
                        transverse_length)
from .geometry import Chart, CurveSamples

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class GeodesicState:
    """One integration sample: parameter, point, velocity."""

    param: float
    point: np.ndarray
    velocity: np.ndarray


@dataclass(frozen=True)
class GeodesicResult:
    params: np.ndarray
    points: np.ndarray
    velocities: np.ndarray
    exit_reason: str          # "max_param" or "boundary"
    conservation_drift: float  # max |g(u,u) - g(u0,u0)| per unit parameter

    def curve(self, chart_id, breakpoints=()):
        return CurveSamples(self.params, (chart_id,) * len(self.params),
                            self.points, self.velocities,
                            frozenset(breakpoints))


def _geodesic_rhs(metric_fn, engine):
    def rhs(x, u):
        g, dg = engine.value_jac(metric_fn, x)
        gamma = _gamma_from(_inverse(g), dg)
        return u, -np.einsum("kij,i,j->k", gamma, u, u)
    return rhs


def _rk4_step(rhs, x, u, h):
    k1x, k1u = rhs(x, u)
    k2x, k2u = rhs(x + 0.5 * h * k1x, u + 0.5 * h * k1u)
    k3x, k3u = rhs(x + 0.5 * h * k2x, u + 0.5 * h * k2u)
    k4x, k4u = rhs(x + h * k3x, u + h * k3u)
    return (x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x),
            u + (h / 6.0) * (k1u + 2 * k2u + 2 * k3u + k4u))


def integrate_geodesic(metric_fn, chart: Chart, x0, u0, max_param,
                       n_steps=400, engine: DerivEngine = DerivEngine(),
                       boundary_bisections=60):
    """Integrate the geodesic equation from (x0, u0) until ``max_param`` or the
    chart boundary, whichever comes first.

    The final partial step is bisected onto the boundary, so the last sample
    sits just inside the box. Raises LeftAtlas when the start is outside the
    chart and StepUnderflow when the bisected step collapses entirely.
    """
    x0 = chart.reduce(np.asarray(x0, dtype=float))
    u0 = np.asarray(u0, dtype=float)
    if not chart.contains(x0):
        raise LeftAtlas(f"geodesic start {x0} outside chart {chart.chart_id!r}")
    rhs = _geodesic_rhs(metric_fn, engine)
    h = max_param / n_steps
    params = [0.0]
    pts = [x0]
    vels = [u0]
    exit_reason = "max_param"
    x, u, s = x0, u0, 0.0
    for _ in range(n_steps):
        xn, un = _rk4_step(rhs, x, u, h)
        xn = chart.reduce(xn)
        if not chart.contains(xn):
            lo_f, hi_f = 0.0, 1.0
            for _ in range(boundary_bisections):
                mid = 0.5 * (lo_f + hi_f)
                xm, um = _rk4_step(rhs, x, u, h * mid)
                if chart.contains(chart.reduce(xm)):
                    lo_f = mid
                else:
                    hi_f = mid
            if lo_f == 0.0:
                raise StepUnderflow(
                    f"boundary bisection underflow at parameter {s}")
            xn, un = _rk4_step(rhs, x, u, h * lo_f)
            xn = chart.reduce(xn)
            s += h * lo_f
            params.append(s)
            pts.append(xn)
            vels.append(un)
            exit_reason = "boundary"
            break
        x, u = xn, un
        s += h
        params.append(s)
        pts.append(x)
        vels.append(u)

    params = np.asarray(params)
    pts = np.asarray(pts)
    vels = np.asarray(vels)
    energies = np.array([float(v @ np.asarray(metric_fn(p), dtype=float) @ v)
                         for p, v in zip(pts, vels)])
    span = max(params[-1], 1e-30)
    drift = float(np.max(np.abs(energies - energies[0]))) / span
    return GeodesicResult(params, pts, vels, exit_reason, drift)


def check_horizontal(fol: FoliatedAtlas, metric_fn, x, v, tol=1e-9):
    """Whether v is g-orthogonal to every leaf coordinate direction at x."""
    g = np.asarray(metric_fn(np.asarray(x, dtype=float)), dtype=float)
    pairing = g[:fol.leaf_dim, :] @ np.asarray(v, dtype=float)
    scale = max(1.0, float(np.max(np.abs(g))) * float(np.max(np.abs(v))))
    return bool(np.max(np.abs(pairing)) <= tol * scale)


# ------------------------------------------------------------------ focal

@dataclass(frozen=True)
class FocalScanResult:
    """Matrix Jacobi scan along one unit timelike quotient geodesic.

    ``first_zero_param`` is the linearly interpolated parameter of the first
    sign change of det A (None if none before the scan ends);
    ``riccati_trace_samples`` holds (parameter, tr(A' A^-1)) rows;
    ``domain_end_flag`` is True when the scan hit the chart boundary or the
    parameter cap before any focal point.
    """

    first_zero_param: Optional[float]
    riccati_trace_samples: np.ndarray
    domain_end_flag: bool
    params: np.ndarray
    det_samples: np.ndarray


def _orthonormal_frame(g, u):
    """Spacelike unit frame g-orthogonal to the unit timelike u."""
    d = len(u)
    basis = []
    for k in range(d):
        e = np.zeros(d)
        e[k] = 1.0
        e = e + float(e @ g @ u) * u  # project out u (g(u,u) = -1)
        for b in basis:
            e = e - float(e @ g @ b) * b
        norm_sq = float(e @ g @ e)
        if norm_sq > 1e-10:
            basis.append(e / np.sqrt(norm_sq))
        if len(basis) == d - 1:
            break
    if len(basis) != d - 1:
        raise NotNormal("could not complete a spacelike frame normal to u")
    return basis


def focal_scan(metric_fn, chart: Chart, x0, u0, max_param, n_steps=400,
               engine: DerivEngine = DerivEngine(), unit_tol=1e-8):
    """Scan for the first focal parameter along the quotient geodesic from
    (x0, u0): integrate A'' + R A = 0 with A(0) = 0, A'(0) = I in a parallel
    frame normal to the geodesic and watch det A.

    Requires u0 unit timelike (raises NotTimelike / NotNormal otherwise).
    """
    x0 = chart.reduce(np.asarray(x0, dtype=float))
    u0 = np.asarray(u0, dtype=float)
    g0 = np.asarray(metric_fn(x0), dtype=float)
    q0 = float(u0 @ g0 @ u0)
    if q0 >= 0.0:
        raise NotTimelike(f"focal scan needs a timelike start direction (got {q0})")
    if abs(q0 + 1.0) > unit_tol:
        raise NotNormal(f"start direction not unit normalized: g(u,u) = {q0}")
    d = chart.dim
    m = d - 1
    frame0 = np.column_stack(_orthonormal_frame(g0, u0))

    def rhs(state):
        x = state[:d]
        u = state[d:2 * d]
        E = state[2 * d:2 * d + d * m].reshape(d, m)
        A = state[2 * d + d * m:2 * d + d * m + m * m].reshape(m, m)
        Ap = state[2 * d + d * m + m * m:].reshape(m, m)
        g, dg, d2g = engine.value_jac_hess(metric_fn, x)
        ginv = _inverse(g)
        gamma = _gamma_from(ginv, dg)
        dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
        dgamma = np.stack([_gamma_from(dginv[k], dg) + _gamma_from(ginv, d2g[k])
                           for k in range(d)])
        riem = _riemann_from(gamma, dgamma)
        du = -np.einsum("kij,i,j->k", gamma, u, u)
        dE = -np.einsum("kij,i,jm->km", gamma, u, E)
        # tidal matrix in the parallel frame: g(E_b, R(E_a, u) u)
        tide = np.einsum("pm,pi,ijkl,j,ka,l->ma",
                         E, g, riem, u, E, u)
        dA = Ap
        dAp = -tide @ A
        return np.concatenate([u, du, dE.ravel(), dA.ravel(), dAp.ravel()])

    state = np.concatenate([x0, u0, frame0.ravel(),
                            np.zeros(m * m), np.eye(m).ravel()])
    h = max_param / n_steps
    params = [0.0]
    dets = [0.0]
    ricc = []
    s = 0.0
    hit_boundary = False
    for _ in range(n_steps):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * h * k1)
        k3 = rhs(state + 0.5 * h * k2)
        k4 = rhs(state + h * k3)
        state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        s += h
        x = chart.reduce(state[:d])
        state[:d] = x
        if not chart.contains(x):
            hit_boundary = True
            break
        A = state[2 * d + d * m:2 * d + d * m + m * m].reshape(m, m)
        Ap = state[2 * d + d * m + m * m:].reshape(m, m)
        det = float(np.linalg.det(A))
        params.append(s)
        dets.append(det)
        if abs(det) > 1e-300:
            try:
                trace = float(np.trace(np.linalg.solve(A, Ap)))
                ricc.append((s, trace))
            except np.linalg.LinAlgError:
                pass

    params = np.asarray(params)
    dets = np.asarray(dets)
    first_zero = None
    for i in range(1, len(dets) - 1):
        if dets[i] != 0.0 and dets[i] * dets[i + 1] <= 0.0:
            frac = dets[i] / (dets[i] - dets[i + 1])
            first_zero = float(params[i] + frac * (params[i + 1] - params[i]))
            break
    domain_end = first_zero is None
    return FocalScanResult(first_zero_param=first_zero,
                           riccati_trace_samples=np.asarray(ricc),
                           domain_end_flag=bool(domain_end),
                           params=params, det_samples=dets)


# --------------------------------------------------------------- shooting

@dataclass(frozen=True)
class DiameterEstimate:
    """A lower bound for the transverse timelike diameter with its witness."""

    method: str
    value: float
    witness: object
    parameters: dict = field(default_factory=dict)


def _horizontal_basis(fol, g):
    """Horizontal coordinate directions corrected to be g-orthogonal to the
    leaf block; columns span the horizontal subspace."""
    p, n = fol.leaf_dim, fol.dim
    ev = np.eye(n)[:, :p]
    block = ev.T @ g @ ev
    cols = []
    for j in range(p, n):
        e = np.zeros(n)
        e[j] = 1.0
        a = np.linalg.solve(block, ev.T @ g @ e)
        cols.append(e - ev @ a)
    return np.column_stack(cols)


def _future_directions(fol, gT, orient, chart_id, metric_fn, x, chi_grid):
    """Unit future transversely timelike horizontal vectors at x, one per
    boost value in ``chi_grid`` and spatial sign (q = 2) or random spatial
    direction (q > 2)."""
    g = np.asarray(metric_fn(np.asarray(x, dtype=float)), dtype=float)
    H = _horizontal_basis(fol, g)
    m = H.T @ g @ H
    w, u = np.linalg.eigh(m)
    order = np.argsort(w)
    e0 = u[:, order[0]] / np.sqrt(-w[order[0]])
    spatial = [u[:, k] / np.sqrt(w[k]) for k in order[1:]]
    ref = orient.ref(chart_id, x)
    out = []
    rng = np.random.default_rng(0)
    for chi in chi_grid:
        if len(spatial) == 1:
            dirs = [spatial[0], -spatial[0]] if chi > 0 else [spatial[0]]
        else:
            c = rng.normal(size=len(spatial))
            c /= np.linalg.norm(c)
            d_vec = sum(ci * si for ci, si in zip(c, spatial))
            dirs = [d_vec, -d_vec] if chi > 0 else [spatial[0]]
        for d_vec in dirs:
            t = np.cosh(chi) * e0 + np.sinh(chi) * d_vec
            v = H @ t
            if gT.form(chart_id, x, v, ref) > 0:
                v = -v
            out.append(v)
    return out


def shoot_diameter(fol: FoliatedAtlas, gT: TransverseMetricField,
                   orient: TimeOrientation, chart: Chart, start_points,
                   chi_grid, max_param, n_steps=400,
                   engine: DerivEngine = DerivEngine(), refine=True,
                   refine_iters=20):
    """Maximize accumulated transverse length over shot horizontal geodesics.

    ``start_points`` x ``chi_grid`` defines the shooting grid; each geodesic
    runs to the chart boundary (bisected) or the parameter cap and contributes
    its transverse length. With ``refine`` the best boost value is polished by
    a golden-section search at the best start point. The estimate is a lower
    bound; on open domains the supremum may only be approached, which the
    ``open_domain`` parameter flags.
    """
    start_points = [np.asarray(p, dtype=float) for p in start_points]
    chi_grid = list(chi_grid)
    if not start_points or not chi_grid:
        raise EmptyGrid("shooting needs at least one start point and one boost value")
    cid = chart.chart_id
    metric_fn = chart.metric

    def run(x0, v0):
        res = integrate_geodesic(metric_fn, chart, x0, v0, max_param,
                                 n_steps=n_steps, engine=engine)
        if len(res.params) < 2:
            return 0.0, None
        curve = res.curve(cid)
        return transverse_length(fol, gT, curve), (curve, res)

    best = (-np.inf, None, None, None)
    for x0 in start_points:
        for v0 in _future_directions(fol, gT, orient, cid, metric_fn, x0,
                                     chi_grid):
            length, payload = run(x0, v0)
            if length > best[0]:
                best = (length, x0, v0, payload)

    value, x_best, v_best, payload = best
    chi_best = 0.0
    if refine and x_best is not None:
        g = np.asarray(metric_fn(x_best), dtype=float)
        H = _horizontal_basis(fol, g)
        # golden-section over the boost parameter at the best start point
        w, u = np.linalg.eigh(H.T @ g @ H)
        order = np.argsort(w)
        e0 = u[:, order[0]] / np.sqrt(-w[order[0]])
        sp = u[:, order[1]] / np.sqrt(w[order[1]])
        ref = orient.ref(cid, x_best)
        sign = 1.0
        t0 = H @ e0
        if gT.form(cid, x_best, t0, ref) > 0:
            sign = -1.0

        def length_at(chi):
            v = sign * (H @ (np.cosh(chi) * e0 + np.sinh(chi) * sp))
            val, _ = run(x_best, v)
            return val

        lo, hi = -1.0, 1.0
        a = hi - _GOLDEN * (hi - lo)
        b = lo + _GOLDEN * (hi - lo)
        fa, fb = length_at(a), length_at(b)
        for _ in range(refine_iters):
            if fa < fb:
                lo, a, fa = a, b, fb
                b = lo + _GOLDEN * (hi - lo)
                fb = length_at(b)
            else:
                hi, b, fb = b, a, fa
                a = hi - _GOLDEN * (hi - lo)
                fa = length_at(a)
        chi_best = 0.5 * (lo + hi)
        refined = length_at(chi_best)
        if refined > value:
            value = refined
    witness = payload[0] if payload is not None else None
    return DiameterEstimate(
        method="shooting",
        value=float(value),
        witness=witness,
        parameters={"n_starts": len(start_points), "n_boosts": len(chi_grid),
                    "n_steps": int(n_steps), "max_param": float(max_param),
                    "chi_refined": float(chi_best), "open_domain": True})
