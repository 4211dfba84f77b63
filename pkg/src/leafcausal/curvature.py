"""Differentiation engine and curvature: Christoffel, Ricci, transverse Ricci,
the warped-product closed-form oracle, and Ricci-bound scans."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import dual
from .errors import NoTimelikeDirections, SingularMetric, ZeroWarping

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class DerivEngine:
    """First/second derivatives of matrix-valued coordinate functions.

    ``forward-dual`` uses nested dual numbers (exact to roundoff) and is the
    default; ``central-fd`` with optional Richardson extrapolation is the
    independent audit engine.
    """

    mode: str = "forward-dual"
    fd_step: float = 1e-5
    richardson: bool = True

    def __post_init__(self):
        if self.mode not in ("forward-dual", "central-fd"):
            raise ValueError(f"unknown engine mode {self.mode!r}")
        if self.mode == "central-fd" and not 1e-7 <= self.fd_step <= 1e-3:
            raise ValueError("central-fd step must lie in [1e-7, 1e-3]")

    # f maps a coordinate sequence to an (m, m) matrix of scalars.
    def value_jac(self, f, x):
        """Return (f(x), df) with df[k] = d f / d x_k."""
        x = np.asarray(x, dtype=float)
        n = len(x)
        if self.mode == "forward-dual":
            out = np.asarray(f(dual.seed_gradient(x)), dtype=object)
            m = out.shape[0]
            val = np.zeros((m, m))
            jac = np.zeros((n, m, m))
            for i in range(m):
                for j in range(m):
                    val[i, j], jac[:, i, j] = dual.gradient_parts(out[i, j], n)
            return val, jac
        val = np.asarray(f(x), dtype=float)
        jac = np.stack([self._fd_partial(f, x, k, val.shape) for k in range(n)])
        return val, jac

    def value_jac_hess(self, f, x):
        """Return (f(x), df, d2f) with d2f[k, l] = d^2 f / d x_k d x_l."""
        x = np.asarray(x, dtype=float)
        n = len(x)
        if self.mode == "forward-dual":
            out = np.asarray(f(dual.seed_hessian(x)), dtype=object)
            m = out.shape[0]
            val = np.zeros((m, m))
            jac = np.zeros((n, m, m))
            hess = np.zeros((n, n, m, m))
            for i in range(m):
                for j in range(m):
                    v, g, h = dual.hessian_parts(out[i, j], n)
                    val[i, j] = v
                    jac[:, i, j] = g
                    hess[:, :, i, j] = h
            return val, jac, hess
        val, jac = self.value_jac(f, x)
        h = self.fd_step

        def partial(k):
            xp, xm = x.copy(), x.copy()
            xp[k] += h
            xm[k] -= h
            _, jp = self.value_jac(f, xp)
            _, jm = self.value_jac(f, xm)
            return (jp - jm) / (2 * h)

        hess = np.stack([partial(k) for k in range(n)])
        hess = 0.5 * (hess + hess.transpose(1, 0, 2, 3))
        return val, jac, hess

    def _fd_partial(self, f, x, k, shape):
        h = self.fd_step

        def central(step):
            xp, xm = x.copy(), x.copy()
            xp[k] += step
            xm[k] -= step
            return (np.asarray(f(xp), dtype=float)
                    - np.asarray(f(xm), dtype=float)) / (2 * step)

        d = central(h)
        if self.richardson:
            d = (4.0 * central(h / 2) - d) / 3.0
        return d


def _inverse(g):
    if np.linalg.cond(g) > _COND_LIMIT:
        raise SingularMetric("metric matrix is numerically singular")
    return np.linalg.inv(g)


def christoffel(metric_fn, x, engine: DerivEngine = DerivEngine()):
    """Levi-Civita symbols Gamma^k_{ij} of a coordinate metric function."""
    g, dg = engine.value_jac(metric_fn, x)
    ginv = _inverse(g)
    return _gamma_from(ginv, dg)


def _gamma_from(ginv, dg):
    # Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij});
    # dg[m, i, j] holds d_m g_{ij}.
    return 0.5 * (np.einsum("kl,ijl->kij", ginv, dg)
                  + np.einsum("kl,jil->kij", ginv, dg)
                  - np.einsum("kl,lij->kij", ginv, dg))


def _christoffel_with_derivative(metric_fn, x, engine):
    g, dg, d2g = engine.value_jac_hess(metric_fn, x)
    ginv = _inverse(g)
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    gamma = _gamma_from(ginv, dg)
    n = len(x)
    dgamma = np.zeros((n,) + gamma.shape)
    for m in range(n):
        dgamma[m] = _gamma_from(dginv[m], dg) + _gamma_from(ginv, d2g[m])
    return g, ginv, gamma, dgamma


def riemann(metric_fn, x, engine: DerivEngine = DerivEngine()):
    """Curvature tensor R^i_{jkl}, convention fixed so that constant-curvature
    metrics satisfy Ric = (n-1) K g."""
    _, _, gamma, dgamma = _christoffel_with_derivative(metric_fn, x, engine)
    return _riemann_from(gamma, dgamma)


def _riemann_from(gamma, dgamma):
    # R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
    #             + Gamma^i_{km} Gamma^m_{lj} - Gamma^i_{lm} Gamma^m_{kj}
    r = np.einsum("kilj->ijkl", dgamma) - np.einsum("likj->ijkl", dgamma)
    r += (np.einsum("ikm,mlj->ijkl", gamma, gamma)
          - np.einsum("ilm,mkj->ijkl", gamma, gamma))
    return r


def ricci(metric_fn, x, engine: DerivEngine = DerivEngine()):
    """Ricci tensor Ric_{jl} = R^k_{jkl}; returned symmetrized."""
    r = riemann(metric_fn, x, engine)
    ric = np.einsum("kjkl->jl", r)
    return 0.5 * (ric + ric.T)


def scalar_curvature(metric_fn, x, engine: DerivEngine = DerivEngine()):
    g, _ = engine.value_jac(metric_fn, x)
    return float(np.einsum("ij,ij->", _inverse(g), ricci(metric_fn, x, engine)))


@dataclass(frozen=True)
class CurvatureAtPoint:
    christoffel: np.ndarray
    ricci: np.ndarray
    scalar: float


def curvature_at(metric_fn, x, engine: DerivEngine = DerivEngine()):
    g, _, gamma, dgamma = _christoffel_with_derivative(metric_fn, x, engine)
    r = _riemann_from(gamma, dgamma)
    ric = np.einsum("kjkl->jl", r)
    ric = 0.5 * (ric + ric.T)
    return CurvatureAtPoint(gamma, ric, float(np.einsum("ij,ij->", _inverse(g), ric)))


def transverse_ricci(fol, gT, chart_id, x, v, w, engine: DerivEngine = DerivEngine()):
    """Ric of the local quotient metric, evaluated on the transverse parts of
    v and w. Basic along leaves: vertical perturbations cannot change it."""
    q = fol.codim
    xq = np.asarray(x, dtype=float)[-q:]
    ric_q = ricci(gT.chart_fn(chart_id), xq, engine)
    vq = np.asarray(v, dtype=float)[-q:]
    wq = np.asarray(w, dtype=float)[-q:]
    return float(vq @ ric_q @ wq)


@dataclass(frozen=True)
class WarpedFactor:
    """One factor of a warped product: its metric function and (closed-form or
    numeric) Ricci function on that factor's own coordinates."""

    dim: int
    metric: Callable             # coords -> matrix
    ricci: Optional[Callable] = None   # coords -> matrix; None = compute numerically

    def ricci_at(self, x, engine):
        if self.ricci is not None:
            return np.asarray(self.ricci(np.asarray(x, dtype=float)), dtype=float)
        return ricci(self.metric, x, engine)


def warped_ricci_closed_form(base: WarpedFactor, fiber: WarpedFactor, f,
                             xb, xf, tb, tf,
                             engine: DerivEngine = DerivEngine()):
    """Ricci of g = g_B + f(b)^2 g_F on T = (tb, tf), by the standard
    warped-product formula:

        Ric(T,T) = Ric_F(tf,tf) - g(tf,tf) f#  +  Ric_B(tb,tb) - (p/f) Hess_f(tb,tb)

    with f# = Lap_B f / f + (p-1) g_B(grad f, grad f) / f^2. Serves as the
    independent oracle for the numeric Ricci on warped catalog entries.
    """
    xb = np.asarray(xb, dtype=float)
    xf = np.asarray(xf, dtype=float)
    tb = np.asarray(tb, dtype=float)
    tf = np.asarray(tf, dtype=float)
    p = fiber.dim

    def f_matrix(x):
        return [[f(x)]]

    fval, dfm, d2fm = engine.value_jac_hess(f_matrix, xb)
    fv = float(fval[0, 0])
    if fv <= 0.0:
        raise ZeroWarping(f"warping function non-positive ({fv}) at {xb}")
    df = dfm[:, 0, 0]
    d2f = d2fm[:, :, 0, 0]

    gb, _ = engine.value_jac(base.metric, xb)
    gb_inv = _inverse(gb)
    gamma_b = christoffel(base.metric, xb, engine)
    hess = d2f - np.einsum("kij,k->ij", gamma_b, df)
    grad = gb_inv @ df
    grad_sq = float(grad @ gb @ grad)
    lap = float(np.einsum("ij,ij->", gb_inv, hess))
    f_sharp = lap / fv + (p - 1) * grad_sq / fv ** 2

    ric_b = base.ricci_at(xb, engine)
    ric_f = fiber.ricci_at(xf, engine)
    gf, _ = engine.value_jac(fiber.metric, xf)
    g_vert = fv ** 2 * float(tf @ gf @ tf)

    return (float(tf @ ric_f @ tf) - g_vert * f_sharp
            + float(tb @ ric_b @ tb) - (p / fv) * float(tb @ hess @ tb))


def unit_timelike_directions(g, count, chi_max=3.0, rng=None):
    """Unit timelike vectors at a point with metric matrix ``g`` (index 1),
    parametrized on the hyperboloid: cosh(chi) e0 + sinh(chi) d with d a unit
    spacelike frame direction and chi <= chi_max."""
    w, u = np.linalg.eigh(g)
    neg = np.flatnonzero(w < 0)
    if len(neg) != 1:
        raise NoTimelikeDirections(f"metric index is {len(neg)}, need 1")
    order = np.argsort(w)
    e0 = u[:, order[0]] / np.sqrt(-w[order[0]])
    spatial = [u[:, k] / np.sqrt(w[k]) for k in order[1:]]
    if rng is None:
        rng = np.random.default_rng(0)
    out = []
    n_sp = len(spatial)
    for k in range(count):
        chi = chi_max * k / max(count - 1, 1)
        coeff = rng.normal(size=n_sp)
        coeff /= np.linalg.norm(coeff)
        d = sum(c * s for c, s in zip(coeff, spatial))
        out.append(np.cosh(chi) * e0 + np.sinh(chi) * d)
    return out


@dataclass(frozen=True)
class RicciBoundReport:
    """Result of a lower-bound scan of Ric(v,v) over unit timelike directions."""

    bound_constant: float
    factor: int
    min_value: float
    argmin_point: np.ndarray
    argmin_direction: np.ndarray
    n_points: int
    n_directions: int
    chi_max: float
    seed: int

    @property
    def margin(self):
        return self.min_value - self.factor * self.bound_constant

    @property
    def passed(self):
        return self.margin >= 0.0


def scan_ricci_bound(metric_fn, points, C, factor, n_directions=16,
                     chi_max=3.0, seed=0, engine: DerivEngine = DerivEngine()):
    """Scan min Ric(v,v) over points x directions against factor * C.

    ``points`` is an iterable of coordinate arrays; the direction grid is the
    hyperboloid sample of :func:`unit_timelike_directions`, deterministic
    under ``seed``. Ties break at the lowest grid index.
    """
    points = [np.asarray(p, dtype=float) for p in points]
    if not points:
        raise NoTimelikeDirections("empty point grid")
    best = (np.inf, None, None)
    for p in points:
        g, _ = engine.value_jac(metric_fn, p)
        ric = ricci(metric_fn, p, engine)
        rng = np.random.default_rng(seed)
        for t in unit_timelike_directions(g, n_directions, chi_max, rng):
            val = float(t @ ric @ t)
            if val < best[0]:
                best = (val, p, t)
    return RicciBoundReport(bound_constant=float(C), factor=int(factor),
                            min_value=best[0], argmin_point=best[1],
                            argmin_direction=best[2], n_points=len(points),
                            n_directions=int(n_directions),
                            chi_max=float(chi_max), seed=int(seed))


def scan_transverse_ricci_bound(fol, gT, chart_id, points, C, factor,
                                n_directions=16, chi_max=3.0, seed=0,
                                engine: DerivEngine = DerivEngine()):
    """Transverse variant: scans Ric of the quotient metric over transverse
    points; directions live in the q-dimensional transverse model."""
    q = fol.codim
    qpoints = [np.asarray(p, dtype=float)[-q:] for p in points]
    return scan_ricci_bound(gT.chart_fn(chart_id), qpoints, C, factor,
                            n_directions, chi_max, seed, engine)
