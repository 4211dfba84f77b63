import math

import numpy as np
import pytest

from leafcausal import catalog, dual
from leafcausal.curvature import (DerivEngine, WarpedFactor, christoffel,
                                  ricci, scalar_curvature, scan_ricci_bound,
                                  scan_transverse_ricci_bound, transverse_ricci,
                                  unit_timelike_directions,
                                  warped_ricci_closed_form)
from leafcausal.errors import NoTimelikeDirections


def sphere_metric(x):
    # round unit 2-sphere in (theta, phi)
    return [[1.0, 0.0], [0.0, dual.sin(x[0]) ** 2]]


def hyperbolic_metric(x):
    # upper half plane, coordinates (a, b) with b > 0
    w = 1.0 / (x[1] * x[1])
    return [[w, 0.0], [0.0, w]]


def closed_universe_metric(x):
    # -dt^2 + cos^2(t) dtheta^2
    return [[-1.0, 0.0], [0.0, dual.cos(x[0]) ** 2]]


def test_sphere_ricci_equals_metric():
    x = np.array([1.1, 0.4])
    ric = ricci(sphere_metric, x)
    g = np.array([[1.0, 0.0], [0.0, math.sin(1.1) ** 2]])
    assert np.max(np.abs(ric - g)) < 1e-12
    assert abs(scalar_curvature(sphere_metric, x) - 2.0) < 1e-12


def test_hyperbolic_ricci_is_minus_metric():
    x = np.array([0.3, 1.7])
    ric = ricci(hyperbolic_metric, x)
    g = np.array(hyperbolic_metric(x), dtype=float)
    assert np.max(np.abs(ric + g)) < 1e-12
    assert abs(scalar_curvature(hyperbolic_metric, x) + 2.0) < 1e-12


def test_lorentzian_closed_universe_ricci():
    x = np.array([0.4, 2.0])
    ric = ricci(closed_universe_metric, x)
    g = np.array([[-1.0, 0.0], [0.0, math.cos(0.4) ** 2]])
    assert np.max(np.abs(ric + g)) < 1e-12


def test_christoffel_symmetry():
    gamma = christoffel(sphere_metric, np.array([0.8, 0.1]))
    assert np.max(np.abs(gamma - gamma.transpose(0, 2, 1))) < 1e-14


def test_ricci_symmetry():
    ric = ricci(catalog.logt_quotient_metric, np.array([1.6, 0.2, 1.1]))
    assert np.max(np.abs(ric - ric.T)) < 1e-12


def test_engine_cross_validation():
    fd = DerivEngine(mode="central-fd", fd_step=1e-5)
    rng = np.random.default_rng(0)
    for metric, lo, hi in ((sphere_metric, [0.4, 0.1], [2.7, 6.0]),
                           (hyperbolic_metric, [-1.0, 0.6], [1.0, 1.9]),
                           (catalog.desitter_base_metric,
                            [0.02, 0.4, 0.4, 0.1],
                            [0.33, 2.7, 2.7, 6.1])):
        for _ in range(20):
            x = rng.uniform(lo, hi)
            a = ricci(metric, x)
            b = ricci(metric, x, fd)
            assert np.max(np.abs(a - b)) < 1e-4


def test_engine_mode_validation():
    with pytest.raises(ValueError):
        DerivEngine(mode="symbolic")
    with pytest.raises(ValueError):
        DerivEngine(mode="central-fd", fd_step=1e-2)


def test_transverse_ricci_is_basic():
    spec = catalog.get("logt_warp")
    x = np.array([0.2, 0.7, 1.8, 0.1, 1.0])
    v = np.array([0.0, 0.0, 1.0, 0.2, -0.1])
    w = np.array([0.0, 0.0, 0.5, 0.0, 0.3])
    base = transverse_ricci(spec.fol, spec.gT, "box", x, v, w)
    v_shift = v + np.array([3.0, -2.0, 0.0, 0.0, 0.0])
    w_shift = w + np.array([-1.0, 5.0, 0.0, 0.0, 0.0])
    assert transverse_ricci(spec.fol, spec.gT, "box", x, v_shift, w_shift) == base


def test_transverse_ricci_matches_closed_form():
    spec = catalog.get("logt_warp")
    closed = spec.extras["ricci_dt_closed_form"]
    dt = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
    for t in (1.3, 2.0, 2.6):
        x = np.array([0.5, 0.5, t, 0.0, 1.0])
        val = transverse_ricci(spec.fol, spec.gT, "box", x, dt, dt)
        assert abs(val - closed(t)) < 1e-12


def test_warped_oracle_on_closed_universe():
    # -dt^2 + cos^2 t dtheta^2 as warped product: 1-d base, circle fiber
    base = WarpedFactor(1, lambda xb: [[-1.0]], lambda xb: np.zeros((1, 1)))
    fiber = WarpedFactor(1, lambda xf: [[1.0]], lambda xf: np.zeros((1, 1)))
    rng = np.random.default_rng(1)
    for _ in range(25):
        t = rng.uniform(-1.2, 1.2)
        x = np.array([t, rng.uniform(0, 6)])
        T = rng.normal(size=2)
        num = float(T @ ricci(closed_universe_metric, x) @ T)
        oracle = warped_ricci_closed_form(base, fiber, lambda xb: dual.cos(xb[0]),
                                          np.array([t]), x[1:], T[:1], T[1:])
        assert abs(num - oracle) / max(1.0, abs(oracle)) < 1e-10


def test_unit_timelike_directions_are_unit():
    g = np.array([[-2.0, 0.3], [0.3, 1.5]])
    for t in unit_timelike_directions(g, 12, chi_max=2.5):
        assert abs(float(t @ g @ t) + 1.0) < 1e-10


def test_unit_timelike_directions_need_index_one():
    with pytest.raises(NoTimelikeDirections):
        unit_timelike_directions(np.eye(2), 4)


def test_scan_transverse_ricci_bound_on_cos_warp():
    spec = catalog.get("cos_warp")
    chart = spec.atlas.chart("box")
    ts = np.linspace(chart.lo[1] + 0.01, chart.hi[1] - 0.01, 15)
    pts = [np.array([0.5, t, 1.0]) for t in ts]
    rep = scan_transverse_ricci_bound(spec.fol, spec.gT, "box", pts,
                                      C=spec.extras["C"], factor=1,
                                      n_directions=8)
    # the quotient has Ric(v,v) = C exactly on unit timelike v, so the margin
    # sits at zero up to rounding
    assert rep.min_value >= spec.extras["C"] - 1e-9
    assert abs(rep.margin) < 1e-9
    assert rep.n_points == 15
