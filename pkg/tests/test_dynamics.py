import math

import numpy as np
import pytest

from leafcausal import catalog, dual
from leafcausal.dynamics import (check_horizontal, focal_scan,
                                 integrate_geodesic, shoot_diameter)
from leafcausal.errors import (EmptyGrid, LeftAtlas, NotNormal, NotTimelike)
from leafcausal.geometry import Chart


def flat2(x):
    return [[-1.0, 0.0], [0.0, 1.0]]


FLAT_CHART = Chart("flat", ("t", "x"), np.array([0.0, -1.0]),
                   np.array([4.0, 1.0]), np.array([False, False]), flat2)


def cos_quotient(x):
    return [[-1.0, 0.0], [0.0, dual.cos(x[0]) ** 2]]


COS_CHART = Chart("cosq", ("t", "th"), np.array([-1.5, 0.0]),
                  np.array([1.5, 2 * math.pi]), np.array([False, True]),
                  cos_quotient)


def test_flat_geodesics_are_straight():
    res = integrate_geodesic(flat2, FLAT_CHART, [0.5, 0.0], [1.0, 0.2],
                             max_param=2.0, n_steps=100)
    expected = np.array([0.5, 0.0]) + np.outer(res.params, [1.0, 0.2])
    assert np.max(np.abs(res.points - expected)) < 1e-12
    assert res.exit_reason == "max_param"
    assert res.conservation_drift < 1e-14


def test_boundary_bisection_stops_inside():
    res = integrate_geodesic(flat2, FLAT_CHART, [3.5, 0.0], [1.0, 0.0],
                             max_param=2.0, n_steps=100)
    assert res.exit_reason == "boundary"
    assert res.points[-1][0] < 4.0
    assert 4.0 - res.points[-1][0] < 1e-9


def test_start_outside_chart_rejected():
    with pytest.raises(LeftAtlas):
        integrate_geodesic(flat2, FLAT_CHART, [5.0, 0.0], [1.0, 0.0], 1.0)


def test_conservation_fourth_order_convergence():
    x0, u0 = [-1.2, 0.3], [1.0, 0.4]
    coarse = integrate_geodesic(cos_quotient, COS_CHART, x0, u0,
                                max_param=2.0, n_steps=25)
    fine = integrate_geodesic(cos_quotient, COS_CHART, x0, u0,
                              max_param=2.0, n_steps=50)
    default = integrate_geodesic(cos_quotient, COS_CHART, x0, u0,
                                 max_param=2.0, n_steps=400)
    assert default.conservation_drift < 1e-7
    assert coarse.conservation_drift / max(fine.conservation_drift, 1e-300) >= 8.0


def test_check_horizontal_on_helix():
    spec = catalog.get("helix_foliation")
    metric = spec.atlas.chart("box").metric
    x = np.array([0.5, 1.0, 0.0])
    # horizontal complement of the leaf direction for g rows [3, 2, 0]
    assert check_horizontal(spec.fol, metric, x, np.array([-2.0 / 3.0, 1.0, 0.0]))
    assert check_horizontal(spec.fol, metric, x, np.array([0.0, 0.0, 1.0]))
    assert not check_horizontal(spec.fol, metric, x, np.array([1.0, 0.0, 0.0]))


def test_horizontality_preserved_along_geodesics():
    spec = catalog.get("helix_foliation")
    chart = spec.atlas.chart("box")
    res = integrate_geodesic(chart.metric, chart, [0.5, 0.2, -1.0],
                             [-2.0 / 3.0, 1.0, 0.5], max_param=1.0, n_steps=50)
    for x, v in zip(res.points, res.velocities):
        assert check_horizontal(spec.fol, chart.metric, x, v, tol=1e-7)


def test_focal_scan_needs_unit_timelike_start():
    with pytest.raises(NotTimelike):
        focal_scan(flat2, FLAT_CHART, [0.5, 0.0], [0.0, 1.0], 1.0)
    with pytest.raises(NotNormal):
        focal_scan(flat2, FLAT_CHART, [0.5, 0.0], [2.0, 0.0], 1.0)


def test_focal_scan_flat_has_no_focal_point():
    scan = focal_scan(flat2, FLAT_CHART, [0.25, 0.0], [1.0, 0.0],
                      max_param=3.0, n_steps=60)
    assert scan.first_zero_param is None
    assert scan.domain_end_flag
    assert np.max(np.abs(scan.det_samples - scan.params)) < 1e-12


def ads_strip(x):
    return [[-dual.cosh(x[1]) ** 2, 0.0], [0.0, 1.0]]


def test_focal_scan_finds_sin_zero():
    # the strip -cosh^2(x) dt^2 + dx^2 has Jacobi determinant sin(s) along
    # the central timelike geodesic, so the first focal point sits at pi
    strip = Chart("strip", ("t", "x"), np.array([-0.5, -1.0]),
                  np.array([4.0, 1.0]), np.array([False, False]), ads_strip)
    scan = focal_scan(ads_strip, strip, [0.0, 0.0], [1.0, 0.0],
                      max_param=3.5, n_steps=700)
    assert scan.first_zero_param is not None
    assert abs(scan.first_zero_param - math.pi) < 1e-6
    assert not scan.domain_end_flag


def test_shoot_diameter_flat_slab():
    spec = catalog.get("flat_slab")
    chart = spec.atlas.chart("box")
    starts = [np.array([0.5, 1e-3, th]) for th in (1.0, 3.0, 5.0)]
    est = shoot_diameter(spec.fol, spec.gT, spec.orient, chart, starts,
                         chi_grid=[0.0, 0.4], max_param=3.0, n_steps=200)
    assert 0.99 <= est.value <= 1.0 + 1e-6
    assert est.method == "shooting"
    assert est.parameters["open_domain"] is True
    assert est.witness is not None


def test_shoot_diameter_respects_curvature_bound():
    spec = catalog.get("cos_warp_c4")
    chart = spec.atlas.chart("box")
    starts = [np.array([0.5, chart.lo[1] + 1e-3, th]) for th in (1.0, 4.0)]
    est = shoot_diameter(spec.fol, spec.gT, spec.orient, chart, starts,
                         chi_grid=[0.0, 0.3], max_param=3.0, n_steps=200)
    bound = math.pi / math.sqrt(spec.extras["C"])
    assert est.value <= bound + 1e-3
    assert est.value >= 0.9 * spec.extras["analytic_diameter"]


def test_shoot_diameter_needs_a_grid():
    spec = catalog.get("flat_slab")
    chart = spec.atlas.chart("box")
    with pytest.raises(EmptyGrid):
        shoot_diameter(spec.fol, spec.gT, spec.orient, chart, [], [0.0], 1.0)
