"""End-to-end acceptance checks, one per headline capability.

Each test prints exactly one verdict line and enforces a wall-clock budget;
tolerances are pinned in the assertions.
"""

import math
import time

import numpy as np

from leafcausal import catalog, causality, dynamics
from leafcausal.cli import Scenario, run
from leafcausal.curvature import (WarpedFactor, ricci, scan_ricci_bound,
                                  transverse_ricci, unit_timelike_directions,
                                  warped_ricci_closed_form)
from leafcausal.foliation import (check_transverse_time_orientability,
                                  lift_curve, transverse_length, waterfall)
from leafcausal.geometry import (Chart, CurveSamples, composite_simpson,
                                 eval_metric, lorentz_length, sample_points)


def _verdict(num, label, ok, elapsed, budget):
    in_budget = elapsed < budget
    status = "PASS" if (ok and in_budget) else "FAIL"
    print(f"criterion {num:02d} [{label}]: {status}")
    assert ok
    assert in_budget, f"{elapsed:.1f}s exceeded the {budget}s budget"


def test_criterion_01_constant_ricci_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    lo = np.array([0.05, 0.3, 0.3, 0.2])
    hi = np.array([0.35, 2.8, 2.8, 6.0])
    worst = 0.0
    for _ in range(100):
        x = rng.uniform(lo, hi)
        g = np.array(catalog.desitter_base_metric(x), dtype=float)
        ric = ricci(catalog.desitter_base_metric, x)
        for v in unit_timelike_directions(g, 10, chi_max=3.0, rng=rng):
            num = float(v @ ric @ v)
            qg = float(v @ g @ v)
            worst = max(worst, abs(num - 3.0 * qg) / max(1.0, abs(qg)))
    _verdict(1, "einstein-identity", worst <= 1e-6,
             time.perf_counter() - t0, 10.0)


def test_criterion_02_warped_ricci_sign_split():
    t0 = time.perf_counter()
    spec = catalog.get("desitter_warp")
    chart = spec.atlas.chart("box")
    L = spec.extras["L"]
    pts = [np.array([0.5, 0.5, t, p, math.pi / 2, math.pi])
           for t in np.linspace(0.005, L - 0.005, 20)
           for p in np.linspace(0.35, math.pi - 0.35, 20)]
    full = scan_ricci_bound(chart.metric, pts, C=1.0, factor=1,
                            n_directions=16)
    rng = np.random.default_rng(0)
    worst_transverse = -np.inf
    for x in pts:
        gq = spec.gT.matrix("box", x)
        for v in unit_timelike_directions(gq, 16, chi_max=3.0, rng=rng):
            V = np.zeros(6)
            V[2:] = v
            worst_transverse = max(
                worst_transverse,
                transverse_ricci(spec.fol, spec.gT, "box", x, V, V))
    ok = full.min_value >= 1.0 - 1e-4 and worst_transverse <= -3.0 + 1e-4
    _verdict(2, "warped-ricci-signs", ok, time.perf_counter() - t0, 60.0)


def test_criterion_03_log_warp_transverse_bound():
    t0 = time.perf_counter()
    spec = catalog.get("logt_warp")
    chart = spec.atlas.chart("box")
    dt = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
    lowest = min(
        transverse_ricci(spec.fol, spec.gT, "box",
                         np.array([0.5, 0.5, t, 0.0, 1.0]), dt, dt)
        for t in np.linspace(1.05, math.e - 1e-3, 40))
    bound_ok = lowest >= 2.0 / math.e ** 2 - 1e-6
    x = np.array([0.5, 0.5, 2.6, 0.0, 1.0])
    E = np.array([0.0, 0.0, 1.0, 0.0, 1.0])
    g = np.array(chart.metric(x), dtype=float)
    timelike = float(E @ g @ E) < 0.0
    negative = float(E @ ricci(chart.metric, x) @ E) < 0.0
    _verdict(3, "log-warp-bound", bound_ok and timelike and negative,
             time.perf_counter() - t0, 30.0)


def test_criterion_04_warped_product_oracle():
    t0 = time.perf_counter()
    worst = 0.0
    for eid in ("desitter_warp", "logt_warp"):
        spec = catalog.get(eid)
        chart = spec.atlas.chart("box")
        ex = spec.extras
        base = WarpedFactor(len(ex["base_axes"]), ex["base_metric"],
                            ex["base_ricci"])
        fiber = WarpedFactor(ex["fiber_dim"], ex["fiber_metric"],
                             ex["fiber_ricci"])
        ba, fa = list(ex["base_axes"]), list(ex["fiber_axes"])
        rng = np.random.default_rng(0)
        for x in sample_points(chart, 20, rng):
            ric = ricci(chart.metric, x)
            for _ in range(5):
                T = rng.normal(size=chart.dim)
                num = float(T @ ric @ T)
                oracle = warped_ricci_closed_form(
                    base, fiber, ex["warping"], x[ba], x[fa], T[ba], T[fa])
                worst = max(worst, abs(num - oracle) / max(1.0, abs(oracle)))
    _verdict(4, "warped-oracle", worst <= 1e-5, time.perf_counter() - t0, 30.0)


def test_criterion_05_diameter_two_ways():
    t0 = time.perf_counter()
    spec = catalog.get("cos_warp")
    chart = spec.atlas.chart("box")
    t_axis = spec.extras["t_axis"]
    starts = []
    for th in (1.0, 3.0, 5.0):
        x = 0.5 * (chart.lo + chart.hi)
        x[t_axis] = chart.lo[t_axis] + 1e-3
        x[2] = th
        starts.append(x)
    est = dynamics.shoot_diameter(spec.fol, spec.gT, spec.orient, chart,
                                  starts, chi_grid=[0.0, 0.3, 0.6],
                                  max_param=4.0, n_steps=300)
    analytic = math.pi - 0.1
    shoot_ok = 0.99 * analytic <= est.value <= math.pi + 1e-3
    vals = []
    for res in (10, 20, 40):
        g = causality.build_graph(spec.graph, res)
        vals.append(causality.longest_path_diameter(g)[0])
    graph_ok = (vals == sorted(vals)
                and 2.85 <= vals[-1] <= analytic + 1e-6)
    _verdict(5, "diameter-estimates", shoot_ok and graph_ok,
             time.perf_counter() - t0, 120.0)


def test_criterion_06_focal_closed_forms():
    t0 = time.perf_counter()
    spec = catalog.get("cos_warp")
    qm = spec.extras["quotient_metric"]
    eps = 0.011
    wide = Chart("wideq", ("t", "th"), np.array([-math.pi / 2, 0.0]),
                 np.array([math.pi / 2, 2 * math.pi]),
                 np.array([False, True]), qm)
    scan = dynamics.focal_scan(qm, wide, [-math.pi / 2 + eps, 1.0],
                               [1.0, 0.0], max_param=math.pi - 2 * eps,
                               n_steps=4000)
    s = scan.riccati_trace_samples[:, 0]
    u = scan.riccati_trace_samples[:, 1]
    cot_ok = (np.max(np.abs(u - 1.0 / np.tan(s))) <= 1e-4
              and abs(u[-1]) > 40.0 and scan.domain_end_flag)

    def ds2(x):
        from leafcausal import dual
        return [[-1.0, 0.0], [0.0, dual.cosh(x[0]) ** 2]]

    ds_chart = Chart("ds2", ("t", "y"), np.array([-3.0, 0.0]),
                     np.array([3.0, 2 * math.pi]), np.array([False, True]),
                     ds2)
    ds = dynamics.focal_scan(ds2, ds_chart, [-1.5, 1.0], [1.0, 0.0],
                             max_param=3.0, n_steps=800)
    sinh_ok = (ds.first_zero_param is None
               and np.max(np.abs(ds.det_samples - np.sinh(ds.params))) <= 1e-6)

    def flat(x):
        return [[-1.0, 0.0], [0.0, 1.0]]

    fl_chart = Chart("flat", ("t", "x"), np.array([0.0, -1.0]),
                     np.array([4.0, 1.0]), np.array([False, False]), flat)
    fl = dynamics.focal_scan(flat, fl_chart, [0.25, 0.0], [1.0, 0.0],
                             max_param=3.0, n_steps=8)
    expected = np.array([np.linalg.det(np.array([[p]])) for p in fl.params])
    flat_ok = np.array_equal(fl.det_samples, expected)
    _verdict(6, "focal-closed-forms", cot_ok and sinh_ok and flat_ok,
             time.perf_counter() - t0, 10.0)


def test_criterion_07_waterfall_is_exact():
    t0 = time.perf_counter()
    spec = catalog.get("helix_foliation")
    rng = np.random.default_rng(0)
    worst = 0.0
    ok = True
    for _ in range(100):
        m = 15
        params = np.linspace(0.0, 1.0, m)
        a = rng.uniform(-0.3, 0.3, size=3)
        b = rng.uniform(-0.1, 0.1, size=3)
        pts = np.empty((m, 3))
        pts[:, 0] = 0.5 + a[0] * params
        pts[:, 1] = 1.0 + 0.8 * a[1] * params + b[1] * np.sin(3 * params)
        pts[:, 2] = a[2] * params + b[2] * np.cos(2 * params)
        vels = np.empty((m, 3))
        vels[:, 0] = a[0]
        vels[:, 1] = 0.8 * a[1] + 3 * b[1] * np.cos(3 * params)
        vels[:, 2] = a[2] - 2 * b[2] * np.sin(2 * params)
        curve = CurveSamples(params, ("box",) * m, pts, vels)
        z = np.array([rng.uniform(0.05, 0.95), pts[0, 1], pts[0, 2]])
        out = waterfall(spec.fol, spec.gT, spec.orient, curve, z)
        ok &= np.array_equal(out.points[:, 1:], pts[:, 1:])
        for i in range(m):
            before = spec.gT.form("box", pts[i], vels[i])
            after = spec.gT.form("box", out.points[i], out.velocities[i])
            worst = max(worst, abs(after - before))
    _verdict(7, "waterfall-exact", ok and worst <= 1e-14,
             time.perf_counter() - t0, 5.0)


def test_criterion_08_lifts_preserve_transverse_length():
    t0 = time.perf_counter()
    spec = catalog.get("cos_warp")
    chart = spec.atlas.chart("box")
    qfn = spec.extras["quotient_metric"]
    rng = np.random.default_rng(0)
    proj_worst = 0.0
    len_worst = 0.0
    m = 41
    params = np.linspace(0.0, 1.0, m)
    for _ in range(100):
        t0_, t1_ = sorted(rng.uniform(chart.lo[1] + 0.1, chart.hi[1] - 0.1,
                                      size=2))
        amp = rng.uniform(-0.3, 0.3)
        th0 = rng.uniform(0.0, 2 * math.pi)
        dth = rng.uniform(-1.0, 1.0)
        base_pts = np.stack([
            t0_ + (t1_ - t0_) * params,
            th0 + dth * params + amp * np.sin(2 * params)], axis=1)
        base_vels = np.stack([
            np.full(m, t1_ - t0_),
            dth + 2 * amp * np.cos(2 * params)], axis=1)
        lifted = lift_curve(spec.fol, params, base_pts, base_vels, "box",
                            np.array([rng.uniform(0.05, 0.95), 0.0, 0.0]))
        proj_worst = max(proj_worst,
                         float(np.max(np.abs(lifted.points[:, 1:] - base_pts))))
        ell = transverse_length(spec.fol, spec.gT, lifted)
        speeds = np.array([
            math.sqrt(abs(float(base_vels[i]
                                @ np.array(qfn(base_pts[i]), dtype=float)
                                @ base_vels[i]))) for i in range(m)])
        quotient, _ = composite_simpson(params, speeds)
        len_worst = max(len_worst, abs(ell - quotient))
    ok = proj_worst <= 1e-12 and len_worst <= 1e-9
    _verdict(8, "lift-invariance", ok, time.perf_counter() - t0, 5.0)


def test_criterion_09_barriers_separate_reach_relations():
    t0 = time.perf_counter()
    ok = True
    for res in (20, 40):
        rep = run(Scenario("deleted_segment", "reach",
                           params={"resolution": res}))
        ok &= rep.claims["lower_reached"] and rep.claims["upper_avoided"]
        ok &= rep.results["upper_component_hits"] == 0
    box = run(Scenario("deleted_box", "reach", params={"resolution": 30}))
    ok &= box.results["probe_in_transverse_future"] is True
    ok &= box.results["probe_in_metric_future"] is False
    ok &= box.claims["probe_separates_relations"]
    _verdict(9, "barrier-reach", ok, time.perf_counter() - t0, 60.0)


def test_criterion_10_closed_curves_and_soundness_probes():
    t0 = time.perf_counter()
    torus = causality.build_graph(catalog.get("torus3_dense").graph, 10)
    torus_ok = causality.find_closed_transverse_timelike(torus) is not None
    helix = causality.build_graph(catalog.get("helix_foliation").graph, 10)
    step = max(1, helix.n_nodes // 10)
    helix_ok = all(causality.self_reaches(helix, n)
                   for n in range(0, helix.n_nodes, step))
    mspec = catalog.get("mink3_vertical")
    mink = causality.build_graph(mspec.graph, 12)
    slab_ok = causality.find_closed_transverse_timelike(mink) is None
    push = causality.pushup_probe(mink, n_probes=1000, seed=0)
    openr = causality.openness_probe(mspec.graph, n_probes=1000, seed=0)
    ok = (torus_ok and helix_ok and slab_ok
          and push.violations == 0 and openr.violations == 0)
    _verdict(10, "closed-curves-and-probes", ok, time.perf_counter() - t0,
             60.0)


def _polyline_lengths(spec, cid, rng, horizontal):
    chart = spec.atlas.chart(cid)
    p = spec.fol.leaf_dim
    n = chart.dim
    span = chart.hi - chart.lo
    step_cap = 0.03 * float(np.min(span))
    x = chart.lo + span * rng.uniform(0.35, 0.65, size=n)
    full_len = trans_len = 0.0
    for _ in range(8):
        G = eval_metric(spec.atlas, cid, x)
        v = unit_timelike_directions(G, 1, chi_max=1.0, rng=rng)[0]
        leaf_part = np.linalg.solve(G[:p, :p], G[:p, :] @ v)
        vh = v.copy()
        vh[:p] -= leaf_part
        if horizontal:
            vv = vh
        else:
            w = np.zeros(n)
            w[:p] = rng.normal(size=p)
            w *= math.sqrt(0.5 * abs(float(vh @ G @ vh))
                           / float(w @ G @ w))
            vv = vh + w
        d = vv * step_cap / max(np.max(np.abs(vv)), 1e-12)
        pts = np.stack([x, x + 0.5 * d, x + d])
        seg = CurveSamples(np.array([0.0, 0.5, 1.0]), (cid,) * 3, pts,
                           np.stack([d, d, d]))
        full_len += lorentz_length(spec.atlas, seg)
        trans_len += transverse_length(spec.fol, spec.gT, seg)
        x = x + d
    return full_len, trans_len


def test_criterion_11_cone_hierarchy_and_length_comparison():
    t0 = time.perf_counter()
    lorentzian = [e for e in catalog.list_examples() if e != "kronecker_T2"]
    hierarchy_worst = -np.inf
    bad_convex = 0
    for eid in lorentzian:
        spec = catalog.get(eid)
        cid = spec.chart_id()
        chart = spec.atlas.chart(cid)
        q = spec.fol.codim
        rng = np.random.default_rng(7)
        for x in sample_points(chart, 100, rng):
            G = eval_metric(spec.atlas, cid, x)
            QT = spec.gT.full_tensor(cid, x)
            V = rng.normal(size=(100, chart.dim))
            qg = np.einsum("ki,ij,kj->k", V, G, V)
            qT = np.einsum("ki,ij,kj->k", V, QT, V)
            hierarchy_worst = max(hierarchy_worst, float(np.max(qT - qg)))
            gq = spec.gT.matrix(cid, x)
            wq, uq = np.linalg.eigh(gq)
            order = np.argsort(wq)
            e0 = uq[:, order[0]] / math.sqrt(-wq[order[0]])
            ref = np.asarray(spec.orient.ref(cid, x))[-q:]
            if float(e0 @ gq @ ref) > 0:
                e0 = -e0
            chi = rng.uniform(0.0, 1.5, size=100)
            D = np.zeros((100, q))
            if q > 1:
                C = rng.normal(size=(100, q - 1))
                C /= np.linalg.norm(C, axis=1, keepdims=True)
                for i, k in enumerate(order[1:]):
                    D += np.outer(C[:, i], uq[:, k] / math.sqrt(wq[k]))
            VQ = np.cosh(chi)[:, None] * e0 + np.sinh(chi)[:, None] * D
            S = VQ[0::2] + VQ[1::2]
            qs = np.einsum("ki,ij,kj->k", S, gq, S)
            pair = S @ gq @ ref
            bad_convex += int(np.sum((qs >= 0.0) | (pair >= 0.0)))
    hierarchy_ok = hierarchy_worst <= 1e-9 and bad_convex == 0

    horizontal_worst = 0.0
    strict_best = np.inf
    for eid in ("mink3_vertical", "cos_warp", "helix_foliation",
                "torus3_dense"):
        spec = catalog.get(eid)
        cid = spec.chart_id()
        rng = np.random.default_rng(11)
        for i in range(25):
            horizontal = i % 2 == 0
            lg, lt = _polyline_lengths(spec, cid, rng, horizontal)
            if horizontal:
                horizontal_worst = max(horizontal_worst, abs(lt - lg))
            else:
                strict_best = min(strict_best, lt - lg)
    lengths_ok = horizontal_worst <= 1e-9 and strict_best > 1e-9
    _verdict(11, "cone-hierarchy-and-lengths", hierarchy_ok and lengths_ok,
             time.perf_counter() - t0, 60.0)


def test_criterion_12_transverse_time_orientability():
    t0 = time.perf_counter()
    yes = check_transverse_time_orientability(
        catalog.get("misner_suspension").suspension)
    no = check_transverse_time_orientability(catalog.reversed_suspension())
    _verdict(12, "orientability", yes is True and no is False,
             time.perf_counter() - t0, 1.0)
