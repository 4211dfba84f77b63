"""Scenario runner.

``leafcausal run <scenario-file>`` parses a flat key=value scenario, executes
one task on one catalog entry and writes a structured-text report (plus
comma-separated sample tables for plot data) to the output directory. The
report payload is deterministic byte-for-byte for a fixed scenario and seed;
timing goes to stderr only.

Exit codes: 0 all expected claims pass; 2 a claim failed; 3 usage or parse
error; 4 runtime error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__, catalog, causality, curvature, dynamics
from .errors import (IoError, GraphHasCycle, LeafCausalError, MissingKey,
                     ParseError, ScenarioError, UnknownKey)
from .foliation import classify_transverse
from .geometry import CausalClass, TangentVector, classify, sample_points

TASKS = ("classify-demo", "ricci-scan", "diameter-shoot", "diameter-graph",
         "focal-scan", "ladder-probe", "reach")

_KEY_TYPES = {
    "example": str,
    "task": str,
    "seed": int,
    "C": float,
    "factor": int,
    "resolution": int,
    "margin": float,
    "n_probes": int,
    "n_directions": int,
    "n_points": int,
    "n_steps": int,
    "chi_max": float,
    "max_param": float,
    "tolerance": float,
}
_POSITIVE = {"C", "resolution", "n_probes", "n_directions", "n_points",
             "n_steps", "chi_max", "max_param", "tolerance", "factor"}


@dataclass(frozen=True)
class Scenario:
    example: str
    task: str
    seed: int = 0
    params: dict = field(default_factory=dict)

    def get(self, key, default):
        return self.params.get(key, default)


def parse_scenario(text):
    """Parse the line-oriented ``key = value`` scenario format.

    Lines are assignments, blank, or ``#`` comments. Unknown keys, repeated
    keys, missing mandatory keys and non-positive counts are rejected with
    the offending line number where one exists.
    """
    values = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected key = value, got {raw.strip()!r}",
                             line_no=line_no)
        key, _, val = (s.strip() for s in line.partition("="))
        if key not in _KEY_TYPES:
            raise UnknownKey(f"unknown key {key!r}", line_no=line_no)
        if key in values:
            raise ParseError(f"repeated key {key!r}", line_no=line_no)
        if not val:
            raise ParseError(f"empty value for {key!r}", line_no=line_no)
        caster = _KEY_TYPES[key]
        if caster is not str:
            try:
                parsed = caster(val)
            except ValueError:
                raise ParseError(f"bad {caster.__name__} value {val!r} for "
                                 f"{key!r}", line_no=line_no) from None
            if key in _POSITIVE and parsed <= 0:
                raise ParseError(f"{key} must be positive, got {val}",
                                 line_no=line_no)
            if key == "margin" and parsed < 0:
                raise ParseError(f"margin must be nonnegative, got {val}",
                                 line_no=line_no)
            values[key] = parsed
        else:
            values[key] = val
    if "example" not in values:
        raise MissingKey("missing required key 'example'")
    if "task" not in values:
        raise MissingKey("missing required key 'task'")
    if values["task"] not in TASKS:
        raise ParseError(f"unknown task {values['task']!r}; "
                         f"known: {', '.join(TASKS)}")
    example = values.pop("example")
    task = values.pop("task")
    seed = values.pop("seed", 0)
    return Scenario(example=example, task=task, seed=seed, params=values)


@dataclass(frozen=True)
class Report:
    scenario: Scenario
    results: dict
    claims: dict          # claim id -> bool
    tables: dict          # name -> (header tuple, row list)

    @property
    def all_passed(self):
        return all(self.claims.values())

    def render(self):
        lines = ["leafcausal-report v1", "scenario {"]
        lines.append(f"  example: {self.scenario.example}")
        lines.append(f"  task: {self.scenario.task}")
        lines.append(f"  seed: {self.scenario.seed}")
        for k in sorted(self.scenario.params):
            lines.append(f"  {k}: {_fmt(self.scenario.params[k])}")
        lines.append("}")
        lines.append("results {")
        for k in sorted(self.results):
            lines.append(f"  {k}: {_fmt(self.results[k])}")
        lines.append("}")
        lines.append("claims {")
        for k in sorted(self.claims):
            lines.append(f"  {k}: {'pass' if self.claims[k] else 'fail'}")
        lines.append("}")
        lines.append("meta {")
        lines.append(f"  package: leafcausal {__version__}")
        lines.append("  engine: forward-dual")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


# ------------------------------------------------------------------ tasks

def _single_chart(spec):
    cid = spec.chart_id()
    return cid, spec.atlas.chart(cid)


def _task_classify_demo(spec, sc):
    cid, chart = _single_chart(spec)
    rng = np.random.default_rng(sc.seed)
    n_vec = sc.get("n_points", 500)
    pts = sample_points(chart, n_vec, rng)
    counts = {c: 0 for c in ("timelike", "lightlike", "spacelike")}
    tcounts = {c: 0 for c in ("timelike", "lightlike", "spacelike")}
    hierarchy_violations = 0
    for x in pts:
        v = TangentVector(cid, x, rng.normal(size=chart.dim))
        full = classify(spec.atlas, v)
        counts[full.name.lower()] += 1
        if spec.gT is None:
            continue
        tc = classify_transverse(spec.fol, spec.gT, spec.orient, v)
        key = tc.kind.name.lower()
        tcounts[key] += 1
        if full is CausalClass.TIMELIKE and key != "timelike":
            hierarchy_violations += 1
    results = {"n_vectors": n_vec, "hierarchy_violations": hierarchy_violations}
    for k, c in counts.items():
        results[f"full_{k}"] = c
    for k, c in tcounts.items():
        results[f"transverse_{k}"] = c
    return results, {"hierarchy": hierarchy_violations == 0}, {}


def _task_ricci_scan(spec, sc):
    cid, chart = _single_chart(spec)
    if spec.gT is None or spec.gT.index != 1:
        raise ScenarioError(f"{spec.example_id} has no Lorentzian transverse "
                            "metric to scan")
    rng = np.random.default_rng(sc.seed)
    pts = sample_points(chart, sc.get("n_points", 50), rng)
    C = sc.get("C", float(spec.extras.get("C", 1.0)))
    factor = sc.get("factor", spec.fol.codim - 1)
    rep = curvature.scan_transverse_ricci_bound(
        spec.fol, spec.gT, cid, pts, C, factor,
        n_directions=sc.get("n_directions", 8),
        chi_max=sc.get("chi_max", 3.0), seed=sc.seed)
    results = {
        "bound_constant": rep.bound_constant,
        "factor": rep.factor,
        "min_transverse_ricci": rep.min_value,
        "margin": rep.margin,
        "n_points": rep.n_points,
        "n_directions": rep.n_directions,
    }
    return results, {"ricci_lower_bound": rep.margin >= -1e-8}, {}


def _shoot_setup(spec, sc):
    if "t_axis" not in spec.extras:
        raise ScenarioError(f"{spec.example_id} has no shooting configuration")
    cid, chart = _single_chart(spec)
    t_axis = spec.extras["t_axis"]
    starts = []
    other = [k for k in range(chart.dim)
             if k != t_axis and k >= spec.fol.leaf_dim]
    n_starts = sc.get("n_points", 4)
    for j in range(n_starts):
        x = 0.5 * (chart.lo + chart.hi)
        x[t_axis] = chart.lo[t_axis] + 1e-3
        for k in other:
            span = chart.hi[k] - chart.lo[k]
            x[k] = chart.lo[k] + span * (j + 0.5) / n_starts
        starts.append(x)
    return cid, chart, starts


def _task_diameter_shoot(spec, sc):
    cid, chart, starts = _shoot_setup(spec, sc)
    est = dynamics.shoot_diameter(
        spec.fol, spec.gT, spec.orient, chart, starts,
        chi_grid=[0.0, 0.3, 0.6],
        max_param=sc.get("max_param", 4.0),
        n_steps=sc.get("n_steps", 300))
    C = float(spec.extras.get("C", 1.0))
    bound = math.pi / math.sqrt(C)
    results = {"estimate": est.value, "bound": bound, "method": est.method,
               "open_domain": est.parameters["open_domain"],
               "chi_refined": est.parameters["chi_refined"]}
    claims = {"diameter_bound": est.value <= bound + 1e-3}
    tables = {}
    if est.witness is not None:
        rows = [(float(s), *map(float, p)) for s, p in
                zip(est.witness.params, est.witness.points)]
        tables["witness_curve"] = (("param",) + chart.names, rows)
    return results, claims, tables


def _task_diameter_graph(spec, sc):
    if spec.graph is None:
        raise ScenarioError(f"{spec.example_id} has no graph discretization")
    res = sc.get("resolution", 20)
    margin = sc.get("margin", causality.DEFAULT_MARGIN)
    g = causality.build_graph(spec.graph, res, margin=margin)
    try:
        value, path, edge_ids = causality.longest_path_diameter(g)
    except GraphHasCycle as e:
        results = {"cycle_found": True, "cycle_length": len(e.cycle),
                   "resolution": res}
        return results, {"acyclic": False}, {}
    C = spec.extras.get("C")
    bound = math.pi / math.sqrt(float(C)) if C else None
    results = {"estimate": value, "resolution": res, "margin": margin,
               "path_nodes": len(path), "cycle_found": False}
    claims = {}
    if bound is not None:
        results["bound"] = bound
        claims["diameter_bound"] = value <= bound + 1e-6
    rows = [(int(i), *map(float, g.coords[i])) for i in path]
    tables = {"witness_path": (("node",) + spec.graph.chart.names, rows)}
    return results, claims, tables


def _task_focal_scan(spec, sc):
    if "quotient_metric" not in spec.extras:
        raise ScenarioError(f"{spec.example_id} has no quotient metric for "
                            "focal scans")
    cid, chart = _single_chart(spec)
    q = spec.fol.codim
    from .geometry import Chart
    qchart = Chart(cid + "-quotient", chart.names[-q:], chart.lo[-q:],
                   chart.hi[-q:], chart.periodic[-q:],
                   spec.extras["quotient_metric"])
    x0 = 0.5 * (qchart.lo + qchart.hi)
    x0[0] = qchart.lo[0] + 1e-3
    u0 = np.zeros(q)
    u0[0] = 1.0
    scan = dynamics.focal_scan(qchart.metric, qchart, x0, u0,
                               max_param=sc.get("max_param", 4.0),
                               n_steps=sc.get("n_steps", 400))
    results = {
        "first_zero_param": (scan.first_zero_param
                             if scan.first_zero_param is not None else "none"),
        "domain_end": scan.domain_end_flag,
        "n_samples": len(scan.params),
    }
    rows = [(float(s), float(u)) for s, u in scan.riccati_trace_samples]
    tables = {"riccati_trace": (("param", "trace"), rows)}
    return results, {"scan_completed": True}, tables


def _task_ladder_probe(spec, sc):
    if spec.graph is None:
        raise ScenarioError(f"{spec.example_id} has no graph discretization")
    res = sc.get("resolution", 16)
    g = causality.build_graph(spec.graph, res)
    cycle = causality.find_closed_transverse_timelike(g)
    results = {"resolution": res, "cycle_found": cycle is not None}
    claims = {}
    tables = {}
    if cycle is not None:
        results["cycle_length"] = len(cycle)
        rows = [(int(i), *map(float, g.coords[i])) for i in cycle]
        tables["cycle_witness"] = (("node",) + spec.graph.chart.names, rows)
        expected_cyclic = any(
            c.claim_id == "closed_transverse_timelike_cycle"
            and c.value == "exists" for c in spec.expected)
        claims["cycle_expected"] = expected_cyclic
    else:
        n_probes = sc.get("n_probes", 1000)
        push = causality.pushup_probe(g, n_probes, seed=sc.seed)
        openr = causality.openness_probe(spec.graph, max(n_probes // 5, 1),
                                         seed=sc.seed)
        results["pushup_violations"] = push.violations
        results["pushup_probes"] = push.n_probes
        results["openness_violations"] = openr.violations
        results["openness_probes"] = openr.n_probes
        claims["pushup"] = push.passed
        claims["openness"] = openr.passed
    return results, claims, tables


def _task_reach(spec, sc):
    if spec.graph is None:
        raise ScenarioError(f"{spec.example_id} has no graph discretization")
    res = sc.get("resolution", 20)
    g = causality.build_graph(spec.graph, res)
    pts, sp = g.coords, g.spacing
    if spec.example_id == "deleted_box":
        seeds = np.flatnonzero(causality.near(pts, 1, -2.0, sp)
                               & causality.near(pts, 2, 0.0, sp)
                               & (pts[:, 0] < 0))
        probe = (causality.near(pts, 1, 0.0, sp)
                 & causality.near(pts, 2, 0.0, sp)
                 & (np.abs(pts[:, 0] - 6.0) <= sp[0] / 2 + 1e-9))
        rs = causality.reach(g, seeds, relation="chron", saturate=True)
        gf = causality.build_graph(spec.graph, res, cone="full")
        rsf = causality.reach(gf, seeds, relation="chron", saturate=False)
        closure = causality.leaf_closure(gf, rsf.indices)
        mask_t = rs.mask(g.n_nodes)
        mask_g = np.zeros(gf.n_nodes, dtype=bool)
        mask_g[closure] = True
        in_t = bool(np.any(mask_t & probe))
        in_g = bool(np.any(mask_g & probe))
        results = {"seeds": len(seeds), "transverse_reach": int(mask_t.sum()),
                   "metric_future_saturated": int(mask_g.sum()),
                   "probe_in_transverse_future": in_t,
                   "probe_in_metric_future": in_g, "resolution": res}
        claims = {"probe_separates_relations": in_t and not in_g}
        return results, claims, {}
    if spec.example_id == "deleted_segment":
        seeds = np.flatnonzero((pts[:, 1] > 0) & (pts[:, 1] <= sp[1] + 1e-9)
                               & (np.abs(pts[:, 2]) <= sp[2] / 2 + 1e-9)
                               & (pts[:, 0] < 0))
        rs = causality.reach(g, seeds, relation="causal", saturate=True)
        m = rs.mask(g.n_nodes)
        lower_ok = True
        upper_hits = 0
        for a in (0.25, 0.5, 1.0):
            tgt = (causality.near(pts, 1, a, sp) & (pts[:, 1] <= a + 1e-9)
                   & (np.abs(pts[:, 2]) <= sp[2] / 2 + 1e-9))
            lower_ok &= bool(np.any(m & tgt & (pts[:, 0] < 0)))
            upper_hits += int(np.sum(m & tgt & (pts[:, 0] > 0)))
        results = {"seeds": len(seeds), "reach_size": int(m.sum()),
                   "lower_components_hit": lower_ok,
                   "upper_component_hits": upper_hits, "resolution": res}
        claims = {"lower_reached": lower_ok, "upper_avoided": upper_hits == 0}
        return results, claims, {}
    center = int(np.argmin(np.linalg.norm(pts - pts.mean(axis=0), axis=1)))
    rs = causality.reach(g, [center], relation="chron",
                         saturate=sc.get("n_points", 1) > 0)
    results = {"seed_node": center, "reach_size": len(rs.indices),
               "saturated": rs.saturated, "resolution": res}
    return results, {"reach_nonempty": len(rs.indices) > 0}, {}


_TASK_FNS = {
    "classify-demo": _task_classify_demo,
    "ricci-scan": _task_ricci_scan,
    "diameter-shoot": _task_diameter_shoot,
    "diameter-graph": _task_diameter_graph,
    "focal-scan": _task_focal_scan,
    "ladder-probe": _task_ladder_probe,
    "reach": _task_reach,
}


def run(scenario: Scenario):
    """Execute one scenario against the catalog; returns a Report."""
    spec = catalog.get(scenario.example)
    results, claims, tables = _TASK_FNS[scenario.task](spec, scenario)
    return Report(scenario=scenario, results=results, claims=claims,
                  tables=tables)


def emit(report: Report, out_dir):
    """Write report.txt plus one CSV per sample table; returns written paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        rp = out / "report.txt"
        rp.write_text(report.render(), newline="\n")
        paths.append(rp)
        for name, (header, rows) in sorted(report.tables.items()):
            tp = out / f"{name}.csv"
            lines = [",".join(header)]
            for row in rows:
                lines.append(",".join(_fmt(v) for v in row))
            tp.write_text("\n".join(lines) + "\n", newline="\n")
            paths.append(tp)
        return paths
    except OSError as e:
        raise IoError(f"cannot write under {out}: {e}") from e


def main(argv=None):
    parser = argparse.ArgumentParser(prog="leafcausal")
    sub = parser.add_subparsers(dest="command")
    runp = sub.add_parser("run", help="execute a scenario file")
    runp.add_argument("scenario", help="path to a key=value scenario file")
    runp.add_argument("--out", default="./out", help="output directory")
    runp.add_argument("--threads", type=int, default=0,
                      help="worker cap (0 = all); runs are deterministic "
                           "regardless")
    runp.add_argument("--seed", type=int, default=None,
                      help="override the scenario seed")
    sub.add_parser("catalog", help="list registered examples")
    sub.add_parser("version", help="print the package version")

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 3

    if args.command == "version":
        print(f"leafcausal {__version__}")
        return 0
    if args.command == "catalog":
        for eid in catalog.list_examples():
            print(eid)
        return 0
    if args.command != "run":
        parser.print_usage(sys.stderr)
        return 3

    try:
        text = Path(args.scenario).read_text()
    except OSError as e:
        print(f"error: cannot read scenario: {e}", file=sys.stderr)
        return 3
    try:
        scenario = parse_scenario(text)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)

    t0 = time.perf_counter()
    try:
        report = run(scenario)
        emit(report, args.out)
    except LeafCausalError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 4
    print(report.render(), end="")
    print(f"wall_clock_s: {time.perf_counter() - t0:.3f}", file=sys.stderr)
    return 0 if report.all_passed else 2


if __name__ == "__main__":
    sys.exit(main())
