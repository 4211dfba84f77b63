import math

import numpy as np
import pytest

from leafcausal import catalog
from leafcausal.curvature import ricci
from leafcausal.errors import UnknownExample


def test_listing_is_sorted_and_complete():
    ids = catalog.list_examples()
    assert ids == sorted(ids)
    assert len(ids) == 12
    assert "cos_warp" in ids and "misner_suspension" in ids


def test_get_caches_and_rejects_unknown_ids():
    assert catalog.get("torus3_dense") is catalog.get("torus3_dense")
    with pytest.raises(UnknownExample):
        catalog.get("no_such_example")


def test_expected_claims_carry_valid_provenance():
    for eid in catalog.list_examples():
        for claim in catalog.get(eid).expected:
            assert claim.provenance in ("paper", "derived", "trivial")
            if isinstance(claim.value, float):
                assert np.isfinite(claim.value)


def test_expected_claim_rejects_bad_provenance():
    with pytest.raises(ValueError):
        catalog.ExpectedClaim("x", 1.0, "guessed")


def test_reversed_suspension_is_a_time_reversing_isometry():
    spec = catalog.reversed_suspension()
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = rng.uniform(-1.0, 1.0, size=2)
        y = spec.holonomy(x)
        dh = spec.holonomy_differential(x)
        g = np.array(spec.model_metric(x), dtype=float)
        gy = np.array(spec.model_metric(y), dtype=float)
        assert np.max(np.abs(dh.T @ gy @ dh - g)) < 1e-12
        pairing = float((dh @ spec.reference(x)) @ gy @ spec.reference(y))
        assert pairing > 0.0


def test_desitter_base_has_einstein_constant_three():
    rng = np.random.default_rng(1)
    for _ in range(10):
        x = rng.uniform([0.05, 0.3, 0.3, 0.2], [0.3, 2.8, 2.8, 6.0])
        g = np.array(catalog.desitter_base_metric(x), dtype=float)
        assert np.max(np.abs(ricci(catalog.desitter_base_metric, x) - 3.0 * g)) < 1e-10


def test_logt_quotient_matches_realized_transverse_form():
    spec = catalog.get("logt_warp")
    for t, b in ((1.2, 0.7), (2.0, 1.0), (2.6, 1.8)):
        q = np.array(catalog.logt_quotient_metric(np.array([t, 0.3, b])),
                     dtype=float)
        full = spec.gT.matrix("box", np.array([0.1, 0.2, t, 0.4, b]))
        assert np.max(np.abs(q - full)) < 1e-12


def test_diameter_claims_respect_the_curvature_bound():
    for eid in ("cos_warp", "cos_warp_c4"):
        spec = catalog.get(eid)
        C = spec.extras["C"]
        assert abs(spec.extras["analytic_diameter"]
                   - (math.pi / math.sqrt(C) - 0.1)) < 1e-12
        assert spec.extras["analytic_diameter"] <= math.pi / math.sqrt(C)


def test_every_lorentzian_example_exposes_a_chart_id():
    for eid in catalog.list_examples():
        spec = catalog.get(eid)
        cid = spec.chart_id()
        assert spec.atlas.chart(cid) is not None
        assert spec.example_id == eid
