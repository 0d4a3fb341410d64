import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noetherp.certificate import TowerBuilder
from noetherp.perm import orientation_group, sylow_group
from noetherp.poly import PolyRing
from noetherp.ratfunc import RatFunc
from noetherp.tower import build_kernel_certificate, build_p2_tower, build_podd_tower
from noetherp.verify import (check_faithful, check_invariance, mutation_suite, orbit_oracle, verify_certificate,
                             verify_document)

R2 = PolyRing(("x1", "x2"), 2)
X1, X2 = (RatFunc.var(R2, v) for v in R2.vars)


def symmetric_pair_certificate(e2_value=None, degree=2):
    """Two-variable certificate by hand: e1, e2 final, x1 a root of Y^2 - e1 Y + e2."""
    b = TowerBuilder(R2)
    b.new("e1", X1 + X2, "final")
    b.new("e2", X1 * X2 if e2_value is None else e2_value, "final")
    b.new("r1", X1)
    b.relate("r1", lambda g: [g["e2"], -g["e1"], 1] + [0] * (degree - 2), degree)
    b.recover("x1", X1, lambda g: g["r1"])
    b.recover("x2", X2, lambda g: g["e1"] - g["r1"])
    return b.freeze("toy", 2, 2, sylow_group(2, 2), True, 1)


def test_hand_built_certificate_verifies():
    rep = verify_certificate(symmetric_pair_certificate())
    assert rep.passed, rep.to_text()


def test_hand_built_certificate_with_wrong_final_fails():
    rep = verify_certificate(symmetric_pair_certificate(e2_value=X1 * X2 + X1))
    names = {c.name for c in rep.failing()}
    assert "invariance" in names


def test_overclaimed_degree_fails_budget():
    rep = verify_certificate(symmetric_pair_certificate(degree=3))
    assert not rep.passed


def test_invariance_witness():
    rep = check_invariance({"f": X1}, sylow_group(2, 2))
    assert not rep.passed
    w = rep.failing()[0].witness
    assert w["generator"] == "f" and w["image"] == "x2"
    assert check_invariance({"f": X1 + X2, "g": X1 * X2}, sylow_group(2, 2)).passed


def test_orbit_oracle_examples():
    g = sylow_group(2, 2)
    assert orbit_oracle(X1 + X2, g) == 1
    assert orbit_oracle(X1, g) == 2


R4 = PolyRing(("x1", "x2", "x3", "x4"), 2)
V4 = [RatFunc.var(R4, v) for v in R4.vars]
small = st.sampled_from(V4 + [V4[0] + V4[1], V4[0] * V4[2], V4[0] - V4[1], V4[2] ** 2 + V4[3]])


@settings(max_examples=30, deadline=None)
@given(small, small)
def test_orbit_one_iff_invariant(a, b):
    f = a * b + a
    group = orientation_group(4, 2)
    assert (orbit_oracle(f, group) == 1) == check_invariance({"f": f}, group).passed


def test_faithful_examples():
    assert check_faithful(orientation_group(4, 2), V4)[0]
    ok, g = check_faithful(orientation_group(4, 2), [V4[0] + V4[1], V4[2] + V4[3]])
    assert not ok and g is not None
    assert check_faithful(sylow_group(2, 3), [])[0]


def test_faithful_on_podd_u_coordinates():
    cert = build_podd_tower(6, 3)
    targets = [r.value for r in cert.recovery]
    assert check_faithful(cert.group, targets)[0]


CERTS = {
    "p2_4": lambda: build_p2_tower(4),
    "p2_6": lambda: build_p2_tower(6),
    "podd_6_3": lambda: build_podd_tower(6, 3),
    "podd_9_3": lambda: build_podd_tower(9, 3),
    "kernel_2_3": lambda: build_kernel_certificate(2, 3),
}


@pytest.mark.parametrize("key", sorted(CERTS))
def test_built_certificates_verify_after_roundtrip(key):
    doc = json.loads(CERTS[key]().to_json())
    rep = verify_document(doc)
    assert rep.passed, rep.to_text()


@pytest.mark.parametrize("key", ["p2_4", "podd_6_3", "kernel_2_3"])
def test_every_mutation_is_caught_with_witness(key):
    doc = json.loads(CERTS[key]().to_json())
    results = mutation_suite(doc, count=10)
    assert len(results) == 10
    assert all(r["caught"] and r["witnessed"] for r in results), results


def test_toy_mutations_caught():
    # the full symmetric group on two points has no transposition left to add
    doc = json.loads(symmetric_pair_certificate().to_json())
    assert all(r["caught"] for r in mutation_suite(doc, count=4))
    with pytest.raises(ValueError):
        mutation_suite(doc, count=5)


def test_unparseable_document_is_a_failure():
    rep = verify_document({"case": "p2", "levels": "nonsense"})
    assert not rep.passed
    assert rep.failing()[0].name == "parse"


def test_report_is_deterministic():
    doc = json.loads(build_p2_tower(4).to_json())
    assert verify_document(doc).to_json() == verify_document(doc).to_json()
    assert "timing" not in json.loads(verify_document(doc).to_json())
