import json
import random

import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from noetherp.certificate import TowerCertificate
from noetherp.cyclo import CycRat
from noetherp.perm import enumerate_group, kernel_group, orientation_group, sigma
from noetherp.ratfunc import EvaluationSingular, MonomialAction, RatFunc, act
from noetherp.tower import (BoundExceeded, UnsupportedShape, build_kernel_certificate, build_kernel_generators,
                            build_p2_tower, build_podd_tower, discriminant_identity_check,
                            fourier_inverse_check, hajja_cyclic_generators)


def numeric_invariant(f: RatFunc, group, seed=1, trials=2) -> bool:
    """Oracle by evaluation only: f(x) == f(g.x) for every enumerated g."""
    rng = random.Random(seed)
    p = f.ring.p
    for _ in range(trials):
        pt = [CycRat.from_rational(p, rng.randint(-10**4, 10**4)) for _ in f.ring.vars]
        base = f.evaluate(pt)
        for g in enumerate_group(group):
            moved = [pt[g(i + 1) - 1] for i in range(g.n)]
            if f.evaluate(moved) != base:
                return False
    return True


@pytest.mark.parametrize("n,budget", [(2, 1), (3, 1), (4, 4), (5, 4), (6, 8), (8, 64)])
def test_p2_budget_and_level0(n, budget):
    cert = build_p2_tower(n)
    assert cert.claimed_budget() == budget == len(enumerate_group(orientation_group(n, 2)))
    assert len(cert.level0) == n


@pytest.mark.parametrize("n", [2, 4, 6])
def test_p2_level0_invariant_by_evaluation(n):
    cert = build_p2_tower(n)
    group = orientation_group(n, 2)
    assert all(numeric_invariant(f, group) for f in cert.level0.values())


def test_p2_quadratic_relation_n4():
    cert = build_p2_tower(4)
    x1, x2, x3, x4 = (RatFunc.var(cert.ambient, v) for v in cert.ambient.vars)
    t1, t2 = x1 - x2, x3 - x4
    u1, v1 = t1 * t2, t1**2 + t2**2
    # t_1^2 is a root of X^2 - v_1 X + u_1^2
    assert (t1**2) ** 2 - v1 * t1**2 + u1**2 == 0
    rel = cert.relation_for("T0_1")
    assert rel.degree_claim == 2


def test_p2_odd_adjoins_last_variable():
    cert = build_p2_tower(5)
    assert cert.kinds["r5"] == "final"
    assert cert.values["r5"] == RatFunc.var(cert.ambient, "x5")


def test_p2_unsupported():
    with pytest.raises(UnsupportedShape):
        build_p2_tower(1)


@pytest.mark.parametrize("n,p,budget", [(3, 3, 1), (6, 3, 3), (7, 3, 3), (9, 3, 27), (10, 5, 5)])
def test_podd_budget(n, p, budget):
    cert = build_podd_tower(n, p)
    assert cert.claimed_budget() == budget == len(enumerate_group(orientation_group(n, p)))


@pytest.mark.parametrize("n,p", [(3, 3), (6, 3), (10, 5)])
def test_podd_small_m_is_explicit(n, p):
    cert = build_podd_tower(n, p)
    assert cert.complete and not cert.hk_steps
    assert len(cert.level0) == n
    group = orientation_group(n, p)
    assert all(numeric_invariant(f, group) for f in cert.level0.values())


def test_podd_j_level_generators_9_3():
    cert = build_podd_tower(9, 3)
    j_gens = [cert.values[k] for k in ("P", "T0_1", "T0_2")]
    for s in range(1, 3):
        g = sigma(9, 3, (0, s)) * sigma(9, 3, (0, s + 1)).inverse()
        a = MonomialAction.from_permutation(cert.ambient, g)
        assert all(act(a, f) == f for f in j_gens)


def test_podd_large_m_has_hk_nodes():
    cert = build_podd_tower(9, 3)
    kinds = sorted(h.kind for h in cert.hk_steps)
    assert kinds == ["affine", "affine", "cyclic"]
    assert not cert.complete


def test_podd_rejects_p2():
    with pytest.raises(UnsupportedShape):
        build_podd_tower(6, 2)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_fourier_inverse(p):
    assert fourier_inverse_check(p)


def test_kernel_generators_2_2():
    lv = build_kernel_generators(2, 2)
    ring = next(iter(lv.generators.values())).ring
    x1, x2, x3, x4 = (RatFunc.var(ring, v) for v in ring.vars)
    t1, t2 = x1 - x2, x3 - x4
    assert lv.generators["sn"] == t1 * t2
    assert lv.generators["q1"] == t1**2 + t2**2


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (3, 2)])
def test_kernel_generators_invariant_exhaustively(n, p):
    lv = build_kernel_generators(n, p)
    group = kernel_group(n, p)
    assert all(numeric_invariant(f, group) for f in lv.generators.values())


def test_kernel_single_block():
    lv = build_kernel_generators(1, 3)
    assert list(lv.generators) == ["sn"]
    assert build_kernel_certificate(1, 3).claimed_budget() == 1


def test_hajja_scaling_and_v_product_p3():
    h = hajja_cyclic_generators(3)
    z3 = CycRat.zeta(3)
    assert act(h.g1, h.u[1]) * h.xbar[0] * z3 == h.u[1]
    assert h.v[1] * h.v[0] ** 2 == h.u[0] ** -3 * h.u[1] ** 3


def test_hajja_cycle_p5_is_carried_by_the_root_scaling():
    h = hajja_cyclic_generators(5)
    one_over_z, v0_over_z = h.finals[0], h.finals[1]
    assert act(h.g2, one_over_z) == v0_over_z
    assert act(h.g1, one_over_z) == one_over_z
    assert all(h.claims.values())


@pytest.mark.parametrize("p", [3, 5, 7])
def test_hajja_claims(p):
    assert all(hajja_cyclic_generators(p).claims.values())


def test_hajja_bounds():
    with pytest.raises(UnsupportedShape):
        hajja_cyclic_generators(2)
    with pytest.raises(BoundExceeded):
        hajja_cyclic_generators(11)


def test_discriminant_against_sympy():
    x = sympy.symbols("x1:4")
    b = -(x[0] + x[1] + x[2])
    c = x[0] * x[1] + x[0] * x[2] + x[1] * x[2]
    w = -x[0] * x[1] * x[2]
    d = 18 * b * c * w - 4 * b**3 * w + b**2 * c**2 - 4 * c**3 - 27 * w**2
    vdm = ((x[0] - x[1]) * (x[0] - x[2]) * (x[1] - x[2])) ** 2
    assert sympy.expand(d - vdm) == 0
    assert vdm.subs(dict(zip(x, (0, 1, 2)))) == 4
    rep = discriminant_identity_check()
    assert rep.passed
    assert rep.at_012 == 4 and rep.at_001 == 0


@pytest.mark.parametrize("build", [lambda: build_p2_tower(6), lambda: build_podd_tower(6, 3),
                                   lambda: build_podd_tower(9, 3), lambda: build_kernel_certificate(2, 3)])
def test_json_roundtrip_is_stable(build):
    cert = build()
    text = cert.to_json()
    assert TowerCertificate.from_json(text).to_json() == text
    assert build().to_json() == text


def test_level_action_claims_p2_n4():
    cert = build_p2_tower(4)
    level0 = cert.levels[0]
    for claim in level0.actions:
        assert sorted(claim["images"]) == sorted(level0.generators)
        assert all(target == name and e == 0 for name, (target, e) in claim["images"].items())


_CACHE = {}


def cached_p2(n):
    if n not in _CACHE:
        _CACHE[n] = (build_p2_tower(n), enumerate_group(orientation_group(n, 2)))
    return _CACHE[n]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 63), st.lists(st.integers(-50, 50), min_size=8, max_size=8))
def test_p2_n8_invariant_at_random_points(k, point):
    cert, elems = cached_p2(8)
    g = elems[k]
    pt = [CycRat.from_rational(2, v) for v in point]
    moved = [pt[g(i + 1) - 1] for i in range(8)]
    for f in cert.level0.values():
        try:
            before = f.evaluate(pt)
        except EvaluationSingular:
            assume(False)
        assert f.evaluate(moved) == before


def test_certificate_json_has_contract_fields():
    d = json.loads(build_p2_tower(4).to_json())
    for key in ("group", "levels", "relations", "recovery", "budget"):
        assert key in d
    assert d["budget"]["claimed"] == 4
