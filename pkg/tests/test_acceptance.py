"""Acceptance matrix: one PASS/FAIL line per criterion.

Runs under pytest (lines are printed even with output capture on) or directly:
``python3 tests/test_acceptance.py``.
"""
import json
import time
from math import factorial

import pytest

from noetherp.perm import (all_exponent_vectors, enumerate_group, kernel_group, order_exponent, orientation_group,
                           product_of, sylow_group, sylow_in_kernel_check, wreath_conjugation_check)
from noetherp.certificate import perm_action
from noetherp.ratfunc import act, jacobian_rank_at
from noetherp.tower import (build_kernel_certificate, build_kernel_generators, build_p2_tower, build_podd_tower,
                            discriminant_identity_check, hajja_cyclic_generators)
from noetherp.verify import mutation_suite, verify_certificate, verify_document

ORDER_MATRIX = [(4, 2), (6, 2), (8, 2), (13, 2), (6, 3), (9, 3), (10, 5)]
SUITE = ("structure", "invariance", "relations", "recovery", "faithful", "budget", "rank", "hk")


def legendre(n, p):
    f, k = factorial(n), 0
    while f % p == 0:
        f, k = f // p, k + 1
    return k


def criterion_1():
    start = time.perf_counter()
    bad = [(n, p) for n, p in ORDER_MATRIX if len(enumerate_group(sylow_group(n, p))) != p ** legendre(n, p)]
    secs = time.perf_counter() - start
    return not bad and secs < 30, f"{len(ORDER_MATRIX)} orders exact, mismatches {bad}, {secs:.2f}s (limit 30s)"


def criterion_2():
    cases = [(n, p) for n, p in ORDER_MATRIX if n // p >= 1]
    idx = {(n, p): len(enumerate_group(sylow_group(n, p))) / len(enumerate_group(orientation_group(n, p)))
           for n, p in cases}
    bad = [c for c, v in idx.items() if v != c[1]]
    return not bad, f"index p for {len(cases)} cases, mismatches {bad}"


def criterion_3():
    parts = []
    ok = True
    for n, p in [(8, 2), (9, 3)]:
        g = sylow_group(n, p)
        products = [product_of(g, v) for v in all_exponent_vectors(n, p)]
        distinct = len(set(products))
        order = len(enumerate_group(g))
        ok &= distinct == len(products) == order == p ** order_exponent(n, p)
        parts.append(f"({n},{p}) {distinct}/{len(products)} distinct, order {order}")
    return ok, "; ".join(parts)


def criterion_4():
    cases = [(2, 2), (2, 3), (3, 2)]
    res = {c: wreath_conjugation_check(*c) for c in cases}
    return all(res.values()), f"(p,m) -> {res}"


def criterion_5():
    reps = {c: sylow_in_kernel_check(*c) for c in [(2, 2), (3, 3), (2, 3)]}
    ok = all(r["pass"] and r["kernel_enumerated"] == factorial(r["n"]) * r["p"] ** (r["n"] - 1)
             for r in reps.values())
    sizes = {c: r["kernel_enumerated"] for c, r in reps.items()}
    return ok, f"|K| enumerated {sizes}, p-parts match, embedding generators have phi = 0"


def criterion_6():
    ok, parts = True, []
    for p in (3, 5):
        h = hajja_cyclic_generators(p)
        ok &= all(h.claims.values()) and h.seconds < 60
        parts.append(f"p={p} {sum(h.claims.values())}/{len(h.claims)} claims in {h.seconds:.2f}s")
    # the displayed cycle on 1/z, v_0/z, ... is carried by the W-scaling generator; see README
    return ok, "; ".join(parts)


def _suite_ok(rep):
    status = {c.name: c.status for c in rep.checks}
    return rep.passed and all(status.get(k) == "pass" for k in SUITE), status


def criterion_7():
    ok, parts = True, []
    for n in (2, 4, 6, 8):
        cert = build_p2_tower(n)
        passed, _ = _suite_ok(verify_certificate(cert))
        h = len(enumerate_group(orientation_group(n, 2)))
        rank = jacobian_rank_at(list(cert.level0.values()), seed=cert.seed)
        good = passed and cert.claimed_budget() == h and rank == n
        ok &= good
        parts.append(f"n={n} budget {cert.claimed_budget()}=|H|={h} rank {rank}{'' if good else ' FAIL'}")
    return ok, "; ".join(parts)


def criterion_8():
    ok, parts = True, []
    for n in (3, 6):
        cert = build_podd_tower(n, 3)
        passed, _ = _suite_ok(verify_certificate(cert))
        h = len(enumerate_group(orientation_group(n, 3)))
        good = passed and cert.claimed_budget() == h
        ok &= good
        parts.append(f"n={n} budget {cert.claimed_budget()}=|H|={h} hk nodes {len(cert.hk_steps)}"
                     f"{'' if good else ' FAIL'}")
    return ok, "; ".join(parts)


def criterion_9():
    ok, parts = True, []
    for n, p in [(2, 2), (2, 3)]:
        gens = build_kernel_generators(n, p).generators
        elems = enumerate_group(kernel_group(n, p))
        ring = next(iter(gens.values())).ring
        inv = all(act(perm_action(ring, g), f) == f for g in elems for f in gens.values())
        rank = jacobian_rank_at(list(gens.values()))
        cert_ok = verify_certificate(build_kernel_certificate(n, p)).passed
        good = inv and rank == n == len(gens) and cert_ok
        ok &= good
        parts.append(f"({n},{p}) {len(gens)} generators fixed by all {len(elems)} elements, rank {rank}")
    return ok, "; ".join(parts)


def criterion_10():
    rep = discriminant_identity_check()
    return rep.passed and rep.at_012 == 4 and rep.at_001 == 0, \
        f"identity {rep.identity}, D(0,1,2)={rep.at_012.to_text()}, D(0,0,1)={rep.at_001.to_text()}"


def criterion_11():
    builds = [lambda n=n: build_p2_tower(n) for n in (2, 4, 6, 8)]
    builds += [lambda n=n: build_podd_tower(n, 3) for n in (3, 6)]
    builds += [lambda c=c: build_kernel_certificate(*c) for c in [(2, 2), (2, 3)]]
    ok, caught, total = True, 0, 0
    for build in builds:
        doc = json.loads(build().to_json())
        if not verify_document(doc).passed:
            ok = False
            continue
        res = mutation_suite(doc, count=10)
        total += len(res)
        caught += sum(r["caught"] and r["witnessed"] for r in res)
    ok &= caught == total == 10 * len(builds)
    return ok, f"{caught}/{total} seeded corruptions caught with a witness over {len(builds)} certificates"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


def run_one(i):
    start = time.perf_counter()
    ok, detail = CRITERIA[i - 1]()
    line = f"criterion {i}: {'PASS' if ok else 'FAIL'} - {detail} [{time.perf_counter() - start:.2f}s]"
    return ok, line


@pytest.mark.parametrize("i", range(1, len(CRITERIA) + 1))
def test_criterion(i, capsys):
    ok, line = run_one(i)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    import sys

    results = [run_one(i) for i in range(1, len(CRITERIA) + 1)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
