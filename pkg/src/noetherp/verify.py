"""Certificate checker.

Acceptance logic: if every level-0 generator is fixed by the group, every step
relation vanishes, the recovery expressions reproduce the targets, the group
acts faithfully on the targets and the product of relation degrees (times the
Hajja-Kang weights) equals |G|, then [F(targets) : F(level 0)] <= budget = |G|
while F(level 0) lies inside the fixed field, whose index is exactly |G|.
So level 0 generates the fixed field; full Jacobian rank makes it rational.
"""
from __future__ import annotations

import copy
import json
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from .certificate import TowerCertificate, fingerprint_point, perm_action
from .cyclo import CycRat
from .perm import DEFAULT_CAP, BudgetExceeded, GroupSpec, Permutation, enumerate_group
from .poly import SizeLimitExceeded
from .ratfunc import EvaluationSingular, RatFunc, act, jacobian_rank_at, substitute

PASS, FAIL, ERROR = "pass", "fail", "error"


@dataclass
class Check:
    name: str
    status: str
    witness: dict | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        out = {"name": self.name, "status": self.status, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class VerificationReport:
    case: str
    checks: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.status == PASS for c in self.checks)

    def add(self, check: Check):
        self.checks.append(check)
        return check

    def extend(self, other: "VerificationReport"):
        self.checks.extend(other.checks)
        self.timing.update(other.timing)

    def failing(self) -> list:
        return [c for c in self.checks if c.status != PASS]

    def to_dict(self, timing: bool = False) -> dict:
        out = {"case": self.case, "pass": self.passed, "checks": [c.to_dict() for c in self.checks]}
        if timing:
            out["timing"] = {k: round(v, 4) for k, v in self.timing.items()}
        return out

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True, indent=1) + "\n"

    def to_text(self) -> str:
        lines = [f"case {self.case}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            line = f"  [{c.status}] {c.name}"
            if c.detail:
                line += f" - {c.detail}"
            lines.append(line)
            if c.witness is not None and c.status != PASS:
                lines.append(f"      witness: {json.dumps(c.witness, sort_keys=True)}")
        return "\n".join(lines) + "\n"


def _ok(name, detail=""):
    return Check(name, PASS, None, detail)


def _bad(name, witness, detail=""):
    return Check(name, FAIL, witness, detail)


# ---------------------------------------------------------------------------
# group-level oracles


def check_faithful(group: GroupSpec, targets, cap: int = DEFAULT_CAP, seed: int = 0x5EED):
    """Return (True, None) if only the identity fixes every target, else (False, element)."""
    targets = list(targets)
    if not targets:
        return len(enumerate_group(group, cap)) == 1, None
    ring = targets[0].ring
    pt = fingerprint_point(ring, seed)
    base = [t.evaluate(pt) for t in targets]
    for g in enumerate_group(group, cap):
        if g.is_identity():
            continue
        img_pt = _moved_point(pt, g)
        if any(t.evaluate(img_pt) != b for t, b in zip(targets, base)):
            continue
        a = perm_action(ring, g)
        if all(act(a, t) == t for t in targets):
            return False, g
    return True, None


def _moved_point(pt, g: Permutation):
    return [pt[g(i + 1) - 1] for i in range(g.n)] + list(pt[g.n:])


def orbit_oracle(f: RatFunc, group: GroupSpec, cap: int = DEFAULT_CAP, seed: int = 0x5EED) -> int:
    """Size of the orbit of f under the enumerated group, up to exact equality."""
    pt = fingerprint_point(f.ring, seed)
    buckets: dict = {}
    for g in enumerate_group(group, cap):
        img = act(perm_action(f.ring, g), f)
        key = img.evaluate(pt)
        bucket = buckets.setdefault(key, [])
        if not any(img == other for other in bucket):
            bucket.append(img)
    return sum(len(b) for b in buckets.values())


def check_invariance(generators: dict, group: GroupSpec) -> VerificationReport:
    """Every group generator fixes every named field generator exactly."""
    rep = VerificationReport("invariance")
    for label, g in group.generators:
        for name, f in generators.items():
            a = perm_action(f.ring, g)
            img = act(a, f)
            if not img == f:
                rep.add(_bad("invariance", {"element": label, "generator": name, "image": img.to_text()}))
                return rep
    rep.add(_ok("invariance", f"{len(generators)} generators x {len(group.generators)} group generators"))
    return rep


# ---------------------------------------------------------------------------
# certificate checks


def check_structure(cert: TowerCertificate) -> Check:
    names = list(cert.names.vars)
    for k in names:
        if cert.kinds.get(k) not in ("final", "related", "bound", "aux"):
            return _bad("structure", {"name": k, "kind": cert.kinds.get(k)}, "unknown role")
    rel = {}
    for r in cert.relations:
        if r.new_generator in rel:
            return _bad("structure", {"name": r.new_generator}, "two relations for one name")
        rel[r.new_generator] = r
        if len(r.coefficients) != r.degree_claim + 1:
            return _bad("structure", {"name": r.new_generator, "degree_claim": r.degree_claim,
                                      "coefficients": len(r.coefficients)}, "degree claim mismatch")
        if cert.kinds.get(r.new_generator) != "related":
            return _bad("structure", {"name": r.new_generator}, "relation for a name that is not 'related'")
    for k in names:
        if cert.kinds[k] == "related" and k not in rel:
            return _bad("structure", {"name": k}, "related name without a relation")
    covered = {b for h in cert.hk_steps for b in h.bound}
    for k in names:
        if cert.kinds[k] == "bound" and k not in covered:
            return _bad("structure", {"name": k}, "bound name not covered by a Hajja-Kang step")
    # dependencies: no aux names, no cycles
    deps = {}
    for k, r in rel.items():
        used = set()
        for c in r.coefficients:
            used |= {cert.names.vars[i] for i in c.variables()}
        for u in used:
            if u == k or cert.kinds[u] == "aux":
                return _bad("structure", {"name": k, "depends_on": u}, "illegal dependency")
        deps[k] = used
    state: dict = {}

    def cyclic(k):
        if state.get(k) == 1:
            return True
        if state.get(k) == 2 or k not in deps:
            return False
        state[k] = 1
        if any(cyclic(d) for d in deps[k]):
            return True
        state[k] = 2
        return False

    for k in deps:
        if cyclic(k):
            return _bad("structure", {"name": k}, "cyclic relation dependencies")
    finals = [k for k in names if cert.kinds[k] == "final"]
    if sorted(finals) != sorted(cert.level0):
        return _bad("structure", {"finals": finals, "level0": list(cert.level0)}, "level 0 differs from finals")
    for lv in cert.levels:
        for k, f in lv.generators.items():
            if k not in cert.values or not f == cert.values[k]:
                return _bad("structure", {"name": k, "level": lv.index}, "level text disagrees with value")
    for r in cert.recovery:
        used = {cert.names.vars[i] for i in r.expr.variables()}
        bad = sorted(u for u in used if cert.kinds[u] == "aux")
        if bad:
            return _bad("structure", {"target": r.target, "aux": bad}, "recovery uses aux names")
    return _ok("structure", f"{len(names)} names, {len(rel)} relations")


def _subst(cert: TowerCertificate, f: RatFunc) -> RatFunc:
    used = {cert.names.vars[i] for i in f.variables()}
    return substitute(f, {k: cert.values[k] for k in used}, cert.ambient)


def check_relations(cert: TowerCertificate) -> VerificationReport:
    rep = VerificationReport(cert.case)
    for r in cert.relations:
        coeffs = [_subst(cert, c) for c in r.coefficients]
        if coeffs[-1].is_zero():
            rep.add(_bad("relations", {"name": r.new_generator}, "leading coefficient vanishes"))
            return rep
        x = cert.values[r.new_generator]
        residual = RatFunc.sum([c * x**i for i, c in enumerate(coeffs)], cert.ambient)
        if not residual.is_zero():
            rep.add(_bad("relations", {"name": r.new_generator, "residual": residual.to_text()}))
            return rep
    rep.add(_ok("relations", f"{len(cert.relations)} relations vanish"))
    return rep


def check_recovery(cert: TowerCertificate) -> VerificationReport:
    rep = VerificationReport(cert.case)
    targets = {r.target: r.value for r in cert.recovery}
    if cert.case != "kernel" and sorted(targets) != sorted(cert.ambient.vars):
        rep.add(_bad("recovery", {"targets": sorted(targets)}, "targets do not cover the ambient variables"))
        return rep
    for r in cert.recovery:
        if r.target in cert.ambient.vars and not r.value == RatFunc.var(cert.ambient, r.target):
            rep.add(_bad("recovery", {"target": r.target, "value": r.value.to_text()}, "target value mislabelled"))
            return rep
        got = _subst(cert, r.expr)
        if not got == r.value:
            rep.add(_bad("recovery", {"target": r.target, "difference": (got - r.value).to_text()}))
            return rep
    # the group must map the target field into itself (targets up to roots of unity)
    ring = cert.ambient
    pt = fingerprint_point(ring, cert.seed)
    fp = {t: v.evaluate(pt) for t, v in targets.items()}
    zetas = [CycRat.zeta(ring.p, k) for k in range(ring.p)]
    for label, g in cert.group.generators:
        img_pt = _moved_point(pt, g)
        for t, v in targets.items():
            val = v.evaluate(img_pt)
            hit = next(((t2, e) for t2, b in fp.items() for e, z in enumerate(zetas) if z * b == val), None)
            if hit is None or not act(perm_action(ring, g), v) == targets[hit[0]] * zetas[hit[1]]:
                rep.add(_bad("recovery", {"element": label, "target": t}, "group does not preserve the targets"))
                return rep
    rep.add(_ok("recovery", f"{len(cert.recovery)} targets reproduced"))
    return rep


def check_faithful_targets(cert: TowerCertificate, cap: int = DEFAULT_CAP) -> Check:
    ok, g = check_faithful(cert.group, [r.value for r in cert.recovery], cap, cert.seed)
    if ok:
        return _ok("faithful")
    return _bad("faithful", {"element": g.cycle_text()}, "nontrivial element fixes all targets")


def check_budget(cert: TowerCertificate, cap: int = DEFAULT_CAP) -> VerificationReport:
    rep = VerificationReport(cert.case)
    claimed = cert.claimed_budget()
    try:
        order = len(enumerate_group(cert.group, cap))
    except BudgetExceeded as exc:
        rep.add(_bad("budget", {"claimed": claimed, "group_order": f">{cap}"}, str(exc)))
        return rep
    if claimed != order:
        rep.add(_bad("budget", {"claimed": claimed, "group_order": order}, "budget mismatch"))
    else:
        rep.add(_ok("budget", f"{claimed} = |G|"))
    return rep


def check_rank(cert: TowerCertificate) -> Check:
    gens = list(cert.level0.values())
    want = len(gens)
    if cert.complete and want != len(cert.recovery):
        return _bad("rank", {"level0": want, "targets": len(cert.recovery)}, "generator count != target count")
    try:
        rank = jacobian_rank_at(gens, seed=cert.seed) if gens else 0
    except EvaluationSingular as exc:
        return _bad("rank", {"error": str(exc)})
    if rank != want:
        return _bad("rank", {"rank": rank, "generators": want})
    return _ok("rank", f"rank {rank}")


def check_actions(cert: TowerCertificate) -> Check:
    """The residual action claims recorded per level hold exactly."""
    perms = dict(cert.group.generators)
    zetas = [CycRat.zeta(cert.p, k) for k in range(cert.p)]
    count = 0
    for lv in cert.levels:
        for claim in lv.actions:
            g = perms.get(claim["element"])
            if g is None:
                return _bad("actions", {"element": claim["element"]}, "unknown group element")
            a = perm_action(cert.ambient, g)
            for name, (target, e) in claim["images"].items():
                if name not in lv.generators or target not in lv.generators:
                    return _bad("actions", {"name": name, "target": target}, "name not in level")
                if not act(a, lv.generators[name]) == lv.generators[target] * zetas[e % cert.p]:
                    return _bad("actions", {"element": claim["element"], "name": name, "claimed": target})
                count += 1
    return _ok("actions", f"{count} action claims")


@lru_cache(maxsize=None)
def _hajja_ok(p: int) -> bool:
    from .tower import hajja_cyclic_generators

    return all(hajja_cyclic_generators(p).claims.values())


def check_hk(cert: TowerCertificate, cap: int = DEFAULT_CAP) -> Check:
    ring = cert.ambient
    p = cert.p
    zinv = CycRat.zeta(p, -1)
    perms = dict(cert.group.generators)
    for h in cert.hk_steps:
        val = cert.values
        wit = {"step": h.label}
        for b in h.bound:
            if cert.kinds.get(b) != "bound":
                return _bad("hk", {**wit, "name": b}, "bound list names a non-bound generator")
        if h.kind == "cyclic":
            if h.weight != p:
                return _bad("hk", {**wit, "weight": h.weight}, "cyclic step must absorb degree p")
            cyc, root = h.data["cycle"], h.data["root"]
            g1 = perm_action(ring, h.data["g1"])
            g2 = perm_action(ring, h.data["g2"])
            if Permutation(tuple(h.data["g1"])) not in set(enumerate_group(cert.group, cap)):
                return _bad("hk", {**wit, "g1": h.data["g1"]}, "g1 is not a group element")
            if len(cyc) != p:
                return _bad("hk", {**wit, "cycle": cyc}, "cycle length differs from p")
            for i, c in enumerate(cyc):
                if not act(g1, val[c]) == val[cyc[(i + 1) % p]]:
                    return _bad("hk", {**wit, "name": c}, "g1 does not cycle the block")
                if not act(g2, val[c]) == val[c]:
                    return _bad("hk", {**wit, "name": c}, "g2 moves a block generator")
            if not act(g1, val[root]) == val[root]:
                return _bad("hk", {**wit, "name": root}, "g1 moves the root")
            if not act(g2, val[root]) == val[root] * zinv:
                return _bad("hk", {**wit, "name": root}, "g2 does not scale the root by zeta^-1")
            if not _hajja_ok(p):
                return _bad("hk", {**wit, "p": p}, "cyclic block construction fails its identities")
        elif h.kind == "affine":
            if h.weight != 1:
                return _bad("hk", {**wit, "weight": h.weight}, "affine step preserves degree")
            if "residual" in h.data:
                elems = [(lab, Permutation(tuple(im))) for lab, im in h.data["residual"]]
            else:
                missing = [lab for lab in h.data["group"] if lab not in perms]
                if missing:
                    return _bad("hk", {**wit, "labels": missing}, "unknown group generators")
                elems = [(lab, perms[lab]) for lab in h.data["group"]]
            cols = [val[c] for c in h.data["columns"]]
            pt = fingerprint_point(ring, cert.seed)
            fps = [c.evaluate(pt) for c in cols]
            zetas = [CycRat.zeta(p, k) for k in range(p)]
            for lab, g in elems:
                a = perm_action(ring, g)
                for name, c in zip(h.data["columns"], cols):
                    v = c.evaluate(_moved_point(pt, g))
                    hit = next(((j, e) for j, f in enumerate(fps) for e, z in enumerate(zetas) if z * f == v), None)
                    if hit is None or not act(a, c) == cols[hit[0]] * zetas[hit[1]]:
                        return _bad("hk", {**wit, "element": lab, "name": name}, "action is not affine on columns")
            base = [val[b] for b in h.data["base"]]
            sub = GroupSpec(cert.group.n, p, cert.group.family, elems)
            ok, g = check_faithful(sub, base, cap, cert.seed)
            if not ok:
                return _bad("hk", {**wit, "element": g.cycle_text()}, "action on the base is not faithful")
        else:
            return _bad("hk", {**wit, "kind": h.kind}, "unknown step kind")
    return _ok("hk", f"{len(cert.hk_steps)} steps")


def verify_certificate(cert: TowerCertificate, cap: int = DEFAULT_CAP) -> VerificationReport:
    rep = VerificationReport(f"{cert.case}(n={cert.n},p={cert.p})")

    def run(name, fn):
        t = time.perf_counter()
        try:
            out = fn()
        except SizeLimitExceeded as exc:
            out = Check(name, ERROR, {"size_limit": str(exc)})
        except Exception as exc:  # a malformed certificate is a failure, not a crash
            out = Check(name, FAIL, {"exception": f"{type(exc).__name__}: {exc}"})
        if isinstance(out, VerificationReport):
            rep.checks.extend(out.checks)
        else:
            rep.add(out)
        rep.timing[name] = time.perf_counter() - t

    run("structure", lambda: check_structure(cert))
    run("invariance", lambda: check_invariance(cert.level0, cert.group))
    run("relations", lambda: check_relations(cert))
    run("recovery", lambda: check_recovery(cert))
    run("faithful", lambda: check_faithful_targets(cert, cap))
    run("budget", lambda: check_budget(cert, cap))
    run("rank", lambda: check_rank(cert))
    run("actions", lambda: check_actions(cert))
    run("hk", lambda: check_hk(cert, cap))
    return rep


def verify_document(doc: dict, cap: int = DEFAULT_CAP) -> VerificationReport:
    """Parse a serialised certificate and verify it; parse problems are failures."""
    try:
        cert = TowerCertificate.from_dict(doc)
    except Exception as exc:
        rep = VerificationReport(str(doc.get("case", "?")) if isinstance(doc, dict) else "?")
        rep.add(Check("parse", FAIL, {"exception": f"{type(exc).__name__}: {exc}"}))
        return rep
    return verify_certificate(cert, cap)


# ---------------------------------------------------------------------------
# mutation testing

MUTATION_KINDS = ("generator", "coefficient", "degree", "recovery", "group")


def mutate(doc: dict, kind: str, rng: random.Random) -> tuple:
    """Return (corrupted copy, description) with exactly one logical field changed."""
    d = copy.deepcopy(doc)
    if kind == "generator":
        lv0 = d["levels"][0]["generators"]
        name = rng.choice(sorted(lv0))
        text = f"({lv0[name]}) + {d['ambient'][0]}"
        lv0[name] = text
        d["values"][name] = text
        return d, f"generator {name} += {d['ambient'][0]}"
    if kind == "coefficient":
        i = rng.randrange(len(d["relations"]))
        r = d["relations"][i]
        j = rng.randrange(len(r["coefficients"]))
        r["coefficients"][j] = f"({r['coefficients'][j]}) + 1"
        return d, f"relation {r['new_generator']} coefficient {j} += 1"
    if kind == "degree":
        i = rng.randrange(len(d["relations"]))
        d["relations"][i]["degree_claim"] += 1
        return d, f"relation {d['relations'][i]['new_generator']} degree claim += 1"
    if kind == "recovery":
        t = rng.choice(sorted(d["recovery"]))
        d["recovery"][t]["expr"] = f"({d['recovery'][t]['expr']}) + 1"
        return d, f"recovery {t} += 1"
    if kind == "group":
        group = GroupSpec.from_dict(d["group"])
        deg = group.n
        members = set(enumerate_group(group))
        for i, j in combinations(range(1, deg + 1), 2):
            swap = Permutation.from_cycles(deg, [(i, j)])
            if swap not in members:
                break
        else:
            raise ValueError("group already contains every transposition")
        d["group"]["generators"].append({"label": f"extra_({i} {j})", "images": list(swap.images)})
        return d, f"group += ({i} {j})"
    raise ValueError(f"unknown mutation kind {kind!r}")


def mutation_suite(doc: dict, count: int = 10, seed: int = 0x5EED, cap: int = DEFAULT_CAP) -> list:
    """Apply ``count`` seeded corruptions; each entry records whether verification failed."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        kind = MUTATION_KINDS[i % len(MUTATION_KINDS)]
        bad, what = mutate(doc, kind, rng)
        rep = verify_document(bad, cap)
        failing = rep.failing()
        out.append({
            "kind": kind, "mutation": what, "caught": bool(failing),
            "checks": [c.name for c in failing],
            "witnessed": all(c.witness is not None for c in failing),
        })
    return out
