"""Tower certificates: layered generator systems with checkable step relations.

A certificate names a set of generators, each with an explicit value in the
ambient field.  Every name is one of

* ``final``   - a claimed invariant (level 0),
* ``related`` - carries a :class:`StepRelation` whose coefficients are rational
  functions in other names,
* ``bound``   - covered by a Hajja-Kang step (an existence statement we do not
  construct; only its hypotheses are checked),
* ``aux``     - helper values referenced by Hajja-Kang hypotheses only.

Recovery expressions write each target (ambient variable, or a field generator
for partial targets) in terms of names.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .cyclo import CycRat
from .perm import GroupSpec, Permutation
from .poly import PolyRing
from .ratfunc import MonomialAction, RatFunc, act, parse

KINDS = ("final", "related", "bound", "aux")


@dataclass
class StepRelation:
    new_generator: str
    coefficients: list  # RatFunc over the name ring, constant term first
    degree_claim: int


@dataclass
class Recovery:
    target: str
    value: RatFunc  # ambient
    expr: RatFunc  # over names


@dataclass
class HKStep:
    """Invocation of the Hajja-Kang theorem; hypotheses are data, not trust."""

    label: str
    kind: str  # "cyclic" (absorbs a Z/p of degree p) or "affine" (degree preserving)
    weight: int
    bound: list = field(default_factory=list)
    data: dict = field(default_factory=dict)


@dataclass
class GeneratorLevel:
    index: int
    generators: dict  # name -> ambient RatFunc
    actions: list = field(default_factory=list)  # [{"element", "images": {name: [target, zeta_exp]}}]


@dataclass
class TowerCertificate:
    case: str
    n: int
    p: int
    group: GroupSpec
    ambient: PolyRing
    names: PolyRing
    values: dict  # name -> ambient RatFunc, in name-ring order
    kinds: dict  # name -> kind
    levels: list  # GeneratorLevel, level 0 first
    relations: list
    recovery: list
    hk_steps: list = field(default_factory=list)
    complete: bool = True
    seed: int = 0x5EED

    @property
    def level0(self) -> dict:
        return self.levels[0].generators if self.levels else {}

    def relation_for(self, name: str):
        for r in self.relations:
            if r.new_generator == name:
                return r
        return None

    def claimed_budget(self) -> int:
        total = 1
        for r in self.relations:
            total *= r.degree_claim
        for h in self.hk_steps:
            total *= h.weight
        return total

    # -- serialisation ------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "n": self.n,
            "p": self.p,
            "seed": self.seed,
            "complete": self.complete,
            "group": self.group.to_dict(),
            "ambient": list(self.ambient.vars),
            "names": list(self.names.vars),
            "kinds": dict(self.kinds),
            "values": {k: v.to_text() for k, v in self.values.items()},
            "levels": [
                {
                    "index": lv.index,
                    "generators": {k: v.to_text() for k, v in lv.generators.items()},
                    "actions": lv.actions,
                }
                for lv in self.levels
            ],
            "relations": [
                {
                    "new_generator": r.new_generator,
                    "coefficients": [c.to_text() for c in r.coefficients],
                    "degree_claim": r.degree_claim,
                }
                for r in self.relations
            ],
            "recovery": {
                r.target: {"value": r.value.to_text(), "expr": r.expr.to_text()} for r in self.recovery
            },
            "hk_steps": [
                {"label": h.label, "kind": h.kind, "weight": h.weight, "bound": h.bound, "data": h.data}
                for h in self.hk_steps
            ],
            "budget": {"claimed": self.claimed_budget()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "TowerCertificate":
        p = d["p"]
        amb = PolyRing(tuple(d["ambient"]), p)
        names = PolyRing(tuple(d["names"]), p)
        values = {k: parse(d["values"][k], amb) for k in d["names"]}
        levels = []
        for lv in d["levels"]:
            gens = {k: parse(t, amb) for k, t in lv["generators"].items()}
            levels.append(GeneratorLevel(lv["index"], gens, lv.get("actions", [])))
        relations = [
            StepRelation(r["new_generator"], [parse(c, names) for c in r["coefficients"]], r["degree_claim"])
            for r in d["relations"]
        ]
        recovery = [
            Recovery(t, parse(r["value"], amb), parse(r["expr"], names)) for t, r in sorted(d["recovery"].items())
        ]
        hk = [HKStep(h["label"], h["kind"], h["weight"], list(h["bound"]), h["data"]) for h in d["hk_steps"]]
        return cls(
            case=d["case"], n=d["n"], p=p, group=GroupSpec.from_dict(d["group"]), ambient=amb, names=names,
            values=values, kinds=dict(d["kinds"]), levels=levels, relations=relations, recovery=recovery,
            hk_steps=hk, complete=d["complete"], seed=d["seed"],
        )

    @classmethod
    def from_json(cls, text: str) -> "TowerCertificate":
        return cls.from_dict(json.loads(text))


def perm_action(ring: PolyRing, images) -> MonomialAction:
    perm = images if isinstance(images, Permutation) else Permutation(tuple(images))
    return MonomialAction.from_permutation(ring, perm)


def fingerprint_point(ring: PolyRing, seed: int) -> list:
    rng = random.Random(seed)
    return [CycRat.from_rational(ring.p, rng.randint(2, 10**6)) for _ in ring.vars]


class TowerBuilder:
    """Collects named generators and relation formulas, then freezes a certificate.

    Relation and recovery formulas are Python callables taking a mapping from
    names to values; they are evaluated once over the name ring.
    """

    def __init__(self, ambient: PolyRing):
        self.ambient = ambient
        self.order: list = []
        self.values: dict = {}
        self.kinds: dict = {}
        self.rel_fns: dict = {}
        self.rec_fns: list = []
        self.hk: list = []

    def new(self, name: str, value: RatFunc, kind: str | None = None) -> str:
        if name in self.values:
            raise ValueError(f"duplicate generator name {name}")
        self.order.append(name)
        self.values[name] = value
        if kind is not None:
            self.set_kind(name, kind)
        return name

    def set_kind(self, name: str, kind: str):
        if kind not in KINDS:
            raise ValueError(kind)
        self.kinds[name] = kind

    def relate(self, name: str, fn, degree: int):
        """``fn(g)`` returns coefficients c_0..c_d of a polynomial vanishing at ``name``."""
        self.rel_fns[name] = (fn, degree)
        self.set_kind(name, "related")

    def relate_equal(self, name: str, fn):
        self.relate(name, lambda g: [-fn(g), 1], 1)

    def relate_root(self, name: str, power: str, d: int):
        """``name ** d == power``."""
        self.relate(name, lambda g: [-g[power]] + [0] * (d - 1) + [1], d)

    def recover(self, target: str, value: RatFunc, fn):
        self.rec_fns.append((target, value, fn))

    def freeze(self, case: str, n: int, p: int, group: GroupSpec, complete: bool, seed: int) -> TowerCertificate:
        missing = [k for k in self.order if k not in self.kinds]
        if missing:
            raise ValueError(f"generators without a role: {missing}")
        names = PolyRing(tuple(self.order), p)
        env = {k: RatFunc.var(names, k) for k in self.order}

        def lift(c):
            return c if isinstance(c, RatFunc) else RatFunc.const(names, c)

        relations = []
        deps = {}
        for k in self.order:
            if k in self.rel_fns:
                fn, d = self.rel_fns[k]
                coeffs = [lift(c) for c in fn(env)]
                if len(coeffs) != d + 1:
                    raise ValueError(f"relation for {k} has {len(coeffs)} coefficients, degree {d}")
                relations.append(StepRelation(k, coeffs, d))
                used = set()
                for c in coeffs:
                    used |= {names.vars[i] for i in c.variables()}
                deps[k] = used
        level = {}

        def lev(k, stack=()):
            if k in level:
                return level[k]
            if k in stack:
                raise ValueError(f"cyclic relation through {k}")
            if self.kinds[k] != "related":
                level[k] = 0
            else:
                level[k] = 1 + max((lev(d, stack + (k,)) for d in deps[k]), default=0)
            return level[k]

        for k in self.order:
            if self.kinds[k] != "aux":
                lev(k)
        depth = max(level.values(), default=0)
        levels = []
        for i in range(depth + 1):
            gens = {k: self.values[k] for k in self.order
                    if level.get(k) == i and self.kinds[k] in ("final", "related")}
            levels.append(GeneratorLevel(i, gens))
        recovery = [Recovery(t, v, lift(fn(env))) for t, v, fn in self.rec_fns]
        cert = TowerCertificate(
            case=case, n=n, p=p, group=group, ambient=self.ambient, names=names,
            values=dict(self.values), kinds=dict(self.kinds), levels=levels, relations=relations,
            recovery=recovery, hk_steps=list(self.hk), complete=complete, seed=seed,
        )
        annotate_actions(cert)
        return cert


def annotate_actions(cert: TowerCertificate):
    """Record how each group generator moves each level's generators (up to a root of unity)."""
    amb = cert.ambient
    pt = fingerprint_point(amb, cert.seed)
    zetas = [CycRat.zeta(amb.p, k) for k in range(amb.p)]
    for lv in cert.levels:
        fp = {k: v.evaluate(pt) for k, v in lv.generators.items()}
        claims = []
        for label, g in cert.group.generators:
            images = {}
            # act(g, f)(x) = f(x_{g(1)}, ..., x_{g(n)})
            img_pt = [pt[g(i + 1) - 1] for i in range(len(g.images))] + pt[len(g.images):]
            for k, v in lv.generators.items():
                val = v.evaluate(img_pt)
                for tk, tv in fp.items():
                    hit = next((e for e, z in enumerate(zetas) if z * tv == val), None)
                    if hit is not None:
                        images[k] = [tk, hit]
                        break
            claims.append({"element": label, "images": images})
        lv.actions = claims
