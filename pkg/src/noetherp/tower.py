"""Builders for the invariant-generator towers.

Each builder returns a :class:`TowerCertificate` whose level-0 names are the
claimed generators of the fixed field, with every intermediate change of
variables recorded as an explicit step relation.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import factorial

from .certificate import HKStep, TowerBuilder, TowerCertificate
from .cyclo import CycRat, is_prime
from .perm import Permutation, generator_indices, kernel_group, orientation_group, sigma
from .poly import PolyRing, elementary_symmetric
from .ratfunc import MonomialAction, RatFunc, act

DEFAULT_SEED = 0x5EED
HAJJA_BOUND = 7


class UnsupportedShape(ValueError):
    pass


class BoundExceeded(ValueError):
    pass


def _prod(items, one):
    out = one
    for f in items:
        out = out * f
    return out


def _xring(n: int, p: int) -> PolyRing:
    return PolyRing(tuple(f"x{i}" for i in range(1, n + 1)), p)


def fourier_coordinates(xs: list, p: int, block: int) -> list:
    """y_r = sum_k zeta^(-r k) x_{(block-1)p+k+1} for r = 0..p-1; y_1 is the block's t."""
    ring = xs[0].ring
    base = (block - 1) * p
    out = []
    for r in range(p):
        out.append(RatFunc.sum([xs[base + k] * CycRat.zeta(p, -r * k) for k in range(p)], ring))
    return out


def fourier_matrix(p: int) -> list:
    """Rows r, columns k: zeta^(-r k), so y = M x block by block."""
    return [[CycRat.zeta(p, -r * k) for k in range(p)] for r in range(p)]


def fourier_inverse(p: int) -> list:
    return [[CycRat.zeta(p, r * k) / p for r in range(p)] for k in range(p)]


def fourier_inverse_check(p: int) -> bool:
    """Exact check that the two matrices above are mutually inverse."""
    a, b = fourier_matrix(p), fourier_inverse(p)
    for i in range(p):
        for j in range(p):
            entry = sum((a[i][k] * b[k][j] for k in range(p)), CycRat.zero(p))
            if entry != (1 if i == j else 0):
                return False
    return True


# ---------------------------------------------------------------------------
# p = 2


def build_p2_tower(n: int, seed: int = DEFAULT_SEED) -> TowerCertificate:
    if n < 2:
        raise UnsupportedShape(f"p = 2 towers need n >= 2, got {n}")
    amb = _xring(n, 2)
    X = [RatFunc.var(amb, v) for v in amb.vars]
    b = TowerBuilder(amb)
    m = n // 2
    if n % 2:
        b.new(f"r{n}", X[n - 1], "final")
        b.recover(f"x{n}", X[n - 1], lambda g: g[f"r{n}"])
    tvals, zcol = [], []
    for i in range(1, m + 1):
        xa, xb = X[2 * i - 2], X[2 * i - 1]
        tvals.append(xa - xb)
        zcol.append(b.new(f"z0_{i}", xa + xb))
        b.new(f"t{i}", xa - xb)
        b.recover(f"x{2 * i - 1}", xa, lambda g, i=i: (g[f"z0_{i}"] + g[f"t{i}"]) / 2)
        b.recover(f"x{2 * i}", xb, lambda g, i=i: (g[f"z0_{i}"] - g[f"t{i}"]) / 2)
    one = RatFunc.const(amb, 1)
    P = b.new("P", _prod(tvals, one))
    tsq = []
    for i in range(1, m):
        tsq.append(b.new(f"T0_{i}", tvals[i - 1] ** 2))
        b.relate_root(f"t{i}", f"T0_{i}", 2)
    b.relate_equal(f"t{m}", lambda g: g[P] / _prod([g[f"t{i}"] for i in range(1, m)], 1))
    _p2_lemma(b, depth=0, tvals=tvals, P=P, tsq=tsq, asq=lambda g: 1, cols=[zcol])
    cert = b.freeze("p2", n, 2, orientation_group(n, 2), complete=True, seed=seed)
    return cert


def _p2_lemma(b: TowerBuilder, depth: int, tvals: list, P: str, tsq: list, asq, cols: list):
    """Fixed field of F(P, t_1^2..t_{k-1}^2, z columns) under G_{k,2}, recursively.

    ``tsq`` names t_i^2 for i < k; ``asq(g)`` gives a^2 as an expression in names.
    """
    k = len(tvals)
    if k == 1:
        b.set_kind(P, "final")
        for col in cols:
            b.set_kind(col[0], "final")
        return
    if k % 2:
        # commit t_k^2 and the z's of index k to the base field
        base = b.new(f"B{depth}", tvals[-1] ** 2, "final")
        for col in cols:
            b.set_kind(col[-1], "final")
        new_asq = lambda g, asq=asq: g[base] * asq(g)  # noqa: E731
        last = tsq[-1]
        rest = tsq[:-1]
        b.relate_equal(last, lambda g: g[P] ** 2 / (new_asq(g) * _prod([g[t] for t in rest], 1)))
        _p2_lemma(b, depth, tvals[:-1], P, tsq[:-1], new_asq, [c[:-1] for c in cols])
        return
    m = k // 2
    d = depth + 1
    uvals = [tvals[2 * i] * tvals[2 * i + 1] for i in range(m)]
    new_tsq = [b.new(f"T{d}_{i}", uvals[i - 1] ** 2) for i in range(1, m)]
    vnames = [b.new(f"v{d}_{i}", tvals[2 * i - 2] ** 2 + tvals[2 * i - 1] ** 2) for i in range(1, m + 1)]

    def u_sq(g, i):
        if i < m:
            return g[new_tsq[i - 1]]
        return g[P] ** 2 / (asq(g) * _prod([g[t] for t in new_tsq], 1))

    wcols, scols = [], []
    for j, col in enumerate(cols, 1):
        wc, sc = [], []
        for i in range(1, m + 1):
            za, zb = b.values[col[2 * i - 2]], b.values[col[2 * i - 1]]
            ta2, tb2 = tvals[2 * i - 2] ** 2, tvals[2 * i - 1] ** 2
            wc.append(b.new(f"w{d}_{i}_{j}", za + zb))
            sc.append(b.new(f"s{d}_{i}_{j}", (za - zb) * (ta2 - tb2)))
        wcols.append(wc)
        scols.append(sc)
    # z'_{i,j} = w, z'_{i,j+l} = s, z'_{i,2l+1} = v
    new_cols = wcols + scols + [vnames]

    for i in range(1, m + 1):
        lo, hi = 2 * i - 1, 2 * i
        v = vnames[i - 1]
        b.relate(tsq[lo - 1], lambda g, i=i, v=v: [u_sq(g, i), -g[v], 1], 2)
        if hi < k:
            b.relate_equal(tsq[hi - 1], lambda g, v=v, lo=lo: g[v] - g[tsq[lo - 1]])

        def diff(g, v=v, lo=lo):
            return 2 * g[tsq[lo - 1]] - g[v]

        for j, col in enumerate(cols):
            w, s = wcols[j][i - 1], scols[j][i - 1]
            b.relate_equal(col[lo - 1], lambda g, w=w, s=s, diff=diff: (g[w] + g[s] / diff(g)) / 2)
            b.relate_equal(col[hi - 1], lambda g, w=w, s=s, diff=diff: (g[w] - g[s] / diff(g)) / 2)
    _p2_lemma(b, d, uvals, P, new_tsq, asq, new_cols)


# ---------------------------------------------------------------------------
# odd p


def build_podd_tower(n: int, p: int, seed: int = DEFAULT_SEED) -> TowerCertificate:
    if p == 2:
        raise UnsupportedShape("p = 2: use build_p2_tower")
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if n < 1:
        raise UnsupportedShape(f"need n >= 1, got {n}")
    amb = _xring(n, p)
    X = [RatFunc.var(amb, v) for v in amb.vars]
    b = TowerBuilder(amb)
    m = n // p
    complete = m < p
    for k in range(m * p + 1, n + 1):
        b.new(f"e{k}", X[k - 1], "final")
        b.recover(f"x{k}", X[k - 1], lambda g, k=k: g[f"e{k}"])
    tvals = []
    ynames = {}
    for j in range(1, m + 1):
        ys = fourier_coordinates(X, p, j)
        tvals.append(ys[1])
        for r in range(p):
            ynames[j, r] = b.new(f"t{j}" if r == 1 else f"y{j}_{r}", ys[r])
        for k in range(p):
            b.recover(
                f"x{(j - 1) * p + k + 1}", X[(j - 1) * p + k],
                lambda g, j=j, k=k: RatFunc.sum([g[ynames[j, r]] * CycRat.zeta(p, r * k) for r in range(p)])
                / p,
            )
    cnames = []
    for j in range(1, m + 1):
        for r in range(p):
            if r == 1:
                continue
            c = b.new(f"c{j}_{r}", b.values[ynames[j, r]] / tvals[j - 1] ** r, "final" if complete else "bound")
            cnames.append(c)
            b.relate_equal(ynames[j, r], lambda g, c=c, j=j, r=r: g[c] * g[f"t{j}"] ** r)
    if m == 0:
        cert = b.freeze("podd", n, p, orientation_group(n, p), complete=True, seed=seed)
        return cert
    one = RatFunc.const(amb, 1)
    P = b.new("P", _prod(tvals, one))
    tpow = []
    for j in range(1, m):
        tpow.append(b.new(f"T0_{j}", tvals[j - 1] ** p))
        b.relate_root(f"t{j}", f"T0_{j}", p)
    b.relate_equal(f"t{m}", lambda g: g[P] / _prod([g[f"t{j}"] for j in range(1, m)], 1))
    group = orientation_group(n, p)
    if not complete:
        # the other Fourier coordinates are affine over F(t_1..t_m)
        b.hk.append(HKStep(
            label="fourier-affine", kind="affine", weight=1, bound=list(cnames),
            data={"base": [f"t{j}" for j in range(1, m + 1)], "columns": cnames,
                  "group": [lab for lab, _ in group.generators]},
        ))
    _podd_lemma(b, p, depth=0, tvals=tvals, P=P, tpow=tpow, apow=lambda g: 1)
    return b.freeze("podd", n, p, group, complete=complete, seed=seed)


def _podd_lemma(b: TowerBuilder, p: int, depth: int, tvals: list, P: str, tpow: list, apow, tlast=None):
    """Fixed field of F(P, t_1^p..t_{k-1}^p) under G_{k,p} (t's at the given depth).

    ``tlast`` optionally names t_k^p when an earlier step already introduced it.
    """
    k = len(tvals)
    if k < p:
        b.set_kind(P, "final")
        for t in tpow:
            b.set_kind(t, "final")
        return
    i = k % p
    if i:
        mp = k - i
        # commit t_{mp+1}^p .. t_k^p to the base field
        committed = tpow[mp:]
        top = tlast or b.new(f"A{depth}", tvals[-1] ** p)
        committed.append(top)
        for t in committed:
            b.set_kind(t, "final")
        new_apow = lambda g, apow=apow: _prod([g[t] for t in committed], 1) * apow(g)  # noqa: E731
        last, rest = tpow[mp - 1], tpow[: mp - 1]
        b.relate_equal(last, lambda g: g[P] ** p / (new_apow(g) * _prod([g[t] for t in rest], 1)))
        _podd_lemma(b, p, depth, tvals[:mp], P, rest, new_apow, tlast=last)
        return
    mb = k // p
    d = depth + 1
    n = b.ambient.nvars
    span = p**depth  # Fourier t's per t at this depth
    one = RatFunc.const(b.ambient, 1)
    uvals = [_prod(tvals[(bb - 1) * p: bb * p], one) for bb in range(1, mb + 1)]
    full = tpow + [tlast or b.new(f"T{depth}_{k}", tvals[-1] ** p, "aux")]
    new_tpow = [b.new(f"T{d}_{bb}", uvals[bb - 1] ** p) for bb in range(1, mb)]
    unames = [b.new(f"u{d}_{bb}", uvals[bb - 1], "aux") for bb in range(1, mb + 1)]
    ulast = b.new(f"T{d}_{mb}", uvals[-1] ** p, "aux")
    for bb in range(1, mb + 1):
        cycle = full[(bb - 1) * p: bb * p]
        for t in cycle:
            b.kinds.setdefault(t, "bound")
        g1 = sigma(n, p, (d, bb))
        g2 = sigma(n, p, (0, (bb - 1) * p * span + 1)).inverse()
        b.hk.append(HKStep(
            label=f"cyclic-{d}-{bb}", kind="cyclic", weight=p,
            bound=[t for t in cycle if b.kinds[t] == "bound"],
            data={"cycle": cycle, "root": unames[bb - 1], "g1": list(g1.images), "g2": list(g2.images)},
        ))
    # the residual G_{mb,p} permutes the blocks; their z columns are affine over the base
    resid = [(ix.label, sigma(n, p, ix)) for ix in generator_indices(n, p) if ix.i > d]
    b.hk.append(HKStep(
        label=f"block-affine-{d}", kind="affine", weight=1, bound=[],
        data={"base": new_tpow + [ulast], "columns": unames,
              "residual": [[lab, list(g.images)] for lab, g in resid]},
    ))
    _podd_lemma(b, p, d, uvals, P, new_tpow, apow, tlast=ulast)


# ---------------------------------------------------------------------------
# kernel of the twist sum


def _kernel_setup(n: int, p: int):
    amb = _xring(n * p, p)
    X = [RatFunc.var(amb, v) for v in amb.vars]
    ys = [fourier_coordinates(X, p, j) for j in range(1, n + 1)]
    return amb, X, ys


def build_kernel_generators(n: int, p: int):
    """sigma_n(t) and sigma_i(t^p), i < n, in the n*p ambient variables."""
    from .certificate import GeneratorLevel

    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    amb, _, ys = _kernel_setup(n, p)
    ts = [y[1] for y in ys]
    gens = {"sn": elementary_symmetric(n, ts)}
    tp = [t**p for t in ts]
    for i in range(1, n):
        gens[f"q{i}"] = elementary_symmetric(i, tp)
    return GeneratorLevel(0, gens)


def build_kernel_certificate(n: int, p: int, seed: int = DEFAULT_SEED) -> TowerCertificate:
    """Certificate for F(t_1..t_n)^{K_{n,p}}; the rest of F(x) is affine over it."""
    amb, _, ys = _kernel_setup(n, p)
    b = TowerBuilder(amb)
    lv = build_kernel_generators(n, p)
    for name, v in lv.generators.items():
        b.new(name, v, "final")
    tn = [b.new(f"t{j}", ys[j - 1][1]) for j in range(1, n + 1)]
    Tn = [b.new(f"T{j}", ys[j - 1][1] ** p) for j in range(1, n + 1)]
    others = []
    for j in range(1, n + 1):
        for r in range(p):
            if r != 1:
                others.append(b.new(f"y{j}_{r}", ys[j - 1][r], "bound"))

    def charpoly(g):
        # coefficients (constant first) of prod_j (Y - T_j) via the invariants
        e = [1] + [g[f"q{i}"] for i in range(1, n)] + [g["sn"] ** p]
        return [(-1) ** (n - d) * e[n - d] for d in range(n + 1)]

    def deflated(g, k):
        c = charpoly(g)
        for j in range(1, k):
            # divide by (Y - T_j), highest coefficient first
            root = g[f"T{j}"]
            out = [0] * (len(c) - 1)
            acc = 0
            for d in range(len(c) - 1, 0, -1):
                acc = c[d] + acc * root if d < len(c) - 1 else c[d]
                out[d - 1] = acc
            c = out
        return c

    for k in range(1, n + 1):
        b.relate(Tn[k - 1], lambda g, k=k: deflated(g, k), n - k + 1)
    for j in range(1, n):
        b.relate_root(tn[j - 1], Tn[j - 1], p)
    b.relate_equal(tn[-1], lambda g: g["sn"] / _prod([g[t] for t in tn[:-1]], 1))
    for j in range(1, n + 1):
        b.recover(f"t{j}", ys[j - 1][1], lambda g, j=j: g[f"t{j}"])
    group = kernel_group(n, p)
    if others:
        b.hk.append(HKStep(
            label="fourier-affine", kind="affine", weight=1, bound=others,
            data={"base": tn, "columns": others, "group": [lab for lab, _ in group.generators]},
        ))
    return b.freeze("kernel", n, p, group, complete=True, seed=seed)


# ---------------------------------------------------------------------------
# cyclic block construction in F(x_1..x_p, W), W^p = x_1...x_p


@dataclass
class HajjaData:
    p: int
    ring: PolyRing
    xbar: list
    u: list
    v: list
    z: RatFunc
    finals: list  # 1/z, v_0/z, ..., v_0...v_{p-3}/z
    g1: MonomialAction
    g2: MonomialAction
    claims: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "ring": list(self.ring.vars),
            "radical": f"W^{self.p} = " + "*".join(f"x{i}" for i in range(1, self.p + 1)),
            "u": [f.to_text() for f in self.u],
            "v": [f.to_text() for f in self.v],
            "z": self.z.to_text(),
            "finals": [f.to_text() for f in self.finals],
            "claims": dict(self.claims),
        }


def hajja_ring(p: int) -> PolyRing:
    xs = [f"x{i}" for i in range(1, p + 1)]
    return PolyRing.with_radical(xs + ["W"], p, "W", p, {x: 1 for x in xs})


def hajja_cyclic_generators(p: int, bound: int = HAJJA_BOUND) -> HajjaData:
    if p == 2 or not is_prime(p):
        raise UnsupportedShape(f"need an odd prime, got {p}")
    if p > bound:
        raise BoundExceeded(f"p = {p} exceeds the configured bound {bound}")
    start = time.perf_counter()
    ring = hajja_ring(p)
    W = RatFunc.var(ring, "W")
    xbar = [RatFunc.var(ring, f"x{i}") / W for i in range(1, p + 1)]
    one = RatFunc.const(ring, 1)
    partial = [one]
    for i in range(p - 1):
        partial.append(partial[-1] * xbar[i])
    u = [RatFunc.sum([partial[k] * CycRat.zeta(p, i * k) for k in range(p)], ring) for i in range(p)]
    v = [u[i] ** -1 * u[(i + 1) % p] ** 2 * u[(i + 2) % p] ** -1 for i in range(p - 1)]
    vpart = [one]
    for i in range(p - 1):
        vpart.append(vpart[-1] * v[i])
    z = RatFunc.sum(vpart, ring)
    finals = [vpart[k] / z for k in range(p - 1)]
    cyc = list(range(1, p)) + [0] + [p]  # x_i -> x_{i+1}, W fixed
    g1 = MonomialAction(ring, cyc)
    g2 = MonomialAction.scaling(ring, {"W": CycRat.zeta(p, -1)})
    data = HajjaData(p, ring, xbar, u, v, z, finals, g1, g2)
    data.claims = hajja_claims(data)
    data.seconds = time.perf_counter() - start
    return data


def _homogeneous_degree(f: RatFunc):
    """Total degree of a factored f with homogeneous atoms, else None."""
    deg = 0
    for a, k in f.factors.items():
        ds = {sum(e) for e in a.terms}
        if len(ds) != 1:
            return None
        deg += k * ds.pop()
    return deg


def hajja_claims(h: HajjaData) -> dict:
    p = h.p
    z = CycRat.zeta
    claims = {}
    claims["g1_scales_u"] = all(act(h.g1, h.u[i]) == h.u[i] * z(p, -i) / h.xbar[0] for i in range(p))
    lhs = _prod([h.v[p - 2 - k] ** (k + 1) for k in range(p - 1)], RatFunc.const(h.ring, 1))
    claims["v_product"] = lhs == h.u[0] ** -p * h.u[1] ** p
    claims["xbar_product"] = _prod(h.xbar, RatFunc.const(h.ring, 1)) == 1
    # cycle on v: v_0 -> v_1 -> ... -> v_{p-2} -> 1/(v_0...v_{p-2}) -> v_0
    vcycle = h.v + [_prod(h.v, RatFunc.const(h.ring, 1)) ** -1]
    claims["g2_cycles_v"] = all(act(h.g2, vcycle[i]) == vcycle[(i + 1) % p] for i in range(p))
    affine = 1 - RatFunc.sum(h.finals, h.ring)
    cycle = h.finals + [affine]
    claims["g2_cycles_finals"] = all(act(h.g2, cycle[i]) == cycle[(i + 1) % p] for i in range(p))
    claims["g1_fixes_v_and_finals"] = all(act(h.g1, f) == f for f in h.v + h.finals)
    claims["degree_zero"] = all(_homogeneous_degree(f) == 0 for f in h.v + h.finals)
    return claims


# ---------------------------------------------------------------------------
# cubic discriminant


@dataclass
class DiscriminantReport:
    identity: bool
    at_012: CycRat
    at_001: CycRat
    sqrt_alternating: bool
    sqrt_fixed_by_3cycle: bool

    @property
    def passed(self) -> bool:
        return (self.identity and self.at_012 == 4 and self.at_001 == 0
                and self.sqrt_alternating and self.sqrt_fixed_by_3cycle)

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "D(0,1,2)": self.at_012.to_text(),
            "D(0,0,1)": self.at_001.to_text(),
            "sqrt_alternating": self.sqrt_alternating,
            "sqrt_fixed_by_3cycle": self.sqrt_fixed_by_3cycle,
            "pass": self.passed,
        }


def discriminant_polynomial(ring: PolyRing, b, c, w):
    return 18 * b * c * w - 4 * b**3 * w + b**2 * c**2 - 4 * c**3 - 27 * w**2


def discriminant_identity_check() -> DiscriminantReport:
    ring = _xring(3, 3)
    xs = ring.gens()
    b = -elementary_symmetric(1, xs)
    c = elementary_symmetric(2, xs)
    w = -elementary_symmetric(3, xs)
    D = discriminant_polynomial(ring, b, c, w)
    root = (xs[0] - xs[1]) * (xs[0] - xs[2]) * (xs[1] - xs[2])
    ident = D == root * root
    ev = lambda pt: D.evaluate([CycRat.from_rational(3, v) for v in pt])  # noqa: E731
    swap = Permutation.from_cycles(3, [(1, 2)])
    rot = Permutation.from_cycles(3, [(1, 2, 3)])
    r = RatFunc.from_poly(root)
    alt = act(MonomialAction.from_permutation(ring, swap), r) == -r
    fix = act(MonomialAction.from_permutation(ring, rot), r) == r
    return DiscriminantReport(ident, ev((0, 1, 2)), ev((0, 0, 1)), alt, fix)


def kernel_budget(n: int, p: int) -> int:
    return factorial(n) * p ** (n - 1)
