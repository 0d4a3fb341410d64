"""Sylow and orientation subgroups of symmetric groups.

Points are 1-based.  Composition is right-to-left: ``(f * g)(x) = f(g(x))``.

The generators ``sigma(n, p, (i, s))`` cyclically move ``p`` consecutive blocks
of ``p**i`` consecutive points, the first block starting at ``(s-1)*p**(i+1)+1``.
They generate a p-Sylow subgroup G(n, p) of the symmetric group; the
orientation subgroup H(n, p) is the kernel of the "total rotation" map to Z/p.
"""
from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from math import factorial

from .cyclo import is_prime

DEFAULT_CAP = 2**20


class IndexOutOfRange(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class NotAMember(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Permutation:
    images: tuple

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(1, n + 1)):
            raise ValueError(f"{self.images} is not a permutation of 1..{n}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, n: int, cycles) -> "Permutation":
        img = list(range(1, n + 1))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a - 1] = b
        return cls(tuple(img))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        img = self.images
        return Permutation(tuple(img[y - 1] for y in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, y in enumerate(self.images, 1):
            inv[y - 1] = i
        return Permutation(tuple(inv))

    def __pow__(self, k: int) -> "Permutation":
        if k < 0:
            return self.inverse() ** (-k)
        out = Permutation.identity(self.n)
        for _ in range(k):
            out = out * self
        return out

    def is_identity(self) -> bool:
        return all(y == i for i, y in enumerate(self.images, 1))

    def support(self) -> list:
        return [i for i, y in enumerate(self.images, 1) if y != i]

    def order(self) -> int:
        k, x = 1, self
        while not x.is_identity():
            x = x * self
            k += 1
        return k

    def cycles(self) -> list:
        seen, out = set(), []
        for start in range(1, self.n + 1):
            if start in seen or self(start) == start:
                continue
            cyc, x = [], start
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = self(x)
            out.append(tuple(cyc))
        return out

    def cycle_text(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)

    def __repr__(self):
        return f"Permutation{self.cycle_text()}"


@dataclass(frozen=True, order=True)
class GeneratorIndex:
    i: int
    s: int

    @property
    def label(self) -> str:
        return f"sigma_{self.i},{self.s}"


@dataclass
class GroupSpec:
    n: int
    p: int
    family: str
    generators: list = field(default_factory=list)  # list of (label, Permutation)

    FAMILIES = ("sylow", "orientation", "kernel-sylow-ambient")

    def __post_init__(self):
        if self.family not in self.FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")

    @property
    def degree(self) -> int:
        """Number of points acted on (n*p for the kernel family)."""
        return self.n * self.p if self.family == "kernel-sylow-ambient" else self.n

    def perms(self) -> list:
        return [g for _, g in self.generators]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "family": self.family,
            "generators": [{"label": lab, "images": list(g.images)} for lab, g in self.generators],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "GroupSpec":
        gens = [(g["label"], Permutation(tuple(g["images"]))) for g in d["generators"]]
        return cls(d["n"], d["p"], d["family"], gens)


def _check_prime(p: int):
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")


def floor_log(n: int, p: int) -> int:
    k, q = 0, p
    while q <= n:
        k += 1
        q *= p
    return k


def generator_indices(n: int, p: int) -> list:
    """All (i, s) with 1 <= s <= n // p**(i+1), 0 <= i <= floor(log_p n) - 1."""
    _check_prime(p)
    out = []
    for i in range(floor_log(n, p)):
        for s in range(1, n // p ** (i + 1) + 1):
            out.append(GeneratorIndex(i, s))
    return out


def order_exponent(n: int, p: int) -> int:
    """Exponent of p in n! (Legendre)."""
    total, q = 0, p
    while q <= n:
        total += n // q
        q *= p
    return total


def sigma(n: int, p: int, idx) -> Permutation:
    i, s = (idx.i, idx.s) if isinstance(idx, GeneratorIndex) else idx
    if i < 0 or not 1 <= s <= n // p ** (i + 1) or i > floor_log(n, p) - 1:
        raise IndexOutOfRange(f"sigma index (i={i}, s={s}) out of range for n={n}, p={p}")
    img = list(range(1, n + 1))
    base, step = (s - 1) * p ** (i + 1), p**i
    for j in range(1, step + 1):
        for k in range(p):
            src = base + k * step + j
            dst = base + ((k + 1) % p) * step + j
            img[src - 1] = dst
    return Permutation(tuple(img))


def sylow_group(n: int, p: int) -> GroupSpec:
    gens = [(ix.label, sigma(n, p, ix)) for ix in generator_indices(n, p)]
    return GroupSpec(n, p, "sylow", gens)


def orientation_group(n: int, p: int) -> GroupSpec:
    """H(n, p), generated by sigma_{0,s} sigma_{0,s+1}^-1 and all sigma_{i,s}, i >= 1."""
    gens = []
    m = n // p
    for s in range(1, m):
        g = sigma(n, p, (0, s)) * sigma(n, p, (0, s + 1)).inverse()
        gens.append((f"sigma_0,{s}*sigma_0,{s + 1}^-1", g))
    for ix in generator_indices(n, p):
        if ix.i >= 1:
            gens.append((ix.label, sigma(n, p, ix)))
    return GroupSpec(n, p, "orientation", gens)


def orientation_group_full(n: int, p: int) -> GroupSpec:
    """The redundant generating family sigma_{0,s} sigma_{0,s'}^-1 over all pairs."""
    gens = []
    m = n // p
    for s in range(1, m + 1):
        for t in range(1, m + 1):
            if s != t:
                g = sigma(n, p, (0, s)) * sigma(n, p, (0, t)).inverse()
                gens.append((f"sigma_0,{s}*sigma_0,{t}^-1", g))
    for ix in generator_indices(n, p):
        if ix.i >= 1:
            gens.append((ix.label, sigma(n, p, ix)))
    return GroupSpec(n, p, "orientation", gens)


def block_rotation(n: int, p: int, block: int) -> Permutation:
    """The p-cycle on points (block-1)*p+1 .. block*p (sigma_{0,block} for any n >= block*p)."""
    img = list(range(1, n + 1))
    base = (block - 1) * p
    for k in range(p):
        img[base + k] = base + (k + 1) % p + 1
    return Permutation(tuple(img))


def kernel_group(n: int, p: int) -> GroupSpec:
    """K(n, p) = Ker(phi) in S_n wr Z/p, as permutations of n*p points.

    Point (i, c) of block i, offset c in Z/p is labelled (i-1)*p + c + 1.
    """
    _check_prime(p)
    N = n * p
    gens = []
    for i in range(1, n):
        img = list(range(1, N + 1))
        for c in range(p):
            a, b = (i - 1) * p + c, i * p + c
            img[a], img[b] = b + 1, a + 1
        gens.append((f"swap_blocks_{i},{i + 1}", Permutation(tuple(img))))
    for s in range(1, n):
        g = block_rotation(N, p, s) * block_rotation(N, p, s + 1).inverse()
        gens.append((f"rot_{s}*rot_{s + 1}^-1", g))
    return GroupSpec(n, p, "kernel-sylow-ambient", gens)


def enumerate_group(g, cap: int = DEFAULT_CAP) -> list:
    """All elements of the group generated by ``g`` (GroupSpec or list of perms), BFS order."""
    if isinstance(g, GroupSpec):
        gens, degree = g.perms(), g.degree
    else:
        gens = list(g)
        degree = gens[0].n if gens else 0
    ident = Permutation.identity(degree)
    seen = {ident}
    order = [ident]
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = s * x
            if y not in seen:
                seen.add(y)
                order.append(y)
                if len(order) > cap:
                    raise BudgetExceeded(f"group has more than {cap} elements")
                queue.append(y)
    return order


def product_of(g: GroupSpec, exponents: dict) -> Permutation:
    """Ordered product of sigma_{i,s}^r(i,s): descending i, then ascending s."""
    out = Permutation.identity(g.n)
    for ix in sorted(exponents, key=lambda t: (-t.i, t.s)):
        r = exponents[ix] % g.p
        if r:
            out = out * sigma(g.n, g.p, ix) ** r
    return out


def all_exponent_vectors(n: int, p: int):
    idx = generator_indices(n, p)
    for rs in itertools.product(range(p), repeat=len(idx)):
        yield dict(zip(idx, rs))


def normal_form_table(n: int, p: int) -> dict:
    table = {}
    g = sylow_group(n, p)
    for vec in all_exponent_vectors(n, p):
        table.setdefault(product_of(g, vec), vec)
    return table


def normal_form(g: GroupSpec, x: Permutation) -> dict:
    """Unique exponent vector {GeneratorIndex: r} whose ordered product is x."""
    if g.family != "sylow":
        raise ValueError("normal_form needs the sylow family")
    table = _cached_table(g.n, g.p)
    try:
        return dict(table[x])
    except KeyError:
        raise NotAMember(f"{x!r} is not in G({g.n},{g.p})") from None


_TABLES: dict = {}


def _cached_table(n, p):
    key = (n, p)
    if key not in _TABLES:
        _TABLES[key] = normal_form_table(n, p)
    return _TABLES[key]


def is_member(g: GroupSpec, x: Permutation, cap: int = DEFAULT_CAP) -> bool:
    """Membership by enumeration; desk-scale groups only."""
    return x in set(enumerate_group(g, cap))


# ---------------------------------------------------------------------------
# the rotation homomorphism h~ : G(n, p) -> Z/p


def block_rotation_total(x: Permutation, p: int) -> int:
    """Sum over the first n//p blocks of the rotation offset x applies, mod p.

    Every element of G(n, p) maps each block of p consecutive points onto a block
    as a rotation; h~ adds up these rotations.
    """
    total = 0
    for b in range(x.n // p):
        base = b * p
        tgt = x(base + 1) - 1
        tb = tgt // p
        shift = (tgt - tb * p) % p
        for k in range(p):
            if x(base + k + 1) - 1 != tb * p + (k + shift) % p:
                raise NotAMember(f"{x!r} does not act on blocks by rotations")
        total += shift
    return total % p


# ---------------------------------------------------------------------------
# wreath products


@dataclass(frozen=True)
class WreathElement:
    """(a_1..a_n; tau) in S_n wr Z/p.

    Product: (a; tau)(b; s) = (a + tau.b; tau s) with (tau.b)_{tau(i)} = b_i.
    """

    twists: tuple
    perm: Permutation
    p: int

    def __mul__(self, other: "WreathElement") -> "WreathElement":
        n = self.perm.n
        moved = [0] * n
        for i in range(1, n + 1):
            moved[self.perm(i) - 1] = other.twists[i - 1]
        tw = tuple((a + b) % self.p for a, b in zip(self.twists, moved))
        return WreathElement(tw, self.perm * other.perm, self.p)

    def to_permutation(self) -> Permutation:
        """Action on n*p points: (i, c) -> (tau(i), c + a_{tau(i)})."""
        n, p = self.perm.n, self.p
        img = [0] * (n * p)
        for i in range(1, n + 1):
            j = self.perm(i)
            for c in range(p):
                img[(i - 1) * p + c] = (j - 1) * p + (c + self.twists[j - 1]) % p + 1
        return Permutation(tuple(img))

    @classmethod
    def from_permutation(cls, x: Permutation, p: int) -> "WreathElement":
        if x.n % p:
            raise ValueError("degree is not a multiple of p")
        n = x.n // p
        tau = [0] * n
        tw = [0] * n
        for i in range(1, n + 1):
            tgt = x((i - 1) * p + 1) - 1
            j = tgt // p + 1
            tau[i - 1] = j
            tw[j - 1] = tgt % p
        w = cls(tuple(tw), Permutation(tuple(tau)), p)
        if w.to_permutation() != x:
            raise NotAMember(f"{x!r} does not preserve the block structure")
        return w


def phi(w: WreathElement, p: int | None = None) -> int:
    """Coordinate sum of the twists, mod p."""
    p = w.p if p is None else p
    return sum(w.twists) % p


def kernel_contains(w: WreathElement, p: int | None = None) -> bool:
    return phi(w, p) == 0


def wreath_group_elements(n: int, p: int) -> list:
    out = []
    for tau in itertools.permutations(range(1, n + 1)):
        for tw in itertools.product(range(p), repeat=n):
            out.append(WreathElement(tw, Permutation(tau), p))
    return out


# ---------------------------------------------------------------------------
# checks


def _block_tuple(x: Permutation, p: int, m: int) -> tuple:
    """Split an element preserving the p blocks of size p^(m-1) into block-local perms."""
    size = p ** (m - 1)
    parts = []
    for b in range(p):
        base = b * size
        loc = []
        for k in range(1, size + 1):
            y = x(base + k) - base
            if not 1 <= y <= size:
                raise ValueError("element does not preserve the blocks")
            loc.append(y)
        parts.append(Permutation(tuple(loc)))
    return tuple(parts)


def wreath_conjugation_check(p: int, m: int) -> bool:
    """sigma_{m-1,1} (a_1..a_p) sigma_{m-1,1}^-1 == (a_p, a_1, .., a_{p-1}) on all of (G_{p^(m-1)})^p."""
    _check_prime(p)
    if m <= 1:
        return True
    n = p**m
    top = sigma(n, p, (m - 1, 1))
    gens = [sigma(n, p, (m - k, s)) for k in range(2, m + 1) for s in range(1, p ** (k - 1) + 1)]
    top_inv = top.inverse()
    for x in enumerate_group(gens):
        before = _block_tuple(x, p, m)
        after = _block_tuple(top * x * top_inv, p, m)
        if after != before[-1:] + before[:-1]:
            return False
    return True


def sylow_in_kernel_check(n: int, p: int) -> dict:
    """Orders and an explicit embedding of H(np, p) into K(n, p)."""
    _check_prime(p)
    k_order = factorial(n) * p ** (n - 1)
    nu_k = order_exponent(n, p) + (n - 1)
    h = orientation_group(n * p, p)
    h_exp = order_exponent(n * p, p) - 1
    report = {
        "n": n,
        "p": p,
        "kernel_order": k_order,
        "kernel_p_exponent": nu_k,
        "orientation_exponent": h_exp,
        "p_part_matches": nu_k == h_exp,
    }
    embedding = []
    for label, g in h.generators:
        w = WreathElement.from_permutation(g, p)
        embedding.append({"label": label, "twists": list(w.twists),
                          "perm": list(w.perm.images), "phi": phi(w)})
    report["embedding"] = embedding
    report["embedding_in_kernel"] = all(e["phi"] == 0 for e in embedding)
    if k_order <= 10**5:
        k_elems = set(enumerate_group(kernel_group(n, p)))
        h_elems = enumerate_group(h)
        report["kernel_enumerated"] = len(k_elems)
        report["orientation_enumerated"] = len(h_elems)
        report["orientation_subset"] = all(x in k_elems for x in h_elems)
        report["orientation_order_matches"] = len(h_elems) == p**h_exp
    report["pass"] = (report["p_part_matches"] and report["embedding_in_kernel"]
                      and report.get("orientation_subset", True)
                      and report.get("kernel_enumerated", k_order) == k_order
                      and report.get("orientation_order_matches", True))
    return report
