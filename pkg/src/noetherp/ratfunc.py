"""Rational functions over Q(zeta_p) kept in factored form.

A :class:`RatFunc` is ``coef * prod(atom**e)`` with ``atom`` a normalised
polynomial (leading coefficient 1, no monomial content, or a single variable)
and ``e`` a nonzero integer.  Products and quotients only touch exponents, so
telescoping products such as ``u_i^-1 u_{i+1}^2 u_{i+2}^-1`` cancel exactly.
Sums pull out the common factors and expand the remaining polynomial parts,
then try to divide the result by the denominator atoms.

Equality is decided exactly: ``f == g`` iff the expanded numerator of ``f - g``
is the zero polynomial.
"""
from __future__ import annotations

import random
import re
from numbers import Rational

from .cyclo import CycRat
from .poly import Poly, PolyRing

JACOBIAN_SEED = 0x5EED
JACOBIAN_RETRIES = 5


class VariableMismatch(ValueError):
    pass


class DenominatorVanishes(ZeroDivisionError):
    pass


class EvaluationSingular(ArithmeticError):
    pass


def _is_var_atom(atom: Poly) -> int | None:
    if len(atom.terms) != 1:
        return None
    (e,) = atom.terms
    if sum(e) == 1:
        return e.index(1)
    return None


def _split(poly: Poly):
    """Split a nonzero polynomial into (coef, {atom: exp})."""
    ring = poly.ring
    content = poly.monomial_content()
    factors: dict = {}
    if any(content):
        poly = poly.shift(content, -1)
        for i, k in enumerate(content):
            if k:
                factors[ring.var(ring.vars[i])] = k
    if poly.is_constant():
        return poly.constant_value(), factors
    _, lc = poly.leading_term()
    if not lc.is_one():
        poly = poly.scale(lc.inverse())
    factors[poly] = factors.get(poly, 0) + 1
    return lc, factors


class RatFunc:
    __slots__ = ("ring", "coef", "factors")

    def __init__(self, ring: PolyRing, coef: CycRat, factors: dict | None = None):
        self.ring = ring
        self.coef = coef
        if coef.is_zero():
            factors = {}
        self.factors = _canon(ring, factors or {})

    # -- constructors -------------------------------------------------
    @classmethod
    def from_poly(cls, poly: Poly) -> "RatFunc":
        if poly.is_zero():
            return cls(poly.ring, CycRat.zero(poly.ring.p))
        coef, factors = _split(poly)
        return cls(poly.ring, coef, factors)

    @classmethod
    def const(cls, ring: PolyRing, c) -> "RatFunc":
        return cls(ring, ring.coeff(c))

    @classmethod
    def var(cls, ring: PolyRing, name: str) -> "RatFunc":
        return cls(ring, CycRat.one(ring.p), {ring.var(name): 1})

    @classmethod
    def sum(cls, items, ring: PolyRing | None = None) -> "RatFunc":
        """Sum of many rational functions using one common-factor extraction."""
        items = [f for f in items if not f.is_zero()]
        if not items:
            if ring is None:
                raise ValueError("empty sum needs a ring")
            return cls(ring, CycRat.zero(ring.p))
        if len(items) == 1:
            return items[0]
        ring = items[0].ring
        for f in items:
            if f.ring != ring:
                raise VariableMismatch("sum of rational functions from different rings")
        common: dict = {}
        for f in items:
            for a in f.factors:
                common.setdefault(a, 0)
        for a in common:
            common[a] = min(f.factors.get(a, 0) for f in items)
        powcache: dict = {}
        total = ring.zero()
        for f in items:
            residual = ring.const(f.coef)
            mono = [0] * ring.nvars
            for a, c in common.items():
                k = f.factors.get(a, 0) - c
                if not k:
                    continue
                vi = _is_var_atom(a)
                if vi is not None:
                    mono[vi] += k
                    continue
                key = (a, k)
                pw = powcache.get(key)
                if pw is None:
                    pw = powcache[key] = a ** k
                residual = residual * pw
            if any(mono):
                residual = _mul_monomial(residual, tuple(mono))
            total = total + residual
        if total.is_zero():
            return cls(ring, CycRat.zero(ring.p))
        # cancel denominator atoms that divide the new numerator
        for a, c in list(common.items()):
            if c >= 0 or _is_var_atom(a) is not None:
                continue
            while c < 0 and len(total.terms) >= len(a.terms):
                q = total.exact_div(a)
                if q is None:
                    break
                total = q
                c += 1
            common[a] = c
        coef, fac = _split(total)
        for a, k in fac.items():
            common[a] = common.get(a, 0) + k
        return cls(ring, coef, common)

    # -- queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return self.coef.is_zero()

    def is_constant(self) -> bool:
        return not self.factors

    def constant_value(self) -> CycRat:
        if self.factors:
            raise ValueError("rational function is not constant")
        return self.coef

    def numerator(self) -> Poly:
        out = self.ring.const(self.coef)
        for a, k in self.factors.items():
            if k > 0:
                out = out * a ** k
        return out

    def denominator(self) -> Poly:
        out = self.ring.one()
        for a, k in self.factors.items():
            if k < 0:
                out = out * a ** (-k)
        return out

    def term_count(self) -> int:
        return sum(len(a.terms) for a in self.factors)

    def variables(self) -> set:
        used = set()
        for a in self.factors:
            used |= a.variables()
        return used

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.ring != self.ring:
                raise VariableMismatch("rational functions from different rings")
            return other
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise VariableMismatch("polynomial from a different ring")
            return RatFunc.from_poly(other)
        if isinstance(other, (int, Rational, CycRat)):
            return RatFunc.const(self.ring, other)
        return NotImplemented

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return RatFunc(self.ring, CycRat.zero(self.ring.p))
        fac = dict(self.factors)
        for a, k in other.factors.items():
            fac[a] = fac.get(a, 0) + k
        return RatFunc(self.ring, self.coef * other.coef, fac)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise DenominatorVanishes("inverse of the zero rational function")
        return RatFunc(self.ring, self.coef.inverse(), {a: -k for a, k in self.factors.items()})

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, e: int):
        if e == 0:
            return RatFunc.const(self.ring, 1)
        if e < 0:
            return self.inverse() ** (-e)
        return RatFunc(self.ring, self.coef ** e, {a: k * e for a, k in self.factors.items()})

    def __neg__(self):
        return RatFunc(self.ring, -self.coef, self.factors)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RatFunc.sum([self, other], self.ring)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RatFunc.sum([self, -other], self.ring)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RatFunc.sum([other, -self], self.ring)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return eq(self, other)

    __hash__ = None

    # -- evaluation -----------------------------------------------------
    def evaluate(self, values) -> CycRat:
        val = self.coef
        for a, k in self.factors.items():
            av = a.evaluate(values)
            if av.is_zero():
                if k < 0:
                    raise EvaluationSingular("denominator vanishes at the point")
                return CycRat.zero(self.ring.p)
            val = val * av ** k
        return val

    # -- text ---------------------------------------------------------
    def to_text(self) -> str:
        """Canonical factored text, e.g. ``-3/2*(x1 + x2)^2*x3^-1``."""
        if self.is_zero():
            return "0"
        parts = []
        for a, k in self.factors.items():
            body = a.to_text() if _is_var_atom(a) is not None else f"({a.to_text()})"
            parts.append(body if k == 1 else f"{body}^{k}")
        parts.sort()
        ct = self.coef.to_text()
        if not parts:
            return ct
        if ct == "1":
            return "*".join(parts)
        if ct == "-1":
            return "-" + "*".join(parts)
        return ct + "*" + "*".join(parts)

    def __repr__(self):
        return f"RatFunc({self.to_text()})"

    __str__ = to_text


def _mul_monomial(poly: Poly, mono: tuple) -> Poly:
    ring = poly.ring
    terms = {}
    for e, c in poly.terms.items():
        ne = ring.reduce(tuple(a + b for a, b in zip(e, mono)))
        old = terms.get(ne)
        terms[ne] = c if old is None else old + c
    return Poly(ring, {e: c for e, c in terms.items() if not c.is_zero()})


def _canon(ring: PolyRing, factors: dict) -> dict:
    fac = {a: k for a, k in factors.items() if k}
    rad = ring.radical
    if rad is None:
        return fac
    root = None
    for a in fac:
        if _is_var_atom(a) == rad.var:
            root = a
            break
    if root is None:
        return fac
    k = fac[root]
    q, r = divmod(k, rad.degree)
    if q == 0:
        return fac
    if r:
        fac[root] = r
    else:
        del fac[root]
    for i, m in enumerate(rad.radicand):
        if m:
            v = ring.var(ring.vars[i])
            nk = fac.get(v, 0) + q * m
            if nk:
                fac[v] = nk
            else:
                fac.pop(v, None)
    return fac


def eq(f: RatFunc, g: RatFunc) -> bool:
    """Exact equality of rational functions (same variable list required)."""
    if f.ring != g.ring:
        raise VariableMismatch("eq: rational functions from different rings")
    if f.factors == g.factors:
        return f.coef == g.coef
    return RatFunc.sum([f, -g], f.ring).is_zero()


# ---------------------------------------------------------------------------
# Monomial actions


class MonomialAction:
    """Field automorphism ``x_i -> scale[i] * x_{perm[i]}`` of a ring's fraction field."""

    __slots__ = ("ring", "perm", "scale")

    def __init__(self, ring: PolyRing, perm, scale=None):
        perm = tuple(perm)
        n = ring.nvars
        if sorted(perm) != list(range(n)):
            raise ValueError(f"action permutation {perm} is not a bijection of {n} variables")
        if scale is None:
            scale = (CycRat.one(ring.p),) * n
        scale = tuple(ring.coeff(s) for s in scale)
        if len(scale) != n:
            raise VariableMismatch("scale vector length differs from variable count")
        self.ring = ring
        self.perm = perm
        self.scale = scale
        rad = ring.radical
        if rad is not None:
            # must preserve R^d = m
            if perm[rad.var] != rad.var:
                raise ValueError("action must fix the radical variable")
            m = ring.zero().monomial(rad.radicand)
            img = m.apply_monomial(perm, scale)
            if img != m.scale(scale[rad.var] ** rad.degree):
                raise ValueError("action does not preserve the radical relation")

    @classmethod
    def identity(cls, ring: PolyRing) -> "MonomialAction":
        return cls(ring, range(ring.nvars))

    @classmethod
    def from_permutation(cls, ring: PolyRing, perm, variables=None) -> "MonomialAction":
        """Let a point permutation act on ``variables`` (default: the first n ring vars)."""
        images = perm.images if hasattr(perm, "images") else tuple(perm)
        if variables is None:
            variables = ring.vars[: len(images)]
        idx = [ring.index(v) for v in variables]
        target = list(range(ring.nvars))
        for point, img in enumerate(images):
            target[idx[point]] = idx[img - 1]
        return cls(ring, target)

    @classmethod
    def scaling(cls, ring: PolyRing, factors: dict) -> "MonomialAction":
        scale = [CycRat.one(ring.p)] * ring.nvars
        for name, s in factors.items():
            scale[ring.index(name)] = ring.coeff(s)
        return cls(ring, range(ring.nvars), scale)

    @classmethod
    def renaming(cls, ring: PolyRing, mapping: dict) -> "MonomialAction":
        target = list(range(ring.nvars))
        for a, b in mapping.items():
            target[ring.index(a)] = ring.index(b)
        return cls(ring, target)

    def compose(self, other: "MonomialAction") -> "MonomialAction":
        """``self o other``: apply ``other`` first."""
        if other.ring != self.ring:
            raise VariableMismatch("composing actions on different rings")
        perm = tuple(self.perm[other.perm[i]] for i in range(self.ring.nvars))
        scale = tuple(other.scale[i] * self.scale[other.perm[i]] for i in range(self.ring.nvars))
        return MonomialAction(self.ring, perm, scale)

    __matmul__ = compose

    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.ring.nvars)) and all(s.is_one() for s in self.scale)

    def __eq__(self, other):
        return (isinstance(other, MonomialAction) and self.ring == other.ring
                and self.perm == other.perm and self.scale == other.scale)

    def __hash__(self):
        return hash((self.perm, self.scale))

    def __repr__(self):
        moves = []
        for i, (j, s) in enumerate(zip(self.perm, self.scale)):
            if i != j or not s.is_one():
                tgt = self.ring.vars[j]
                moves.append(f"{self.ring.vars[i]}->{tgt}" if s.is_one() else f"{self.ring.vars[i]}->{s}*{tgt}")
        return f"MonomialAction({', '.join(moves) or 'id'})"


def act(a: MonomialAction, f) -> RatFunc:
    """Image of ``f`` under the monomial action ``a``."""
    if isinstance(f, Poly):
        f = RatFunc.from_poly(f)
    if f.ring != a.ring:
        raise VariableMismatch("action and rational function use different rings")
    out = RatFunc.const(f.ring, f.coef)
    for atom, k in f.factors.items():
        img = RatFunc.from_poly(atom.apply_monomial(a.perm, a.scale))
        out = out * img ** k
    return out


# ---------------------------------------------------------------------------
# Substitution, differentiation, Jacobian rank


def substitute(f, bindings: dict, target: PolyRing) -> RatFunc:
    """Replace each variable of ``f`` by the bound rational function in ``target``."""
    if isinstance(f, Poly):
        f = RatFunc.from_poly(f)
    ring = f.ring
    vals = {}
    for name, v in bindings.items():
        if isinstance(v, Poly):
            v = RatFunc.from_poly(v)
        elif not isinstance(v, RatFunc):
            v = RatFunc.const(target, v)
        if v.ring != target:
            raise VariableMismatch(f"binding for {name!r} lives in a different ring")
        vals[name] = v
    out = RatFunc.const(target, f.coef)
    for atom, k in f.factors.items():
        terms = []
        for e, c in atom.terms.items():
            t = RatFunc.const(target, c)
            for i, m in enumerate(e):
                if m:
                    name = ring.vars[i]
                    if name not in vals:
                        raise VariableMismatch(f"variable {name!r} is not bound")
                    t = t * vals[name] ** m
            terms.append(t)
        img = RatFunc.sum(terms, target)
        if img.is_zero():
            if k < 0:
                raise DenominatorVanishes(f"factor {atom.to_text()} maps to zero")
            return RatFunc.const(target, 0)
        out = out * img ** k
    return out


def derivative(f, var: str) -> RatFunc:
    """Partial derivative by the quotient rule, kept factored."""
    if isinstance(f, Poly):
        f = RatFunc.from_poly(f)
    ring = f.ring
    if ring.radical is not None:
        raise ValueError("derivative is not defined on a radical ring")
    i = ring.index(var)
    pieces = []
    for atom, k in f.factors.items():
        da = atom.derivative(i)
        if da.is_zero():
            continue
        pieces.append(f * RatFunc.from_poly(da.scale(k)) * RatFunc(ring, CycRat.one(ring.p), {atom: -1}))
    return RatFunc.sum(pieces, ring)


def _gradient_at(f: RatFunc, values, var_idx) -> list:
    value = f.coef
    logs = [CycRat.zero(f.ring.p)] * len(var_idx)
    for atom, k in f.factors.items():
        av = atom.evaluate(values)
        if av.is_zero():
            raise EvaluationSingular(f"factor {atom.to_text()} vanishes at the point")
        value = value * av ** k
        inv = av.inverse() * k
        for j, vi in enumerate(var_idx):
            d = atom.derivative(vi)
            if d.terms:
                logs[j] = logs[j] + d.evaluate(values) * inv
    return [value * lg for lg in logs]


def matrix_rank(rows) -> int:
    """Rank over Q(zeta_p) by fraction-free (Bareiss) elimination."""
    m = [list(r) for r in rows]
    if not m or not m[0]:
        return 0
    nrows, ncols = len(m), len(m[0])
    one = m[0][0] * 0 + 1
    prev = one
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if not m[r][col].is_zero()), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][col]
        for r in range(rank + 1, nrows):
            lead = m[r][col]
            for c in range(col, ncols):
                m[r][c] = (pv * m[r][c] - lead * m[rank][c]) / prev
        prev = pv
        rank += 1
        if rank == nrows:
            break
    return rank


def jacobian_rank_at(fs, point=None, variables=None, seed: int = JACOBIAN_SEED,
                     retries: int = JACOBIAN_RETRIES) -> int:
    """Rank of the exact Jacobian of ``fs`` at ``point``.

    If the point is singular (or omitted) up to ``retries`` deterministic random
    integer points are tried before giving up.
    """
    fs = [RatFunc.from_poly(f) if isinstance(f, Poly) else f for f in fs]
    if not fs:
        return 0
    ring = fs[0].ring
    if ring.radical is not None:
        raise ValueError("jacobian_rank_at is not defined on a radical ring")
    names = list(variables) if variables is not None else list(ring.vars)
    var_idx = [ring.index(v) for v in names]
    rng = random.Random(seed)
    candidates = [] if point is None else [list(point)]
    for _ in range(retries):
        candidates.append([rng.randint(-97, 97) for _ in ring.vars])
    for pt in candidates:
        vals = [v if isinstance(v, CycRat) else CycRat.from_rational(ring.p, v) for v in pt]
        try:
            rows = [_gradient_at(f, vals, var_idx) for f in fs]
        except EvaluationSingular:
            continue
        return matrix_rank(rows)
    raise EvaluationSingular(f"Jacobian singular at the given point and {retries} retries")


# ---------------------------------------------------------------------------
# Text parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()\[\]]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse {text[pos:pos + 20]!r}")
        num, ident, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif ident is not None:
            out.append(("id", ident))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, ring: PolyRing, text: str, factored: bool = True):
        self.ring = ring
        self.factored = factored
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, op=None):
        tok = self.peek()
        if op is not None and tok != ("op", op):
            raise ValueError(f"expected {op!r}, got {tok[1]!r}")
        self.i += 1
        return tok

    @staticmethod
    def _promote(a, b):
        if isinstance(a, RatFunc) or isinstance(b, RatFunc):
            if isinstance(a, Poly):
                a = RatFunc.from_poly(a)
            if isinstance(b, Poly):
                b = RatFunc.from_poly(b)
        return a, b

    def expr(self):
        val = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            val, rhs = self._promote(val, rhs)
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                val, rhs = self._promote(val, rhs)
                val = val * rhs
            elif isinstance(rhs, Poly) and rhs.is_constant() and isinstance(val, Poly):
                val = val / rhs.constant_value()
            else:
                if isinstance(val, Poly):
                    val = RatFunc.from_poly(val)
                val = val / rhs
        return val

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            kind, e = self.take()
            if kind != "num":
                raise ValueError("exponent must be an integer literal")
            e *= sign
            if e < 0 and isinstance(base, Poly):
                base = RatFunc.from_poly(base)
            return base ** e
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.ring.const(val)
        if kind == "id":
            if val == "zeta":
                return self.ring.zeta(1)
            return self.ring.var(val)
        if val in ("(", "["):
            inner = self.expr()
            self.take(")" if val == "(" else "]")
            if self.factored and isinstance(inner, Poly) and len(inner.terms) > 1 and not inner.is_constant():
                # keep parenthesised groups as factors so canonical text round-trips
                return RatFunc.from_poly(inner)
            return inner
        raise ValueError(f"unexpected token {val!r}")


def parse(text: str, ring: PolyRing) -> RatFunc:
    """Parse an arithmetic expression (the canonical text forms included)."""
    p = _Parser(ring, text)
    val = p.expr()
    if p.i != len(p.toks):
        raise ValueError(f"trailing input in {text!r}")
    return val if isinstance(val, RatFunc) else RatFunc.from_poly(val)


def parse_poly(text: str, ring: PolyRing) -> Poly:
    p = _Parser(ring, text, factored=False)
    val = p.expr()
    if p.i != len(p.toks):
        raise ValueError(f"trailing input in {text!r}")
    if isinstance(val, RatFunc):
        if any(k < 0 for k in val.factors.values()):
            raise ValueError(f"{text!r} is not a polynomial")
        return val.numerator()
    return val
