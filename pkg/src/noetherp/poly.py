"""Sparse multivariate polynomials over Q(zeta_p).

A :class:`PolyRing` fixes the variable order, the conductor ``p`` and an
optional radical relation ``R^d = m`` (``R`` a ring variable, ``m`` a monomial in
the other variables).  Polynomials in a radical ring are kept reduced, i.e. the
exponent of ``R`` stays below ``d``; since ``R^d - m`` is irreducible the
quotient is a domain and the reduced form decides equality.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from numbers import Rational

from .cyclo import CycRat


class SizeLimitExceeded(RuntimeError):
    """Raised when an intermediate polynomial grows past the ring's term cap."""


DEFAULT_TERM_CAP = 10**6
_term_cap = [DEFAULT_TERM_CAP]


def set_term_cap(cap: int):
    """Process-wide cap for rings created without an explicit one."""
    if cap <= 0:
        raise ValueError("term cap must be positive")
    _term_cap[0] = cap


def current_term_cap() -> int:
    return _term_cap[0]


@dataclass(frozen=True)
class Radical:
    var: int
    degree: int
    radicand: tuple  # exponent vector of the monomial m, zero at ``var``


@dataclass(frozen=True)
class PolyRing:
    vars: tuple
    p: int = 2
    radical: Radical | None = None
    term_cap: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(set(self.vars)) != len(self.vars):
            raise ValueError(f"duplicate variable names in {self.vars}")
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.vars)})

    @classmethod
    def with_radical(cls, vars, p, root: str, degree: int, radicand: dict, term_cap=None):
        """Ring where ``root**degree == prod(v**e for v, e in radicand.items())``."""
        vars = tuple(vars)
        idx = vars.index(root)
        exps = [0] * len(vars)
        for v, e in radicand.items():
            exps[vars.index(v)] = e
        if exps[idx]:
            raise ValueError("radicand may not involve the root variable")
        return cls(vars, p, Radical(idx, degree, tuple(exps)), term_cap)

    @property
    def cap(self) -> int:
        return self.term_cap if self.term_cap is not None else _term_cap[0]

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r} in ring {self.vars}") from None

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c) -> "Poly":
        c = self.coeff(c)
        return Poly(self, {(0,) * self.nvars: c} if c else {})

    def coeff(self, c) -> CycRat:
        if isinstance(c, CycRat):
            if c.p != self.p:
                raise ValueError(f"coefficient conductor {c.p} != ring conductor {self.p}")
            return c
        return CycRat.from_rational(self.p, c)

    def zeta(self, k: int = 1) -> "Poly":
        return self.const(CycRat.zeta(self.p, k))

    def var(self, name: str) -> "Poly":
        exps = [0] * self.nvars
        exps[self.index(name)] = 1
        return Poly(self, {self.reduce(tuple(exps)): CycRat.one(self.p)})

    def gens(self) -> list:
        return [self.var(v) for v in self.vars]

    def reduce(self, exps: tuple) -> tuple:
        rad = self.radical
        if rad is None or exps[rad.var] < rad.degree:
            return exps
        q, r = divmod(exps[rad.var], rad.degree)
        out = [e + q * m for e, m in zip(exps, rad.radicand)]
        out[rad.var] = r
        return tuple(out)


def grlex_key(exps: tuple):
    return (sum(exps), exps)


def _mono_text(ring: PolyRing, exps: tuple) -> str:
    parts = []
    for name, e in zip(ring.vars, exps):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


class Poly:
    """Immutable sparse polynomial: mapping exponent tuple -> nonzero CycRat."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # -- basic queries ------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> CycRat:
        if not self.terms:
            return CycRat.zero(self.ring.p)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def __len__(self):
        return len(self.terms)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var: int) -> int:
        return max((e[var] for e in self.terms), default=-1)

    def variables(self) -> set:
        used = set()
        for e in self.terms:
            used.update(i for i, k in enumerate(e) if k)
        return used

    def leading_term(self):
        exps = max(self.terms, key=grlex_key)
        return exps, self.terms[exps]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def monomial_content(self) -> tuple:
        it = iter(self.terms)
        lo = list(next(it))
        for e in it:
            lo = [min(a, b) for a, b in zip(lo, e)]
        return tuple(lo)

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError("polynomials from different rings")
            return other
        if isinstance(other, (int, Rational, CycRat)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            big, small = other, self
        else:
            big, small = self, other
        terms = dict(big.terms)
        for e, c in small.terms.items():
            old = terms.get(e)
            if old is None:
                terms[e] = c
            else:
                s = old + c
                if s.is_zero():
                    del terms[e]
                else:
                    terms[e] = s
        return Poly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Poly":
        c = self.ring.coeff(c)
        if c.is_zero():
            return self.ring.zero()
        if c.is_one():
            return self
        return Poly(self.ring, {e: v * c for e, v in self.terms.items()})

    def _mul(self, other: "Poly", reduce: bool) -> "Poly":
        ring = self.ring
        red = ring.reduce if (reduce and ring.radical is not None) else None
        terms: dict = {}
        get = terms.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if red is not None:
                    e = red(e)
                c = c1 * c2
                old = get(e)
                terms[e] = c if old is None else old + c
            if len(terms) > ring.cap:
                raise SizeLimitExceeded(f"product exceeds {ring.cap} terms")
        return Poly(ring, {e: c for e, c in terms.items() if not c.is_zero()})

    def __mul__(self, other):
        if isinstance(other, (int, Rational, CycRat)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_constant():
            return self.scale(other.constant_value())
        if self.is_constant():
            return other.scale(self.constant_value())
        return self._mul(other, reduce=True)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, Poly) and other.is_constant():
            other = other.constant_value()
        if isinstance(other, (int, Rational, CycRat)):
            return self.scale(1 / self.ring.coeff(other))
        return NotImplemented

    def exact_div(self, other: "Poly") -> "Poly | None":
        """Quotient ``self / other`` if it is a polynomial, else ``None``.

        Division is carried out in the free polynomial ring; a quotient found
        there is also a quotient in a radical ring.
        """
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return self
        lead_e, lead_c = other.leading_term()
        inv = lead_c.inverse()
        rem = dict(self.terms)
        quot: dict = {}
        steps = 0
        while rem:
            e = max(rem, key=grlex_key)
            c = rem[e]
            if any(a < b for a, b in zip(e, lead_e)):
                return None
            qe = tuple(a - b for a, b in zip(e, lead_e))
            qc = c * inv
            quot[qe] = qc
            for oe, oc in other.terms.items():
                te = tuple(a + b for a, b in zip(qe, oe))
                v = rem.get(te)
                d = oc * qc
                if v is None:
                    rem[te] = -d
                else:
                    v = v - d
                    if v.is_zero():
                        del rem[te]
                    else:
                        rem[te] = v
            steps += 1
            if steps > self.ring.cap:
                raise SizeLimitExceeded("exact division did not terminate within term cap")
        return Poly(self.ring, quot)

    def derivative(self, var: int) -> "Poly":
        terms = {}
        for e, c in self.terms.items():
            k = e[var]
            if k:
                ne = list(e)
                ne[var] -= 1
                terms[tuple(ne)] = c * k
        return Poly(self.ring, terms)

    def evaluate(self, values) -> CycRat:
        """Evaluate at a point given as one CycRat (or rational) per ring variable."""
        p = self.ring.p
        vals = [v if isinstance(v, CycRat) else CycRat.from_rational(p, v) for v in values]
        cache: dict = {}
        total = CycRat.zero(p)
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    pw = cache.get(key)
                    if pw is None:
                        pw = cache[key] = vals[i] ** k
                    term = term * pw
            total = total + term
        return total

    def apply_monomial(self, perm: tuple, scale: tuple) -> "Poly":
        """Image under x_i -> scale[i] * x_{perm[i]}."""
        ring = self.ring
        n = ring.nvars
        terms: dict = {}
        spow: dict = {}
        for e, c in self.terms.items():
            ne = [0] * n
            for i, k in enumerate(e):
                if k:
                    ne[perm[i]] += k
                    s = scale[i]
                    if not s.is_one():
                        key = (i, k)
                        f = spow.get(key)
                        if f is None:
                            f = spow[key] = s ** k
                        c = c * f
            ne = ring.reduce(tuple(ne))
            old = terms.get(ne)
            terms[ne] = c if old is None else old + c
        return Poly(ring, {e: c for e, c in terms.items() if not c.is_zero()})

    def coefficients_in(self, var: int) -> dict:
        """Split as sum_k coeff_k * x_var^k; returns {k: coeff_k}."""
        out: dict = {}
        for e, c in self.terms.items():
            k = e[var]
            ne = list(e)
            ne[var] = 0
            out.setdefault(k, {})[tuple(ne)] = c
        return {k: Poly(self.ring, t) for k, t in out.items()}

    def monomial(self, exps: tuple) -> "Poly":
        return Poly(self.ring, {self.ring.reduce(tuple(exps)): CycRat.one(self.ring.p)})

    def shift(self, exps: tuple, sign: int = 1) -> "Poly":
        """Multiply (sign=1) or divide (sign=-1) by the monomial with exponents ``exps``."""
        return Poly(self.ring, {tuple(a + sign * b for a, b in zip(e, exps)): c
                                for e, c in self.terms.items()})

    # -- equality / text ------------------------------------------------
    def _key(self):
        return frozenset(self.terms.items())

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Rational, CycRat)):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def to_text(self) -> str:
        """Canonical text: graded-lex descending terms, explicit zeta powers."""
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            mono = _mono_text(self.ring, e)
            ct = c.to_text()
            neg = ct.startswith("-")
            mag = ct[1:] if neg else ct
            if not mono:
                body = mag
            elif mag == "1":
                body = mono
            else:
                body = f"{mag}*{mono}"
            pieces.append(("-" if neg else "+", body))
        text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"Poly({self.to_text()})"

    __str__ = to_text


def elementary_symmetric(k: int, xs):
    """k-th elementary symmetric polynomial of the ring elements ``xs``."""
    xs = list(xs)
    if not 1 <= k <= len(xs):
        raise ValueError(f"elementary_symmetric: need 1 <= k <= {len(xs)}, got {k}")
    zero = xs[0] * 0
    e = [zero + 1] + [zero] * k
    for x in xs:
        for j in range(k, 0, -1):
            e[j] = e[j] + e[j - 1] * x
    return e[k]
