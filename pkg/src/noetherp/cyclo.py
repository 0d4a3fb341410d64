"""Exact arithmetic in the cyclotomic field Q(zeta_p).

Elements are stored in the power basis 1, zeta, ..., zeta^(p-2) with a common
positive integer denominator.  Reduction uses zeta^(p-1) = -(1 + ... + zeta^(p-2)).
For p = 2 the field is Q and zeta = -1.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class CycRat:
    """An element sum_k c_k zeta_p^k of Q(zeta_p), exact."""

    __slots__ = ("p", "num", "den", "_hash")

    def __init__(self, p: int, num, den: int = 1):
        # Callers passing raw data must supply len(num) == p - 1.
        self.p = p
        if den < 0:
            num = [-c for c in num]
            den = -den
        g = den
        for c in num:
            if g == 1:
                break
            g = gcd(g, c)
        if g > 1:
            num = tuple(c // g for c in num)
            den //= g
        else:
            num = tuple(num)
        self.num = num
        self.den = den
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def from_rational(cls, p: int, q) -> "CycRat":
        q = Fraction(q)
        num = [0] * (p - 1)
        num[0] = q.numerator
        return cls(p, num, q.denominator)

    @classmethod
    def zero(cls, p: int) -> "CycRat":
        return cls(p, (0,) * (p - 1), 1)

    @classmethod
    def one(cls, p: int) -> "CycRat":
        return cls.from_rational(p, 1)

    @classmethod
    def zeta(cls, p: int, k: int = 1) -> "CycRat":
        """zeta_p^k for any integer k."""
        return cls._from_full(p, _unit_vector(p, k % p), 1)

    @classmethod
    def _from_full(cls, p: int, full, den: int) -> "CycRat":
        # full has length p: coefficients of zeta^0..zeta^(p-1)
        top = full[p - 1]
        if top:
            return cls(p, [full[k] - top for k in range(p - 1)], den)
        return cls(p, full[: p - 1], den)

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.num)

    def is_one(self) -> bool:
        return self.den == 1 and self.num[0] == 1 and not any(self.num[1:])

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.num[0], self.den)

    def root_of_unity_exponent(self) -> int | None:
        """Return k if self == zeta^k (0 <= k < p), else None."""
        for k in range(self.p):
            if self == CycRat.zeta(self.p, k):
                return k
        return None

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "CycRat":
        if isinstance(other, CycRat):
            if other.p != self.p:
                raise ValueError(f"conductor mismatch: {self.p} vs {other.p}")
            return other
        if isinstance(other, (int, Rational)):
            return CycRat.from_rational(self.p, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d1, d2 = self.den, other.den
        if d1 == d2:
            return CycRat(self.p, [a + b for a, b in zip(self.num, other.num)], d1)
        return CycRat(self.p, [a * d2 + b * d1 for a, b in zip(self.num, other.num)], d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return CycRat(self.p, [-a for a in self.num], self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        if p == 2:
            return CycRat(2, (self.num[0] * other.num[0],), self.den * other.den)
        full = [0] * p
        a, b = self.num, other.num
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if bj:
                    k = i + j
                    if k >= p:
                        k -= p
                    full[k] += ai * bj
        return CycRat._from_full(p, full, self.den * other.den)

    __rmul__ = __mul__

    def conjugate(self, j: int) -> "CycRat":
        """Image under the Galois automorphism zeta -> zeta^j."""
        p = self.p
        full = [0] * p
        for k, c in enumerate(self.num):
            full[(k * j) % p] += c
        return CycRat._from_full(p, full, self.den)

    def norm(self) -> Fraction:
        """Field norm down to Q."""
        prod = self
        for j in range(2, self.p):
            prod = prod * self.conjugate(j)
        return prod.as_fraction()

    def inverse(self) -> "CycRat":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta)")
        if self.is_rational():
            return CycRat.from_rational(self.p, 1 / Fraction(self.num[0], self.den))
        others = CycRat.one(self.p)
        for j in range(2, self.p):
            others = others * self.conjugate(j)
        n = (self * others).as_fraction()
        return others * (1 / n)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = CycRat.one(self.p)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- comparison / hashing ------------------------------------------
    def __eq__(self, other):
        if isinstance(other, CycRat):
            return self.p == other.p and self.den == other.den and self.num == other.num
        if isinstance(other, (int, Rational)):
            return self.is_rational() and Fraction(self.num[0], self.den) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.num, self.den))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # -- text ---------------------------------------------------------
    def to_text(self) -> str:
        """Canonical text, e.g. ``3/2``, ``zeta``, ``(1/2 - zeta^2)``."""
        parts = []
        for k, c in enumerate(self.num):
            if not c:
                continue
            q = Fraction(c, self.den)
            mag = abs(q)
            if k == 0:
                body = str(mag)
            elif mag == 1:
                body = "zeta" if k == 1 else f"zeta^{k}"
            else:
                body = f"{mag}*zeta" if k == 1 else f"{mag}*zeta^{k}"
            parts.append(("-" if q < 0 else "+", body))
        if not parts:
            return "0"
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text if len(parts) == 1 else f"({text})"

    def __repr__(self):
        return f"CycRat[{self.p}]({self.to_text()})"

    __str__ = to_text


@lru_cache(maxsize=None)
def _unit_vector(p: int, k: int) -> tuple:
    v = [0] * p
    v[k] = 1
    return tuple(v)
