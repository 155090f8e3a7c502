"""Exact arithmetic in four linearly ordered rings containing 1/2.

=========  ==========================================================
``Q``      rationals
``DYADIC`` Z[1/2], stored as ``num * 2**exp`` with ``num`` odd
``RATFUN`` Q(s) ordered with ``s`` infinitely large
``SKEW``   Laurent polynomials sum f_k(s) t^k over Q(s) with the twist
           ``t * f(s) = f(2s) * t``; positive means the coefficient of
           the lowest power of ``t`` is positive
=========  ==========================================================

Elements are immutable and canonical after every operation, so ``==``
and ``hash`` are structural.  Python ints and Fractions are coerced into
the ring of the other operand.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from numbers import Rational as _RationalNumber

from . import _poly as P
from .errors import NotAUnit, RingMismatch


class RingId(str, Enum):
    Q = "Q"
    DYADIC = "DYADIC"
    RATFUN = "RATFUN"
    SKEW = "SKEW"

    @property
    def commutative(self) -> bool:
        return self is not RingId.SKEW

    @property
    def element_type(self) -> type[RingElement]:
        return _TYPES[self]

    def const(self, q) -> RingElement:
        """Image of a rational number; DYADIC rejects odd denominators."""
        return _TYPES[self].from_fraction(Fraction(q))

    @property
    def zero(self) -> RingElement:
        return self.const(0)

    @property
    def one(self) -> RingElement:
        return self.const(1)

    def __str__(self) -> str:
        return self.value


class RingElement:
    """Common arithmetic surface; subclasses fill in the primitives."""

    __slots__ = ()
    ring: RingId

    # primitives: _add, _mul, __neg__, sign, inverse, is_zero, _key, to_json

    def _coerce(self, other) -> RingElement:
        if isinstance(other, RingElement):
            if other.ring is not self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, _RationalNumber)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._add(other)

    def __radd__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other._add(self)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._add(-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other._add(-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._mul(other)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other._mul(self)

    def __truediv__(self, other):
        # right division a * b^-1
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._mul(other.inverse())

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.ring.one
        base = self
        while k:
            if k & 1:
                result = result._mul(base)
            base = base._mul(base)
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, RingElement):
            return other.ring is self.ring and self._key() == other._key()
        if isinstance(other, (int, _RationalNumber)):
            try:
                return self == self.ring.const(other)
            except ValueError:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.ring.value, self._key()))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __repr__(self):
        return f"{self.ring.value}({self})"

    @property
    def is_one(self) -> bool:
        return self == self.ring.one

    def is_positive(self) -> bool:
        return self.sign() > 0

    def is_unit(self) -> bool:
        try:
            self.inverse()
        except NotAUnit:
            return False
        return True

    def is_central(self) -> bool:
        return True


class Rational(RingElement):
    __slots__ = ("value",)
    ring = RingId.Q

    def __init__(self, value=0):
        self.value = Fraction(value)

    @classmethod
    def from_fraction(cls, q: Fraction) -> Rational:
        return cls(q)

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    def _key(self):
        return self.value

    def _add(self, other):
        return Rational(self.value + other.value)

    def _mul(self, other):
        return Rational(self.value * other.value)

    def __neg__(self):
        return Rational(-self.value)

    def sign(self) -> int:
        return (self.value > 0) - (self.value < 0)

    def inverse(self) -> Rational:
        if not self.value:
            raise NotAUnit("0 is not invertible")
        return Rational(1 / self.value)

    def to_fraction(self) -> Fraction:
        return self.value

    def __str__(self):
        return str(self.value)

    def to_json(self) -> dict:
        return {"ring": "Q", "num": str(self.value.numerator), "den": str(self.value.denominator)}


class Dyadic(RingElement):
    """``num * 2**exp`` with ``num`` odd, or ``(0, 0)``."""

    __slots__ = ("num", "exp")
    ring = RingId.DYADIC

    def __init__(self, num: int = 0, exp: int = 0):
        num = int(num)
        exp = int(exp)
        if num == 0:
            exp = 0
        else:
            tz = (num & -num).bit_length() - 1
            num >>= tz
            exp += tz
        self.num = num
        self.exp = exp

    @classmethod
    def from_fraction(cls, q: Fraction) -> Dyadic:
        den = q.denominator
        if den & (den - 1):
            raise ValueError(f"{q} is not a dyadic rational")
        return cls(q.numerator, -(den.bit_length() - 1))

    @property
    def is_zero(self) -> bool:
        return self.num == 0

    def _key(self):
        return (self.num, self.exp)

    def _add(self, other):
        if not self.num:
            return other
        if not other.num:
            return self
        e = min(self.exp, other.exp)
        return Dyadic((self.num << (self.exp - e)) + (other.num << (other.exp - e)), e)

    def _mul(self, other):
        return Dyadic(self.num * other.num, self.exp + other.exp)

    def __neg__(self):
        return Dyadic(-self.num, self.exp)

    def sign(self) -> int:
        return (self.num > 0) - (self.num < 0)

    def inverse(self) -> Dyadic:
        if self.num not in (1, -1):
            raise NotAUnit(f"{self} is not invertible in Z[1/2]")
        return Dyadic(self.num, -self.exp)

    def to_fraction(self) -> Fraction:
        if self.exp >= 0:
            return Fraction(self.num << self.exp)
        return Fraction(self.num, 1 << -self.exp)

    def __str__(self):
        return str(self.to_fraction())

    def to_json(self) -> dict:
        return {"ring": "DYADIC", "num": str(self.num), "exp": self.exp}


class RatFun(RingElement):
    """Reduced fraction ``num/den`` of polynomials in ``s``, ``den`` monic."""

    __slots__ = ("num", "den")
    ring = RingId.RATFUN

    def __init__(self, num=P.ZERO, den=P.ONE, _canonical: bool = False):
        if _canonical:
            self.num = num
            self.den = den
            return
        num = P.trim(num)
        den = P.trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            self.num, self.den = P.ZERO, P.ONE
            return
        if len(den) > 1:
            g = P.gcd(num, den)
            if len(g) > 1:
                num = P.exact_div(num, g)
                den = P.exact_div(den, g)
        c = den[-1]
        if c != 1:
            num = P.scale(num, 1 / c)
            den = P.monic(den)
        self.num = num
        self.den = den

    @classmethod
    def from_fraction(cls, q: Fraction) -> RatFun:
        return cls(P.const(q), P.ONE, _canonical=True)

    @classmethod
    def s(cls) -> RatFun:
        return cls((Fraction(0), Fraction(1)), P.ONE, _canonical=True)

    @classmethod
    def poly(cls, coeffs) -> RatFun:
        return cls(P.trim(coeffs), P.ONE, _canonical=True)

    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def _key(self):
        return (self.num, self.den)

    def _add(self, other):
        if not self.num:
            return other
        if not other.num:
            return self
        if self.den == P.ONE and other.den == P.ONE:
            num = P.add(self.num, other.num)
            return RatFun(num, P.ONE, _canonical=True) if num else RatFun()
        if self.den == other.den:
            return RatFun(P.add(self.num, other.num), self.den)
        num = P.add(P.mul(self.num, other.den), P.mul(other.num, self.den))
        return RatFun(num, P.mul(self.den, other.den))

    def _mul(self, other):
        if not self.num or not other.num:
            return RatFun()
        if self.den == P.ONE and other.den == P.ONE:
            return RatFun(P.mul(self.num, other.num), P.ONE, _canonical=True)
        return RatFun(P.mul(self.num, other.num), P.mul(self.den, other.den))

    def __neg__(self):
        return RatFun(P.neg(self.num), self.den, _canonical=True)

    def sign(self) -> int:
        if not self.num:
            return 0
        return 1 if self.num[-1] > 0 else -1

    def inverse(self) -> RatFun:
        if not self.num:
            raise NotAUnit("0 is not invertible")
        return RatFun(self.den, self.num)

    def leading_ratio(self) -> Fraction:
        """Ratio of leading coefficients (the den is monic)."""
        return P.lc(self.num)

    def degree(self) -> int:
        """deg num - deg den, the valuation at infinity up to sign."""
        return P.deg(self.num) - P.deg(self.den)

    def substitute(self, a, b=0) -> RatFun:
        """f(a*s + b)."""
        return RatFun(P.substitute_affine(self.num, a, b), P.substitute_affine(self.den, a, b))

    def twist(self, k: int = 1) -> RatFun:
        """f(2**k * s), the coefficient automorphism of SKEW."""
        if k == 0 or self.is_constant:
            return self
        factor = Fraction(2) ** k
        return RatFun(P.scale_var(self.num, factor), P.scale_var(self.den, factor))

    def evaluate(self, x) -> Fraction:
        return P.evaluate(self.num, x) / P.evaluate(self.den, x)

    def to_fraction(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"{self} is not a constant")
        return self.num[0] if self.num else Fraction(0)

    def __str__(self):
        num = P.to_str(self.num)
        if self.den == P.ONE:
            return num
        den = P.to_str(self.den)
        if " " in num or "/" in num or num.startswith("-"):
            num = f"({num})"
        if " " in den or "*" in den:
            den = f"({den})"
        return f"{num}/{den}"

    def to_json(self) -> dict:
        return {
            "ring": "RATFUN",
            "num": [str(c) for c in self.num] or ["0"],
            "den": [str(c) for c in self.den],
        }


class Skew(RingElement):
    """Sum of ``f_k(s) t^k`` with coefficients written on the left.

    ``terms`` is a sorted tuple of ``(k, RatFun)`` pairs with nonzero
    coefficients.
    """

    __slots__ = ("terms",)
    ring = RingId.SKEW

    def __init__(self, terms=()):
        if isinstance(terms, dict):
            items = terms.items()
        else:
            items = terms
        acc: dict[int, RatFun] = {}
        for k, f in items:
            if not isinstance(f, RatFun):
                f = RatFun.from_fraction(Fraction(f))
            if k in acc:
                acc[k] = acc[k] + f
            else:
                acc[k] = f
        self.terms = tuple(sorted((k, f) for k, f in acc.items() if not f.is_zero))

    @classmethod
    def from_fraction(cls, q: Fraction) -> Skew:
        return cls(((0, RatFun.from_fraction(q)),)) if q else cls()

    @classmethod
    def s(cls) -> Skew:
        return cls(((0, RatFun.s()),))

    @classmethod
    def t(cls, k: int = 1) -> Skew:
        return cls(((k, RatFun.from_fraction(Fraction(1))),))

    @classmethod
    def coef(cls, f: RatFun, k: int = 0) -> Skew:
        return cls(((k, f),))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def _key(self):
        return self.terms

    def _add(self, other):
        if not self.terms:
            return other
        if not other.terms:
            return self
        return Skew(self.terms + other.terms)

    def _mul(self, other):
        # (f t^i)(g t^j) = f * g(2^i s) * t^(i+j)
        out = []
        for i, f in self.terms:
            for j, g in other.terms:
                out.append((i + j, f * g.twist(i)))
        return Skew(out)

    def __neg__(self):
        return Skew(tuple((k, -f) for k, f in self.terms))

    def sign(self) -> int:
        if not self.terms:
            return 0
        return self.terms[0][1].sign()

    def inverse(self) -> Skew:
        if len(self.terms) != 1:
            raise NotAUnit(f"{self} is not a monomial f*t^k")
        k, f = self.terms[0]
        # (f t^k)^-1 = t^-k f^-1 = f^-1(2^-k s) t^-k
        return Skew(((-k, f.inverse().twist(-k)),))

    def is_central(self) -> bool:
        probes = (Skew.s(), Skew.t())
        return all(self._mul(p) == p._mul(self) for p in probes)

    @property
    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 0 and self.terms[0][1].is_constant)

    def to_fraction(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"{self} is not a constant")
        return self.terms[0][1].to_fraction() if self.terms else Fraction(0)

    def coefficient(self, k: int) -> RatFun:
        for j, f in self.terms:
            if j == k:
                return f
        return RatFun()

    def map_coefficients(self, fn) -> Skew:
        return Skew(tuple((k, fn(f)) for k, f in self.terms))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, f in self.terms:
            if k == 0:
                parts.append(str(f))
                continue
            mono = "t" if k == 1 else f"t^{k}"
            if f == 1:
                parts.append(mono)
            else:
                body = str(f)
                if " " in body and not body.startswith("("):
                    body = f"({body})"
                parts.append(f"{body}*{mono}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {"ring": "SKEW", "terms": [{"tdeg": k, "coef": f.to_json()} for k, f in self.terms]}


_TYPES: dict[RingId, type[RingElement]] = {
    RingId.Q: Rational,
    RingId.DYADIC: Dyadic,
    RingId.RATFUN: RatFun,
    RingId.SKEW: Skew,
}


def s_of(ring: RingId) -> RingElement:
    if ring is RingId.RATFUN:
        return RatFun.s()
    if ring is RingId.SKEW:
        return Skew.s()
    raise ValueError(f"{ring} has no variable s")


# -- operation surface ------------------------------------------------------

def add(a: RingElement, b: RingElement) -> RingElement:
    return a + b


def mul(a: RingElement, b: RingElement) -> RingElement:
    return a * b


def sign(a: RingElement) -> int:
    return a.sign()


def try_invert(a: RingElement) -> RingElement:
    """Two-sided inverse; raises :class:`NotAUnit` outside R*."""
    return a.inverse()


def is_central(a: RingElement) -> bool:
    return a.is_central()


# -- JSON --------------------------------------------------------------------

def _ratfun_from_json(obj) -> RatFun:
    return RatFun([Fraction(c) for c in obj["num"]], [Fraction(c) for c in obj["den"]])


def scalar_from_json(obj, ring: RingId | None = None) -> RingElement:
    """Decode a scalar; bare strings/ints are read as rationals in ``ring``."""
    if isinstance(obj, (str, int)):
        if ring is None:
            raise ValueError("bare scalar needs an explicit ring")
        return ring.const(Fraction(obj))
    tag = RingId(obj["ring"])
    if ring is not None and tag is not ring:
        raise RingMismatch(f"scalar tagged {tag}, expected {ring}")
    if tag is RingId.Q:
        value = Fraction(int(obj["num"]), int(obj["den"]))
        if int(obj["den"]) <= 0 or value.denominator != int(obj["den"]):
            raise ValueError(f"non-canonical rational {obj}")
        return Rational(value)
    if tag is RingId.DYADIC:
        return Dyadic(int(obj["num"]), int(obj["exp"]))
    if tag is RingId.RATFUN:
        return _ratfun_from_json(obj)
    terms = []
    for term in obj["terms"]:
        terms.append((int(term["tdeg"]), _ratfun_from_json(term["coef"])))
    return Skew(terms)


def scalar_to_json(a: RingElement) -> dict:
    return a.to_json()


# -- sample pools ------------------------------------------------------------

_BASE_POSITIVE = (Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3), Fraction(3, 2), Fraction(5))


def positive_pool(ring: RingId, include_zero: bool = False) -> list[RingElement]:
    """Fixed nonnegative sample pool: 1, 2, 1/2, 3, 3/2, 5 plus ring extras.

    RATFUN adds s, s+1, 2s; SKEW adds s, t, s*t.
    """
    pool = [ring.const(q) for q in _BASE_POSITIVE]
    if ring is RingId.RATFUN:
        s = RatFun.s()
        pool += [s, s + 1, 2 * s]
    elif ring is RingId.SKEW:
        s, t = Skew.s(), Skew.t()
        pool += [s, t, s * t]
    if include_zero:
        pool.insert(0, ring.zero)
    return pool


def unit_pool(ring: RingId) -> list[RingElement]:
    """Positive units among :func:`positive_pool`."""
    return [x for x in positive_pool(ring) if x.is_unit()]
