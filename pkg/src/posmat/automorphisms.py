"""Standard automorphisms X -> M c(lambda(X) X) M^-1 and black-box oracles.

A :class:`StandardTriple` ``(M, c, lam)`` acts as ``inner(M) o ringmap(c) o
homothety(lam)``, the homothety being applied first.

Central homomorphisms are described on positive units through a map from
primes to positive rationals.  Over the commutative rings the scalar is
``lam(X) = gamma(|det X|)``; over RATFUN a positive unit ``f`` is sent to
``gamma(|lc f|) * kappa**deg f`` where ``lc`` is the leading-coefficient
ratio and ``deg`` the degree difference, both multiplicative.  The skew
ring only carries the trivial homothety.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import InvalidTriple, RingMismatch, UnsupportedRing
from .matrices import Matrix, MonomialMatrix, Permutation, determinant, monomial_recognize
from .rings import RatFun, RingElement, RingId, Skew


# -- arithmetic helpers on rationals ------------------------------------------

def _factor(m: int) -> dict[int, int]:
    m = abs(m)
    out: dict[int, int] = {}
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def _is_prime(p: int) -> bool:
    return p >= 2 and _factor(p) == {p: 1}


def valuation(q: Fraction, p: int) -> int:
    if q == 0:
        raise ValueError("valuation of zero")
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def prime_exponents(q: Fraction) -> dict[int, int]:
    out = dict(_factor(q.numerator))
    for p, e in _factor(q.denominator).items():
        out[p] = out.get(p, 0) - e
    return out


def _int_inverse(rows: list[list[int]]) -> list[list[int]] | None:
    """Inverse over Z, or None if the matrix is not unimodular."""
    n = len(rows)
    aug = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    inv = [r[n:] for r in aug]
    if any(x.denominator != 1 for r in inv for x in r):
        return None
    return [[int(x) for x in r] for r in inv]


# -- ring maps -----------------------------------------------------------------

@dataclass(frozen=True)
class RingMapDescriptor:
    """``s -> a*s + b`` (t fixed); identity when ``a == 1`` and ``b == 0``."""

    ring: RingId
    a: Fraction = Fraction(1)
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @property
    def variant(self) -> str:
        return "identity" if self.is_identity else "affine"

    @property
    def is_identity(self) -> bool:
        return self.a == 1 and self.b == 0

    def validate(self) -> None:
        if self.a <= 0:
            raise InvalidTriple(f"affine ring map needs a > 0, got {self.a}")
        if self.ring in (RingId.Q, RingId.DYADIC) and not self.is_identity:
            raise InvalidTriple(f"{self.ring} has only the identity order automorphism")
        if self.ring is RingId.SKEW and self.b != 0:
            raise InvalidTriple("on SKEW an affine map must have b = 0 to respect t f(s) = f(2s) t")

    def __call__(self, x: RingElement) -> RingElement:
        if x.ring is not self.ring:
            raise RingMismatch(f"map on {self.ring} applied to {x.ring}")
        if self.is_identity:
            return x
        if isinstance(x, RatFun):
            return x if x.is_constant else x.substitute(self.a, self.b)
        if isinstance(x, Skew):
            return x.map_coefficients(lambda f: f if f.is_constant else f.substitute(self.a, self.b))
        return x

    def apply_matrix(self, X: Matrix) -> Matrix:
        if X.ring is not self.ring:
            raise RingMismatch(f"map on {self.ring} applied to a {X.ring} matrix")
        if self.is_identity:
            return X
        return X.map_entries(self)

    def apply_monomial(self, M: MonomialMatrix) -> MonomialMatrix:
        return M if self.is_identity else M.map_entries(self)

    def inverse(self) -> RingMapDescriptor:
        return RingMapDescriptor(self.ring, 1 / self.a, -self.b / self.a)

    def compose(self, other: RingMapDescriptor) -> RingMapDescriptor:
        """self o other (other applied first)."""
        return RingMapDescriptor(self.ring, self.a * other.a, other.a * self.b + other.b)

    def to_json(self) -> dict:
        if self.is_identity:
            return {"variant": "identity"}
        return {"variant": "affine", "a": str(self.a), "b": str(self.b)}

    @classmethod
    def from_json(cls, obj, ring: RingId) -> RingMapDescriptor:
        variant = obj.get("variant", "identity")
        if variant == "identity":
            return cls(ring)
        if variant != "affine":
            raise ValueError(f"unknown ring map variant {variant!r}")
        return cls(ring, Fraction(obj["a"]), Fraction(obj.get("b", "0")))


# -- central homotheties ---------------------------------------------------------

@dataclass(frozen=True)
class CentralHomDescriptor:
    """gamma on primes (1 elsewhere), plus ``kappa`` for the RATFUN degree."""

    ring: RingId
    gamma: dict = field(default_factory=dict)
    kappa: Fraction = Fraction(1)

    def __post_init__(self):
        clean = {int(p): Fraction(v) for p, v in dict(self.gamma).items() if Fraction(v) != 1}
        object.__setattr__(self, "gamma", clean)
        object.__setattr__(self, "kappa", Fraction(self.kappa))

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.gamma.items())), self.kappa))

    @classmethod
    def trivial(cls, ring: RingId) -> CentralHomDescriptor:
        return cls(ring)

    @property
    def is_trivial(self) -> bool:
        return not self.gamma and self.kappa == 1

    def validate(self) -> None:
        if self.is_trivial:
            return
        if self.ring is RingId.SKEW:
            raise UnsupportedRing("nontrivial homotheties are not supported over SKEW")
        if self.kappa != 1 and self.ring is not RingId.RATFUN:
            raise InvalidTriple("a degree factor only makes sense over RATFUN")
        for p, v in self.gamma.items():
            if not _is_prime(p):
                raise InvalidTriple(f"gamma key {p} is not prime")
            if v <= 0:
                raise InvalidTriple(f"gamma({p}) = {v} is not positive")
        if self.kappa <= 0:
            raise InvalidTriple("kappa must be positive")
        if self.ring is RingId.DYADIC:
            for p, v in self.gamma.items():
                if p != 2 or set(prime_exponents(v)) - {2}:
                    raise InvalidTriple("over DYADIC gamma must send 2 to a power of 2")

    def gamma_rational(self, q: Fraction) -> Fraction:
        out = Fraction(1)
        for p, v in self.gamma.items():
            e = valuation(q, p)
            if e:
                out *= v ** e
        return out

    def value(self, x: RingElement) -> Fraction:
        """gamma on a positive unit, as a rational number."""
        if self.is_trivial:
            return Fraction(1)
        if isinstance(x, RatFun):
            return self.gamma_rational(abs(x.leading_ratio())) * self.kappa ** x.degree()
        return self.gamma_rational(abs(x.to_fraction()))

    def scalar(self, X: Matrix) -> RingElement:
        """lambda(X) = gamma(|det X|)."""
        if self.is_trivial:
            return X.ring.one
        if X.ring is RingId.SKEW:
            raise UnsupportedRing("nontrivial homotheties are not supported over SKEW")
        det = determinant(X)
        if det.is_zero:
            raise ValueError("homothety applied to a singular matrix")
        return X.ring.const(self.value(det))

    def apply(self, X: Matrix) -> Matrix:
        if X.ring is not self.ring:
            raise RingMismatch(f"homothety on {self.ring} applied to a {X.ring} matrix")
        if self.is_trivial:
            return X
        lam = self.scalar(X)
        return X if lam.is_one else X.scale_left(lam)

    # exponent bookkeeping ------------------------------------------------------

    def touched_primes(self) -> list[int]:
        primes = set(self.gamma)
        for v in list(self.gamma.values()) + [self.kappa]:
            primes |= set(prime_exponents(v))
        return sorted(primes)

    def exponent_matrix(self, primes: Sequence[int] | None = None) -> list[list[int]]:
        """Columns: exponents of gamma(p) per prime, then of kappa for the degree slot."""
        primes = list(primes if primes is not None else self.touched_primes())
        cols = [prime_exponents(self.gamma.get(p, Fraction(1))) for p in primes]
        cols.append(prime_exponents(self.kappa))
        size = len(primes) + 1
        rows = [[cols[j].get(p, 0) for j in range(size)] for p in primes]
        rows.append([0] * size)
        return rows

    def certificate(self, n: int) -> list[list[int]]:
        """I + n*Gamma; the homothety is bijective iff this is unimodular."""
        G = self.exponent_matrix()
        return [[int(i == j) + n * G[i][j] for j in range(len(G))] for i in range(len(G))]

    def is_invertible(self, n: int) -> bool:
        if self.is_trivial:
            return True
        return _int_inverse(self.certificate(n)) is not None

    def inverse(self, n: int) -> CentralHomDescriptor:
        """Explicit inverse homothety for dimension ``n``."""
        if self.is_trivial:
            return self
        primes = self.touched_primes()
        G = self.exponent_matrix(primes)
        A_inv = _int_inverse(self.certificate(n))
        if A_inv is None:
            raise InvalidTriple("homothety is not invertible (I + n*Gamma not unimodular)")
        size = len(G)
        G_new = [[-sum(G[i][k] * A_inv[k][j] for k in range(size)) for j in range(size)] for i in range(size)]

        def from_col(j):
            out = Fraction(1)
            for i, p in enumerate(primes):
                out *= Fraction(p) ** G_new[i][j]
            return out

        gamma = {p: from_col(j) for j, p in enumerate(primes)}
        return CentralHomDescriptor(self.ring, gamma, from_col(size - 1))

    def compose(self, other: CentralHomDescriptor, n: int) -> CentralHomDescriptor:
        """self o other as maps X -> lambda(X) X in dimension ``n``."""
        if self.is_trivial:
            return other
        if other.is_trivial:
            return self
        keys = set(self.gamma) | set(other.gamma)
        gamma = {}
        for p in keys:
            g2 = other.gamma.get(p, Fraction(1))
            gamma[p] = self.gamma.get(p, Fraction(1)) * g2 * self.gamma_rational(g2) ** n
        kappa = self.kappa * other.kappa * self.gamma_rational(other.kappa) ** n
        return CentralHomDescriptor(self.ring, gamma, kappa)

    def pull_through(self, c: RingMapDescriptor) -> CentralHomDescriptor:
        """The homothety h' with  self o ringmap(c) == ringmap(c) o h'."""
        if self.is_trivial or c.is_identity or self.ring is not RingId.RATFUN:
            return self
        return CentralHomDescriptor(self.ring, self.gamma, self.kappa * self.gamma_rational(c.a))

    def to_json(self) -> dict:
        out = {"gamma": {str(p): str(v) for p, v in sorted(self.gamma.items())}}
        if self.kappa != 1:
            out["kappa"] = str(self.kappa)
        return out

    @classmethod
    def from_json(cls, obj, ring: RingId) -> CentralHomDescriptor:
        gamma = {int(p): Fraction(v) for p, v in obj.get("gamma", {}).items()}
        return cls(ring, gamma, Fraction(obj.get("kappa", "1")))


# -- triples ---------------------------------------------------------------------

@dataclass(frozen=True)
class StandardTriple:
    M: MonomialMatrix
    c: RingMapDescriptor
    lam: CentralHomDescriptor

    @property
    def n(self) -> int:
        return self.M.n

    @property
    def ring(self) -> RingId:
        return self.M.ring

    @classmethod
    def identity(cls, n: int, ring: RingId) -> StandardTriple:
        return cls(MonomialMatrix.identity(n, ring), RingMapDescriptor(ring), CentralHomDescriptor.trivial(ring))

    def validate(self) -> None:
        if self.c.ring is not self.ring or self.lam.ring is not self.ring:
            raise InvalidTriple("triple components live over different rings")
        if not self.M.is_valid():
            raise InvalidTriple("M must have positive unit diagonal entries")
        self.c.validate()
        try:
            self.lam.validate()
        except UnsupportedRing as exc:
            raise InvalidTriple(str(exc)) from None
        if not self.lam.is_invertible(self.n):
            raise InvalidTriple("homothety fails the unimodular certificate")

    def apply(self, X: Matrix) -> Matrix:
        return self.M.conjugate(self.c.apply_matrix(self.lam.apply(X)))

    __call__ = apply

    def compose(self, other: StandardTriple) -> StandardTriple:
        """self o other, again in standard form."""
        M = self.M @ self.c.apply_monomial(other.M)
        c = self.c.compose(other.c)
        lam = self.lam.pull_through(other.c).compose(other.lam, self.n)
        return StandardTriple(M, c, lam)

    def to_json(self) -> dict:
        return {"M": self.M.to_json(), "c": self.c.to_json(), "lambda": self.lam.to_json()}

    @classmethod
    def from_json(cls, obj, ring: RingId) -> StandardTriple:
        return cls(
            MonomialMatrix.from_json(obj["M"], ring),
            RingMapDescriptor.from_json(obj["c"], ring),
            CentralHomDescriptor.from_json(obj["lambda"], ring),
        )


def apply_inner(M: MonomialMatrix, X: Matrix) -> Matrix:
    return M.conjugate(X)


def apply_ringmap(c: RingMapDescriptor, X: Matrix) -> Matrix:
    return c.apply_matrix(X)


def apply_homothety(h: CentralHomDescriptor, X: Matrix) -> Matrix:
    if not h.is_trivial and X.ring is RingId.SKEW:
        raise UnsupportedRing("nontrivial homotheties are not supported over SKEW")
    return h.apply(X)


# -- oracles -----------------------------------------------------------------------

class AutomorphismOracle:
    """A matrix -> matrix callable that claims to be an automorphism of G_n(R).

    ``queries`` counts calls; the counter is lock-protected so the same
    oracle can be shared by worker threads.
    """

    def __init__(self, fn: Callable[[Matrix], Matrix], n: int, ring: RingId, name: str = "oracle"):
        self._fn = fn
        self.n = n
        self.ring = ring
        self.name = name
        self._lock = threading.Lock()
        self._queries = 0

    @property
    def queries(self) -> int:
        return self._queries

    def __call__(self, X: Matrix) -> Matrix:
        with self._lock:
            self._queries += 1
        return self._fn(X)

    apply = __call__

    def __repr__(self):
        return f"<AutomorphismOracle {self.name} n={self.n} ring={self.ring.value}>"


def oracle_from_triple(t: StandardTriple) -> AutomorphismOracle:
    t.validate()
    return AutomorphismOracle(t.apply, t.n, t.ring, name="triple")


class FlipTable:
    """Faulty probe: B_ij(x) -> B_ji(x), everything else fixed."""

    def apply(self, X: Matrix) -> Matrix:
        off = X.nonzero_offdiagonal()
        if len(off) == 1 and all(d.is_one for d in X.diagonal()):
            i, j = off[0]
            return Matrix.transvection(X.n, j, i, X[i, j])
        return X

    def to_json(self):
        return {"flip": {}}


class Transpose:
    """Faulty probe: the anti-automorphism X -> X^T."""

    def apply(self, X: Matrix) -> Matrix:
        return X.transpose()

    def to_json(self):
        return {"transpose": {}}


Part = object  # MonomialMatrix | RingMapDescriptor | CentralHomDescriptor | FlipTable | Transpose


def _part_apply(part, X: Matrix) -> Matrix:
    if isinstance(part, MonomialMatrix):
        return part.conjugate(X)
    if isinstance(part, RingMapDescriptor):
        return part.apply_matrix(X)
    if isinstance(part, CentralHomDescriptor):
        return part.apply(X)
    return part.apply(X)


def _part_triple(part, n: int, ring: RingId) -> StandardTriple | None:
    ident = StandardTriple.identity(n, ring)
    if isinstance(part, MonomialMatrix):
        return StandardTriple(part, ident.c, ident.lam)
    if isinstance(part, RingMapDescriptor):
        return StandardTriple(ident.M, part, ident.lam)
    if isinstance(part, CentralHomDescriptor):
        return StandardTriple(ident.M, ident.c, part)
    return None


def _validate_part(part, n: int, ring: RingId) -> None:
    triple = _part_triple(part, n, ring)
    if triple is None:
        if not isinstance(part, (FlipTable, Transpose)):
            raise InvalidTriple(f"unknown part {part!r}")
        return
    if isinstance(part, MonomialMatrix) and (part.n != n or part.ring is not ring):
        raise InvalidTriple("inner part has the wrong size or ring")
    if getattr(part, "ring", ring) is not ring:
        raise InvalidTriple("part lives over a different ring")
    triple.validate()


def compose_parts(parts: Sequence, n: int, ring: RingId) -> StandardTriple | None:
    """Standard form of parts[0] o parts[1] o ...; None if a faulty part occurs."""
    total = StandardTriple.identity(n, ring)
    for part in parts:
        t = _part_triple(part, n, ring)
        if t is None:
            return None
        total = total.compose(t)
    return total


def obfuscated_oracle(parts: Sequence, n: int, ring: RingId, seed=None):
    """Oracle applying ``parts`` right to left, with a seeded cancelling pair
    of inner automorphisms spliced in.  Returns ``(oracle, ground_truth)``;
    the ground truth is None when a faulty probe part is present.
    """
    parts = list(parts)
    for part in parts:
        _validate_part(part, n, ring)
    truth = compose_parts(parts, n, ring)
    rng = random.Random(seed)
    from .words import random_monomial

    N = random_monomial(n, ring, rng)
    pos = rng.randint(0, len(parts))
    chain = parts[:pos] + [N, N.inverse()] + parts[pos:]

    def fn(X: Matrix) -> Matrix:
        for part in reversed(chain):
            X = _part_apply(part, X)
        return X

    return AutomorphismOracle(fn, n, ring, name="obfuscated"), truth


# -- random generation -----------------------------------------------------------

_AFFINE_A = (Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3))
_AFFINE_B = (Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2))


def random_ringmap(ring: RingId, rng: random.Random) -> RingMapDescriptor:
    if ring is RingId.RATFUN:
        return RingMapDescriptor(ring, rng.choice(_AFFINE_A), rng.choice(_AFFINE_B))
    if ring is RingId.SKEW:
        return RingMapDescriptor(ring, rng.choice(_AFFINE_A))
    return RingMapDescriptor(ring)


def random_homothety(ring: RingId, rng: random.Random) -> CentralHomDescriptor:
    """Certified-invertible homothety: gamma is strictly triangular along a
    random chain of the primes 2, 3, 5 (with 7 as a sink), so I + n*Gamma is
    unitriangular.  DYADIC and SKEW only admit the trivial one.
    """
    if ring in (RingId.DYADIC, RingId.SKEW):
        return CentralHomDescriptor.trivial(ring)
    chain = [2, 3, 5]
    rng.shuffle(chain)
    chain.append(7)
    gamma = {}
    for idx, p in enumerate(chain[:-1]):
        v = Fraction(1)
        for q in chain[idx + 1:]:
            v *= Fraction(q) ** rng.choice((-1, 0, 0, 1))
        gamma[p] = v
    kappa = Fraction(1)
    if ring is RingId.RATFUN:
        kappa = rng.choice((Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3)))
    return CentralHomDescriptor(ring, gamma, kappa)


def random_triple(n: int, ring: RingId, rng: random.Random) -> StandardTriple:
    from .words import random_monomial

    return StandardTriple(random_monomial(n, ring, rng), random_ringmap(ring, rng), random_homothety(ring, rng))


def random_parts(n: int, ring: RingId, rng: random.Random, count: int | None = None) -> list:
    from .words import random_monomial

    if count is None:
        count = rng.randint(2, 4)
    parts = []
    for _ in range(count):
        kind = rng.choice("irh")
        if kind == "i":
            parts.append(random_monomial(n, ring, rng))
        elif kind == "r":
            parts.append(random_ringmap(ring, rng))
        else:
            parts.append(random_homothety(ring, rng))
    return parts


# -- description JSON --------------------------------------------------------------

def description_to_json(parts: Sequence, n: int, ring: RingId) -> dict:
    items = []
    for part in parts:
        if isinstance(part, MonomialMatrix):
            items.append({"inner": part.to_matrix().to_json()})
        elif isinstance(part, RingMapDescriptor):
            items.append({"ringmap": part.to_json()})
        elif isinstance(part, CentralHomDescriptor):
            items.append({"homothety": part.to_json()})
        else:
            items.append(part.to_json())
    return {"n": n, "ring": ring.value, "order": "right-to-left", "compose": items}


def description_from_json(obj) -> tuple[int, RingId, list]:
    n = int(obj["n"])
    ring = RingId(obj["ring"])
    parts = []
    for item in obj.get("compose", []):
        if "inner" in item:
            M = Matrix.from_json(item["inner"])
            if M.ring is not ring or M.n != n:
                raise ValueError("inner matrix does not match the description's n/ring")
            parts.append(monomial_recognize(M))
        elif "ringmap" in item:
            parts.append(RingMapDescriptor.from_json(item["ringmap"], ring))
        elif "homothety" in item:
            parts.append(CentralHomDescriptor.from_json(item["homothety"], ring))
        elif "flip" in item:
            parts.append(FlipTable())
        elif "transpose" in item:
            parts.append(Transpose())
        else:
            raise ValueError(f"unknown composition part {item}")
    return n, ring, parts


def permutation_part(sigma: Permutation, ring: RingId) -> MonomialMatrix:
    return MonomialMatrix.from_perm(sigma, ring)
