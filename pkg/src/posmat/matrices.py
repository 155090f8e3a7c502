"""Square matrices over the catalog rings and the Gamma_n recognisers.

Indices are 0-based throughout the Python API; the JSON encodings use
1-based permutation images.  The permutation matrix of ``sigma`` is
``S_sigma = (delta_{i, sigma(j)})``, so ``S_sigma e_j = e_{sigma(j)}`` and
``S_sigma @ S_tau == S_{sigma * tau}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import _poly as P
from .errors import DimensionMismatch, NotAUnit, NotInvolution, NotMonomial, RingMismatch, UnsupportedRing
from .rings import Dyadic, RatFun, RingElement, RingId, scalar_from_json


class Permutation:
    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"{images} is not a permutation of 0..{len(images) - 1}")
        self.images = images

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(range(n))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> Permutation:
        images = list(range(n))
        images[i], images[j] = j, i
        return cls(images)

    @classmethod
    def cycle(cls, n: int, points: Sequence[int]) -> Permutation:
        """The cycle p0 -> p1 -> ... -> p0."""
        images = list(range(n))
        for a, b in zip(points, list(points[1:]) + [points[0]]):
            images[a] = b
        return cls(images)

    @classmethod
    def from_one_based(cls, images: Sequence[int]) -> Permutation:
        return cls([i - 1 for i in images])

    @classmethod
    def random(cls, n: int, rng) -> Permutation:
        images = list(range(n))
        rng.shuffle(images)
        return cls(images)

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: Permutation) -> Permutation:
        # (self * other)(i) = self(other(i))
        return Permutation([self.images[j] for j in other.images])

    def inverse(self) -> Permutation:
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv)

    def __pow__(self, k: int) -> Permutation:
        base = self if k >= 0 else self.inverse()
        result = Permutation.identity(self.n)
        for _ in range(abs(k)):
            result = result * base
        return result

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    @property
    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def moved(self) -> frozenset[int]:
        return frozenset(i for i, j in enumerate(self.images) if i != j)

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its smallest point."""
        seen = set()
        out = []
        for start in range(self.n):
            if start in seen or self.images[start] == start:
                continue
            cyc = [start]
            seen.add(start)
            j = self.images[start]
            while j != start:
                cyc.append(j)
                seen.add(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted(len(c) for c in self.cycles()))

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles())) if self.cycles() else 1

    def matrix(self, ring: RingId) -> Matrix:
        return Matrix.permutation(self, ring)

    def to_json(self) -> list[int]:
        return [i + 1 for i in self.images]

    def __repr__(self):
        cyc = self.cycles()
        if not cyc:
            return f"Permutation(e, n={self.n})"
        body = "".join("(" + ",".join(str(i + 1) for i in c) + ")" for c in cyc)
        return f"Permutation({body}, n={self.n})"


class Matrix:
    """Immutable dense square matrix; ``rows`` is a tuple of tuples."""

    __slots__ = ("ring", "rows")

    def __init__(self, rows, ring: RingId | None = None):
        rows = tuple(tuple(r) for r in rows)
        if not rows:
            raise DimensionMismatch("empty matrix")
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionMismatch("matrix must be square")
        if ring is None:
            ring = rows[0][0].ring
        rows = tuple(tuple(x if isinstance(x, RingElement) else ring.const(x) for x in r) for r in rows)
        for r in rows:
            for x in r:
                if x.ring is not ring:
                    raise RingMismatch(f"entry in {x.ring}, matrix over {ring}")
        self.ring = ring
        self.rows = rows

    @classmethod
    def _raw(cls, rows, ring: RingId) -> Matrix:
        obj = object.__new__(cls)
        obj.rows = rows
        obj.ring = ring
        return obj

    @classmethod
    def identity(cls, n: int, ring: RingId) -> Matrix:
        zero, one = ring.zero, ring.one
        return cls._raw(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), ring)

    @classmethod
    def diag(cls, entries: Sequence, ring: RingId | None = None) -> Matrix:
        if ring is None:
            ring = entries[0].ring
        entries = [x if isinstance(x, RingElement) else ring.const(x) for x in entries]
        n = len(entries)
        zero = ring.zero
        return cls._raw(tuple(tuple(entries[i] if i == j else zero for j in range(n)) for i in range(n)), ring)

    @classmethod
    def permutation(cls, sigma: Permutation, ring: RingId) -> Matrix:
        zero, one = ring.zero, ring.one
        n = sigma.n
        return cls._raw(tuple(tuple(one if i == sigma(j) else zero for j in range(n)) for i in range(n)), ring)

    @classmethod
    def transvection(cls, n: int, i: int, j: int, x, ring: RingId | None = None) -> Matrix:
        """B_ij(x) = I + x E_ij."""
        if i == j:
            raise ValueError("transvection needs i != j")
        if ring is None:
            ring = x.ring
        if not isinstance(x, RingElement):
            x = ring.const(x)
        rows = [list(r) for r in cls.identity(n, ring).rows]
        rows[i][j] = x
        return cls._raw(tuple(tuple(r) for r in rows), ring)

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.ring is other.ring and self.rows == other.rows

    def __hash__(self):
        return hash((self.ring.value, self.rows))

    def _check(self, other: Matrix):
        if other.ring is not self.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        if other.n != self.n:
            raise DimensionMismatch(f"{self.n} vs {other.n}")

    def __matmul__(self, other: Matrix) -> Matrix:
        self._check(other)
        n = self.n
        zero = self.ring.zero
        brows = other.rows
        out = []
        for row in self.rows:
            nz = [(k, a) for k, a in enumerate(row) if not a.is_zero]
            new = []
            for j in range(n):
                acc = None
                for k, a in nz:
                    b = brows[k][j]
                    if b.is_zero:
                        continue
                    p = a._mul(b)
                    acc = p if acc is None else acc._add(p)
                new.append(zero if acc is None else acc)
            out.append(tuple(new))
        return Matrix._raw(tuple(out), self.ring)

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        return Matrix._raw(
            tuple(tuple(a._add(b) for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.ring
        )

    def __sub__(self, other: Matrix) -> Matrix:
        self._check(other)
        return Matrix._raw(
            tuple(tuple(a._add(-b) for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.ring
        )

    def __pow__(self, k: int) -> Matrix:
        if k < 0:
            raise ValueError("negative powers need an inverse")
        result = Matrix.identity(self.n, self.ring)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def scale_left(self, c: RingElement) -> Matrix:
        """c * X with the scalar on the left of every entry."""
        return Matrix._raw(tuple(tuple(c._mul(x) for x in r) for r in self.rows), self.ring)

    def map_entries(self, fn) -> Matrix:
        return Matrix._raw(tuple(tuple(fn(x) for x in r) for r in self.rows), self.ring)

    def with_entry(self, i: int, j: int, x) -> Matrix:
        rows = [list(r) for r in self.rows]
        rows[i][j] = x if isinstance(x, RingElement) else self.ring.const(x)
        return Matrix._raw(tuple(tuple(r) for r in rows), self.ring)

    def transpose(self) -> Matrix:
        return Matrix._raw(tuple(zip(*self.rows)), self.ring)

    @property
    def is_identity(self) -> bool:
        return self == Matrix.identity(self.n, self.ring)

    def is_diagonal(self) -> bool:
        return all(x.is_zero for i, r in enumerate(self.rows) for j, x in enumerate(r) if i != j)

    def diagonal(self) -> tuple[RingElement, ...]:
        return tuple(self.rows[i][i] for i in range(self.n))

    def nonzero_offdiagonal(self) -> list[tuple[int, int]]:
        return [(i, j) for i, r in enumerate(self.rows) for j, x in enumerate(r) if i != j and not x.is_zero]

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in r) for r in self.rows)
        return f"Matrix[{self.ring.value}]([{body}])"

    def to_json(self) -> dict:
        return {"n": self.n, "ring": self.ring.value, "entries": [[x.to_json() for x in r] for r in self.rows]}

    @classmethod
    def from_json(cls, obj) -> Matrix:
        ring = RingId(obj["ring"])
        rows = [[scalar_from_json(x, ring) for x in r] for r in obj["entries"]]
        m = cls(rows, ring)
        if "n" in obj and int(obj["n"]) != m.n:
            raise DimensionMismatch(f"declared n={obj['n']} but got {m.n} rows")
        return m


@dataclass(frozen=True)
class MonomialMatrix:
    """``diag[d_1..d_n] @ S_perm`` with positive-unit ``d_i``."""

    diag: tuple
    perm: Permutation

    def __post_init__(self):
        object.__setattr__(self, "diag", tuple(self.diag))
        if len(self.diag) != self.perm.n:
            raise DimensionMismatch("diag and perm sizes differ")

    @classmethod
    def identity(cls, n: int, ring: RingId) -> MonomialMatrix:
        return cls((ring.one,) * n, Permutation.identity(n))

    @classmethod
    def from_perm(cls, sigma: Permutation, ring: RingId) -> MonomialMatrix:
        return cls((ring.one,) * sigma.n, sigma)

    @classmethod
    def from_diag(cls, entries: Sequence[RingElement]) -> MonomialMatrix:
        return cls(tuple(entries), Permutation.identity(len(entries)))

    @property
    def n(self) -> int:
        return self.perm.n

    @property
    def ring(self) -> RingId:
        return self.diag[0].ring

    def is_valid(self) -> bool:
        return all(d.sign() > 0 and d.is_unit() for d in self.diag)

    def to_matrix(self) -> Matrix:
        n = self.n
        zero = self.ring.zero
        rows = [[zero] * n for _ in range(n)]
        for j in range(n):
            i = self.perm(j)
            rows[i][j] = self.diag[i]
        return Matrix._raw(tuple(tuple(r) for r in rows), self.ring)

    def __matmul__(self, other: MonomialMatrix) -> MonomialMatrix:
        # D1 S1 D2 S2 = D1 (S1 D2 S1^-1) S1 S2 and S1 D2 S1^-1 = diag[d2_{s1^-1(i)}]
        inv = self.perm.inverse()
        diag = tuple(self.diag[i] * other.diag[inv(i)] for i in range(self.n))
        return MonomialMatrix(diag, self.perm * other.perm)

    def inverse(self) -> MonomialMatrix:
        # (D S)^-1 = S^-1 D^-1 = diag[d_{sigma(i)}^-1] S^-1
        diag = tuple(self.diag[self.perm(i)].inverse() for i in range(self.n))
        return MonomialMatrix(diag, self.perm.inverse())

    def conjugate(self, X: Matrix) -> Matrix:
        """M X M^-1 in O(n^2)."""
        if X.n != self.n:
            raise DimensionMismatch(f"{self.n} vs {X.n}")
        n = self.n
        inv = self.perm.inverse().images
        d = self.diag
        dinv = [x.inverse() for x in d]
        rows = X.rows
        out = []
        for i in range(n):
            src = rows[inv[i]]
            new = []
            for j in range(n):
                y = src[inv[j]]
                if not y.is_zero:
                    y = d[i]._mul(y)._mul(dinv[j])
                new.append(y)
            out.append(tuple(new))
        return Matrix._raw(tuple(out), X.ring)

    def map_entries(self, fn) -> MonomialMatrix:
        return MonomialMatrix(tuple(fn(x) for x in self.diag), self.perm)

    def scale(self, z: RingElement) -> MonomialMatrix:
        """M * (z I)."""
        return MonomialMatrix(tuple(d * z for d in self.diag), self.perm)

    def to_json(self) -> dict:
        return {"diag": [d.to_json() for d in self.diag], "perm": self.perm.to_json()}

    @classmethod
    def from_json(cls, obj, ring: RingId) -> MonomialMatrix:
        return cls(tuple(scalar_from_json(x, ring) for x in obj["diag"]), Permutation.from_one_based(obj["perm"]))


@dataclass(frozen=True)
class InvolutionData:
    t: tuple
    sigma: Permutation

    def to_matrix(self) -> Matrix:
        return MonomialMatrix(self.t, self.sigma).to_matrix()


# -- operations ---------------------------------------------------------------

def matmul(A: Matrix, B: Matrix) -> Matrix:
    return A @ B


def is_nonnegative(A: Matrix) -> bool:
    return all(x.sign() >= 0 for r in A.rows for x in r)


def monomial_recognize(A: Matrix) -> MonomialMatrix:
    """Decompose a Gamma_n member as ``diag @ S_sigma``; raise NotMonomial otherwise."""
    n = A.n
    images = [-1] * n
    diag = [None] * n
    for j in range(n):
        hits = [i for i in range(n) if not A.rows[i][j].is_zero]
        if len(hits) != 1:
            raise NotMonomial(f"column {j + 1} has {len(hits)} nonzero entries")
        i = hits[0]
        if diag[i] is not None:
            raise NotMonomial(f"row {i + 1} has several nonzero entries")
        x = A.rows[i][j]
        if x.sign() <= 0:
            raise NotMonomial(f"entry ({i + 1},{j + 1}) is not positive")
        if not x.is_unit():
            raise NotMonomial(f"entry ({i + 1},{j + 1}) = {x} is not a unit")
        images[j] = i
        diag[i] = x
    return MonomialMatrix(tuple(diag), Permutation(images))


def is_monomial(A: Matrix) -> bool:
    try:
        monomial_recognize(A)
    except NotMonomial:
        return False
    return True


def invert_monomial(M: MonomialMatrix) -> MonomialMatrix:
    return M.inverse()


def involution_classify(A: Matrix) -> InvolutionData:
    try:
        M = monomial_recognize(A)
    except NotMonomial as exc:
        raise NotInvolution(f"not in Gamma_n: {exc}") from None
    sigma = M.perm
    if not (sigma * sigma).is_identity:
        raise NotInvolution(f"{sigma} is not an involution")
    for i in range(M.n):
        if not (M.diag[i] * M.diag[sigma(i)]).is_one:
            raise NotInvolution(f"t_{i + 1} * t_{sigma(i) + 1} != 1")
    return InvolutionData(M.diag, sigma)


def commutes(A: Matrix, B: Matrix) -> bool:
    return A @ B == B @ A


def has_finite_order(M: Matrix, bound: int) -> bool:
    """True iff M^k = I for some 1 <= k <= bound; M must lie in Gamma_n."""
    mono = monomial_recognize(M)
    power = mono
    ident = MonomialMatrix.identity(mono.n, mono.ring)
    for _ in range(bound):
        if power == ident:
            return True
        power = power @ mono
    return False


def in_K(A: Matrix) -> bool:
    """Block shape diag(X_{n-1}, x) with x a positive unit."""
    n = A.n
    last = n - 1
    for k in range(last):
        if not A.rows[last][k].is_zero or not A.rows[k][last].is_zero:
            return False
    x = A.rows[last][last]
    return x.sign() > 0 and x.is_unit()


# -- exact linear algebra over the commutative instances (test oracles) -------

def _to_fraction_rows(A: Matrix) -> list[list[Fraction]]:
    return [[x.to_fraction() for x in r] for r in A.rows]


def _gauss_jordan(rows, zero, one, is_zero, inv):
    n = len(rows)
    aug = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not is_zero(aug[r][col])), None)
        if piv is None:
            raise NotAUnit("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = inv(aug[col][col])
        aug[col] = [x * p for x in aug[col]]
        for r in range(n):
            if r != col and not is_zero(aug[r][col]):
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [r[n:] for r in aug]


def exact_inverse(A: Matrix) -> Matrix:
    """Two-sided inverse over a commutative instance; NotAUnit if none exists in R."""
    ring = A.ring
    if ring is RingId.SKEW:
        raise UnsupportedRing("exact inverse is implemented for commutative rings only")
    if ring is RingId.RATFUN:
        rows = _gauss_jordan(
            [list(r) for r in A.rows], ring.zero, ring.one, lambda x: x.is_zero, lambda x: x.inverse()
        )
        return Matrix(rows, ring)
    rows = _gauss_jordan(_to_fraction_rows(A), Fraction(0), Fraction(1), lambda x: x == 0, lambda x: 1 / x)
    try:
        return Matrix([[ring.const(x) for x in r] for r in rows], ring)
    except ValueError:
        raise NotAUnit("inverse has non-dyadic entries") from None


def _det_fraction(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    m = [list(r) for r in rows]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        p = m[col][col]
        det *= p
        for r in range(col + 1, n):
            f = m[r][col]
            if f:
                f /= p
                m[r] = [a - f * b if b else a for a, b in zip(m[r], m[col])]
    return det


def _det_ratfun(A: Matrix) -> RatFun:
    # clear row denominators, then fraction-free Bareiss over Q[s]
    n = A.n
    scale_den = P.ONE
    m = []
    for r in A.rows:
        den = P.ONE
        for x in r:
            if x.den != P.ONE:
                den = P.exact_div(P.mul(den, x.den), P.gcd(den, x.den))
        scale_den = P.mul(scale_den, den)
        m.append([P.mul(x.num, P.exact_div(den, x.den)) for x in r])
    sign = 1
    prev = P.ONE
    for k in range(n - 1):
        if not m[k][k]:
            piv = next((r for r in range(k + 1, n) if m[r][k]), None)
            if piv is None:
                return RatFun()
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        pk = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            for j in range(k + 1, n):
                val = P.mul(m[i][j], pk)
                if mik and m[k][j]:
                    val = P.sub(val, P.mul(mik, m[k][j]))
                m[i][j] = P.exact_div(val, prev) if prev != P.ONE else val
        prev = pk
    num = m[n - 1][n - 1]
    if sign < 0:
        num = P.neg(num)
    return RatFun(num, scale_den)


def determinant(A: Matrix) -> RingElement:
    ring = A.ring
    if ring is RingId.SKEW:
        raise UnsupportedRing("no determinant over the skew ring")
    rows = A.rows
    n = A.n
    lower = all(rows[i][j].is_zero for i in range(n) for j in range(i + 1, n))
    if lower or all(rows[i][j].is_zero for i in range(n) for j in range(i)):
        det = ring.one
        for i in range(n):
            det = det * rows[i][i]
        return det
    if ring is RingId.RATFUN:
        return _det_ratfun(A)
    d = _det_fraction(_to_fraction_rows(A))
    if ring is RingId.DYADIC:
        return Dyadic.from_fraction(d)
    return ring.const(d)
