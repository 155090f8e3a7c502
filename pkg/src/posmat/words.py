"""Generator words for the semigroup generated by permutation matrices,
transvections B_ij(x) and positive diagonal matrices.

Words are evaluated left to right by column operations on the identity,
so evaluating a length-k word costs O(k n^2) rather than k matrix
products.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence, Union

from .matrices import Matrix, MonomialMatrix, Permutation
from .rings import RatFun, RingElement, RingId, Skew, scalar_from_json, unit_pool


@dataclass(frozen=True)
class Perm:
    sigma: Permutation

    def matrix(self, ring: RingId) -> Matrix:
        return self.sigma.matrix(ring)

    def to_json(self):
        return {"perm": self.sigma.to_json()}


@dataclass(frozen=True)
class Elem:
    i: int
    j: int
    x: RingElement

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("Elem needs i != j")
        if self.x.sign() < 0:
            raise ValueError(f"Elem parameter {self.x} is negative")

    def matrix(self, n: int) -> Matrix:
        return Matrix.transvection(n, self.i, self.j, self.x)

    def to_json(self):
        return {"elem": {"i": self.i + 1, "j": self.j + 1, "x": self.x.to_json()}}


@dataclass(frozen=True)
class Diag:
    d: tuple

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(self.d))
        for x in self.d:
            if x.sign() <= 0 or not x.is_unit():
                raise ValueError(f"Diag entry {x} is not a positive unit")

    def matrix(self) -> Matrix:
        return Matrix.diag(self.d)

    def to_json(self):
        return {"diag": [x.to_json() for x in self.d]}


Generator = Union[Perm, Elem, Diag]


def _apply_right(rows: list[list[RingElement]], g: Generator) -> None:
    """rows <- rows @ matrix(g), in place."""
    n = len(rows)
    if isinstance(g, Perm):
        # (X S)_{i, j} = X_{i, sigma(j)}
        img = g.sigma.images
        for r in range(n):
            row = rows[r]
            rows[r] = [row[img[j]] for j in range(n)]
    elif isinstance(g, Elem):
        # column j += column i * x
        x = g.x
        if x.is_zero:
            return
        for row in rows:
            a = row[g.i]
            if not a.is_zero:
                row[g.j] = row[g.j]._add(a._mul(x))
    else:
        for row in rows:
            for j, d in enumerate(g.d):
                if not row[j].is_zero:
                    row[j] = row[j]._mul(d)


@dataclass(frozen=True)
class GeneratorWord:
    n: int
    ring: RingId
    seq: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "seq", tuple(self.seq))

    def __add__(self, other: GeneratorWord) -> GeneratorWord:
        if (self.n, self.ring) != (other.n, other.ring):
            raise ValueError("words over different n or ring")
        return GeneratorWord(self.n, self.ring, self.seq + other.seq)

    def __len__(self):
        return len(self.seq)

    def eval(self) -> Matrix:
        return eval_word(self)

    def to_json(self) -> dict:
        return {"n": self.n, "ring": self.ring.value, "seq": [g.to_json() for g in self.seq]}

    @classmethod
    def from_json(cls, obj) -> GeneratorWord:
        ring = RingId(obj["ring"])
        n = int(obj["n"])
        seq = []
        for item in obj["seq"]:
            if "perm" in item:
                seq.append(Perm(Permutation.from_one_based(item["perm"])))
            elif "elem" in item:
                e = item["elem"]
                seq.append(Elem(int(e["i"]) - 1, int(e["j"]) - 1, scalar_from_json(e["x"], ring)))
            elif "diag" in item:
                seq.append(Diag(tuple(scalar_from_json(x, ring) for x in item["diag"])))
            else:
                raise ValueError(f"unknown generator {item}")
        return cls(n, ring, tuple(seq))


def eval_word(w: GeneratorWord) -> Matrix:
    ident = Matrix.identity(w.n, w.ring)
    rows = [list(r) for r in ident.rows]
    for g in w.seq:
        _apply_right(rows, g)
    return Matrix._raw(tuple(tuple(r) for r in rows), w.ring)


@dataclass(frozen=True)
class PEquivStep:
    P: GeneratorWord
    P_tilde: GeneratorWord
    Q: GeneratorWord
    Q_tilde: GeneratorWord
    A: Matrix
    A_next: Matrix

    def holds(self) -> bool:
        lhs = self.P.eval() @ self.A @ self.P_tilde.eval()
        rhs = self.Q.eval() @ self.A_next @ self.Q_tilde.eval()
        return lhs == rhs

    def to_json(self) -> dict:
        return {
            "P": self.P.to_json(),
            "P_tilde": self.P_tilde.to_json(),
            "Q": self.Q.to_json(),
            "Q_tilde": self.Q_tilde.to_json(),
            "A": self.A.to_json(),
            "A_next": self.A_next.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> PEquivStep:
        w = GeneratorWord.from_json
        return cls(w(obj["P"]), w(obj["P_tilde"]), w(obj["Q"]), w(obj["Q_tilde"]),
                   Matrix.from_json(obj["A"]), Matrix.from_json(obj["A_next"]))


@dataclass(frozen=True)
class PEquivChain:
    steps: tuple

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def to_json(self) -> dict:
        return {"steps": [s.to_json() for s in self.steps]}

    @classmethod
    def from_json(cls, obj) -> PEquivChain:
        return cls(tuple(PEquivStep.from_json(s) for s in obj["steps"]))


def verify_pequiv(chain: PEquivChain) -> bool:
    """Every step equation holds and consecutive steps share their matrix."""
    for prev, step in zip(chain.steps, chain.steps[1:]):
        if prev.A_next != step.A:
            return False
    return all(step.holds() for step in chain.steps)


def factor_monomial(M: MonomialMatrix) -> GeneratorWord:
    """Canonical two-letter word [Diag(d), Perm(sigma)]."""
    return GeneratorWord(M.n, M.ring, (Diag(M.diag), Perm(M.perm)))


# -- random generation ----------------------------------------------------------

def elem_pool(ring: RingId) -> list[RingElement]:
    """Transvection parameters: 1, 2, 1/2, 3/2 plus s, s+1 (RATFUN) or s, t (SKEW)."""
    pool = [ring.const(q) for q in (1, 2, "1/2", "3/2")]
    if ring is RingId.RATFUN:
        s = RatFun.s()
        pool += [s, s + 1]
    elif ring is RingId.SKEW:
        pool += [Skew.s(), Skew.t()]
    return pool


def diag_pool(ring: RingId) -> list[RingElement]:
    return unit_pool(ring)


def random_generator(n: int, ring: RingId, rng: random.Random, kinds: str = "ped") -> Generator:
    kind = rng.choice(kinds)
    if kind == "p":
        return Perm(Permutation.random(n, rng))
    if kind == "e":
        i, j = rng.sample(range(n), 2)
        return Elem(i, j, rng.choice(elem_pool(ring)))
    units = diag_pool(ring)
    one = ring.one
    # mostly ones keeps entries small
    return Diag(tuple(rng.choice(units) if rng.random() < 0.4 else one for _ in range(n)))


def random_word(n: int, ring: RingId, length: int, seed=None, *, rng: random.Random | None = None,
                kinds: str = "ped") -> GeneratorWord:
    """Reproducible pseudo-random word; pass either ``seed`` or an explicit ``rng``."""
    if length < 0:
        raise ValueError("length must be >= 0")
    if rng is None:
        rng = random.Random(seed)
    return GeneratorWord(n, ring, tuple(random_generator(n, ring, rng, kinds) for _ in range(length)))


def random_monomial(n: int, ring: RingId, rng: random.Random) -> MonomialMatrix:
    units = diag_pool(ring)
    diag = []
    for _ in range(n):
        d = rng.choice(units)
        if rng.random() < 0.3:
            d = d * rng.choice(units).inverse()
        diag.append(d)
    return MonomialMatrix(tuple(diag), Permutation.random(n, rng))


def words_for(seq: Sequence[Generator], n: int, ring: RingId) -> GeneratorWord:
    return GeneratorWord(n, ring, tuple(seq))
