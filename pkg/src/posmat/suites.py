"""Randomized property suites, one per structural property, run by ``posmat verify``.

Every suite draws its trials from a ``random.Random`` seeded by the run
seed, so a rerun with the same arguments reproduces the same counterexample.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .automorphisms import (
    FlipTable,
    obfuscated_oracle,
    oracle_from_triple,
    random_triple,
)
from .decompose import (
    NormalizationTrace,
    check_diagonal_shapes,
    stage_extract_c,
    stage_fix_permutations,
    stage_k_normalize,
)
from .errors import NotAutomorphism, NotInvolution, UnsupportedRing
from .matrices import (
    InvolutionData,
    Matrix,
    MonomialMatrix,
    Permutation,
    commutes,
    exact_inverse,
    in_K,
    involution_classify,
    is_monomial,
    is_nonnegative,
)
from .rings import RingElement, RingId, positive_pool, unit_pool
from .words import Elem, GeneratorWord, elem_pool, random_monomial, random_word

SUITES = ("1", "2", "3", "4", "5", "7", "8", "9", "10", "11", "12", "13", "theorem-identities")


@dataclass
class RunConfig:
    ring: RingId = RingId.Q
    n: int = 3
    trials: int = 100
    seed: int = 0
    word_count: int = 50
    output: str | None = None

    def validate(self) -> None:
        if self.n < 3:
            raise ValueError("n must be at least 3")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")


@dataclass
class SuiteResult:
    suite: str
    ring: RingId
    n: int
    trials: int = 0
    failures: int = 0
    counterexample: dict | None = None
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def fail(self, detail: dict) -> None:
        self.failures += 1
        if self.counterexample is None:
            self.counterexample = detail

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "ring": self.ring.value,
            "n": self.n,
            "trials": self.trials,
            "passed": self.trials - self.failures,
            "failed": self.failures,
            "ok": self.ok,
            "counterexample": _jsonable(self.counterexample),
            "notes": list(self.notes),
        }


def _jsonable(obj):
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return str(obj)


# -- shared generators -----------------------------------------------------------

def random_involution(n: int, ring: RingId, rng: random.Random) -> InvolutionData:
    points = list(range(n))
    rng.shuffle(points)
    images = list(range(n))
    t = [ring.one] * n
    units = unit_pool(ring)
    pairs = rng.randint(0, n // 2)
    for k in range(pairs):
        i, j = points[2 * k], points[2 * k + 1]
        images[i], images[j] = j, i
        u = rng.choice(units)
        t[i], t[j] = u, u.inverse()
    return InvolutionData(tuple(t), Permutation(images))


def random_nonmonomial_word(n: int, ring: RingId, rng: random.Random, length: int = 6) -> GeneratorWord:
    """Random word containing at least one transvection with a positive parameter."""
    w = random_word(n, ring, length, rng=rng)
    i, j = rng.sample(range(n), 2)
    x = rng.choice(elem_pool(ring))
    seq = list(w.seq)
    seq.insert(rng.randint(0, len(seq)), Elem(i, j, x))
    return GeneratorWord(n, ring, tuple(seq))


def _embed(X: Matrix, n: int, corner: RingElement) -> Matrix:
    ring = X.ring
    rows = [list(r) + [ring.zero] * (n - X.n) for r in X.rows]
    for k in range(X.n, n):
        row = [ring.zero] * n
        row[k] = corner if k == n - 1 else ring.one
        rows.append(row)
    return Matrix(rows, ring)


def random_k_member(n: int, ring: RingId, rng: random.Random) -> Matrix:
    inner = random_word(n - 1, ring, rng.randint(1, 8), rng=rng).eval()
    return _embed(inner, n, rng.choice(unit_pool(ring)))


def _normalized_random(n: int, ring: RingId, rng: random.Random):
    t = random_triple(n, ring, rng)
    oracle = oracle_from_triple(t)
    trace = NormalizationTrace()
    _, normalized = stage_fix_permutations(oracle, n, ring, rng=rng, trace=trace)
    return t, normalized, trace


# -- suites --------------------------------------------------------------------------

def suite_1(cfg: RunConfig, rng: random.Random) -> SuiteResult:
    """Nonnegative inverse exists iff the matrix is monomial."""
    ring, n = cfg.ring, cfg.n
    if not ring.commutative:
        raise UnsupportedRing("the inverse oracle is implemented for commutative rings only")
    res = SuiteResult("1", ring, n)
    for trial in range(cfg.trials):
        kinds = "pd" if trial % 2 == 0 else "ped"
        A = random_word(n, ring, rng.randint(1, 8), rng=rng, kinds=kinds).eval()
        inv = exact_inverse(A)
        res.trials += 1
        if is_nonnegative(inv) != is_monomial(A):
            res.fail({"A": A, "inverse": inv})
            continue
        B = random_nonmonomial_word(n, ring, rng).eval()
        res.trials += 1
        if is_monomial(B) or is_nonnegative(exact_inverse(B)):
            res.fail({"non_monomial": B, "inverse": exact_inverse(B)})
    return res


def suite_2(cfg: RunConfig, rng: random.Random) -> SuiteResult:
    """No positive element other than 1 has finite order (k <= 20)."""
    ring = cfg.ring
    res = SuiteResult("2", ring, cfg.n)
    pool = [x for x in positive_pool(ring) if not x.is_one]
    samples = list(pool)
    for _ in range(cfg.trials):
        x = rng.choice(pool)
        for _ in range(rng.randint(0, 2)):
            y = rng.choice(pool)
            x = x * y if rng.random() < 0.5 else x + y
        if not x.is_one:
            samples.append(x)
    for r in samples:
        res.trials += 1
        power = ring.one
        for k in range(1, 21):
            power = power * r
            if power.is_one:
                res.fail({"r": r, "k": k})
                break
    return res


def suite_3(cfg: RunConfig, rng: random.Random) -> SuiteResult:
    """Involutions classify back to their (t, sigma); non-involutions are rejected."""
    ring, n = cfg.ring, cfg.n
    res = SuiteResult("3", ring, n)
    for _ in range(cfg.trials):
        data = random_involution(n, ring, rng)
        A = data.to_matrix()
        res.trials += 1
        try:
            back = involution_classify(A)
            if back != data or not (A @ A).is_identity:
                res.fail({"expected": list(data.t), "sigma": data.sigma, "got": list(back.t)})
        except NotInvolution as exc:
            res.fail({"involution": A, "error": str(exc)})
        M = random_monomial(n, ring, rng)
        B = M.to_matrix()
        if (B @ B).is_identity:
            B = random_nonmonomial_word(n, ring, rng).eval()
        res.trials += 1
        try:
            involution_classify(B)
            res.fail({"accepted_non_involution": B})
        except NotInvolution:
            pass
    return res


def suite_4(cfg: RunConfig, rng: random.Random) -> SuiteResult:
    """Automorphisms keep monomial, diagonal and central diagonal matrices in place."""
    ring, n = cfg.ring, cfg.n
    res = SuiteResult("4", ring, n)
    witness = Matrix.diag([ring.const(2 ** (k + 1)) for k in range(n)])
    for _ in range(cfg.trials):
        oracle = oracle_from_triple(random_triple(n, ring, rng))
        res.trials += 1
        M = random_monomial(n, ring, rng).to_matrix()
        if not is_monomial(oracle(M)):
            res.fail({"monomial": M, "image": oracle(M)})
            continue
        D = Matrix.diag([rng.choice(unit_pool(ring)) for _ in range(n)])
        img = oracle(D)
        if not img.is_diagonal():
            res.fail({"diagonal": D, "image": img})
            continue
        Z = Matrix.diag([ring.const(rng.choice((1, 2, 3, "1/2"))) for _ in range(n)])
        img = oracle(Z)
        if not img.is_diagonal() or not all(x.is_central() for x in img.diagonal()):
            res.fail({"central_diagonal": Z, "image": img})
            continue
        img = oracle(witness)
        if not img.is_diagonal() or len(set(img.diagonal())) != n:
            res.fail({"witness_image": img})
            continue
        # a monomial commuting with the witness is diagonal
        G = random_monomial(n, ring, rng)
        if rng.random() < 0.5:
            G = MonomialMatrix(G.diag, Permutation.identity(n))
        if commutes(G.to_matrix(), witness) != G.perm.is_identity:
            res.fail({"centralizer": G.to_matrix()})
    return res


def suite_5(cfg: RunConfig, rng: random.Random) -> SuiteResult:
    """After one transposition the block subsemigroup K is mapped into itself."""
    ring, n = cfg.ring, cfg.n
    res = SuiteResult("5", ring, n)
    for _ in range(cfg.trials):
        oracle = oracle_from_triple(random_triple(n, ring, rng))
        res.trials += 1
        try:
            sigma = stage_k_normalize(oracle, n, ring)
        except NotAutomorphism as exc:
            res.fail({"stage": exc.reason, "witness": exc.witness})
            continue
        P = MonomialMatrix.from_perm(sigma, ring)
        for _ in range(3):
            X = random_k_member(n, ring, rng)
            img = P.conjugate(oracle(X))
            if not in_K(img):
                res.fail({"K_member": X, "image": img, "sigma": sigma})
                break
    return res


def suite_7(cfg: RunConfig, rng: random.Random) -> SuiteResult:
    """A monomial conjugation makes the oracle fix every permutation matrix."""
    ring, n = cfg.ring, cfg.n
    res = SuiteResult("7", ring, n)
    for _ in range(cfg.trials):
        res.trials += 1
        try:
            _, normalized, trace = _normalized_random(n, ring, rng)
        except NotAutomorphism as exc:
            res.fail({"reason": exc.reason, "witness": exc.witness})
            continue
        if not trace.beta.is_one:
            res.fail({"beta": trace.beta})
            continue
        for _ in range(5):
            S = Permutation.random(n, rng).matrix(ring)
            if normalized(S) != S:
                res.fail({"S": S, "image": normalized(S)})
                break
    return res


def suite_8(cfg: RunConfig, rng: random.Random) -> SuiteResult:
    """diag[a,b,..,b] goes to diag[g,d,..,d], with g != d iff a != b."""
    ring, n = cfg.ring, cfg.n
    res = SuiteResult("8", ring, n)
    units = unit_pool(ring)
    for _ in range(cfg.trials):
        _, normalized, _ = _normalized_random(n, ring, rng)
        a, b = rng.choice(units), rng.choice(units)
        X = Matrix.diag([a] + [b] * (n - 1))
        img = normalized(X)
        res.trials += 1
        d = img.diagonal()
        shape = img.is_diagonal() and len(set(d[1:])) == 1
        if not shape or (d[0] == d[1]) != (a == b):
            res.fail({"alpha": a, "beta": b, "image": img})
        elif a.is_central() and b.is_central() and not (d[0].is_central() and d[1].is_central()):
            res.fail({"alpha": a, "beta": b, "image": img, "problem": "not central"})
    return res


def suite_9(cfg: RunConfig, rng: random.Random) -> SuiteResult:
    """A 2x2 block stays a 2x2 block next to a central scalar block."""
    ring, n = cfg.ring, cfg.n
    res = SuiteResult("9", ring, n)
    for _ in range(cfg.trials):
        _, normalized, _ = _normalized_random(n, ring, rng)
        Y = random_word(2, ring, rng.randint(1, 6), rng=rng).eval()
        X = _embed(Y, n, ring.one)
        img = normalized(X)
        res.trials += 1
        rows = img.rows
        outside = [(i, j) for i in range(n) for j in range(n) if (i >= 2 or j >= 2) and i != j
                   and not rows[i][j].is_zero]
        tail = [rows[k][k] for k in range(2, n)]
        if outside or len(set(tail)) != 1 or not tail[0].is_central():
            res.fail({"X": X, "image": img})
    return res


def suite_10(cfg: RunConfig, rng: random.Random) -> SuiteResult:
    """Central x: diag[x,1,..,1] goes to diag[xi,eta,..,eta] with central xi, eta."""
    ring, n = cfg.ring, cfg.n
    res = SuiteResult("10", ring, n)
    central = [x for x in unit_pool(ring) if x.is_central()]
    for _ in range(cfg.trials):
        _, normalized, trace = _normalized_random(n, ring, rng)
        x = rng.choice(central)
        res.trials += 1
        try:
            check_diagonal_shapes(normalized, n, ring, [x], trace)
        except NotAutomorphism as exc:
            res.fail({"x": x, "reason": exc.reason, "witness": exc.witness})
    return res


def suite_11(cfg: RunConfig, rng: random.Random) -> SuiteResult:
    """nu(x) = xi(x) / eta(x) separates distinct central x."""
    ring, n = cfg.ring, cfg.n
    res = SuiteResult("11", ring, n)
    central = [x for x in unit_pool(ring) if x.is_central()]
    for _ in range(cfg.trials):
        _, normalized, _ = _normalized_random(n, ring, rng)
        x1, x2 = rng.sample(central, 2)
        nus = []
        for x in (x1, x2):
            d = normalized(Matrix.diag([x] + [ring.one] * (n - 1))).diagonal()
            nus.append(d[0] * d[1].inverse())
        res.trials += 1
        if nus[0] == nus[1]:
            res.fail({"x1": x1, "x2": x2, "nu": nus[0]})
    return res


def suite_12(cfg: RunConfig, rng: random.Random) -> SuiteResult:
    """B_12(x) goes to an upper transvection B_12(c(x)), and nu(2) = 2."""
    ring, n = cfg.ring, cfg.n
    res = SuiteResult("12", ring, n)
    pool = positive_pool(ring, include_zero=True)
    two = ring.const(2)
    for _ in range(cfg.trials):
        _, normalized, trace = _normalized_random(n, ring, rng)
        sample = rng.sample(pool, 3)
        res.trials += 1
        try:
            stage_extract_c(normalized, n, ring, sample)
            check_diagonal_shapes(normalized, n, ring, [two], trace)
        except NotAutomorphism as exc:
            res.fail({"reason": exc.reason, "witness": exc.witness})
            continue
        if trace.nu_samples[two] != two:
            res.fail({"nu(2)": trace.nu_samples[two]})
    return res


def suite_13(cfg: RunConfig, rng: random.Random) -> SuiteResult:
    """The flip table is rejected with c(x)^2 + c(x^2) != 0; genuine oracles are not."""
    ring, n = cfg.ring, cfg.n
    res = SuiteResult("13", ring, n)
    pool = positive_pool(ring)
    for _ in range(cfg.trials):
        sample = rng.sample(pool, rng.randint(1, 4))
        oracle, _ = obfuscated_oracle([FlipTable()], n, ring, seed=rng.getrandbits(32))
        _, normalized = stage_fix_permutations(oracle, n, ring, rng=rng)
        res.trials += 1
        try:
            stage_extract_c(normalized, n, ring, sample)
            res.fail({"flip_accepted_on": sample})
            continue
        except NotAutomorphism as exc:
            w = exc.witness
            if not isinstance(w, dict) or w["c(x)^2+c(x^2)"].is_zero or w["identity_holds"]:
                res.fail({"reason": exc.reason, "witness": w})
                continue
        _, genuine, _ = _normalized_random(n, ring, rng)
        try:
            stage_extract_c(genuine, n, ring, sample)
        except NotAutomorphism as exc:
            res.fail({"genuine_rejected": exc.reason, "witness": exc.witness})
    return res


def suite_theorem_identities(cfg: RunConfig, rng: random.Random) -> SuiteResult:
    """Generator identities used when assembling the standard form."""
    ring, n = cfg.ring, cfg.n
    res = SuiteResult("theorem-identities", ring, n)
    pool = positive_pool(ring)

    def B(i, j, x):
        return Matrix.transvection(n, i, j, x)

    swap23 = Permutation.transposition(n, 1, 2).matrix(ring)
    for _ in range(cfg.trials):
        x1, x2 = rng.choice(pool), rng.choice(pool)
        res.trials += 1
        if B(0, 1, x1) @ B(0, 1, x2) != B(0, 1, x1 + x2):
            res.fail({"identity": "additivity", "x1": x1, "x2": x2})
            continue
        if B(0, 2, x1) @ B(2, 1, x2) != B(2, 1, x2) @ B(0, 2, x1) @ B(0, 1, x1 * x2):
            res.fail({"identity": "commutator", "x1": x1, "x2": x2})
            continue
        if swap23 @ B(0, 1, x1) @ swap23 != B(0, 2, x1):
            res.fail({"identity": "transport", "x": x1})
            continue
        u = random_word(n, ring, rng.randint(0, 6), rng=rng)
        v = random_word(n, ring, rng.randint(0, 6), rng=rng)
        if (u + v).eval() != u.eval() @ v.eval():
            res.fail({"identity": "eval homomorphism", "u": u, "v": v})
            continue
        t = random_triple(n, ring, rng)
        S = Permutation.random(n, rng).matrix(ring)
        if t.c.apply_matrix(S) != S:
            res.fail({"identity": "ring maps fix permutation matrices", "S": S})
            continue
        X, Y = u.eval(), v.eval()
        if t.apply(X @ Y) != t.apply(X) @ t.apply(Y):
            res.fail({"identity": "standard triple is multiplicative", "triple": t, "X": X, "Y": Y})
    return res


_REGISTRY: dict[str, Callable[[RunConfig, random.Random], SuiteResult]] = {
    "1": suite_1,
    "2": suite_2,
    "3": suite_3,
    "4": suite_4,
    "5": suite_5,
    "7": suite_7,
    "8": suite_8,
    "9": suite_9,
    "10": suite_10,
    "11": suite_11,
    "12": suite_12,
    "13": suite_13,
    "theorem-identities": suite_theorem_identities,
}


def run_suite(suite_id: str, cfg: RunConfig) -> SuiteResult:
    cfg.validate()
    key = str(suite_id)
    if key not in _REGISTRY:
        raise ValueError(f"unknown suite {suite_id!r}; choose from {', '.join(SUITES)}")
    return _REGISTRY[key](cfg, random.Random(f"{cfg.seed}:{key}"))
