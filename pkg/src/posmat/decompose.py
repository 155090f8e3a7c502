"""Decompose a black-box automorphism into a standard triple.

The pipeline only ever queries the oracle on concrete matrices.  It first
conjugates the oracle by a monomial matrix until every permutation matrix
is fixed, then reads off the entry map on transvections, strips it, reads
the remaining central scaling on diagonal matrices, and finally checks the
assembled triple against the oracle on random words.

Every structural claim along the way is checked on witnesses; a failed
check raises :class:`NotAutomorphism` carrying the offending data.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .automorphisms import (
    AutomorphismOracle,
    CentralHomDescriptor,
    RingMapDescriptor,
    StandardTriple,
    prime_exponents,
)
from .errors import InvalidTriple, NotAutomorphism, NotMonomial, UnfittableRingMap
from .matrices import Matrix, MonomialMatrix, Permutation, monomial_recognize
from .rings import RatFun, RingElement, RingId, Skew, positive_pool, unit_pool
from .words import GeneratorWord, random_word


@dataclass
class NormalizationTrace:
    sigma_K: Permutation | None = None
    rho: Permutation | None = None
    tau6: Permutation | None = None
    T: tuple | None = None
    beta: RingElement | None = None
    nu_samples: dict = field(default_factory=dict)
    xi_eta_samples: dict = field(default_factory=dict)
    c_samples: dict = field(default_factory=dict)
    gamma_samples: dict = field(default_factory=dict)
    gauge: RingElement | None = None
    diagnostics: list = field(default_factory=list)

    def passed(self, name: str) -> None:
        self.diagnostics.append(name)

    def to_json(self) -> dict:
        def perm(p):
            return None if p is None else p.to_json()

        return {
            "sigma_K": perm(self.sigma_K),
            "rho": perm(self.rho),
            "tau6": perm(self.tau6),
            "T": None if self.T is None else [str(t) for t in self.T],
            "beta": None if self.beta is None else str(self.beta),
            "nu": {str(k): str(v) for k, v in self.nu_samples.items()},
            "xi_eta": {str(k): [str(a), str(b)] for k, (a, b) in self.xi_eta_samples.items()},
            "c": {str(k): str(v) for k, v in self.c_samples.items()},
            "gamma": {str(k): str(v) for k, v in self.gamma_samples.items()},
            "gauge": None if self.gauge is None else str(self.gauge),
            "diagnostics": list(self.diagnostics),
        }


@dataclass
class Residual:
    word: GeneratorWord
    lhs: Matrix
    rhs: Matrix
    equal: bool

    def to_json(self) -> dict:
        out = {"word": self.word.to_json(), "equal": self.equal}
        if not self.equal:
            out["lhs"] = self.lhs.to_json()
            out["rhs"] = self.rhs.to_json()
        return out


def _witness_json(w):
    if w is None:
        return None
    if hasattr(w, "to_json"):
        return w.to_json()
    if isinstance(w, dict):
        return {str(k): _witness_json(v) for k, v in w.items()}
    if isinstance(w, (list, tuple)):
        return [_witness_json(v) for v in w]
    if isinstance(w, (bool, int)):
        return w
    return str(w)


@dataclass
class DecompositionReport:
    triple: StandardTriple | None
    trace: NormalizationTrace
    residual_check: list
    query_count: int
    verdict: str
    stage: str | None = None
    reason: str | None = None
    witness: object = None

    @property
    def ok(self) -> bool:
        return self.verdict == "OK"

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "triple": None if self.triple is None else self.triple.to_json(),
            "trace": self.trace.to_json(),
            "residuals": [r.to_json() for r in self.residual_check],
            "queries": self.query_count,
        }
        if not self.ok:
            out["stage"] = self.stage
            out["reason"] = self.reason
            out["witness"] = _witness_json(self.witness)
        return out


@dataclass
class DecomposeConfig:
    word_count: int = 50
    max_word_length: int = 12
    seed: int = 0
    force_k: bool = False
    verify_pairs: int = 1000
    random_perm_checks: int = 20
    sample_pool: list | None = None
    unit_pool: list | None = None


# -- helpers -----------------------------------------------------------------------

def _perm_matrix(sigma: Permutation, ring: RingId) -> Matrix:
    return Matrix.permutation(sigma, ring)


def _recognize(X: Matrix, stage: str, what: str) -> MonomialMatrix:
    try:
        return monomial_recognize(X)
    except NotMonomial:
        raise NotAutomorphism(stage, f"image of {what} is not monomial", X) from None


def conjugated(oracle: Callable[[Matrix], Matrix], N: MonomialMatrix, n: int, ring: RingId) -> AutomorphismOracle:
    """The oracle X -> N oracle(X) N^-1."""
    return AutomorphismOracle(lambda X: N.conjugate(oracle(X)), n, ring, name="normalized")


def _is_transposition(p: Permutation) -> bool:
    return p.cycle_type() == (2,)


def _diag_matrix(entries, ring: RingId) -> Matrix:
    return Matrix.diag([ring.const(x) if not isinstance(x, RingElement) else x for x in entries])


def _lone_offdiagonal(Y: Matrix) -> tuple[int, int] | None:
    """(i, j) if Y is the identity plus one nonzero off-diagonal entry."""
    if not all(d.is_one for d in Y.diagonal()):
        return None
    off = Y.nonzero_offdiagonal()
    return off[0] if len(off) == 1 else None


# -- monomial diagnostics ------------------------------------------------------------

def check_monomial_images(oracle, n: int, ring: RingId, trace: NormalizationTrace | None = None) -> None:
    """Diagonal witness diag[2, 4, ..., 2^n] must map to a diagonal matrix with
    pairwise distinct entries; permutation images must stay monomial."""
    stage = "monomial_images"
    W = _diag_matrix([2 ** (k + 1) for k in range(n)], ring)
    img = oracle(W)
    if not img.is_diagonal():
        raise NotAutomorphism(stage, "image of diag[2,4,...,2^n] is not diagonal", img)
    d = img.diagonal()
    if len(set(d)) != n:
        raise NotAutomorphism(stage, "image of diag[2,4,...,2^n] has repeated diagonal entries", img)
    cyc = Permutation.cycle(n, range(n))
    _recognize(oracle(_perm_matrix(cyc, ring)), stage, "the n-cycle permutation matrix")
    if trace is not None:
        trace.passed("monomial images stay monomial; distinct diagonal witness stays distinct")


# -- stage: K normalization -----------------------------------------------------------

def stage_k_normalize(oracle, n: int, ring: RingId) -> Permutation:
    """Transposition moving the odd diagonal entry of oracle(diag[1,..,1,2]) to the last slot."""
    stage = "k_normalize"
    if n < 3:
        raise ValueError("n must be at least 3")
    A = _diag_matrix([1] * (n - 1) + [2], ring)
    img = oracle(A)
    if not img.is_diagonal():
        raise NotAutomorphism(stage, "image of central-type diagonal is not of shape γ…γδγ…γ", img)
    d = img.diagonal()
    odd = [i for i in range(n) if sum(1 for x in d if x == d[i]) == 1]
    if len(odd) != 1 or len(set(d)) != 2:
        raise NotAutomorphism(stage, "image of central-type diagonal is not of shape γ…γδγ…γ", img)
    i = odd[0]
    if i == n - 1:
        return Permutation.identity(n)
    return Permutation.transposition(n, i, n - 1)


# -- stage: fix permutation matrices ----------------------------------------------------

def _rebuild_conjugator(images: dict[int, Permutation], points: int, n: int, stage: str) -> Permutation:
    """rho with rho (0 k) rho^-1 = images[k] for k = 1..points-1."""
    first, second = images[1], images[2]
    shared = first.moved() & second.moved()
    if len(shared) != 1:
        raise NotAutomorphism(stage, "φ not an automorphism",
                              {"phi(0,1)": first.to_json(), "phi(0,2)": second.to_json()})
    (p,) = shared
    rho = [None] * n
    rho[0] = p
    for k in range(1, points):
        moved = images[k].moved()
        if p not in moved:
            raise NotAutomorphism(stage, "φ not an automorphism",
                                  {"k": k + 1, "phi(0,k)": images[k].to_json()})
        (q,) = moved - {p}
        rho[k] = q
    for k in range(points, n):
        rho[k] = k
    if sorted(rho) != list(range(n)):
        raise NotAutomorphism(stage, "φ not an automorphism", {"rho": [x if x is None else x + 1 for x in rho]})
    return Permutation(rho)


def stage_fix_permutations(oracle, n: int, ring: RingId, *, force_k: bool = False,
                           rng: random.Random | None = None,
                           trace: NormalizationTrace | None = None):
    """Monomial conjugator N with N oracle(S) N^-1 = S for every permutation matrix S.

    Returns ``(N, normalized_oracle)``.
    """
    stage = "fix_permutations"
    if n < 3:
        raise ValueError("n must be at least 3")
    trace = trace if trace is not None else NormalizationTrace()
    rng = rng if rng is not None else random.Random(0)
    N = MonomialMatrix.identity(n, ring)
    current = oracle

    points = n
    if n == 6 or force_k:
        sigma_K = stage_k_normalize(oracle, n, ring)
        trace.sigma_K = sigma_K
        N = MonomialMatrix.from_perm(sigma_K, ring)
        current = conjugated(oracle, N, n, ring)
        trace.passed("central-type diagonal keeps its shape")
        if n == 6:
            points = n - 1

    # phi on the transpositions (0 k)
    images = {}
    for k in range(1, n):
        t = Permutation.transposition(n, 0, k)
        img = _recognize(current(_perm_matrix(t, ring)), stage, f"S_(1,{k + 1})")
        if n == 6 and img.perm.cycle_type() == (2, 2, 2):
            raise NotAutomorphism(stage, "n=6 outer case detected",
                                  {"transposition": t.to_json(), "image": img.perm.to_json()})
        if not _is_transposition(img.perm):
            raise NotAutomorphism(stage, "φ not an automorphism",
                                  {"transposition": t.to_json(), "image": img.perm.to_json()})
        images[k] = img.perm

    rho = _rebuild_conjugator(images, points, n, stage)
    if points < n:
        trace.tau6 = rho
        # the remaining generator must be fixed once the point stabilizer is
        expected = rho * Permutation.transposition(n, 0, n - 1) * rho.inverse()
        if images[n - 1] != expected:
            raise NotAutomorphism(stage, "n=6 outer case detected",
                                  {"phi(1,6)": images[n - 1].to_json(), "expected": expected.to_json()})
    for k in range(1, n):
        expected = rho * Permutation.transposition(n, 0, k) * rho.inverse()
        if images[k] != expected:
            raise NotAutomorphism(stage, "φ not an automorphism",
                                  {"k": k + 1, "image": images[k].to_json(), "expected": expected.to_json()})
    trace.rho = rho
    N = MonomialMatrix.from_perm(rho.inverse(), ring) @ N
    current = conjugated(oracle, N, n, ring)

    # diagonal correction so that the n-cycle is fixed exactly
    cyc = Permutation.cycle(n, range(n))
    img = _recognize(current(_perm_matrix(cyc, ring)), stage, "the n-cycle")
    if img.perm != cyc:
        raise NotAutomorphism(stage, "φ not an automorphism",
                              {"cycle": cyc.to_json(), "image": img.perm.to_json()})
    alpha = img.diag
    prod = ring.one
    for k in range(n - 1, -1, -1):
        prod = prod * alpha[k]
    if not prod.is_one:
        raise NotAutomorphism(stage, "product of α's ≠ 1", {"alpha": list(alpha), "product": prod})
    t = [ring.one] * n
    for k in range(n - 2, -1, -1):
        t[k] = t[k + 1] * alpha[k + 1]
    trace.T = tuple(t)
    N = MonomialMatrix.from_diag(t) @ N
    current = conjugated(oracle, N, n, ring)

    # the transposition (0 1) is now an involution D S_tau; its diagonal must be trivial
    tau = Permutation.transposition(n, 0, 1)
    img = _recognize(current(_perm_matrix(tau, ring)), stage, "S_(1,2)")
    if img.perm != tau:
        raise NotAutomorphism(stage, "φ not an automorphism", {"image": img.perm.to_json()})
    beta = img.diag[0]
    trace.beta = beta
    # S_rho equals the ordered product of rho^-k tau rho^k; apply the image of tau
    D = img.to_matrix()
    R = _perm_matrix(cyc, ring)
    prod_m = Matrix.identity(n, ring)
    for k in range(n - 2, -1, -1):
        Rk = _perm_matrix(cyc ** k, ring)
        Rk_inv = _perm_matrix(cyc ** (-k), ring)
        prod_m = prod_m @ (Rk_inv @ D @ Rk)
    if not beta.is_one or any(not d.is_one for d in img.diag) or prod_m != R:
        raise NotAutomorphism(stage, "β ≠ 1", {"beta": beta, "image": D, "product": prod_m})
    trace.passed("β = 1")

    # post-check on generators and random permutations
    checks = [tau, cyc] + [Permutation.random(n, rng) for _ in range(20)]
    for sigma in checks:
        S = _perm_matrix(sigma, ring)
        out = current(S)
        if out != S:
            raise NotAutomorphism(stage, "φ not an automorphism", {"sigma": sigma.to_json(), "image": out})
    trace.passed("normalized oracle fixes permutation matrices")
    return N, current


# -- diagonal/block diagnostics ------------------------------------------------------

def check_diagonal_shapes(oracle, n: int, ring: RingId, units: list[RingElement],
                          trace: NormalizationTrace) -> None:
    """Shape checks on a permutation-fixing oracle; records xi, eta and nu."""
    stage = "diagonal_shapes"
    one = ring.one
    # distinct diagonal entries stay distinct
    img = oracle(_diag_matrix([2, 3] + [1] * (n - 2), ring))
    if not img.is_diagonal() or img[0, 0] == img[1, 1]:
        raise NotAutomorphism(stage, "distinct diagonal entries collapsed", img)
    trace.passed("distinct diagonal entries stay distinct")

    # diag[x, 1, ..., 1] -> diag[xi, eta, ..., eta]; 4 joins 2 as a witness for nu
    for x in dict.fromkeys(list(units) + [ring.const(4)]):
        img = oracle(Matrix.diag([x] + [one] * (n - 1)))
        d = img.diagonal()
        if not img.is_diagonal() or len(set(d[1:])) != 1:
            raise NotAutomorphism(stage, "diag[x,1,…,1] image is not diag[ξ,η,…,η]", img)
        xi, eta = d[0], d[1]
        if x.is_central() and not (xi.is_central() and eta.is_central()):
            raise NotAutomorphism(stage, "central x has noncentral ξ or η", {"x": x, "image": img})
        trace.xi_eta_samples[x] = (xi, eta)
        trace.nu_samples[x] = xi * eta.inverse()
    trace.passed("central diagonal images have central entries")

    nus = list(trace.nu_samples.values())
    if len(set(nus)) != len(nus):
        seen = {}
        for x, v in trace.nu_samples.items():
            if v in seen:
                raise NotAutomorphism(stage, "ν not injective on the pool", {"x1": seen[v], "x2": x, "nu": v})
            seen[v] = x
    trace.passed("ν injective on the pool")
    two = ring.const(2)
    if two in trace.nu_samples and trace.nu_samples[two] != two:
        raise NotAutomorphism(stage, "ν(2) ≠ 2", {"nu(2)": trace.nu_samples[two]})
    trace.passed("ν(2) = 2")

    # a 2x2 block stays a block with a central scalar elsewhere
    B = Matrix.transvection(n, 0, 1, one)
    img = oracle(B)
    rows = img.rows
    outside = [(i, j) for i in range(n) for j in range(n)
               if (i >= 2 or j >= 2) and i != j and not rows[i][j].is_zero]
    tail = [rows[i][i] for i in range(2, n)]
    if outside or len(set(tail)) != 1 or not tail[0].is_central():
        raise NotAutomorphism(stage, "block shape violated for B_12(1)", img)
    trace.passed("2x2 block shape preserved")


# -- stage: entry map on transvections ---------------------------------------------------

def closed_pool(base: list[RingElement]) -> list[RingElement]:
    """base together with all pairwise sums and products, deduplicated in order."""
    out = list(dict.fromkeys(base))
    seen = set(out)
    for x in base:
        for y in base:
            for z in (x + y, x * y):
                if z not in seen:
                    seen.add(z)
                    out.append(z)
    return out


def _flip_witness(oracle, n: int, ring: RingId, x: RingElement) -> dict:
    """Evaluate the identity B13(x)B32(x) = B32(x)B13(x)B12(x^2) under a flip reading."""
    cx = _read_entry(oracle(Matrix.transvection(n, 0, 1, x)), 1, 0)
    cxx = _read_entry(oracle(Matrix.transvection(n, 0, 1, x * x)), 1, 0)
    lhs = Matrix.transvection(n, 2, 0, cx) @ Matrix.transvection(n, 1, 2, cx)
    rhs = Matrix.transvection(n, 1, 2, cx) @ Matrix.transvection(n, 2, 0, cx) @ Matrix.transvection(n, 1, 0, cxx)
    value = cx * cx + cxx
    return {"x": x, "c(x)": cx, "c(x^2)": cxx, "c(x)^2+c(x^2)": value, "lhs": lhs, "rhs": rhs,
            "identity_holds": lhs == rhs}


def _read_entry(Y: Matrix, i: int, j: int) -> RingElement:
    return Y[i, j]


def stage_extract_c(oracle, n: int, ring: RingId, sample_pool: list[RingElement]) -> dict:
    """c(x) read from oracle(B_12(x)) = B_12(c(x)) for every x in the pool."""
    stage = "extract_c"
    table = {}
    for x in sample_pool:
        Y = oracle(Matrix.transvection(n, 0, 1, x))
        if x.is_zero:
            if not Y.is_identity:
                raise NotAutomorphism(stage, "image not a transvection", Y)
            table[x] = ring.zero
            continue
        pos = _lone_offdiagonal(Y)
        if pos == (1, 0):
            positive = [y for y in sample_pool if not y.is_zero]
            witness_x = positive[0]
            witness = _flip_witness(oracle, n, ring, witness_x)
            raise NotAutomorphism(stage, "flip case: commutator identity forces c ≡ 0", witness)
        if pos != (0, 1):
            raise NotAutomorphism(stage, "image not a transvection", {"x": x, "image": Y})
        table[x] = Y[0, 1]
    return table


@dataclass
class VerifyResult:
    ok: bool
    witness: dict | None = None
    pairs_checked: int = 0

    def __bool__(self):
        return self.ok


def verify_c(c_samples: dict, ring: RingId, pairs: int = 1000, rng: random.Random | None = None) -> VerifyResult:
    """Additivity, multiplicativity, c(1) = 1 and monotonicity on sampled pairs."""
    rng = rng if rng is not None else random.Random(0)
    one = ring.one
    if one in c_samples and not c_samples[one].is_one:
        return VerifyResult(False, {"check": "c(1) = 1", "x": one, "c(x)": c_samples[one]})
    keys = list(c_samples)
    candidates = [(x, y) for x in keys for y in keys if x + y in c_samples and x * y in c_samples]
    if not candidates:
        return VerifyResult(True, None, 0)
    for _ in range(pairs):
        x, y = rng.choice(candidates)
        cx, cy = c_samples[x], c_samples[y]
        if c_samples[x + y] != cx + cy:
            return VerifyResult(False, {"check": "additive", "x": x, "y": y,
                                        "c(x+y)": c_samples[x + y], "c(x)+c(y)": cx + cy})
        if c_samples[x * y] != cx * cy:
            return VerifyResult(False, {"check": "multiplicative", "x": x, "y": y,
                                        "c(xy)": c_samples[x * y], "c(x)c(y)": cx * cy})
        if (x < y) != (cx < cy):
            return VerifyResult(False, {"check": "order", "x": x, "y": y, "c(x)": cx, "c(y)": cy})
    return VerifyResult(True, None, pairs)


# -- fitting -------------------------------------------------------------------------

def fit_ring_map(c_samples: dict, ring: RingId) -> tuple[RingMapDescriptor, RingElement]:
    """Catalog ring map ``c`` and gauge ``z`` with table(x) = z c(x) z^-1.

    The gauge is 1 except over SKEW, where a noncentral scalar left over from
    the normalization may twist the table by conjugation with a power of s.
    """
    stage = "fit_c"
    one = ring.one
    if ring in (RingId.Q, RingId.DYADIC):
        c, z = RingMapDescriptor(ring), one
    elif ring is RingId.RATFUN:
        s = RatFun.s()
        if s not in c_samples:
            raise UnfittableRingMap(stage, "pool lacks s", c_samples)
        img = c_samples[s]
        if img.den != RatFun.s().den or img.degree() != 1 or len(img.num) != 2:
            raise UnfittableRingMap(stage, "c(s) is not affine in s", c_samples)
        b, a = img.num
        if a <= 0:
            raise UnfittableRingMap(stage, "c(s) has nonpositive slope", c_samples)
        c, z = RingMapDescriptor(ring, a, b), one
    else:
        s, t = Skew.s(), Skew.t()
        if s not in c_samples or t not in c_samples:
            raise UnfittableRingMap(stage, "pool lacks s or t", c_samples)
        cs, ct = c_samples[s], c_samples[t]
        if [k for k, _ in cs.terms] != [0] or [k for k, _ in ct.terms] != [1]:
            raise UnfittableRingMap(stage, "c(s) or c(t) leaves the expected t-degree", c_samples)
        ratio = ct.coefficient(1)
        if not ratio.is_constant:
            raise UnfittableRingMap(stage, "c(t) is not a rational multiple of t", c_samples)
        r = ratio.to_fraction()
        exps = prime_exponents(r)
        if r <= 0 or set(exps) - {2}:
            raise UnfittableRingMap(stage, "c(t)/t is not a power of 2", c_samples)
        # conjugation by s^j sends t to 2^-j t and fixes s; conjugation by a
        # power of t is itself affine, so it is absorbed into the slope
        j = -exps.get(2, 0)
        slope = cs.coefficient(0)
        if slope.den != RatFun.s().den or slope.degree() != 1 or len(slope.num) != 2 or slope.num[0] != 0:
            raise UnfittableRingMap(stage, "c(s) is not a multiple of s", c_samples)
        a = slope.num[1]
        if a <= 0:
            raise UnfittableRingMap(stage, "c(s) has nonpositive slope", c_samples)
        c = RingMapDescriptor(ring, a)
        z = Skew.s() ** j
    for x, y in c_samples.items():
        if z * c(x) != y * z:
            raise UnfittableRingMap(stage, "table disagrees with the fitted map", {"x": x, "table": y})
    return c, z


def stage_extract_gamma(oracle, n: int, ring: RingId, units: list[RingElement]) -> dict:
    """gamma(a) read from oracle(diag[a,1,..,1]) = diag[a g, g, .., g]."""
    stage = "extract_gamma"
    one = ring.one
    table = {}

    def read(a):
        img = oracle(Matrix.diag([a] + [one] * (n - 1)))
        d = img.diagonal()
        g = d[1]
        if not img.is_diagonal() or len(set(d[1:])) != 1 or d[0] != a * g:
            raise NotAutomorphism(stage, "diagonal image shape violated", {"alpha": a, "image": img})
        if not g.is_central():
            raise NotAutomorphism(stage, "γ not central/multiplicative", {"alpha": a, "gamma": g, "image": img})
        return g

    for a in units:
        table[a] = read(a)
    for a in units:
        for b in units:
            ab = a * b
            g = table[ab] if ab in table else read(ab)
            table.setdefault(ab, g)
            if g != table[a] * table[b]:
                raise NotAutomorphism(stage, "γ not central/multiplicative",
                                      {"a": a, "b": b, "gamma(ab)": g, "gamma(a)gamma(b)": table[a] * table[b]})
    return table


def fit_gamma(gamma_samples: dict, ring: RingId) -> CentralHomDescriptor:
    stage = "fit_gamma"
    if all(g.is_one for g in gamma_samples.values()):
        return CentralHomDescriptor.trivial(ring)
    if ring is RingId.SKEW:
        raise UnfittableRingMap(stage, "nontrivial scaling over SKEW is outside the catalog", gamma_samples)
    gamma = {}
    kappa = Fraction(1)
    for a, g in gamma_samples.items():
        if isinstance(g, RatFun) and not g.is_constant:
            raise UnfittableRingMap(stage, "γ takes a nonconstant value", {"alpha": a, "gamma": g})
    for a, g in gamma_samples.items():
        if isinstance(a, RatFun) and not a.is_constant:
            continue
        q = a.to_fraction()
        if q.denominator == 1 and len(prime_exponents(q)) == 1 and list(prime_exponents(q).values()) == [1]:
            gamma[q.numerator] = g.to_fraction()
    if ring is RingId.RATFUN:
        s = RatFun.s()
        if s in gamma_samples:
            kappa = gamma_samples[s].to_fraction()
    hom = CentralHomDescriptor(ring, gamma, kappa)
    for a, g in gamma_samples.items():
        if ring.const(hom.value(a)) != g:
            raise UnfittableRingMap(stage, "γ table disagrees with the fitted homothety",
                                    {"alpha": a, "table": g, "fitted": hom.value(a)})
    return hom


# -- driver --------------------------------------------------------------------------

def residual_check(oracle, triple: StandardTriple, count: int, max_length: int,
                   rng: random.Random) -> list[Residual]:
    out = []
    for _ in range(count):
        w = random_word(triple.n, triple.ring, rng.randint(1, max_length), rng=rng)
        X = w.eval()
        lhs = oracle(X)
        rhs = triple.apply(X)
        out.append(Residual(w, lhs, rhs, lhs == rhs))
    return out


def decompose(oracle, n: int, ring: RingId, config: DecomposeConfig | None = None) -> DecompositionReport:
    """Run the whole pipeline; failures are reported in the verdict, not raised."""
    config = config or DecomposeConfig()
    if n < 3:
        raise ValueError("n must be at least 3")
    rng = random.Random(config.seed)
    trace = NormalizationTrace()
    start = getattr(oracle, "queries", 0)
    try:
        triple = _run(oracle, n, ring, config, rng, trace)
    except NotAutomorphism as exc:
        return DecompositionReport(None, trace, [], getattr(oracle, "queries", 0) - start,
                                   "NotAutomorphism", exc.stage, exc.reason, exc.witness)
    except UnfittableRingMap as exc:
        return DecompositionReport(None, trace, [], getattr(oracle, "queries", 0) - start,
                                   "UnfittableRingMap", exc.stage, exc.reason, exc.table)
    residuals = residual_check(oracle, triple, config.word_count, config.max_word_length, rng)
    queries = getattr(oracle, "queries", 0) - start
    if all(r.equal for r in residuals):
        return DecompositionReport(triple, trace, residuals, queries, "OK")
    bad = next(r for r in residuals if not r.equal)
    return DecompositionReport(triple, trace, residuals, queries, "NotAutomorphism", "residual",
                               "oracle disagrees with the assembled triple", bad)


def _run(oracle, n, ring, config, rng, trace) -> StandardTriple:
    pool = config.sample_pool if config.sample_pool is not None else positive_pool(ring, include_zero=True)
    units = config.unit_pool if config.unit_pool is not None else unit_pool(ring)

    check_monomial_images(oracle, n, ring, trace)
    N, normalized = stage_fix_permutations(oracle, n, ring, force_k=config.force_k, rng=rng, trace=trace)
    check_diagonal_shapes(normalized, n, ring, units, trace)

    table = stage_extract_c(normalized, n, ring, closed_pool(pool))
    trace.c_samples = table
    result = verify_c(table, ring, config.verify_pairs, rng)
    if not result:
        raise NotAutomorphism("verify_c", "extracted c is not a semiring automorphism", result.witness)
    trace.passed("c additive, multiplicative, unital and monotone on the pool")

    c, z = fit_ring_map(table, ring)
    trace.gauge = z
    # strip the entry map (and the gauge) from the normalized oracle
    c_inv = c.inverse()
    gauge_inv = MonomialMatrix.from_diag([z.inverse()] * n)

    def stripped_fn(X):
        return c_inv.apply_matrix(gauge_inv.conjugate(normalized(X)))

    stripped = AutomorphismOracle(stripped_fn, n, ring, name="stripped")
    one = ring.one
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for x in (one, ring.const(2)):
                B = Matrix.transvection(n, i, j, x)
                if stripped(B) != B:
                    raise NotAutomorphism("strip_c", "transvection not fixed after removing c",
                                          {"B": B, "image": stripped(B)})
    trace.passed("transvections fixed after removing c")

    trace.gamma_samples = stage_extract_gamma(stripped, n, ring, units)
    lam = fit_gamma(trace.gamma_samples, ring)

    M = N.inverse().scale(z)
    triple = StandardTriple(M, c, lam)
    try:
        triple.validate()
    except InvalidTriple as exc:
        raise UnfittableRingMap("assemble", f"assembled triple invalid: {exc}", triple.to_json()) from None
    return triple
