import random
import threading
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posmat.automorphisms import (
    CentralHomDescriptor,
    FlipTable,
    RingMapDescriptor,
    StandardTriple,
    Transpose,
    apply_homothety,
    apply_inner,
    apply_ringmap,
    compose_parts,
    description_from_json,
    description_to_json,
    obfuscated_oracle,
    oracle_from_triple,
    random_homothety,
    random_parts,
    random_triple,
)
from posmat.errors import DimensionMismatch, InvalidTriple, RingMismatch, UnsupportedRing
from posmat.matrices import Matrix, MonomialMatrix, Permutation, determinant
from posmat.rings import RatFun, RingId, Skew
from posmat.words import random_monomial, random_word

Q, RF, SK, DY = RingId.Q, RingId.RATFUN, RingId.SKEW, RingId.DYADIC


def q(x):
    return Q.const(x)


def B(n, i, j, x):
    return Matrix.transvection(n, i, j, x)


def words(n, ring, count, seed):
    rng = random.Random(seed)
    return [random_word(n, ring, rng.randint(1, 10), rng=rng).eval() for _ in range(count)]


# -- inner ------------------------------------------------------------------------

def test_apply_inner_examples():
    X = random_word(3, Q, 6, seed=4).eval()
    assert apply_inner(MonomialMatrix.identity(3, Q), X) == X
    swap = MonomialMatrix.from_perm(Permutation((1, 0, 2)), Q)
    assert apply_inner(swap, B(3, 0, 1, q(1))) == B(3, 1, 0, q(1))
    D = MonomialMatrix.from_diag([q(2), q(1), q(1)])
    assert apply_inner(D, B(3, 0, 1, q(1))) == B(3, 0, 1, q(2))
    with pytest.raises(DimensionMismatch):
        apply_inner(D, Matrix.identity(4, Q))


# -- ring maps --------------------------------------------------------------------

def test_apply_ringmap_examples():
    X = random_word(3, RF, 6, seed=4).eval()
    assert apply_ringmap(RingMapDescriptor(RF), X) == X
    c = RingMapDescriptor(RF, 2)
    s = RatFun.s()
    assert apply_ringmap(c, B(3, 0, 1, s)) == B(3, 0, 1, 2 * s)
    with pytest.raises(RingMismatch):
        apply_ringmap(c, Matrix.identity(3, Q))


def test_ringmap_substitution_against_evaluation():
    c = RingMapDescriptor(RF, Fraction(3), Fraction(-1, 2))
    f = (RatFun.s() + 1) * (RatFun.s() + 3).inverse()
    g = c(f)
    for x in (Fraction(2), Fraction(5, 7)):
        assert g.evaluate(x) == f.evaluate(3 * x - Fraction(1, 2))


def test_ringmap_validation():
    with pytest.raises(InvalidTriple):
        RingMapDescriptor(Q, 2).validate()
    with pytest.raises(InvalidTriple):
        RingMapDescriptor(SK, 2, 1).validate()
    with pytest.raises(InvalidTriple):
        RingMapDescriptor(RF, -1).validate()
    RingMapDescriptor(SK, 3).validate()


def test_skew_ringmap_respects_twist():
    c = RingMapDescriptor(SK, 3)
    s, t = Skew.s(), Skew.t()
    assert c(t * s) == c(t) * c(s)
    assert c(s) == 3 * s and c(t) == t


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6), st.sampled_from([RF, SK]))
def test_ringmap_multiplicative_and_fixes_permutations(seed, ring):
    rng = random.Random(seed)
    c = RingMapDescriptor(ring, rng.choice([1, 2, Fraction(1, 3)]), rng.choice([0, 1]) if ring is RF else 0)
    X, Y = words(3, ring, 2, seed)
    assert c.apply_matrix(X @ Y) == c.apply_matrix(X) @ c.apply_matrix(Y)
    P = Permutation.random(3, rng).matrix(ring)
    assert c.apply_matrix(P) == P
    assert c.inverse().apply_matrix(c.apply_matrix(X)) == X


# -- homotheties ------------------------------------------------------------------

def test_apply_homothety_examples():
    X = random_word(3, Q, 6, seed=4).eval()
    assert apply_homothety(CentralHomDescriptor.trivial(Q), X) == X
    h = CentralHomDescriptor(Q, {2: 3})
    assert apply_homothety(h, Matrix.diag([q(2), q(1), q(1)])) == Matrix.diag([q(6), q(3), q(3)])
    with pytest.raises(UnsupportedRing):
        apply_homothety(CentralHomDescriptor(SK, {2: 3}), Matrix.identity(3, SK))


def test_unimodular_certificate_example():
    h = CentralHomDescriptor(Q, {2: 3})
    assert h.touched_primes() == [2, 3]
    cert = h.certificate(3)
    assert [row[:2] for row in cert[:2]] == [[1, 0], [3, 1]]
    assert h.is_invertible(3)
    assert not CentralHomDescriptor(Q, {2: 2}).is_invertible(3)


def test_explicit_inverse_example():
    h = CentralHomDescriptor(Q, {2: 3})
    inv = h.inverse(3)
    assert inv.gamma == {2: Fraction(1, 3)}
    X = Matrix.diag([q(2), q(1), q(1)])
    assert inv.apply(h.apply(X)) == X


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_homothety_is_multiplicative(seed):
    h = random_homothety(Q, random.Random(seed))
    X, Y = words(3, Q, 2, seed)
    assert h.apply(X @ Y) == h.apply(X) @ h.apply(Y)
    assert h.scalar(X @ Y) == h.scalar(X) * h.scalar(Y)


@pytest.mark.parametrize("ring", [Q, RF])
def test_homothety_inverse_on_many_matrices(ring):
    rng = random.Random(5)
    for n in (3, 4):
        h = random_homothety(ring, rng)
        assert h.is_invertible(n)
        inv = h.inverse(n)
        assert h.compose(inv, n).is_trivial and inv.compose(h, n).is_trivial
        for X in words(n, ring, 50, rng.random()):
            assert inv.apply(h.apply(X)) == X
            assert h.apply(inv.apply(X)) == X


def test_ratfun_degree_factor():
    h = CentralHomDescriptor(RF, {}, Fraction(2))
    s = RatFun.s()
    X = Matrix.diag([s, RF.one, RF.one])
    assert h.scalar(X) == RF.const(2)
    with pytest.raises(InvalidTriple):
        CentralHomDescriptor(Q, {}, Fraction(2)).validate()
    with pytest.raises(InvalidTriple):
        CentralHomDescriptor(DY, {2: 3}).validate()


def test_homothety_pull_through_ringmap():
    h = CentralHomDescriptor(RF, {2: 3, 3: Fraction(1, 7)}, Fraction(5))
    c = RingMapDescriptor(RF, 2, 1)
    h2 = h.pull_through(c)
    for X in words(3, RF, 20, 9):
        assert h.apply(c.apply_matrix(X)) == c.apply_matrix(h2.apply(X))


# -- triples and oracles ---------------------------------------------------------

def test_oracle_from_triple_examples():
    ident = oracle_from_triple(StandardTriple.identity(3, Q))
    for X in words(3, Q, 10, 1):
        assert ident(X) == X
    t = StandardTriple(MonomialMatrix.from_perm(Permutation((1, 0, 2)), Q), RingMapDescriptor(Q),
                       CentralHomDescriptor.trivial(Q))
    assert oracle_from_triple(t)(B(3, 0, 1, q(1))) == B(3, 1, 0, q(1))
    with pytest.raises(InvalidTriple):
        oracle_from_triple(StandardTriple(MonomialMatrix.identity(3, Q), RingMapDescriptor(Q),
                                          CentralHomDescriptor(Q, {2: 2})))


def test_triple_applies_in_order():
    M = MonomialMatrix((q(1), q(2), q(1)), Permutation((1, 0, 2)))
    c = RingMapDescriptor(Q)
    h = CentralHomDescriptor(Q, {2: 3})
    t = StandardTriple(M, c, h)
    for X in words(3, Q, 100, 2):
        assert t.apply(X) == apply_inner(M, apply_ringmap(c, apply_homothety(h, X)))


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6), st.sampled_from(list(RingId)), st.integers(3, 4))
def test_composition_closure(seed, ring, n):
    rng = random.Random(seed)
    t1, t2 = random_triple(n, ring, rng), random_triple(n, ring, rng)
    t = t1.compose(t2)
    t.validate()
    for X in words(n, ring, 5, seed):
        assert t.apply(X) == t1.apply(t2.apply(X))
    X, Y = words(n, ring, 2, seed + 1)
    assert t.apply(X @ Y) == t.apply(X) @ t.apply(Y)


def test_obfuscated_single_inner():
    M = random_monomial(3, Q, random.Random(1))
    oracle, truth = obfuscated_oracle([M], 3, Q, seed=4)
    for X in words(3, Q, 20, 3):
        assert oracle(X) == apply_inner(M, X) == truth.apply(X)


def test_obfuscated_composition_is_a_triple():
    rng = random.Random(7)
    M1, M2 = random_monomial(3, Q, rng), random_monomial(3, Q, rng)
    parts = [M1, CentralHomDescriptor(Q, {2: 3}), M2]
    oracle, truth = obfuscated_oracle(parts, 3, Q, seed=8)
    for X in words(3, Q, 30, 4):
        expected = apply_inner(M1, apply_homothety(parts[1], apply_inner(M2, X)))
        assert oracle(X) == expected == truth.apply(X)


def test_query_counter():
    oracle, _ = obfuscated_oracle([], 3, Q, seed=1)
    X = Matrix.identity(3, Q)
    for k in range(5):
        oracle(X)
    assert oracle.queries == 5

    def hammer():
        for _ in range(200):
            oracle(X)

    threads = [threading.Thread(target=hammer) for _ in range(4)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert oracle.queries == 805


def test_invalid_parts_rejected():
    with pytest.raises(InvalidTriple):
        obfuscated_oracle([RingMapDescriptor(Q, 2)], 3, Q, seed=0)
    with pytest.raises(InvalidTriple):
        obfuscated_oracle([CentralHomDescriptor(Q, {2: 2})], 3, Q, seed=0)


def test_faulty_parts_have_no_ground_truth():
    oracle, truth = obfuscated_oracle([FlipTable()], 3, Q, seed=0)
    assert truth is None
    assert oracle(B(3, 0, 1, q(2))) == B(3, 1, 0, q(2))
    oracle, truth = obfuscated_oracle([Transpose()], 3, Q, seed=0)
    X = random_word(3, Q, 6, seed=2).eval()
    assert truth is None and oracle(X) == X.transpose()


@pytest.mark.parametrize("ring", list(RingId))
def test_description_json_roundtrip(ring):
    rng = random.Random(3)
    parts = random_parts(3, ring, rng, count=4) + [FlipTable()]
    obj = description_to_json(parts, 3, ring)
    n, ring2, parts2 = description_from_json(obj)
    assert (n, ring2) == (3, ring)
    assert parts2[:-1] == parts[:-1]
    assert compose_parts(parts2[:-1], 3, ring) == compose_parts(parts[:-1], 3, ring)


def test_description_order_is_right_to_left():
    obj = {"n": 3, "ring": "Q", "compose": [
        {"inner": Matrix.diag([q(2), q(1), q(1)]).to_json()},
        {"homothety": {"gamma": {"2": "3"}}},
    ]}
    n, ring, parts = description_from_json(obj)
    oracle, _ = obfuscated_oracle(parts, n, ring, seed=0)
    X = Matrix.diag([q(2), q(1), q(1)])
    # homothety first, then the inner conjugation (which fixes diagonals)
    assert oracle(X) == Matrix.diag([q(6), q(3), q(3)])
    Y = B(3, 0, 1, q(1))
    assert oracle(Y) == B(3, 0, 1, q(2))


def test_determinant_used_for_scaling():
    h = CentralHomDescriptor(Q, {3: 2})
    X = random_word(3, Q, 8, seed=12).eval()
    d = abs(determinant(X).to_fraction())
    assert h.scalar(X) == q(Fraction(2) ** _val(d, 3))


def _val(x, p):
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v
