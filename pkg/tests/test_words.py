import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posmat.matrices import Matrix, MonomialMatrix, Permutation, is_nonnegative
from posmat.rings import RingId
from posmat.words import (
    Diag,
    Elem,
    GeneratorWord,
    PEquivChain,
    PEquivStep,
    Perm,
    eval_word,
    factor_monomial,
    random_word,
)

Q = RingId.Q


def q(x):
    return Q.const(x)


def w(*seq, n=3):
    return GeneratorWord(n, Q, seq)


def test_empty_word_is_identity():
    assert w().eval() == Matrix.identity(3, Q)


def test_transvection_additivity_word():
    got = w(Elem(0, 1, q(1)), Elem(0, 1, q(1))).eval()
    assert got == Matrix.transvection(3, 0, 1, q(2))
    assert got == Matrix.transvection(3, 0, 1, q(1)) @ Matrix.transvection(3, 0, 1, q(1))


def test_conjugated_square_word():
    got = w(Diag((q(2), q(1), q(1))), Elem(0, 1, q(1)), Diag((q(Fraction(1, 2)), q(1), q(1)))).eval()
    assert got == Matrix.transvection(3, 0, 1, q(2))


def test_generator_validation():
    with pytest.raises(ValueError):
        Elem(0, 0, q(1))
    with pytest.raises(ValueError):
        Elem(0, 1, q(-1))
    with pytest.raises(ValueError):
        Diag((q(0), q(1), q(1)))
    with pytest.raises(ValueError):
        Diag((RingId.DYADIC.const(3), RingId.DYADIC.one, RingId.DYADIC.one))


def _step(P, Pt, Qw, Qt, A, A_next):
    return PEquivStep(P, Pt, Qw, Qt, A, A_next)


def test_pequiv_trivial_step():
    I = Matrix.identity(3, Q)
    step = _step(w(), w(), w(), w(), I, I)
    assert PEquivChain([step]).steps[0].holds()
    from posmat.words import verify_pequiv

    assert verify_pequiv(PEquivChain([step]))


def test_pequiv_swap_step_and_corruption():
    from posmat.words import verify_pequiv

    swap = Perm(Permutation((1, 0, 2)))
    A = Matrix.transvection(3, 0, 1, q(1))
    A_next = Matrix.transvection(3, 1, 0, q(1))
    good = _step(w(swap), w(), w(), w(swap), A, A_next)
    assert verify_pequiv(PEquivChain([good]))
    bad = _step(w(swap), w(), w(), w(swap), A, Matrix.transvection(3, 1, 0, q(2)))
    assert not verify_pequiv(PEquivChain([bad]))


def test_pequiv_chain_must_link():
    from posmat.words import verify_pequiv

    I = Matrix.identity(3, Q)
    X = Matrix.diag([q(2), q(1), q(1)])
    s1 = _step(w(), w(), w(), w(), I, I)
    s2 = _step(w(), w(), w(), w(), X, X)
    assert not verify_pequiv(PEquivChain([s1, s2]))
    chain = PEquivChain([s1, s1])
    assert PEquivChain.from_json(chain.to_json()) == chain


def test_factor_monomial_examples():
    ident = MonomialMatrix.identity(3, Q)
    word = factor_monomial(ident)
    assert len(word) == 2 and word.eval() == Matrix.identity(3, Q)
    D = MonomialMatrix.from_diag([q(2), q(4), q(8)])
    word = factor_monomial(D)
    assert word.seq == (Diag((q(2), q(4), q(8))), Perm(Permutation.identity(3)))
    M = MonomialMatrix((q(2), q(Fraction(1, 2)), q(1)), Permutation((1, 0, 2)))
    word = factor_monomial(M)
    assert word.seq == (Diag(M.diag), Perm(M.perm))
    assert word.eval() == M.to_matrix()


def test_random_word_contract():
    assert len(random_word(3, Q, 0, seed=5)) == 0
    assert random_word(4, Q, 9, seed=5) == random_word(4, Q, 9, seed=5)
    with pytest.raises(ValueError):
        random_word(3, Q, -1, seed=0)


@pytest.mark.parametrize("ring", list(RingId))
def test_random_words_are_nonnegative(ring):
    rng = random.Random(0)
    for _ in range(250):
        assert is_nonnegative(random_word(3, ring, rng.randint(0, 10), rng=rng).eval())


def _naive_eval(word):
    out = Matrix.identity(word.n, word.ring)
    for g in word.seq:
        if isinstance(g, Perm):
            m = g.matrix(word.ring)
        elif isinstance(g, Elem):
            m = g.matrix(word.n)
        else:
            m = g.matrix()
        out = out @ m
    return out


@settings(max_examples=80)
@given(st.integers(0, 10 ** 6), st.sampled_from(list(RingId)), st.integers(3, 5))
def test_eval_matches_products_and_is_homomorphism(seed, ring, n):
    rng = random.Random(seed)
    u = random_word(n, ring, rng.randint(0, 8), rng=rng)
    v = random_word(n, ring, rng.randint(0, 8), rng=rng)
    assert eval_word(u) == _naive_eval(u)
    assert (u + v).eval() == u.eval() @ v.eval()
    assert GeneratorWord.from_json((u + v).to_json()) == u + v


@settings(max_examples=80)
@given(st.integers(0, 10 ** 6), st.sampled_from(list(RingId)))
def test_generator_identities(seed, ring):
    from posmat.rings import positive_pool

    rng = random.Random(seed)
    pool = positive_pool(ring)
    x1, x2 = rng.choice(pool), rng.choice(pool)
    n = 4
    T = Matrix.transvection
    assert T(n, 0, 1, x1) @ T(n, 0, 1, x2) == T(n, 0, 1, x1 + x2)
    assert T(n, 0, 2, x1) @ T(n, 2, 1, x2) == T(n, 2, 1, x2) @ T(n, 0, 2, x1) @ T(n, 0, 1, x1 * x2)
    S23 = Permutation.transposition(n, 1, 2).matrix(ring)
    assert S23 @ T(n, 0, 1, x1) @ S23 == T(n, 0, 2, x1)
