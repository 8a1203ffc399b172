import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tlfloquet import ContextError, DomainError, ModeError, Scalar
from tlfloquet.fock_rep import represent
from tlfloquet.realization import OPEN
from tlfloquet.word_algebra import (
    AlgebraElement,
    Chain,
    ad_power,
    adjoint_action_check,
    apply_automorphism,
    average_charge,
    bch_coefficient,
    boost_commutator,
    commutator,
    floquet_charge,
    generator,
    loop_generator,
    multiply,
    normal_form,
    q_poly,
    q_shift_invariant,
    q_tilde,
)

C6, C8 = Chain(6), Chain(8)


def e(chain, *letters):
    return AlgebraElement.word(chain, letters)


def zero(chain):
    return AlgebraElement.zero(chain)


# multiply ------------------------------------------------------------------


def test_square_vanishes():
    assert multiply(generator(C8, 1), generator(C8, 1)).is_syntactic_zero()


def test_braid_collapses():
    assert e(C8, 1, 2, 1).terms == {(1,): Scalar(1)}


def test_wrap_relation_n4():
    c = Chain(4)
    assert e(c, 0, 1, 0).terms == {(0,): Scalar(1)}
    assert e(c, 0, 3, 0).terms == {(0,): Scalar(1)}


def test_far_commutation_canonical():
    assert e(C8, 3, 1).terms == {(1, 3): Scalar(1)}
    assert e(C8, 1, 3) == e(C8, 3, 1)


def test_periodic_wrap_adjacency():
    # e_0 and e_{N-1} share a bond end on the ring
    assert e(C8, 0, 7, 0).terms == {(0,): Scalar(1)}
    assert not commutator(generator(C8, 0), generator(C8, 7)).is_syntactic_zero()


def test_context_mismatch():
    with pytest.raises(ContextError):
        generator(C6, 1) * generator(C8, 1)
    with pytest.raises(ContextError):
        Chain(5)


def test_open_chain_index_range():
    c = Chain(6, OPEN)
    with pytest.raises(DomainError):
        generator(c, 0)
    assert list(c.indices()) == [1, 2, 3, 4, 5]


words = st.lists(st.integers(0, 7), max_size=7).map(tuple)


@given(words)
def test_normal_form_sound(w):
    """Rewriting never changes the Fock matrix of a word."""
    lhs = represent(AlgebraElement(C8, {w: Scalar(1)}, reduced=True))
    assert lhs == represent(e(C8, *w))


@given(words)
def test_normal_form_idempotent(w):
    nf = normal_form(w, 8, True)
    if nf is not None:
        assert normal_form(nf, 8, True) == nf
        assert all(a != b for a, b in zip(nf, nf[1:]))


@given(words, words, words)
def test_associativity(a, b, c):
    x, y, z = e(C8, *a), e(C8, *b), e(C8, *c)
    assert ((x * y) * z).equals(x * (y * z))


# commutator ----------------------------------------------------------------


def test_commutator_examples():
    e1, e2, e3 = (generator(C8, i) for i in (1, 2, 3))
    assert commutator(e1, e3).is_syntactic_zero()
    assert commutator(commutator(e1, e2), e2).equals(e2.scale(-2))
    assert ad_power(e1, e(C8, 2, 3), 3).equals(zero(C8))


@given(words, words)
def test_antisymmetry(a, b):
    x, y = e(C8, *a), e(C8, *b)
    assert (commutator(x, y) + commutator(y, x)).is_syntactic_zero()


# q polynomials -------------------------------------------------------------


def test_q_poly_examples():
    assert q_poly(C8, 3, 1).terms == {(3,): Scalar(1)}
    assert q_poly(C8, 0, 0).terms == {(): Scalar(1)}
    assert q_poly(C8, 0, 2).terms == {(0, 1): Scalar(1), (1, 0): Scalar(-1)}
    e0, e1, e2 = (generator(C8, i) for i in range(3))
    assert q_poly(C8, 0, 3).equals(commutator(e0, commutator(e1, e2)))


def test_q_poly_order_bound():
    with pytest.raises(DomainError):
        q_poly(C6, 0, 6)


def test_shift_invariant_examples():
    He = sum((generator(C8, i) for i in range(0, 8, 2)), zero(C8))
    Ho = sum((generator(C8, i) for i in range(1, 8, 2)), zero(C8))
    assert q_shift_invariant(C8, "e", 1).equals(He)
    assert q_shift_invariant(C8, "o", 1).equals(Ho)
    half = Fraction(1, 2)
    lin = (q_shift_invariant(C8, "+", 2) + q_shift_invariant(C8, "-", 2)).scale(half) - q_shift_invariant(C8, "e", 2)
    assert lin.is_syntactic_zero()
    assert commutator(He, Ho).equals(q_shift_invariant(C8, "-", 2))


@pytest.mark.parametrize("m", range(1, 7))
def test_parity_split(m):
    q = lambda lab: q_shift_invariant(C8, lab, m)
    assert (q("e") + q("o") - q("+")).is_syntactic_zero()


def test_shift_invariant_needs_periodic():
    with pytest.raises(ModeError):
        q_shift_invariant(Chain(8, OPEN), "+", 2)


def test_q_tilde_examples():
    q = lambda lab, m: q_shift_invariant(C8, lab, m)
    assert q_tilde(C8, "+", 1).equals(q("+", 1))
    assert q_tilde(C8, "+", 3).equals(q("+", 3) + q("+", 1).scale(2))
    assert q_tilde(C8, "-", 4).equals(q("-", 4) + q("-", 2).scale(3))


# loop generators and charges -------------------------------------------------


def test_loop_examples():
    E0, F1 = loop_generator(C8, "E", 0), loop_generator(C8, "F", 1)
    assert E0.equals(q_shift_invariant(C8, "e", 1))
    assert F1.equals(q_shift_invariant(C8, "o", 1))
    H1 = loop_generator(C8, "H", 1)
    assert commutator(E0, F1).equals(H1)
    assert commutator(H1, loop_generator(C8, "E", 1)).equals(loop_generator(C8, "E", 2).scale(2))


@pytest.mark.parametrize("kind,index", [("H", 0), ("F", 0), ("E", -1), ("E", 4)])
def test_loop_out_of_range(kind, index):
    with pytest.raises(DomainError):
        loop_generator(C8, kind, index)


def test_average_charge_examples():
    H = q_shift_invariant(C8, "+", 1)
    assert average_charge(C8, 1).equals(H)
    Q2, Q3 = average_charge(C8, 2), average_charge(C8, 3)
    assert commutator(Q2, Q3).equals(zero(C8))
    assert commutator(Q2, q_shift_invariant(C8, "e", 1)).equals(zero(C8))
    assert not commutator(Q2, generator(C8, 5)).equals(zero(C8))


def test_floquet_charge_examples():
    tau = Fraction(1, 2)
    z = Scalar(0, -tau)
    Q1 = floquet_charge(C8, 1, z)
    wrap = zero(C8)
    for j in range(8):
        wrap = wrap + commutator(generator(C8, j), generator(C8, j + 1)).scale((-1) ** j)
    expected = q_shift_invariant(C8, "+", 1) - wrap.scale(Scalar(0, tau / 2))
    assert Q1.equals(expected)
    assert floquet_charge(C8, 2, z).equals(q_tilde(C8, "+", 2))
    for m in (1, 3, 5):
        assert floquet_charge(C8, m, 0).equals(q_tilde(C8, "+", m))


def test_floquet_charges_commute_n8():
    z = Scalar(0, Fraction(-7, 10))
    Q = [floquet_charge(C8, m, z) for m in range(1, 7)]
    for a in range(len(Q)):
        for b in range(a + 1, len(Q)):
            assert commutator(Q[a], Q[b]).equals(zero(C8))


def test_adjoint_action_examples():
    assert adjoint_action_check(C8, 0, Scalar(0, Fraction(-1, 2)))
    assert adjoint_action_check(C8, 1, 0)
    z = Scalar(0, Fraction(-1, 2))
    bad = floquet_charge(C8, 1, z) + generator(C8, 0)
    assert not adjoint_action_check(C8, 0, z, charge=bad)
    with pytest.raises(DomainError):
        adjoint_action_check(C6, 2, z)


# boost ---------------------------------------------------------------------


def test_boost_m2_n12_boundary_supported():
    res = boost_commutator(Chain(12, OPEN), 2)
    assert res.reach <= 2 and res.interior_clean
    assert not res.residual.is_syntactic_zero()
    assert res.reach == 0


def test_boost_m3_n14_interior_exact():
    res = boost_commutator(Chain(14, OPEN), 3)
    assert res.interior_clean and res.reach == 0


def test_uniform_boost_is_hamiltonian():
    ring = Chain(12)
    assert commutator(average_charge(ring, 2), q_shift_invariant(ring, "+", 1)).equals(zero(ring))
    c = Chain(12, OPEN)
    H = AlgebraElement(c, {(j,): Scalar(1) for j in c.indices()})
    res = commutator(average_charge(c, 2), H)
    assert all(min(w) == 1 or max(w) == 11 for w in res.terms)


def test_boost_mode_errors():
    with pytest.raises(ModeError):
        boost_commutator(C8, 2)
    with pytest.raises(DomainError):
        boost_commutator(Chain(8, OPEN), 7)


# automorphism -----------------------------------------------------------------


def test_automorphism_examples():
    t = Scalar(Fraction(3, 2), 1)
    assert apply_automorphism(generator(C8, 0), t).equals(generator(C8, 0).scale(t))
    assert apply_automorphism(e(C8, 1, 2), t).equals(e(C8, 1, 2))
    x = q_tilde(C8, "-", 4) + e(C8, 0, 3, 5)
    assert apply_automorphism(apply_automorphism(x, t), t.inverse()).equals(x)
    with pytest.raises(DomainError):
        apply_automorphism(x, 0)


@given(words, words, st.fractions(min_value=Fraction(1, 5), max_value=5, max_denominator=7))
def test_automorphism_homomorphism(a, b, t):
    x, y = e(C8, *a), e(C8, *b)
    lhs = apply_automorphism(x * y, t)
    assert lhs.equals(apply_automorphism(x, t) * apply_automorphism(y, t))


# BCH coefficients --------------------------------------------------------------


@pytest.mark.parametrize(
    "k,coeff,label",
    [(1, Fraction(1), "+"), (2, Fraction(1, 2), "-"), (4, Fraction(-1, 12), "-"), (7, Fraction(-1, 140), "+")],
)
def test_bch_coefficients(k, coeff, label):
    c = Chain(10)
    assert bch_coefficient(c, k).equals(q_tilde(c, label, k).scale(coeff))


def test_bch_order_overflow():
    with pytest.raises(DomainError):
        bch_coefficient(C6, 6)


# serialisation -----------------------------------------------------------------


def test_json_roundtrip():
    x = floquet_charge(C8, 3, Scalar(0, Fraction(-1, 3)))
    d = json.loads(x.to_json())
    assert d["n"] == 8 and d["boundary"] == "periodic"
    assert all("/" in t["re"] and "/" in t["im"] for t in d["terms"])
    assert AlgebraElement.from_json(x.to_json()).equals(x)
