from fractions import Fraction

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from tlfloquet import ExactMatrix, ExactOverflowError, Scalar

fracs = st.fractions(max_denominator=50).filter(lambda f: abs(f) < 1000)
scalars = st.builds(Scalar, fracs, fracs)


@given(scalars, scalars)
def test_add_sub_roundtrip(a, b):
    assert (a + b) - b == a


@given(scalars, scalars, scalars)
def test_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@given(scalars)
def test_inverse(a):
    if a:
        assert a * a.inverse() == 1
    else:
        with pytest.raises(ZeroDivisionError):
            a.inverse()


def test_lowest_terms():
    s = Scalar(Fraction(6, -4), Fraction(10, 20))
    assert s.to_json() == ("-3/2", "1/2")
    assert Scalar.parse("-3/2", "1/2") == s


def test_powers_of_i():
    i = Scalar(0, 1)
    assert [i**k for k in range(4)] == [1, i, -1, -i]
    assert i**-1 == -i


def test_float_complex_rejected():
    with pytest.raises(TypeError):
        Scalar.of(0.5j)


def _rand_exact(rng, n, den=1):
    return ExactMatrix(rng.integers(-3, 4, (n, n)), rng.integers(-3, 4, (n, n)), den)


@pytest.mark.parametrize("sparse", [False, True])
def test_matrix_product_matches_float(rng, sparse):
    A, B = _rand_exact(rng, 6, 3), _rand_exact(rng, 6, 5)
    if sparse:
        A, B = A.to_sparse(), B.to_sparse()
    C = A @ B
    assert C.is_sparse == sparse
    assert np.allclose(C.to_complex(), A.to_complex() @ B.to_complex())
    assert (A.commutator(B) + B.commutator(A)).is_zero()


def test_normalisation_reduces_denominator():
    M = ExactMatrix(np.array([[2, 4]]), np.array([[0, 6]]), 4)
    assert M.den == 2
    assert M.entry(0, 1) == Scalar(1, Fraction(3, 2))


def test_dense_overflow_widens():
    big = ExactMatrix(np.array([[2**40]]), np.array([[0]]))
    sq = big @ big
    assert sq.entry(0, 0) == Scalar(2**80)


def test_sparse_overflow_raises():
    big = ExactMatrix(sp.csr_matrix(np.array([[2**40]])), sp.csr_matrix(np.array([[0]])))
    with pytest.raises(ExactOverflowError):
        big @ big


def test_dagger_and_scale():
    M = ExactMatrix.from_scalars([[Scalar(1, 2), Fraction(1, 3)], [0, Scalar(0, -1)]])
    assert np.allclose(M.dagger().to_complex(), M.to_complex().conj().T)
    assert np.allclose(M.scale(Scalar(0, 1)).to_complex(), 1j * M.to_complex())
