"""Exact Gaussian rationals and exact complex-rational matrices.

``Scalar`` is the coefficient field of the word algebra.  ``ExactMatrix`` stores
an exact matrix over Q[i] as two integer arrays (real, imaginary) sharing one
positive denominator; the arrays may be dense numpy or scipy.sparse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from numbers import Rational

import numpy as np
import scipy.sparse as sp

from .errors import ExactOverflowError

_INT64_SAFE = 2**62


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


@dataclass(frozen=True, slots=True)
class Scalar:
    """Exact Gaussian rational ``re + i*im``."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _frac(self.re))
        object.__setattr__(self, "im", _frac(self.im))

    @classmethod
    def of(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact; build a Scalar from rationals")
        return cls(_frac(x), Fraction(0))

    @classmethod
    def parse(cls, re: str, im: str) -> "Scalar":
        return cls(Fraction(re), Fraction(im))

    # arithmetic
    def __add__(self, other):
        try:
            o = Scalar.of(other)
        except TypeError:
            return NotImplemented
        return Scalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = Scalar.of(other)
        except TypeError:
            return NotImplemented
        return Scalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = Scalar.of(other)
        except TypeError:
            return NotImplemented
        return Scalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "Scalar":
        n = self.norm2()
        if n == 0:
            raise ZeroDivisionError("Scalar division by zero")
        return Scalar(self.re / n, -self.im / n)

    def __truediv__(self, other):
        try:
            o = Scalar.of(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return Scalar.of(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            o = Scalar.of(other)
        except TypeError:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return self.im == 0

    def to_json(self) -> tuple[str, str]:
        return _fstr(self.re), _fstr(self.im)

    def __repr__(self):
        if self.im == 0:
            return f"Scalar({self.re})"
        return f"Scalar({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


def _fstr(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


ZERO = Scalar(0, 0)
ONE = Scalar(1, 0)
I = Scalar(0, 1)


def as_scalar(x) -> Scalar:
    """Coerce int, Fraction, Scalar (or a 'p/q' string) to a Scalar."""
    return Scalar.of(x)


def gaussian_common(values) -> tuple[list[int], list[int], int]:
    """Bring Scalars to integer numerators over a common positive denominator."""
    vals = [Scalar.of(v) for v in values]
    den = 1
    for v in vals:
        den = math.lcm(den, v.re.denominator, v.im.denominator)
    re = [int(v.re * den) for v in vals]
    im = [int(v.im * den) for v in vals]
    return re, im, den


# ---------------------------------------------------------------------------
# exact matrices


def _maxabs(a) -> int:
    if sp.issparse(a):
        if a.nnz == 0:
            return 0
        d = a.data
    else:
        if a.size == 0:
            return 0
        d = a
    if d.dtype == object:
        return max((abs(int(v)) for v in d.ravel()), default=0)
    return int(np.abs(d).max())


def _gcd_all(a) -> int:
    if sp.issparse(a):
        d = a.data
    else:
        d = a.ravel()
    if d.size == 0:
        return 0
    if d.dtype == object:
        return reduce(math.gcd, (int(v) for v in d), 0)
    return int(np.gcd.reduce(np.abs(d)))


def _scale_int(a, k: int):
    """Multiply an integer array by the python int k, widening dense arrays if needed."""
    if k == 1:
        return a
    bound = _maxabs(a) * abs(k)
    if bound >= _INT64_SAFE:
        if sp.issparse(a):
            raise ExactOverflowError("sparse exact matrix would overflow int64")
        return a.astype(object) * k
    return a * k


def _div_int(a, k: int):
    if k == 1:
        return a
    if sp.issparse(a):
        out = a.copy()
        out.data = out.data // k
        return out
    return a // k


def _row_width(a) -> int:
    """Inner-dimension bound on the number of terms in a product row."""
    if sp.issparse(a):
        a = a.tocsr()
        if a.nnz == 0:
            return 0
        return int(np.diff(a.indptr).max())
    return a.shape[1]


class ExactMatrix:
    """Exact matrix over Q[i]: ``(re + i*im) / den`` with integer arrays."""

    __slots__ = ("re", "im", "den")
    __array_priority__ = 100

    def __init__(self, re, im=None, den: int = 1, *, normalize: bool = True):
        if im is None:
            im = sp.csr_matrix(re.shape, dtype=np.int64) if sp.issparse(re) else np.zeros(re.shape, dtype=re.dtype)
        if re.shape != im.shape:
            raise ValueError("real and imaginary parts differ in shape")
        if den <= 0:
            raise ValueError("denominator must be positive")
        if sp.issparse(re) != sp.issparse(im):
            re, im = sp.csr_matrix(re), sp.csr_matrix(im)
        if sp.issparse(re):
            re, im = sp.csr_matrix(re), sp.csr_matrix(im)
            re.eliminate_zeros()
            im.eliminate_zeros()
        self.re, self.im, self.den = re, im, int(den)
        if normalize:
            self._normalize()

    # construction ------------------------------------------------------
    @classmethod
    def zeros(cls, shape, sparse: bool = False) -> "ExactMatrix":
        if sparse:
            z = sp.csr_matrix(shape, dtype=np.int64)
            return cls(z, z.copy())
        return cls(np.zeros(shape, dtype=np.int64), np.zeros(shape, dtype=np.int64))

    @classmethod
    def identity(cls, n: int, sparse: bool = False) -> "ExactMatrix":
        if sparse:
            return cls(sp.identity(n, dtype=np.int64, format="csr"), sp.csr_matrix((n, n), dtype=np.int64))
        return cls(np.eye(n, dtype=np.int64), np.zeros((n, n), dtype=np.int64))

    @classmethod
    def from_scalars(cls, rows) -> "ExactMatrix":
        """Dense matrix from a nested list of Scalar-coercible entries."""
        flat = [Scalar.of(v) for r in rows for v in r]
        n, m = len(rows), len(rows[0]) if rows else 0
        re, im, den = gaussian_common(flat)
        dt = object if max(map(abs, re + im), default=0) >= _INT64_SAFE else np.int64
        return cls(np.array(re, dtype=dt).reshape(n, m), np.array(im, dtype=dt).reshape(n, m), den)

    # normalisation -------------------------------------------------------
    def _normalize(self):
        g = math.gcd(_gcd_all(self.re), _gcd_all(self.im))
        if g == 0:
            self.den = 1
            return
        g = math.gcd(g, self.den)
        if g > 1:
            self.re = _div_int(self.re, g)
            self.im = _div_int(self.im, g)
            self.den //= g

    # properties -----------------------------------------------------------
    @property
    def shape(self):
        return self.re.shape

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.re)

    def nnz(self) -> int:
        if self.is_sparse:
            return (abs(self.re) + abs(self.im)).nnz
        return int(np.count_nonzero((self.re != 0) | (self.im != 0)))

    def is_zero(self) -> bool:
        if self.is_sparse:
            return self.re.nnz == 0 and self.im.nnz == 0
        return not (np.any(self.re != 0) or np.any(self.im != 0))

    def is_gaussian_integer(self) -> bool:
        return self.den == 1

    def to_complex(self) -> np.ndarray:
        re = self.re.toarray() if self.is_sparse else np.asarray(self.re)
        im = self.im.toarray() if self.is_sparse else np.asarray(self.im)
        return (re.astype(float) + 1j * im.astype(float)) / self.den

    def to_dense(self) -> "ExactMatrix":
        if not self.is_sparse:
            return self
        return ExactMatrix(self.re.toarray(), self.im.toarray(), self.den, normalize=False)

    def to_sparse(self) -> "ExactMatrix":
        if self.is_sparse:
            return self
        if self.re.dtype == object:
            raise ExactOverflowError("entries exceed int64; cannot store sparse")
        return ExactMatrix(sp.csr_matrix(self.re), sp.csr_matrix(self.im), self.den, normalize=False)

    def entry(self, r: int, c: int) -> Scalar:
        return Scalar(Fraction(int(self.re[r, c]), self.den), Fraction(int(self.im[r, c]), self.den))

    def entries(self) -> dict[tuple[int, int], Scalar]:
        """Nonzero entries as exact Scalars."""
        out: dict[tuple[int, int], list[int]] = {}
        for part, k in ((self.re, 0), (self.im, 1)):
            if self.is_sparse:
                coo = part.tocoo()
                it = zip(coo.row, coo.col, coo.data)
            else:
                r, c = np.nonzero(part)
                it = zip(r, c, part[r, c])
            for r, c, v in it:
                out.setdefault((int(r), int(c)), [0, 0])[k] = int(v)
        return {rc: Scalar(Fraction(a, self.den), Fraction(b, self.den)) for rc, (a, b) in out.items()}

    def submatrix(self, rows, cols) -> "ExactMatrix":
        rows, cols = np.asarray(rows), np.asarray(cols)
        if self.is_sparse:
            re = self.re[rows][:, cols].toarray()
            im = self.im[rows][:, cols].toarray()
        else:
            re = self.re[np.ix_(rows, cols)]
            im = self.im[np.ix_(rows, cols)]
        return ExactMatrix(re, im, self.den)

    # algebra ----------------------------------------------------------------
    def _aligned(self, other: "ExactMatrix"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        den = math.lcm(self.den, other.den)
        a, b = den // self.den, den // other.den
        sparse = self.is_sparse and other.is_sparse
        x, y = (self, other) if sparse else (self.to_dense(), other.to_dense())
        return (_scale_int(x.re, a), _scale_int(x.im, a), _scale_int(y.re, b), _scale_int(y.im, b), den)

    def __add__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        r1, i1, r2, i2, den = self._aligned(other)
        return ExactMatrix(_combine(r1, r2, 1), _combine(i1, i2, 1), den)

    def __sub__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        r1, i1, r2, i2, den = self._aligned(other)
        return ExactMatrix(_combine(r1, r2, -1), _combine(i1, i2, -1), den)

    def __neg__(self):
        return ExactMatrix(-self.re, -self.im, self.den, normalize=False)

    def scale(self, c) -> "ExactMatrix":
        (a,), (b,), den = gaussian_common([Scalar.of(c)])
        if a == 0 and b == 0:
            return ExactMatrix.zeros(self.shape, self.is_sparse)
        if b == 0:
            return ExactMatrix(_scale_int(self.re, a), _scale_int(self.im, a), self.den * den)
        if a == 0:
            return ExactMatrix(-_scale_int(self.im, b), _scale_int(self.re, b), self.den * den)
        ar, ai = _scale_int(self.re, a), _scale_int(self.im, a)
        br, bi = _scale_int(self.re, b), _scale_int(self.im, b)
        return ExactMatrix(_combine(ar, bi, -1), _combine(ai, br, 1), self.den * den)

    def __mul__(self, c):
        if isinstance(c, ExactMatrix):
            return NotImplemented
        try:
            return self.scale(c)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        x, y = self, other
        if x.is_sparse != y.is_sparse:
            x, y = x.to_dense(), y.to_dense()
        bound = 2 * max(_maxabs(x.re), _maxabs(x.im)) * max(_maxabs(y.re), _maxabs(y.im)) * max(_row_width(x.re), 1)
        if bound >= _INT64_SAFE:
            if x.is_sparse:
                raise ExactOverflowError("sparse exact product would overflow int64")
            xr, xi, yr, yi = (a.astype(object) for a in (x.re, x.im, y.re, y.im))
        else:
            xr, xi, yr, yi = x.re, x.im, y.re, y.im
            if xr.dtype == object or yr.dtype == object:
                xr, xi, yr, yi = (a.astype(object) for a in (xr, xi, yr, yi))
        re = xr @ yr - xi @ yi
        im = xr @ yi + xi @ yr
        return ExactMatrix(re, im, x.den * y.den)

    def commutator(self, other: "ExactMatrix") -> "ExactMatrix":
        return self @ other - other @ self

    def anticommutator(self, other: "ExactMatrix") -> "ExactMatrix":
        return self @ other + other @ self

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.re.T.copy() if not self.is_sparse else self.re.T, self.im.T.copy() if not self.is_sparse else self.im.T, self.den, normalize=False)

    def conj(self) -> "ExactMatrix":
        return ExactMatrix(self.re, -self.im, self.den, normalize=False)

    def dagger(self) -> "ExactMatrix":
        return self.transpose().conj()

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def max_abs(self) -> float:
        """Largest entry modulus (float; used for reporting only)."""
        if self.is_zero():
            return 0.0
        return float(np.abs(self.to_complex()).max()) if not self.is_sparse else _sparse_maxmod(self)

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return f"ExactMatrix({self.shape[0]}x{self.shape[1]}, {kind}, nnz={self.nnz()}, den={self.den})"


def _sparse_maxmod(m: ExactMatrix) -> float:
    a = (m.re.astype(float) + 1j * m.im.astype(float)).tocsr()
    return float(np.abs(a.data).max()) / m.den if a.nnz else 0.0


def _combine(a, b, sign: int):
    """a + sign*b on integer arrays, widening dense arrays to object dtype on overflow."""
    if _maxabs(a) + _maxabs(b) >= _INT64_SAFE:
        if sp.issparse(a):
            raise ExactOverflowError("sparse exact sum would overflow int64")
        a, b = np.asarray(a, dtype=object), np.asarray(b, dtype=object)
    return a + b if sign > 0 else a - b
