"""Exact 2^N fermionic Fock representation used as the equality oracle.

Basis states are occupation bitmasks with site 0 as the least significant bit.
``c_j`` picks up the sign (-1)^(number of occupied sites < j).  Symplectic
fermions are f_j = i^j c_j, f_j^x = i^j c_j^dag; on the periodic chain
f_N is identified with f_0, so e_{N-1} couples sites N-1 and 0.
"""

from __future__ import annotations

import json
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, ResourceError
from .realization import OPEN, PERIODIC, Realization
from .scalar import ExactMatrix, Scalar

MAX_EXACT_N = 12


class FockOperator(ExactMatrix):
    """Exact sparse operator on the 2^N Fock space."""

    __slots__ = ("n_sites",)

    def __init__(self, n_sites: int, mat: ExactMatrix):
        self.n_sites = n_sites
        m = mat.to_sparse() if not mat.is_sparse else mat
        super().__init__(m.re, m.im, m.den, normalize=False)

    @property
    def dim(self) -> int:
        return 1 << self.n_sites

    def to_dict(self) -> dict:
        coo_re, coo_im = self.re.tocoo(), self.im.tocoo()
        acc: dict[tuple[int, int], list[int]] = {}
        for r, c, v in zip(coo_re.row, coo_re.col, coo_re.data):
            acc.setdefault((int(r), int(c)), [0, 0])[0] = int(v)
        for r, c, v in zip(coo_im.row, coo_im.col, coo_im.data):
            acc.setdefault((int(r), int(c)), [0, 0])[1] = int(v)
        entries = [[r, c, f"{a}/{self.den}", f"{b}/{self.den}"] for (r, c), (a, b) in sorted(acc.items())]
        return {"n": self.n_sites, "dim": self.dim, "entries": entries}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def _wrap(n: int, m) -> FockOperator:
    return m if isinstance(m, FockOperator) else FockOperator(n, m)


def _check_n(n: int):
    if n > MAX_EXACT_N:
        raise ResourceError(f"exact Fock space limited to N <= {MAX_EXACT_N}, got {n}")
    if n < 1:
        raise DomainError("need at least one site")


@lru_cache(maxsize=256)
def _annihilator(n: int, j: int) -> ExactMatrix:
    dim = 1 << n
    states = np.arange(dim)
    occ = (states >> j) & 1
    cols = states[occ == 1]
    rows = cols ^ (1 << j)
    lower = cols & ((1 << j) - 1)
    parity = np.array([bin(int(s)).count("1") & 1 for s in lower], dtype=np.int64)
    data = 1 - 2 * parity
    re = sp.csr_matrix((data, (rows, cols)), shape=(dim, dim), dtype=np.int64)
    return ExactMatrix(re, sp.csr_matrix((dim, dim), dtype=np.int64), 1, normalize=False)


def canonical_mode(n: int, j: int, kind: str = "c") -> FockOperator:
    """c_j (kind 'c') or c_j^dag (kind 'c+')."""
    _check_n(n)
    if not 0 <= j < n:
        raise DomainError(f"site {j} outside [0, {n - 1}]")
    a = _annihilator(n, j)
    if kind == "c":
        return FockOperator(n, a)
    if kind in ("c+", "cdag"):
        return FockOperator(n, a.transpose())
    raise DomainError(f"unknown canonical mode kind {kind!r}")


_IPOW = [Scalar(1, 0), Scalar(0, 1), Scalar(-1, 0), Scalar(0, -1)]


def i_power(k: int) -> Scalar:
    return _IPOW[k % 4]


def symplectic_mode(n: int, j: int, kind: str = "f") -> FockOperator:
    """f_j = i^j c_j (kind 'f') or f_j^x = i^j c_j^dag (kind 'fx')."""
    if kind == "f":
        base = canonical_mode(n, j, "c")
    elif kind in ("fx", "fX", "f×"):
        base = canonical_mode(n, j, "c+")
    else:
        raise DomainError(f"unknown symplectic mode kind {kind!r}")
    return FockOperator(n, base.scale(i_power(j)))


def bond_sites(n: int, i: int, boundary: str) -> tuple[int, int]:
    """Sites (with phase labels) touched by e_i: periodic (i, i+1 mod N); open (i-1, i)."""
    if boundary == PERIODIC:
        return i % n, (i + 1) % n
    if not 1 <= i <= n - 1:
        raise DomainError(f"open-chain generator index {i} outside [1, {n - 1}]")
    return i - 1, i


@lru_cache(maxsize=512)
def generator_matrix(n: int, i: int, boundary: str = PERIODIC) -> FockOperator:
    """e_i = (f_a^x + f_b^x)(f_a + f_b) on the bond (a, b)."""
    _check_n(n)
    a, b = bond_sites(n, i, boundary)
    fx = symplectic_mode(n, a, "fx") + symplectic_mode(n, b, "fx")
    f = symplectic_mode(n, a, "f") + symplectic_mode(n, b, "f")
    return FockOperator(n, fx @ f)


def identity(n: int) -> FockOperator:
    _check_n(n)
    return FockOperator(n, ExactMatrix.identity(1 << n, sparse=True))


@lru_cache(maxsize=1 << 15)
def _word_matrix(n: int, boundary: str, word: tuple[int, ...]) -> ExactMatrix:
    if not word:
        return ExactMatrix.identity(1 << n, sparse=True)
    return _word_matrix(n, boundary, word[:-1]) @ generator_matrix(n, word[-1], boundary)


def represent(x) -> FockOperator:
    """Fock matrix of an AlgebraElement (exact)."""
    chain = x.chain
    _check_n(chain.n)
    n, bd = chain.n, chain.boundary
    acc = ExactMatrix.zeros((1 << n, 1 << n), sparse=True)
    for w, c in sorted(x.terms.items()):
        acc = acc + _word_matrix(n, bd, w).scale(c)
    return FockOperator(n, acc)


def oracle_equal(x, y) -> bool:
    """Exact equality of Fock representations."""
    x._same(y)
    return represent(x - y).is_zero()


def second_quantize(M: ExactMatrix, offset=0) -> FockOperator:
    """sum_ab M_ab c_a^dag c_b + offset as an exact Fock operator."""
    n = M.shape[0]
    _check_n(n)
    acc = identity(n).scale(offset) if offset else ExactMatrix.zeros((1 << n, 1 << n), sparse=True)
    Md = M.to_dense()
    for a in range(n):
        for b in range(n):
            if Md.re[a, b] == 0 and Md.im[a, b] == 0:
                continue
            acc = acc + (canonical_mode(n, a, "c+") @ canonical_mode(n, b, "c")).scale(Md.entry(a, b))
    return FockOperator(n, acc)


def sector_indices(n: int, k: int) -> np.ndarray:
    """Fock basis indices with exactly k particles, in increasing order."""
    states = np.arange(1 << n)
    pop = np.array([bin(int(s)).count("1") for s in states])
    return states[pop == k]


def one_particle_block(op: ExactMatrix, n: int) -> ExactMatrix:
    """Restriction to the 1-particle sector; row/column a is the state c_a^dag|0>."""
    idx = np.array([1 << a for a in range(n)])
    return op.submatrix(idx, idx)


class FockRealization(Realization):
    """Named elements as exact Fock matrices."""

    def __init__(self, n: int, boundary: str = PERIODIC):
        _check_n(n)
        super().__init__(n, boundary)

    def _generator(self, i):
        return generator_matrix(self.n, i, self.boundary)

    def identity(self):
        return identity(self.n)

    def zero(self):
        return ExactMatrix.zeros((1 << self.n, 1 << self.n), sparse=True)

    def scale(self, c, x):
        return x.scale(c)

    def is_zero(self, x) -> bool:
        return x.is_zero()


__all__ = [
    "FockOperator",
    "FockRealization",
    "MAX_EXACT_N",
    "OPEN",
    "PERIODIC",
    "bond_sites",
    "canonical_mode",
    "generator_matrix",
    "i_power",
    "identity",
    "one_particle_block",
    "oracle_equal",
    "represent",
    "second_quantize",
    "sector_indices",
    "symplectic_mode",
]
