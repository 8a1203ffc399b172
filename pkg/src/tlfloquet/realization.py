"""Backend-independent construction of the named pTL_N(0) elements.

A realization only has to supply the generators ``e_i`` together with ring
operations on its element type.  Everything else (nested brackets q_i^m,
lattice sums, binomial tilde combinations, loop generators, Floquet charges,
BCH terms) is built here once and reused by the word, Fock and
single-particle backends.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .errors import ContextError, DomainError
from .scalar import Scalar

PERIODIC = "periodic"
OPEN = "open"

Q_LABELS = ("+", "-", "e", "o")


def bch_rational(k: int) -> Fraction:
    """Rational prefactor of Z_k in front of q~_+^k (k odd) or q~_-^k (k even)."""
    if k < 1:
        raise DomainError(f"BCH order must be >= 1, got {k}")
    if k % 2:
        s = (k - 1) // 2
        return Fraction((-1) ** s, (2 * s + 1) * comb(2 * s, s))
    s = (k - 2) // 2
    return Fraction((-1) ** s, (2 * s + 2) * comb(2 * s + 1, s))


def tilde_coefficients(m: int) -> list[tuple[int, int]]:
    """[(order, integer coefficient)] so that q~^m = sum coeff * q^order."""
    if m < 1:
        raise DomainError(f"tilde order must be >= 1, got {m}")
    return [(m - 2 * l, comb(m - 1, m - 1 - l)) for l in range((m - 1) // 2 + 1)]


class Realization:
    """Base class; subclasses implement the ring primitives below."""

    def __init__(self, n: int, boundary: str = PERIODIC):
        if boundary not in (PERIODIC, OPEN):
            raise ContextError(f"unknown boundary {boundary!r}")
        if n < 4 or n % 2:
            raise ContextError(f"chain size must be even and >= 4, got {n}")
        self.n = n
        self.boundary = boundary
        self._q: dict = {}
        self._sums: dict = {}

    # -- primitives -------------------------------------------------------
    def _generator(self, i: int):
        raise NotImplementedError

    def identity(self):
        raise NotImplementedError

    def zero(self):
        raise NotImplementedError

    def scale(self, c, x):
        """Scalar multiple c*x, with c an exact Scalar / int / Fraction."""
        return x * c

    def is_zero(self, x) -> bool:
        raise NotImplementedError

    def mul(self, x, y):
        return x @ y

    # -- derived ----------------------------------------------------------
    @property
    def periodic(self) -> bool:
        return self.boundary == PERIODIC

    def indices(self) -> range:
        return range(self.n) if self.periodic else range(1, self.n)

    def _norm_index(self, i: int) -> int:
        if self.periodic:
            return i % self.n
        if not 1 <= i <= self.n - 1:
            raise DomainError(f"open-chain generator index {i} outside [1, {self.n - 1}]")
        return i

    def generator(self, i: int):
        key = ("gen", self._norm_index(i))
        if key not in self._q:
            self._q[key] = self._generator(key[1])
        return self._q[key]

    def comm(self, x, y):
        return self.mul(x, y) - self.mul(y, x)

    def equal(self, x, y) -> bool:
        return self.is_zero(x - y)

    def _check_order(self, m: int, lo: int = 0):
        if not lo <= m < self.n:
            raise DomainError(f"order m={m} outside [{lo}, {self.n - 1}]")

    def q(self, i: int, m: int):
        """Nested bracket q_i^m = [e_i, [e_{i+1}, ... e_{i+m-1}]]."""
        self._check_order(m)
        if m == 0:
            return self.identity()
        if self.periodic:
            i %= self.n
        elif not (1 <= i and i + m - 1 <= self.n - 1):
            raise DomainError(f"q_{i}^{m} leaves the open chain")
        key = (i, m)
        hit = self._q.get(key)
        if hit is None:
            if m == 1:
                hit = self.generator(i)
            else:
                hit = self.comm(self.generator(i), self.q(i + 1, m - 1))
            self._q[key] = hit
        return hit

    def q_starts(self, m: int) -> list[int]:
        if self.periodic:
            return list(range(self.n))
        return list(range(1, self.n - m + 1))

    def q_sum(self, label: str, m: int):
        """Lattice sums q_+^m, q_-^m, q_e^m, q_o^m."""
        if label not in Q_LABELS:
            raise DomainError(f"unknown label {label!r}")
        self._check_order(m, 1)
        key = (label, m)
        hit = self._sums.get(key)
        if hit is not None:
            return hit
        acc = self.zero()
        for i in self.q_starts(m):
            if label == "e" and i % 2:
                continue
            if label == "o" and i % 2 == 0:
                continue
            term = self.q(i, m)
            acc = acc - term if (label == "-" and i % 2) else acc + term
        self._sums[key] = acc
        return acc

    def q_tilde(self, label: str, m: int):
        key = ("~" + label, m)
        hit = self._sums.get(key)
        if hit is not None:
            return hit
        acc = self.zero()
        for order, c in tilde_coefficients(m):
            term = self.q_sum(label, order)
            acc = acc + (term if c == 1 else self.scale(c, term))
        self._sums[key] = acc
        return acc

    def hamiltonian(self, part: str = "+"):
        """H = q_+^1, H_e = q_e^1, H_o = q_o^1."""
        return self.q_sum(part, 1)

    def loop(self, kind: str, index: int):
        """Loop generators H^c = q~_-^{2c}, E^a = q~_e^{2a+1}, F^b = q~_o^{2b-1}."""
        if kind == "H":
            if index < 1:
                raise DomainError("H^c needs c >= 1")
            order, label = 2 * index, "-"
        elif kind == "E":
            if index < 0:
                raise DomainError("E^a needs a >= 0")
            order, label = 2 * index + 1, "e"
        elif kind == "F":
            if index < 1:
                raise DomainError("F^b needs b >= 1")
            order, label = 2 * index - 1, "o"
        else:
            raise DomainError(f"unknown loop generator kind {kind!r}")
        if order >= self.n:
            raise DomainError(f"{kind}^{index} has order {order} >= N={self.n}")
        return self.q_tilde(label, order)

    def average_charge(self, m: int):
        self._check_order(m, 1)
        return self.q_sum("+", m)

    def floquet_charge(self, m: int, z):
        """Q_m = q~_+^m (m even) or q~_+^m + (z/2) q~_-^{m+1} (m odd)."""
        if not 1 <= m < self.n - 1:
            raise DomainError(f"Floquet charge order m={m} outside [1, {self.n - 2}]")
        base = self.q_tilde("+", m)
        if m % 2 == 0:
            return base
        half_z = Scalar.of(z) * Fraction(1, 2) if not isinstance(z, complex) else z / 2
        return base + self.scale(half_z, self.q_tilde("-", m + 1))

    def bch_term(self, k: int):
        """Z_k with exact rational prefactor."""
        c = bch_rational(k)
        if k >= self.n:
            raise DomainError(f"Z_{k} needs order {k} < N={self.n}")
        label = "+" if k % 2 else "-"
        return self.scale(c, self.q_tilde(label, k))
