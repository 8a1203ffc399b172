"""Exact symbolic layer for the periodic Temperley-Lieb algebra at beta = 0.

Words are tuples of generator indices.  Reduction applies e_i e_i -> 0 and
e_i e_{i+-1} e_i -> e_i *modulo far commutation*: two occurrences of a letter
x are compared through the letters sitting between them that fail to commute
with x ("blockers").  No blocker means the two copies can be made adjacent
(product zero); exactly one blocker y means x .. y .. x collapses to x.  The
survivor is written in lexicographic trace normal form.

Rewriting is sound but is not claimed to be confluent for the periodic
algebra, so equality of elements falls back to the Fock representation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import ContextError, DomainError, ModeError
from .realization import OPEN, PERIODIC, Realization, bch_rational
from .scalar import ONE, ZERO, Scalar

FOCK_ORACLE_MAX_N = 12

Word = tuple[int, ...]


@dataclass(frozen=True)
class Chain:
    """Chain context: size N and boundary mode."""

    n: int
    boundary: str = PERIODIC

    def __post_init__(self):
        if self.boundary not in (PERIODIC, OPEN):
            raise ContextError(f"unknown boundary {self.boundary!r}")
        if self.n < 4 or self.n % 2:
            raise ContextError(f"chain size must be even and >= 4, got {self.n}")

    @property
    def periodic(self) -> bool:
        return self.boundary == PERIODIC

    def index(self, i: int) -> int:
        if self.periodic:
            return i % self.n
        if not 1 <= i <= self.n - 1:
            raise DomainError(f"open-chain generator index {i} outside [1, {self.n - 1}]")
        return i

    def indices(self) -> range:
        return range(self.n) if self.periodic else range(1, self.n)


# ---------------------------------------------------------------------------
# rewriting


def _adjacent(i: int, j: int, n: int, periodic: bool) -> bool:
    d = abs(i - j)
    return d == 1 or (periodic and d == n - 1)


def _commute(i: int, j: int, n: int, periodic: bool) -> bool:
    return i != j and not _adjacent(i, j, n, periodic)


def _reduce_once(w: Word, n: int, periodic: bool):
    """Apply one reduction.  Returns None for zero, the same tuple if irreducible."""
    L = len(w)
    for a in range(L):
        x = w[a]
        blockers = []
        for c in range(a + 1, L):
            y = w[c]
            if y == x:
                if not blockers:
                    return None
                if len(blockers) == 1:
                    b = blockers[0]
                    return w[:b] + w[b + 1 : c] + w[c + 1 :]
                break
            if _adjacent(x, y, n, periodic):
                blockers.append(c)
                if len(blockers) > 1:
                    break
    return w


def _lex_normal(w: Word, n: int, periodic: bool) -> Word:
    """Lexicographically smallest representative of the trace of w."""
    rest = list(w)
    out = []
    while rest:
        best = None
        for k, x in enumerate(rest):
            if best is not None and x >= rest[best]:
                continue
            if all(_commute(x, rest[j], n, periodic) for j in range(k)):
                best = k
        out.append(rest.pop(best))
    return tuple(out)


@lru_cache(maxsize=1 << 18)
def normal_form(w: Word, n: int, periodic: bool):
    """Reduced lexicographic normal form of a word, or None if it vanishes."""
    cur = w
    while True:
        nxt = _reduce_once(cur, n, periodic)
        if nxt is None:
            return None
        if nxt == cur:
            return _lex_normal(cur, n, periodic)
        cur = nxt


# ---------------------------------------------------------------------------
# elements


class AlgebraElement:
    """Finite linear combination of reduced words with exact Scalar coefficients."""

    __slots__ = ("chain", "terms")

    def __init__(self, chain: Chain, terms: Mapping[Word, Scalar] | None = None, *, reduced: bool = False):
        self.chain = chain
        acc: dict[Word, Scalar] = {}
        for w, c in (terms or {}).items():
            c = Scalar.of(c)
            if not c:
                continue
            if reduced:
                nf = w
            else:
                w = tuple(chain.index(i) for i in w)
                nf = normal_form(w, chain.n, chain.periodic)
                if nf is None:
                    continue
            acc[nf] = acc.get(nf, ZERO) + c
        self.terms = {w: c for w, c in acc.items() if c}

    # constructors -------------------------------------------------------
    @classmethod
    def generator(cls, chain: Chain, i: int) -> "AlgebraElement":
        return cls(chain, {(chain.index(i),): ONE}, reduced=True)

    @classmethod
    def identity(cls, chain: Chain) -> "AlgebraElement":
        return cls(chain, {(): ONE}, reduced=True)

    @classmethod
    def zero(cls, chain: Chain) -> "AlgebraElement":
        return cls(chain, {}, reduced=True)

    @classmethod
    def word(cls, chain: Chain, letters: Iterable[int], coeff=ONE) -> "AlgebraElement":
        return cls(chain, {tuple(letters): Scalar.of(coeff)})

    # ring structure -------------------------------------------------------
    def _same(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement):
            raise TypeError("expected an AlgebraElement")
        if other.chain != self.chain:
            raise ContextError(f"chain mismatch: {self.chain} vs {other.chain}")

    def _combine(self, other, sign: int) -> "AlgebraElement":
        self._same(other)
        acc = dict(self.terms)
        for w, c in other.terms.items():
            acc[w] = acc.get(w, ZERO) + (c if sign > 0 else -c)
        return AlgebraElement(self.chain, acc, reduced=True)

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self._combine(other, 1)

    def __sub__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self._combine(other, -1)

    def __neg__(self):
        return AlgebraElement(self.chain, {w: -c for w, c in self.terms.items()}, reduced=True)

    def scale(self, c) -> "AlgebraElement":
        c = Scalar.of(c)
        return AlgebraElement(self.chain, {w: v * c for w, v in self.terms.items()}, reduced=True)

    def __matmul__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return multiply(self, other)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    # inspection -----------------------------------------------------------
    def is_syntactic_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def coefficient(self, word: Iterable[int]) -> Scalar:
        w = normal_form(tuple(self.chain.index(i) for i in word), self.chain.n, self.chain.periodic)
        return ZERO if w is None else self.terms.get(w, ZERO)

    def max_word_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def equals(self, other: "AlgebraElement", *, oracle: bool = True) -> bool:
        """Normal-form comparison, falling back to Fock matrices when words differ."""
        self._same(other)
        diff = self - other
        if diff.is_syntactic_zero():
            return True
        if oracle and self.chain.n <= FOCK_ORACLE_MAX_N:
            from .fock_rep import represent

            return represent(diff).is_zero()
        return False

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if other.chain != self.chain:
            return False
        return self.equals(other)

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return f"AlgebraElement(N={self.chain.n}, 0)"
        parts = []
        for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))[:6]:
            name = "*".join(f"e{i}" for i in w) or "1"
            parts.append(f"({c.re if c.im == 0 else complex(c)})*{name}")
        more = "" if len(self.terms) <= 6 else f" + ... ({len(self.terms)} words)"
        return f"AlgebraElement(N={self.chain.n}, {' + '.join(parts)}{more})"

    # serialisation ---------------------------------------------------------
    def to_dict(self) -> dict:
        terms = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            re, im = self.terms[w].to_json()
            terms.append({"word": list(w), "re": re, "im": im})
        return {"n": self.chain.n, "boundary": self.chain.boundary, "terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "AlgebraElement":
        chain = Chain(int(d["n"]), d.get("boundary", PERIODIC))
        return cls(chain, {tuple(t["word"]): Scalar.parse(t["re"], t["im"]) for t in d["terms"]})

    @classmethod
    def from_json(cls, s: str) -> "AlgebraElement":
        return cls.from_dict(json.loads(s))


def multiply(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Reduced product x*y."""
    x._same(y)
    n, per = x.chain.n, x.chain.periodic
    acc: dict[Word, Scalar] = {}
    for w1, c1 in x.terms.items():
        for w2, c2 in y.terms.items():
            nf = normal_form(w1 + w2, n, per)
            if nf is None:
                continue
            acc[nf] = acc.get(nf, ZERO) + c1 * c2
    return AlgebraElement(x.chain, acc, reduced=True)


def commutator(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return multiply(x, y) - multiply(y, x)


def ad_power(x: AlgebraElement, y: AlgebraElement, k: int) -> AlgebraElement:
    """ad_x^k (y)."""
    out = y
    for _ in range(k):
        out = commutator(x, out)
    return out


# ---------------------------------------------------------------------------
# realization backend and named elements


class WordRealization(Realization):
    """Named elements as exact AlgebraElements."""

    def __init__(self, n: int, boundary: str = PERIODIC):
        super().__init__(n, boundary)
        self.chain = Chain(n, boundary)

    def _generator(self, i):
        return AlgebraElement.generator(self.chain, i)

    def identity(self):
        return AlgebraElement.identity(self.chain)

    def zero(self):
        return AlgebraElement.zero(self.chain)

    def scale(self, c, x):
        return x.scale(c)

    def mul(self, x, y):
        return multiply(x, y)

    def is_zero(self, x) -> bool:
        return x.equals(AlgebraElement.zero(self.chain))


@lru_cache(maxsize=64)
def _realization(chain: Chain) -> WordRealization:
    return WordRealization(chain.n, chain.boundary)


def _as_chain(chain) -> Chain:
    if isinstance(chain, Chain):
        return chain
    return Chain(int(chain))


def generator(chain, i: int) -> AlgebraElement:
    return AlgebraElement.generator(_as_chain(chain), i)


def q_poly(chain, i: int, m: int) -> AlgebraElement:
    """Nested commutator q_i^m (m=0 gives the identity)."""
    return _realization(_as_chain(chain)).q(i, m)


def _require_periodic(chain: Chain):
    if not chain.periodic:
        raise ModeError("lattice sums with (-1)^i weights need the periodic chain")


def q_shift_invariant(chain, label: str, m: int) -> AlgebraElement:
    """q_+^m, q_-^m, q_e^m or q_o^m ('+', '-', 'e', 'o')."""
    chain = _as_chain(chain)
    _require_periodic(chain)
    return _realization(chain).q_sum(label, m)


def q_tilde(chain, label: str, m: int) -> AlgebraElement:
    chain = _as_chain(chain)
    _require_periodic(chain)
    return _realization(chain).q_tilde(label, m)


def loop_generator(chain, kind: str, index: int) -> AlgebraElement:
    chain = _as_chain(chain)
    _require_periodic(chain)
    return _realization(chain).loop(kind, index)


def average_charge(chain, m: int) -> AlgebraElement:
    """q_+^m; on the open chain the sum runs over all bracket windows that fit."""
    return _realization(_as_chain(chain)).average_charge(m)


def floquet_charge(chain, m: int, z) -> AlgebraElement:
    chain = _as_chain(chain)
    _require_periodic(chain)
    return _realization(chain).floquet_charge(m, Scalar.of(z))


def bch_coefficient(chain, k: int) -> AlgebraElement:
    chain = _as_chain(chain)
    _require_periodic(chain)
    return _realization(chain).bch_term(k)


def bch_prefactor(k: int) -> Fraction:
    return bch_rational(k)


def apply_automorphism(x: AlgebraElement, t) -> AlgebraElement:
    """e_i -> t e_i (i even), t^{-1} e_i (i odd), extended multiplicatively."""
    t = Scalar.of(t)
    if not t:
        raise DomainError("automorphism parameter must be nonzero")
    out = {}
    for w, c in x.terms.items():
        k = sum(1 if i % 2 == 0 else -1 for i in w)
        out[w] = c * t**k
    return AlgebraElement(x.chain, out, reduced=True)


def adjoint_action_check(chain, s: int, z, charge: AlgebraElement | None = None) -> bool:
    """Verify the truncated adjoint actions of H_e = E^0 and H_o = F^1 on Q_{2s+1}.

    Checks ad_{E^0} Q = H^{s+1} - z E^{s+1}, ad^2 = -2 E^{s+1}, ad^3 = 0 and
    ad_{F^1} Q = -H^{s+1} + z F^{s+2}, ad^2 = -2 F^{s+2}, ad^3 = 0, then that
    exp(-z ad_{H_e}) Q = exp(z ad_{H_o}) Q = E^s + F^{s+1} - (z/2) H^{s+1}.
    ``charge`` overrides Q_{2s+1} (for negative controls).
    """
    chain = _as_chain(chain)
    z = Scalar.of(z)
    if not 2 * s + 3 < chain.n:
        raise DomainError(f"need 2s+3 < N (s={s}, N={chain.n})")
    R = _realization(chain)
    Q = charge if charge is not None else R.floquet_charge(2 * s + 1, z)
    He, Ho = R.loop("E", 0), R.loop("F", 1)
    Hs1, Es1, Fs2 = R.loop("H", s + 1), R.loop("E", s + 1), R.loop("F", s + 2)

    a1, a2, a3 = ad_power(He, Q, 1), ad_power(He, Q, 2), ad_power(He, Q, 3)
    b1, b2, b3 = ad_power(Ho, Q, 1), ad_power(Ho, Q, 2), ad_power(Ho, Q, 3)
    checks = [
        a1.equals(Hs1 - Es1.scale(z)),
        a2.equals(Es1.scale(-2)),
        a3.equals(R.zero()),
        b1.equals(-Hs1 + Fs2.scale(z)),
        b2.equals(Fs2.scale(-2)),
        b3.equals(R.zero()),
    ]
    if not all(checks):
        return False
    half = Fraction(1, 2)
    target = R.loop("E", s) + R.loop("F", s + 1) - Hs1.scale(z * half)
    lhs = Q - a1.scale(z) + a2.scale(z * z * half)
    rhs = Q + b1.scale(z) + b2.scale(z * z * half)
    return lhs.equals(target) and rhs.equals(target)


def boost(chain) -> AlgebraElement:
    """B = sum_j j e_j on the open chain."""
    chain = _as_chain(chain)
    if chain.periodic:
        raise ModeError("the boost operator is defined on the open chain only")
    return AlgebraElement(chain, {(j,): Scalar.of(j) for j in chain.indices()}, reduced=True)


@dataclass(frozen=True)
class BoostResidual:
    """Residual [Q_m, B] - m Q_{m+1} - (m-2) Q_{m-1} and where it lives."""

    m: int
    residual: AlgebraElement
    reach: int  # largest distance (in sites) of any residual word from a chain end
    interior_clean: bool


def _word_reach(w: Word, n: int) -> int:
    """Distance of a word's support from the nearest chain end (open chain)."""
    lo, hi = min(w), max(w)
    return min(lo - 1, (n - 1) - hi)


def boost_commutator(chain, m: int, *, boost_element: AlgebraElement | None = None, margin: int | None = None) -> BoostResidual:
    """Compare [Q_m, B] with m Q_{m+1} + (m-2) Q_{m-1} on the open chain."""
    chain = _as_chain(chain)
    if chain.periodic:
        raise ModeError("boost commutator requires the open chain")
    if not 2 <= m < chain.n - 1:
        raise DomainError(f"boost order m={m} outside [2, {chain.n - 2}]")
    R = _realization(chain)
    B = boost_element if boost_element is not None else boost(chain)
    lhs = commutator(R.average_charge(m), B)
    rhs = R.average_charge(m + 1).scale(m)
    if m > 2:
        rhs = rhs + R.average_charge(m - 1).scale(m - 2)
    res = lhs - rhs
    reach = max((_word_reach(w, chain.n) for w in res.terms if w), default=-1)
    margin = m if margin is None else margin
    return BoostResidual(m, res, reach, reach < margin)
