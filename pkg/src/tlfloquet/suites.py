"""Exact identity suites for pTL_N(0), runnable on any realization backend.

Each suite yields named checks ``lhs == rhs``; a backend decides equality
exactly (words with Fock fallback, Fock matrices, or N x N single-particle
matrices).  Used by the ``relations`` CLI subcommand and the test-suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator

from .errors import DomainError
from .realization import PERIODIC, Realization

BACKENDS = ("word", "fock", "single")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool


@dataclass
class SuiteReport:
    suite: str
    backend: str
    n: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    @property
    def ok(self) -> bool:
        return not self.failed

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "backend": self.backend,
            "n": self.n,
            "checks": len(self.checks),
            "passed": self.passed,
            "failed": self.failed,
        }


class FaultyRealization(Realization):
    """Wraps a backend and doubles e_0, so that every identity touching e_0 breaks."""

    def __init__(self, inner: Realization):
        super().__init__(inner.n, inner.boundary)
        self.inner = inner

    def _generator(self, i):
        g = self.inner.generator(i)
        return self.inner.scale(2, g) if i == 0 else g

    def identity(self):
        return self.inner.identity()

    def zero(self):
        return self.inner.zero()

    def scale(self, c, x):
        return self.inner.scale(c, x)

    def mul(self, x, y):
        return self.inner.mul(x, y)

    def is_zero(self, x) -> bool:
        return self.inner.is_zero(x)


def make_backend(kind: str, n: int, boundary: str = PERIODIC, *, fault: bool = False) -> Realization:
    if kind == "word":
        from .word_algebra import WordRealization

        R = WordRealization(n, boundary)
    elif kind == "fock":
        from .fock_rep import FockRealization

        R = FockRealization(n, boundary)
    elif kind == "single":
        from .single_particle import SingleParticleRealization

        R = SingleParticleRealization(n, boundary, exact=True)
    else:
        raise DomainError(f"unknown backend {kind!r}; choose from {BACKENDS}")
    return FaultyRealization(R) if fault else R


Check = tuple[str, Callable[[], object], Callable[[], object]]


# ---------------------------------------------------------------------------
# helpers


def _circ(i: int, j: int, n: int) -> int:
    d = abs(i - j) % n
    return min(d, n - d)


def _qs(R: Realization, label: str, m: int):
    """Lattice sum allowing m = 0 (q^0 = 1, so only the alternating sum is needed and vanishes)."""
    if m == 0:
        if label != "-":
            raise DomainError("only q_-^0 = 0 is used")
        return R.zero()
    return R.q_sum(label, m)


def _lin(R: Realization, *terms):
    """sum c * x over (c, x) pairs."""
    acc = R.zero()
    for c, x in terms:
        acc = acc + (x if c == 1 else R.scale(c, x))
    return acc


def _run(name: str, backend: str, R: Realization, checks: Iterator[Check]) -> SuiteReport:
    rep = SuiteReport(name, backend, R.n)
    for label, lhs, rhs in checks:
        rep.checks.append(CheckResult(label, R.equal(lhs(), rhs())))
    return rep


# ---------------------------------------------------------------------------
# defining relations


def _tl_checks(R: Realization) -> Iterator[Check]:
    n, e = R.n, R.generator
    idx = list(R.indices())
    for i in idx:
        yield f"e{i}*e{i} = 0", (lambda i=i: R.mul(e(i), e(i))), R.zero
        for j in idx:
            if j == i:
                continue
            if _circ(i, j, n) == 1 if R.periodic else abs(i - j) == 1:
                yield f"e{i}*e{j}*e{i} = e{i}", (lambda i=i, j=j: R.mul(R.mul(e(i), e(j)), e(i))), (lambda i=i: e(i))
            elif j > i:
                yield f"[e{i},e{j}] = 0", (lambda i=i, j=j: R.comm(e(i), e(j))), R.zero


def tl_relations(R: Realization, backend: str = "?") -> SuiteReport:
    """e_i^2 = 0, e_i e_{i+-1} e_i = e_i (including the wrap pairs), far commutation."""
    return _run("tl_relations", backend, R, _tl_checks(R))


# ---------------------------------------------------------------------------
# properties of the Lie algebra of commutators


def _prop5_rhs(R: Realization, j: int, i: int, m: int):
    n, q = R.n, R.q
    d = lambda a: (j - a) % n == 0  # noqa: E731
    terms = []
    if m == 1:
        if d(i - 1):
            terms.append((1, q(i - 1, 2)))
        if d(i + 1):
            terms.append((-1, q(i, 2)))
    elif m == 2:
        if d(i - 1):
            terms.append((1, q(i - 1, 3)))
        if d(i):
            terms.append((-2, q(i, 1)))
        if d(i + 1):
            terms.append((2, q(i + 1, 1)))
        if d(i + 2):
            terms.append((-1, q(i, 3)))
    elif m == 3:
        if d(i - 1):
            terms.append((1, q(i - 1, 4)))
        if d(i + 1):
            terms += [(1, q(i + 1, 2)), (-1, q(i, 2))]
        if d(i + 3):
            terms.append((-1, q(i, 4)))
    else:
        if d(i - 1):
            terms.append((1, q(i - 1, m + 1)))
        if d(i + 1):
            terms.append((1, q(i + 1, m - 1)))
        if d(i + m - 2):
            terms.append((-1, q(i, m - 1)))
        if d(i + m):
            terms.append((-1, q(i, m + 1)))
    return _lin(R, *terms)


def _prop6_rhs(R: Realization, label: str, j: int, m: int):
    q = R.q
    if label == "+":
        if m == 1:
            return q(j, 2) - q(j - 1, 2)
        if m == 2:
            return q(j, 3) - q(j - 2, 3)
        return q(j, m + 1) - q(j - m, m + 1) + q(j, m - 1) - q(j - m + 2, m - 1)
    sj = (-1) ** j
    if m == 1:
        inner = _lin(R, (-1, q(j, 2)), (1, q(j - 1, 2)))
    elif m == 2:
        inner = _lin(R, (-1, q(j, 3)), (-1, q(j - 2, 3)), (-4, q(j, 1)))
    else:
        sm = (-1) ** m
        inner = _lin(R, (-1, q(j, m + 1)), (-sm, q(j - m, m + 1)), (-1, q(j, m - 1)), (-sm, q(j - m + 2, m - 1)))
    return R.scale(sj, inner)


def _bracket_checks(R: Realization) -> Iterator[Check]:
    n, e, q = R.n, R.generator, R.q
    idx = list(R.indices())
    # 1: [e_i, e_{i+1}] = q_i^2, far brackets vanish
    for i in idx:
        yield f"P1 [e{i},e{i + 1}] = q_{i}^2", (lambda i=i: R.comm(e(i), e(i + 1))), (lambda i=i: q(i, 2))
        for j in idx:
            if j > i and _circ(i, j, n) > 1:
                yield f"P1 [e{i},e{j}] = 0", (lambda i=i, j=j: R.comm(e(i), e(j))), R.zero
    # 2: second-order brackets, ad^3 e_j = 0
    for i in idx:
        a, b = i, i + 1
        yield f"P2 [[e{a},e{b}],e{b}] = -2e{b}", (lambda a=a, b=b: R.comm(R.comm(e(a), e(b)), e(b))), (lambda b=b: R.scale(-2, e(b)))
        yield f"P2 [e{b},[e{b},e{a}]] = -2e{b}", (lambda a=a, b=b: R.comm(e(b), R.comm(e(b), e(a)))), (lambda b=b: R.scale(-2, e(b)))
        yield f"P2 [[e{b},e{a}],e{a}] = -2e{a}", (lambda a=a, b=b: R.comm(R.comm(e(b), e(a)), e(a))), (lambda a=a: R.scale(-2, e(a)))
        yield f"P2 [e{a},[e{a},e{b}]] = -2e{a}", (lambda a=a, b=b: R.comm(e(a), R.comm(e(a), e(b)))), (lambda a=a: R.scale(-2, e(a)))
        for j in idx:
            yield f"P2 ad_e{i}^3 e{j} = 0", (lambda i=i, j=j: R.comm(e(i), R.comm(e(i), R.comm(e(i), e(j))))), R.zero
    # 3: ad^2 h = -2 e h e, ad^3 h = 0 on a few test elements
    for i in idx:
        hs = {
            f"e{i + 1}e{i + 2}": lambda i=i: R.mul(e(i + 1), e(i + 2)),
            f"e{i - 1}e{i + 1}": lambda i=i: R.mul(e(i - 1), e(i + 1)),
            f"q_{i - 1}^3": lambda i=i: q(i - 1, 3),
        }
        for hname, h in hs.items():
            ad2 = lambda i=i, h=h: R.comm(e(i), R.comm(e(i), h()))  # noqa: E731
            yield f"P3 ad_e{i}^2 {hname} = -2 e h e", ad2, (lambda i=i, h=h: R.scale(-2, R.mul(R.mul(e(i), h()), e(i))))
            yield f"P3 ad_e{i}^3 {hname} = 0", (lambda i=i, ad2=ad2: R.comm(e(i), ad2())), R.zero
    # 4: left- and right-nested brackets agree
    for i in idx:
        for m in range(2, n):

            def left(i=i, m=m):
                acc = e(i)
                for k in range(1, m):
                    acc = R.comm(acc, e(i + k))
                return acc

            yield f"P4 left-nested q_{i}^{m}", left, (lambda i=i, m=m: q(i, m))
    # 5: [e_j, q_i^m]
    for m in range(1, n - 1):
        for i in idx:
            for j in idx:
                yield (
                    f"P5 [e{j},q_{i}^{m}]",
                    (lambda i=i, j=j, m=m: R.comm(e(j), q(i, m))),
                    (lambda i=i, j=j, m=m: _prop5_rhs(R, j, i, m)),
                )
    # 6: [e_j, q_+-^m]
    for m in range(1, n - 1):
        for label in "+-":
            for j in idx:
                yield (
                    f"P6 [e{j},q_{label}^{m}]",
                    (lambda j=j, m=m, label=label: R.comm(e(j), R.q_sum(label, m))),
                    (lambda j=j, m=m, label=label: _prop6_rhs(R, label, j, m)),
                )
    # 7: brackets of H_e, H_o with the tilde generators
    He, Ho = R.hamiltonian("e"), R.hamiltonian("o")
    qt = R.q_tilde
    for s in range(1, (n - 1) // 2 + 1):
        if 2 * s + 1 >= n:
            break
        yield f"P7 [He,qt_-^{2 * s}] = -2 qt_e^{2 * s + 1}", (lambda s=s: R.comm(He, qt("-", 2 * s))), (lambda s=s: R.scale(-2, qt("e", 2 * s + 1)))
        yield f"P7 [Ho,qt_-^{2 * s}] = 2 qt_o^{2 * s + 1}", (lambda s=s: R.comm(Ho, qt("-", 2 * s))), (lambda s=s: R.scale(2, qt("o", 2 * s + 1)))
    for s in range(0, n):
        if 2 * s + 2 >= n:
            break
        yield f"P7 [He,qt_e^{2 * s + 1}] = 0", (lambda s=s: R.comm(He, qt("e", 2 * s + 1))), R.zero
        yield f"P7 [Ho,qt_e^{2 * s + 1}] = -qt_-^{2 * s + 2}", (lambda s=s: R.comm(Ho, qt("e", 2 * s + 1))), (lambda s=s: R.scale(-1, qt("-", 2 * s + 2)))
        yield f"P7 [He,qt_o^{2 * s + 1}] = qt_-^{2 * s + 2}", (lambda s=s: R.comm(He, qt("o", 2 * s + 1))), (lambda s=s: qt("-", 2 * s + 2))
        yield f"P7 [Ho,qt_o^{2 * s + 1}] = 0", (lambda s=s: R.comm(Ho, qt("o", 2 * s + 1))), R.zero
    # 8: even q_+ commutes with H_e and H_o
    for m in range(2, n, 2):
        yield f"P8 [q_+^{m},He] = 0", (lambda m=m: R.comm(R.q_sum("+", m), He)), R.zero
        yield f"P8 [q_+^{m},Ho] = 0", (lambda m=m: R.comm(R.q_sum("+", m), Ho)), R.zero
    # 9: all q_+^m commute
    for m in range(1, n):
        for k in range(m + 1, n):
            yield f"P9 [q_+^{m},q_+^{k}] = 0", (lambda m=m, k=k: R.comm(R.q_sum("+", m), R.q_sum("+", k))), R.zero
    # 10: loop algebra
    yield from _loop_checks(R, "P10 ")


def bracket_properties(R: Realization, backend: str = "?") -> SuiteReport:
    """Properties 1-10 of the commutator Lie algebra (periodic chain)."""
    return _run("bracket_properties", backend, R, _bracket_checks(R))


def _hamiltonian_checks(R: Realization) -> Iterator[Check]:
    """The eight H_e/H_o bracket identities on the plain lattice sums."""
    n = R.n
    He, Ho = R.hamiltonian("e"), R.hamiltonian("o")
    qs = lambda label, m: _qs(R, label, m)  # noqa: E731
    yield "[He,Ho] = q_-^2", lambda: R.comm(He, Ho), lambda: qs("-", 2)
    for s in range(1, n):
        if 2 * s >= n:
            break
        for a, H in (("e", He), ("o", Ho)):
            yield f"[H{a},q_+^{2 * s}] = 0", (lambda H=H, s=s: R.comm(H, qs("+", 2 * s))), R.zero
    for s in range(0, n):
        if 2 * s + 2 >= n:
            break
        for a, H in (("e", He), ("o", Ho)):
            yield f"[H{a},q_{a}^{2 * s + 1}] = 0", (lambda H=H, a=a, s=s: R.comm(H, qs(a, 2 * s + 1))), R.zero
        yield (
            f"[He,q_o^{2 * s + 1}] = q_-^{2 * s + 2} + q_-^{2 * s}",
            (lambda s=s: R.comm(He, qs("o", 2 * s + 1))),
            (lambda s=s: qs("-", 2 * s + 2) + qs("-", 2 * s)),
        )
        yield (
            f"[Ho,q_e^{2 * s + 1}] = -(q_-^{2 * s + 2} + q_-^{2 * s})",
            (lambda s=s: R.comm(Ho, qs("e", 2 * s + 1))),
            (lambda s=s: R.scale(-1, qs("-", 2 * s + 2) + qs("-", 2 * s))),
        )
    if n > 3:
        yield "[He,q_-^2] = -2(q_e^3 + 2 q_e^1)", lambda: R.comm(He, qs("-", 2)), lambda: _lin(R, (-2, qs("e", 3)), (-4, qs("e", 1)))
        yield "[Ho,q_-^2] = 2(q_o^3 + 2 q_o^1)", lambda: R.comm(Ho, qs("-", 2)), lambda: _lin(R, (2, qs("o", 3)), (4, qs("o", 1)))
    for s in range(2, n):
        if 2 * s + 1 >= n:
            break
        yield (
            f"[He,q_-^{2 * s}] = -2(q_e^{2 * s + 1} + q_e^{2 * s - 1})",
            (lambda s=s: R.comm(He, qs("-", 2 * s))),
            (lambda s=s: _lin(R, (-2, qs("e", 2 * s + 1)), (-2, qs("e", 2 * s - 1)))),
        )
        # the odd-sublattice partner carries the opposite sign (as at s = 1)
        yield (
            f"[Ho,q_-^{2 * s}] = 2(q_o^{2 * s + 1} + q_o^{2 * s - 1})",
            (lambda s=s: R.comm(Ho, qs("-", 2 * s))),
            (lambda s=s: _lin(R, (2, qs("o", 2 * s + 1)), (2, qs("o", 2 * s - 1)))),
        )


def hamiltonian_brackets(R: Realization, backend: str = "?") -> SuiteReport:
    return _run("hamiltonian_brackets", backend, R, _hamiltonian_checks(R))


# ---------------------------------------------------------------------------
# loop algebra, centre, maximal commutative subalgebras


def _loop_index_range(R: Realization):
    """Largest usable index for each loop generator kind."""
    n = R.n
    return {"H": (n - 1) // 2, "E": (n - 2) // 2, "F": n // 2}


def _loop_ok(R: Realization, kind: str, idx: int) -> bool:
    lo = {"H": 1, "E": 0, "F": 1}[kind]
    return lo <= idx <= _loop_index_range(R)[kind]


def _loop_checks(R: Realization, prefix: str = "", max_sum: int | None = None) -> Iterator[Check]:
    L = R.loop
    top = max(_loop_index_range(R).values())
    rules = [
        ("H", "H", None, 0),
        ("E", "E", None, 0),
        ("F", "F", None, 0),
        ("H", "E", "E", 2),
        ("H", "F", "F", -2),
        ("E", "F", "H", 1),
    ]
    for a, b, target, coeff in rules:
        for n1 in range(0, top + 1):
            for n2 in range(0, top + 1):
                if not (_loop_ok(R, a, n1) and _loop_ok(R, b, n2)):
                    continue
                if max_sum is not None and n1 + n2 > max_sum:
                    continue
                if a == b and n2 <= n1:
                    continue
                if target is None:
                    yield f"{prefix}[{a}^{n1},{b}^{n2}] = 0", (lambda a=a, b=b, n1=n1, n2=n2: R.comm(L(a, n1), L(b, n2))), R.zero
                    continue
                if not _loop_ok(R, target, n1 + n2):
                    continue
                yield (
                    f"{prefix}[{a}^{n1},{b}^{n2}] = {coeff}{target}^{n1 + n2}",
                    (lambda a=a, b=b, n1=n1, n2=n2: R.comm(L(a, n1), L(b, n2))),
                    (lambda target=target, s=n1 + n2, coeff=coeff: R.scale(coeff, L(target, s)) if coeff != 1 else L(target, s)),
                )


def loop_algebra(R: Realization, backend: str = "?", *, max_sum: int | None = None) -> SuiteReport:
    """The six sl(2) loop relations for every index pair within the order bound."""
    return _run("loop_algebra", backend, R, _loop_checks(R, max_sum=max_sum))


def _centre_checks(R: Realization) -> Iterator[Check]:
    n, qt = R.n, R.q_tilde
    He, Ho = R.hamiltonian("e"), R.hamiltonian("o")
    for m in range(2, n, 2):
        yield f"[qt_+^{m},He] = 0", (lambda m=m: R.comm(qt("+", m), He)), R.zero
        yield f"[qt_+^{m},Ho] = 0", (lambda m=m: R.comm(qt("+", m), Ho)), R.zero
        yield f"[qt_+^{m},q_-^2] = 0", (lambda m=m: R.comm(qt("+", m), R.q_sum("-", 2))), R.zero
    families = {"e": range(1, n, 2), "o": range(1, n, 2), "-": range(2, n, 2)}
    for label, orders in families.items():
        orders = list(orders)
        for a in orders:
            for b in orders:
                if b > a:
                    yield f"[qt_{label}^{a},qt_{label}^{b}] = 0", (lambda label=label, a=a, b=b: R.comm(qt(label, a), qt(label, b))), R.zero
    # the same relations written on the +/- tilde basis
    for a in range(1, n):
        for b in range(1, n):
            if a + b >= n:
                continue
            if b > a:
                yield f"[qt_+^{a},qt_+^{b}] = 0", (lambda a=a, b=b: R.comm(qt("+", a), qt("+", b))), R.zero
            if a % 2 == 0:
                yield f"[qt_+^{a},qt_-^{b}] = 0", (lambda a=a, b=b: R.comm(qt("+", a), qt("-", b))), R.zero
            else:
                yield f"[qt_+^{a},qt_-^{b}] = -2 qt_-^{a + b}", (lambda a=a, b=b: R.comm(qt("+", a), qt("-", b))), (lambda a=a, b=b: R.scale(-2, qt("-", a + b)))
            if a % 2 == b % 2 and b > a:
                yield f"[qt_-^{a},qt_-^{b}] = 0", (lambda a=a, b=b: R.comm(qt("-", a), qt("-", b))), R.zero
            if a % 2 == 0 and b % 2 == 1:
                yield f"[qt_-^{a},qt_-^{b}] = 2 qt_+^{a + b}", (lambda a=a, b=b: R.comm(qt("-", a), qt("-", b))), (lambda a=a, b=b: R.scale(2, qt("+", a + b)))


def centre_and_subalgebras(R: Realization, backend: str = "?") -> SuiteReport:
    """Centrality of even tilde q_+, commutative maximal subalgebras, tilde-basis brackets."""
    return _run("centre_and_subalgebras", backend, R, _centre_checks(R))


SUITES = {
    "tl_relations": tl_relations,
    "bracket_properties": bracket_properties,
    "hamiltonian_brackets": hamiltonian_brackets,
    "loop_algebra": loop_algebra,
    "centre_and_subalgebras": centre_and_subalgebras,
}


def run_all(R: Realization, backend: str = "?", suites=None) -> list[SuiteReport]:
    names = list(SUITES) if suites is None else list(suites)
    return [SUITES[name](R, backend) for name in names]


__all__ = [
    "BACKENDS",
    "CheckResult",
    "FaultyRealization",
    "SUITES",
    "SuiteReport",
    "bracket_properties",
    "centre_and_subalgebras",
    "hamiltonian_brackets",
    "loop_algebra",
    "make_backend",
    "run_all",
    "tl_relations",
]
