"""Quadratic fermionic representations of the open-chain TL_N(0).

Each generator acts on a bond (i, i+1) through the mode vector
c_i = (c_i, c_i^dag, c_{i+1}, c_{i+1}^dag):

    xi(e_i) = 1/2 c_i^T G c_i + v^T c_i + chi,

with (G, v, chi) = (G_e, v_e, chi_e) on even bonds and (G_o, v_o, chi_o) on
odd ones.  Two families of solutions exist; both reduce to the symplectic
fermions after a site gauge, the rescaling automorphism and (second family)
a particle-hole swap on odd sites.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.optimize import least_squares

from .errors import DomainError
from .fock_rep import canonical_mode, i_power, symplectic_mode
from .scalar import ExactMatrix, Scalar

CONVERGED_TOL = 1e-10
CLASSIFY_TOL = 1e-8
LINEAR_TOL = 1e-6
MAX_NFEV = 200
NORM_TARGET = 16.0
_PAIRS = list(combinations(range(4), 2))  # upper-triangular slots of G


# ---------------------------------------------------------------------------
# templates


def _inv(t):
    return 1 / t if not isinstance(t, Scalar) else t.inverse()


def g_family1(alpha, t) -> list[list]:
    """Hopping-type G (number + hopping terms)."""
    ti = _inv(t)
    rows = [[0, -1, 0, -ti], [1, 0, -t, 0], [0, t, 0, 1], [ti, 0, -1, 0]]
    return [[alpha * v for v in r] for r in rows]


def g_family2_even(alpha, t) -> list[list]:
    ti = _inv(t)
    rows = [[0, -1, -ti, 0], [1, 0, 0, -t], [ti, 0, 0, -1], [0, t, 1, 0]]
    return [[alpha * v for v in r] for r in rows]


def g_family2_odd(alpha, t) -> list[list]:
    ti = _inv(t)
    rows = [[0, 1, -t, 0], [-1, 0, 0, -ti], [t, 0, 0, 1], [0, ti, -1, 0]]
    return [[alpha * v for v in r] for r in rows]


@dataclass(frozen=True)
class SolutionFamily:
    """Closed-form solution: case 1 or 2 with alpha_o = -1/alpha_e.

    ``orientation`` is 'odd' (particle-hole partner on odd sites, the default)
    or 'even' (the global particle-hole image of case 2).
    """

    case: int
    alpha_e: object
    t_e: object
    t_o: object
    orientation: str = "odd"

    def __post_init__(self):
        if self.case not in (1, 2):
            raise DomainError(f"case must be 1 or 2, got {self.case}")
        for name in ("alpha_e", "t_e", "t_o"):
            v = getattr(self, name)
            if (isinstance(v, Scalar) and not v) or (not isinstance(v, Scalar) and v == 0):
                raise DomainError(f"{name} must be nonzero")

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (Scalar, int, Fraction)) for v in (self.alpha_e, self.t_e, self.t_o))

    def _s(self, v):
        return Scalar.of(v) if self.exact else complex(v)

    @property
    def alpha_o(self):
        a = self._s(self.alpha_e)
        return -a.inverse() if self.exact else -1 / a

    def g_matrices(self):
        ae, ao = self._s(self.alpha_e), self.alpha_o
        te, to = self._s(self.t_e), self._s(self.t_o)
        if self.case == 1:
            return g_family1(ae, te), g_family1(ao, to)
        ge, go = g_family2_even(ae, te), g_family2_odd(ao, to)
        if self.orientation == "even":
            ge, go = _swap_ph(ge), _swap_ph(go)
        return ge, go

    def ansatz(self) -> "QuadraticAnsatz":
        ge, go = self.g_matrices()
        zero = Scalar(0) if self.exact else 0j
        return QuadraticAnsatz(ge, go, [zero] * 4, [zero] * 4, zero, zero)


_PH = [1, 0, 3, 2]


def _swap_ph(G):
    """G -> P^T G P for the relabelling c <-> c^dag on both sites."""
    return [[G[_PH[a]][_PH[b]] for b in range(4)] for a in range(4)]


@dataclass(frozen=True)
class QuadraticAnsatz:
    G_e: list
    G_o: list
    v_e: list
    v_o: list
    chi_e: object
    chi_o: object

    def __post_init__(self):
        for G in (self.G_e, self.G_o):
            for a in range(4):
                for b in range(4):
                    if G[a][b] + G[b][a] != 0:
                        raise DomainError("G must be antisymmetric")

    @property
    def exact(self) -> bool:
        vals = [v for G in (self.G_e, self.G_o) for r in G for v in r] + list(self.v_e) + list(self.v_o) + [self.chi_e, self.chi_o]
        return all(isinstance(v, (Scalar, int, Fraction)) for v in vals)

    def parts(self, i: int):
        return (self.G_e, self.v_e, self.chi_e) if i % 2 == 0 else (self.G_o, self.v_o, self.chi_o)

    @classmethod
    def from_vector(cls, theta: np.ndarray) -> "QuadraticAnsatz":
        z = theta[:22] + 1j * theta[22:]
        def G(off):
            M = [[0j] * 4 for _ in range(4)]
            for k, (a, b) in enumerate(_PAIRS):
                M[a][b] = z[off + k]
                M[b][a] = -z[off + k]
            return M
        return cls(G(0), G(6), list(z[12:16]), list(z[16:20]), z[20], z[21])


# ---------------------------------------------------------------------------
# instantiation on the Fock space


def _mode_vector(n: int, i: int, exact: bool):
    ops = [canonical_mode(n, i, "c"), canonical_mode(n, i, "c+"), canonical_mode(n, i + 1, "c"), canonical_mode(n, i + 1, "c+")]
    return ops if exact else [o.to_complex() for o in ops]


def bond_operator(ansatz: QuadraticAnsatz, n: int, i: int):
    """xi(e_i) on an n-site chain (sites 0..n-1, bonds i = 0..n-2)."""
    if not 0 <= i <= n - 2:
        raise DomainError(f"bond {i} outside [0, {n - 2}]")
    G, v, chi = ansatz.parts(i)
    exact = ansatz.exact
    C = _mode_vector(n, i, exact)
    dim = 1 << n
    if exact:
        acc = ExactMatrix.zeros((dim, dim), sparse=True)
        for a, b in _PAIRS:
            g = Scalar.of(G[a][b])
            if g:
                acc = acc + (C[a] @ C[b] - C[b] @ C[a]).scale(g * Fraction(1, 2))
        for a in range(4):
            if Scalar.of(v[a]):
                acc = acc + C[a].scale(v[a])
        if Scalar.of(chi):
            acc = acc + ExactMatrix.identity(dim, sparse=True).scale(chi)
        return acc
    acc = np.zeros((dim, dim), dtype=complex)
    for a, b in _PAIRS:
        acc += 0.5 * complex(G[a][b]) * (C[a] @ C[b] - C[b] @ C[a])
    for a in range(4):
        acc += complex(v[a]) * C[a]
    acc += complex(chi) * np.eye(dim)
    return acc


@dataclass
class Instance:
    """Family generators xi(e_0..e_{n-2}) on an n-site open chain."""

    n: int
    generators: list

    def __getitem__(self, i):
        return self.generators[i]


def instantiate(family: SolutionFamily | QuadraticAnsatz, n: int = 6) -> Instance:
    if not 3 <= n <= 10:
        raise DomainError(f"instantiate supports 3 <= n <= 10, got {n}")
    ans = family.ansatz() if isinstance(family, SolutionFamily) else family
    return Instance(n, [bond_operator(ans, n, i) for i in range(n - 1)])


# ---------------------------------------------------------------------------
# residuals


def _maxabs(x) -> float:
    if isinstance(x, ExactMatrix):
        return x.max_abs()
    return float(np.abs(x).max(initial=0.0))


def relation_residuals(gens: list) -> dict[str, float]:
    """Max-entry residuals of every open-chain TL_N(0) relation."""
    out = {}
    m = len(gens)
    for i in range(m):
        e = gens[i]
        out[f"e{i}^2"] = _maxabs(e @ e)
        for j in (i - 1, i + 1):
            if 0 <= j < m:
                out[f"e{i}e{j}e{i}-e{i}"] = _maxabs(e @ gens[j] @ e - e)
        for j in range(i + 2, m):
            out[f"[e{i},e{j}]"] = _maxabs(e @ gens[j] - gens[j] @ e)
    return out


def constraint_residual(ansatz: QuadraticAnsatz | SolutionFamily, n: int = 4) -> dict[str, float]:
    return relation_residuals(instantiate(ansatz, n).generators)


# ---------------------------------------------------------------------------
# gauge fixing


@dataclass
class GaugeData:
    x: list  # x_i with f_i = x_i c_i (or x_i c_i^dag on particle-hole sites)
    automorphism_t: object  # parameter removing alpha_e
    particle_hole_sites: list[int]
    verified: bool | None = None


def _canonical_generators(n: int) -> list:
    out = []
    for i in range(n - 1):
        fx = symplectic_mode(n, i, "fx") + symplectic_mode(n, i + 1, "fx")
        f = symplectic_mode(n, i, "f") + symplectic_mode(n, i + 1, "f")
        out.append(fx @ f)
    return out


def _ph_frame(n: int, sites: list[int]) -> ExactMatrix:
    """W with D_j W = W c_j, where D_j = c_j^dag on ``sites`` and c_j elsewhere."""
    dim = 1 << n
    D_dag = []
    for j in range(n):
        D_dag.append(canonical_mode(n, j, "c" if j in sites else "c+"))
    vac = 0
    for j in sites:
        vac |= 1 << j
    rows, cols, vals = [], [], []
    for state in range(dim):
        vec = np.zeros(dim, dtype=np.int64)
        vec[vac] = 1
        for j in reversed([j for j in range(n) if (state >> j) & 1]):
            vec = D_dag[j].re @ vec
        nz = np.nonzero(vec)[0]
        for r in nz:
            rows.append(int(r))
            cols.append(state)
            vals.append(int(vec[r]))
    import scipy.sparse as sp

    re = sp.csr_matrix((np.array(vals, dtype=np.int64), (rows, cols)), shape=(dim, dim))
    return ExactMatrix(re, sp.csr_matrix((dim, dim), dtype=np.int64))


def _occupation_weights(n: int, mu: list[Scalar]) -> list[Scalar]:
    """s(state) = prod_j mu_j^{-n_j}, the diagonal of the gauge similarity S."""
    inv = [m.inverse() for m in mu]
    out = []
    for state in range(1 << n):
        s = Scalar(1)
        for j in range(n):
            if (state >> j) & 1:
                s = s * inv[j]
        out.append(s)
    return out


def _conjugated_equal(g: ExactMatrix, target: ExactMatrix, w: list[Scalar]) -> bool:
    """Exact test of S g S^{-1} == target for diagonal S = diag(w)."""
    ge, te = g.entries(), target.entries()
    if ge.keys() != te.keys():
        return False
    return all(w[r] * v * w[c].inverse() == te[(r, c)] for (r, c), v in ge.items())


def normalize_to_symplectic(family: SolutionFamily, n: int = 6, *, verify: bool = True) -> GaugeData:
    """Gauge sequence x_i, automorphism parameter and particle-hole sites mapping
    the family onto e_i = (f_i^x + f_{i+1}^x)(f_i + f_{i+1}), f_j = i^j c_j."""
    if not family.exact:
        raise DomainError("exact gauge fixing needs Gaussian-rational parameters")
    a = Scalar.of(family.alpha_e)
    te, to = Scalar.of(family.t_e), Scalar.of(family.t_o)
    x = [Scalar(1)]
    for i in range(n - 1):
        x.append(x[-1] * -(te if i % 2 == 0 else to))
    s = a.inverse()
    if family.case == 1:
        ph = []
    else:
        ph = [j for j in range(n) if j % 2 == 1] if family.orientation == "odd" else [j for j in range(n) if j % 2 == 0]
    data = GaugeData(x, s, ph)
    if not verify:
        return data
    gens = instantiate(family, n).generators
    # rescaling automorphism: even generators times s, odd generators times 1/s
    gens = [g.scale(s if i % 2 == 0 else a) for i, g in enumerate(gens)]
    if ph:
        W = _ph_frame(n, ph)
        Winv = W.transpose()  # W is a signed permutation
        gens = [Winv @ g @ W for g in gens]
    mu = [i_power(j) * x[j].inverse() for j in range(n)]
    w = _occupation_weights(n, mu)
    data.verified = all(_conjugated_equal(g, c, w) for g, c in zip(gens, _canonical_generators(n)))
    return data


# ---------------------------------------------------------------------------
# brute-force classification


@dataclass
class _Basis:
    """Per-bond operator basis so that xi(e_i) = sum_k theta_k B_k."""

    n: int
    mats: list  # mats[i] = list of 11 matrices (6 G, 4 v, 1 chi) for bond i


def _bond_basis(n: int) -> _Basis:
    dim = 1 << n
    mats = []
    for i in range(n - 1):
        C = _mode_vector(n, i, exact=False)
        bl = [0.5 * (C[a] @ C[b] - C[b] @ C[a]) for a, b in _PAIRS]
        bl += C
        bl.append(np.eye(dim, dtype=complex))
        mats.append(np.array(bl))
    return _Basis(n, mats)


def _param_slices(i: int):
    """Indices into the 22 complex parameters used by bond i."""
    if i % 2 == 0:
        return list(range(0, 6)) + list(range(12, 16)) + [20]
    return list(range(6, 12)) + list(range(16, 20)) + [21]


def _relations(m: int):
    rel = []
    for i in range(m):
        rel.append(("sq", i))
        for j in (i - 1, i + 1):
            if 0 <= j < m:
                rel.append(("braid", i, j))
        for j in range(i + 2, m):
            rel.append(("comm", i, j))
    return rel


class _System:
    def __init__(self, n: int, fixed: dict[int, complex] | None = None):
        self.basis = _bond_basis(n)
        self.m = n - 1
        self.rel = _relations(self.m)
        self.idx = [_param_slices(i) for i in range(self.m)]
        self.fixed = dict(fixed or {})
        self.free = [k for k in range(22) if k not in self.fixed]
        self.rows = None
        # rows that vanish at generic points are identically zero polynomials
        rng = np.random.default_rng(12345)
        live = None
        for _ in range(3):
            x = rng.standard_normal(2 * len(self.free))
            J, r = self.jacobian(x), self.residual(x)
            k = (len(r) - 1) // 2
            hit = (np.abs(J[:k]).max(axis=1) > 0) | (np.abs(J[k : 2 * k]).max(axis=1) > 0) | (r[:k] != 0) | (r[k : 2 * k] != 0)
            live = hit if live is None else live | hit
        self.rows = np.flatnonzero(live)

    def full(self, theta_free: np.ndarray) -> np.ndarray:
        nf = len(self.free)
        z = np.zeros(22, dtype=complex)
        z[self.free] = theta_free[:nf] + 1j * theta_free[nf:]
        for k, v in self.fixed.items():
            z[k] = v
        return z

    def gens(self, z):
        return [np.tensordot(z[self.idx[i]], self.basis.mats[i], axes=1) for i in range(self.m)]

    def residual(self, theta_free):
        z = self.full(theta_free)
        X = self.gens(z)
        parts = []
        for r in self.rel:
            if r[0] == "sq":
                R = X[r[1]] @ X[r[1]]
            elif r[0] == "braid":
                i, j = r[1], r[2]
                R = X[i] @ X[j] @ X[i] - X[i]
            else:
                i, j = r[1], r[2]
                R = X[i] @ X[j] - X[j] @ X[i]
            parts.append(R.ravel())
        c = np.concatenate(parts)
        if self.rows is not None:
            c = c[self.rows]
        g = z[:12]
        norm = 2 * float(np.sum(np.abs(g) ** 2)) - NORM_TARGET
        return np.concatenate([c.real, c.imag, [norm]])

    def jacobian(self, theta_free):
        z = self.full(theta_free)
        X = self.gens(z)
        B = self.basis.mats
        d2 = X[0].size
        Jc = np.zeros((len(self.rel), d2, 22), dtype=complex)

        def put(blk, i, D):
            blk[:, self.idx[i]] += D.reshape(len(D), -1).T

        for row, r in enumerate(self.rel):
            blk = Jc[row]
            i = r[1]
            if r[0] == "sq":
                put(blk, i, B[i] @ X[i] + X[i] @ B[i])
            elif r[0] == "braid":
                j = r[2]
                put(blk, i, B[i] @ (X[j] @ X[i]) + (X[i] @ X[j]) @ B[i] - B[i])
                put(blk, j, X[i] @ B[j] @ X[i])
            else:
                j = r[2]
                put(blk, i, B[i] @ X[j] - X[j] @ B[i])
                put(blk, j, X[i] @ B[j] - B[j] @ X[i])
        Jc = Jc.reshape(-1, 22)
        if self.rows is not None:
            Jc = Jc[self.rows]
        Jc = Jc[:, self.free]
        top = np.hstack([Jc.real, -Jc.imag])
        bot = np.hstack([Jc.imag, Jc.real])
        zf = z[self.free]
        gmask = np.array([k < 12 for k in self.free], dtype=float)
        last = np.concatenate([4 * zf.real * gmask, 4 * zf.imag * gmask])[None, :]
        return np.vstack([top, bot, last])


@lru_cache(maxsize=8)
def _system(sites: int, fixed: tuple = ()) -> _System:
    return _System(sites, dict(fixed))


@dataclass
class SolveResult:
    converged: bool
    residual: float
    theta: np.ndarray
    family: str | None = None
    class_residual: float = float("nan")
    linear: float = float("nan")


def _fit_family(Ge: np.ndarray, Go: np.ndarray) -> tuple[str | None, float]:
    """Best template fit; returns (label, residual)."""
    best = (None, float("inf"))

    def attempt(label, te_fn, to_fn, ge, go, ae, ao, te_idx, to_idx):
        nonlocal best
        if abs(ae) < 1e-6 or abs(ao) < 1e-6:
            return
        t_e = -ge[te_idx] / ae
        t_o = -go[to_idx] / ao
        if abs(t_e) < 1e-6 or abs(t_o) < 1e-6:
            return
        Te = np.array(te_fn(ae, t_e), dtype=complex)
        To = np.array(to_fn(ao, t_o), dtype=complex)
        scale = max(1.0, np.abs(Ge).max(), np.abs(Go).max())
        r = max(np.abs(ge - Te).max(), np.abs(go - To).max()) / scale
        r = max(r, abs(ae * ao + 1))
        if r < best[1]:
            best = (label, r)

    attempt("family1", g_family1, g_family1, Ge, Go, -Ge[0, 1], -Go[0, 1], (1, 2), (1, 2))
    attempt("family2", g_family2_even, g_family2_odd, Ge, Go, -Ge[0, 1], Go[0, 1], (1, 3), (0, 2))
    P = np.eye(4)[_PH]
    Ge2, Go2 = P.T @ Ge @ P, P.T @ Go @ P
    attempt("family2", g_family2_even, g_family2_odd, Ge2, Go2, -Ge2[0, 1], Go2[0, 1], (1, 3), (0, 2))
    return best


def classify_solution(theta: np.ndarray) -> tuple[str | None, float, float]:
    """Classify a converged parameter vector (22 complex numbers as 44 reals).

    Returns (label, template residual, largest linear or constant part).  The label is None
    unless the G blocks match a family within CLASSIFY_TOL and the linear
    and constant parts are below LINEAR_TOL.
    """
    z = theta[:22] + 1j * theta[22:]
    ans = QuadraticAnsatz.from_vector(theta)
    lin = float(np.abs(z[12:22]).max())
    Ge, Go = np.array(ans.G_e, dtype=complex), np.array(ans.G_o, dtype=complex)
    label, r = _fit_family(Ge, Go)
    if label is None or r >= CLASSIFY_TOL or lin >= LINEAR_TOL:
        return None, r, lin
    return label, r, lin


def _solve_one(args) -> SolveResult:
    sites, child_seed, fixed, theta0 = args
    system = _system(sites, tuple(sorted((fixed or {}).items())))
    nf = len(system.free)
    if theta0 is None:
        rng = np.random.default_rng(child_seed)
        x0 = rng.standard_normal(2 * nf)
    else:
        x0 = theta0
    sol = least_squares(system.residual, x0, jac=system.jacobian, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=MAX_NFEV)
    res = float(np.abs(system.residual(sol.x)).max())
    z = system.full(sol.x)
    theta = np.concatenate([z.real, z.imag])
    out = SolveResult(res < CONVERGED_TOL, res, theta)
    if out.converged:
        out.family, out.class_residual, out.linear = classify_solution(theta)
    return out


@dataclass
class ClassificationReport:
    samples: int
    converged: int
    family1: int
    family2: int
    max_residual: float
    seed: int
    unclassified: int = 0
    max_linear: float = 0.0
    generators: int = 4
    results: list = field(default_factory=list, repr=False)

    @property
    def fraction_classified(self) -> float:
        return 1.0 if self.converged == 0 else (self.family1 + self.family2) / self.converged

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "converged": self.converged,
            "family1": self.family1,
            "family2": self.family2,
            "unclassified": self.unclassified,
            # both sit at the noise floor; more digits would vary with BLAS code paths
            "max_residual": float(f"{self.max_residual:.1e}"),
            "max_linear": float(f"{self.max_linear:.1e}"),
            "generators": self.generators,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _default_workers() -> int:
    env = os.environ.get("TLF_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run(jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [_solve_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_solve_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def brute_force_classify(n: int = 4, samples: int = 200, seed: int = 0, *, workers: int | None = None, starts: list | None = None) -> ClassificationReport:
    """Solve the relation system from random starts and classify every converged solution.

    ``n`` counts generators e_0..e_{n-1}, so the chain has n + 1 sites.  Four
    is the smallest size with a commuting pair of each bond parity, which is
    what pins both linear parts to zero.
    """
    if not 4 <= n <= 6:
        raise DomainError(f"brute-force classification supports 4 <= n <= 6 generators, got {n}")
    if samples < 0:
        raise DomainError("samples must be >= 0")
    if starts is not None and len(starts) < samples:
        raise DomainError("need one start per sample")
    children = np.random.SeedSequence(seed).spawn(samples)
    jobs = [(n + 1, c, None, None if starts is None else np.asarray(starts[k], dtype=float)) for k, c in enumerate(children)]
    results = _run(jobs, workers if workers is not None else _default_workers())
    conv = [r for r in results if r.converged]
    f1 = sum(r.family == "family1" for r in conv)
    f2 = sum(r.family == "family2" for r in conv)
    mx = max((r.class_residual for r in conv), default=0.0)
    ml = max((r.linear for r in conv), default=0.0)
    return ClassificationReport(samples, len(conv), f1, f2, mx, seed, len(conv) - f1 - f2, ml, n, results)


def family_start(family: SolutionFamily) -> np.ndarray:
    """Parameter vector of a (float) family instance, usable as a solver start."""
    ge, go = family.g_matrices()
    z = np.zeros(22, dtype=complex)
    for k, (a, b) in enumerate(_PAIRS):
        z[k] = complex(ge[a][b])
        z[6 + k] = complex(go[a][b])
    return np.concatenate([z.real, z.imag])


def forced_linear_floor(delta: complex = 0.5, samples: int = 20, seed: int = 1, slot: int = 12, n: int = 4) -> float:
    """Smallest residual reachable with one linear coefficient pinned to ``delta``."""
    children = np.random.SeedSequence(seed).spawn(samples)
    res = [_solve_one((n + 1, c, {slot: complex(delta)}, None)).residual for c in children]
    return float(min(res)) if res else float("nan")
