"""Fermion-bilinear (N x N) layer and its momentum-space views.

An operator sum_ab M_ab c_a^dag c_b is stored through M in the canonical
site-c basis; brackets are matrix commutators there.  The generator e_i is
rank one, M_i = x_i x_i^T with x_i = i^a e_a + i^b e_b on its bond (a, b), so
any word product collapses to a scalar times x_first x_last^T.

Momentum conventions: f_a = N^-1/2 sum_p e^{ipa} f_p,
f_a^x = N^-1/2 sum_p e^{-ipa} f_p^x, b_p = (1+e^{ip}) f_p,
b_p^x = (1+e^{-ip}) f_p^x.  Matrices in a momentum basis are indexed by the
grid position k with p = 2 pi k / N.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
import numpy as np

from .errors import DomainError, NotBilinearError
from .realization import PERIODIC, Realization, tilde_coefficients
from .scalar import ExactMatrix, Scalar, ZERO

BASES = ("site-c", "site-b", "momentum-b", "momentum-f")
_IPOW = [(1, 0), (0, 1), (-1, 0), (0, -1)]


@dataclass(frozen=True)
class MomentumGrid:
    """Brillouin-zone grid p_k = k * grid_step, k = 0..N-1."""

    n_sites: int

    @property
    def grid_step(self) -> float:
        return 2 * np.pi / self.n_sites

    @property
    def momenta(self) -> np.ndarray:
        return self.grid_step * np.arange(self.n_sites)

    def index(self, k: int) -> int:
        return k % self.n_sites

    def partner(self, k: int) -> int:
        """Grid index of p - pi (equivalently p + pi)."""
        return (k + self.n_sites // 2) % self.n_sites


@dataclass(frozen=True, eq=False)
class BilinearOperator:
    """c^dag M c + offset, with M exact (ExactMatrix) or complex float."""

    n_sites: int
    matrix: object
    basis: str = "site-c"
    offset: object = field(default=ZERO)

    def __post_init__(self):
        if self.basis not in BASES:
            raise DomainError(f"unknown basis {self.basis!r}")

    @property
    def exact(self) -> bool:
        return isinstance(self.matrix, ExactMatrix)

    def to_complex(self) -> np.ndarray:
        return self.matrix.to_complex() if self.exact else np.asarray(self.matrix, dtype=complex)

    def commutator(self, other: "BilinearOperator") -> "BilinearOperator":
        if self.basis != "site-c" or other.basis != "site-c":
            raise DomainError("brackets are taken in the site-c basis")
        if self.exact and other.exact:
            return BilinearOperator(self.n_sites, self.matrix.commutator(other.matrix))
        a, b = self.to_complex(), other.to_complex()
        return BilinearOperator(self.n_sites, a @ b - b @ a, offset=0j)

    def to_dict(self) -> dict:
        m = self.to_complex()
        rows = [[float(v.real), float(v.imag)] for v in m.ravel()]
        return {"n": self.n_sites, "basis": self.basis, "matrix": rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


# ---------------------------------------------------------------------------
# generators


def _bond(n: int, i: int, boundary: str) -> tuple[int, int]:
    if boundary == PERIODIC:
        return i % n, (i + 1) % n
    if not 1 <= i <= n - 1:
        raise DomainError(f"open-chain generator index {i} outside [1, {n - 1}]")
    return i - 1, i


@lru_cache(maxsize=4096)
def bond_vector(n: int, i: int, boundary: str = PERIODIC) -> tuple[tuple[int, int], ...]:
    """x_i as a tuple of Gaussian-integer (re, im) pairs."""
    a, b = _bond(n, i, boundary)
    v = [(0, 0)] * n
    v[a] = _IPOW[a % 4]
    v[b] = _IPOW[b % 4]
    return tuple(v)


def _gauss_mul(u, v):
    return (u[0] * v[0] - u[1] * v[1], u[0] * v[1] + u[1] * v[0])


@lru_cache(maxsize=1 << 16)
def _pairing(n: int, i: int, j: int, boundary: str) -> tuple[int, int]:
    """Unconjugated dot product x_i . x_j."""
    re = im = 0
    for u, v in zip(bond_vector(n, i, boundary), bond_vector(n, j, boundary)):
        if u != (0, 0) and v != (0, 0):
            p = _gauss_mul(u, v)
            re += p[0]
            im += p[1]
    return re, im


def _outer(n: int, i: int, j: int, boundary: str) -> ExactMatrix:
    x, y = bond_vector(n, i, boundary), bond_vector(n, j, boundary)
    xr = np.array([v[0] for v in x], dtype=np.int64)
    xi = np.array([v[1] for v in x], dtype=np.int64)
    yr = np.array([v[0] for v in y], dtype=np.int64)
    yi = np.array([v[1] for v in y], dtype=np.int64)
    return ExactMatrix(np.outer(xr, yr) - np.outer(xi, yi), np.outer(xr, yi) + np.outer(xi, yr), 1, normalize=False)


@lru_cache(maxsize=4096)
def generator_matrix(n: int, i: int, boundary: str = PERIODIC) -> ExactMatrix:
    """Exact single-particle matrix of e_i."""
    return _outer(n, i, i, boundary)


def generator_matrix_complex(n: int, i: int, boundary: str = PERIODIC) -> np.ndarray:
    return generator_matrix(n, i, boundary).to_complex()


class SingleParticleRealization(Realization):
    """Named elements as N x N matrices: exact (Gaussian rationals) or complex float."""

    def __init__(self, n: int, boundary: str = PERIODIC, exact: bool = True, atol: float = 1e-12):
        super().__init__(n, boundary)
        self.exact = exact
        self.atol = atol

    def _generator(self, i):
        g = generator_matrix(self.n, i, self.boundary)
        return g if self.exact else g.to_complex()

    def identity(self):
        return ExactMatrix.identity(self.n) if self.exact else np.eye(self.n, dtype=complex)

    def zero(self):
        return ExactMatrix.zeros((self.n, self.n)) if self.exact else np.zeros((self.n, self.n), dtype=complex)

    def scale(self, c, x):
        if self.exact:
            return x.scale(c)
        return complex(c) * x

    def is_zero(self, x) -> bool:
        if self.exact:
            return x.is_zero()
        return float(np.abs(x).max(initial=0.0)) <= self.atol

    def bilinear(self, x) -> BilinearOperator:
        return BilinearOperator(self.n, x)


@lru_cache(maxsize=32)
def realization(n: int, exact: bool = True, boundary: str = PERIODIC) -> SingleParticleRealization:
    return SingleParticleRealization(n, boundary, exact=exact)


# ---------------------------------------------------------------------------
# bilinear_of


def one_particle_matrix(x) -> tuple[ExactMatrix, Scalar]:
    """Exact action of an AlgebraElement on the 1-particle sector, plus its vacuum value."""
    chain = x.chain
    n, bd = chain.n, chain.boundary
    offset = ZERO
    acc: dict[tuple[int, int], Scalar] = {}
    for w, c in x.terms.items():
        if not w:
            offset = offset + c
            continue
        re, im = 1, 0
        for a, b in zip(w, w[1:]):
            re, im = _gauss_mul((re, im), _pairing(n, a, b, bd))
            if re == 0 and im == 0:
                break
        if re == 0 and im == 0:
            continue
        key = (w[0], w[-1])
        acc[key] = acc.get(key, ZERO) + c * Scalar(re, im)
    M = ExactMatrix.zeros((n, n))
    for (f, l), c in sorted(acc.items()):
        if c:
            M = M + _outer(n, f, l, bd).scale(c)
    # the 1-particle action includes the vacuum offset on every state
    return M, offset


def _apply_letter(psi: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply c^dag (x x^T) c to a k-particle antisymmetric tensor."""
    out = np.zeros_like(psi)
    for ax in range(psi.ndim):
        proj = np.tensordot(psi, x, axes=([ax], [0]))  # contract axis with x
        out = out + np.moveaxis(np.multiply.outer(proj, x), -1, ax)
    return out


def _apply_bilinear(psi: np.ndarray, M: np.ndarray) -> np.ndarray:
    out = np.zeros_like(psi)
    for ax in range(psi.ndim):
        out = out + np.moveaxis(np.tensordot(M, psi, axes=([1], [ax])), 0, ax)
    return out


def _antisym(k: int, n: int, rng) -> np.ndarray:
    from itertools import permutations

    raw = rng.standard_normal((n,) * k) + 1j * rng.standard_normal((n,) * k)
    out = np.zeros_like(raw)
    for perm in permutations(range(k)):
        sign = np.linalg.det(np.eye(k)[list(perm)])
        out = out + sign * np.transpose(raw, perm)
    return out


def bilinear_of(x, *, probe_particles: int = 3, seed: int = 20240607) -> BilinearOperator:
    """Exact site-c matrix M with x = c^dag M c + offset; raises NotBilinearError otherwise.

    The 1-particle action fixes M.  Multi-particle consistency is then checked
    exactly in Fock space for N <= 8 and with random antisymmetric probes in the
    2..probe_particles sectors beyond that.
    """
    chain = x.chain
    n, bd = chain.n, chain.boundary
    M, offset = one_particle_matrix(x)
    if n <= 8:
        from .fock_rep import represent, second_quantize

        if not (represent(x) - second_quantize(M, offset)).is_zero():
            raise NotBilinearError("element is not a fermion bilinear (Fock check)")
        return BilinearOperator(n, M, offset=offset)
    rng = np.random.default_rng(seed)
    Mc = M.to_complex()
    xs = {i: np.array([complex(*v) for v in bond_vector(n, i, bd)]) for i in chain.indices()}
    kmax = min(probe_particles, max(x.max_word_length(), 2), n)
    for k in range(2, kmax + 1):
        psi = _antisym(k, n, rng)
        psi /= np.abs(psi).max()
        want = _apply_bilinear(psi, Mc) + complex(offset) * psi
        got = np.zeros_like(psi)
        scale = 1.0
        for w, c in x.terms.items():
            phi = psi
            for letter in reversed(w):
                phi = _apply_letter(phi, xs[letter])
            got = got + complex(c) * phi
            scale = max(scale, abs(complex(c)))
        if np.abs(got - want).max() > 1e-9 * scale * max(1.0, np.abs(want).max()):
            raise NotBilinearError(f"element is not a fermion bilinear ({k}-particle probe)")
    return BilinearOperator(n, M, offset=offset)


# ---------------------------------------------------------------------------
# Fourier views


@lru_cache(maxsize=64)
def _fourier_data(n: int):
    k = np.arange(n)
    p = 2 * np.pi * k / n
    phi = np.exp(1j * np.outer(k, p)) / np.sqrt(n)  # Phi[a, p] = e^{ipa}/sqrt N
    d = (1j) ** (k % 4)  # D = diag(i^a)
    bfac = 1 + np.exp(1j * p)  # b_p = (1+e^{ip}) f_p
    bfac[n // 2] = 0.0
    return phi, d, bfac


def _site_c_to_momentum_f(M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    phi, d, _ = _fourier_data(n)
    G = np.conj(d)[:, None] * M * np.conj(d)[None, :]
    return phi.conj().T @ G @ phi


def _momentum_f_to_site_c(K: np.ndarray) -> np.ndarray:
    n = K.shape[0]
    phi, d, _ = _fourier_data(n)
    G = phi @ K @ phi.conj().T
    return d[:, None] * G * d[None, :]


def _momentum_f_to_b(K: np.ndarray) -> np.ndarray:
    n = K.shape[0]
    _, _, bfac = _fourier_data(n)
    den = np.outer(np.conj(bfac), bfac)
    out = np.zeros_like(K)
    ok = den != 0
    out[ok] = K[ok] / den[ok]
    return out


def _momentum_b_to_f(Kb: np.ndarray) -> np.ndarray:
    n = Kb.shape[0]
    _, _, bfac = _fourier_data(n)
    return Kb * np.outer(np.conj(bfac), bfac)


def to_basis(x: BilinearOperator, target: str) -> BilinearOperator:
    """Change of basis between site-c, momentum-f, momentum-b and site-b views."""
    if target not in BASES:
        raise DomainError(f"unknown basis {target!r}")
    if x.basis == target:
        return x
    M = x.to_complex()
    n = x.n_sites
    phi, _, _ = _fourier_data(n)
    # go to momentum-f first
    if x.basis == "site-c":
        K = _site_c_to_momentum_f(M)
    elif x.basis == "momentum-f":
        K = M
    elif x.basis == "momentum-b":
        K = _momentum_b_to_f(M)
    else:  # site-b
        K = _momentum_b_to_f(phi.conj().T @ M @ phi)
    if target == "momentum-f":
        out = K
    elif target == "site-c":
        out = _momentum_f_to_site_c(K)
    elif target == "momentum-b":
        out = _momentum_f_to_b(K)
    else:
        out = phi @ _momentum_f_to_b(K) @ phi.conj().T
    return BilinearOperator(n, out, target, complex(x.offset))


def fourier(x: BilinearOperator, direction: str = "site->momentum", *, target: str | None = None) -> BilinearOperator:
    """Site <-> momentum transform (default views: site-c <-> momentum-b)."""
    if direction in ("site->momentum", "forward"):
        return to_basis(x, target or "momentum-b")
    if direction in ("momentum->site", "inverse"):
        return to_basis(x, target or "site-c")
    raise DomainError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# closed momentum forms


def _diag_b(n: int, w: np.ndarray) -> np.ndarray:
    K = np.diag(w.astype(complex))
    K[n // 2, n // 2] = 0.0  # b_pi vanishes identically
    return K


def _shift_b(n: int, w: np.ndarray) -> np.ndarray:
    """sum_p w(p) b_{p-pi}^x b_p as a momentum-b matrix."""
    K = np.zeros((n, n), dtype=complex)
    h = n // 2
    for k in range(n):
        K[(k - h) % n, k] = w[k]
    K[h, :] = 0.0
    K[:, h] = 0.0
    return K


def _check_charge_args(label: str, m: int, n: int, strict: bool):
    if label not in ("+", "-"):
        raise DomainError(f"label must be '+' or '-', got {label!r}")
    if n < 4 or n % 2:
        raise DomainError(f"N must be even and >= 4, got {n}")
    if m < 1 or (strict and m >= n):
        raise DomainError(f"order m={m} outside [1, {n - 1}]")


def momentum_charge(label: str, m: int, n: int) -> BilinearOperator:
    """q_+^m or q_-^m from the trigonometric closed forms (momentum-b view)."""
    _check_charge_args(label, m, n, True)
    p = MomentumGrid(n).momenta
    if m % 2:
        s = (m - 1) // 2
        w = np.ones(n) if s == 0 else 2 * (-1) ** s * np.cos(2 * s * p)
        K = _diag_b(n, w) if label == "+" else _shift_b(n, w)
    else:
        s = (m - 2) // 2
        if label == "+":
            K = _shift_b(n, 2 * (-1) ** (s + 1) * np.cos((2 * s + 1) * p))
        else:
            K = _diag_b(n, 2j * (-1) ** (s + 1) * np.sin((2 * s + 1) * p))
    return BilinearOperator(n, K, "momentum-b", 0j)


def tilde_weight(label: str, m: int, p: np.ndarray) -> np.ndarray:
    """Diagonal b-momentum weight of q~_+^{odd} or q~_-^{even}."""
    if label == "+" and m % 2 == 1:
        return (2 * np.sin(p)) ** (m - 1) + 0j
    if label == "-" and m % 2 == 0:
        return -1j * (2 * np.sin(p)) ** (m - 1)
    raise DomainError(f"q~_{label}^{m} is not diagonal in momentum; use odd '+' or even '-'")


def momentum_tilde(label: str, m: int, n: int, *, strict: bool = True) -> BilinearOperator:
    """q~_+^{2s+1} or q~_-^{2s+2} as diagonal momentum-b operators.

    With ``strict=False`` orders m >= N are allowed; the closed form then keeps
    the infinite-chain weight rather than the (wrapped) site construction.
    """
    _check_charge_args(label, m, n, strict)
    return BilinearOperator(n, _diag_b(n, tilde_weight(label, m, MomentumGrid(n).momenta)), "momentum-b", 0j)


def momentum_tilde_from_charges(label: str, m: int, n: int) -> BilinearOperator:
    """Binomial combination of momentum_charge; independent route to momentum_tilde."""
    acc = np.zeros((n, n), dtype=complex)
    for order, c in tilde_coefficients(m):
        acc = acc + c * momentum_charge(label, order, n).matrix
    return BilinearOperator(n, acc, "momentum-b", 0j)


def site_matrix(x: BilinearOperator) -> np.ndarray:
    """Complex site-c matrix of any view."""
    return to_basis(x, "site-c").to_complex()


__all__ = [
    "BASES",
    "BilinearOperator",
    "MomentumGrid",
    "SingleParticleRealization",
    "bilinear_of",
    "bond_vector",
    "fourier",
    "generator_matrix",
    "generator_matrix_complex",
    "momentum_charge",
    "momentum_tilde",
    "momentum_tilde_from_charges",
    "one_particle_matrix",
    "realization",
    "site_matrix",
    "tilde_weight",
    "to_basis",
]
