"""Floquet layer: evolution operator, BCH series, closed-form spectrum.

Conventions.  U = exp(z H_e) exp(z H_o) with z = -i tau.  H_F is defined by
U = exp(z H_F), i.e. H_F = log(U)/z.  The canonical momentum modes
d_q = f_q = N^-1/2 sum_j e^{-iqj} i^j c_j satisfy d_q^dag = f^x_{q+pi}; in this
basis U and H_F are block diagonal over the pairs (q, q+pi).
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np
import scipy.linalg as sla

from .errors import BoundaryError, DomainError
from .realization import bch_rational
from .single_particle import MomentumGrid, _diag_b, realization, tilde_weight, to_basis, BilinearOperator

BOUNDARY_TOL = 1e-12
TRIVIAL_TOL = 1e-13


class DivergentSeriesWarning(RuntimeWarning):
    """The BCH / charge series is outside its radius of convergence."""


@dataclass(frozen=True)
class FloquetParams:
    """Two-step drive with durations T1, T2; tau = sqrt(T1 T2), z = -i tau."""

    t1: float
    t2: float

    def __post_init__(self):
        if self.t1 < 0 or self.t2 < 0 or not (math.isfinite(self.t1) and math.isfinite(self.t2)):
            raise DomainError(f"durations must be finite and non-negative, got ({self.t1}, {self.t2})")

    @classmethod
    def from_tau(cls, tau: float) -> "FloquetParams":
        if tau < 0:
            raise DomainError(f"tau must be non-negative, got {tau}")
        return cls(float(tau), float(tau))

    @property
    def tau(self) -> float:
        return math.sqrt(self.t1 * self.t2)

    @property
    def z(self) -> complex:
        return -1j * self.tau

    @property
    def region(self) -> str:
        return "trotter-like" if self.tau <= 1 else "beyond"


# ---------------------------------------------------------------------------
# evolution operator


def drive_halves(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Single-particle matrices of H_e and H_o (complex)."""
    R = realization(n, exact=False)
    return R.hamiltonian("e"), R.hamiltonian("o")


@dataclass
class Evolution:
    single: np.ndarray
    fock_one_particle: np.ndarray | None = None

    def oracle_gap(self) -> float | None:
        if self.fock_one_particle is None:
            return None
        return float(np.abs(self.single - self.fock_one_particle).max())


def _check_even(n: int):
    if n < 4 or n % 2:
        raise DomainError(f"N must be even and >= 4, got {n}")


def evolution_operator(params: FloquetParams, n: int, *, fock: bool | None = None) -> Evolution:
    """U = exp(zA) exp(zB); A, B are nilpotent sums of commuting rank-one bonds so exp(zA) = 1 + zA.

    For N <= 8 (or fock=True) the full Fock-space product of matrix exponentials
    is restricted to the 1-particle sector for comparison.
    """
    _check_even(n)
    A, B = drive_halves(n)
    z = params.z
    eye = np.eye(n, dtype=complex)
    U = (eye + z * A) @ (eye + z * B)
    fock = n <= 8 if fock is None else fock
    U1 = None
    if fock:
        from .fock_rep import FockRealization, one_particle_block

        FR = FockRealization(n)
        Ae = FR.hamiltonian("e").to_complex()
        Bo = FR.hamiltonian("o").to_complex()
        Uf = sla.expm(z * Ae) @ sla.expm(z * Bo)
        idx = np.array([1 << a for a in range(n)])
        U1 = Uf[np.ix_(idx, idx)]
    return Evolution(U, U1)


def charge_matrix(m: int, n: int, z: complex) -> np.ndarray:
    return realization(n, exact=False).floquet_charge(m, complex(z))


def charge_commutation_residual(m: int, params: FloquetParams, n: int, *, charge_z: complex | None = None) -> float:
    """max-entry norm of [U, Q_m]; ``charge_z`` swaps the z inside Q_m (negative control)."""
    _check_even(n)
    U = evolution_operator(params, n, fock=False).single
    Q = charge_matrix(m, n, params.z if charge_z is None else charge_z)
    return float(np.abs(U @ Q - Q @ U).max())


# ---------------------------------------------------------------------------
# BCH series


def bch_diagonal_weight(z: complex, s_max: int, p: np.ndarray) -> np.ndarray:
    """b-momentum weight of sum_{k <= 2 s_max + 2} z^k Z_k."""
    w = np.zeros_like(p, dtype=complex)
    for s in range(s_max + 1):
        w = w + z ** (2 * s + 1) * float(bch_rational(2 * s + 1)) * tilde_weight("+", 2 * s + 1, p)
        w = w + z ** (2 * s + 2) * float(bch_rational(2 * s + 2)) * tilde_weight("-", 2 * s + 2, p)
    return w


def bch_series_log(params: FloquetParams, n: int, s_max: int, *, warn: bool = True) -> BilinearOperator:
    """Truncated series z H_F = sum_{s=0}^{s_max} (z^{2s+1} Z_{2s+1} + z^{2s+2} Z_{2s+2}).

    Each q~ term is taken from its momentum closed form, which coincides with the
    lattice construction for orders below N and continues it beyond.
    """
    _check_even(n)
    if s_max < 0:
        raise DomainError("s_max must be >= 0")
    if warn and params.tau >= 1:
        warnings.warn(f"tau={params.tau} is outside the radius of convergence; partial sums diverge", DivergentSeriesWarning, stacklevel=2)
    p = MomentumGrid(n).momenta
    K = _diag_b(n, bch_diagonal_weight(params.z, s_max, p))
    return to_basis(BilinearOperator(n, K, "momentum-b", 0j), "site-c")


def principal_log(U: np.ndarray) -> np.ndarray:
    """Principal matrix logarithm (oracle for the series)."""
    L = sla.logm(U)
    return np.asarray(L, dtype=complex)


def series_error_curve(params: FloquetParams, n: int, s_max: int) -> list[float]:
    """max-entry error of each partial sum s = 0..s_max against the principal log."""
    L = principal_log(evolution_operator(params, n, fock=False).single)
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DivergentSeriesWarning)
        for s in range(s_max + 1):
            S = bch_series_log(params, n, s, warn=False).to_complex()
            out.append(float(np.abs(S - L).max()))
    return out


def partial_sum_norms(params: FloquetParams, n: int, s_max: int) -> list[float]:
    """max-entry norm of each partial sum (divergence diagnostic)."""
    out = []
    for s in range(s_max + 1):
        out.append(float(np.abs(bch_series_log(params, n, s, warn=False).to_complex()).max()))
    return out


# ---------------------------------------------------------------------------
# sl(2) closed form

SL2_E = np.array([[0, 1], [0, 0]], dtype=complex)
SL2_F = np.array([[0, 0], [1, 0]], dtype=complex)
SL2_H = np.array([[1, 0], [0, -1]], dtype=complex)


def sl2_prefactor(z: complex) -> complex:
    """4 arcsinh(z/2)/sqrt(4+z^2); behaves like z near the origin."""
    z = complex(z)
    if z == 0:
        return 0j
    return 4 * np.arcsinh(z / 2) / np.sqrt(4 + z * z)


def sl2_bch_closed_form_check(z: complex) -> float:
    """max-entry residual between logm(e^{zE} e^{zF}) and the closed form."""
    z = complex(z)
    if abs(z) >= 2:
        raise DomainError(f"|z| = {abs(z)} outside the principal-branch disc |z| < 2")
    U = sla.expm(z * SL2_E) @ sla.expm(z * SL2_F)
    closed = sl2_prefactor(z) * (SL2_E + SL2_F + (z / 2) * SL2_H)
    return float(np.abs(principal_log(U) - closed).max())


def _series_inv_sqrt_4_plus(order: int) -> list[Fraction]:
    """Coefficients of (4 + z^2)^{-1/2} up to z^order."""
    out = [Fraction(0)] * (order + 1)
    for k in range(order // 2 + 1):
        # (1/2) binom(-1/2, k) (z^2/4)^k
        b = Fraction(1)
        for j in range(k):
            b *= Fraction(-1, 2) - j
            b /= j + 1
        out[2 * k] = Fraction(1, 2) * b / Fraction(4) ** k
    return out


def _series_asinh_half(order: int) -> list[Fraction]:
    """Coefficients of arcsinh(z/2) up to z^order."""
    out = [Fraction(0)] * (order + 1)
    for k in range((order - 1) // 2 + 1):
        c = Fraction((-1) ** k * math.factorial(2 * k), 4**k * math.factorial(k) ** 2 * (2 * k + 1))
        out[2 * k + 1] = c / Fraction(2) ** (2 * k + 1)
    return out


def sl2_series_coefficients(order: int = 15) -> list[Fraction]:
    """z^k coefficients of 4 arcsinh(z/2)/sqrt(4+z^2), exact."""
    a, b = _series_asinh_half(order), _series_inv_sqrt_4_plus(order)
    return [4 * sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(order + 1)]


def _poly_mat_mul(X, Y, order):
    out = [[[Fraction(0)] * (order + 1) for _ in range(2)] for _ in range(2)]
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for a, xa in enumerate(X[i][k]):
                    if xa == 0:
                        continue
                    for b in range(order + 1 - a):
                        yb = Y[k][j][b]
                        if yb:
                            out[i][j][a + b] += xa * yb
    return out


def sl2_log_series_matrix(order: int = 15) -> list[list[list[Fraction]]]:
    """log(e^{zE} e^{zF}) as a 2x2 matrix of exact power series in z (truncated).

    e^{zE} e^{zF} = [[1+z^2, z], [z, 1]]; X = U - 1 has no constant term so the
    Mercator series terminates at the requested order.
    """
    X = [[[Fraction(0)] * (order + 1) for _ in range(2)] for _ in range(2)]
    X[0][0][2] = Fraction(1)
    X[0][1][1] = Fraction(1)
    X[1][0][1] = Fraction(1)
    acc = [[[Fraction(0)] * (order + 1) for _ in range(2)] for _ in range(2)]
    P = X
    for k in range(1, order + 1):
        sgn = Fraction((-1) ** (k + 1), k)
        for i in range(2):
            for j in range(2):
                for a in range(order + 1):
                    acc[i][j][a] += sgn * P[i][j][a]
        P = _poly_mat_mul(P, X, order)
    return acc


def exact_bch_coefficients(kmax: int = 7, *, order: int | None = None) -> list[Fraction]:
    """Z_k prefactors read off from the exact sl(2) series (independent of the closed form).

    Odd k: coefficient of z^k in the E entry.  Even k: coefficient of z^k in the
    H entry, which already carries the z/2 of the H component.
    """
    order = max(kmax, 1) if order is None else order
    L = sl2_log_series_matrix(order)
    out = []
    for k in range(1, kmax + 1):
        out.append(L[0][1][k] if k % 2 else L[0][0][k])
    return out


def closed_form_bch_coefficients(kmax: int = 7) -> list[Fraction]:
    return [bch_rational(k) for k in range(1, kmax + 1)]


# ---------------------------------------------------------------------------
# dispersion and spectrum


def _snap_sin(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    s = np.sin(p)
    r = np.mod(p, np.pi)
    s = np.where((r < BOUNDARY_TOL) | (np.pi - r < BOUNDARY_TOL), 0.0, s)
    return s


def dispersion(p, z: complex):
    """phi_p(z) = ((1 - i z s)/(1 + i z s))^{1/2} arcsinh(z s)/(z s), s = sin p."""
    s = _snap_sin(p)
    x = complex(z) * s
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(x).astype(complex)
    out = np.ones_like(x)
    nz = x != 0
    xi = x[nz]
    out[nz] = np.sqrt((1 - 1j * xi) / (1 + 1j * xi)) * np.arcsinh(xi) / xi
    return complex(out[0]) if scalar else out


def _arcsin_branch(x: float) -> complex:
    """arcsin on [0, inf): real below 1, pi/2 - i arccosh(x) above."""
    if x <= 1:
        return complex(math.asin(x))
    return complex(math.pi / 2, -math.acosh(x))


def classify_momentum(p: float, tau: float) -> str:
    s = float(_snap_sin(p))
    if s == 0.0:
        return "zero-mode"
    x = abs(tau * s)
    if abs(x - 1) <= BOUNDARY_TOL:
        return "boundary"
    return "I1" if x < 1 else "I2"


def t_coefficient(p: float, tau: float) -> float:
    """t_p = cot(p/2) |(1 - tau sin p)/(1 + tau sin p)|^{1/2}; the block mixing ratio."""
    kind = classify_momentum(p, tau)
    if kind == "zero-mode":
        raise DomainError("t_p is undefined at the zero mode")
    if kind == "boundary":
        raise BoundaryError(f"|tau sin p| = 1 at p={p}, tau={tau}")
    x = tau * math.sin(p)
    return (1 / math.tan(p / 2)) * math.sqrt(abs((1 - x) / (1 + x)))


def block_ratio(p: float, tau: float) -> complex:
    """lambda_p = a/eps: t_p in I1, +i t_p in I2."""
    t = t_coefficient(p, tau)
    return complex(t) if classify_momentum(p, tau) == "I1" else 1j * t


def mode_energy(p: float, tau: float) -> complex:
    """Per-mode dispersion eps(p) = (1/tau) arcsin(tau sin p) (tau -> 0 gives sin p)."""
    s = float(_snap_sin(p))
    if tau == 0:
        return complex(s)
    x = tau * s
    return _arcsin_branch(x) / tau if x >= 0 else -_arcsin_branch(-x) / tau


@dataclass(frozen=True)
class SpectrumRow:
    p: float
    eps_plus: complex
    eps_minus: complex
    interval: str
    t_p: float
    hf_coeff: complex


@dataclass
class SpectrumTable:
    tau: float
    n_sites: int
    rows: list[SpectrumRow] = field(default_factory=list)

    HEADER = ("p", "eps_plus_re", "eps_plus_im", "eps_minus_re", "eps_minus_im", "interval", "t_p", "hf_coeff_re", "hf_coeff_im")

    def eigenvalues(self) -> np.ndarray:
        """Single-particle H_F eigenvalues implied by the table (with the two zero-mode zeros)."""
        vals = [0j, 0j]
        for r in self.rows:
            if r.interval in ("zero-mode",):
                continue
            vals.extend([r.hf_coeff, -r.hf_coeff])
        return np.array(vals, dtype=complex)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.HEADER)
        g = lambda v: format(float(v), ".17g")
        for r in self.rows:
            w.writerow([g(r.p), g(r.eps_plus.real), g(r.eps_plus.imag), g(r.eps_minus.real), g(r.eps_minus.imag), r.interval, g(r.t_p), g(r.hf_coeff.real), g(r.hf_coeff.imag)])
        return buf.getvalue()


def region_spectrum(params: FloquetParams, n: int, *, strict: bool = False) -> SpectrumTable:
    """Closed-form spectrum for every grid momentum p in [0, pi].

    Rows with |tau sin p| = 1 are tagged 'boundary'; with ``strict=True`` they raise.
    """
    _check_even(n)
    tau = params.tau
    table = SpectrumTable(tau, n)
    step = 2 * math.pi / n
    for k in range(n // 2 + 1):
        p = k * step
        kind = classify_momentum(p, tau) if tau > 0 else ("zero-mode" if float(_snap_sin(p)) == 0 else "I1")
        if kind == "boundary" and strict:
            raise BoundaryError(f"grid momentum p={p} sits on |tau sin p| = 1")
        if kind == "zero-mode":
            table.rows.append(SpectrumRow(p, 0j, 0j, kind, math.nan, 0j))
            continue
        eps = mode_energy(p, tau)
        t = t_coefficient(p, tau) if kind != "boundary" else (1 / math.tan(p / 2)) * 0.0
        table.rows.append(SpectrumRow(p, eps, -eps, kind, t, 2 * eps))
    return table


# ---------------------------------------------------------------------------
# exact Floquet Hamiltonian, blockwise


@dataclass(frozen=True)
class MomentumFrame:
    """Unitary V with d = V c; V[q, j] = e^{-iqj} i^j / sqrt(N)."""

    n: int

    @property
    def V(self) -> np.ndarray:
        j = np.arange(self.n)
        q = 2 * np.pi * j / self.n
        return np.exp(-1j * np.outer(q, j)) * (1j) ** (j % 4) / np.sqrt(self.n)

    def to_d(self, M: np.ndarray) -> np.ndarray:
        V = self.V
        return V @ M @ V.conj().T

    def to_site(self, Md: np.ndarray) -> np.ndarray:
        V = self.V
        return V.conj().T @ Md @ V

    def pairs(self) -> list[tuple[int, int]]:
        h = self.n // 2
        return [(k, k + h) for k in range(h)]


def _branch_log(u: complex) -> complex:
    """Principal log, except that on the negative axis |u|<1 takes arg -pi and |u|>=1 takes +pi."""
    arg = np.angle(u)
    if abs(abs(arg) - np.pi) < 1e-9:
        arg = -np.pi if abs(u) < 1 else np.pi
    return complex(np.log(abs(u)), arg)


def block_log(B: np.ndarray) -> np.ndarray:
    """Logarithm of a 2x2 block with the eigenvalue branch rule above."""
    w, R = np.linalg.eig(B)
    if abs(w[0] - w[1]) < 1e-7 * max(1.0, abs(w[0])):
        lam = 0.5 * (w[0] + w[1])
        N_ = B - lam * np.eye(2)
        return _branch_log(lam) * np.eye(2) + N_ / lam
    L = np.diag([_branch_log(v) for v in w])
    return R @ L @ np.linalg.inv(R)


@dataclass
class FloquetHamiltonian:
    site: np.ndarray  # H_F in the site-c basis
    d_basis: np.ndarray  # H_F in the (d_q) momentum basis
    leakage: float  # largest |U_d| entry outside the (q, q+pi) blocks


def floquet_hamiltonian(params: FloquetParams, n: int) -> FloquetHamiltonian:
    """H_F = log(U)/z, assembled block by block over the (q, q+pi) pairs."""
    _check_even(n)
    frame = MomentumFrame(n)
    if params.tau == 0:
        A, B = drive_halves(n)
        H = A + B
        return FloquetHamiltonian(H, frame.to_d(H), 0.0)
    U = evolution_operator(params, n, fock=False).single
    Ud = frame.to_d(U)
    mask = np.zeros((n, n), dtype=bool)
    Hd = np.zeros((n, n), dtype=complex)
    for a, b in frame.pairs():
        idx = np.ix_([a, b], [a, b])
        mask[idx] = True
        Hd[idx] = block_log(Ud[idx]) / params.z
    leak = float(np.abs(np.where(mask, 0, Ud)).max())
    return FloquetHamiltonian(frame.to_site(Hd), Hd, leak)


def block_coefficients(HF: FloquetHamiltonian, k: int) -> tuple[complex, complex]:
    """(a, b) with H_F block = a f_p^x f_p + b f^x_{p-pi} f_{p-pi} for p = 2 pi k / N."""
    n = HF.d_basis.shape[0]
    h = n // 2
    k %= n
    kp = (k + h) % n
    return complex(HF.d_basis[kp, k]), complex(HF.d_basis[k, kp])


@dataclass
class JordanReport:
    nonnormality_spectral: float
    nonnormality_max: float
    zero_block: np.ndarray
    zero_block_square_max: float
    zero_block_rank: int
    other_blocks_diagonalizable: bool
    eigenvalue_mismatch: float
    leakage: float

    @property
    def ok(self) -> bool:
        return self.zero_block_square_max < 1e-12 and self.zero_block_rank == 1 and self.other_blocks_diagonalizable


def _match_multisets(a: np.ndarray, b: np.ndarray) -> float:
    """Greedy nearest matching distance between two equal-size complex multisets."""
    from scipy.optimize import linear_sum_assignment

    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max()) if len(r) else 0.0


def jordan_structure(params: FloquetParams, n: int) -> JordanReport:
    HF = floquet_hamiltonian(params, n)
    H = HF.site
    C = H.conj().T @ H - H @ H.conj().T
    frame = MomentumFrame(n)
    zb = HF.d_basis[np.ix_([0, n // 2], [0, n // 2])]
    sq = float(np.abs(zb @ zb).max())
    rank = int(np.linalg.matrix_rank(zb, tol=1e-9))
    diag_ok = True
    eigs = [np.zeros(2, dtype=complex)]
    for a, b in frame.pairs()[1:]:
        blk = HF.d_basis[np.ix_([a, b], [a, b])]
        w, R = np.linalg.eig(blk)
        if abs(w[0] - w[1]) < 1e-9 or np.linalg.cond(R) > 1e8:
            diag_ok = False
        eigs.append(w)
    ev = np.concatenate(eigs)
    table = region_spectrum(params, n)
    mismatch = _match_multisets(ev, table.eigenvalues())
    return JordanReport(
        nonnormality_spectral=float(np.linalg.norm(C, 2)),
        nonnormality_max=float(np.abs(C).max()),
        zero_block=zb,
        zero_block_square_max=sq,
        zero_block_rank=rank,
        other_blocks_diagonalizable=diag_ok,
        eigenvalue_mismatch=mismatch,
        leakage=HF.leakage,
    )


def single_particle_eigenvalues(params: FloquetParams, n: int) -> np.ndarray:
    """Eigenvalues of H_F from a general eigen-solver on the site matrix."""
    return np.linalg.eigvals(floquet_hamiltonian(params, n).site)


# ---------------------------------------------------------------------------
# canonical modes


_OMEGA_C = np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.zeros((2, 2))]])
# pairing of (f_p, f_{p-pi}, f_p^x, f^x_{p-pi}): {f_p, f^x_{p-pi}} = {f_{p-pi}, f^x_p} = 1
_OMEGA_F = np.array([[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], dtype=float)


@dataclass(frozen=True)
class CanonicalModeMap:
    """F = T C with F = (f_p, f_{p-pi}, f_p^x, f^x_{p-pi}) and C = (chi, eta, chi^dag, eta^dag).

    At the zero mode F = (f_0, f_pi, f_0^x, f_pi^x).
    """

    p: float
    tau: float
    ratio: complex  # lambda_p (nan at the zero mode)
    T: np.ndarray
    zero_mode: bool

    def pairing_residual(self) -> float:
        """max |T Omega_c T^T - Omega_f|: zero iff chi, eta are canonical."""
        omega_f = _OMEGA_F if not self.zero_mode else np.array([[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], dtype=float)
        return float(np.abs(self.T @ _OMEGA_C @ self.T.T - omega_f).max())

    def anticommutators(self) -> np.ndarray:
        """{C_i, C_j} recovered from the f-pairing through T^{-1}."""
        Ti = np.linalg.inv(self.T)
        omega_f = _OMEGA_F
        return Ti @ omega_f @ Ti.T

    def transform_block(self, a: complex, b: complex) -> np.ndarray:
        """Coefficient matrix h_c (creator x annihilator) of a f_p^x f_p + b f^x_{p-pi} f_{p-pi}."""
        h = np.zeros((4, 4), dtype=complex)
        h[2, 0] = a
        h[3, 1] = b
        hc = self.T.T @ h @ self.T
        return hc[2:, :2]


def canonical_transform(params: FloquetParams, p: float) -> CanonicalModeMap:
    tau = params.tau
    s = float(_snap_sin(p))
    if s == 0.0:
        # f_0 = eta, f_pi = chi, f_0^x = chi^dag, f_pi^x = eta^dag
        T = np.zeros((4, 4), dtype=complex)
        T[0, 1] = 1
        T[1, 0] = 1
        T[2, 2] = 1
        T[3, 3] = 1
        return CanonicalModeMap(p, tau, complex(np.nan), T, True)
    if not 0 < p < np.pi:
        raise DomainError(f"canonical_transform expects p in (0, pi), got {p}")
    lam = block_ratio(p, tau)  # raises BoundaryError on the interval edge
    r = np.sqrt(lam)
    c = 1 / np.sqrt(2)
    T = np.zeros((4, 4), dtype=complex)
    T[0, :2] = c / r * np.array([1, 1])  # f_p
    T[1, :2] = c * r * np.array([1, -1])  # f_{p-pi}
    T[2, 2:] = c / r * np.array([1, -1])  # f_p^x
    T[3, 2:] = c * r * np.array([1, 1])  # f^x_{p-pi}
    return CanonicalModeMap(p, tau, lam, T, False)


def diagonalize_block(params: FloquetParams, n: int, k: int) -> tuple[np.ndarray, complex]:
    """Conjugate the numerically computed H_F block at p = 2 pi k/N by the canonical map.

    Returns (2x2 creator-annihilator matrix, expected hf coefficient).
    """
    HF = floquet_hamiltonian(params, n)
    p = 2 * np.pi * k / n
    a, b = block_coefficients(HF, k)
    cmap = canonical_transform(params, p)
    return cmap.transform_block(a, b), 2 * mode_energy(p, params.tau)


# ---------------------------------------------------------------------------
# convergence diagnostics


@dataclass
class ConvergenceRow:
    s: int
    charge_norm: float
    binom_ratio: float


@dataclass
class ConvergenceReport:
    rows: list[ConvergenceRow]
    radius_estimate: float


def convergence_diagnostic(n: int, s_max: int, *, z: complex = 0j) -> ConvergenceReport:
    """Spectral norms of Q_{2s+1} against binom(2s, s), and a series-radius estimate."""
    _check_even(n)
    if not 2 * s_max + 2 < n:
        raise DomainError(f"need 2*s_max+2 < N (s_max={s_max}, N={n})")
    rows = []
    for s in range(s_max + 1):
        Q = charge_matrix(2 * s + 1, n, z)
        nrm = float(np.linalg.norm(Q, 2))
        rows.append(ConvergenceRow(s, nrm, nrm / comb(2 * s, s)))
    # series terms |Z_{2s+1}| ~ norm / ((2s+1) binom(2s,s)); ratio test with Richardson
    terms = np.array([r.charge_norm * abs(float(bch_rational(2 * r.s + 1))) for r in rows])
    radius = _richardson_radius(terms) if len(terms) >= 3 else float("nan")
    return ConvergenceReport(rows, radius)


def _richardson_radius(terms: np.ndarray) -> float:
    """Radius in |z| from rho_s = sqrt(T_{s+1}/T_s), extrapolated in 1/s."""
    rho = np.sqrt(terms[1:] / terms[:-1])
    s = np.arange(len(rho), dtype=float) + 1.0
    if len(rho) < 2:
        return float(1 / rho[-1])
    # first-order Richardson: rho_inf ~ ((s+1) rho_{s+1} - s rho_s)
    r_inf = (s[-1] * rho[-1] - s[-2] * rho[-2]) / (s[-1] - s[-2])
    return float(1 / r_inf)


@dataclass
class RootTest:
    tau: float
    rho: float  # extrapolated |z|/R
    convergent: bool


def series_root_test(tau: float, n: int = 64, s_max: int = 30) -> RootTest:
    """Ratio/root test on the b-momentum series terms, extrapolated in 1/s."""
    p = MomentumGrid(n).momenta
    terms = []
    for s in range(s_max + 1):
        t = np.abs(tau ** (2 * s + 1) * float(bch_rational(2 * s + 1)) * tilde_weight("+", 2 * s + 1, p)).max()
        terms.append(t)
    terms = np.array(terms)
    rho = np.sqrt(terms[1:] / terms[:-1])
    s = np.arange(1, len(rho) + 1, dtype=float)
    r_inf = (s[-1] * rho[-1] - s[-2] * rho[-2]) / (s[-1] - s[-2])
    return RootTest(tau, float(r_inf), bool(r_inf < 1))
