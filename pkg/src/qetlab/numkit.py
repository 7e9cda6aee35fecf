"""Small numerical kernel shared by the rest of the package.

Matrices are plain complex numpy arrays of at most 8x8, frozen read-only
after construction. Everything here is deterministic and pure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

MAX_DIM = 8

JACOBI_OFFDIAG_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
ROOT_TOL = 1e-10
STATIONARY_TOL = 1e-9

KT_MIN = 1e-6
KT_MAX = 1e12

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class DimensionError(ValueError):
    pass


class ContractViolation(ValueError):
    pass


class DomainError(ValueError):
    pass


class BracketError(ValueError):
    pass


class NumericalError(ArithmeticError):
    pass


def cmatrix(entries) -> np.ndarray:
    """Validate and freeze a complex matrix (rows, cols <= 8, finite entries)."""
    a = np.array(entries, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1 or max(a.shape) > MAX_DIM:
        raise DimensionError(f"matrix shape {a.shape} outside 1..{MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    a.setflags(write=False)
    return a


I2 = cmatrix(np.eye(2))
SIGMA_X = cmatrix([[0, 1], [1, 0]])
SIGMA_Y = cmatrix([[0, -1j], [1j, 0]])
SIGMA_Z = cmatrix([[1, 0], [0, -1]])


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if max(rows, cols) > MAX_DIM:
        raise DimensionError(f"kron result {rows}x{cols} exceeds {MAX_DIM}x{MAX_DIM}")
    return cmatrix(np.kron(a, b))


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # orthonormal columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.max(np.abs(off))) if a.shape[0] > 1 else 0.0


def hermitian_eig(a, tol: float = JACOBI_OFFDIAG_TOL,
                  max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenDecomposition:
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.

    Each step zeroes one off-diagonal pair with the unitary
    ``G = diag(1, e^{-i phi}) @ [[c, s], [-s, c]]`` acting on rows/cols (p, q),
    where ``phi = arg(a_pq)``.  The off-diagonal target is scaled by
    ``max(1, ||a||_F)``.
    """
    a = np.array(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"hermitian_eig needs a square matrix, got {a.shape}")
    n = a.shape[0]
    if n > MAX_DIM:
        raise DimensionError(f"{n}x{n} exceeds {MAX_DIM}x{MAX_DIM}")
    herm_err = float(np.max(np.abs(a - dagger(a))))
    if herm_err > 1e-12 * max(1.0, float(np.max(np.abs(a)))):
        raise ContractViolation(f"matrix is not Hermitian (max |A - A^H| = {herm_err:.3e})")
    a = (a + dagger(a)) / 2
    v = np.eye(n, dtype=complex)
    target = tol * max(1.0, float(np.linalg.norm(a)))

    for _ in range(max_sweeps):
        if _off_norm(a) < target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < target * 1e-3:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = dagger(g) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    else:
        resid = _off_norm(a)
        if resid >= target:
            raise NumericalError(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal {resid:.3e})")

    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    vecs = v[:, order]
    vals = w[order]
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return EigenDecomposition(vals, vecs)


def _check_two_qubit(rho: np.ndarray) -> None:
    if rho.shape != (4, 4):
        raise DimensionError(f"expected a 4x4 two-qubit operator, got {rho.shape}")


def partial_transpose_B(rho: np.ndarray) -> np.ndarray:
    """Transpose on the second tensor factor (basis |00>,|01>,|10>,|11>)."""
    rho = np.asarray(rho, dtype=complex)
    _check_two_qubit(rho)
    return cmatrix(rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4))


def partial_trace(rho: np.ndarray, keep: str = "A") -> np.ndarray:
    """2x2 marginal of a two-qubit operator; ``keep`` is "A" or "B"."""
    rho = np.asarray(rho, dtype=complex)
    _check_two_qubit(rho)
    t = rho.reshape(2, 2, 2, 2)
    if keep == "A":
        return cmatrix(np.einsum("ijkj->ik", t))
    if keep == "B":
        return cmatrix(np.einsum("ijil->jl", t))
    raise ValueError(f"keep must be 'A' or 'B', not {keep!r}")


def entropy_bits(probs) -> float:
    """Shannon entropy in bits with 0 log 0 = 0; tiny negative rounding is dropped."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    return entropy_bits(hermitian_eig(rho).eigenvalues)


# --- Gibbs coefficients -----------------------------------------------------
#
# With x = 2m/kT and y = 2kappa/kT (0 <= y < x) every hyperbolic function is
# carried in the scaled form
#     S(z) = 2 e^{-x} sinh z = e^{z-x} (1 - e^{-2z})
#     C(z) = 2 e^{-x} cosh z = e^{z-x} (1 + e^{-2z})
# which never overflows because z <= x.  The partition function is then
#     Z = C(x) + C(y) = 1 + e^{-(x-y)} + e^{-(x+y)} + e^{-2x}   in [1, 4]
# and the coefficients become
#     c1 = (m S(y) + kappa S(x)) / (m Z)
#     c2 = (kappa S(x) - m S(y)) / (m Z)
#     c3 = (1 - e^{-(x+y)}) (1 - e^{-(x-y)}) / Z
#     r  = S(x) / (m Z)


def scaled_sinh(z: float, x: float) -> float:
    return -math.exp(z - x) * math.expm1(-2.0 * z)


def scaled_cosh(z: float, x: float) -> float:
    return math.exp(z - x) * (1.0 + math.exp(-2.0 * z))


def _check_kappa_kT(kappa: float, kT: float) -> None:
    if not (math.isfinite(kappa) and kappa >= 0):
        raise DomainError(f"kappa must be finite and >= 0, got {kappa!r}")
    if not (math.isfinite(kT) and kT > 0):
        raise DomainError(f"kT must be finite and > 0, got {kT!r}")


def stable_gibbs_ratios(kappa: float, kT: float) -> tuple[float, float, float, float, float]:
    """Return ``(Z, c1, c2, c3, r)`` evaluated without overflow.

    ``Z`` is the partition function with the ground energy pinned at 0, so it
    already has the dominant exponential factored out and lies in [1, 4].
    """
    _check_kappa_kT(kappa, kT)
    m = math.sqrt(1.0 + kappa * kappa)
    x = 2.0 * m / kT
    y = 2.0 * kappa / kT
    sx, sy = scaled_sinh(x, x), scaled_sinh(y, x)
    z = scaled_cosh(x, x) + scaled_cosh(y, x)
    c1 = (m * sy + kappa * sx) / (m * z)
    c2 = (kappa * sx - m * sy) / (m * z)
    c3 = math.expm1(-(x + y)) * math.expm1(-(x - y)) / z
    r = sx / (m * z)
    return z, c1, c2, c3, r


def naive_gibbs_ratios(kappa: float, kT: float) -> tuple[float, float, float, float, float]:
    """Direct transcription of the coefficient formulas; overflows for small kT."""
    _check_kappa_kT(kappa, kT)
    m = math.sqrt(1.0 + kappa * kappa)
    e = math.exp(-2.0 * m / kT)
    z = 2.0 * e * (math.cosh(2 * m / kT) + math.cosh(2 * kappa / kT))
    c1 = 2.0 / (m * z) * e * (m * math.sinh(2 * kappa / kT) + kappa * math.sinh(2 * m / kT))
    c2 = 2.0 / (m * z) * e * (-m * math.sinh(2 * kappa / kT) + kappa * math.sinh(2 * m / kT))
    c3 = 4.0 / z * e * math.sinh((m + kappa) / kT) * math.sinh((m - kappa) / kT)
    r = 2.0 / (m * z) * e * math.sinh(2 * m / kT)
    return z, c1, c2, c3, r


# --- root finding and 1-d / 2-d minimisation -------------------------------

@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.f_lo * self.f_hi > 0:
            raise BracketError(
                f"no sign change on [{self.lo}, {self.hi}]: f = ({self.f_lo}, {self.f_hi})")

    @classmethod
    def of(cls, f: Callable[[float], float], lo: float, hi: float) -> "Bracket":
        return cls(lo, hi, f(lo), f(hi))


def bisect(f: Callable[[float], float], bracket: Bracket, tol: float = ROOT_TOL,
           side: str = "mid", max_iter: int = 400) -> float:
    """Bisection to ``hi - lo < tol * max(1, |mid|)``.

    ``side`` picks what is returned: the midpoint, or the final endpoint that
    carries the sign of ``f_lo`` ("lo") / ``f_hi`` ("hi").
    """
    lo, hi, f_lo, f_hi = bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi
    if f_lo == 0.0 and side != "hi":
        return lo
    if f_hi == 0.0 and side != "lo":
        return hi
    lo_neg = f_lo < 0 or (f_lo == 0 and f_hi > 0)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol * max(1.0, abs(mid)) or mid in (lo, hi):
            break
        fm = f(mid)
        if (fm < 0) == lo_neg and fm != 0:
            lo = mid
        else:
            hi = mid
    if side == "lo":
        return lo
    if side == "hi":
        return hi
    return 0.5 * (lo + hi)


def golden_min(f: Callable[[float], float], a: float, b: float,
               tol: float = 1e-12) -> tuple[float, float]:
    """Golden-section search for a minimum of ``f`` on [a, b]; returns (x, f(x)).

    The endpoints are compared at the end so boundary minima are not lost.
    """
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol * max(1.0, abs(a) + abs(b)):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    cands = [(fc, c), (fd, d), (f(a), a), (f(b), b)]
    fx, x = min(cands)
    return x, fx


def refine_min_2d(f: Callable[[float, float], float],
                  box: tuple[tuple[float, float], tuple[float, float]],
                  grid: int = 181, sweeps: int = 60,
                  tol: float = 1e-12) -> tuple[tuple[float, float], float]:
    """Grid search followed by alternating golden-section refinement.

    Each axis is refined within one grid cell either side of the incumbent
    (clipped to the box) until a full sweep moves the point by less than
    ``tol``.
    """
    (x0, x1), (y0, y1) = box
    xs = np.linspace(x0, x1, grid)
    ys = np.linspace(y0, y1, grid)
    best = (math.inf, x0, y0)
    for x in xs:
        for y in ys:
            v = f(x, y)
            if v < best[0]:
                best = (v, x, y)
    fbest, x, y = best
    hx = (x1 - x0) / (grid - 1)
    hy = (y1 - y0) / (grid - 1)
    for _ in range(sweeps):
        x_prev, y_prev = x, y
        xn, fx = golden_min(lambda t: f(t, y), max(x0, x - hx), min(x1, x + hx))
        if fx <= fbest:
            x, fbest = xn, fx
        yn, fy = golden_min(lambda t: f(x, t), max(y0, y - hy), min(y1, y + hy))
        if fy <= fbest:
            y, fbest = yn, fy
        if abs(x - x_prev) + abs(y - y_prev) < tol:
            break
    return (x, y), fbest
