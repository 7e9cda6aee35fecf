"""Energy extraction from qubit B alone, without any message from A.

Covers single unitaries on B (passivity), general Kraus channels on B, the
closed-form optimum over all channels, and the temperature thresholds T1
(below which no channel on B extracts energy) and T2 (above which the best
local channel beats teleportation).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numkit import (
    I2, Bracket, BracketError, ContractViolation, DomainError, bisect, cmatrix,
    dagger, kron, scaled_cosh, scaled_sinh,
)
from .correlations import entanglement_threshold_Te
from .qet_protocol import optimal_qet
from .spin_model import GibbsState, SystemParams, build_hamiltonian, gibbs_state

FEASIBILITY_TOL = 1e-12


def su2_rotation(u: float, v: float, w: float) -> np.ndarray:
    return cmatrix([
        [np.exp(0.5j * u) * math.cos(w / 2), -np.exp(-0.5j * v) * math.sin(w / 2)],
        [np.exp(0.5j * v) * math.sin(w / 2), np.exp(-0.5j * u) * math.cos(w / 2)],
    ])


def energy_after_unitary_on_B(state: GibbsState, u: float, v: float, w: float) -> float:
    k, r, c1 = state.kappa, state.r, state.c1
    cw = math.cos(w)
    return (2 * state.m - r * (1 + cw) + k * c1 * math.cos(v) * (1 - cw)
            - k * c1 * math.cos(u) * (1 + cw))


def unitary_energy_increase(state: GibbsState, u: float, v: float, w: float) -> float:
    """Energy added by W on B, regrouped as a sum of non-negative terms:
    r (1 - cos w) + kappa c1 [cos v (1 - cos w) + 2 - cos u (1 + cos w)]."""
    cw = math.cos(w)
    return (state.r * (1 - cw) + state.kappa * state.c1
            * (math.cos(v) * (1 - cw) + 2 - math.cos(u) * (1 + cw)))


def apply_channel_on_B(rho: np.ndarray, kraus) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    for k in kraus:
        op = kron(I2, k)
        out += op @ rho @ dagger(op)
    return cmatrix(out)


def energy_after_unitary_oracle(state: GibbsState, u: float, v: float, w: float) -> float:
    h = build_hamiltonian(state.params)
    return float(np.trace(h @ apply_channel_on_B(state.rho, [su2_rotation(u, v, w)])).real)


@dataclass(frozen=True)
class KrausVectorZ:
    """Kraus elements K_k = [[s_k, t_k], [u_k, v_k]] stacked by position."""
    s: np.ndarray
    t: np.ndarray
    u: np.ndarray
    v: np.ndarray

    @classmethod
    def from_kraus(cls, kraus) -> "KrausVectorZ":
        ks = [np.asarray(k, dtype=complex) for k in kraus]
        if not 1 <= len(ks) <= 4 or any(k.shape != (2, 2) for k in ks):
            raise ValueError("expected between one and four 2x2 Kraus operators")
        ks += [np.zeros((2, 2), dtype=complex)] * (4 - len(ks))
        arr = np.array(ks)
        return cls(arr[:, 0, 0], arr[:, 0, 1], arr[:, 1, 0], arr[:, 1, 1])

    def to_kraus(self) -> tuple[np.ndarray, ...]:
        return tuple(cmatrix([[self.s[i], self.t[i]], [self.u[i], self.v[i]]])
                     for i in range(4))

    def violations(self, tol: float = FEASIBILITY_TOL) -> list[str]:
        """Names of the completeness conditions this vector breaks."""
        bad = []
        n1 = np.vdot(self.s, self.s).real + np.vdot(self.u, self.u).real
        n2 = np.vdot(self.t, self.t).real + np.vdot(self.v, self.v).real
        cross = np.vdot(self.s, self.t) + np.vdot(self.u, self.v)
        if abs(n1 - 1) > tol:
            bad.append(f"s^H s + u^H u = 1 (got {n1:.15g})")
        if abs(n2 - 1) > tol:
            bad.append(f"t^H t + v^H v = 1 (got {n2:.15g})")
        if abs(cross) > tol:
            bad.append(f"s^H t + u^H v = 0 (got {cross:.3e})")
        return bad

    def is_feasible(self, tol: float = FEASIBILITY_TOL) -> bool:
        return not self.violations(tol)

    def reduce_to_magnitudes(self) -> "KrausVectorZ":
        """Two-operator vector with the same norms: s, v in slot 1, t, u in slot 2."""
        s, t, u, v = (float(np.linalg.norm(x)) for x in (self.s, self.t, self.u, self.v))
        e0, e1 = np.eye(4, dtype=complex)[:2]
        return KrausVectorZ(s * e0, t * e1, u * e1, v * e0)


def _omega_elements(state: GibbsState, s, t, u, v):
    r, kc = state.r, state.kappa * state.c1
    dot = lambda a, b: np.sum(np.conj(a) * b, axis=-1)  # noqa: E731
    return ((1 - r) * dot(u, u).real - (1 + r) * dot(t, t).real
            + kc * (2 * dot(s, v).real + 2 * dot(u, t).real - 2))


def omega(state: GibbsState, z: KrausVectorZ, tol: float = FEASIBILITY_TOL) -> float:
    """Mean energy removed by the channel z acting on B."""
    bad = z.violations(tol)
    if bad:
        raise ContractViolation("infeasible Kraus vector: " + "; ".join(bad))
    return float(_omega_elements(state, z.s, z.t, z.u, z.v))


def omega_batch(state: GibbsState, kraus: np.ndarray) -> np.ndarray:
    """Vectorised omega for an array of channels shaped (n, 4, 2, 2)."""
    kraus = np.asarray(kraus)
    return _omega_elements(state, kraus[..., 0, 0], kraus[..., 0, 1],
                           kraus[..., 1, 0], kraus[..., 1, 1])


def omega_oracle(state: GibbsState, kraus) -> float:
    """<H> - tr[H G(rho)] from explicit matrices."""
    h = build_hamiltonian(state.params)
    before = float(np.trace(h @ state.rho).real)
    after = float(np.trace(h @ apply_channel_on_B(state.rho, kraus)).real)
    return before - after


def random_feasible_kraus(rng: np.random.Generator, n: int) -> np.ndarray:
    """n random channels, each from an orthonormalised complex 8x2 matrix whose
    consecutive 2x2 blocks are the four Kraus operators."""
    g = rng.standard_normal((n, 8, 2)) + 1j * rng.standard_normal((n, 8, 2))
    q, _ = np.linalg.qr(g)
    return q.reshape(n, 4, 2, 2)


def varpi(state: GibbsState, sigma: float, delta: float) -> float:
    """Energy removed by K1 = diag(cos a, cos b), K2 = [[0, sin b], [sin a, 0]]
    written in sigma = a + b, delta = a - b:

        sin(sigma) sin(delta) + r cos(sigma) cos(delta)
            + 2 kappa c1 cos(delta) - r - 2 kappa c1
    """
    r, kc = state.r, state.kappa * state.c1
    return (math.sin(sigma) * math.sin(delta) + r * math.cos(sigma) * math.cos(delta)
            + 2 * kc * math.cos(delta) - r - 2 * kc)


def two_kraus_channel(alpha: float, beta: float) -> tuple[np.ndarray, ...]:
    k1 = cmatrix([[math.cos(alpha), 0], [0, math.cos(beta)]])
    k2 = cmatrix([[0, math.sin(beta)], [math.sin(alpha), 0]])
    zero = cmatrix(np.zeros((2, 2)))
    return (k1, k2, zero, zero)


@dataclass(frozen=True)
class ExtractionResult:
    omega_max: float
    branch: str  # "positive" or "zero"
    sigma: float | None
    delta: float | None
    kraus: tuple[np.ndarray, ...]

    @property
    def alpha(self) -> float | None:
        return None if self.sigma is None else (self.sigma + self.delta) / 2

    @property
    def beta(self) -> float | None:
        return None if self.sigma is None else (self.sigma - self.delta) / 2


def positive_branch(state: GibbsState) -> bool:
    """2 kappa c1 r < 1 - r^2 (also true at r = 0)."""
    r = state.r
    return 2 * state.kappa * state.c1 * r < 1 - r * r


def omega_max_closed_form(state: GibbsState) -> float:
    if not positive_branch(state):
        return 0.0
    r, kc = state.r, state.kappa * state.c1
    one_r2 = 1 - r * r
    return math.sqrt((one_r2 + 4 * kc * kc) / one_r2) - 2 * kc - r


def solve_max_omega(state: GibbsState) -> ExtractionResult:
    if not positive_branch(state):
        identity = cmatrix(np.eye(2))
        zero = cmatrix(np.zeros((2, 2)))
        return ExtractionResult(0.0, "zero", None, None, (identity, zero, zero, zero))
    r, kc = state.r, state.kappa * state.c1
    one_r2 = 1 - r * r
    cos_sigma = 2 * kc * r / one_r2
    cos_delta = 2 * kc / math.sqrt(one_r2 * (one_r2 + 4 * kc * kc))
    # sin(sigma) sin(delta) must be >= 0 at the maximum; take both in [0, pi]
    sigma = math.acos(min(cos_sigma, 1.0))
    delta = math.acos(min(cos_delta, 1.0))
    kraus = two_kraus_channel((sigma + delta) / 2, (sigma - delta) / 2)
    return ExtractionResult(omega_max_closed_form(state), "positive", sigma, delta, kraus)


def returned_kraus_is_feasible(result: ExtractionResult, tol: float = FEASIBILITY_TOL) -> bool:
    total = sum(dagger(k) @ k for k in result.kraus)
    return bool(np.max(np.abs(total - np.eye(2))) <= tol)


# --- thresholds -----------------------------------------------------------

@dataclass(frozen=True)
class ThresholdSet:
    Te: float | None
    T1: float | None
    T2: float | None


def first_threshold_margin(params: SystemParams) -> float:
    """RHS - LHS of the T1 condition after multiplying by 4 e^{-4m/kT}:

        2 m^2 C(y) (C(x) + C(y)) - (kappa S(x) + m S(y))^2

    positive exactly on the positive (extracting) branch.
    """
    k, m, kT = params.kappa, params.m, params.kT
    x, y = 2 * m / kT, 2 * k / kT
    sx, sy = scaled_sinh(x, x), scaled_sinh(y, x)
    cx, cy = scaled_cosh(x, x), scaled_cosh(y, x)
    return 2 * m * m * cy * (cx + cy) - (k * sx + m * sy) ** 2


def threshold_T1(kappa: float) -> float | None:
    """kT below which no channel on B extracts energy; ``None`` when kappa = 0."""
    if kappa < 0:
        raise DomainError(f"kappa must be >= 0, got {kappa}")
    if kappa == 0:
        return None

    def f(kT):
        return first_threshold_margin(SystemParams(kappa, kT))

    lo, hi = 1e-4, 1e4
    while f(lo) > 0 and lo > 1e-6:
        lo = max(lo / 10, 1e-6)
    while f(hi) < 0 and hi < 1e12:
        hi = min(hi * 10, 1e12)
    return bisect(f, Bracket.of(f, lo, hi), tol=1e-13)


def teleport_minus_local(kappa: float, kT: float) -> float:
    state = gibbs_state(SystemParams(kappa, kT))
    return optimal_qet(state).E_B_max - omega_max_closed_form(state)


def threshold_T2(kappa: float, T1: float | None = None, kT_max: float = 1e6,
                 growth: float = 1.05) -> float | None:
    """kT where the best local channel starts to beat teleportation.

    Scans upward from T1 on a geometric grid; ``None`` if no crossing is found
    below ``kT_max``.
    """
    if kappa == 0:
        return None
    if T1 is None:
        T1 = threshold_T1(kappa)

    def f(kT):
        return teleport_minus_local(kappa, kT)

    lo = T1 * (1 + 1e-9)
    f_lo = f(lo)
    while lo < kT_max:
        hi = min(lo * growth, kT_max)
        f_hi = f(hi)
        if f_lo > 0 >= f_hi:
            return bisect(f, Bracket(lo, hi, f_lo, f_hi), tol=1e-13)
        lo, f_lo = hi, f_hi
    return None


def thresholds(kappa: float) -> ThresholdSet:
    t1 = threshold_T1(kappa)
    try:
        t2 = threshold_T2(kappa, t1) if t1 is not None else None
    except BracketError:
        t2 = None
    return ThresholdSet(entanglement_threshold_Te(kappa), t1, t2)

