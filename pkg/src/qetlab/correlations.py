"""Entropic correlations, PPT test and entanglement threshold of the Gibbs state.

All entropies are in bits.  Classical correlation is taken with a projective
measurement on qubit B; the state is exchange symmetric so the choice of side
does not matter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numkit import (
    I2, Bracket, DomainError, bisect, cmatrix, entropy_bits, hermitian_eig, kron,
    partial_trace, partial_transpose_B, refine_min_2d, scaled_cosh, scaled_sinh,
    von_neumann_entropy,
)
from .spin_model import GibbsState, SystemParams, gibbs_state, mean_energy_from_probabilities

LOG2E = math.log2(math.e)
SEPARABILITY_SLACK = 1e-12


@dataclass(frozen=True)
class MeasurementAngles:
    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        object.__setattr__(self, "phi", float(self.phi) % (2 * math.pi))


@dataclass(frozen=True)
class CorrelationReport:
    mutual_info: float
    classical: float
    discord: float
    ppt_eigs: tuple[float, float, float, float]  # (l1-, l1+, l2-, l2+)
    separable: bool
    marginal_entropy: float


def binary_h(x: float) -> float:
    """Entropy of the qubit spectrum {(1+x)/2, (1-x)/2} in bits."""
    if not abs(x) <= 1.0:
        raise DomainError(f"binary_h needs |x| <= 1, got {x!r}")
    x = abs(x)
    if x == 1.0:
        return 0.0
    # 1 - h(x) = [(1+x) log2(1+x) + (1-x) log2(1-x)] / 2, accurate for small x
    deficit = ((1 + x) * math.log1p(x) + (1 - x) * math.log1p(-x)) / (2 * math.log(2))
    return 1.0 - deficit


def _h_clipped(x: float) -> float:
    # arguments built from square roots may overshoot 1 by rounding
    return binary_h(min(abs(x), 1.0))


def joint_entropy(state: GibbsState) -> float:
    return entropy_bits(state.p)


def mutual_information(state: GibbsState) -> float:
    # <H> here is sum_i p_i E_i, which equals 2m - 2kappa c1 - 2r but keeps its
    # digits as kT -> 0
    energy = mean_energy_from_probabilities(state)
    value = 2 * binary_h(state.r) - math.log2(state.Z) - energy / state.kT * LOG2E
    # the three terms cancel exactly for a product state; drop the rounding residue
    return max(value, 0.0)


def mutual_information_oracle(rho: np.ndarray) -> float:
    return (von_neumann_entropy(partial_trace(rho, "A"))
            + von_neumann_entropy(partial_trace(rho, "B"))
            - von_neumann_entropy(rho))


def classical_correlation(state: GibbsState) -> float:
    return binary_h(state.r) - _h_clipped(math.hypot(state.r, state.c1))


def minand(state: GibbsState, theta: float, phi: float) -> float:
    """Average post-measurement entropy q0 S(rho_0) + q1 S(rho_1) for the
    projective measurement on B along (theta, phi)."""
    c1, c2, c3, r = state.c1, state.c2, state.c3, state.r
    ct, st = math.cos(theta), math.sin(theta)
    transverse = math.sqrt(c1 ** 2 * math.cos(phi) ** 2 + c2 ** 2 * math.sin(phi) ** 2) * st
    total = 0.0
    # Bloch length of each post-measurement state of A; the sum of squares
    # T sin^2 + (c3 cos -+ r)^2 avoids the cancellation in A -+ 2 r c3 cos
    for sign in (-1, 1):
        q = (1 + sign * r * ct) / 2
        if q > 0:
            total += q * _h_clipped(math.hypot(transverse, c3 * ct + sign * r) / (2 * q))
    return total


def measurement_projectors(theta: float, phi: float) -> tuple[np.ndarray, np.ndarray]:
    k0 = np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])
    k1 = np.array([math.sin(theta / 2), -np.exp(1j * phi) * math.cos(theta / 2)])
    return cmatrix(np.outer(k0, k0.conj())), cmatrix(np.outer(k1, k1.conj()))


def minand_oracle(rho: np.ndarray, theta: float, phi: float) -> float:
    """Same quantity as :func:`minand`, from explicit projectors and spectra."""
    total = 0.0
    for proj in measurement_projectors(theta, phi):
        op = kron(I2, proj)
        post = op @ rho @ op
        q = float(np.trace(post).real)
        if q > 0:
            total += q * von_neumann_entropy(post / q)
    return total


def appendix_a_min(state: GibbsState, full_domain: bool = False,
                   grid: int = 181) -> tuple[float, MeasurementAngles]:
    """Numerically minimise the average post-measurement entropy.

    The minand depends on phi only through cos^2 and sin^2, so phi in
    [0, pi/2] covers every case; ``full_domain`` searches [0, 2 pi) instead.
    Whatever minimum the search finds is returned as is.
    """
    phi_hi = 2 * math.pi if full_domain else math.pi / 2
    (theta, phi), value = refine_min_2d(lambda t, p: minand(state, t, p),
                                        ((0.0, math.pi), (0.0, phi_hi)), grid=grid)
    return value, MeasurementAngles(theta, phi)


def discord(state: GibbsState) -> float:
    return max(mutual_information(state) - classical_correlation(state), 0.0)


def discord_closed_form(state: GibbsState) -> float:
    """h(r) + h(sqrt(r^2 + c1^2)) - log2 Z - (<H>/kT) log2 e (sign-corrected)."""
    energy = mean_energy_from_probabilities(state)
    return (binary_h(state.r) + _h_clipped(math.hypot(state.r, state.c1))
            - math.log2(state.Z) - energy / state.kT * LOG2E)


def _scaled_hyperbolics(params: SystemParams):
    k, m, kT = params.kappa, params.m, params.kT
    x, y = 2 * m / kT, 2 * k / kT
    return k, m, scaled_sinh(x, x), scaled_sinh(y, x), scaled_cosh(x, x), scaled_cosh(y, x)


def ppt_eigenvalues(params: SystemParams) -> tuple[float, float, float, float]:
    """Partial-transpose spectrum (l1-, l1+, l2-, l2+) in closed form.

    Uses the same e^{-2m/kT} scaling as the Gibbs coefficients, so the common
    prefactor e^{-2m/kT}/(m Z) becomes 1/(2 m Z).
    """
    k, m, sx, sy, cx, cy = _scaled_hyperbolics(params)
    z = cx + cy
    pre = 1.0 / (2 * m * z)
    root = math.sqrt(m * m * sy * sy + sx * sx)
    return (pre * (m * cy - k * sx), pre * (m * cy + k * sx),
            pre * (m * cx - root), pre * (m * cx + root))


def ppt_eigenvalues_oracle(rho: np.ndarray) -> np.ndarray:
    return hermitian_eig(partial_transpose_B(rho)).eigenvalues


def separability_margin(params: SystemParams) -> float:
    """2 e^{-2m/kT} (m cosh(2k/kT) - k sinh(2m/kT)); >= 0 iff separable."""
    k, m, sx, _, _, cy = _scaled_hyperbolics(params)
    return m * cy - k * sx


def is_separable(params: SystemParams) -> bool:
    return separability_margin(params) >= -SEPARABILITY_SLACK


def _expand_bracket(f, lo: float, hi: float, lo_min: float = 1e-6,
                    hi_max: float = 1e12) -> Bracket:
    f_lo, f_hi = f(lo), f(hi)
    while f_lo > 0 and lo > lo_min:
        lo = max(lo / 10, lo_min)
        f_lo = f(lo)
    while f_hi < 0 and hi < hi_max:
        hi = min(hi * 10, hi_max)
        f_hi = f(hi)
    return Bracket(lo, hi, f_lo, f_hi)


def entanglement_threshold_Te(kappa: float) -> float | None:
    """kT at which the state becomes separable; ``None`` for kappa = 0.

    The returned point sits on the separable side of the root.
    """
    if kappa < 0:
        raise DomainError(f"kappa must be >= 0, got {kappa}")
    if kappa == 0:
        return None

    def f(kT):
        return separability_margin(SystemParams(kappa, kT))

    return bisect(f, _expand_bracket(f, 1e-4, 1e4), tol=1e-13, side="hi")


def correlation_report(state: GibbsState) -> CorrelationReport:
    i = mutual_information(state)
    c = classical_correlation(state)
    eigs = ppt_eigenvalues(state.params)
    return CorrelationReport(
        mutual_info=i, classical=c, discord=max(i - c, 0.0), ppt_eigs=eigs,
        separable=is_separable(state.params), marginal_entropy=binary_h(state.r))


def report_for(kappa: float, kT: float) -> CorrelationReport:
    return correlation_report(gibbs_state(SystemParams(kappa, kT)))

