"""Three-step energy teleportation: measure sigma_x on A, send the outcome,
rotate B by the outcome-conditioned unitary.

Energies are averaged over the two outcomes alpha = +1, -1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numkit import I2, SIGMA_X, SIGMA_Y, cmatrix, dagger, kron, scaled_sinh
from .spin_model import GibbsState, build_hamiltonian, energy_of

OUTCOMES = (1, -1)


@dataclass(frozen=True)
class QetResult:
    E_A: float
    a: float
    b: float
    theta_o: float
    E_B_max: float
    outcome_probs: tuple[float, float]  # (q(+1), q(-1))


@dataclass(frozen=True)
class ProtocolTrace:
    theta: float
    probs: dict
    post_measurement: dict  # alpha -> rho_I(alpha)
    final: dict  # alpha -> rho_III(alpha)
    energies_I: dict
    energies_III: dict

    @property
    def mean_H_I(self) -> float:
        return sum(self.probs[a] * self.energies_I[a] for a in OUTCOMES)

    @property
    def mean_H_III(self) -> float:
        return sum(self.probs[a] * self.energies_III[a] for a in OUTCOMES)


def _check_alpha(alpha: int) -> None:
    if alpha not in OUTCOMES:
        raise ValueError(f"measurement outcome must be +1 or -1, got {alpha!r}")


def projector(alpha: int) -> np.ndarray:
    _check_alpha(alpha)
    return cmatrix((I2 + alpha * SIGMA_X) / 2)


def measure_A(state: GibbsState, alpha: int) -> tuple[np.ndarray, float]:
    op = kron(projector(alpha), I2)
    unnormalised = op @ state.rho @ op
    q = float(np.trace(unnormalised).real)
    return cmatrix(unnormalised / q), q


def conditional_unitary(alpha: int, theta: float) -> np.ndarray:
    _check_alpha(alpha)
    return cmatrix(I2 * math.cos(theta) - 1j * alpha * SIGMA_Y * math.sin(theta))


def run_protocol(state: GibbsState, theta: float) -> ProtocolTrace:
    h = build_hamiltonian(state.params)
    probs, post, final, e1, e3 = {}, {}, {}, {}, {}
    for alpha in OUTCOMES:
        rho_i, q = measure_A(state, alpha)
        u = kron(I2, conditional_unitary(alpha, theta))
        rho_iii = cmatrix(u @ rho_i @ dagger(u))
        probs[alpha], post[alpha], final[alpha] = q, rho_i, rho_iii
        e1[alpha] = float(np.trace(h @ rho_i).real)
        e3[alpha] = float(np.trace(h @ rho_iii).real)
    return ProtocolTrace(theta, probs, post, final, e1, e3)


def mean_energy_after_measurement(state: GibbsState) -> float:
    return 2 * state.m - 2 * state.kappa * state.c1 - state.r


def mean_energy_after_protocol(state: GibbsState, theta: float) -> float:
    k, m, r = state.kappa, state.m, state.r
    s2, c2t = math.sin(2 * theta), math.cos(2 * theta)
    return (2 * m + (state.c2 - state.c1) / 2 * (2 * k * c2t - s2)
            - r * (k * s2 + (m * m + k * k) * c2t))


def energy_injected_EA(state: GibbsState) -> float:
    return state.r


def energy_injected_oracle(state: GibbsState) -> float:
    trace = run_protocol(state, 0.0)
    return trace.mean_H_I - energy_of(state.rho, state.params)


def _sinhc_gap_scaled(m: float, kappa: float, kT: float) -> float:
    """2 e^{-x} (s(x) - s(y)) with s(z) = sinh(z)/z, x = 2m/kT, y = 2kappa/kT.

    For x <= 4 the power series is summed using x^2 - y^2 = 4/kT^2 exactly, so
    the difference carries no cancellation; otherwise the scaled sinh values
    are subtracted directly.
    """
    x, y = 2 * m / kT, 2 * kappa / kT
    if x <= 4.0:
        x2, y2 = x * x, y * y
        gap2 = 4.0 / (kT * kT)
        total = 0.0
        sym = 1.0  # sum_{j<n} x^{2j} y^{2(n-1-j)}
        xp = 1.0
        fact = 1.0
        for n in range(1, 60):
            fact *= (2 * n) * (2 * n + 1)
            term = gap2 * sym / fact
            total += term
            if term < 1e-18 * total:
                break
            xp *= x2
            sym = sym * y2 + xp
        return 2 * math.exp(-x) * total
    sx = scaled_sinh(x, x) / x
    sy = 2 * math.exp(-x) if y == 0 else scaled_sinh(y, x) / y
    return sx - sy


def qet_coefficients(state: GibbsState) -> tuple[float, float]:
    """(a, b) from the sinh(x)/x form, evaluated without overflow or cancellation."""
    k, m, kT = state.kappa, state.m, state.kT
    x, y = 2 * m / kT, 2 * k / kT
    sx, sy = scaled_sinh(x, x), scaled_sinh(y, x)
    a = y / state.Z * _sinhc_gap_scaled(m, k, kT)
    b = ((k * k + m * m) * sx / m + 2 * k * sy) / state.Z
    return a, b


def qet_coefficients_from_c(state: GibbsState) -> tuple[float, float]:
    """(a, b) = (kappa r + (c2 - c1)/2, (kappa^2 + m^2) r - kappa (c2 - c1))."""
    k, m, r = state.kappa, state.m, state.r
    d = state.c2 - state.c1
    return k * r + d / 2, (k * k + m * m) * r - k * d


def extractable_energy(state: GibbsState, theta: float) -> float:
    a, b = qet_coefficients(state)
    return a * math.sin(2 * theta) - 2 * b * math.sin(theta) ** 2


def optimal_qet(state: GibbsState) -> QetResult:
    a, b = qet_coefficients(state)
    if a == 0.0 and b == 0.0:
        theta_o, e_b = 0.0, 0.0
    else:
        theta_o = 0.5 * math.atan2(a, b)
        # sqrt(a^2 + b^2) - b without the cancellation at small a/b
        e_b = a * a / (math.hypot(a, b) + b)
    q_plus = float(measure_A(state, 1)[1])
    q_minus = float(measure_A(state, -1)[1])
    return QetResult(E_A=energy_injected_EA(state), a=a, b=b, theta_o=theta_o,
                     E_B_max=e_b, outcome_probs=(q_plus, q_minus))


def protocol_energy_change_oracle(state: GibbsState, theta: float) -> float:
    """<H_I> - <H_III> from explicit density matrices."""
    trace = run_protocol(state, theta)
    return trace.mean_H_I - trace.mean_H_III

