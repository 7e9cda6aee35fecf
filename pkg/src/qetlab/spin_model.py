"""Two-qubit model: parameters, Hamiltonian, eigensystem and Gibbs state.

Basis order is {|00>, |01>, |10>, |11>} throughout; qubit A is the left
tensor factor.  Boltzmann's constant is 1, so temperature enters only as kT.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numkit import (
    I2, KT_MAX, KT_MIN, SIGMA_X, SIGMA_Z, DomainError, cmatrix, dagger,
    hermitian_eig, kron, stable_gibbs_ratios, naive_gibbs_ratios,
)


@dataclass(frozen=True)
class SystemParams:
    kappa: float
    kT: float
    m: float = field(init=False)

    def __post_init__(self):
        kappa, kT = float(self.kappa), float(self.kT)
        if not (math.isfinite(kappa) and kappa >= 0):
            raise DomainError(f"kappa must be finite and >= 0, got {self.kappa!r}")
        if not (KT_MIN <= kT <= KT_MAX):
            raise DomainError(f"kT must lie in [{KT_MIN:g}, {KT_MAX:g}], got {self.kT!r}")
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "kT", kT)
        object.__setattr__(self, "m", math.sqrt(1.0 + kappa * kappa))


@dataclass(frozen=True)
class EigenSystem:
    energies: tuple[float, float, float, float]
    states: np.ndarray  # columns |E0>..|E3>


@dataclass(frozen=True)
class GibbsState:
    params: SystemParams
    Z: float
    p: tuple[float, float, float, float]
    c1: float
    c2: float
    c3: float
    r: float
    rho: np.ndarray

    @property
    def kappa(self) -> float:
        return self.params.kappa

    @property
    def kT(self) -> float:
        return self.params.kT

    @property
    def m(self) -> float:
        return self.params.m


def local_hamiltonian(m: float) -> np.ndarray:
    return cmatrix(I2 / m + SIGMA_Z)


def interaction(params: SystemParams) -> np.ndarray:
    k, m = params.kappa, params.m
    return cmatrix(2 * k * kron(SIGMA_X, SIGMA_X) + 2 * k * k / m * np.eye(4))


def build_hamiltonian(params: SystemParams) -> np.ndarray:
    h_loc = local_hamiltonian(params.m)
    return cmatrix(kron(h_loc, I2) + kron(I2, h_loc) + interaction(params))


def eigenenergies(params: SystemParams) -> tuple[float, float, float, float]:
    k, m = params.kappa, params.m
    return (0.0, 2 * m - 2 * k, 2 * m + 2 * k, 4 * m)


def eigensystem(params: SystemParams) -> EigenSystem:
    """Closed-form spectrum; at kappa = 0 the singlet/triplet pair is kept."""
    k, m = params.kappa, params.m
    # sqrt((m - 1) / 2m) with m - 1 = kappa^2 / (m + 1), exact for tiny kappa
    a = k / math.sqrt(2 * m * (m + 1))
    b = math.sqrt((m + 1) / (2 * m))
    h = 1 / math.sqrt(2)
    states = np.array([
        [a, 0, 0, b],
        [0, h, h, 0],
        [0, -h, h, 0],
        [-b, 0, 0, a],
    ], dtype=complex)
    states.setflags(write=False)
    return EigenSystem(eigenenergies(params), states)


def gibbs_probabilities(params: SystemParams) -> tuple[float, float, float, float]:
    weights = [math.exp(-e / params.kT) for e in eigenenergies(params)]
    z = sum(weights)
    return tuple(w / z for w in weights)


def _rho_from_coefficients(c1, c2, c3, r) -> np.ndarray:
    return cmatrix(0.25 * np.array([
        [1 + c3 - 2 * r, 0, 0, -c1 - c2],
        [0, 1 - c3, -c1 + c2, 0],
        [0, -c1 + c2, 1 - c3, 0],
        [-c1 - c2, 0, 0, 1 + c3 + 2 * r],
    ]))


def gibbs_state(params: SystemParams, naive: bool = False) -> GibbsState:
    """Thermal state assembled from the closed-form X-shaped matrix.

    ``naive=True`` evaluates the coefficients without overflow factoring
    (debug cross-check only; fails at small kT).
    """
    ratios = naive_gibbs_ratios if naive else stable_gibbs_ratios
    z, c1, c2, c3, r = ratios(params.kappa, params.kT)
    return GibbsState(params, z, gibbs_probabilities(params), c1, c2, c3, r,
                      _rho_from_coefficients(c1, c2, c3, r))


def spectral_gibbs_rho(params: SystemParams) -> np.ndarray:
    """sum_i p_i |E_i><E_i| from the closed-form eigensystem."""
    es = eigensystem(params)
    v = es.states
    return cmatrix((v * np.array(gibbs_probabilities(params))) @ dagger(v))


def gibbs_state_oracle(params: SystemParams) -> np.ndarray:
    """Gibbs state from a Jacobi diagonalisation of H; no closed forms used."""
    dec = hermitian_eig(build_hamiltonian(params))
    shifted = dec.eigenvalues - dec.eigenvalues[0]
    w = np.exp(-shifted / params.kT)
    w /= w.sum()
    v = dec.eigenvectors
    return cmatrix((v * w) @ dagger(v))


def mean_energy(state: GibbsState) -> float:
    return 2 * state.m - 2 * state.kappa * state.c1 - 2 * state.r


def mean_energy_from_probabilities(state: GibbsState) -> float:
    """sum_i p_i E_i; free of the cancellation in 2m - 2kappa c1 - 2r at low kT."""
    return float(sum(p * e for p, e in zip(state.p, eigenenergies(state.params))))


def energy_of(rho: np.ndarray, params: SystemParams) -> float:
    return float(np.trace(build_hamiltonian(params) @ rho).real)
