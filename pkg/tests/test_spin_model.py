import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qetlab.numkit import DomainError, hermitian_eig
from qetlab.spin_model import (
    SystemParams, build_hamiltonian, eigenenergies, eigensystem, gibbs_state,
    gibbs_state_oracle, mean_energy, mean_energy_from_probabilities, spectral_gibbs_rho,
)

kappas = st.floats(0, 8)
temps = st.floats(1e-3, 1e4)


def test_params_validation():
    assert SystemParams(1.0, 1.0).m == pytest.approx(math.sqrt(2))
    for bad in ((-0.1, 1.0), (1.0, 0.0), (1.0, 1e13), (float("nan"), 1.0)):
        with pytest.raises(DomainError):
            SystemParams(*bad)


@given(kappa=kappas)
def test_closed_form_spectrum(kappa):
    p = SystemParams(kappa, 1.0)
    h = build_hamiltonian(p)
    es = eigensystem(p)
    assert np.allclose(h @ es.states, es.states * np.array(es.energies), atol=1e-12)
    assert np.allclose(hermitian_eig(h).eigenvalues, sorted(eigenenergies(p)), atol=1e-12)


def test_hamiltonian_matrix_elements():
    h = build_hamiltonian(SystemParams(0.75, 1.0))
    m = 1.25
    assert h[0, 0] == pytest.approx(2 / m + 2 + 2 * 0.75**2 / m)
    assert h[0, 3] == pytest.approx(1.5)
    assert h[1, 2] == pytest.approx(1.5)
    assert h[0, 1] == 0


@given(kappa=kappas, kT=temps)
def test_gibbs_state_is_a_density_matrix(kappa, kT):
    s = gibbs_state(SystemParams(kappa, kT))
    assert np.trace(s.rho).real == pytest.approx(1.0, abs=1e-13)
    assert np.allclose(s.rho, s.rho.conj().T)
    assert hermitian_eig(s.rho).eigenvalues[0] > -1e-14
    assert 1.0 <= s.Z <= 4.0
    assert sum(s.p) == pytest.approx(1.0)


@given(kappa=kappas, kT=temps)
def test_closed_form_matches_both_constructions(kappa, kT):
    p = SystemParams(kappa, kT)
    rho = gibbs_state(p).rho
    assert np.linalg.norm(rho - spectral_gibbs_rho(p)) < 1e-12
    assert np.linalg.norm(rho - gibbs_state_oracle(p)) < 1e-10


def test_decoupled_marginal_polarisation():
    for kT in (0.2, 1.0, 5.0):
        assert gibbs_state(SystemParams(0.0, kT)).r == pytest.approx(math.tanh(1 / kT))


@given(kappa=kappas, kT=temps)
def test_mean_energy_two_ways(kappa, kT):
    s = gibbs_state(SystemParams(kappa, kT))
    assert mean_energy(s) == pytest.approx(mean_energy_from_probabilities(s), abs=1e-12)
