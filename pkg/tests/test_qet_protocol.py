import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qetlab.qet_protocol import (
    conditional_unitary, energy_injected_EA, energy_injected_oracle, extractable_energy,
    mean_energy_after_measurement, mean_energy_after_protocol, measure_A, optimal_qet,
    projector, protocol_energy_change_oracle, qet_coefficients, qet_coefficients_from_c,
    run_protocol,
)
from qetlab.spin_model import SystemParams, gibbs_state

kappas = st.floats(0, 6)
temps = st.floats(0.05, 100)
angles = st.floats(-math.pi, math.pi)


def test_projectors_and_unitaries():
    for a in (1, -1):
        p = projector(a)
        assert np.allclose(p @ p, p)
        u = conditional_unitary(a, 0.3)
        assert np.allclose(u @ u.conj().T, np.eye(2))
    assert np.allclose(projector(1) + projector(-1), np.eye(2))
    with pytest.raises(ValueError):
        projector(0)


def test_outcomes_are_equally_likely():
    s = gibbs_state(SystemParams(1.3, 0.8))
    _, q_plus = measure_A(s, 1)
    _, q_minus = measure_A(s, -1)
    assert q_plus == pytest.approx(0.5)
    assert q_minus == pytest.approx(0.5)


@given(kappa=kappas, kT=temps, theta=angles)
def test_protocol_energies_match_matrices(kappa, kT, theta):
    s = gibbs_state(SystemParams(kappa, kT))
    tr = run_protocol(s, theta)
    assert tr.mean_H_I == pytest.approx(mean_energy_after_measurement(s), abs=1e-11)
    assert tr.mean_H_III == pytest.approx(mean_energy_after_protocol(s, theta), abs=1e-11)
    assert extractable_energy(s, theta) == pytest.approx(
        protocol_energy_change_oracle(s, theta), abs=1e-11)


@given(kappa=kappas, kT=temps)
def test_coefficients_two_ways(kappa, kT):
    s = gibbs_state(SystemParams(kappa, kT))
    assert np.allclose(qet_coefficients(s), qet_coefficients_from_c(s), rtol=1e-9, atol=1e-13)


def test_coefficient_a_keeps_relative_accuracy_when_hot():
    # the c-form loses a to cancellation; the series form keeps it positive
    s = gibbs_state(SystemParams(1.0, 1e5))
    a, b = qet_coefficients(s)
    assert a > 0 and b > 0
    assert a == pytest.approx(2 / 3 * 1 / 1e5**3, rel=1e-3)


@given(kappa=st.floats(0.01, 6), kT=temps)
def test_optimal_angle_is_maximum(kappa, kT):
    s = gibbs_state(SystemParams(kappa, kT))
    res = optimal_qet(s)
    assert res.E_B_max > 0
    assert extractable_energy(s, res.theta_o) == pytest.approx(res.E_B_max, rel=1e-9, abs=1e-15)
    for d in (-1e-3, 1e-3):
        assert extractable_energy(s, res.theta_o + d) <= res.E_B_max


def test_decoupled_teleports_nothing():
    res = optimal_qet(gibbs_state(SystemParams(0.0, 1.0)))
    assert res.E_B_max == 0.0
    assert res.theta_o == 0.0


@given(kappa=kappas, kT=temps)
def test_injected_energy(kappa, kT):
    s = gibbs_state(SystemParams(kappa, kT))
    assert energy_injected_EA(s) == pytest.approx(energy_injected_oracle(s), abs=1e-11)
    assert energy_injected_EA(s) > 0
