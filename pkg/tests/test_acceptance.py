"""Acceptance criteria 1-12, each at its stated tolerance.

The conftest hook prints one PASS/FAIL line per criterion at the end of the run.
"""
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from qetlab import analysis
from qetlab.correlations import (
    appendix_a_min, binary_h, classical_correlation, discord, entanglement_threshold_Te,
    is_separable, mutual_information, ppt_eigenvalues,
)
from qetlab.local_extraction import (
    omega_batch, omega_max_closed_form, positive_branch, random_feasible_kraus,
    thresholds, unitary_energy_increase, su2_rotation, varpi, apply_channel_on_B,
)
from qetlab.numkit import golden_min, hermitian_eig, partial_transpose_B, refine_min_2d
from qetlab.qet_protocol import (
    energy_injected_EA, extractable_energy, mean_energy_after_measurement, optimal_qet,
    run_protocol,
)
from qetlab.spin_model import (
    SystemParams, build_hamiltonian, eigensystem, gibbs_state, gibbs_state_oracle, mean_energy,
)

KAPPAS = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0)
KTS = np.geomspace(1e-3, 1e3, 25).tolist()
TESTED_KAPPAS = (0.25, 0.5, 1.0, 2.0, 4.0)


def trace_energy(rho, params):
    return float(np.trace(build_hamiltonian(params) @ rho).real)


@pytest.mark.criterion(1)
def test_gibbs_state_matches_spectral_oracle():
    worst = max(np.linalg.norm(gibbs_state(SystemParams(k, t)).rho
                               - gibbs_state_oracle(SystemParams(k, t)))
                for k in KAPPAS for t in KTS)
    assert worst < 1e-10


@pytest.mark.criterion(2)
def test_limit_states():
    p = SystemParams(1.0, 1e-6)
    e0 = eigensystem(p).states[:, 0]
    assert np.linalg.norm(gibbs_state(p).rho - np.outer(e0, e0.conj())) < 1e-8
    for k in KAPPAS:
        assert np.linalg.norm(gibbs_state(SystemParams(k, 1e9)).rho - np.eye(4) / 4) < 1e-8


@pytest.mark.criterion(3)
def test_energy_bookkeeping():
    for k in KAPPAS:
        injected = []
        for t in KTS:
            s = gibbs_state(SystemParams(k, t))
            tr = run_protocol(s, 0.0)
            before = trace_energy(s.rho, s.params)
            assert abs(mean_energy(s) - before) < 1e-11
            assert abs(mean_energy_after_measurement(s) - tr.mean_H_I) < 1e-11
            assert abs(energy_injected_EA(s) - (tr.mean_H_I - before)) < 1e-11
            injected.append(energy_injected_EA(s))
        assert all(e > 0 for e in injected)
        # non-increasing everywhere, strictly lower across the grid (r saturates
        # to the same double at the cold end)
        assert all(b <= a for a, b in zip(injected, injected[1:]))
        assert injected[-1] < injected[0]


def numeric_max_E_B(state):
    thetas = np.linspace(-math.pi / 2, math.pi / 2, 2001)
    vals = [extractable_energy(state, th) for th in thetas]
    i = int(np.argmax(vals))
    h = thetas[1] - thetas[0]
    _, neg = golden_min(lambda th: -extractable_energy(state, th), thetas[i] - h, thetas[i] + h)
    return -neg


@pytest.mark.criterion(4)
def test_teleported_energy_positive_and_maximal():
    kts = np.geomspace(1e-6, 1e6, 49).tolist()
    for k in TESTED_KAPPAS:
        for t in kts:
            s = gibbs_state(SystemParams(k, t))
            res = optimal_qet(s)
            assert res.E_B_max > 0, (k, t)
            assert res.E_B_max == pytest.approx(math.hypot(res.a, res.b) - res.b, abs=1e-15)
    for k in TESTED_KAPPAS:
        for t in KTS:
            s = gibbs_state(SystemParams(k, t))
            assert abs(numeric_max_E_B(s) - optimal_qet(s).E_B_max) < 1e-9


def ground_state_E_B(kappa):
    # as kT -> 0: c1 = c2 = kappa/m and r = 1/m, so a = kappa/m and
    # b = (kappa^2 + m^2)/m, giving (sqrt(kappa^2 + (kappa^2 + m^2)^2) - kappa^2 - m^2)/m
    m = math.sqrt(1 + kappa * kappa)
    s = kappa * kappa + m * m
    return (math.sqrt(kappa * kappa + s * s) - s) / m


@pytest.mark.criterion(5)
def test_ground_state_teleported_energy():
    expected = (math.sqrt(10) - 3) / math.sqrt(2)
    assert ground_state_E_B(1.0) == pytest.approx(expected, rel=1e-14)
    got = optimal_qet(gibbs_state(SystemParams(1.0, 1e-6))).E_B_max
    assert abs(got - expected) < 1e-6


@pytest.mark.criterion(6)
@pytest.mark.parametrize("kappa,kT", [(0.0, 1.0), (0.5, 0.8), (1.0, 2.0), (2.0, 0.3), (4.0, 10.0)])
def test_passivity(kappa, kT):
    s = gibbs_state(SystemParams(kappa, kT))
    h = build_hamiltonian(s.params)
    before = trace_energy(s.rho, s.params)
    g = np.random.default_rng(2024)
    uvw = g.uniform(0, 2 * math.pi, (10_000, 3))
    extracted = np.array([-unitary_energy_increase(s, *row) for row in uvw])
    assert np.all(extracted <= 0)
    # no sample is an effective identity, so none may reach zero
    assert np.all(extracted < 0)
    for row in uvw[:200]:
        after = float(np.trace(h @ apply_channel_on_B(s.rho, [su2_rotation(*row)])).real)
        assert before - after == pytest.approx(-unitary_energy_increase(s, *row), abs=1e-11)
    # the identity extracts exactly nothing
    assert unitary_energy_increase(s, 0.0, 0.0, 0.0) == 0.0


@pytest.mark.criterion(7)
@pytest.mark.parametrize("kappa,kT", [(0.25, 0.5), (0.5, 1.0), (1.0, 2.0), (2.0, 3.0),
                                      (4.0, 8.0), (1.0, 0.5)])
def test_kraus_maximum(kappa, kT):
    s = gibbs_state(SystemParams(kappa, kT))
    closed = omega_max_closed_form(s)
    _, neg = refine_min_2d(lambda a, b: -varpi(s, a, b),
                           ((-math.pi, math.pi), (-math.pi, math.pi)))
    assert abs(max(-neg, 0.0) - closed) < 1e-6
    g = np.random.default_rng([7, int(kappa * 100), int(kT * 100)])
    random_best = float(np.max(omega_batch(s, random_feasible_kraus(g, 10_000))))
    assert random_best <= closed + 1e-12


@pytest.mark.criterion(7)
def test_kraus_worked_cases():
    for t in (0.2, 1.0, 5.0):
        s = gibbs_state(SystemParams(0.0, t))
        assert omega_max_closed_form(s) == pytest.approx(1 - s.r, abs=1e-14)
    for k in KAPPAS:
        assert abs(omega_max_closed_form(gibbs_state(SystemParams(k, 1e9))) - 1) < 1e-6


@pytest.mark.criterion(7)
def test_random_channels_reproducible():
    a = random_feasible_kraus(np.random.default_rng(5), 100)
    b = random_feasible_kraus(np.random.default_rng(5), 100)
    assert np.array_equal(a, b)


@pytest.mark.criterion(8)
@pytest.mark.parametrize("kappa", TESTED_KAPPAS)
def test_thresholds(kappa):
    ts = thresholds(kappa)
    assert ts.T1 is not None and ts.T1 > 0
    assert not positive_branch(gibbs_state(SystemParams(kappa, ts.T1 - 1e-8)))
    assert positive_branch(gibbs_state(SystemParams(kappa, ts.T1 + 1e-8)))
    assert ts.T2 is not None and ts.T2 > ts.T1
    hot = gibbs_state(SystemParams(kappa, 2 * ts.T2))
    assert optimal_qet(hot).E_B_max / omega_max_closed_form(hot) < 0.05
    order = {"teleportation": 0, "window": 1, "local_extraction": 2}
    pts = analysis.classify_regimes([kappa], np.geomspace(1e-2, 50, 200).tolist())
    labels = [order[p.regime] for p in pts]
    assert labels == sorted(labels)
    assert set(labels) == {0, 1, 2}


@pytest.mark.criterion(9)
def test_discord_identity_and_measurement_minimum():
    for k in KAPPAS:
        for t in KTS:
            s = gibbs_state(SystemParams(k, t))
            assert abs(mutual_information(s) - classical_correlation(s) - discord(s)) < 1e-10
    for k, t in ((0.25, 0.4), (1.0, 2.0), (2.0, 1.0), (4.0, 6.0)):
        s = gibbs_state(SystemParams(k, t))
        value, angles = appendix_a_min(s)
        assert abs(binary_h(s.r) - value - classical_correlation(s)) < 1e-8
        assert abs(angles.theta - math.pi / 2) < 1e-4
        assert min(angles.phi % math.pi, math.pi - angles.phi % math.pi) < 1e-4


@pytest.mark.criterion(9)
def test_discord_limits_and_shape():
    for k in TESTED_KAPPAS:
        m = math.sqrt(1 + k * k)
        assert abs(discord(gibbs_state(SystemParams(k, 1e-6))) - binary_h(1 / m)) < 1e-6
        d = [discord(gibbs_state(SystemParams(k, t))) for t in KTS]
        assert all(x > 0 for x in d)
        assert all(b <= a for a, b in zip(d, d[1:]))
        assert d[-1] < d[0]


@pytest.mark.criterion(10)
def test_ppt_and_separability():
    for k in KAPPAS:
        for t in KTS:
            p = SystemParams(k, t)
            numeric = hermitian_eig(partial_transpose_B(gibbs_state(p).rho)).eigenvalues
            assert np.max(np.abs(np.sort(ppt_eigenvalues(p)) - numeric)) < 1e-10
            if 0.05 < t < 100:
                m = p.m
                cond = m * math.cosh(2 * k / t) >= k * math.sinh(2 * m / t)
                assert is_separable(p) == cond
    te = [entanglement_threshold_Te(k) for k in (0.5, 1.0, 2.0, 4.0)]
    assert all(b > a for a, b in zip(te, te[1:]))


@pytest.mark.criterion(11)
def test_constant_C_contours():
    start = time.perf_counter()
    curves = {c: analysis.trace_constant_C_contour(c) for c in analysis.DEFAULT_C_TARGETS}
    elapsed = time.perf_counter() - start
    assert elapsed <= 60
    for c, pts in curves.items():
        assert len(pts) > 1
        for p in pts:
            assert abs(classical_correlation(gibbs_state(SystemParams(p.kappa, p.kT))) - c) < 1e-8
            assert p.separable and is_separable(SystemParams(p.kappa, p.kT))
        pairs = analysis.dissonance_energy_curve(c)
        for (d0, e0), (d1, e1) in zip(pairs, pairs[1:]):
            assert (d1 - d0) * (e1 - e0) > 0


@pytest.mark.criterion(12)
def test_verify_command():
    cmd = [sys.executable, "-m", "qetlab.cli", "verify", "--seed", "42"]
    start = time.perf_counter()
    first = subprocess.run(cmd, capture_output=True, text=True)
    elapsed = time.perf_counter() - start
    second = subprocess.run(cmd, capture_output=True, text=True)
    assert first.returncode == 0, first.stderr
    assert elapsed <= 60
    assert first.stdout == second.stdout
    assert json.loads(first.stdout)["passed"] is True
