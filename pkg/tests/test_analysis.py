import pytest

from qetlab import analysis
from qetlab.correlations import entanglement_threshold_Te, report_for
from qetlab.local_extraction import threshold_T1


def test_sweep_row_order_and_columns():
    spec = analysis.SweepSpec([0.5, 1.0], [0.5, 2.0, 8.0], ("discord", "E_B", "separable"))
    table = analysis.sweep(spec)
    assert table.columns == ["kappa", "kT", "discord", "E_B", "separable", "error"]
    assert [(r["kappa"], r["kT"]) for r in table.rows] == [
        (0.5, 0.5), (0.5, 2.0), (0.5, 8.0), (1.0, 0.5), (1.0, 2.0), (1.0, 8.0)]
    assert all(r["error"] == "" for r in table.rows)


def test_sweep_marks_failed_rows_instead_of_aborting():
    table = analysis.sweep(analysis.SweepSpec([-1.0, 1.0], [1.0], ("discord",)))
    assert table.rows[0]["error"] and table.rows[0]["discord"] is None
    assert table.rows[1]["error"] == ""


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        analysis.SweepSpec([], [1.0])
    with pytest.raises(ValueError):
        analysis.SweepSpec([1.0], [1e13])
    with pytest.raises(ValueError):
        analysis.SweepSpec([1.0], [1.0], ("nonsense",))


def test_sweep_is_deterministic_with_threads(monkeypatch):
    spec = analysis.SweepSpec([0.25, 1.0, 4.0], [0.3, 1.0, 3.0], ("discord", "thresholds"))
    serial = analysis.sweep(spec)
    monkeypatch.setenv("QETLAB_THREADS", "4")
    assert analysis.sweep(spec).rows == serial.rows


def test_regime_labels_match_energies():
    kTs = [0.3, 0.6, 0.9, 1.1, 1.25, 1.5, 3.0]
    for p in analysis.classify_regimes([1.0], kTs):
        from qetlab.qet_protocol import optimal_qet
        from qetlab.local_extraction import omega_max_closed_form
        from qetlab.spin_model import SystemParams, gibbs_state
        s = gibbs_state(SystemParams(p.kappa, p.kT))
        e_b, om = optimal_qet(s).E_B_max, omega_max_closed_form(s)
        if p.regime == "teleportation":
            assert om == 0 and e_b > 0
        elif p.regime == "window":
            assert e_b > om > 0
        else:
            assert om > e_b


def test_contour_anchor_is_on_the_boundary():
    kappa, kT = analysis.contour_anchor(0.5)
    assert kT == pytest.approx(entanglement_threshold_Te(kappa), rel=1e-12)
    assert analysis.classical_at(kappa, kT) == pytest.approx(0.5, abs=1e-10)


def test_contour_endpoint_discord_is_boundary_discord():
    pts = analysis.trace_constant_C_contour(0.3)
    first = pts[0]
    assert first.D == pytest.approx(report_for(first.kappa, first.kT).discord, abs=1e-12)


def test_contour_rejects_bad_target():
    with pytest.raises(ValueError):
        analysis.trace_constant_C_contour(1.5)


def test_classical_at_matches_state_route():
    assert analysis.classical_at(1.3, 2.1) == pytest.approx(report_for(1.3, 2.1).classical)


def test_figure_schemas():
    cfg = analysis.FigureConfig(kappas=(0.5, 2.0), kT_grid=(0.2, 1.0, 5.0),
                                regime_kappas=(0.5, 2.0), boundary_kappas=(0.5, 2.0),
                                c_targets=(0.3,), contour_kT_grid=(2.0, 4.0, 8.0))
    expected = {
        1: ["kappa", "kT", "discord", "Te_flag"],
        2: ["kappa", "kT", "E_B"],
        3: ["kappa", "kT", "omega_max", "T1_flag"],
        5: ["series", "C_target", "kappa", "kT"],
        6: ["C_target", "kT", "kappa", "discord", "E_B"],
    }
    for n, cols in expected.items():
        assert analysis.figure_dataset(n, cfg).columns == cols
    fig4 = analysis.figure_dataset(4, cfg)
    assert {"T1", "T2", "window_lo", "window_hi"} <= set(fig4.columns)
    fig1 = analysis.figure_dataset(1, cfg)
    marked = [r for r in fig1.rows if r["Te_flag"] == 1]
    assert [r["kT"] for r in marked] == [entanglement_threshold_Te(0.5),
                                         entanglement_threshold_Te(2.0)]
    fig3 = analysis.figure_dataset(3, cfg)
    for r in fig3.rows:
        if r["kT"] < threshold_T1(r["kappa"]):
            assert r["omega_max"] == 0.0
    with pytest.raises(ValueError):
        analysis.figure_dataset(0)


def test_figure1_curves_decrease():
    table = analysis.figure_dataset(1)
    for k in analysis.DEFAULT_KAPPAS:
        d = [r["discord"] for r in table.rows if r["kappa"] == k]
        assert all(x > 0 for x in d)
        # cold-end plateau is flat up to rounding
        assert all(b <= a + 1e-12 for a, b in zip(d, d[1:]))
        assert d[-1] < d[0]
