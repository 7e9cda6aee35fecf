"""Parameter sweeps, regime labels, constant-C contours and figure tables."""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .correlations import (
    binary_h, classical_correlation, discord, entanglement_threshold_Te, is_separable,
    mutual_information,
)
from .local_extraction import ThresholdSet, omega_max_closed_form, thresholds
from .numkit import KT_MAX, KT_MIN, Bracket, BracketError, bisect, stable_gibbs_ratios
from .qet_protocol import energy_injected_EA, optimal_qet
from .spin_model import SystemParams, gibbs_state

log = logging.getLogger(__name__)

QUANTITIES = ("discord", "classical", "mutual_info", "E_A", "E_B", "omega_max",
              "separable", "thresholds")
DEFAULT_KAPPAS = (0.25, 0.5, 1.0, 2.0, 4.0)
DEFAULT_C_TARGETS = (0.1, 0.3, 0.5, 0.7, 0.9)
CONTOUR_KAPPA_RANGE = (1e-6, 50.0)


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Order-preserving map, threaded up to QETLAB_THREADS workers (default 1)."""
    workers = int(os.environ.get("QETLAB_THREADS", "1") or 1)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass
class Table:
    columns: list[str]
    rows: list[dict] = field(default_factory=list)

    def column(self, name: str) -> list:
        return [row.get(name) for row in self.rows]


@dataclass(frozen=True)
class SweepSpec:
    kappa_values: tuple[float, ...]
    kT_values: tuple[float, ...]
    quantities: tuple[str, ...] = ("discord", "E_B", "omega_max")

    def __post_init__(self):
        object.__setattr__(self, "kappa_values", tuple(float(k) for k in self.kappa_values))
        object.__setattr__(self, "kT_values", tuple(float(t) for t in self.kT_values))
        object.__setattr__(self, "quantities", tuple(self.quantities))
        if not self.kappa_values or not self.kT_values:
            raise ValueError("sweep needs non-empty kappa and kT lists")
        unknown = set(self.quantities) - set(QUANTITIES)
        if unknown:
            raise ValueError(f"unknown quantities: {sorted(unknown)}")
        bad = [t for t in self.kT_values if not KT_MIN <= t <= KT_MAX]
        if bad:
            raise ValueError(f"kT values outside [{KT_MIN:g}, {KT_MAX:g}]: {bad}")


def _point_values(kappa: float, kT: float, quantities: Iterable[str]) -> dict:
    state = gibbs_state(SystemParams(kappa, kT))
    out = {}
    for q in quantities:
        if q == "discord":
            out[q] = discord(state)
        elif q == "classical":
            out[q] = classical_correlation(state)
        elif q == "mutual_info":
            out[q] = mutual_information(state)
        elif q == "E_A":
            out[q] = energy_injected_EA(state)
        elif q == "E_B":
            out[q] = optimal_qet(state).E_B_max
        elif q == "omega_max":
            out[q] = omega_max_closed_form(state)
        elif q == "separable":
            out[q] = is_separable(state.params)
    return out


def _safe_thresholds(kappa: float) -> tuple[ThresholdSet | None, str]:
    try:
        return thresholds(kappa), ""
    except (ValueError, ArithmeticError) as exc:
        return None, f"thresholds: {exc}"


def sweep(spec: SweepSpec) -> Table:
    """One row per (kappa, kT), kappa-major; failures land in the error column."""
    point_q = [q for q in spec.quantities if q != "thresholds"]
    columns = ["kappa", "kT"] + point_q
    want_thr = "thresholds" in spec.quantities
    if want_thr:
        columns += ["Te", "T1", "T2"]
    columns.append("error")

    thr = {}
    if want_thr:
        thr = dict(zip(spec.kappa_values, parallel_map(_safe_thresholds, spec.kappa_values)))

    def row_for(pair):
        kappa, kT = pair
        row = {c: None for c in columns}
        row.update(kappa=kappa, kT=kT, error="")
        try:
            row.update(_point_values(kappa, kT, point_q))
        except (ValueError, ArithmeticError) as exc:
            row["error"] = str(exc)
        if want_thr:
            ts, err = thr[kappa]
            if ts is not None:
                row.update(Te=ts.Te, T1=ts.T1, T2=ts.T2)
            if err:
                row["error"] = "; ".join(e for e in (row["error"], err) if e)
        return row

    pairs = [(k, t) for k in spec.kappa_values for t in spec.kT_values]
    return Table(columns, parallel_map(row_for, pairs))


# --- regimes ----------------------------------------------------------------

@dataclass(frozen=True)
class RegimePoint:
    kappa: float
    kT: float
    regime: str  # teleportation | window | local_extraction | unresolved
    entangled: bool


def regime_label(kT: float, ts: ThresholdSet | None) -> str:
    if ts is None or ts.T1 is None or ts.T2 is None:
        return "unresolved"
    if kT < ts.T1:
        return "teleportation"
    if kT < ts.T2:
        return "window"
    return "local_extraction"


def classify_regimes(kappa_grid: Sequence[float], kT_grid: Sequence[float]) -> list[RegimePoint]:
    out = []
    for kappa in kappa_grid:
        if kappa <= 0:
            raise ValueError("regime classification needs kappa > 0")
        ts, err = _safe_thresholds(kappa)
        if err:
            log.warning("kappa=%g: %s", kappa, err)
        for kT in kT_grid:
            out.append(RegimePoint(kappa, kT, regime_label(kT, ts),
                                   not is_separable(SystemParams(kappa, kT))))
    return out


# --- constant classical correlation contours ---------------------------------

@dataclass(frozen=True)
class ContourPoint:
    C_target: float
    kT: float
    kappa: float
    D: float
    E_B: float
    separable: bool


def classical_at(kappa: float, kT: float) -> float:
    """C(kappa, kT) straight from the coefficients (no matrix assembly)."""
    _, c1, _, _, r = stable_gibbs_ratios(kappa, kT)
    return binary_h(r) - binary_h(min(math.hypot(r, c1), 1.0))


def _sign_brackets(f, xs) -> list[Bracket]:
    vals = [f(x) for x in xs]
    out = []
    for (x0, f0), (x1, f1) in zip(zip(xs, vals), zip(xs[1:], vals[1:])):
        if f0 == 0 or f0 * f1 < 0:
            out.append(Bracket(x0, x1, f0, f1))
    return out


def _kappa_scan_grid(n: int = 120) -> list[float]:
    lo, hi = CONTOUR_KAPPA_RANGE
    return np.geomspace(lo, hi, n).tolist()


def contour_anchor(C_target: float) -> tuple[float, float]:
    """(kappa, kT) where the constant-C contour meets the separability boundary."""
    def g(kappa):
        return classical_at(kappa, entanglement_threshold_Te(kappa)) - C_target

    brackets = _sign_brackets(g, np.geomspace(1e-3, CONTOUR_KAPPA_RANGE[1], 60).tolist())
    if not brackets:
        raise BracketError(f"C = {C_target} never meets the separability boundary "
                           f"for kappa <= {CONTOUR_KAPPA_RANGE[1]}")
    if len(brackets) > 1:
        log.warning("C = %g meets the boundary %d times; using the first",
                    C_target, len(brackets))
    kappa = bisect(g, brackets[0], tol=1e-14)
    return kappa, entanglement_threshold_Te(kappa)


def _contour_point(C_target: float, kappa: float, kT: float) -> ContourPoint:
    state = gibbs_state(SystemParams(kappa, kT))
    return ContourPoint(C_target, kT, kappa, discord(state), optimal_qet(state).E_B_max,
                        is_separable(state.params))


def default_contour_grid() -> list[float]:
    return np.geomspace(0.1, 40.0, 90).tolist()


def trace_constant_C_contour(C_target: float, kT_grid: Sequence[float] | None = None,
                             residual_tol: float = 1e-8) -> list[ContourPoint]:
    """Separable Gibbs states with C = C_target, anchored on the boundary.

    Returned in increasing kT starting from the anchor.  Points with no
    solution, an excessive residual, or an entangled state are skipped and
    logged.
    """
    if not 0 < C_target < 1:
        raise ValueError(f"C_target must lie in (0, 1), got {C_target}")
    grid = sorted(default_contour_grid() if kT_grid is None else kT_grid)
    k_anchor, t_anchor = contour_anchor(C_target)
    points = [_contour_point(C_target, k_anchor, t_anchor)]
    prev = k_anchor
    scan = _kappa_scan_grid()
    for kT in grid:
        if kT <= t_anchor:
            continue

        def f(kappa, kT=kT):
            return classical_at(kappa, kT) - C_target

        brackets = _sign_brackets(f, scan)
        if not brackets:
            log.info("C = %g: no kappa solution at kT = %g", C_target, kT)
            continue
        if len(brackets) > 1:
            log.warning("C = %g, kT = %g: %d kappa brackets, taking the one nearest "
                        "kappa = %g", C_target, kT, len(brackets), prev)
        br = min(brackets, key=lambda b: abs(math.log(0.5 * (b.lo + b.hi)) - math.log(prev)))
        kappa = bisect(f, br, tol=1e-14)
        if abs(classical_at(kappa, kT) - C_target) >= residual_tol:
            log.warning("C = %g, kT = %g: residual too large, point dropped", C_target, kT)
            continue
        pt = _contour_point(C_target, kappa, kT)
        if not pt.separable:
            log.info("C = %g, kT = %g: entangled, point dropped", C_target, kT)
            continue
        points.append(pt)
        prev = kappa
    return points


def dissonance_energy_curve(C_target: float,
                            kT_grid: Sequence[float] | None = None) -> list[tuple[float, float]]:
    return [(p.D, p.E_B) for p in trace_constant_C_contour(C_target, kT_grid)]


# --- figure tables ----------------------------------------------------------

@dataclass(frozen=True)
class FigureConfig:
    kappas: tuple[float, ...] = DEFAULT_KAPPAS
    kT_grid: tuple[float, ...] = tuple(np.geomspace(0.02, 20.0, 120).tolist())
    regime_kappas: tuple[float, ...] = tuple(np.linspace(0.05, 4.0, 80).tolist())
    boundary_kappas: tuple[float, ...] = tuple(np.geomspace(0.01, 50.0, 120).tolist())
    c_targets: tuple[float, ...] = DEFAULT_C_TARGETS
    contour_kT_grid: tuple[float, ...] = tuple(default_contour_grid())


def _curve_with_marker(kappas, kT_grid, value_fn, marker_fn, value_col, flag_col) -> Table:
    table = Table(["kappa", "kT", value_col, flag_col])
    for kappa in kappas:
        marker = marker_fn(kappa)
        kTs = sorted(set(kT_grid) | ({marker} if marker is not None else set()))
        for kT in kTs:
            flag = 1 if marker is not None and kT == marker else 0
            table.rows.append({"kappa": kappa, "kT": kT, value_col: value_fn(kappa, kT),
                               flag_col: flag})
    return table


def figure1(cfg: FigureConfig) -> Table:
    return _curve_with_marker(
        cfg.kappas, cfg.kT_grid,
        lambda k, t: discord(gibbs_state(SystemParams(k, t))),
        entanglement_threshold_Te, "discord", "Te_flag")


def figure2(cfg: FigureConfig) -> Table:
    table = Table(["kappa", "kT", "E_B"])
    for kappa in cfg.kappas:
        for kT in cfg.kT_grid:
            table.rows.append({"kappa": kappa, "kT": kT,
                               "E_B": optimal_qet(gibbs_state(SystemParams(kappa, kT))).E_B_max})
    return table


def figure3(cfg: FigureConfig) -> Table:
    from .local_extraction import threshold_T1

    return _curve_with_marker(
        cfg.kappas, cfg.kT_grid,
        lambda k, t: omega_max_closed_form(gibbs_state(SystemParams(k, t))),
        threshold_T1, "omega_max", "T1_flag")


def figure4(cfg: FigureConfig) -> Table:
    cols = ["kappa", "Te", "T1", "T2", "teleportation_lo", "teleportation_hi",
            "window_lo", "window_hi", "local_extraction_lo", "local_extraction_hi"]
    table = Table(cols)
    for kappa, (ts, err) in zip(cfg.regime_kappas,
                                parallel_map(_safe_thresholds, list(cfg.regime_kappas))):
        if ts is None:
            log.warning("kappa=%g: %s", kappa, err)
            continue
        table.rows.append({
            "kappa": kappa, "Te": ts.Te, "T1": ts.T1, "T2": ts.T2,
            "teleportation_lo": KT_MIN, "teleportation_hi": ts.T1,
            "window_lo": ts.T1, "window_hi": ts.T2,
            "local_extraction_lo": ts.T2, "local_extraction_hi": KT_MAX,
        })
    return table


def figure5(cfg: FigureConfig) -> Table:
    table = Table(["series", "C_target", "kappa", "kT"])
    for kappa in cfg.boundary_kappas:
        table.rows.append({"series": "entanglement_boundary", "C_target": None,
                           "kappa": kappa, "kT": entanglement_threshold_Te(kappa)})
    for c in cfg.c_targets:
        for p in trace_constant_C_contour(c, cfg.contour_kT_grid):
            table.rows.append({"series": "constant_C", "C_target": c,
                               "kappa": p.kappa, "kT": p.kT})
    return table


def figure6(cfg: FigureConfig) -> Table:
    table = Table(["C_target", "kT", "kappa", "discord", "E_B"])
    contours = parallel_map(lambda c: trace_constant_C_contour(c, cfg.contour_kT_grid),
                            list(cfg.c_targets))
    for c, pts in zip(cfg.c_targets, contours):
        for p in pts:
            table.rows.append({"C_target": c, "kT": p.kT, "kappa": p.kappa,
                               "discord": p.D, "E_B": p.E_B})
    return table


FIGURES = {1: figure1, 2: figure2, 3: figure3, 4: figure4, 5: figure5, 6: figure6}


def figure_dataset(n: int, cfg: FigureConfig | None = None) -> Table:
    if n not in FIGURES:
        raise ValueError(f"figure number must be 1..6, got {n}")
    return FIGURES[n](cfg or FigureConfig())
