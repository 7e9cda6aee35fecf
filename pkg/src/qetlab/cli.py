"""Command-line front end: ``qetlab <command> [options]``.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import analysis, verify
from .correlations import correlation_report
from .local_extraction import solve_max_omega, thresholds
from .qet_protocol import optimal_qet
from .spin_model import SystemParams, gibbs_state, mean_energy

SINGLE_POINT = ("state", "report", "qet", "extract")


# --- serialisation ------------------------------------------------------------

def _num(x) -> str:
    text = format(float(x), ".17g")
    # keep floats recognisable as floats (1.0, not 1)
    return text if any(ch in text for ch in ".en") else text + ".0"



def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float at 17 significant digits; non-finite floats become null."""
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{to_json(str(k))}: {to_json(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        items = [inner + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _num(v) if math.isfinite(v) else ""
    return str(v)


def to_csv(table: analysis.Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_csv_cell(row.get(c)) for c in table.columns])
    return buf.getvalue()


def _flat_table(doc: dict) -> analysis.Table:
    """One-row table of the scalar fields of a single-point document."""
    cols = [k for k, v in doc.items() if not isinstance(v, (list, tuple, dict))]
    return analysis.Table(cols, [{c: doc[c] for c in cols}])


# --- argument parsing ---------------------------------------------------------

class UsageError(ValueError):
    pass


def parse_grid(spec: str) -> list[float]:
    """``lo:hi:n`` (linear) or ``lo:hi:n:log`` (geometric), endpoints included."""
    parts = spec.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
        raise UsageError(f"grid spec must look like lo:hi:n[:log], got {spec!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"bad number in grid spec {spec!r}") from None
    if n < 1:
        raise UsageError("grid needs at least one point")
    if len(parts) == 4:
        if lo <= 0 or hi <= 0:
            raise UsageError("log grid needs positive endpoints")
        return np.geomspace(lo, hi, n).tolist()
    return np.linspace(lo, hi, n).tolist()


def parse_floats(spec: str) -> list[float]:
    try:
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {spec!r}") from None


def parse_tol(items: list[str]) -> dict[str, float]:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}")
        try:
            out[name] = float(value)
        except ValueError:
            raise UsageError(f"bad tolerance value in {item!r}") from None
    return out


@dataclass
class RunConfig:
    command: str
    kappa: float | None = None
    kT: float | None = None
    kappa_grid: list[float] | None = None
    kT_grid: list[float] | None = None
    c_targets: list[float] | None = None
    quantities: list[str] | None = None
    figure: int | None = None
    fmt: str | None = None
    out: str | None = None
    seed: int = verify.DEFAULT_SEED
    tol: dict = field(default_factory=dict)
    naive_coeffs: bool = False

    def validate(self) -> None:
        if self.command in SINGLE_POINT and (self.kappa is None or self.kT is None):
            raise UsageError(f"{self.command} needs --kappa and --kT")
        if self.command == "sweep" and (self.kappa_grid is None or self.kT_grid is None):
            raise UsageError("sweep needs --kappa-grid and --kT-grid")
        if self.command == "thresholds" and self.kappa is None and self.kappa_grid is None:
            raise UsageError("thresholds needs --kappa or --kappa-grid")
        if self.seed < 0:
            raise UsageError("--seed must be a non-negative integer")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=("json", "csv"))
    common.add_argument("--out", help="write here instead of standard output")

    point = argparse.ArgumentParser(add_help=False)
    point.add_argument("--kappa", type=float)
    point.add_argument("--kT", type=float)
    point.add_argument("--naive-coeffs", action="store_true",
                       help="evaluate the Gibbs coefficients without overflow factoring")

    grids = argparse.ArgumentParser(add_help=False)
    grids.add_argument("--kappa-grid", help="lo:hi:n[:log]")
    grids.add_argument("--kT-grid", help="lo:hi:n[:log]")

    parser = argparse.ArgumentParser(prog="qetlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("state", parents=[common, point], help="Gibbs state and its coefficients")
    sub.add_parser("report", parents=[common, point], help="correlations, QET and extraction")
    sub.add_parser("qet", parents=[common, point], help="optimal teleportation protocol")
    sub.add_parser("extract", parents=[common, point], help="optimal local channel on B")
    sub.add_parser("thresholds", parents=[common, point, grids], help="Te, T1, T2 per kappa")
    fig = sub.add_parser("figure", parents=[common, grids], help="figure dataset 1..6")
    fig.add_argument("n", type=int)
    fig.add_argument("--c-targets", help="comma-separated classical correlation levels")
    sw = sub.add_parser("sweep", parents=[common, grids], help="grid sweep")
    sw.add_argument("--quantities", default="discord,E_B,omega_max",
                    help="comma-separated subset of " + ",".join(analysis.QUANTITIES))
    ver = sub.add_parser("verify", parents=[common], help="run the self-verification suite")
    ver.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)
    ver.add_argument("--tol", action="append", metavar="NAME=VALUE",
                     help="override a check tolerance; repeatable")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    get = lambda name: getattr(ns, name, None)  # noqa: E731
    cfg = RunConfig(
        command=ns.command, kappa=get("kappa"), kT=get("kT"),
        kappa_grid=parse_grid(ns.kappa_grid) if get("kappa_grid") else None,
        kT_grid=parse_grid(ns.kT_grid) if get("kT_grid") else None,
        c_targets=parse_floats(ns.c_targets) if get("c_targets") else None,
        quantities=[q.strip() for q in ns.quantities.split(",")] if get("quantities") else None,
        figure=get("n"), fmt=ns.fmt, out=ns.out,
        seed=get("seed") if get("seed") is not None else verify.DEFAULT_SEED,
        tol=parse_tol(get("tol")), naive_coeffs=bool(get("naive_coeffs")),
    )
    cfg.validate()
    return cfg


# --- commands -----------------------------------------------------------------

def _state(cfg: RunConfig):
    return gibbs_state(SystemParams(cfg.kappa, cfg.kT), naive=cfg.naive_coeffs)


def cmd_state(cfg: RunConfig) -> dict:
    s = _state(cfg)
    rho = np.asarray(s.rho)
    return {
        "kappa": s.kappa, "kT": s.kT, "m": s.m, "Z": s.Z,
        "p0": s.p[0], "p1": s.p[1], "p2": s.p[2], "p3": s.p[3],
        "c1": s.c1, "c2": s.c2, "c3": s.c3, "r": s.r,
        "mean_energy": mean_energy(s), "trace": float(np.trace(rho).real),
        "rho": [[[float(z.real), float(z.imag)] for z in row] for row in rho],
    }


def _regime(kappa: float, kT: float, ts) -> str:
    # without coupling nothing can be teleported and 1 - r is always extractable
    return "local_extraction" if kappa == 0 else analysis.regime_label(kT, ts)


def cmd_report(cfg: RunConfig) -> dict:
    s = _state(cfg)
    corr = correlation_report(s)
    qet = optimal_qet(s)
    ext = solve_max_omega(s)
    ts = thresholds(s.kappa)
    return {
        "kappa": s.kappa, "kT": s.kT,
        "I": corr.mutual_info, "C": corr.classical, "D": corr.discord,
        "separable": corr.separable, "ppt_eigenvalues": list(corr.ppt_eigs),
        "Te": ts.Te, "T1": ts.T1, "T2": ts.T2,
        "E_A": qet.E_A, "theta_o": qet.theta_o, "E_B_max": qet.E_B_max,
        "omega_max": ext.omega_max, "branch": ext.branch,
        "regime": _regime(s.kappa, s.kT, ts),
    }


def cmd_qet(cfg: RunConfig) -> dict:
    s = _state(cfg)
    q = optimal_qet(s)
    return {"kappa": s.kappa, "kT": s.kT, "E_A": q.E_A, "a": q.a, "b": q.b,
            "theta_o": q.theta_o, "E_B_max": q.E_B_max,
            "q_plus": q.outcome_probs[0], "q_minus": q.outcome_probs[1]}


def cmd_extract(cfg: RunConfig) -> dict:
    s = _state(cfg)
    e = solve_max_omega(s)
    return {
        "kappa": s.kappa, "kT": s.kT, "omega_max": e.omega_max, "branch": e.branch,
        "sigma": e.sigma, "delta": e.delta, "alpha": e.alpha, "beta": e.beta,
        "kraus": [[[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(k)]
                  for k in e.kraus],
    }


def cmd_thresholds(cfg: RunConfig) -> analysis.Table:
    kappas = cfg.kappa_grid if cfg.kappa_grid is not None else [cfg.kappa]
    table = analysis.Table(["kappa", "Te", "T1", "T2"])
    for k in kappas:
        ts = thresholds(k)
        table.rows.append({"kappa": k, "Te": ts.Te, "T1": ts.T1, "T2": ts.T2})
    return table


def cmd_figure(cfg: RunConfig) -> analysis.Table:
    overrides = {}
    if cfg.kappa_grid is not None:
        overrides["kappas"] = tuple(cfg.kappa_grid)
        overrides["regime_kappas"] = tuple(cfg.kappa_grid)
        overrides["boundary_kappas"] = tuple(cfg.kappa_grid)
    if cfg.kT_grid is not None:
        overrides["kT_grid"] = tuple(cfg.kT_grid)
        overrides["contour_kT_grid"] = tuple(cfg.kT_grid)
    if cfg.c_targets is not None:
        overrides["c_targets"] = tuple(cfg.c_targets)
    return analysis.figure_dataset(cfg.figure, analysis.FigureConfig(**overrides))


def cmd_sweep(cfg: RunConfig) -> analysis.Table:
    return analysis.sweep(analysis.SweepSpec(cfg.kappa_grid, cfg.kT_grid,
                                             tuple(cfg.quantities or ())))


def cmd_verify(cfg: RunConfig) -> tuple[dict, bool]:
    results = verify.run_checks(cfg.seed, cfg.tol)
    for r in results:
        if not r.passed:
            print(f"FAILED {r.name}: residual {r.residual:.3e} > tol {r.tol:.3e}",
                  file=sys.stderr)
    doc = verify.summary(results, cfg.seed)
    return doc, doc["passed"]


COMMANDS = {
    "state": cmd_state, "report": cmd_report, "qet": cmd_qet, "extract": cmd_extract,
    "thresholds": cmd_thresholds, "figure": cmd_figure, "sweep": cmd_sweep,
}


def render(result, fmt: str | None) -> str:
    if isinstance(result, analysis.Table):
        if fmt == "json":
            return to_json({"columns": result.columns, "rows": result.rows}) + "\n"
        return to_csv(result)
    if fmt == "csv":
        return to_csv(_flat_table(result))
    return to_json(result) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)  # exits with 2 on usage errors
    try:
        cfg = config_from_args(ns)
        if cfg.command == "verify":
            result, ok = cmd_verify(cfg)
        else:
            result, ok = COMMANDS[cfg.command](cfg), True
        text = render(result, cfg.fmt)
    except (ValueError, ArithmeticError) as exc:
        print(f"qetlab: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
