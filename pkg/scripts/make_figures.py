"""Write the six figure datasets as CSV files.

    python scripts/make_figures.py [OUTDIR]
"""
import sys
import time
from pathlib import Path

from qetlab import analysis
from qetlab.cli import to_csv


def main(outdir: str = "figures") -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = analysis.FigureConfig()
    for n in sorted(analysis.FIGURES):
        start = time.perf_counter()
        table = analysis.figure_dataset(n, cfg)
        path = out / f"figure{n}.csv"
        path.write_text(to_csv(table))
        print(f"{path}: {len(table.rows)} rows in {time.perf_counter() - start:.2f}s")


if __name__ == "__main__":
    main(*sys.argv[1:])
