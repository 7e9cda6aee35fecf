"""Trace the constant-C contours and summarise discord against teleported energy.

For each level the first row is the point on the separability boundary.
"""
import time

from qetlab import analysis


def main() -> None:
    for c in analysis.DEFAULT_C_TARGETS:
        start = time.perf_counter()
        pts = analysis.trace_constant_C_contour(c)
        comonotone = all((b.D - a.D) * (b.E_B - a.E_B) > 0 for a, b in zip(pts, pts[1:]))
        first, last = pts[0], pts[-1]
        print(f"C={c:.1f}  {len(pts):3d} pts  anchor kappa={first.kappa:.4f} kT={first.kT:.4f}  "
              f"D {first.D:.3e} -> {last.D:.3e}  E_B {first.E_B:.3e} -> {last.E_B:.3e}  "
              f"co-monotone={comonotone}  ({time.perf_counter() - start:.2f}s)")


if __name__ == "__main__":
    main()
