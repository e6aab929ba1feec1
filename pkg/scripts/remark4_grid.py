"""Maximum orbital and Banach ratios of the discontinuous interval map as the grid is refined."""
from __future__ import annotations

import time

from fplab.classifiers import ContractionKind as K, grid_falsify
from fplab.corpus import remark4_system


def main() -> None:
    print(f"{'grid':>6} {'points':>7} {'orbital max':>14} {'witness':>18} {'banach max':>12} {'sec':>6}")
    for size in (4, 10, 100, 500, 1000, 1500):
        system = remark4_system(size)
        t = time.perf_counter()
        g = grid_falsify(system, K.ORBITAL_TRIANGULAR, 2 / 3)
        b = grid_falsify(system, K.BANACH, 0.99)
        dt = time.perf_counter() - t
        wit = f"({g.witness[0]:.3g}, {g.witness[1]:.3g})"
        print(f"{size:>6} {system.n:>7} {g.max_ratio:>14.12f} {wit:>18} {b.max_ratio:>12.6g} {dt:>6.2f}")


if __name__ == "__main__":
    main()
