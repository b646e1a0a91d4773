"""Cavity magnetization of the random-graph ferromagnet.

Sweeps the coupling for a few connectivities and prints where the ordered
solution switches on. The onset should sit at atanh(1/(z-1)); at z=2 there
is no transition at any finite coupling.
"""
import math

import numpy as np

from cavitykit import bethe


def main():
    grid = np.arange(0.05, 1.55, 0.05)
    print(f"{'betaJ':>6}" + "".join(f"  m(z={z})" for z in (2, 3, 4)))
    for bj in grid:
        row = [f"{bj:>6.2f}"]
        for z in (2, 3, 4):
            p = bethe.BetheParams(float(bj), 1.0, z)
            r = bethe.cavity_fixed_point(p)
            row.append(f"{bethe.full_magnetization(p, r.value):>8.4f}")
        print("".join(row))

    print()
    for z in (3, 4, 5):
        found = bethe.first_unstable_beta_j(z)
        exact = math.atanh(1.0 / (z - 1))
        print(f"z={z}: onset at betaJ = {found:.5f}   "
              f"atanh(1/(z-1)) = {exact:.5f}")


if __name__ == "__main__":
    main()
