#!/usr/bin/env python3
"""Cross-validate the grid Laplacian against the Bessel-zero spectrum of
the unit disk, and show the O(h^2) trend of the relative error in the
ground state across a sequence of refinements.
"""

import argparse

import numpy as np

from weylcheck.discretization import assemble_dirichlet_laplacian
from weylcheck.eigensolve import lowest_k
from weylcheck.geometry import DomainSpec, rasterize
from weylcheck.oracles import disk_spectrum


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=6)
    ap.add_argument("--levels", type=int, default=3,
                    help="refinements h = 1/32, 1/64, ...")
    args = ap.parse_args()

    oracle = disk_spectrum(1.0, 60.0).values[: args.k]
    print("Bessel oracle:", np.array2string(oracle, precision=6))

    for level in range(args.levels):
        h = 1.0 / (32 << level)
        mask = rasterize(DomainSpec.disk(1.0), h)
        w = lowest_k(assemble_dirichlet_laplacian(mask), args.k).values
        rel = np.abs(w - oracle) / oracle
        print(f"h = 1/{32 << level:<4d} grid: "
              f"{np.array2string(w, precision=6)}  "
              f"max rel err {rel.max():.2e}")


if __name__ == "__main__":
    main()
