#!/usr/bin/env python3
"""Tangent-space dimensions of the constraint variety across families.

Generic points at d = 2, chi = 2 reproduce the counting formula
2(d-1) chi^4 + chi^2 = 36; an injective d = 16 instance gives 484; the
permutation-phase family sits on a larger stratum.  The script reports the
measured dimension, the formula value, and the singular-gap audit per seed.
"""

import argparse

import numpy as np

from dipeps import families, geometry


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=10)
    args = ap.parse_args()

    print(f"{'family':>24}  {'seed':>4}  {'tangent':>7}  {'formula':>7}  {'gap':>9}")
    for seed in range(args.seeds):
        rep = geometry.tangent_dimension(families.random_di(2, 2, seed))
        print(f"{'controlled-dual (2,2)':>24}  {seed:>4}  {rep.tangent_dim:>7}"
              f"  {rep.formula_dim:>7}  {rep.gap_ratio:>9.1e}")
    rep = geometry.tangent_dimension(families.random_di(16, 2, 0))
    print(f"{'controlled-dual (16,2)':>24}  {0:>4}  {rep.tangent_dim:>7}"
          f"  {rep.formula_dim:>7}  {rep.gap_ratio:>9.1e}")
    for seed in range(3):
        rng = np.random.default_rng(seed)
        T = families.permutation_phase(2, np.exp(1j * rng.uniform(0, 2 * np.pi, 8)))
        rep = geometry.tangent_dimension(T)
        print(f"{'permutation-phase (2,2)':>24}  {seed:>4}  {rep.tangent_dim:>7}"
              f"  {rep.formula_dim:>7}  {rep.gap_ratio:>9.1e}")


if __name__ == "__main__":
    main()
