"""Entanglement and collectiveness of the free infinite-temperature model
over (gamma, s_plus) at the fixed times t = 5 and t = 15.

Usage: python3 scripts/tradeoff_grid.py [out.csv]
"""
import os
import sys
import warnings

import numpy as np

from commonbath import csvio
from commonbath.experiments import run_tradeoff
from commonbath.metrics import CPViolationWarning


def main(out="out/tradeoff.csv"):
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    gammas = np.linspace(0.0, 0.1, 41)[1:]
    s_plus = np.linspace(-0.05, 0.05, 41)
    with warnings.catch_warnings():
        # round-off level negative Choi eigenvalues near gamma -> 0
        warnings.simplefilter("ignore", CPViolationWarning)
        cols, rows = run_tradeoff(gammas, s_plus, [5.0, 15.0])
    csvio.write(out, csvio.to_csv(cols, rows))
    print(f"{len(rows)} rows written to {out}")


if __name__ == "__main__":
    main(*sys.argv[1:])
