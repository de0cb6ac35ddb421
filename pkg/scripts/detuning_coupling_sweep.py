"""Detuning x coupling-strength map of all four merits (balanced qubits, beta = 10).

Usage: python3 scripts/detuning_coupling_sweep.py [points] [out.csv]
Worker count follows COMMONBATH_WORKERS (default: all cores).
"""
import os
import sys

from commonbath import csvio
from commonbath.experiments import parse_config, run_sweep


def main(points="20", out="out/detuning_coupling.csv"):
    n = int(points)
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    cfg = parse_config({
        "model": {"beta": 10.0, "t1": 3e5, "g1": 1.0, "g2": 1.0},
        "merit": {"grid": {"points": 1000}},
        "sweep": {
            "axis1": {"name": "delta_omega", "scale": "linear", "min": 0.0, "max": 0.02, "points": n},
            "axis2": {"name": "mu", "scale": "log10", "min": -3.0, "max": -1.0, "points": n},
        },
    })
    cols, rows = run_sweep(cfg)
    csvio.write(out, csvio.to_csv(cols, rows, cfg.to_json()))
    bad = sum(1 for r in rows if r[-1])
    print(f"{len(rows)} points written to {out} ({bad} failed)")


if __name__ == "__main__":
    main(*sys.argv[1:])
