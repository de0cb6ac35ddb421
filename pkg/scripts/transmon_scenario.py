"""Figures of merit and trajectories for the two-transmon design point.

Usage: python3 scripts/transmon_scenario.py [outdir]
"""
import os
import sys
import warnings

from commonbath import csvio
from commonbath.experiments import RunConfig, run_scenario
from commonbath.metrics import CPViolationWarning


def main(outdir="out/transmon"):
    os.makedirs(outdir, exist_ok=True)
    cfg = RunConfig()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CPViolationWarning)
        res = run_scenario(cfg)
    for name, (cols, rows) in res.tables.items():
        csvio.write(os.path.join(outdir, f"{name}.csv"), csvio.to_csv(cols, rows, cfg.to_json()))
    rep = res.report
    print(f"Syn  = {rep.syn:9.2f}   t_S = {rep.t_sync:9.1f}")
    print(f"Sub  = {rep.sub:9.2f}   t_B = {rep.t_sub:9.1f}")
    print(f"N_M  = {rep.neg_max:9.4f}   at t = {rep.t_neg_max:.2f}")
    print(f"I_M  = {rep.coll_max:9.4f}   at t = {rep.t_coll_max:.2f}")
    print(f"|C| > 0.99 from t = {res.t_pearson:.0f}")


if __name__ == "__main__":
    main(*sys.argv[1:])
