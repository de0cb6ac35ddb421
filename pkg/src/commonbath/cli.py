"""Command-line entry point: ``commonbath <subcommand> [options]``.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import csvio
from .errors import (
    CommonBathError, InvalidCapacitance, InvalidConfig, NonDiagonalizable, QuadratureFailure,
)
from .experiments import (
    CircuitSpec, evaluate_point, load_config, map_circuit, named_state, run_scenario,
    run_sweep, run_tradeoff,
)
from .lindblad import P_EXCITED, SIGMA_X, block_decompose, build_liouvillian, compute_rates
from .metrics import CPViolationWarning, negativity
from .spectral import diagonalize, evolve

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

# flag -> dotted config key
MODEL_FLAGS = {
    "omega1": "model.omega1", "omega2": "model.omega2", "g1": "model.g1", "g2": "model.g2",
    "mu": "model.mu", "beta": "model.beta", "t1": "model.t1", "omega_c": "model.omega_c",
    "dominance_factor": "merit.dominance_factor", "pearson_window": "merit.pearson_window",
    "t_min": "merit.grid.t_min", "t_max": "merit.grid.t_max", "points": "merit.grid.points",
    "output": "output.path", "format": "output.format",
}


class ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def _float(s: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None


def _axis(s: str) -> dict:
    """name:scale:min:max:points"""
    parts = s.split(":")
    if len(parts) != 5:
        raise argparse.ArgumentTypeError("axis must be name:scale:min:max:points")
    name, scale, lo, hi, n = parts
    return {"name": name, "scale": scale, "min": _float(lo), "max": _float(hi), "points": int(n)}


def _grid(s: str) -> np.ndarray:
    """Comma list of values, or start:stop:num for a linear grid."""
    if ":" in s:
        a, b, n = s.split(":")
        return np.linspace(_float(a), _float(b), int(n))
    return np.array([_float(x) for x in s.split(",")])


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON configuration document")
    for flag in ("omega1", "omega2", "g1", "g2", "mu", "beta", "t1", "omega_c",
                 "dominance_factor", "pearson_window", "t_min", "t_max"):
        common.add_argument("--" + flag.replace("_", "-"), dest=flag, type=_float)
    common.add_argument("--delta-omega", type=_float, help="sets omega2 = omega1 - delta_omega")
    common.add_argument("--points", type=int, help="time-grid points for the sup searches")
    common.add_argument("--output", "-o", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))

    ap = _Parser(prog="commonbath", description="Two qubits in a common Ohmic bath.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("rates", parents=[common], help="rate and Lamb-shift coefficients")
    sub.add_parser("spectrum", parents=[common], help="block eigenvalues")
    ev = sub.add_parser("evolve", parents=[common], help="observables along a trajectory")
    ev.add_argument("--state", default="psi_syn", help="initial state name")
    ev.add_argument("--times", type=_grid, default=_grid("0:100:101"))
    sub.add_parser("merits", parents=[common], help="Syn, Sub, N_M and I_M for one point")
    sw = sub.add_parser("sweep", parents=[common], help="two-parameter grid of merits")
    sw.add_argument("--axis1", type=_axis)
    sw.add_argument("--axis2", type=_axis)
    sw.add_argument("--merits", help="comma list from syn,sub,neg,coll")
    sw.add_argument("--g2-complement", action="store_true", default=None)
    sw.add_argument("--workers", type=int)
    sc = sub.add_parser("scenario", parents=[common], help="merits plus trajectory files")
    sc.add_argument("--outdir", default=".", help="directory for the trajectory CSVs")
    ci = sub.add_parser("circuit", help="dissipative weights from capacitances")
    for c in ("c1", "c2", "cl", "cr"):
        ci.add_argument("--" + c, type=_float, required=True)
    ci.add_argument("--output", "-o")
    tr = sub.add_parser("tradeoff", help="negativity and collectiveness of the free infinite-T model")
    tr.add_argument("--gamma", type=_grid, default=_grid("0.01:0.2:20"))
    tr.add_argument("--s-plus", type=_grid, default=_grid("-0.02"))
    tr.add_argument("--t", type=_grid, default=_grid("5,15"))
    tr.add_argument("--omega", type=_float, default=1.0)
    tr.add_argument("--output", "-o")
    tr.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_parser("verify", help="run the oracle suite")
    return ap


def _overrides(ns) -> dict:
    out = {key: getattr(ns, flag, None) for flag, key in MODEL_FLAGS.items()}
    if ns.command == "sweep":
        out["sweep.axis1"] = ns.axis1
        out["sweep.axis2"] = ns.axis2
        if ns.merits:
            out["sweep.merits"] = ns.merits.split(",")
        out["sweep.g2_complement"] = ns.g2_complement
    return out


def _config(ns):
    ov = _overrides(ns)
    if ns.delta_omega is not None:
        # omega1 may itself come from the config file, so resolve it first
        w1 = load_config(ns.config, ov).model.omega1
        ov["model.omega2"] = w1 - ns.delta_omega
    return load_config(ns.config, ov)


def _emit(cfg, columns, rows, path=None, fmt=None):
    path = path if path is not None else cfg.output_path
    fmt = fmt or cfg.output_format
    if fmt == "json":
        text = csvio.to_json(columns, rows, cfg.to_dict())
    else:
        text = csvio.to_csv(columns, rows, cfg.to_json())
    csvio.write(path, text)


def cmd_rates(ns):
    cfg = _config(ns)
    r = compute_rates(cfg.params)
    rows = []
    for j in range(2):
        for k in range(2):
            vals = [r.gamma_down[j, k], r.gamma_up[j, k], r.s_down[j, k], r.s_up[j, k]]
            rows.append([j + 1, k + 1] + [x for v in vals for x in (v.real, v.imag)])
    cols = ["j", "k", "gamma_down_re", "gamma_down_im", "gamma_up_re", "gamma_up_im",
            "s_down_re", "s_down_im", "s_up_re", "s_up_im"]
    _emit(cfg, cols, rows)


def cmd_spectrum(ns):
    cfg = _config(ns)
    p = cfg.params
    spectra = diagonalize(block_decompose(build_liouvillian(compute_rates(p), p)))
    rows = []
    for d, s in sorted(spectra.items()):
        for j, lam in enumerate(s.eigenvalues):
            rows.append([d, j, lam.real, lam.imag, bool(s.steady[j])])
    _emit(cfg, ["block", "index", "re", "im", "steady"], rows)


def cmd_evolve(ns):
    cfg = _config(ns)
    p = cfg.params
    spectra = diagonalize(block_decompose(build_liouvillian(compute_rates(p), p)))
    t = np.asarray(ns.times, dtype=float)
    rho = evolve(named_state(ns.state), t, spectra)
    ops = list(SIGMA_X) + list(P_EXCITED)
    vals = [np.einsum("ij,tji->t", op, rho).real for op in ops]
    negs = negativity(rho)
    tr = np.einsum("tii->t", rho).real
    rows = [list(r) for r in zip(t, *vals, negs, tr)]
    _emit(cfg, ["t", "sx1", "sx2", "pe1", "pe2", "negativity", "trace"], rows)


def cmd_merits(ns):
    cfg = _config(ns)
    rep, diag = evaluate_point(cfg.params, cfg.merit)
    d = rep.as_dict()
    cols = list(d) + ["lam0_slow_re", "lam0_slow_im", "lam1_slow_re", "lam1_slow_im"]
    row = list(d.values()) + [diag["lam0_slow"].real, diag["lam0_slow"].imag,
                              diag["lam1_slow"].real, diag["lam1_slow"].imag]
    _emit(cfg, cols, [row])


def cmd_sweep(ns):
    cfg = _config(ns)
    if cfg.sweep is None:
        raise InvalidConfig("sweep needs axis1 and axis2 (flags or config)")
    cols, rows = run_sweep(cfg, ns.workers)
    _emit(cfg, cols, rows)


def cmd_scenario(ns):
    cfg = _config(ns)
    res = run_scenario(cfg)
    os.makedirs(ns.outdir, exist_ok=True)
    for name, (cols, rows) in res.tables.items():
        csvio.write(os.path.join(ns.outdir, f"scenario_{name}.csv"),
                    csvio.to_csv(cols, rows, cfg.to_json()))
    d = res.report.as_dict()
    d["t_pearson"] = res.t_pearson
    _emit(cfg, list(d), [list(d.values())])


def cmd_circuit(ns):
    g1, g2 = map_circuit(CircuitSpec(ns.c1, ns.c2, ns.cl, ns.cr))
    csvio.write(ns.output, csvio.to_csv(["c1", "c2", "cl", "cr", "g1", "g2"],
                                        [[ns.c1, ns.c2, ns.cl, ns.cr, g1, g2]]))


def cmd_tradeoff(ns):
    cols, rows = run_tradeoff(ns.gamma, ns.s_plus, ns.t, ns.omega)
    echo = {"gamma": list(map(float, ns.gamma)), "s_plus": list(map(float, ns.s_plus)),
            "t": list(map(float, ns.t)), "omega": ns.omega}
    if ns.format == "json":
        text = csvio.to_json(cols, rows, echo)
    else:
        text = csvio.to_csv(cols, rows, json.dumps(echo, sort_keys=True, separators=(",", ":")))
    csvio.write(ns.output, text)


def cmd_verify(ns):
    from .verify import run_all
    ok = True
    for name, value, tol, passed in run_all():
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {value:.3g} (tol {tol:g})")
    return EXIT_OK if ok else EXIT_NUMERIC


COMMANDS = {
    "rates": cmd_rates, "spectrum": cmd_spectrum, "evolve": cmd_evolve, "merits": cmd_merits,
    "sweep": cmd_sweep, "scenario": cmd_scenario, "circuit": cmd_circuit,
    "tradeoff": cmd_tradeoff, "verify": cmd_verify,
}


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", CPViolationWarning)
            code = COMMANDS[ns.command](ns)
        cp = [w for w in caught if issubclass(w.category, CPViolationWarning)]
        for w in caught:
            if w not in cp:
                warnings.showwarning(w.message, w.category, w.filename, w.lineno)
        if cp:
            print(f"warning: {len(cp)} Choi matrices with negative eigenvalues "
                  f"(map not completely positive); first: {cp[0].message}", file=sys.stderr)
    except (InvalidConfig, InvalidCapacitance, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonDiagonalizable, QuadratureFailure, CommonBathError, ArithmeticError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
