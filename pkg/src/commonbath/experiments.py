"""Configuration, circuit mapping, scenario runner, parameter sweeps and the
infinite-temperature trade-off generator. Everything here returns plain
tables (header + rows) that :mod:`commonbath.csvio` serialises."""
from __future__ import annotations

import copy
import dataclasses
import json
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bath import BathParams
from .errors import CommonBathError, InvalidCapacitance, InvalidConfig
from .lindblad import (
    P_EXCITED, SIGMA_X, ModelParams, block_decompose, build_liouvillian, build_linf, compute_rates,
)
from .metrics import (
    CPViolationWarning, MeritConfig, MeritReport, coherence_trajectory, collectiveness,
    max_collectiveness, max_negativity, negativity, pearson_series, product_state, psi_syn,
    rho_coherent, singlet, subradiance_measure, synchronization_measure, time_grid,
)
from .spectral import SpectralPropagator, diagonalize, evolve

WORKERS_ENV = "COMMONBATH_WORKERS"
SWEEP_AXES = ("delta_omega", "mu", "beta", "t1", "g1")
MERITS = ("syn", "sub", "neg", "coll")

_E = np.array([1, 0], dtype=complex)
_G = np.array([0, 1], dtype=complex)
NAMED_STATES = {
    "psi_syn": psi_syn,
    "singlet": singlet,
    "rho_c": rho_coherent,
    "ee": lambda: product_state(_E, _E),
    "eg": lambda: product_state(_E, _G),
    "ge": lambda: product_state(_G, _E),
    "gg": lambda: product_state(_G, _G),
}
DEFAULT_STATES = {"syn": "psi_syn", "sub": "singlet", "neg": "rho_c"}


def named_state(name: str) -> np.ndarray:
    try:
        return NAMED_STATES[name]()
    except KeyError:
        raise InvalidConfig(f"unknown state {name!r}; choose from {sorted(NAMED_STATES)}") from None


# --- configuration ------------------------------------------------------------

def _num(x, key):
    """Float from JSON, accepting the strings "inf"/"-inf"."""
    if isinstance(x, str) and x.strip().lower() in ("inf", "+inf", "infinity", "-inf"):
        return float(x)
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InvalidConfig(f"{key} must be a number, got {x!r}")
    return float(x)


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


@dataclass(frozen=True)
class ModelSection:
    omega1: float = 1.0
    omega2: float = 0.99
    g1: float = 1.0
    g2: float = 1.0
    mu: float = 10 ** -1.5
    beta: float = 10.0
    t1: float = 3e5
    omega_c: float = 20.0

    def params(self) -> ModelParams:
        try:
            bath = BathParams(mu=self.mu, omega_c=self.omega_c, beta=self.beta, omega1=self.omega1)
            return ModelParams(self.omega1, self.omega2, self.g1, self.g2, bath, self.t1)
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from exc


@dataclass(frozen=True)
class Axis:
    name: str
    scale: str = "linear"
    min: float = 0.0
    max: float = 1.0
    points: int = 8

    def __post_init__(self):
        if self.name not in SWEEP_AXES:
            raise InvalidConfig(f"sweep axis {self.name!r} not in {SWEEP_AXES}")
        if self.scale not in ("linear", "log10"):
            raise InvalidConfig(f"axis scale must be linear or log10, got {self.scale!r}")
        if int(self.points) != self.points or self.points < 2:
            raise InvalidConfig("axis needs at least 2 points")

    def values(self) -> np.ndarray:
        """Grid values; for log10 axes ``min``/``max`` are exponents."""
        v = np.linspace(self.min, self.max, int(self.points))
        return 10.0 ** v if self.scale == "log10" else v


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis
    merits: tuple = MERITS
    states: dict = field(default_factory=dict)
    g2_complement: bool = False  # g2 = 2 - g1 when sweeping g1

    def __post_init__(self):
        if self.axis1.name == self.axis2.name:
            raise InvalidConfig("sweep axes must reference distinct parameters")
        bad = set(self.merits) - set(MERITS)
        if bad:
            raise InvalidConfig(f"unknown merits {sorted(bad)}")
        for k, v in self.states.items():
            if k not in DEFAULT_STATES:
                raise InvalidConfig(f"initial-state override for unknown merit {k!r}")
            named_state(v)


@dataclass(frozen=True)
class RunConfig:
    model: ModelSection = ModelSection()
    merit: MeritConfig = MeritConfig()
    sweep: SweepSpec | None = None
    output_path: str | None = None
    output_format: str = "csv"

    @property
    def params(self) -> ModelParams:
        return self.model.params()

    def to_dict(self) -> dict:
        m = self.merit
        out = {
            "model": {k: _jsonable(v) for k, v in dataclasses.asdict(self.model).items()},
            "merit": {
                "dominance_factor": m.dominance_factor,
                "pearson_window": m.pearson_window,
                "grid": {"t_min": m.t_min, "t_max": m.t_max, "points": m.grid_points},
            },
            "output": {"path": self.output_path, "format": self.output_format},
        }
        if self.sweep is not None:
            s = self.sweep
            out["sweep"] = {
                "axis1": dataclasses.asdict(s.axis1),
                "axis2": dataclasses.asdict(s.axis2),
                "merits": list(s.merits),
                "states": dict(s.states),
                "g2_complement": s.g2_complement,
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


_MODEL_KEYS = {f.name for f in dataclasses.fields(ModelSection)}


def parse_config(doc: dict | None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from a JSON document and flat flag overrides.

    Override keys are dotted paths such as ``model.mu`` or ``merit.grid.points``.
    """
    doc = copy.deepcopy(doc or {})
    if not isinstance(doc, dict):
        raise InvalidConfig("config must be a JSON object")
    for path, value in (overrides or {}).items():
        if value is None:
            continue
        node = doc
        *head, last = path.split(".")
        for k in head:
            node = node.setdefault(k, {})
            if not isinstance(node, dict):
                raise InvalidConfig(f"{path}: {k} is not an object")
        node[last] = value
    unknown = set(doc) - {"model", "merit", "sweep", "output"}
    if unknown:
        raise InvalidConfig(f"unknown config sections {sorted(unknown)}")

    m = doc.get("model", {})
    bad = set(m) - _MODEL_KEYS
    if bad:
        raise InvalidConfig(f"unknown model keys {sorted(bad)}")
    model = ModelSection(**{k: _num(v, f"model.{k}") for k, v in m.items()})
    model.params()  # validate early

    mc = doc.get("merit", {})
    grid = mc.get("grid", {})
    try:
        merit = MeritConfig(
            dominance_factor=_num(mc.get("dominance_factor", 100.0), "merit.dominance_factor"),
            pearson_window=_num(mc.get("pearson_window", 7.0), "merit.pearson_window"),
            t_min=_num(grid.get("t_min", 1e-2), "merit.grid.t_min"),
            t_max=None if grid.get("t_max") is None else _num(grid["t_max"], "merit.grid.t_max"),
            grid_points=int(_num(grid.get("points", 2000), "merit.grid.points")),
        )
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from exc

    sweep = None
    if doc.get("sweep"):
        s = doc["sweep"]
        try:
            axes = []
            for key in ("axis1", "axis2"):
                a = s[key]
                axes.append(Axis(a["name"], a.get("scale", "linear"), _num(a["min"], f"{key}.min"),
                                 _num(a["max"], f"{key}.max"), int(_num(a["points"], f"{key}.points"))))
        except (KeyError, TypeError) as exc:
            raise InvalidConfig(f"sweep axis incomplete: {exc}") from exc
        sweep = SweepSpec(axes[0], axes[1], tuple(s.get("merits", MERITS)),
                          dict(s.get("states", {})), bool(s.get("g2_complement", False)))

    out = doc.get("output", {})
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise InvalidConfig(f"output format must be csv or json, got {fmt!r}")
    return RunConfig(model, merit, sweep, out.get("path"), fmt)


def load_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    doc = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
    return parse_config(doc, overrides)


# --- circuit mapping ----------------------------------------------------------

@dataclass(frozen=True)
class CircuitSpec:
    c1: float
    c2: float
    cl: float
    cr: float

    def __post_init__(self):
        for k in ("c1", "c2", "cl", "cr"):
            v = getattr(self, k)
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise InvalidCapacitance(f"{k} must be a positive finite capacitance, got {v!r}")


def map_circuit(c: CircuitSpec) -> tuple[float, float]:
    """Dissipative weights (g1, g2) of the two qubits for a capacitive coupling network."""
    tot = c.cl + c.cr
    g1 = c.cl * (c.c1 + c.c2) / ((c.cl + c.c1) * tot)
    g2 = c.cr * (c.c1 + c.c2) / ((c.cr + c.c2) * tot)
    return g1, g2


# --- single-point merits ------------------------------------------------------

NAN = float("nan")


def evaluate_point(p: ModelParams, cfg: MeritConfig, merits=MERITS, states=None):
    """MeritReport plus slow-eigenvalue diagnostics for one parameter set."""
    states = {**DEFAULT_STATES, **(states or {})}
    L = build_liouvillian(compute_rates(p), p)
    spectra = diagonalize(block_decompose(L))
    syn = t_s = sub = t_b = neg = t_n = coll = t_c = NAN
    if "syn" in merits:
        t_s, syn = synchronization_measure(named_state(states["syn"]), spectra[1], cfg)
    if "sub" in merits:
        t_b, sub = subradiance_measure(named_state(states["sub"]), spectra[0], cfg)
    if "neg" in merits:
        t_n, neg = max_negativity(named_state(states["neg"]), L, cfg, p.t1_local, spectra)
    if "coll" in merits:
        t_c, coll = max_collectiveness(L, cfg, p.t1_local, spectra)
    s0, s1 = spectra[0], spectra[1]
    diag = {
        "lam0_slow": s0.eigenvalues[s0.decaying[0]],
        "lam1_slow": s1.eigenvalues[0],
    }
    return MeritReport(syn, t_s, sub, t_b, neg, t_n, coll, t_c), diag


# --- scenario -------------------------------------------------------------------

@dataclass
class ScenarioResult:
    report: MeritReport
    t_pearson: float
    tables: dict  # name -> (columns, rows)


def _stays_above(starts, values, level):
    """First start after which |value| stays above ``level``; inf if never."""
    bad = np.flatnonzero(np.abs(values) <= level)
    if len(bad) == 0:
        return float(starts[0])
    if bad[-1] == len(values) - 1:
        return math.inf
    return float(starts[bad[-1] + 1])


def run_scenario(cfg: RunConfig | None = None, dt: float = 0.05, t_obs: float = 1500.0,
                 pearson_step: float = 1.0) -> ScenarioResult:
    """Figures of merit and trajectories for one parameter set (defaults: the
    two-transmon design with dw = 0.01, mu = 10^-1.5, beta = 10, T1 = 3e5)."""
    cfg = cfg or RunConfig()
    p, mc = cfg.params, cfg.merit
    L = build_liouvillian(compute_rates(p), p)
    spectra = diagonalize(block_decompose(L))
    t_s, syn = synchronization_measure(psi_syn(), spectra[1], mc)
    t_b, sub = subradiance_measure(singlet(), spectra[0], mc)
    t_n, neg = max_negativity(rho_coherent(), L, mc, p.t1_local, spectra)
    t_c, coll = max_collectiveness(L, mc, p.t1_local, spectra)
    report = MeritReport(syn, t_s, sub, t_b, neg, t_n, coll, t_c)

    t = np.arange(0.0, t_obs + dt / 2, dt)
    rho_x = evolve(psi_syn(), t, spectra)
    rho_p = evolve(singlet(), t, spectra)
    sx = [np.einsum("ij,tji->t", op, rho_x).real for op in SIGMA_X]
    pe = [np.einsum("ij,tji->t", op, rho_p).real for op in P_EXCITED]
    obs = [[a, b, c, d, e] for a, b, c, d, e in zip(t, *sx, *pe)]

    # Pearson windows are sampled finely enough for Simpson on the qubit period
    w = mc.pearson_window
    fine = np.arange(0.0, t_obs + w + 0.005, 0.01)
    sig = coherence_trajectory(psi_syn(), spectra[1]).evaluate(fine)
    starts = np.arange(0.0, t_obs + pearson_step / 2, pearson_step)
    c = pearson_series(fine, sig[:, 0], sig[:, 1], w, starts)
    t_p = _stays_above(starts, c, 0.99)

    grid = time_grid(spectra, mc, p.t1_local)
    negs = negativity(evolve(rho_coherent(), grid, spectra))
    colls = collectiveness(SpectralPropagator(spectra)(grid))
    tables = {
        "observables": (["t", "sx1", "sx2", "pe1", "pe2"], obs),
        "pearson": (["t", "pearson"], [[a, b] for a, b in zip(starts, c)]),
        "entanglement": (["t", "negativity", "collectiveness"],
                         [[a, b, d] for a, b, d in zip(grid, negs, colls)]),
    }
    return ScenarioResult(report, t_p, tables)


# --- sweeps -----------------------------------------------------------------------

SWEEP_COLUMNS = [
    "axis1", "axis2", "syn", "t_sync", "sub", "t_sub", "neg_max", "t_neg_max",
    "coll_max", "t_coll_max", "lam0_slow_re", "lam0_slow_im", "lam1_slow_re",
    "lam1_slow_im", "cp_violation", "error",
]


def _apply(model: ModelSection, name: str, value: float, g2_complement: bool) -> ModelSection:
    if name == "delta_omega":
        return dataclasses.replace(model, omega2=model.omega1 - value)
    if name == "g1" and g2_complement:
        return dataclasses.replace(model, g1=value, g2=2.0 - value)
    return dataclasses.replace(model, **{name: value})


def _sweep_point(args):
    model, mc, spec, v1, v2 = args
    row = [v1, v2]
    try:
        m = _apply(_apply(model, spec.axis1.name, v1, spec.g2_complement),
                   spec.axis2.name, v2, spec.g2_complement)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", CPViolationWarning)
            rep, diag = evaluate_point(m.params(), mc, spec.merits, spec.states)
        d = rep.as_dict()
        row += [d[k] for k in SWEEP_COLUMNS[2:10]]
        row += [diag["lam0_slow"].real, diag["lam0_slow"].imag,
                diag["lam1_slow"].real, diag["lam1_slow"].imag,
                any(issubclass(w.category, CPViolationWarning) for w in caught), ""]
    except (CommonBathError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        row += [NAN] * 12 + ["", f"{type(exc).__name__}: {exc}"]
    return row


def worker_count(requested: int | None = None) -> int:
    if requested is None:
        env = os.environ.get(WORKERS_ENV)
        if env:
            try:
                requested = int(env)
            except ValueError:
                raise InvalidConfig(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
        else:
            requested = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count()
    return max(1, int(requested or 1))


def run_sweep(cfg: RunConfig, workers: int | None = None):
    """Rows over the axis1 x axis2 grid, axis1-major. Failed points carry an error string."""
    spec = cfg.sweep
    if spec is None:
        raise InvalidConfig("sweep section missing")
    tasks = [(cfg.model, cfg.merit, spec, float(a), float(b))
             for a in spec.axis1.values() for b in spec.axis2.values()]
    n = worker_count(workers)
    if n == 1 or len(tasks) == 1:
        rows = [_sweep_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(_sweep_point, tasks, chunksize=max(1, len(tasks) // (4 * n))))
    return SWEEP_COLUMNS, rows


# --- infinite-temperature trade-off ---------------------------------------------

TRADEOFF_COLUMNS = ["gamma", "s_plus", "t", "negativity", "collectiveness", "error"]


def run_tradeoff(gammas, s_pluses, times, omega: float = 1.0):
    """Negativity of rho_C and collectiveness of exp(L t) for the free-parameter
    infinite-temperature generator over a (gamma, s_plus, t) grid."""
    times = np.asarray(times, dtype=float)
    rows = []
    rho0 = rho_coherent()
    for g in gammas:
        for s in s_pluses:
            try:
                spectra = diagonalize(block_decompose(build_linf(omega, float(g), float(s))))
                negs = negativity(evolve(rho0, times, spectra))
                colls = collectiveness(SpectralPropagator(spectra)(times))
                for t, n, c in zip(times, negs, colls):
                    rows.append([float(g), float(s), float(t), float(n), float(c), ""])
            except (CommonBathError, ValueError, np.linalg.LinAlgError) as exc:
                for t in times:
                    rows.append([float(g), float(s), float(t), NAN, NAN, f"{type(exc).__name__}: {exc}"])
    return TRADEOFF_COLUMNS, rows
