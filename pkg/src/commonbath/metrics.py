"""Figures of merit: synchronization, subradiance, negativity, collectiveness."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DegenerateWindow, NoSlowMode
from .lindblad import (
    P_EXCITED, SIGMA_X, ModelParams, RateSet, Superoperator,
    block_decompose, build_pt_liouvillian, partial_transpose,
)
from .spectral import BlockSpectrum, SpectralPropagator, diagonalize, evolve, mode_weights

LOG2 = math.log(2.0)
ENTROPY_CLAMP = 1e-14
CP_TOL = 1e-10
TIE_REL = 1e-9


class CPViolationWarning(UserWarning):
    """A Choi matrix had eigenvalues below -1e-10 (generator not completely positive)."""


# --- initial states -------------------------------------------------------

KET_E = np.array([1.0, 0.0], dtype=complex)
KET_G = np.array([0.0, 1.0], dtype=complex)


def product_state(psi, phi) -> np.ndarray:
    v = np.kron(np.asarray(psi, dtype=complex), np.asarray(phi, dtype=complex))
    return np.outer(v, v.conj())


def psi_syn() -> np.ndarray:
    """Asymmetric coherent product state used for the synchronization measure."""
    a = math.cos(math.pi / 4) * KET_E + math.sin(math.pi / 4) * KET_G
    b = math.cos(math.pi / 3) * KET_E + 1j * math.sin(math.pi / 3) * KET_G
    return product_state(a, b)


def singlet() -> np.ndarray:
    v = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
    return np.outer(v, v.conj())


def rho_coherent() -> np.ndarray:
    """Maximally coherent state, all entries 1/4."""
    return np.full((4, 4), 0.25, dtype=complex)


# --- configuration and results ----------------------------------------------

@dataclass(frozen=True)
class MeritConfig:
    dominance_factor: float = 100.0
    pearson_window: float = 7.0
    t_min: float = 1e-2
    t_max: float | None = None  # None: 10 * max(T1, slowest decay time)
    grid_points: int = 2000
    refine_rounds: int = 3
    amplitude_floor: float = 1e-12

    def __post_init__(self):
        if not self.dominance_factor > 1:
            raise ValueError("dominance_factor must exceed 1")
        if self.grid_points < 3:
            raise ValueError("time grid needs at least 3 points")
        if not self.pearson_window > 0:
            raise ValueError("pearson_window must be positive")


@dataclass(frozen=True)
class MeritReport:
    syn: float
    t_sync: float
    sub: float
    t_sub: float
    neg_max: float
    t_neg_max: float
    coll_max: float
    t_coll_max: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class TrajectoryModes:
    """Mode expansion  sum_j amp[j,k] exp(decay_j t) cos(freq_j t + phase[j,k]).

    Each entry is one real component of the signal: a complex-conjugate pair
    of eigenvalues is merged into a single entry. ``amplitudes`` are the
    component amplitudes (2|p c| for coherences, |p h| or 2|p h| for
    populations) and ``mode_index`` points back into the block spectrum.
    """

    eigenvalues: np.ndarray
    amplitudes: np.ndarray
    phases: np.ndarray
    mode_index: np.ndarray

    @property
    def decay(self):
        return self.eigenvalues.real

    @property
    def frequency(self):
        return self.eigenvalues.imag

    def evaluate(self, t) -> np.ndarray:
        """Pointwise signal, shape (len(t), 2)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        env = np.exp(np.outer(t, self.decay))
        out = np.empty((t.size, 2))
        for k in range(2):
            osc = np.cos(np.outer(t, self.frequency) + self.phases[:, k])
            out[:, k] = (env * osc) @ self.amplitudes[:, k]
        return out


def _conjugate_pairs(lam, tol):
    """Group mode indices into real modes (singletons) and conjugate pairs."""
    groups, used = [], set()
    for j in range(len(lam)):
        if j in used:
            continue
        used.add(j)
        if abs(lam[j].imag) > tol:
            for i in range(len(lam)):
                if i not in used and abs(lam[i] - np.conj(lam[j])) < tol:
                    used.add(i)
                    groups.append((j, i))
                    break
            else:
                groups.append((j,))
        else:
            groups.append((j,))
    return groups


def _modes(spec: BlockSpectrum, rho0, observables, conjugate_block: bool) -> TrajectoryModes:
    p = mode_weights(rho0, spec)
    coeff = np.empty((len(spec), 2), dtype=complex)
    for j in range(len(spec)):
        tau = spec.operator(j)
        for k, obs in enumerate(observables):
            coeff[j, k] = p[j] * np.trace(obs @ tau)
    lam = spec.eigenvalues
    if conjugate_block:
        # the d=-1 block supplies the complex conjugate of every term
        groups = [(j,) for j in range(len(lam))]
        factor = np.full(len(lam), 2.0)
    else:
        tol = 1e-9 * max(1.0, float(np.abs(lam).max()))
        groups = _conjugate_pairs(lam, tol)
        factor = np.array([2.0 if len(g) == 2 else 1.0 for g in groups])
    rep = np.array([g[0] for g in groups], dtype=int)
    c = coeff[rep]
    eig = lam[rep].copy()
    if not conjugate_block:
        # real modes of a Hermitian signal: drop round-off imaginary parts
        single = np.array([len(g) == 1 for g in groups])
        eig[single] = eig[single].real
        c[single] = c[single].real
    return TrajectoryModes(eig, factor[:, None] * np.abs(c), np.angle(c), rep)


def coherence_trajectory(rho0, spectrum_block1: BlockSpectrum) -> TrajectoryModes:
    """<sigma_k^x(t)> from block d=1; the d=-1 block contributes the complex conjugate."""
    return _modes(spectrum_block1, rho0, SIGMA_X, conjugate_block=True)


def population_trajectory(rho0, spectrum_block0: BlockSpectrum) -> TrajectoryModes:
    """<P_k^e(t)> from block d=0, conjugate eigenvalue pairs merged."""
    return _modes(spectrum_block0, rho0, P_EXCITED, conjugate_block=False)


# --- synchronization / subradiance -----------------------------------------

def dominance_time(weights, eigenvalues, slow: int, others, factor: float = 100.0,
                   floor: float = 1e-12) -> float:
    """Time after which mode ``slow`` exceeds every other mode by ``factor`` in both signals.

    Modes whose weight is below ``floor`` are treated as absent. Raises
    NoSlowMode if the slow mode is absent from both signals.
    """
    weights = np.asarray(weights)
    re = np.asarray(eigenvalues).real
    valid_k = [k for k in range(weights.shape[1]) if weights[slow, k] >= floor]
    if not valid_k:
        raise NoSlowMode("slowest mode has vanishing weight in both observables")
    t = -math.inf
    for k in valid_k:
        for j in others:
            if j == slow or weights[j, k] < floor:
                continue
            gap = re[slow] - re[j]
            ratio = math.log(factor * weights[j, k] / weights[slow, k])
            if gap <= 0:
                return math.inf
            t = max(t, ratio / gap)
    # the slow mode already dominates at t = 0
    return max(t, 0.0)


def _measure(t_dom: float, slow_rate: float, factor: float) -> float:
    if math.isinf(t_dom):
        return 0.0
    if t_dom == 0.0 or slow_rate == 0.0:
        return math.inf
    return abs(math.log(factor) / (t_dom * slow_rate))


def _tied(a: float, b: float) -> bool:
    return abs(a - b) <= TIE_REL * max(abs(a), abs(b))


def synchronization_measure(rho0, spectrum_block1: BlockSpectrum, cfg: MeritConfig = MeritConfig()):
    """(t_S, Syn) from the block d=1 spectrum; ``rho0=None`` selects psi_syn."""
    if rho0 is None:
        rho0 = psi_syn()
    modes = coherence_trajectory(rho0, spectrum_block1)
    lam = modes.eigenvalues
    # modes are sorted by ascending |Re|, so index 0 is the slowest
    if len(lam) > 1 and _tied(lam[0].real, lam[1].real):
        return math.inf, 0.0
    t_s = dominance_time(modes.amplitudes, lam, 0, range(1, len(lam)),
                         cfg.dominance_factor, cfg.amplitude_floor)
    return t_s, _measure(t_s, lam[0].real, cfg.dominance_factor)


def subradiance_measure(rho0, spectrum_block0: BlockSpectrum, cfg: MeritConfig = MeritConfig()):
    """(t_B, Sub) from the block d=0 spectrum; ``rho0=None`` selects the singlet.

    The steady mode is excluded; a second non-decaying mode (decoherence-free
    subspace) gives Sub = inf.
    """
    if rho0 is None:
        rho0 = singlet()
    if spectrum_block0.steady.sum() > 1:
        return 0.0, math.inf
    modes = population_trajectory(rho0, spectrum_block0)
    decaying = [i for i, j in enumerate(modes.mode_index) if not spectrum_block0.steady[j]]
    lam = modes.eigenvalues
    slow, others = decaying[0], decaying[1:]
    if others and _tied(lam[slow].real, lam[others[0]].real):
        return math.inf, 0.0
    t_b = dominance_time(modes.amplitudes, lam, slow, others,
                         cfg.dominance_factor, cfg.amplitude_floor)
    return t_b, _measure(t_b, lam[slow].real, cfg.dominance_factor)


# --- Pearson coefficient ------------------------------------------------------

def pearson(traj1, traj2, t, window: float) -> float:
    """Windowed Pearson coefficient of two sampled signals over [t[0], t[0] + window]."""
    if not window > 0:
        raise ValueError("window must be positive")
    t = np.asarray(t, dtype=float)
    mask = t <= t[0] + window * (1 + 1e-12)
    tt = t[mask]
    x = np.asarray(traj1, dtype=float)[mask]
    y = np.asarray(traj2, dtype=float)[mask]
    span = tt[-1] - tt[0]
    if span <= 0:
        raise DegenerateWindow("window contains fewer than two samples")
    dx = x - integrate.simpson(x, x=tt) / span
    dy = y - integrate.simpson(y, x=tt) / span
    vx = integrate.simpson(dx * dx, x=tt)
    vy = integrate.simpson(dy * dy, x=tt)
    if vx <= 1e-300 or vy <= 1e-300:
        raise DegenerateWindow("signal has zero variance in the window")
    c = integrate.simpson(dx * dy, x=tt) / math.sqrt(vx * vy)
    return float(np.clip(c, -1.0, 1.0))


def pearson_series(t, s1, s2, window: float, starts) -> np.ndarray:
    """Pearson coefficient for each window start in ``starts`` (sampled on ``t``)."""
    t = np.asarray(t)
    out = np.empty(len(starts))
    for i, t0 in enumerate(starts):
        lo = np.searchsorted(t, t0 - 1e-12)
        hi = np.searchsorted(t, t0 + window + 1e-9, side="right")
        out[i] = pearson(s1[lo:hi], s2[lo:hi], t[lo:hi], window)
    return out


# --- entanglement -----------------------------------------------------------

def negativity(rho) -> float | np.ndarray:
    """Sum of |negative eigenvalues| of the partial transpose on qubit 2.

    Accepts a single 4x4 state or a stack of shape (n, 4, 4).
    """
    rho = np.asarray(rho)
    pt = rho.reshape(-1, 2, 2, 2, 2).transpose(0, 1, 4, 3, 2).reshape(-1, 4, 4)
    pt = 0.5 * (pt + pt.conj().transpose(0, 2, 1))
    ev = np.linalg.eigvalsh(pt)
    out = -np.where(ev < 0, ev, 0.0).sum(axis=1)
    return float(out[0]) if rho.ndim == 2 else out


def time_grid(spectra: dict, cfg: MeritConfig, t1_local: float = math.inf) -> np.ndarray:
    t_max = cfg.t_max
    if t_max is None:
        rates = [abs(l.real) for s in spectra.values() for l, st in zip(s.eigenvalues, s.steady)
                 if not st and abs(l.real) > 0]
        slowest = 1.0 / min(rates) if rates else 0.0
        horizon = max(t1_local if math.isfinite(t1_local) else 0.0, slowest)
        t_max = 10.0 * horizon if horizon > 0 else 1e3
    return np.geomspace(cfg.t_min, t_max, cfg.grid_points)


def _refined_sup(f_vec, f_scalar, grid, rounds: int):
    values = f_vec(grid)
    i = int(np.argmax(values))
    best_t, best_v = float(grid[i]), float(values[i])
    if i == 0 or i == len(grid) - 1:
        return best_t, best_v
    a, b, c = float(grid[i - 1]), best_t, float(grid[i + 1])
    fa, fb, fc = float(values[i - 1]), best_v, float(values[i + 1])
    for _ in range(rounds):
        num = (b - a) ** 2 * (fb - fc) - (b - c) ** 2 * (fb - fa)
        den = (b - a) * (fb - fc) - (b - c) * (fb - fa)
        if den == 0:
            break
        x = b - 0.5 * num / den
        if not a < x < c or x == b:
            break
        fx = float(f_scalar(x))
        if fx > fb:
            if x < b:
                a, b, c, fa, fb, fc = a, x, b, fa, fx, fb
            else:
                a, b, c, fa, fb, fc = b, x, c, fb, fx, fc
        else:
            if x < b:
                a, fa = x, fx
            else:
                c, fc = x, fx
    return b, fb


def negativity_series(rho0, spectra: dict, times) -> np.ndarray:
    return negativity(evolve(rho0, np.asarray(times), spectra))


def max_negativity(rho0, L: Superoperator, cfg: MeritConfig = MeritConfig(),
                   t1_local: float = math.inf, spectra: dict | None = None):
    """(t*, N_M): supremum of the negativity over the evolution; ``rho0=None`` selects rho_C."""
    if rho0 is None:
        rho0 = rho_coherent()
    if spectra is None:
        spectra = diagonalize(block_decompose(L))
    grid = time_grid(spectra, cfg, t1_local)
    return _refined_sup(lambda t: negativity_series(rho0, spectra, t),
                        lambda t: negativity(evolve(rho0, t, spectra)),
                        grid, cfg.refine_rounds)


# --- Choi matrix and collectiveness -------------------------------------------

def choi_matrix(E) -> np.ndarray:
    """Choi state (E x id)[|Psi><Psi|], index order (1, 2, 1', 2').

    ``E`` is a 16x16 propagator (or a stack of them) on row-major vectorised
    operators.
    """
    E = np.asarray(E)
    stack = E.reshape(-1, 4, 4, 4, 4)  # [out_ket, out_bra, in_ket, in_bra]
    phi = stack.transpose(0, 1, 3, 2, 4).reshape(-1, 16, 16) / 4.0
    return phi[0] if E.ndim == 2 else phi


def von_neumann_entropy(eigenvalues) -> np.ndarray:
    ev = np.asarray(eigenvalues, dtype=float)
    safe = np.where(ev > ENTROPY_CLAMP, ev, 1.0)
    return -(np.where(ev > ENTROPY_CLAMP, ev * np.log(safe), 0.0)).sum(axis=-1)


def _check_cp(min_eig, where: str = "") -> None:
    worst = float(np.min(min_eig))
    if worst < -CP_TOL:
        warnings.warn(
            f"Choi matrix eigenvalue {worst:.3g} below -{CP_TOL:g}{where}: "
            "map is not completely positive; clamping for the entropy",
            CPViolationWarning, stacklevel=3,
        )


def collectiveness(E) -> float | np.ndarray:
    """Normalised mutual information of the Choi state across the (1,1') | (2,2') cut."""
    E = np.asarray(E)
    phi = choi_matrix(E).reshape(-1, 16, 16)
    phi = 0.5 * (phi + phi.conj().transpose(0, 2, 1))
    t = phi.reshape(-1, 2, 2, 2, 2, 2, 2, 2, 2)  # (1,2,1',2') x (1,2,1',2')
    rho_22p = np.einsum("nabcdaecf->nbdef", t).reshape(-1, 4, 4)
    rho_11p = np.einsum("nabcdebfd->nacef", t).reshape(-1, 4, 4)
    ev_full = np.linalg.eigvalsh(phi)
    _check_cp(ev_full[:, 0])
    s = von_neumann_entropy(ev_full)
    s1 = von_neumann_entropy(np.linalg.eigvalsh(rho_22p))
    s2 = von_neumann_entropy(np.linalg.eigvalsh(rho_11p))
    out = (s1 + s2 - s) / (4 * LOG2)
    return float(out[0]) if E.ndim == 2 else out


def max_collectiveness(L: Superoperator, cfg: MeritConfig = MeritConfig(),
                       t1_local: float = math.inf, spectra: dict | None = None):
    """(t*, I_M): supremum of the collectiveness of exp(L t) over t."""
    if spectra is None:
        spectra = diagonalize(block_decompose(L))
    prop = SpectralPropagator(spectra)
    grid = time_grid(spectra, cfg, t1_local)
    return _refined_sup(lambda t: collectiveness(prop(t)),
                        lambda t: collectiveness(prop(t)),
                        grid, cfg.refine_rounds)


# --- entangling condition -----------------------------------------------------

@dataclass(frozen=True)
class EntanglingResult:
    entangling: bool
    M: np.ndarray

    def __bool__(self):
        return self.entangling


def _perp(v):
    v = np.asarray(v, dtype=complex)
    return np.array([-v[1].conj(), v[0].conj()])


def entangling_condition(psi, phi, r: RateSet, p: ModelParams) -> EntanglingResult:
    """Sufficient condition for entanglement at t -> 0+ from |psi>|phi>.

    Builds the frame Psi_1..Psi_4 from psi, psi_perp, phi*, phi*_perp and
    checks M22 M33 < |M23|^2 with M_ij = <Psi_i| L~[rho~] |Psi_j>.
    """
    psi = np.asarray(psi, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    phi = phi / np.linalg.norm(phi)
    phic = phi.conj()
    frame = np.column_stack([
        np.kron(psi, phic), np.kron(psi, _perp(phic)),
        np.kron(_perp(psi), phic), np.kron(_perp(psi), _perp(phic)),
    ])
    rho_t = partial_transpose(product_state(psi, phi))
    m = frame.conj().T @ build_pt_liouvillian(r, p)(rho_t) @ frame
    lhs = (m[1, 1] * m[2, 2]).real
    return EntanglingResult(bool(lhs < abs(m[1, 2]) ** 2), m)
