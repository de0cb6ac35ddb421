"""Quick oracle suite behind the ``verify`` subcommand."""
from __future__ import annotations

import math

import numpy as np
from scipy import linalg

from .analytic import infinite_temp_block1, match_eigenvalues, zero_temp_spectrum
from .bath import BathParams
from .lindblad import ModelParams, block_decompose, build_liouvillian, build_linf, compute_rates
from .metrics import psi_syn
from .spectral import diagonalize, evolve


def random_params(rng, beta=math.inf) -> ModelParams:
    mu = 10 ** rng.uniform(-3, -1)
    dw = rng.uniform(0, 0.1)
    g1, g2 = rng.uniform(0.2, 1.8, 2)
    return ModelParams(omega2=1.0 - dw, g1=g1, g2=g2, bath=BathParams(mu=mu, beta=beta))


def check_zero_temperature(n: int = 100, seed: int = 0):
    """Largest relative mismatch between numerical and closed-form T=0 spectra."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        p = random_params(rng)
        r = compute_rates(p)
        spec = diagonalize(block_decompose(build_liouvillian(r, p)))
        z = zero_temp_spectrum(r, p)
        for closed, s in ((z.block0[:5], spec[0].eigenvalues[spec[0].decaying]),
                          (z.block1, spec[1].eigenvalues)):
            worst = max(worst, float((match_eigenvalues(closed, s) / np.abs(closed)).max()))
    return worst


def check_infinite_temperature(pairs=((0.1, 0.02), (1.0, 0.3))):
    worst = 0.0
    for g, s in pairs:
        spec = diagonalize(block_decompose(build_linf(1.0, g, s)))
        worst = max(worst, float(match_eigenvalues(infinite_temp_block1(1.0, g, s),
                                                   spec[1].eigenvalues).max()))
    return worst


def check_blocks(n: int = 20, seed: int = 1):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        p = random_params(rng, beta=10 ** rng.uniform(-1, 1.5))
        L = build_liouvillian(compute_rates(p), p)
        blocks = block_decompose(L)
        ev = np.concatenate([np.linalg.eigvals(b.matrix) for b in blocks])
        worst = max(worst, float(match_eigenvalues(np.linalg.eigvals(L.matrix), ev).max()))
        worst = max(worst, float(np.abs(blocks[-1].matrix - blocks[1].matrix.conj()).max()))
    return worst


def check_dynamics(times=(1.0, 10.0, 100.0)):
    p = ModelParams()
    L = build_liouvillian(compute_rates(p), p)
    spec = diagonalize(block_decompose(L))
    rho0 = psi_syn()
    worst = 0.0
    for t in times:
        a = evolve(rho0, t, spec)
        b = (linalg.expm(L.matrix * t) @ rho0.reshape(16)).reshape(4, 4)
        worst = max(worst, float(np.abs(a - b).max()))
    return worst


CHECKS = (
    ("zero-temperature closed forms (relative)", check_zero_temperature, 1e-8),
    ("infinite-temperature block-1 closed forms", check_infinite_temperature, 1e-10),
    ("block structure vs full spectrum", check_blocks, 1e-9),
    ("normal modes vs matrix exponential", check_dynamics, 1e-7),
)


def run_all():
    """List of (name, value, tolerance, passed)."""
    out = []
    for name, fn, tol in CHECKS:
        v = fn()
        out.append((name, v, tol, bool(v <= tol)))
    return out
