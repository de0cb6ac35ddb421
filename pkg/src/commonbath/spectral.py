"""Biorthogonal eigendecomposition of the Liouvillian blocks and normal-mode evolution."""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import NonDiagonalizable
from .lindblad import BLOCK_BASES, Block, BlockSet, Superoperator

COND_LIMIT = 1e8
STEADY_TOL = 1e-12
TIE_TOL = 1e-12


@dataclass(frozen=True)
class BlockSpectrum:
    """Eigenmodes of one block.

    ``right[:, j]`` and ``left[:, j]`` are the block-coordinate vectors of the
    right and left eigen-operators, normalised so that left^H @ right = I.
    """

    d: int
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    indices: np.ndarray
    steady: np.ndarray  # boolean mask of non-decaying modes

    def __len__(self):
        return len(self.eigenvalues)

    def operator(self, j: int, which: str = "right") -> np.ndarray:
        """Eigen-operator j as a 4x4 matrix."""
        vec = (self.right if which == "right" else self.left)[:, j]
        op = np.zeros(16, dtype=complex)
        op[self.indices] = vec
        return op.reshape(4, 4)

    def reconstruct(self) -> np.ndarray:
        return self.right @ np.diag(self.eigenvalues) @ self.left.conj().T

    @property
    def decaying(self) -> np.ndarray:
        return np.flatnonzero(~self.steady)


def _compare(a: complex, b: complex, tol: float) -> int:
    ra, rb = abs(a.real), abs(b.real)
    if abs(ra - rb) > tol:
        return -1 if ra < rb else 1
    if a.imag != b.imag:
        return -1 if a.imag < b.imag else 1
    return 0


def sort_order(eigenvalues, scale: float = 1.0) -> np.ndarray:
    """Indices sorting by ascending |Re lambda|, ties broken by ascending Im lambda."""
    tol = TIE_TOL * max(scale, 1.0)
    key = functools.cmp_to_key(lambda i, j: _compare(eigenvalues[i], eigenvalues[j], tol))
    return np.array(sorted(range(len(eigenvalues)), key=key), dtype=int)


def diagonalize_block(block: Block, scale: float | None = None) -> BlockSpectrum:
    m = block.matrix
    if scale is None:
        scale = max(np.linalg.norm(m, 2), 1.0)
    w, vr = linalg.eig(m)
    cond = np.linalg.cond(vr)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NonDiagonalizable(
            f"block d={block.d}: eigenvector matrix condition number {cond:.3g} exceeds {COND_LIMIT:g}"
        )
    order = sort_order(w, scale)
    w, vr = w[order], vr[:, order]
    left = np.linalg.inv(vr).conj().T
    steady = np.abs(w) < STEADY_TOL * max(1.0, scale)
    w = np.where(steady, 0.0, w)
    if block.d == 0 and steady.sum() == 1:
        # trace-normalise the unique steady state so that its weight is Tr(rho0) = 1
        j = int(np.flatnonzero(steady)[0])
        diag = [i for i, (a, b) in enumerate(BLOCK_BASES[0]) if a == b]
        tr = vr[diag, j].sum()
        if abs(tr) > 1e-14:
            vr[:, j] = vr[:, j] / tr
            left[:, j] = left[:, j] * np.conj(tr)
    return BlockSpectrum(block.d, w, vr, left, block.indices, steady)


def diagonalize(blocks: BlockSet) -> dict:
    """Spectrum of every block, keyed by the sector label d."""
    scale = max(max(np.linalg.norm(b.matrix, 2) for b in blocks), 1.0)
    return {b.d: diagonalize_block(b, scale) for b in blocks}


def mode_weights(rho0, spec: BlockSpectrum) -> np.ndarray:
    """p_0j = <left_j, rho0> for every mode of the block."""
    v = np.asarray(rho0, dtype=complex).reshape(16)[spec.indices]
    return spec.left.conj().T @ v


def evolve(rho0, t, spectra: dict) -> np.ndarray:
    """rho(t) from the normal-mode expansion. ``t`` may be a scalar or an array."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if np.any(t < 0):
        raise ValueError("evolution time must be non-negative")
    out = np.zeros((t.size, 16), dtype=complex)
    for spec in spectra.values():
        p = mode_weights(rho0, spec)
        phases = np.exp(np.outer(t, spec.eigenvalues))
        out[:, spec.indices] = (phases * p) @ spec.right.T
    out = out.reshape(t.size, 4, 4)
    return out[0] if scalar else out


class SpectralPropagator:
    """exp(L t) assembled from block spectra, cheap to evaluate on many times."""

    def __init__(self, spectra: dict):
        n = 16
        self.right = np.zeros((n, n), dtype=complex)
        self.left_h = np.zeros((n, n), dtype=complex)
        self.eigenvalues = np.zeros(n, dtype=complex)
        col = 0
        for spec in spectra.values():
            k = len(spec)
            self.right[spec.indices, col:col + k] = spec.right
            self.left_h[col:col + k, spec.indices] = spec.left.conj().T
            self.eigenvalues[col:col + k] = spec.eigenvalues
            col += k

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return (self.right * np.exp(self.eigenvalues * t)) @ self.left_h
        phases = np.exp(np.outer(t, self.eigenvalues))
        return np.einsum("ij,tj,jk->tik", self.right, phases, self.left_h)


def propagator(L: Superoperator, t: float) -> np.ndarray:
    """exp(L t) by scaling and squaring."""
    if t < 0:
        raise ValueError("propagation time must be non-negative")
    return linalg.expm(L.matrix * t)
