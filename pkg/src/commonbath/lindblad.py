"""Partial-secular Lindblad generator for two qubits in a common bath.

Conventions
-----------
Single-qubit basis is (|e>, |g>); two-qubit states are ordered
|ee>, |eg>, |ge>, |gg> (indices 0..3). An operator |a><b| is vectorised
row-major at index 4a + b, so vec(A rho B) = kron(A, B.T) @ vec(rho).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bath import BathParams, half_fourier
from .errors import NotPhaseCovariant

# single-qubit operators in the (|e>, |g>) basis
SM = np.array([[0, 0], [1, 0]], dtype=complex)  # |g><e|
SP = SM.conj().T
SZ = np.diag([1.0, -1.0]).astype(complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)

SIGMA_MINUS = (np.kron(SM, I2), np.kron(I2, SM))
SIGMA_PLUS = (np.kron(SP, I2), np.kron(I2, SP))
SIGMA_Z = (np.kron(SZ, I2), np.kron(I2, SZ))
SIGMA_X = (np.kron(SX, I2), np.kron(I2, SX))
P_EXCITED = (np.kron(np.diag([1.0, 0.0]), I2).astype(complex),
             np.kron(I2, np.diag([1.0, 0.0])).astype(complex))

STATE_LABELS = ("ee", "eg", "ge", "gg")
EXCITATIONS = np.array([2, 1, 1, 0])

# Ordered operator bases of the five phase-covariance sectors, as (ket, bra) pairs.
_E, _EG, _GE, _G = 0, 1, 2, 3
BLOCK_BASES = {
    -2: [(_G, _E)],
    -1: [(_EG, _E), (_GE, _E), (_G, _EG), (_G, _GE)],
    0: [(_E, _E), (_EG, _EG), (_EG, _GE), (_GE, _EG), (_GE, _GE), (_G, _G)],
    1: [(_E, _EG), (_E, _GE), (_EG, _G), (_GE, _G)],
    2: [(_E, _G)],
}
BLOCK_INDICES = {d: np.array([4 * a + b for a, b in basis]) for d, basis in BLOCK_BASES.items()}
PHASE_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Two qubits coupled to a common Ohmic bath plus local T1 decay."""

    omega1: float = 1.0
    omega2: float = 0.99
    g1: float = 1.0
    g2: float = 1.0
    bath: BathParams = field(default_factory=lambda: BathParams(mu=10 ** -1.5))
    t1_local: float = 3e5

    def __post_init__(self):
        if not (self.omega1 > 0 and self.omega2 > 0):
            raise ValueError("qubit frequencies must be positive")
        if self.g1 < 0 or self.g2 < 0:
            raise ValueError("dissipative weights must be non-negative")
        if not self.t1_local > 0:
            raise ValueError("t1_local must be positive (use inf to disable local decay)")

    @property
    def frequencies(self) -> tuple[float, float]:
        return (self.omega1, self.omega2)

    @property
    def weights(self) -> tuple[float, float]:
        return (self.g1, self.g2)

    @property
    def delta_omega(self) -> float:
        return self.omega1 - self.omega2


@dataclass(frozen=True)
class RateSet:
    """Coefficient matrices of the generator; entry [j, k] couples qubits j and k."""

    gamma_down: np.ndarray
    gamma_up: np.ndarray
    s_down: np.ndarray
    s_up: np.ndarray

    def swapped(self) -> "RateSet":
        """Rates with the qubit labels exchanged."""
        p = [1, 0]
        return RateSet(*(m[np.ix_(p, p)] for m in
                         (self.gamma_down, self.gamma_up, self.s_down, self.s_up)))

    @property
    def s_plus(self) -> complex:
        return self.s_down[0, 1] + self.s_up[1, 0]

    @property
    def s_minus(self) -> complex:
        return self.s_up[0, 1] + self.s_down[1, 0]

    def local_shift(self, j: int) -> float:
        """Lamb-shift correction s_jj = s_jj_down - s_jj_up of qubit j's frequency."""
        return float((self.s_down[j, j] - self.s_up[j, j]).real)


def compute_rates(p: ModelParams, tol: float = 1e-11) -> RateSet:
    """Rate and Lamb-shift coefficients from the bath transform Gamma_beta."""
    w = p.frequencies
    g = np.array(p.weights)
    down = np.array([half_fourier(wj, p.bath, tol) for wj in w])
    if math.isinf(p.bath.beta):
        # zero temperature: the absorption channel is closed, including its
        # virtual contribution to the Lamb shift
        up = np.zeros(2, dtype=complex)
    else:
        up = np.array([half_fourier(-wj, p.bath, tol) for wj in w])
    gg = np.outer(g, g)
    gamma_down = gg * (down[:, None] + down[None, :].conj())
    gamma_up = gg * (up[:, None] + up[None, :].conj())
    s_down = gg * (down[:, None] - down[None, :].conj()) / 2j
    s_up = gg * (up[:, None] - up[None, :].conj()) / 2j
    if not math.isinf(p.t1_local):
        gamma_down = gamma_down + np.eye(2) / p.t1_local
    return RateSet(gamma_down, gamma_up, s_down, s_up)


def spre(a):
    return np.kron(a, I4)


def spost(b):
    return np.kron(I4, b.T)


def sandwich(a, b):
    """Superoperator rho -> a rho b."""
    return np.kron(a, b.T)


def commutator(h):
    return spre(h) - spost(h)


def anticommutator(h):
    return spre(h) + spost(h)


@dataclass(frozen=True)
class Superoperator:
    """16x16 matrix acting on row-major vectorised 4x4 operators."""

    matrix: np.ndarray

    def __call__(self, rho):
        rho = np.asarray(rho)
        return (self.matrix @ rho.reshape(16)).reshape(4, 4)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


def lamb_shift_hamiltonian(r: RateSet) -> np.ndarray:
    h = np.zeros((4, 4), dtype=complex)
    for j in range(2):
        for k in range(2):
            h += r.s_down[j, k] * SIGMA_PLUS[k] @ SIGMA_MINUS[j]
            h += r.s_up[j, k] * SIGMA_MINUS[k] @ SIGMA_PLUS[j]
    return h


def system_hamiltonian(omega1: float, omega2: float) -> np.ndarray:
    return 0.5 * omega1 * SIGMA_Z[0] + 0.5 * omega2 * SIGMA_Z[1]


def dissipator(r: RateSet) -> np.ndarray:
    out = np.zeros((16, 16), dtype=complex)
    for j in range(2):
        for k in range(2):
            for gam, a, b in ((r.gamma_down[j, k], SIGMA_MINUS[j], SIGMA_PLUS[k]),
                              (r.gamma_up[j, k], SIGMA_PLUS[j], SIGMA_MINUS[k])):
                if gam == 0:
                    continue
                out += gam * (sandwich(a, b) - 0.5 * anticommutator(b @ a))
    return out


def assemble(r: RateSet, omega1: float, omega2: float) -> Superoperator:
    h = system_hamiltonian(omega1, omega2) + lamb_shift_hamiltonian(r)
    return Superoperator(-1j * commutator(h) + dissipator(r))


def build_liouvillian(r: RateSet, p: ModelParams) -> Superoperator:
    """Full generator -i[H_S + H_LS, .] + D[.] in the vectorised basis."""
    return assemble(r, p.omega1, p.omega2)


def partial_transpose_matrix() -> np.ndarray:
    """Permutation T2 on vectorised operators (transpose of qubit 2)."""
    perm = np.empty(16, dtype=int)
    for a1 in range(2):
        for a2 in range(2):
            for b1 in range(2):
                for b2 in range(2):
                    src = 4 * (2 * a1 + b2) + (2 * b1 + a2)
                    dst = 4 * (2 * a1 + a2) + (2 * b1 + b2)
                    perm[dst] = src
    return np.eye(16)[perm]


T2 = partial_transpose_matrix()


def partial_transpose(rho):
    """Partial transpose of a 4x4 operator with respect to qubit 2."""
    r = np.asarray(rho).reshape(2, 2, 2, 2)
    return r.transpose(0, 3, 2, 1).reshape(4, 4)


def build_pt_liouvillian(r: RateSet, p: ModelParams) -> Superoperator:
    """Generator conjugated by the partial transpose, written out term by term.

    Equal to T2 @ L @ T2 but assembled directly from the rates, which is what
    the entangling-condition analysis needs.
    """
    sm1, sm2 = SIGMA_MINUS
    sp1, sp2 = SIGMA_PLUS
    sz1, sz2 = SIGMA_Z
    w1 = p.omega1 + r.local_shift(0)
    w2 = p.omega2 + r.local_shift(1)
    # the identity part of the local Lamb shift commutes and is dropped
    out = -0.5j * commutator(w1 * sz1 - w2 * sz2)
    out += -1j * (r.s_plus * (sandwich(sm1, sm2) - sandwich(sm2, sm1))
                  + r.s_minus * (sandwich(sp1, sp2) - sandwich(sp2, sp1)))
    for j, (sm, sp) in enumerate(zip(SIGMA_MINUS, SIGMA_PLUS)):
        out += r.gamma_down[j, j] * (sandwich(sm, sp) - 0.5 * anticommutator(sp @ sm))
        out += r.gamma_up[j, j] * (sandwich(sp, sm) - 0.5 * anticommutator(sm @ sp))
    gd, gu = r.gamma_down, r.gamma_up
    out += gd[0, 1] * spre(sm1 @ sm2) + gu[0, 1] * spre(sp1 @ sp2)
    out += -0.5 * (gd[0, 1] + gu[1, 0]) * (sandwich(sm1, sm2) + sandwich(sm2, sm1))
    out += -0.5 * (gd[1, 0] + gu[0, 1]) * (sandwich(sp1, sp2) + sandwich(sp2, sp1))
    out += gd[1, 0] * spost(sp1 @ sp2) + gu[1, 0] * spost(sm1 @ sm2)
    return Superoperator(out)


def build_linf(omega: float, gamma: float, s_plus: float) -> Superoperator:
    """Infinite-temperature generator with free (omega, gamma, s_plus).

    Balanced, resonant qubits; every emission and absorption coefficient
    equals ``gamma`` and the collective Lamb shift is ``s_plus``.
    """
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    full = np.full((2, 2), gamma, dtype=complex)
    s = np.array([[0, s_plus], [s_plus, 0]], dtype=complex)
    r = RateSet(full, full.copy(), s, np.zeros((2, 2), dtype=complex))
    return assemble(r, omega, omega)


@dataclass(frozen=True)
class Block:
    d: int
    matrix: np.ndarray
    indices: np.ndarray  # positions in the 16-dim vectorised space
    basis: tuple  # (ket, bra) state indices


@dataclass(frozen=True)
class BlockSet:
    blocks: dict

    def __getitem__(self, d: int) -> Block:
        return self.blocks[d]

    def __iter__(self):
        return iter(self.blocks[d] for d in sorted(self.blocks))


def block_decompose(L: Superoperator, tol: float = PHASE_TOL) -> BlockSet:
    """Split a phase-covariant generator into its five excitation-difference sectors."""
    m = L.matrix
    sector = np.empty(16, dtype=int)
    for a in range(4):
        for b in range(4):
            sector[4 * a + b] = EXCITATIONS[a] - EXCITATIONS[b]
    leak = np.abs(m[sector[:, None] != sector[None, :]])
    scale = max(np.linalg.norm(m, 2), 1.0)
    if leak.size and leak.max() > tol * scale:
        raise NotPhaseCovariant(
            f"coupling between excitation sectors {leak.max():.3g} exceeds {tol:g}*|L|"
        )
    blocks = {}
    for d, idx in BLOCK_INDICES.items():
        blocks[d] = Block(d, m[np.ix_(idx, idx)].copy(), idx, tuple(BLOCK_BASES[d]))
    return BlockSet(blocks)


def basis_operator(ket: int, bra: int) -> np.ndarray:
    op = np.zeros((4, 4), dtype=complex)
    op[ket, bra] = 1.0
    return op
