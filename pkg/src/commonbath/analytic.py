"""Closed-form spectra in the zero- and infinite-temperature limits.

These are used as independent oracles for the numerical diagonalization and
for quick reasoning about the slow-mode gap; production code never
substitutes them for the numerical path.

Qubit frequencies enter through their Lamb-shifted values
omega_j + s_jj (s_jj = s_jj_down - s_jj_up), which is how the closed forms
stay exact when the local Lamb shifts of the two qubits differ.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator
from .lindblad import ModelParams, RateSet


def principal_sqrt(z: complex) -> complex:
    """Square root with non-negative real part; sqrt(-a) = +i sqrt(a) on the cut."""
    z = complex(z)
    if z.imag == 0 and z.real < 0:
        return complex(0.0, math.sqrt(-z.real))
    return cmath.sqrt(z)


def re_sqrt_from_xy(x: float, y: float) -> float:
    """Re sqrt(x + i y) = sqrt((|z| + x) / 2) without forming the complex root."""
    r = math.hypot(x, y)
    if x >= 0:
        return math.sqrt((r + x) / 2.0)
    # same quantity, rewritten to avoid cancellation in |z| + x when x < 0
    if r == 0:
        return 0.0
    return abs(y) / math.sqrt(2.0 * (r - x))


@dataclass(frozen=True)
class ZeroTempSpectrum:
    V: complex
    block0: np.ndarray  # lambda_1..lambda_6, fastest first
    block1: np.ndarray  # lambda_1..lambda_4, fastest first
    alpha_S: complex
    alpha_A: complex
    delta_lambda: complex
    re_v_xy: tuple

    @property
    def subradiant_state(self) -> np.ndarray:
        """|S_R> in the |ee>, |eg>, |ge>, |gg> basis."""
        return _ket(self.alpha_S)

    @property
    def slow_coherence_state(self) -> np.ndarray:
        """|A_R>, the ket of the slowest block-1 mode |A_R><gg|."""
        return _ket(self.alpha_A)


def _ket(alpha: complex) -> np.ndarray:
    v = np.array([0.0, alpha, 1.0, 0.0], dtype=complex)
    return v / math.sqrt(1.0 + abs(alpha) ** 2)


def zero_temp_spectrum(r: RateSet, p: ModelParams) -> ZeroTempSpectrum:
    """Block-0 and block-1 eigenvalues at T = 0 together with the slow-mode kets."""
    gd = r.gamma_down
    # couplings <ge|H|eg> and <eg|H|ge> of the single-excitation manifold
    # (s_up vanishes at T = 0, so these reduce to s_12_down and s_21_down)
    sp, sm = r.s_plus, r.s_minus
    g11, g22 = gd[0, 0].real, gd[1, 1].real
    w1 = p.omega1 + r.local_shift(0)
    w2 = p.omega2 + r.local_shift(1)
    dw = w1 - w2
    mean_w = 0.5 * (w1 + w2)

    a12 = gd[0, 1] + 2j * sp
    a21 = gd[1, 0] + 2j * sm
    d = 0.5 * (g11 - g22) + 1j * dw
    V = principal_sqrt(a12 * a21 + d * d)

    gsum = g11 + g22
    half = 0.5 * gsum
    block0 = np.array([
        -gsum,
        -half - V.real,
        -half + 1j * V.imag,
        -half - 1j * V.imag,
        -half + V.real,
        0.0,
    ], dtype=complex)
    block1 = np.array([
        -0.5 * (1.5 * gsum + V.conjugate()),
        -0.5 * (1.5 * gsum - V.conjugate()),
        -0.5 * (0.5 * gsum + V),
        -0.5 * (0.5 * gsum - V),
    ], dtype=complex) - 1j * mean_w

    if abs(a12) == 0:
        raise DegenerateDenominator("collective coefficient gamma_12 + 2i s_plus vanishes")
    # the slow eigenvector of the single-excitation effective Hamiltonian
    # carries both the subradiant population mode and the slow coherence
    alpha = (d - V) / a12

    # Re(V^2) and Im(V^2) written out; for Hermitian rate matrices the
    # products below are real
    x = (g11 - g22) ** 2 / 4 - dw ** 2 + (gd[0, 1] * gd[1, 0]).real - 4 * (sp * sm).real
    y = 2 * (gd[1, 0] * sp + gd[0, 1] * sm).real + dw * (g11 - g22)
    return ZeroTempSpectrum(V, block0, block1, alpha, alpha, V, (float(x), float(y)))


def infinite_temp_block1(omega: float, gamma: float, s_plus: float) -> np.ndarray:
    """Block-1 eigenvalues of the free-parameter infinite-temperature generator."""
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    root = principal_sqrt(4 * gamma ** 2 - s_plus ** 2)
    return np.array([
        -3 * gamma - root - 1j * omega,
        -3 * gamma + root - 1j * omega,
        -gamma - 1j * (omega - s_plus),
        -gamma - 1j * (omega + s_plus),
    ], dtype=complex)


def match_eigenvalues(a, b) -> np.ndarray:
    """Greedy nearest-neighbour pairing; returns |a_i - b_pi(i)| for each i."""
    b = list(np.asarray(b, dtype=complex))
    out = []
    for z in np.asarray(a, dtype=complex):
        k = int(np.argmin([abs(z - w) for w in b]))
        out.append(abs(z - b.pop(k)))
    return np.array(out)
