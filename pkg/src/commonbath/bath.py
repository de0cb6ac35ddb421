"""Ohmic bath: spectral density, Bose occupation and the one-sided Fourier
transform of the bath correlation function.

All quantities are in units where hbar = omega1 = 1 unless ``omega1`` is set
explicitly on :class:`BathParams`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DegenerateFrequency, QuadratureFailure

# Upper edge of the explicitly resolved frequency range, in units of the cutoff.
# Beyond it the integrand is handled by quad's semi-infinite transform.
TAIL_FACTOR = 50.0
DEFAULT_QUAD_TOL = 1e-11


@dataclass(frozen=True)
class BathParams:
    """Common Ohmic bath.

    Parameters
    ----------
    mu : float
        Coupling energy in units of hbar*omega1.
    omega_c : float
        Drude cutoff frequency.
    beta : float
        Inverse temperature; ``math.inf`` selects zero temperature.
    omega1 : float
        Reference frequency that normalises the spectral density.
    """

    mu: float
    omega_c: float = 20.0
    beta: float = 10.0
    omega1: float = 1.0

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.omega_c > 0:
            raise ValueError(f"omega_c must be positive, got {self.omega_c}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.omega1 > 0:
            raise ValueError(f"omega1 must be positive, got {self.omega1}")

    @property
    def strength(self) -> float:
        """Prefactor mu^2 / omega1^2 of the spectral density."""
        return self.mu ** 2 / self.omega1 ** 2


def ohmic_density(omega, p: BathParams):
    """Ohmic spectral density with Drude cutoff, extended as an odd function."""
    omega = np.asarray(omega, dtype=float)
    c2 = p.omega_c ** 2
    out = p.strength * omega * c2 / (c2 + omega ** 2)
    return out if out.ndim else float(out)


def bose_occupation(omega, beta: float):
    """Bose-Einstein occupation 1/(exp(beta*omega) - 1).

    ``beta = inf`` gives 0 for positive and -1 for negative frequencies, which
    keeps N(-w) = -(1 + N(w)) valid at zero temperature.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega == 0):
        raise DegenerateFrequency("Bose occupation has a pole at omega = 0")
    if math.isinf(beta):
        out = np.where(omega > 0, 0.0, -1.0)
    else:
        with np.errstate(over="ignore"):
            out = 1.0 / np.expm1(beta * omega)
    return out if out.ndim else float(out)


def emission_weight(x, p: BathParams):
    """J(x) * (N(x) + 1) on the whole real line.

    For negative arguments this equals J(|x|) N(|x|), so a single principal
    value integral over the real line covers both terms of the Lamb shift.
    The x -> 0 limit (strength / beta) is returned exactly.
    """
    x = np.asarray(x, dtype=float)
    j = ohmic_density(x, p)
    if math.isinf(p.beta):
        out = np.where(x > 0, j, 0.0)
    else:
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            denom = -np.expm1(-p.beta * x)
            out = np.where(x == 0, p.strength / p.beta, j / denom)
        # exp overflow for very negative x: the weight is exponentially small
        out = np.where(np.isfinite(out), out, 0.0)
    return out if out.ndim else float(out)


def _quad(f, a, b, epsabs, epsrel):
    value, abserr, _info, *rest = integrate.quad(
        f, a, b, epsabs=epsabs, epsrel=epsrel, limit=500, full_output=1
    )
    # quad appends a message only when ier > 0
    if rest or not math.isfinite(value):
        msg = rest[0] if rest else "non-finite result"
        raise QuadratureFailure(f"quad did not converge on [{a}, {b}]: {msg}")
    return value, abserr


def lamb_integral(omega: float, p: BathParams, tol: float = DEFAULT_QUAD_TOL) -> float:
    """Principal value  P int dx  J(x)(N(x)+1) / (omega - x)  over the real line.

    The pole is removed by subtraction on the window [omega - |omega|,
    omega + |omega|]; the analytic remainder F(omega) log|(omega-lo)/(omega-hi)|
    vanishes for this symmetric window but is kept for clarity. Outside the
    window the integrand is regular and integrated directly, including the
    semi-infinite tails.
    """
    if omega == 0:
        raise DegenerateFrequency("the principal-value integral is evaluated at omega != 0")
    omega = float(omega)
    f_pole = emission_weight(omega, p)
    r = abs(omega)
    lo, hi = omega - r, omega + r
    scale = p.strength * p.omega_c
    epsabs = tol * 1e-2 * scale

    def subtracted(x):
        return (emission_weight(x, p) - f_pole) / (omega - x)

    def regular(x):
        return emission_weight(x, p) / (omega - x)

    pieces = [(subtracted, lo, omega), (subtracted, omega, hi)]
    big = TAIL_FACTOR * p.omega_c
    if omega > 0:
        right_edges = sorted({hi, max(hi, p.omega_c), max(hi, big)})
        for a, b in zip(right_edges[:-1], right_edges[1:]):
            pieces.append((regular, a, b))
        pieces.append((regular, right_edges[-1], np.inf))
        left_top = lo  # = 0
    else:
        for a, b in [(hi, p.omega_c), (p.omega_c, big)]:
            pieces.append((regular, a, b))
        pieces.append((regular, big, np.inf))
        left_top = lo  # = 2 * omega
    if not math.isinf(p.beta):
        # absorption side decays like exp(-beta |x|)
        neg_edge = min(left_top, -min(big, 60.0 / p.beta + p.omega_c))
        if neg_edge < left_top:
            pieces.append((regular, neg_edge, left_top))
        pieces.append((regular, -np.inf, neg_edge))
    elif omega < 0:
        # zero temperature: weight vanishes for x < 0, only [2 omega, 0] is left
        pass

    total = 0.0
    err = 0.0
    for f, a, b in pieces:
        if a == b:
            continue
        v, e = _quad(f, a, b, epsabs, tol)
        total += v
        err += e
    total += f_pole * math.log(abs((omega - lo) / (omega - hi)))
    if err > max(1e-9, 100 * tol) * max(abs(total), scale * 1e-6):
        raise QuadratureFailure(
            f"principal value at omega={omega} has error estimate {err:.3g} for value {total:.6g}"
        )
    return total


def half_fourier(omega: float, p: BathParams, tol: float = DEFAULT_QUAD_TOL) -> complex:
    """One-sided Fourier transform Gamma_beta(omega) of the bath correlation function.

    Real part is pi (N + 1) J with the odd extension of J; the imaginary part
    is the principal-value (Lamb shift) integral.
    """
    if omega == 0:
        raise DegenerateFrequency("Gamma_beta is evaluated at omega != 0")
    re = math.pi * emission_weight(float(omega), p)
    return complex(re, lamb_integral(omega, p, tol=tol))
