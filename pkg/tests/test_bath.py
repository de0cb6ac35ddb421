import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commonbath.bath import (
    BathParams, bose_occupation, emission_weight, half_fourier, lamb_integral, ohmic_density,
)
from commonbath.errors import DegenerateFrequency

from conftest import zero_temperature_lamb_shift

P = BathParams(mu=10 ** -1.5)


def test_density_values():
    assert ohmic_density(0.0, P) == 0.0
    assert ohmic_density(20.0, P) == pytest.approx(1e-3 * 20 / 2, rel=1e-12)
    assert ohmic_density(1.0, P) == pytest.approx(1e-3 * 400 / 401, rel=1e-12)


@given(st.floats(min_value=-1e3, max_value=1e3, allow_nan=False))
def test_density_is_odd(w):
    assert ohmic_density(-w, P) == -ohmic_density(w, P)


def test_density_peaks_at_cutoff():
    w = np.linspace(0.1, 100, 200001)
    assert w[np.argmax(ohmic_density(w, P))] == pytest.approx(P.omega_c, abs=1e-3)


def test_bose_values():
    assert bose_occupation(math.log(2.0), 1.0) == pytest.approx(1.0, rel=1e-14)
    assert bose_occupation(1.0, math.inf) == 0.0
    assert bose_occupation(1.0, 10.0) == pytest.approx(1 / (math.exp(10) - 1), rel=1e-14)
    with pytest.raises(DegenerateFrequency):
        bose_occupation(0.0, 10.0)


@given(st.floats(min_value=1e-3, max_value=30), st.floats(min_value=0.05, max_value=20))
def test_bose_reflection(w, beta):
    assert bose_occupation(-w, beta) == pytest.approx(-(1 + bose_occupation(w, beta)), rel=1e-12)


def test_emission_weight_zero_limit():
    assert emission_weight(0.0, P) == pytest.approx(P.strength / P.beta)
    assert emission_weight(1e-9, P) == pytest.approx(P.strength / P.beta, rel=1e-8)


def test_half_fourier_real_part():
    g = half_fourier(1.0, P)
    expect = math.pi * (1 + 1 / (math.exp(10) - 1)) * 1e-3 * 400 / 401
    assert g.real == pytest.approx(expect, rel=1e-12)
    assert g.real == pytest.approx(3.134e-3, rel=1e-3)
    assert half_fourier(-1.0, BathParams(mu=0.03, beta=math.inf)).real == 0.0


@pytest.mark.parametrize("w", [1.0, 2.5, 0.3])
@pytest.mark.parametrize("beta", [10.0, 1.0, 0.3])
def test_kms_ratio(w, beta):
    p = BathParams(mu=0.05, beta=beta)
    ratio = half_fourier(-w, p).real / half_fourier(w, p).real
    assert ratio == pytest.approx(math.exp(-beta * w), rel=1e-10)


@pytest.mark.parametrize("w", [-3.0, -1.0, -0.2, 0.2, 1.0, 3.0, 40.0])
def test_zero_temperature_closed_form(w):
    p = BathParams(mu=10 ** -1.5, beta=math.inf)
    assert lamb_integral(w, p) == pytest.approx(zero_temperature_lamb_shift(w, p), rel=1e-10)


def test_frozen_values():
    # regression values of the production quadrature at the design point
    assert half_fourier(1.0, P).imag == pytest.approx(-0.0342912625778, rel=1e-10)
    assert half_fourier(-1.0, P).imag == pytest.approx(-0.028383902581, rel=1e-10)


@pytest.mark.parametrize("beta", [math.inf, 10.0, 1.0, 0.1])
def test_tolerance_halving(beta):
    p = BathParams(mu=10 ** -1.5, beta=beta)
    for w in (-1.0, 0.5, 1.0):
        a = lamb_integral(w, p, tol=1e-10)
        b = lamb_integral(w, p, tol=5e-11)
        assert abs(a - b) <= 1e-8 * abs(a)


def test_pole_rejected():
    with pytest.raises(DegenerateFrequency):
        half_fourier(0.0, P)


@pytest.mark.parametrize("kw", [dict(mu=0), dict(mu=0.1, omega_c=-1), dict(mu=0.1, beta=0)])
def test_invalid_params(kw):
    with pytest.raises(ValueError):
        BathParams(**kw)


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=0.05, max_value=5.0))
def test_lamb_shift_continuous_in_beta(w):
    # large finite beta approaches the zero-temperature emission value
    hot = lamb_integral(w, BathParams(mu=0.03, beta=200.0))
    cold = lamb_integral(w, BathParams(mu=0.03, beta=math.inf))
    assert hot == pytest.approx(cold, rel=1e-4)
