"""Mittag-Leffler evaluation against closed forms and a high-precision oracle.

Frozen reference values come from a 50-digit mpmath series (300 terms);
the helper below recomputes them on demand for the cross-check tests.
"""

import math

import mpmath as mp
import numpy as np
import pytest

from fraclyap.errors import EvaluationError
from fraclyap.mittag_leffler import (MLParams, _ml2, _prabhakar, ml, ml_array,
                                     ml_derivative)


def ml_reference(alpha, beta, rho, z, terms=300, dps=50):
    """Independent extended-precision series oracle."""
    with mp.workdps(dps):
        alpha, beta, rho, z = map(mp.mpf, map(str, (alpha, beta, rho, z)))
        s = mp.mpf(0)
        for j in range(terms):
            s += mp.rf(rho, j) * z**j / (mp.factorial(j) * mp.gamma(alpha * j + beta))
        return float(s)


# 50-digit mpmath values, frozen
REF_VALUES = [
    # (alpha, beta, rho, z, expected)
    (0.7, 0.3, 1.0, -1.5, -0.091488701868415182744),
    (0.5, 1.0, 1.0, -2.0, 0.25539567631050574387),
    (0.8, 1.0, 1.0, -3.0, 0.11292019868221739872),
    (0.5, 1.5, 2.0, -1.0, 0.27321201478389856507),
]


def test_exp_identity_point():
    assert ml(MLParams(1.0, 1.0), 1.0) == pytest.approx(math.e, abs=1e-13)


def test_zero_argument_single_term():
    # only the j = 0 term survives: 1/Gamma(beta)
    assert ml(MLParams(0.7, 0.3), 0.0) == pytest.approx(0.33427275256419055, abs=1e-15)


def test_cosh_identity():
    # E_{2,1}(z) = cosh(sqrt(z))
    assert ml(MLParams(2.0, 1.0), 4.0) == pytest.approx(3.7621956910836315, abs=1e-12)


@pytest.mark.parametrize("alpha,beta,rho,z,expected", REF_VALUES)
def test_frozen_reference_values(alpha, beta, rho, z, expected):
    assert ml(MLParams(alpha, beta, rho), z) == pytest.approx(expected, abs=1e-13)
    assert ml_reference(alpha, beta, rho, z) == pytest.approx(expected, abs=1e-15)


def test_exp_identity_grid():
    z = np.linspace(-5.0, 5.0, 101)
    vals = np.array([ml(MLParams(1.0, 1.0), zi) for zi in z])
    assert np.max(np.abs(vals - np.exp(z))) <= 1e-12


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_derivative_matches_central_difference(alpha):
    h = 1e-6
    for z in np.linspace(-3.0, 0.0, 13):
        params = MLParams(alpha, 1.0)
        approx = (ml(params, z + h) - ml(params, z - h)) / (2.0 * h)
        exact = ml_derivative(params, z)
        assert abs(exact - approx) / (1.0 + abs(exact)) <= 1e-5


def test_derivative_trivial_exponential():
    assert ml_derivative(MLParams(1.0, 1.0), 0.5) == pytest.approx(
        1.6487212707001281, abs=1e-12)


def test_derivative_at_zero_closed_form():
    # d/dz E_{0.5,1} at 0 equals 1/Gamma(1.5)
    assert ml_derivative(MLParams(0.5, 1.0), 0.0) == pytest.approx(
        1.1283791670955126, abs=1e-12)


def test_rho_one_reduction():
    for z in np.linspace(-4.0, 1.0, 21):
        two = _ml2(0.6, 0.9, z)
        general = _prabhakar(0.6, 0.9, 1.0, z)
        assert abs(two - general) <= 1e-14 * max(1.0, abs(two))


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8, 1.0])
def test_kernel_monotone_decreasing_for_nonpositive_z(alpha):
    z = np.linspace(-6.0, 0.0, 200)
    vals = ml_array(alpha, 1.0, z)
    assert np.all(np.diff(vals) > 0.0)  # increasing in z means decreasing in |z|
    assert np.all(vals > 0.0)


def test_array_path_matches_scalar():
    z = np.linspace(-4.0, 2.0, 57)
    vec = ml_array(0.7, 1.1, z)
    scal = np.array([ml(MLParams(0.7, 1.1), zi) for zi in z])
    assert np.max(np.abs(vec - scal)) <= 1e-14


def test_nonconvergence_raises():
    # small alpha with z >> 1 needs astronomically many terms
    with pytest.raises(EvaluationError):
        ml(MLParams(0.1, 1.0), 10.0)


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        MLParams(0.0, 1.0)
    with pytest.raises(ValueError):
        MLParams(1.0, -1.0)
    with pytest.raises(ValueError):
        ml(MLParams(1.0, 1.0), math.inf)
    with pytest.raises(ValueError):
        ml_derivative(MLParams(1.0, 1.0, rho=2.0), 0.0)
