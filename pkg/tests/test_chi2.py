import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from msura.chi2 import chi2_cdf, chi2_pdf, chi2_ppf, chi2_sf, q_function
from msura.errors import ParameterError


def mp_cdf(x, dof):
    return float(mpmath.gammainc(dof / 2, 0, x / 2, regularized=True))


@pytest.mark.parametrize("dof", [1, 2, 7, 16, 64, 200])
@pytest.mark.parametrize("x", [0.1, 1.0, 5.0, 30.0, 150.0])
def test_cdf_against_arbitrary_precision(x, dof):
    assert chi2_cdf(x, dof) == pytest.approx(mp_cdf(x, dof), rel=1e-12, abs=1e-300)
    sf = float(mpmath.gammainc(dof / 2, x / 2, mpmath.inf, regularized=True))
    assert chi2_sf(x, dof) == pytest.approx(sf, rel=1e-11, abs=1e-300)


def test_pdf_against_closed_form():
    for dof in (2, 5, 32):
        for x in (0.5, 3.0, 40.0):
            k = dof / 2
            ref = x ** (k - 1) * math.exp(-x / 2) / (2 ** k * math.gamma(k))
            assert chi2_pdf(x, dof) == pytest.approx(ref, rel=1e-12)


@given(st.floats(1e-8, 1 - 1e-12), st.integers(1, 256))
def test_ppf_inverts_cdf(p, dof):
    x = chi2_ppf(p, dof)
    if p > 0.5:
        assert chi2_sf(x, dof) == pytest.approx(1 - p, rel=1e-9)
    else:
        assert chi2_cdf(x, dof) == pytest.approx(p, rel=1e-9)


@given(st.floats(0.01, 0.98), st.floats(0.001, 0.01), st.integers(1, 64))
def test_ppf_monotone(p, dp, dof):
    assert chi2_ppf(p, dof) < chi2_ppf(p + dp, dof)


def test_ppf_known_value():
    # Upper 10% point of chi-square with 16 degrees of freedom.
    assert chi2_ppf(0.9, 16) == pytest.approx(23.541828923096105, rel=1e-12)


def test_ppf_edges_and_errors():
    assert chi2_ppf(0.0, 4) == 0.0
    assert chi2_ppf(1.0, 4) == math.inf
    with pytest.raises(ParameterError):
        chi2_ppf(1.5, 4)
    with pytest.raises(ParameterError):
        chi2_ppf(0.5, 0)


def test_q_function():
    assert q_function(0.0) == 0.5
    assert q_function(1.959963984540054) == pytest.approx(0.025, rel=1e-12)
