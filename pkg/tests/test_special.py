import cmath
import math

import mpmath as mp
import pytest

from factorsim.special import (
    SpecialFunctionError,
    cdigamma,
    cgamma,
    kummer_F,
    kummer_U,
)

mp.mp.dps = 30

ALPHA1 = 0.75 - 0.25j  # a at E = 1
B32 = 1.5


def relerr(mine, ref):
    ref = complex(ref)
    return abs(mine - ref) / max(abs(ref), 1e-300)


def test_cgamma_known_values():
    assert relerr(cgamma(0.5), math.sqrt(math.pi)) < 1e-13
    assert relerr(cgamma(5.0), 24.0) < 1e-13
    for z in [0.75 - 0.25j, 1 + 1j, -1.5 + 0.5j, 0.25 + 4j, 3.5 - 2j]:
        assert relerr(cgamma(z), mp.gamma(z)) < 1e-12


def test_cgamma_pole():
    with pytest.raises(SpecialFunctionError):
        cgamma(-2.0)


def test_cdigamma_known_values():
    for z in [1.0, 0.75 - 0.25j, 3 + 2j, -2.5 + 1j, 0.5 + 0.25j]:
        assert relerr(cdigamma(z), mp.digamma(z)) < 1e-12


def test_F_at_zero_is_one():
    assert kummer_F(ALPHA1, B32, 0.0) == 1.0


def test_F_kummer_identity_e_z():
    assert relerr(kummer_F(1.0, 1.0, 1j), cmath.exp(1j)) < 1e-13


def test_F_oracle_value():
    mine = kummer_F(ALPHA1, B32, 4j)
    ref = mp.hyp1f1(mp.mpf(3) / 4 - 0.25j, mp.mpf(3) / 2, 4j)
    assert relerr(mine, ref) < 1e-12


@pytest.mark.parametrize("y", [0.5, 2, 8, 12, 15, 20, 30, 40, 50, 200, 2000, 10000])
def test_F_accuracy_imaginary_axis(y):
    mine = kummer_F(ALPHA1, B32, 1j * y)
    ref = mp.hyp1f1(mp.mpf(3) / 4 - 0.25j, mp.mpf(3) / 2, 1j * mp.mpf(y), maxterms=10**6)
    tol = 1e-10 if y <= 50 else 1e-6
    assert relerr(mine, ref) < tol


def test_F_regime_overlap_band():
    """Quadrature and asymptotic regimes agree through |z| in [25, 50]."""
    from factorsim.special import _hyp_integral, _kummer_f_asymptotic

    for y in [25, 30, 35, 40, 45, 50]:
        quad = _hyp_integral(ALPHA1, B32, 1j * y)
        asym = _kummer_f_asymptotic(ALPHA1, B32, 1j * y)
        assert relerr(quad, asym) < 1e-6


def test_F_series_quadrature_overlap():
    from factorsim.special import _hyp_integral, _hyp_series

    for y in [8, 10, 12]:
        series = _hyp_series(ALPHA1, B32, 1j * y)[0]
        quad = _hyp_integral(ALPHA1, B32, 1j * y)
        assert relerr(series, quad) < 1e-9


def test_U_oracle_value():
    mine = kummer_U(ALPHA1, B32, 1j)
    ref = mp.hyperu(mp.mpf(3) / 4 - 0.25j, mp.mpf(3) / 2, 1j)
    assert relerr(mine, ref) < 1e-12


@pytest.mark.parametrize("y", [0.5, 2, 8, 15, 25, 30, 35, 100, 1000])
def test_U_accuracy_imaginary_axis(y):
    mine = kummer_U(ALPHA1, B32, 1j * y)
    ref = mp.hyperu(mp.mpf(3) / 4 - 0.25j, mp.mpf(3) / 2, 1j * mp.mpf(y))
    assert relerr(mine, ref) < 1e-8


def test_U_connection_vs_asymptotic_at_40():
    """U rebuilt from two F values matches the direct asymptotic tail."""
    from factorsim.special import _asymptotic_sum, _kummer_u_connection

    z = 40j
    conn = _kummer_u_connection(ALPHA1, B32, z)
    s, _ = _asymptotic_sum(ALPHA1, ALPHA1 - B32 + 1.0, -1.0 / z)
    asym = cmath.exp(-ALPHA1 * cmath.log(z)) * s
    assert relerr(conn, asym) < 1e-5


def test_U_large_argument_normalization():
    """U(a, 3/2, i rho) * (i rho)^a -> 1 as rho grows."""
    prev = None
    for rho in [1e3, 1e4]:
        v = kummer_U(ALPHA1, B32, 1j * rho) * cmath.exp(ALPHA1 * cmath.log(1j * rho))
        assert abs(v - 1.0) < 1e-2
        if prev is not None:
            assert abs(v - 1.0) < prev
        prev = abs(v - 1.0)


@pytest.mark.parametrize("y", [0.5, 2, 9, 16, 17, 20, 36, 64])
def test_U_log_case_b1(y):
    """Trap family U(beta, 1, -i y) against the oracle."""
    beta = 0.5 + 0.25j
    mine = kummer_U(beta, 1.0, -1j * y)
    ref = mp.hyperu(mp.mpf(1) / 2 + 0.25j, 1, -1j * mp.mpf(y))
    assert relerr(mine, ref) < 5e-8


def test_F_pole_guard():
    with pytest.raises(SpecialFunctionError):
        kummer_F(ALPHA1, -1.0, 1j)


def test_U_zero_argument():
    with pytest.raises(SpecialFunctionError):
        kummer_U(ALPHA1, B32, 0.0)
