import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from factorsim.ensemble import (
    EnsembleQuery,
    energy,
    ensemble_bounds,
    enumerate_ensemble,
    phase_coords,
    spectrum_points,
    sqrt_index,
)
from factorsim.primes import is_prime


def brute_force_ensemble(j: int, engine) -> list:
    """Oracle: factor every N in [p_j^2, p_{j+1}^2) exhaustively."""
    lo, hi = ensemble_bounds(j, engine)
    out = []
    for N in range(lo, hi):
        for x in range(2, math.isqrt(N) + 1):
            if N % x == 0 and is_prime(x) and is_prime(N // x):
                out.append((x, N // x, N))
    return sorted(out, key=lambda t: (t[2], t[0]))


def test_sqrt_index_examples(engine):
    assert sqrt_index(26, engine) == 3
    assert sqrt_index(25, engine) == 3
    assert sqrt_index(10969262131, engine) == 10000


def test_energy_examples(engine):
    assert energy(2, 13, 3, engine) == Fraction(2, 3)
    assert energy(5, 5, 3, engine) == Fraction(1)
    e = energy(47297, 231923, 10000, engine)
    assert e == Fraction(4877 * 20595, 10**8)
    assert abs(float(e) - 1.00441815) < 5e-9


def test_energy_rejects_composite(engine):
    with pytest.raises(ValueError):
        energy(4, 13, 3, engine)


def test_phase_coords_examples(engine):
    assert phase_coords(5, 5, 3, engine) == (Fraction(1), Fraction(0))
    q, p = phase_coords(2, 13, 3, engine)
    assert (q, p) == (Fraction(7, 6), Fraction(5, 6))
    assert q * q - p * p == Fraction(2, 3)


def test_enumerate_j3(engine):
    entries = enumerate_ensemble(EnsembleQuery(j=3), engine)
    assert [e.N for e in entries] == [25, 26, 33, 34, 35, 38, 39, 46]
    assert [(e.x, e.y, e.N) for e in entries] == brute_force_ensemble(3, engine)


def test_enumerate_j3_window(engine):
    entries = enumerate_ensemble(EnsembleQuery(j=3, x_min=5), engine)
    assert [e.N for e in entries] == [25, 35]


def test_enumerate_j1(engine):
    entries = enumerate_ensemble(EnsembleQuery(j=1), engine)
    assert [e.N for e in entries] == [4, 6]  # 8 = 2*4 excluded, per the oracle


@pytest.mark.parametrize("j", range(1, 26))
def test_enumerate_matches_brute_force(j, engine):
    entries = enumerate_ensemble(EnsembleQuery(j=j), engine)
    assert [(e.x, e.y, e.N) for e in entries] == brute_force_ensemble(j, engine)


def test_entry_invariants(engine):
    for e in enumerate_ensemble(EnsembleQuery(j=12), engine):
        assert e.q * e.q - e.p * e.p == e.E
        assert sqrt_index(e.N, engine) == e.j
        assert e.p >= 0
        if e.x == e.y:
            assert e.E == Fraction(e.pix, e.j) ** 2
            assert (e.E == 1) == (e.pix == e.j)


@given(st.integers(min_value=2, max_value=40))
@settings(max_examples=20, deadline=None)
def test_phase_identity_property(engine, j):
    for e in enumerate_ensemble(EnsembleQuery(j=j), engine)[:5]:
        assert e.q * e.q - e.p * e.p == e.E


def test_spectrum_points(engine):
    pts = spectrum_points(EnsembleQuery(j=3), engine)
    assert len(pts) == 8
    assert (Fraction(1), 25) in pts
    assert (Fraction(2, 3), 26) in pts


def test_spectrum_points_empty_window(engine):
    assert spectrum_points(EnsembleQuery(j=3, x_min=6, x_max=5), engine) == []


def test_sqrt_vicinity_window(engine):
    # |sqrt(N_k) - sqrt(34)| < 0.4 keeps N in (sqrt(34)-0.4, sqrt(34)+0.4)^2
    entries = enumerate_ensemble(
        EnsembleQuery(j=3, N_center=34, sqrt_halfwidth=0.4), engine
    )
    assert [e.N for e in entries] == [33, 34, 35, 38]
    # default halfwidth log sqrt(N) covers the whole j = 3 class here
    wide = enumerate_ensemble(EnsembleQuery(j=3, N_center=34), engine)
    assert len(wide) == 8


def test_fig1_marked_point(engine):
    pts = spectrum_points(EnsembleQuery(j=10000, x_min=47290, x_max=47300), engine)
    match = [N for E, N in pts if N == 10969262131]
    assert match, "marked band point missing"
    e = [E for E, N in pts if N == 10969262131][0]
    assert abs(float(e) - 1.00441815) < 5e-9
