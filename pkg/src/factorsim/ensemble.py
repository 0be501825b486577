"""Factorization ensembles: semiprimes N = x*y grouped by j = pi(isqrt(N)).

The energy E = pi(x)*pi(y)/j^2 and the phase coordinates
q = (pi(x)+pi(y))/2j, p = (pi(y)-pi(x))/2j are kept as exact rationals;
floats appear only when rows are rendered for CSV output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .primes import PrimeEngine, PrimeRangeError, is_prime


@dataclass(frozen=True)
class EnsembleEntry:
    x: int
    y: int
    N: int
    j: int
    pix: int
    piy: int
    E: Fraction
    q: Fraction
    p: Fraction


@dataclass(frozen=True)
class EnsembleQuery:
    """Desk-scale restriction of the full ensemble.

    `x_min`/`x_max` restrict the factor window. `N_center` (optionally
    with `sqrt_halfwidth`, default log sqrt(N_center)) additionally
    restricts to the sqrt-vicinity |sqrt(N_k) - sqrt(N_center)| < h;
    whether that vicinity and the pi(sqrt(N)) = j class are meant to
    coincide is left open, so both windows are independent knobs.
    """

    j: int
    x_min: Optional[int] = None
    x_max: Optional[int] = None
    N_center: Optional[int] = None
    sqrt_halfwidth: Optional[float] = None


def sqrt_index(N: int, engine: PrimeEngine) -> int:
    """j = pi(isqrt(N)); the integer square root is exact."""
    if N < 4:
        raise ValueError("sqrt_index requires N >= 4")
    return engine.pi(math.isqrt(N))


def energy(x: int, y: int, j: int, engine: PrimeEngine) -> Fraction:
    """E = pi(x)*pi(y)/j^2, exact."""
    if not (is_prime(x) and is_prime(y)):
        raise ValueError(f"energy requires prime factors, got ({x}, {y})")
    if j < 1:
        raise ValueError("j must be >= 1")
    return Fraction(engine.pi(x) * engine.pi(y), j * j)


def phase_coords(x: int, y: int, j: int, engine: PrimeEngine) -> tuple[Fraction, Fraction]:
    """(q, p) with q^2 - p^2 = energy(x, y, j) exactly."""
    if x > y:
        raise ValueError("phase_coords requires x <= y")
    pix, piy = engine.pi(x), engine.pi(y)
    return Fraction(pix + piy, 2 * j), Fraction(piy - pix, 2 * j)


def ensemble_bounds(j: int, engine: PrimeEngine) -> tuple[int, int]:
    """N-range [p_j^2, p_{j+1}^2) equivalent to pi(isqrt(N)) = j."""
    pj = engine.nth_prime(j)
    pj1 = engine.nth_prime(j + 1)
    return pj * pj, pj1 * pj1


def enumerate_ensemble(query: EnsembleQuery, engine: PrimeEngine) -> list[EnsembleEntry]:
    """All pairs x <= y, both prime, with pi(isqrt(x*y)) = j, x in the window.

    Sorted by N then x. For each candidate x the y-side is scanned over
    [ceil(N_lo/x), (N_hi-1)//x] with Miller-Rabin, so the y-side never
    needs a sieve table.
    """
    j = query.j
    if j < 1:
        raise ValueError("j must be >= 1")
    n_lo, n_hi = ensemble_bounds(j, engine)
    pj = engine.nth_prime(j)
    x_lo = max(2, query.x_min or 2)
    x_hi = min(pj, query.x_max if query.x_max is not None else pj)
    if x_lo > x_hi:
        return []
    entries = []
    pi_cache: dict[int, int] = {}

    def pi_of(v: int) -> int:
        if v not in pi_cache:
            pi_cache[v] = engine.pi(v)
        return pi_cache[v]

    # make sure pi lookups for the y side stay inside one sieve build
    y_max = (n_hi - 1) // x_lo
    try:
        engine.ensure_limit(y_max)
    except (MemoryError, OverflowError) as exc:
        raise PrimeRangeError(f"y-side bound {y_max} too large to sieve") from exc

    for x in engine.primes_between(x_lo, x_hi):
        x = int(x)
        y_start = max(x, -(-n_lo // x))
        y_stop = (n_hi - 1) // x
        for y in range(y_start, y_stop + 1):
            if not is_prime(y):
                continue
            N = x * y
            pix, piy = pi_of(x), pi_of(y)
            entries.append(
                EnsembleEntry(
                    x=x, y=y, N=N, j=j, pix=pix, piy=piy,
                    E=Fraction(pix * piy, j * j),
                    q=Fraction(pix + piy, 2 * j),
                    p=Fraction(piy - pix, 2 * j),
                )
            )
    if query.N_center is not None:
        h = query.sqrt_halfwidth
        if h is None:
            h = math.log(math.sqrt(query.N_center))
        c = math.sqrt(query.N_center)
        entries = [e for e in entries if abs(math.sqrt(e.N) - c) < h]
    entries.sort(key=lambda e: (e.N, e.x))
    return entries


def spectrum_points(query: EnsembleQuery, engine: PrimeEngine) -> list[tuple[Fraction, int]]:
    """(E, N) projection of the ensemble, for the band-spectrum plot."""
    return [(e.E, e.N) for e in enumerate_ensemble(query, engine)]
