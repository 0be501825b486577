"""Gauge machinery, Riemann explicit-formula counting, and the quantum sieve.

A gauge G fixes the classical bound B_G and the prepared-state boundary
q_G; each gauge carries k_m stationary levels E_k. Monte-Carlo sampling
over the sqrt(N) window plus the truncated-explicit-formula inversion
x(E) produces the (E, x) probability maps that the classical ensemble
enumeration is compared against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .ensemble import EnsembleQuery, enumerate_ensemble
from .primes import PrimeEngine

E_MAX_DEFAULT = 9.0 / 8.0
_FIRST_ZERO = 14.134725


class GaugeError(ValueError):
    """Gauge rejected: an invariant (scale separation) failed."""


class BracketError(ArithmeticError):
    """Inversion target not attainable on the search interval."""


# ---------------------------------------------------------------------------
# zeta zeros


@dataclass(frozen=True)
class ZetaZerosTable:
    heights: tuple

    def __post_init__(self):
        h = self.heights
        if len(h) < 1:
            raise ValueError("empty zeros table")
        if abs(h[0] - _FIRST_ZERO) > 1e-6:
            raise ValueError(f"first zero {h[0]} does not match {_FIRST_ZERO}")
        if any(b <= a for a, b in zip(h, h[1:])):
            raise ValueError("zero heights must be strictly increasing")

    @property
    def count(self) -> int:
        return len(self.heights)

    @classmethod
    def from_file(cls, path) -> "ZetaZerosTable":
        with open(path) as fh:
            heights = tuple(float(line) for line in fh if line.strip())
        return cls(heights)

    @classmethod
    def bundled(cls) -> "ZetaZerosTable":
        ref = resources.files("factorsim.data").joinpath("zeta_zeros.txt")
        with resources.as_file(ref) as path:
            return cls.from_file(path)


# ---------------------------------------------------------------------------
# gauges


@dataclass(frozen=True)
class GaugeConfig:
    N: float
    j: int
    G: float
    nu: float
    B_G: int
    q_G: float
    chi: float
    lam: float
    k_m: float
    E_max: float = E_MAX_DEFAULT


def make_gauge(N, G: float, engine: PrimeEngine, j: int = 0, nu: float = 0.375,
               snap_to_zero: bool = False) -> GaugeConfig:
    """Populate a gauge: classical bound B_G, boundary q_G, chi, lambda, k_m.

    N may be a float (the Monte-Carlo step feeds perturbed sqrt(N')^2
    values); B_G is still snapped to the closest prime. With
    `snap_to_zero`, q_G moves to the nearest zero of the E = 1
    wavefunction, making E = 1 an exact eigenvalue of the boundary
    (that is what makes the gauge quantum number discrete).
    """
    if N < 1e4:
        raise GaugeError("gauge needs N >= 1e4")
    if G < 0:
        raise GaugeError("gauge exponent must be >= 0")
    log_sqrt = 0.5 * math.log(N)
    b_target = nu * N ** (1.0 / 3.0) * log_sqrt**G
    B_G = engine.nearest_prime(b_target)
    q_G = (0.375 / nu) * N ** (1.0 / 6.0) / log_sqrt**G
    if snap_to_zero:
        from . import spectral

        q_G = spectral.nearest_zero(1.0, q_G)
    lam = q_G * q_G / math.sqrt(N)
    k_m = 1.5 * math.pi * log_sqrt ** (3.0 * G)
    if not B_G < math.sqrt(N) / 10.0:
        raise GaugeError(f"B_G = {B_G} not << sqrt(N)")
    if not lam < 0.1:
        raise GaugeError(f"lambda = {lam:.3g} not << 1")
    if not k_m > 0.0:
        raise GaugeError("k_m must be positive")
    chi = -q_G * q_G + math.log(q_G)
    return GaugeConfig(N=N, j=j, G=G, nu=nu, B_G=B_G, q_G=q_G, chi=chi,
                       lam=lam, k_m=k_m)


def qm_of_k(gauge: GaugeConfig, k: int) -> float:
    """Boundary for the k-th transition: q_G + (2/3) lambda k."""
    if abs(k) > gauge.k_m + 1:
        raise ValueError(f"|k| = {abs(k)} beyond k_m = {gauge.k_m:.3f}")
    return gauge.q_G + (2.0 / 3.0) * gauge.lam * k


def phase_step_identity(gauge: GaugeConfig, k: int) -> tuple[float, float]:
    """(q_m(k)^2 - q_G^2, 2 pi k / k_m) for the phase-step consistency test."""
    qm = qm_of_k(gauge, k)
    return qm * qm - gauge.q_G**2, 2.0 * math.pi * k / gauge.k_m


def energy_levels(gauge: GaugeConfig) -> list[tuple[int, float]]:
    """Levels E_k = 1 + (k/k_m)(2 pi / log q_G), k = 0..floor(k_m), E <= E_max."""
    spacing = 2.0 * math.pi / (gauge.k_m * math.log(gauge.q_G))
    out = []
    for k in range(int(gauge.k_m) + 1):
        E = 1.0 + k * spacing
        if E > gauge.E_max:
            break
        out.append((k, E))
    return out


def exact_energy_levels(gauge: GaugeConfig, k_max: int | None = None) -> list[tuple[int, float]]:
    """Level family solved exactly at the boundaries q_m(k).

    The k = 0 level anchors at q_G from guess 1; each next guess chains
    from the previous root shifted by the first-order spacing, which
    keeps every solve inside its own basin.
    """
    from . import spectral

    spacing = 2.0 * math.pi / (gauge.k_m * math.log(gauge.q_G))
    if k_max is None:
        k_max = int(gauge.k_m) + 1
    sol = spectral.solve_energy(gauge.q_G, 1.0)
    levels = [(0, sol.E)]
    for k in range(1, k_max + 1):
        sol = spectral.solve_energy(qm_of_k(gauge, k), levels[-1][1] + spacing)
        if not sol.converged:
            break
        levels.append((k, sol.E))
    return levels


def measurements_budget(N, G: float = 0.0) -> int:
    """Default sample budget ceil((log sqrt(N))^3); cubic in digit count."""
    if N < math.e**2:
        raise ValueError("budget needs N >= e^2")
    return math.ceil((0.5 * math.log(N)) ** 3)


# ---------------------------------------------------------------------------
# Riemann prime-counting approximations

_ZETA_CACHE: list = []


def _zeta_int(k: int) -> float:
    """zeta(k) for integer k >= 2 (Euler-Maclaurin, cached)."""
    while len(_ZETA_CACHE) <= k:
        _ZETA_CACHE.append(None)
    if _ZETA_CACHE[k] is None:
        N = 20
        s = sum(n ** (-float(k)) for n in range(1, N))
        s += N ** (1.0 - k) / (k - 1.0) + 0.5 * N ** (-float(k))
        s += k * N ** (-k - 1.0) / 12.0
        s -= k * (k + 1) * (k + 2) * N ** (-k - 3.0) / 720.0
        _ZETA_CACHE[k] = s
    return _ZETA_CACHE[k]


_GRAM_NMAX = 192
_GRAM_ZINV = None


def _gram_zinv() -> np.ndarray:
    global _GRAM_ZINV
    if _GRAM_ZINV is None:
        _GRAM_ZINV = np.array(
            [1.0 / (n * _zeta_int(n + 1)) for n in range(1, _GRAM_NMAX + 1)]
        )
    return _GRAM_ZINV


def riemann_R(x: float, terms: int | None = None, tail: float = 1e-12) -> float:
    """Gram series R(x) = 1 + sum_n (log x)^n / (n n! zeta(n+1)).

    All terms are positive for x > 1, so the sum is stable; the tail is
    bounded by the first omitted term, enforced against `tail`.
    Supports x up to ~1e12 (log x ~ 28, well inside the fixed term
    budget) in double precision.
    """
    if x <= 1.0:
        if x == 1.0:
            return 1.0
        raise ValueError("riemann_R needs x > 1")
    s = math.log(x)
    n = terms if terms is not None else _GRAM_NMAX
    if n > _GRAM_NMAX:
        raise ValueError(f"terms capped at {_GRAM_NMAX}")
    pow_over_fact = np.cumprod(s / np.arange(1.0, n + 1.0))
    adds = pow_over_fact * _gram_zinv()[:n]
    total = 1.0 + float(adds.sum())
    if adds[-1] > tail * total:
        raise ArithmeticError(f"Gram series tail bound {tail} not reached for x={x}")
    return total


def _mobius_upto(M: int) -> list[int]:
    mu = [1] * (M + 1)
    primes = []
    is_comp = [False] * (M + 1)
    for i in range(2, M + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            if i * p > M:
                break
            is_comp[i * p] = True
            if i % p == 0:
                mu[i * p] = 0
                break
            mu[i * p] = -mu[i]
    return mu


_MU = _mobius_upto(64)


def _ei_asymptotic(w: np.ndarray) -> np.ndarray:
    """Ei(w) ~ e^w / w * sum_k k!/w^k, optimally truncated, vectorized.

    Intended for |w| >~ 6 (the explicit-formula corrections always have
    |w| >= first_zero * log(x)/m there); relative accuracy improves like
    e^{-|w|}. Elements with |w| >= 20 take a fixed-depth Horner sum
    (truncation error <= 13!/20^13 ~ 8e-8 relative, usually far less);
    smaller ones fall back to the per-element optimal truncation.

    Off the real axis the full Ei carries an extra i*pi*sign(Im w) that
    this expansion drops; it is purely imaginary and cancels exactly
    under the conjugate-pair folding every caller here applies.
    """
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    aw = np.abs(w)
    big = aw >= 20.0
    if big.any():
        wb = w[big]
        inv = 1.0 / wb
        s = 1.0 + 12.0 * inv
        for k in range(11, 0, -1):
            s = 1.0 + (k * inv) * s  # Horner over sum_k k!/w^k
        out[big] = np.exp(wb) * inv * s
    small = ~big
    if small.any():
        ws = w[small]
        term = np.ones_like(ws)
        total = np.ones_like(ws)
        active = np.ones(ws.shape, dtype=bool)
        for k in range(1, 48):
            nxt = term * (k / ws)
            active &= np.abs(nxt) < np.abs(term)
            nxt = np.where(active, nxt, 0.0)
            total += nxt
            term = np.where(active, nxt, term)
            if not active.any():
                break
        out[small] = np.exp(ws) / ws * total
    return out


def r_complex_folded(x: float, sigmas: np.ndarray) -> np.ndarray:
    """2 Re R(x^rho) for rho = 1/2 + i sigma, via the Moebius-li expansion.

    R at complex argument is evaluated as sum_m mu(m)/m li(x^{rho/m});
    the direct complex Gram series cancels catastrophically in double
    precision once |rho log x| >~ 40, while this path is stable. The
    truncation (m while x^{1/(2m)} >= 2 and |s|/m large enough for the
    asymptotic Ei) was validated against sieve counts. Conjugate zeros
    are folded so the result is real by construction.
    """
    sigmas = np.asarray(sigmas, dtype=float)
    logx = math.log(x)
    s = (0.5 + 1j * sigmas) * logx
    min_abs_s = math.hypot(0.5, float(sigmas.min())) * logx
    M = max(1, int(logx / (2.0 * math.log(2.0))))
    ms = [m for m in range(1, M + 1) if _MU[m] != 0 and min_abs_s / m >= 6.0]
    if not ms:
        ms = [1]
    marr = np.array(ms, dtype=float)
    w = s[None, :] / marr[:, None]  # (n_m, n_zeros)
    vals = _ei_asymptotic(w)
    coef = np.array([_MU[m] / m for m in ms])
    total = (coef[:, None] * vals).sum(axis=0)
    return 2.0 * total.real


@dataclass(frozen=True)
class RiemannApprox:
    x: float
    T: int
    R_value: float
    eta_T: float
    pi_estimate: float


def pi_approx(x: float, zeros: ZetaZerosTable, T: int) -> float:
    """pi(x) ~ R(x) - sum_{k<=T} R(x^{rho_k}), conjugate pairs folded."""
    if x < 2.0:
        raise ValueError("pi_approx needs x >= 2")
    if T > zeros.count:
        raise ValueError(f"T = {T} exceeds table size {zeros.count}")
    r = riemann_R(x)
    if T == 0:
        return r
    corr = r_complex_folded(x, np.array(zeros.heights[:T]))
    return r - float(np.sum(corr))


def pi_approx_detail(x: float, zeros: ZetaZerosTable, T: int) -> RiemannApprox:
    r = riemann_R(x)
    est = pi_approx(x, zeros, T)
    eta = (est - r) / r
    return RiemannApprox(x=x, T=T, R_value=r, eta_T=eta, pi_estimate=est)


def invert_x_of_E(
    E: float,
    N: float,
    j: int,
    zeros: ZetaZerosTable,
    T: int,
    bracket: tuple[float, float] | None = None,
    rel_tol: float = 1e-6,
    near: float | None = None,
    window: float = 0.005,
) -> float:
    """Solve E = pi~(x) pi~(N/x) / j^2 for x by bracketed bisection.

    pi~ is the T-truncated explicit-formula approximation. The smooth
    part of the objective decreases with x; the eta oscillations make it
    locally non-monotone, which is why bisection (not Newton) is used --
    and why, at desk scale, the equation can have several roots spread
    over a few percent of x. The global bracket returns one of them
    deterministically (the probabilistic sieve reading); passing `near`
    restricts the search to near*(1 +- window) to certify a known root.
    Raises BracketError when the endpoints do not straddle the target.
    """
    sqrt_n = math.sqrt(N)
    j2 = float(j) * float(j)

    def f(x: float) -> float:
        return pi_approx(x, zeros, T) * pi_approx(N / x, zeros, T) / j2 - E

    if near is not None:
        # the eta oscillations can put a second crossing inside the
        # window (the endpoints then share a sign), so scan for every
        # sign change and keep the root closest to `near`
        w = window
        for _ in range(6):
            lo_w = near * (1.0 - w)
            hi_w = min(near * (1.0 + w), sqrt_n)
            grid = np.linspace(lo_w, hi_w, 17)
            vals = [f(float(x)) for x in grid]
            brackets = [
                (float(grid[i]), float(grid[i + 1]), vals[i], vals[i + 1])
                for i in range(len(grid) - 1)
                if vals[i] * vals[i + 1] <= 0.0
            ]
            if brackets:
                break
            w /= 3.0
        else:
            raise BracketError(
                f"no sign change around {near:.6g} down to +-{w:.2g}"
            )
        best = None
        for lo_b, hi_b, f_lo_b, f_hi_b in brackets:
            lo2, hi2, fl = lo_b, hi_b, f_lo_b
            for _ in range(200):
                mid = 0.5 * (lo2 + hi2)
                if (hi2 - lo2) < rel_tol * mid:
                    break
                fm = f(mid)
                if fl * fm <= 0.0:
                    hi2 = mid
                else:
                    lo2, fl = mid, fm
            root = 0.5 * (lo2 + hi2)
            if best is None or abs(root - near) < abs(best - near):
                best = root
        return best
    else:
        if bracket is None:
            bracket = (max(N ** 0.25, 2.01), sqrt_n)
        lo, hi = bracket
        f_lo, f_hi = f(lo), f(hi)
        if f_lo * f_hi > 0.0:
            raise BracketError(
                f"E = {E} not bracketed on [{lo:.6g}, {hi:.6g}] "
                f"(f = {f_lo:.3g}, {f_hi:.3g})"
            )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (hi - lo) < rel_tol * mid:
            return mid
        fm = f(mid)
        if f_lo * fm <= 0.0:
            hi, f_hi = mid, fm
        else:
            lo, f_lo = mid, fm
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Monte-Carlo spectrum and KDE averaging


@dataclass(frozen=True)
class MonteCarloConfig:
    samples: int | None = None  # None -> measurements_budget(N)
    rng_seed: int = 0
    T: int = 100


@dataclass(frozen=True)
class SpectrumSample:
    E: float
    x: float
    k: int
    G: float
    xi: float


@dataclass
class MonteCarloResult:
    samples: list
    failed_inversions: int
    budget: int


DEFAULT_G_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)


def montecarlo_spectrum(
    N: int,
    j: int,
    G_list,
    mc: MonteCarloConfig,
    zeros: ZetaZerosTable,
    engine: PrimeEngine,
    first_draw: int = 0,
) -> MonteCarloResult:
    """Sample sqrt(N') uniformly in +-log sqrt(N), emit levels, invert to x.

    Per-draw RNG substreams are derived from (seed, draw index), so any
    parallel split over draws (expressed through `first_draw` slices)
    reproduces the serial output bit for bit.
    """
    sqrt_n = math.sqrt(N)
    log_sqrt = math.log(sqrt_n)
    budget = mc.samples if mc.samples is not None else measurements_budget(N)
    out = []
    failed = 0
    x_lo_global = max(N ** 0.25, 2.01)
    for i in range(first_draw, budget):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=mc.rng_seed, spawn_key=(i,)))
        xi = float(rng.uniform(-1.0, 1.0))
        sqrt_np = sqrt_n + xi * log_sqrt
        n_prime = sqrt_np * sqrt_np
        for G in G_list:
            try:
                gauge = make_gauge(n_prime, G, engine, j=j)
            except GaugeError:
                failed += 1
                continue
            for k, E in energy_levels(gauge):
                if E <= 1.0:
                    E = 1.0 + 1e-12
                try:
                    x = invert_x_of_E(E, float(N), j, zeros, mc.T,
                                      bracket=(x_lo_global, sqrt_n))
                except BracketError:
                    failed += 1
                    continue
                out.append(SpectrumSample(E=E, x=x, k=k, G=G, xi=xi))
    return MonteCarloResult(samples=out, failed_inversions=failed, budget=budget)


@dataclass(frozen=True)
class KDEEstimate:
    k: int
    weights: tuple
    mean: float
    width2: float
    bandwidth: float


def silverman_bandwidth(values: np.ndarray) -> float:
    v = np.asarray(values, dtype=float)
    n = v.size
    if n < 2:
        return 1.0
    sd = float(np.std(v, ddof=1))
    q75, q25 = np.percentile(v, [75, 25])
    iqr = (q75 - q25) / 1.34
    spread = min(sd, iqr) if iqr > 0 else sd
    if spread == 0.0:
        return 1.0
    return 0.9 * spread * n ** (-0.2)


def kde_average(samples_by_level: dict, bandwidth: float | None = None) -> list[KDEEstimate]:
    """Equal-weight level means <E_k> and widths sigma_k^2 per level."""
    out = []
    for k in sorted(samples_by_level):
        vals = np.asarray(samples_by_level[k], dtype=float)
        if vals.size < 1:
            raise ValueError(f"level {k} has no samples")
        w = 1.0 / vals.size
        mean = float(np.sum(vals) * w)
        width2 = float(np.sum(vals * vals) * w - mean * mean)
        bw = bandwidth if bandwidth is not None else silverman_bandwidth(vals)
        out.append(KDEEstimate(k=k, weights=tuple([w] * vals.size),
                               mean=mean, width2=max(width2, 0.0), bandwidth=bw))
    return out


def kde_density(values: np.ndarray, grid: np.ndarray, bandwidth: float | None = None) -> np.ndarray:
    """Equal-weight Gaussian mixture rendered on a grid (integrates to ~1)."""
    v = np.asarray(values, dtype=float)
    h = bandwidth if bandwidth is not None else silverman_bandwidth(v)
    z = (grid[:, None] - v[None, :]) / h
    dens = np.exp(-0.5 * z * z).sum(axis=1) / (v.size * h * math.sqrt(2.0 * math.pi))
    return dens


# ---------------------------------------------------------------------------
# density maps


@dataclass(frozen=True)
class DensityMap:
    e_edges: np.ndarray
    x_edges: np.ndarray
    mass: np.ndarray  # shape (nE, nx), sums to 1
    mode: str
    points: int

    def same_binning(self, other: "DensityMap") -> bool:
        return (
            self.e_edges.shape == other.e_edges.shape
            and self.x_edges.shape == other.x_edges.shape
            and np.allclose(self.e_edges, other.e_edges)
            and np.allclose(self.x_edges, other.x_edges)
        )


class DensityError(RuntimeError):
    pass


def _histogram2d(es, xs, e_edges, x_edges, mode, weights=None) -> DensityMap:
    h, _, _ = np.histogram2d(es, xs, bins=[e_edges, x_edges], weights=weights)
    total = h.sum()
    if total <= 0:
        raise DensityError("no points fell inside the binning window")
    return DensityMap(e_edges=e_edges, x_edges=x_edges, mass=h / total,
                      mode=mode, points=len(es))


def density_map(
    N: int,
    j: int,
    mode: str,
    engine: PrimeEngine,
    zeros: ZetaZerosTable | None = None,
    bins: tuple[int, int] = (40, 40),
    e_range: tuple[float, float] | None = None,
    x_range: tuple[float, float] | None = None,
    G_list=DEFAULT_G_GRID,
    mc: MonteCarloConfig | None = None,
) -> DensityMap:
    """Normalized 2D histogram over (E, x), identical binning across modes."""
    if e_range is None:
        e_range = (1.0, E_MAX_DEFAULT)
    if x_range is None:
        gauge = make_gauge(N, 0.0, engine, j=j)
        x_range = (float(gauge.B_G), math.sqrt(N))
    e_edges = np.linspace(e_range[0], e_range[1], bins[0] + 1)
    x_edges = np.linspace(x_range[0], x_range[1], bins[1] + 1)

    if mode == "classical":
        entries = enumerate_ensemble(
            EnsembleQuery(j=j, x_min=int(x_range[0]), x_max=None), engine
        )
        es = np.array([float(e.E) for e in entries])
        xs = np.array([float(e.x) for e in entries])
        if es.size == 0:
            raise DensityError("classical ensemble empty in the window")
        return _histogram2d(es, xs, e_edges, x_edges, "classical")

    if mode == "quantum":
        if zeros is None:
            raise DensityError("quantum mode needs a zeros table")
        result = montecarlo_spectrum(N, j, G_list, mc or MonteCarloConfig(), zeros, engine)
        if not result.samples:
            raise DensityError("no successful inversions: cannot build a map")
        es = np.array([s.E for s in result.samples])
        xs = np.array([s.x for s in result.samples])
        return _histogram2d(es, xs, e_edges, x_edges, "quantum")

    raise ValueError(f"unknown mode {mode!r}")


def _rankdata(v: np.ndarray) -> np.ndarray:
    order = np.argsort(v, kind="stable")
    ranks = np.empty_like(order, dtype=float)
    ranks[order] = np.arange(1, len(v) + 1, dtype=float)
    # average ties
    sv = v[order]
    i = 0
    while i < len(sv):
        k = i
        while k + 1 < len(sv) and sv[k + 1] == sv[i]:
            k += 1
        if k > i:
            ranks[order[i : k + 1]] = 0.5 * (i + 1 + k + 1)
        i = k + 1
    return ranks


def compare_densities(a: DensityMap, b: DensityMap) -> dict:
    """Spearman rank correlation, Jensen-Shannon divergence, overlap."""
    if not a.same_binning(b):
        raise DensityError("density maps use different binning")
    p = a.mass.ravel()
    q = b.mass.ravel()
    rp, rq = _rankdata(p), _rankdata(q)
    rp -= rp.mean()
    rq -= rq.mean()
    denom = math.sqrt(float(np.dot(rp, rp) * np.dot(rq, rq)))
    rank_corr = float(np.dot(rp, rq) / denom) if denom > 0 else 0.0
    m = 0.5 * (p + q)
    with np.errstate(divide="ignore", invalid="ignore"):
        kl_pm = np.where(p > 0, p * np.log2(np.where(p > 0, p / np.where(m > 0, m, 1), 1)), 0.0)
        kl_qm = np.where(q > 0, q * np.log2(np.where(q > 0, q / np.where(m > 0, m, 1), 1)), 0.0)
    js = float(0.5 * kl_pm.sum() + 0.5 * kl_qm.sum())
    overlap = float(np.minimum(p, q).sum())
    return {"rank_correlation": rank_corr, "jensen_shannon": js, "overlap": overlap}
