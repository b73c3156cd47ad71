"""Numerical bound evaluation: chi-squared maxima, Gaussian surface areas,
the gas-stations rotation, nested-chain constants, and the best-subset
df constant.

Everything here is either a closed form evaluated in log space (sums of
exponentials can involve 2^p terms) or a Monte Carlo estimate that reports
its standard error.  Nothing in this module draws data from the estimation
model; these are the deterministic reference quantities the rest of the
package is checked against.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln, logsumexp

from .core import DomainError, ShapeError

__all__ = [
    "chi_sq_max_bound",
    "edf_upper_bound_simplified",
    "SurfaceArea",
    "gaussian_surface_area_ball",
    "GasStationsRotation",
    "gas_stations_rotation",
    "nested_null_edf_bound",
    "NestedBoundSplit",
    "nested_bound_tail_split",
    "GeneralThetaBound",
    "general_theta_bound",
    "BestSubsetConstant",
    "best_subset_penalty_curve",
    "best_subset_constant",
]


def _check_sizes(sizes):
    arr = np.asarray(sizes)
    if arr.ndim != 1 or arr.size == 0:
        raise ShapeError("sizes must be a nonempty vector")
    if np.any(arr < 0) or np.any(arr != np.floor(arr)):
        raise DomainError("sizes must be nonnegative integers")
    return arr.astype(float)


def _check_delta(delta):
    if not 0.0 <= delta < 1.0:
        raise DomainError("delta must lie in [0, 1)")
    return float(delta)


def chi_sq_max_bound(sizes, delta):
    """Moment-generating-function bound on E[max_s (W_s - p_s)].

    For chi-squared variables W_s with p_s degrees of freedom (any joint
    dependence) and delta in [0, 1),

        E[max_s (W_s - p_s)] <= (2/(1-delta)) log sum_s (delta e^{1-delta})^{-p_s/2}.

    Evaluated via logsumexp.  At delta = 0 the bound is +inf as soon as any
    p_s is positive.
    """
    sizes = _check_sizes(sizes)
    delta = _check_delta(delta)
    if delta == 0.0:
        if np.any(sizes > 0):
            return math.inf
        return 2.0 * math.log(sizes.size)
    exponents = -(sizes / 2.0) * (math.log(delta) + 1.0 - delta)
    return float(2.0 / (1.0 - delta) * logsumexp(exponents))


def edf_upper_bound_simplified(sizes, delta):
    """Simplified form (2/(1-delta)) log|S| + p_max (log(1/delta)/(1-delta) - 1).

    Always at least `chi_sq_max_bound` on the same sizes (it replaces every
    summand by the largest one).  At delta = 9/10 the two constants are
    exactly 20 and log(10/9)/0.1 - 1 ~ 0.0536.
    """
    sizes = _check_sizes(sizes)
    delta = _check_delta(delta)
    k = sizes.size
    p_max = float(sizes.max())
    if delta == 0.0:
        return math.inf if p_max > 0 else 2.0 * math.log(k)
    per_size = math.log(1.0 / delta) / (1.0 - delta) - 1.0
    return 2.0 / (1.0 - delta) * math.log(k) + p_max * per_size


@dataclass(frozen=True)
class SurfaceArea:
    """A Gaussian surface area value with its estimation provenance."""

    value: float
    std_error: float
    method: str
    directions: int


def _log_surface_origin(d, r):
    # Ball's closed form: r^{d-1} e^{-r^2/2} / (2^{d/2 - 1} Gamma(d/2)).
    return (d - 1) * math.log(r) - 0.5 * r**2 - (d / 2.0 - 1.0) * math.log(2.0) - gammaln(d / 2.0)


def gaussian_surface_area_ball(center, radius, *, directions=100_000, seed=0,
                               antithetic=True, method="auto"):
    """Gaussian surface area of the sphere of given center and radius.

    Closed form for origin-centered balls in any dimension and for every
    ball in dimension 1 (two density evaluations).  Off-center balls in
    d >= 2 are integrated by Monte Carlo over uniform sphere directions,
    antithetic by default, with a reported standard error.  Pass
    ``method="mc"`` to force Monte Carlo even where a closed form exists,
    or ``method="closed"`` to insist on the exact path.
    """
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if center.ndim != 1:
        raise ShapeError("center must be a vector")
    d = center.shape[0]
    if radius <= 0 or not math.isfinite(radius):
        raise DomainError("radius must be positive and finite")
    if method not in ("auto", "mc", "closed"):
        raise DomainError("method must be auto, mc, or closed")

    if method != "mc":
        if d == 1:
            c = center[0]
            val = (math.exp(-0.5 * (c + radius) ** 2) + math.exp(-0.5 * (c - radius) ** 2))
            return SurfaceArea(val / math.sqrt(2.0 * math.pi), 0.0, "closed_form", 0)
        if np.all(center == 0.0):
            return SurfaceArea(math.exp(_log_surface_origin(d, radius)), 0.0, "closed_form", 0)
        if method == "closed":
            raise DomainError("no closed form for an off-center ball in d >= 2")

    if directions < 2:
        raise DomainError("need at least 2 Monte Carlo directions")
    rng = np.random.default_rng(seed)
    log_area = (
        math.log(2.0) + (d / 2.0) * math.log(math.pi) - gammaln(d / 2.0)
        + (d - 1) * math.log(radius)
    )
    half = (directions + 1) // 2 if antithetic else directions
    u = rng.standard_normal((half, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    log_norm = -0.5 * d * math.log(2.0 * math.pi)

    def density_at(sign):
        x = center[None, :] + sign * radius * u
        return np.exp(log_area + log_norm - 0.5 * np.sum(x**2, axis=1))

    if antithetic:
        vals = 0.5 * (density_at(1.0) + density_at(-1.0))
        used = 2 * half
    else:
        vals = density_at(1.0)
        used = half
    se = float(vals.std(ddof=1) / math.sqrt(vals.shape[0])) if vals.shape[0] > 1 else 0.0
    return SurfaceArea(float(vals.mean()), se, "sphere_mc", used)


@dataclass(frozen=True)
class GasStationsRotation:
    """The unique admissible rotation start, and how many starts tied."""

    start: int
    multiplicity: int


def gas_stations_rotation(w, *, tol=1e-9):
    """Find the circular rotation whose partial sums never exceed their budget.

    For nonnegative w summing to 2d (within 1e-9), exactly one circular
    rotation has all prefix sums bounded by 2q (q = 1, ..., d); vectors
    with rotational symmetry can tie, in which case the smallest start
    index is returned along with the multiplicity.  Comparisons allow
    slack `tol` so boundary cases like the all-twos vector count.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ShapeError("w must be a nonempty vector")
    if np.any(w < 0):
        raise DomainError("entries must be nonnegative")
    d = w.size
    if abs(float(w.sum()) - 2.0 * d) > 1e-9:
        raise DomainError("entries must sum to 2d (within 1e-9)")
    budget = 2.0 * np.arange(1, d + 1)
    valid = []
    for r in range(d):
        prefix = np.cumsum(np.roll(w, -r))
        if np.all(prefix <= budget + tol):
            valid.append(r)
    if not valid:
        raise DomainError("no admissible rotation found; tolerance too tight?")
    return GasStationsRotation(start=valid[0], multiplicity=len(valid))


def nested_null_edf_bound(p):
    """Partial sum of the nested-chain null bound, exact in log space.

    sum_{d=1}^p sqrt(2d)(1 + 1/d) Lambda_d(B_d(0, sqrt(2d))), where each
    surface area has the closed form; the summand simplifies to
    2 (1 + 1/d) d^{d/2} e^{-d} / Gamma(d/2).  Nondecreasing in p and below
    10 for every p.
    """
    if p < 1:
        raise DomainError("p must be at least 1")
    d = np.arange(1, int(p) + 1, dtype=float)
    log_terms = (
        math.log(2.0) + np.log1p(1.0 / d) + (d / 2.0) * np.log(d) - d - gammaln(d / 2.0)
    )
    return float(np.sum(np.exp(log_terms)))


@dataclass(frozen=True)
class NestedBoundSplit:
    """Certified bound on the full infinite nested-chain series.

    The summands are bounded via the Stirling lower bound on the gamma
    function by (1 + 1/d) sqrt(d) x^d / sqrt(pi) with x = sqrt(2/e); the
    factor (1 + 1/d) splits the series into a sqrt(d) x^d part and a
    x^d/sqrt(d) part.  Each part is an exact head sum plus a geometric
    tail bound (Jensen on sqrt(N+1+G) for a geometric G), so the total
    dominates nested_null_edf_bound(p) for every p.
    """

    sqrt_series: float
    inv_sqrt_series: float
    total: float
    n_terms: int


def nested_bound_tail_split(n_terms=1000):
    """Head-plus-tail certification of the < 10 nested-chain constant."""
    if n_terms < 1:
        raise DomainError("n_terms must be at least 1")
    x = math.sqrt(2.0 / math.e)
    d = np.arange(1, n_terms + 1, dtype=float)
    powers = np.exp(d * math.log(x))
    sqrt_head = float(np.sum(np.sqrt(d) * powers))
    inv_head = float(np.sum(powers / np.sqrt(d)))
    lead = x ** (n_terms + 1) / (1.0 - x)
    mean_extra = x / (1.0 - x)
    sqrt_tail = lead * math.sqrt(n_terms + 1 + mean_extra)
    inv_tail = lead / math.sqrt(n_terms + 1)
    rt_pi = math.sqrt(math.pi)
    sqrt_series = (sqrt_head + sqrt_tail) / rt_pi
    inv_series = (inv_head + inv_tail) / rt_pi
    return NestedBoundSplit(
        sqrt_series=sqrt_series,
        inv_sqrt_series=inv_series,
        total=sqrt_series + inv_series,
        n_terms=n_terms,
    )


@dataclass(frozen=True)
class GeneralThetaBound:
    """Windowed and pairwise excess-df bounds for a nested chain.

    Both values are Monte Carlo approximations whenever the rotated mean mu
    is not identically zero; `windowed_se` and `alternate_se` propagate the
    direction-sampling and chi-squared-sampling errors (delta method,
    cross-term correlations ignored).  `cap` is the loose deterministic
    ceiling sqrt(2p) p (p+1).
    """

    windowed: float
    windowed_se: float
    alternate: float
    alternate_se: float
    cap: float
    p: int
    directions: int
    chi2_draws: int


def _window_area(mu_window, seed, directions):
    d = mu_window.shape[0]
    radius = math.sqrt(2.0 * d)
    if np.all(mu_window == 0.0) or d == 1:
        return gaussian_surface_area_ball(mu_window, radius)
    return gaussian_surface_area_ball(mu_window, radius, directions=directions, seed=seed)


def _chi2_prob(df, nonc, threshold, upper, rng, draws):
    """MC estimate of P(W_df(nonc) > threshold) (or <, when upper=False)."""
    if df == 0:
        # No coordinates left to constrain; the event is vacuous.
        return 1.0, 0.0
    w = rng.noncentral_chisquare(df, nonc, size=draws) if nonc > 0 else rng.chisquare(df, size=draws)
    hits = w > threshold if upper else w < threshold
    phat = float(hits.mean())
    return phat, math.sqrt(max(phat * (1.0 - phat), 0.0) / draws)


def general_theta_bound(mu, *, directions=100_000, chi2_draws=100_000, seed=0):
    """Windowed-max and pairwise excess-df bounds for the full nested chain.

    mu is the rotated, noise-scaled mean (coordinates along the successive
    orthonormal increment directions of the chain).  The windowed bound is

        sum_{d=1}^p sqrt(2d) (d+1) max_j Lambda_d(B_d(mu_{(j+1):(j+d)}, sqrt(2d)))

    with the max over every length-d window (j = 0, ..., p-d).  The
    pairwise bound multiplies each window's surface area by the MC
    probabilities that a noncentral chi-squared variable stays above
    2(j-1) below the window and below 2(p-k) above it; chains with nothing
    below (j = 0) or above (k = p) get vacuous factors of 1.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.ndim != 1 or mu.size == 0:
        raise ShapeError("mu must be a nonempty vector")
    p = mu.shape[0]
    seeds = np.random.SeedSequence(seed).spawn(3)

    # Windowed max: one surface area per (d, j), seeded deterministically.
    area_rng = np.random.default_rng(seeds[0])
    windowed = 0.0
    windowed_var = 0.0
    for d in range(1, p + 1):
        best_val, best_se = -math.inf, 0.0
        for j in range(0, p - d + 1):
            sub_seed = int(area_rng.integers(0, 2**63 - 1))
            area = _window_area(mu[j : j + d], sub_seed, directions)
            if area.value > best_val:
                best_val, best_se = area.value, area.std_error
        coef = math.sqrt(2.0 * d) * (d + 1)
        windowed += coef * best_val
        windowed_var += (coef * best_se) ** 2

    # Pairwise alternate: chi-squared guard factors cached per endpoint.
    chi_rng = np.random.default_rng(seeds[1])
    low = {}
    high = {}
    for j in range(0, p + 1):
        low[j] = _chi2_prob(j, float(np.sum(mu[:j] ** 2)), 2.0 * (j - 1), True, chi_rng, chi2_draws)
        high[j] = _chi2_prob(
            p - j, float(np.sum(mu[j:] ** 2)), 2.0 * (p - j), False, chi_rng, chi2_draws
        )
    pair_rng = np.random.default_rng(seeds[2])
    alternate = 0.0
    alternate_var = 0.0
    for j in range(0, p + 1):
        for k in range(j + 1, p + 1):
            sub_seed = int(pair_rng.integers(0, 2**63 - 1))
            area = _window_area(mu[j:k], sub_seed, directions)
            pl, sl = low[j]
            ph, sh = high[k]
            coef = math.sqrt(2.0 * (k - j))
            alternate += coef * pl * ph * area.value
            alternate_var += coef**2 * (
                (ph * area.value * sl) ** 2
                + (pl * area.value * sh) ** 2
                + (pl * ph * area.std_error) ** 2
            )

    return GeneralThetaBound(
        windowed=windowed,
        windowed_se=math.sqrt(windowed_var),
        alternate=alternate,
        alternate_se=math.sqrt(alternate_var),
        cap=math.sqrt(2.0 * p) * p * (p + 1),
        p=p,
        directions=directions,
        chi2_draws=chi2_draws,
    )


def best_subset_penalty_curve(delta):
    """f(delta) = (2/(1-delta)) log(1 + (delta e^{1-delta})^{-1/2})."""
    delta = float(delta)
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0, 1)")
    inner = math.exp(-0.5 * (math.log(delta) + 1.0 - delta))
    return 2.0 / (1.0 - delta) * math.log1p(inner)


@dataclass(frozen=True)
class BestSubsetConstant:
    """Minimized per-predictor df constant, its minimizer, and half itself.

    `half_value` exists because the constant circulates in two conventions
    (with and without the leading factor 2); both are reported so either
    can be compared against directly.
    """

    value: float
    delta: float
    half_value: float


def best_subset_constant():
    """Minimize the per-predictor search-df penalty curve over delta."""
    res = minimize_scalar(
        best_subset_penalty_curve,
        bounds=(1e-6, 1.0 - 1e-6),
        method="bounded",
        options={"xatol": 1e-12},
    )
    value = float(res.fun)
    return BestSubsetConstant(value=value, delta=float(res.x), half_value=value / 2.0)
