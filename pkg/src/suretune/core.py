"""Gaussian sequence model, tunable estimator families, and Monte Carlo oracles.

The data model throughout the package is

    Y = theta0 + eps,   eps ~ N(0, sigma^2 I)   (or diag(sigma_i^2)),

and the object of study is an estimator family {theta_s : s in domain} tuned
by minimizing the unbiased prediction-error estimate

    sure(s, Y) = ||Y - theta_s(Y)||^2 + 2 sigma^2 * df_s(Y),

where df_s(Y) is the plug-in (fixed-s) degrees-of-freedom estimate supplied by
the family, typically the divergence of y -> theta_s(y).  For a fixed s this
is unbiased for the prediction error Err(theta_s) = E||Y* - theta_s(Y)||^2
with Y* an independent copy of Y.  After tuning (s = s_hat(Y)) it is biased
low; the bias is 2 sigma^2 times the excess degrees of freedom

    edf = df(theta_shat) - E[df_shat(Y)],

which the Monte Carlo routines here estimate directly from the covariance
definition of degrees of freedom,

    df(theta) = (1/sigma^2) sum_i Cov(theta_i(Y), Y_i).

Heteroskedastic convention: with unequal variances the error metric is scaled
per coordinate, Err = E sum_i (Y*_i - theta_i(Y))^2 / sigma_i^2, the optimism
is 2 sum_i Cov(theta_i, Y_i) / sigma_i^2, and the plug-in `naive_df` reported
by a heteroskedastic family is the bare divergence sum_i d theta_i / d Y_i,
so that sure = scaled residual + 2 * naive_df.  All routines in this module
dispatch on the model's noise specification and apply the matching scaling.

Vectorization contract: estimator rules and family methods operate on arrays
of shape (..., n), broadcasting over leading axes.  The Monte Carlo drivers
rely on this to evaluate thousands of replications in single array ops; wrap
a scalar-only rule with `vectorize_rows` if needed.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "ShapeError",
    "GaussianModel",
    "TuningDomain",
    "TunedFit",
    "TunedBatch",
    "EdfReport",
    "EDF_METHODS",
    "MCEstimate",
    "OracleTuning",
    "OracleGapReport",
    "EstimatorFamily",
    "sure",
    "tune_by_sure",
    "vectorize_rows",
    "mc_prediction_error",
    "mc_df",
    "mc_edf",
    "oracle_tuning",
    "oracle_gap_check",
]


class DomainError(ValueError):
    """A parameter lies outside the mathematical domain of an operation."""


class ShapeError(ValueError):
    """An array argument has the wrong shape or length."""


def _as_float_vector(x, name, n=None):
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ShapeError(f"{name} must have length {n}, got {arr.shape[0]}")
    return arr


@dataclass(frozen=True)
class GaussianModel:
    """Mean vector plus Gaussian noise, homoskedastic or per-coordinate.

    Exactly one of `sigma` (scalar standard deviation) and `sigmas`
    (vector of per-coordinate standard deviations) must be given.
    """

    theta0: np.ndarray
    sigma: float = None
    sigmas: np.ndarray = None

    def __post_init__(self):
        theta0 = _as_float_vector(self.theta0, "theta0")
        object.__setattr__(self, "theta0", theta0)
        if (self.sigma is None) == (self.sigmas is None):
            raise DomainError("specify exactly one of sigma and sigmas")
        if self.sigma is not None:
            if not np.isfinite(self.sigma) or self.sigma <= 0:
                raise DomainError("sigma must be positive and finite")
            object.__setattr__(self, "sigma", float(self.sigma))
        else:
            sigmas = _as_float_vector(self.sigmas, "sigmas", theta0.shape[0])
            if not np.all(np.isfinite(sigmas)) or np.any(sigmas <= 0):
                raise DomainError("sigmas must be positive and finite")
            object.__setattr__(self, "sigmas", sigmas)

    @property
    def n(self):
        return self.theta0.shape[0]

    @property
    def is_heteroskedastic(self):
        return self.sigmas is not None

    @property
    def sd(self):
        """Noise standard deviation as a length-n vector."""
        if self.sigmas is not None:
            return self.sigmas
        return np.full(self.n, self.sigma)

    def draw(self, rng, reps):
        """Draw `reps` independent data vectors as a (reps, n) array."""
        return self.theta0 + self.sd * rng.standard_normal((reps, self.n))


@dataclass(frozen=True)
class TuningDomain:
    """Admissible tuning values: a continuous interval or a finite label set.

    For continuous domains the upper endpoint may be `math.inf`, in which
    case s = +inf itself is an admissible tuning value (the fully shrunk
    member of the family), not an error sentinel.
    """

    kind: str
    lower: float = 0.0
    upper: float = math.inf
    labels: tuple = None

    def __post_init__(self):
        if self.kind not in ("continuous", "discrete"):
            raise DomainError(f"unknown domain kind {self.kind!r}")
        if self.kind == "discrete" and not self.labels:
            raise DomainError("discrete domain requires a nonempty label set")

    def contains(self, s):
        if self.kind == "discrete":
            try:
                return s in self.labels
            except TypeError:
                return False
        if isinstance(s, (bool, str)):
            return False
        try:
            s = float(s)
        except (TypeError, ValueError):
            return False
        if math.isnan(s):
            return False
        return self.lower <= s <= self.upper


@dataclass
class TunedFit:
    """Result of minimizing SURE over a family's tuning domain.

    `sure_min` always equals the family's SURE re-evaluated at
    (`s_hat`, the data), and `naive_df_at_shat` is the plug-in degrees of
    freedom at the selected tuning value.  `multimodal` is set only by
    tuners that actually probe for multiple local minima.
    """

    s_hat: object
    theta_hat: np.ndarray
    sure_min: float
    naive_df_at_shat: float
    multimodal: bool = None


@dataclass
class TunedBatch:
    """Row-wise tuning results for a (reps, n) batch of data vectors.

    For discrete families `s_hat` holds integer indices into
    `domain.labels`; for continuous families it holds the tuning values
    themselves (with +inf allowed).
    """

    s_hat: np.ndarray
    theta_hat: np.ndarray
    sure_min: np.ndarray
    naive_df_at_shat: np.ndarray
    discrete: bool = False


EDF_METHODS = frozenset(
    {
        "monte_carlo",
        "analytic_unbiased",
        "implicit_diff",
        "bootstrap_parametric",
        "bootstrap_bigmodel",
        "bootstrap_residual",
        "closed_form",
    }
)


@dataclass(frozen=True)
class EdfReport:
    """An excess-degrees-of-freedom (or df) estimate with provenance.

    `std_error` is zero exactly when the method is deterministic given the
    input (closed forms, single-realization analytic statistics).
    """

    method: str
    value: float
    std_error: float
    reps: int

    def __post_init__(self):
        if self.method not in EDF_METHODS:
            raise DomainError(f"unknown edf method {self.method!r}")
        if not math.isfinite(self.value):
            raise DomainError("edf value must be finite")
        if not (self.std_error >= 0):
            raise DomainError("std_error must be nonnegative")
        if self.reps < 1:
            raise DomainError("reps must be at least 1")


@dataclass(frozen=True)
class MCEstimate:
    """A Monte Carlo mean with its standard error."""

    value: float
    std_error: float
    reps: int


@dataclass(frozen=True)
class OracleTuning:
    """Oracle tuning value and the exact prediction error it attains."""

    s0: object
    err: float


class EstimatorFamily(ABC):
    """A family {theta_s} indexed by a tuning value, with plug-in df.

    Subclasses provide `estimate`, `naive_df`, and `tune`; `tune_batch`
    has a generic row-loop fallback that vectorized families override.
    Each family carries its own noise level because tuning needs it.
    """

    domain: TuningDomain
    n: int

    def _set_noise(self, sigma=None, sigmas=None, n=None):
        if (sigma is None) == (sigmas is None):
            raise DomainError("specify exactly one of sigma and sigmas")
        if sigma is not None:
            if not np.isfinite(sigma) or sigma <= 0:
                raise DomainError("sigma must be positive and finite")
            self.sigma = float(sigma)
            self.sigmas = None
        else:
            self.sigmas = _as_float_vector(sigmas, "sigmas", n)
            if not np.all(np.isfinite(self.sigmas)) or np.any(self.sigmas <= 0):
                raise DomainError("sigmas must be positive and finite")
            self.sigma = None

    @property
    def is_heteroskedastic(self):
        return getattr(self, "sigmas", None) is not None

    @abstractmethod
    def estimate(self, s, y):
        """Evaluate theta_s at y; broadcasts over leading axes of y."""

    @abstractmethod
    def naive_df(self, s, y):
        """Plug-in df of theta_s at y (divergence for smooth families)."""

    @abstractmethod
    def tune(self, y):
        """Minimize SURE over the domain for a single data vector."""

    def sure(self, s, y):
        return sure(self, s, y)

    def tuned_rule(self):
        """The data-driven rule y -> theta_{s_hat(y)}(y) as a batch callable."""

        def rule(Y):
            Y = np.asarray(Y, dtype=float)
            if Y.ndim == 1:
                return self.tune(Y).theta_hat
            return self.tune_batch(Y).theta_hat

        return rule

    def tune_batch(self, Y):
        Y = np.asarray(Y, dtype=float)
        if Y.ndim != 2:
            raise ShapeError("tune_batch expects a (reps, n) array")
        fits = [self.tune(row) for row in Y]
        discrete = self.domain.kind == "discrete"
        if discrete:
            index = {label: k for k, label in enumerate(self.domain.labels)}
            s = np.array([index[f.s_hat] for f in fits], dtype=float)
        else:
            s = np.array([f.s_hat for f in fits], dtype=float)
        return TunedBatch(
            s_hat=s,
            theta_hat=np.vstack([f.theta_hat for f in fits]),
            sure_min=np.array([f.sure_min for f in fits]),
            naive_df_at_shat=np.array([f.naive_df_at_shat for f in fits]),
            discrete=discrete,
        )

    def model(self, theta0):
        """Convenience: a GaussianModel with this family's noise level."""
        if self.is_heteroskedastic:
            return GaussianModel(theta0, sigmas=self.sigmas)
        return GaussianModel(theta0, sigma=self.sigma)


def _check_data(family, y):
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != family.n:
        raise ShapeError(
            f"data has trailing dimension {y.shape[-1]}, family expects {family.n}"
        )
    return y


def sure(family, s, y, *, noise=None):
    """Unbiased prediction-error estimate of theta_s at y.

    Homoskedastic: ||y - theta_s(y)||^2 + 2 sigma^2 naive_df(s, y).
    Heteroskedastic: sum_i (y_i - theta_i)^2 / sigma_i^2 + 2 naive_df(s, y).

    `noise` overrides the family's own noise level (scalar or length-n
    vector, matching the family's kind).  Raises DomainError for s outside
    the family's tuning domain and ShapeError for mismatched data.
    """
    y = _check_data(family, y)
    if not family.domain.contains(s):
        raise DomainError(f"tuning value {s!r} is outside the family domain")
    theta = family.estimate(s, y)
    df = family.naive_df(s, y)
    resid = y - theta
    if family.is_heteroskedastic:
        sigmas = family.sigmas if noise is None else _as_float_vector(noise, "noise", family.n)
        return np.sum((resid / sigmas) ** 2, axis=-1) + 2.0 * df
    sig = family.sigma if noise is None else float(noise)
    return np.sum(resid**2, axis=-1) + 2.0 * sig**2 * df


def tune_by_sure(family, y):
    """Minimize SURE over the family's tuning domain at a single y."""
    y = _check_data(family, y)
    if y.ndim != 1:
        raise ShapeError("tune_by_sure expects a single data vector")
    return family.tune(y)


def vectorize_rows(rule):
    """Wrap a single-vector rule so it maps (reps, n) -> (reps, n)."""

    def batched(Y):
        Y = np.asarray(Y, dtype=float)
        if Y.ndim == 1:
            return np.asarray(rule(Y), dtype=float)
        return np.stack([np.asarray(rule(row), dtype=float) for row in Y])

    return batched


def _mean_se(values):
    values = np.asarray(values, dtype=float)
    r = values.shape[0]
    se = float(values.std(ddof=1) / math.sqrt(r)) if r > 1 else 0.0
    return float(values.mean()), se, r


def mc_prediction_error(rule, model, *, reps=1000, seed=0):
    """Monte Carlo prediction error E||Y* - rule(Y)||^2 of a fixed rule.

    Draws independent (Y, Y*) pairs from the model.  Under a
    heteroskedastic model the summands are scaled by 1/sigma_i^2.
    """
    rng = np.random.default_rng(seed)
    Y = model.draw(rng, reps)
    Ystar = model.draw(rng, reps)
    resid = Ystar - rule(Y)
    if model.is_heteroskedastic:
        resid = resid / model.sigmas
    value, se, r = _mean_se(np.sum(resid**2, axis=-1))
    return MCEstimate(value, se, r)


def _df_stats(theta, Y, model, center):
    """Per-replication covariance-form df statistics for a batch."""
    if center == "theta0":
        dev = Y - model.theta0
    elif center == "sample":
        dev = Y - Y.mean(axis=0)
    else:
        raise DomainError(f"unknown centering {center!r}")
    scale = model.sigmas**2 if model.is_heteroskedastic else model.sigma**2
    return np.sum(theta * dev / scale, axis=-1)


def mc_df(rule, model, *, reps=1000, seed=0, center="theta0"):
    """Monte Carlo degrees of freedom of a rule via the covariance form.

    Uses df = sum_i Cov(rule_i(Y), Y_i) / sigma^2 (per-coordinate variances
    in the heteroskedastic case).  With the default `center="theta0"` each
    replication contributes sum_i rule_i(Y)(Y_i - theta0_i) / sigma^2, which
    is exactly unbiased; `center="sample"` substitutes the across-replication
    mean of Y when one prefers not to use the known mean.
    """
    rng = np.random.default_rng(seed)
    Y = model.draw(rng, reps)
    theta = np.asarray(rule(Y), dtype=float)
    if theta.shape != Y.shape:
        raise ShapeError("rule must map the (reps, n) batch to (reps, n) estimates")
    value, se, r = _mean_se(_df_stats(theta, Y, model, center))
    return MCEstimate(value, se, r)


def mc_edf(family, model, *, reps=1000, seed=0):
    """Monte Carlo excess degrees of freedom of the SURE-tuned rule.

    One shared set of draws feeds both terms: each replication contributes

        sum_i theta_shat,i(Y) (Y_i - theta0_i) / sigma^2  -  naive_df(s_hat, Y),

    whose mean over replications estimates df(theta_shat) - E[naive df].
    Pairing the two terms this way keeps the variance of the difference far
    below that of either term alone.
    """
    rng = np.random.default_rng(seed)
    Y = model.draw(rng, reps)
    fit = family.tune_batch(Y)
    stats = _df_stats(fit.theta_hat, Y, model, "theta0") - fit.naive_df_at_shat
    value, se, r = _mean_se(stats)
    return EdfReport(method="monte_carlo", value=value, std_error=se, reps=r)


def oracle_tuning(family, model):
    """Tuning value minimizing the exact prediction error, and that error.

    Delegates to the family's own `oracle` hook (closed forms for the
    shrinkage families, exhaustive exact-risk enumeration for discrete
    families, quadrature plus search for soft thresholding).
    """
    if not hasattr(family, "oracle"):
        raise DomainError(f"{type(family).__name__} provides no oracle tuning")
    out = family.oracle(model)
    if not isinstance(out, OracleTuning):
        out = OracleTuning(*out)
    return out


@dataclass(frozen=True)
class OracleGapReport:
    """Monte Carlo check of the tuned rule against the oracle benchmark.

    `thm_margin` is the per-replication mean of
    err_r - exopt_r - oracle_err: nonpositive in expectation because the
    tuned error is at most oracle error plus excess optimism.
    `minsure_margin` is the mean of sure_min_r - oracle_err: nonpositive
    because E[min_s sure] <= min_s E[sure].  Each check passes when the
    margin does not exceed `se_mult` standard errors.
    """

    oracle: OracleTuning
    err_tuned: MCEstimate
    exopt: MCEstimate
    mean_min_sure: MCEstimate
    thm_margin: MCEstimate
    minsure_margin: MCEstimate
    bound_holds: bool
    minsure_holds: bool


def oracle_gap_check(family, model, *, reps=2000, seed=0, se_mult=4.0):
    """Verify the oracle inequality for the SURE-tuned rule by simulation."""
    rng = np.random.default_rng(seed)
    Y = model.draw(rng, reps)
    Ystar = model.draw(rng, reps)
    fit = family.tune_batch(Y)

    resid = Ystar - fit.theta_hat
    if model.is_heteroskedastic:
        err_r = np.sum((resid / model.sigmas) ** 2, axis=-1)
        exopt_r = 2.0 * (_df_stats(fit.theta_hat, Y, model, "theta0") - fit.naive_df_at_shat)
    else:
        err_r = np.sum(resid**2, axis=-1)
        exopt_r = 2.0 * model.sigma**2 * (
            _df_stats(fit.theta_hat, Y, model, "theta0") - fit.naive_df_at_shat
        )

    oracle = oracle_tuning(family, model)
    err = MCEstimate(*_mean_se(err_r))
    exopt = MCEstimate(*_mean_se(exopt_r))
    min_sure = MCEstimate(*_mean_se(fit.sure_min))
    thm = MCEstimate(*_mean_se(err_r - exopt_r - oracle.err))
    minsure = MCEstimate(*_mean_se(fit.sure_min - oracle.err))
    return OracleGapReport(
        oracle=oracle,
        err_tuned=err,
        exopt=exopt,
        mean_min_sure=min_sure,
        thm_margin=thm,
        minsure_margin=minsure,
        bound_holds=thm.value <= se_mult * thm.std_error,
        minsure_holds=minsure.value <= se_mult * minsure.std_error,
    )
