"""Linear shrinkage families tuned by SURE, with closed-form everything.

Two families live here.  Shrinkage to zero in the means model,

    theta_s(y) = y / (1 + s),        s in [0, +inf],

and its regression analogue theta_s(y) = P y / (1 + s) with P the projection
onto the column span of a design matrix.  Both admit closed-form SURE
minimizers, closed-form oracle tuning, and a one-line unbiased statistic for
the excess degrees of freedom of the tuned rule, which makes them the test
bed of choice for every Monte Carlo routine in this package.
"""

import math
import warnings

import numpy as np

from .core import (
    DomainError,
    EstimatorFamily,
    GaussianModel,
    OracleTuning,
    ShapeError,
    TunedBatch,
    TunedFit,
    TuningDomain,
)

__all__ = [
    "minimize_quadratic_sure",
    "ShrinkMeansFamily",
    "ShrinkRegressionFamily",
    "tune_shrink_means",
    "tune_shrink_regression",
    "shrink_means_positive_part",
    "edf_unbiased_shrink",
    "james_stein_positive",
    "james_stein_positive_regression",
    "unbiased_risk_sure_tuned_shrink",
    "ShrinkRiskBounds",
    "risk_bounds_shrink",
]


def minimize_quadratic_sure(a, b):
    """Minimize a*s^2/(1+s)^2 + 2*b/(1+s) over s in [0, +inf].

    Args:
        a: coefficient of the squared-shrinkage term; must be positive.
           For the means family a = ||y||^2, for regression a = ||Py||^2.
        b: coefficient of the linear term; must be positive (n sigma^2 or
           r sigma^2).

    Returns:
        The minimizer: b / (a - b) when a > b, else +inf.  The a = b case
        is folded into +inf; the criterion value is identical (= a) at both
        endpoints of the flat stretch, and +inf is the canonical choice.
    """
    if not (a > 0) or not (b > 0):
        raise DomainError("minimize_quadratic_sure requires a > 0 and b > 0")
    if a > b:
        return b / (a - b)
    return math.inf


def _project_positive_part(y2, b, y):
    # (1 - b/||y||^2)_+ y, with the 0/0 at y = 0 resolved to the zero vector.
    y2 = np.asarray(y2, dtype=float)
    frac = np.divide(b, y2, out=np.ones_like(y2), where=y2 > 0)
    return np.clip(1.0 - frac, 0.0, None)[..., None] * y


class ShrinkMeansFamily(EstimatorFamily):
    """theta_s(y) = y/(1+s) in the homoskedastic means model."""

    def __init__(self, n, sigma):
        if n < 1:
            raise DomainError("n must be at least 1")
        self.n = int(n)
        self._set_noise(sigma=sigma)
        self.domain = TuningDomain(kind="continuous", lower=0.0, upper=math.inf)

    def estimate(self, s, y):
        y = np.asarray(y, dtype=float)
        if math.isinf(s):
            return np.zeros_like(y)
        return y / (1.0 + s)

    def naive_df(self, s, y):
        # Divergence of y -> y/(1+s); data-free for this family.
        if math.isinf(s):
            return 0.0
        return self.n / (1.0 + s)

    def tune(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape != (self.n,):
            raise ShapeError(f"expected a length-{self.n} vector")
        batch = self.tune_batch(y[None, :])
        return TunedFit(
            s_hat=float(batch.s_hat[0]),
            theta_hat=batch.theta_hat[0],
            sure_min=float(batch.sure_min[0]),
            naive_df_at_shat=float(batch.naive_df_at_shat[0]),
        )

    def tune_batch(self, Y):
        Y = np.asarray(Y, dtype=float)
        if Y.ndim != 2 or Y.shape[1] != self.n:
            raise ShapeError(f"expected a (reps, {self.n}) array")
        b = self.n * self.sigma**2
        a = np.sum(Y**2, axis=1)
        finite = a > b
        s = np.where(finite, b / np.where(finite, a - b, 1.0), np.inf)
        theta = _project_positive_part(a, b, Y)
        sure_min = np.where(finite, 2.0 * b - b**2 / np.where(a > 0, a, 1.0), a)
        df = np.where(finite, self.n * (1.0 - b / np.where(a > 0, a, 1.0)), 0.0)
        return TunedBatch(s_hat=s, theta_hat=theta, sure_min=sure_min, naive_df_at_shat=df)

    def oracle(self, model):
        """Closed-form oracle tuning against a known mean vector."""
        _check_model(self, model)
        t2 = float(np.sum(model.theta0**2))
        b = self.n * self.sigma**2
        if t2 == 0.0:
            return OracleTuning(s0=math.inf, err=b)
        risk = b * t2 / (b + t2)
        return OracleTuning(s0=b / t2, err=b + risk)


class ShrinkRegressionFamily(EstimatorFamily):
    """theta_s(y) = P y/(1+s) with P the projection onto the span of X.

    The projection is built once from a singular value decomposition of the
    design; singular values below 1e-10 times the largest column norm are
    treated as zero when computing the rank.
    """

    def __init__(self, X, sigma):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ShapeError("X must be a 2-d design matrix")
        self.n = X.shape[0]
        self._set_noise(sigma=sigma)
        col_norms = np.linalg.norm(X, axis=0)
        tol = 1e-10 * (col_norms.max() if col_norms.size else 0.0)
        U, d, _ = np.linalg.svd(X, full_matrices=False)
        self.rank = int(np.sum(d > tol))
        if self.rank == 0:
            raise DomainError("design matrix has rank zero")
        self._basis = U[:, : self.rank]
        self.domain = TuningDomain(kind="continuous", lower=0.0, upper=math.inf)

    def project(self, y):
        y = np.asarray(y, dtype=float)
        return (y @ self._basis) @ self._basis.T

    def estimate(self, s, y):
        py = self.project(y)
        if math.isinf(s):
            return np.zeros_like(py)
        return py / (1.0 + s)

    def naive_df(self, s, y):
        if math.isinf(s):
            return 0.0
        return self.rank / (1.0 + s)

    def tune(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape != (self.n,):
            raise ShapeError(f"expected a length-{self.n} vector")
        batch = self.tune_batch(y[None, :])
        return TunedFit(
            s_hat=float(batch.s_hat[0]),
            theta_hat=batch.theta_hat[0],
            sure_min=float(batch.sure_min[0]),
            naive_df_at_shat=float(batch.naive_df_at_shat[0]),
        )

    def tune_batch(self, Y):
        Y = np.asarray(Y, dtype=float)
        if Y.ndim != 2 or Y.shape[1] != self.n:
            raise ShapeError(f"expected a (reps, {self.n}) array")
        b = self.rank * self.sigma**2
        coords = Y @ self._basis
        a = np.sum(coords**2, axis=1)
        resid2 = np.sum(Y**2, axis=1) - a
        finite = a > b
        s = np.where(finite, b / np.where(finite, a - b, 1.0), np.inf)
        py = coords @ self._basis.T
        theta = _project_positive_part(a, b, py)
        shrink_part = np.where(finite, 2.0 * b - b**2 / np.where(a > 0, a, 1.0), a)
        df = np.where(finite, self.rank * (1.0 - b / np.where(a > 0, a, 1.0)), 0.0)
        return TunedBatch(
            s_hat=s,
            theta_hat=theta,
            sure_min=resid2 + shrink_part,
            naive_df_at_shat=df,
        )

    def oracle(self, model):
        """Closed-form oracle tuning; the off-span bias is irreducible."""
        _check_model(self, model)
        p0 = self.project(model.theta0)
        a0 = float(np.sum(p0**2))
        off = float(np.sum(model.theta0**2)) - a0
        b = self.rank * self.sigma**2
        n_sig2 = self.n * self.sigma**2
        if a0 == 0.0:
            return OracleTuning(s0=math.inf, err=n_sig2 + off)
        return OracleTuning(s0=b / a0, err=n_sig2 + off + b * a0 / (b + a0))


def _check_model(family, model):
    if not isinstance(model, GaussianModel):
        raise DomainError("oracle tuning needs a GaussianModel")
    if model.is_heteroskedastic:
        raise DomainError("this family assumes homoskedastic noise")
    if model.n != family.n or model.sigma != family.sigma:
        raise DomainError("model does not match the family's dimensions or noise")


def tune_shrink_means(Y, sigma):
    """SURE-tune the means shrinkage family on a vector or (reps, n) batch."""
    Y = np.asarray(Y, dtype=float)
    single = Y.ndim == 1
    fam = ShrinkMeansFamily(Y.shape[-1], sigma)
    return fam.tune(Y) if single else fam.tune_batch(Y)


def tune_shrink_regression(X, Y, sigma):
    """SURE-tune the regression shrinkage family on a vector or batch."""
    Y = np.asarray(Y, dtype=float)
    single = Y.ndim == 1
    fam = ShrinkRegressionFamily(X, sigma)
    return fam.tune(Y) if single else fam.tune_batch(Y)


def shrink_means_positive_part(y, sigma):
    """The SURE-tuned means shrinkage rule written directly.

    Computes (1 - n sigma^2 / ||y||^2)_+ y without going through the tuning
    machinery.  Kept as an independent code path so tests can confirm the
    tuner lands on exactly this rule.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[-1]
    return _project_positive_part(np.sum(y**2, axis=-1), n * sigma**2, y)


def edf_unbiased_shrink(s_hat):
    """Unbiased per-realization excess-df statistic for tuned shrinkage.

    Equals 2 s_hat / (1 + s_hat) on the smooth branch and 0 at s_hat = +inf
    (where the tuned rule is locally constant zero).  Averaging this over
    draws estimates the excess degrees of freedom, which therefore never
    exceeds 2 for these families.
    """
    if math.isinf(s_hat):
        return 0.0
    if s_hat < 0:
        raise DomainError("s_hat must be nonnegative")
    return 2.0 * s_hat / (1.0 + s_hat)


def james_stein_positive(y, sigma):
    """Positive-part James-Stein estimate (1 - (n-2) sigma^2/||y||^2)_+ y."""
    y = np.asarray(y, dtype=float)
    n = y.shape[-1]
    if n < 3:
        warnings.warn("positive-part James-Stein needs n >= 3 to dominate", stacklevel=2)
    return _project_positive_part(np.sum(y**2, axis=-1), (n - 2) * sigma**2, y)


def james_stein_positive_regression(X, y, sigma):
    """Positive-part James-Stein fit shrinking P y by (rank - 2) sigma^2."""
    fam = ShrinkRegressionFamily(X, sigma)
    if fam.rank < 3:
        warnings.warn("positive-part James-Stein needs rank >= 3 to dominate", stacklevel=2)
    py = fam.project(np.asarray(y, dtype=float))
    return _project_positive_part(np.sum(py**2, axis=-1), (fam.rank - 2) * sigma**2, py)


def unbiased_risk_sure_tuned_shrink(y, sigma):
    """Unbiased estimate of the risk of the SURE-tuned means shrinkage rule.

    Returns n sigma^2 - (n-4) sigma^2 * n sigma^2 / ||y||^2 when
    ||y||^2 >= n sigma^2, and ||y||^2 - n sigma^2 otherwise.  Its
    expectation equals E||theta_hat - theta0||^2 for the tuned rule
    (1 - n sigma^2/||y||^2)_+ y.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[-1]
    b = n * sigma**2
    y2 = np.sum(y**2, axis=-1)
    shrunk = b - (n - 4) * sigma**2 * b / np.where(y2 > 0, y2, 1.0)
    out = np.where(y2 >= b, shrunk, y2 - b)
    return float(out) if np.isscalar(out) or out.ndim == 0 else out


class ShrinkRiskBounds:
    """Oracle risk and the two additive risk guarantees built on it.

    Attributes:
        oracle_risk: min_s E||theta_s(Y) - theta0||^2, in risk units
            (subtract nothing; add n sigma^2 for prediction error).
        tuned_bound: oracle_risk + 4 sigma^2, valid for the SURE-tuned rule
            because its excess optimism is at most 2 sigma^2 * 2.
        js_bound: oracle_risk + 2 sigma^2, valid for positive-part
            James-Stein when n >= 3.
    """

    def __init__(self, oracle_risk, sigma):
        self.oracle_risk = float(oracle_risk)
        self.tuned_bound = self.oracle_risk + 4.0 * sigma**2
        self.js_bound = self.oracle_risk + 2.0 * sigma**2


def risk_bounds_shrink(model):
    """Risk-scale oracle value and guarantees for the means family."""
    if model.is_heteroskedastic:
        raise DomainError("risk bounds here assume homoskedastic noise")
    fam = ShrinkMeansFamily(model.n, model.sigma)
    oracle = fam.oracle(model)
    return ShrinkRiskBounds(oracle.err - model.n * model.sigma**2, model.sigma)
