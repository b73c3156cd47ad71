"""Excess degrees of freedom for smooth families by implicit differentiation.

For a family theta(s, y) that is smooth in both arguments, with SURE
criterion G(s, y) minimized at an interior stationary point s_hat(y), the
tuned rule Theta(y) = theta(s_hat(y), y) picks up divergence beyond the
plug-in term through the data dependence of s_hat.  Differentiating the
stationarity condition dG/ds(s_hat(y), y) = 0 gives

    d s_hat / d y_i = - (d2G/dy_i ds) / (d2G/ds2),

so the per-realization excess-df statistic is

    - (d2G/ds2)^{-1} * sum_i (d theta_i/ds) (d2G/dy_i ds),

all evaluated at (s_hat, y).  Averaged over draws this estimates the excess
degrees of freedom of the tuned rule.

`SmoothFamilyHooks` packages the required callables; any derivative hook
left unset falls back to central differences with a relative step.  Closed
form hooks are provided for homoskedastic shrinkage, for per-coordinate
shrinkage under heteroskedastic noise, and (through the singular value
rotation) for ridge regression.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .core import (
    DomainError,
    EdfReport,
    EstimatorFamily,
    OracleTuning,
    ShapeError,
    TunedFit,
    TuningDomain,
)

__all__ = [
    "CurvatureError",
    "StationarityError",
    "SmoothFamilyHooks",
    "edf_implicit_diff",
    "numeric_divergence",
    "shrink_means_hooks",
    "hetero_shrink_hooks",
    "HeteroShrinkFamily",
    "tune_hetero_shrink",
    "exopt_hetero_shrink",
    "RidgeRotation",
    "ridge_as_hetero",
]

_REL_STEP = 1e-5


class StationarityError(DomainError):
    """The supplied tuning value is not an interior stationary point."""


class CurvatureError(DomainError):
    """The criterion has nonpositive curvature at the tuning value."""


@dataclass
class SmoothFamilyHooks:
    """Callables describing a smooth family and its SURE criterion.

    Parameters
    ----------
    theta : callable
        ``theta(s, y) -> (n,) array``, the estimate at tuning value s.
    g : callable
        ``g(s, y) -> float``, the SURE criterion being minimized.
    dtheta_ds, dg_ds, d2g_ds2, d2g_dyds : callable, optional
        Closed-form derivatives.  Any left as None is replaced by a
        central difference of `theta` or `g` with step
        1e-5 * (1 + |value|) in the differenced argument.
    """

    theta: Callable
    g: Callable
    dtheta_ds: Callable = None
    dg_ds: Callable = None
    d2g_ds2: Callable = None
    d2g_dyds: Callable = None

    def _hs(self, s):
        return _REL_STEP * (1.0 + abs(s))

    def eval_dtheta_ds(self, s, y):
        if self.dtheta_ds is not None:
            return np.asarray(self.dtheta_ds(s, y), dtype=float)
        h = self._hs(s)
        return (np.asarray(self.theta(s + h, y), dtype=float)
                - np.asarray(self.theta(s - h, y), dtype=float)) / (2.0 * h)

    def eval_dg_ds(self, s, y):
        if self.dg_ds is not None:
            return float(self.dg_ds(s, y))
        h = self._hs(s)
        return (self.g(s + h, y) - self.g(s - h, y)) / (2.0 * h)

    def eval_d2g_ds2(self, s, y):
        if self.d2g_ds2 is not None:
            return float(self.d2g_ds2(s, y))
        h = self._hs(s)
        return (self.g(s + h, y) - 2.0 * self.g(s, y) + self.g(s - h, y)) / h**2

    def eval_d2g_dyds(self, s, y):
        if self.d2g_dyds is not None:
            return np.asarray(self.d2g_dyds(s, y), dtype=float)
        y = np.asarray(y, dtype=float)
        hs = self._hs(s)
        out = np.empty(y.shape[0])
        for i in range(y.shape[0]):
            hy = _REL_STEP * (1.0 + abs(y[i]))
            yp, ym = y.copy(), y.copy()
            yp[i] += hy
            ym[i] -= hy
            out[i] = (
                self.g(s + hs, yp) - self.g(s - hs, yp)
                - self.g(s + hs, ym) + self.g(s - hs, ym)
            ) / (4.0 * hs * hy)
        return out


def edf_implicit_diff(hooks, y, s_hat):
    """Excess-df statistic at one realization, by implicit differentiation.

    Parameters
    ----------
    hooks : SmoothFamilyHooks
        The family and criterion, with whatever derivatives are available.
    y : array
        The data vector at which the family was tuned.
    s_hat : float
        The tuned value; must be a finite interior stationary point of
        ``s -> g(s, y)``.

    Returns
    -------
    EdfReport
        ``method="implicit_diff"`` with ``std_error=0`` (the statistic is
        deterministic given y; averaging over realizations is the caller's
        business).

    Raises
    ------
    StationarityError
        If s_hat is infinite or dG/ds is not ~0 there.
    CurvatureError
        If d2G/ds2 is not strictly positive there.
    """
    y = np.asarray(y, dtype=float)
    if not math.isfinite(s_hat):
        raise StationarityError("implicit differentiation needs a finite interior s_hat")
    slope = hooks.eval_dg_ds(s_hat, y)
    scale = max(1.0, abs(hooks.g(s_hat, y)))
    if abs(slope) > 1e-6 * scale:
        raise StationarityError(
            f"dG/ds = {slope:.3e} at s_hat = {s_hat:.6g}; not a stationary point"
        )
    curv = hooks.eval_d2g_ds2(s_hat, y)
    if not curv > 0:
        raise CurvatureError(f"d2G/ds2 = {curv:.3e} at s_hat = {s_hat:.6g}")
    cross = hooks.eval_d2g_dyds(s_hat, y)
    dtheta = hooks.eval_dtheta_ds(s_hat, y)
    value = -float(np.dot(dtheta, cross)) / curv
    return EdfReport(method="implicit_diff", value=value, std_error=0.0, reps=1)


def numeric_divergence(rule, y, *, sigma=1.0, step=None):
    """Central-difference divergence sum_i d rule_i / d y_i at y.

    The rule must accept a (2n, n) batch; all perturbed evaluations are done
    in one call.  Default step is 1e-5 * sigma.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise ShapeError("numeric_divergence expects a single data vector")
    h = _REL_STEP * sigma if step is None else float(step)
    n = y.shape[0]
    shifts = np.concatenate([np.eye(n) * h, -np.eye(n) * h])
    values = np.asarray(rule(y + shifts), dtype=float)
    if values.shape != (2 * n, n):
        raise ShapeError("rule must map a (2n, n) batch to (2n, n) estimates")
    diag_plus = values[:n][np.diag_indices(n)]
    diag_minus = values[n:][np.diag_indices(n)]
    return float(np.sum(diag_plus - diag_minus) / (2.0 * h))


def shrink_means_hooks(n, sigma):
    """Closed-form hooks for theta_s(y) = y/(1+s) under constant noise."""

    def theta(s, y):
        return np.asarray(y, dtype=float) / (1.0 + s)

    def g(s, y):
        y = np.asarray(y, dtype=float)
        return float(np.sum(y**2) * s**2 / (1.0 + s) ** 2 + 2.0 * sigma**2 * n / (1.0 + s))

    def dg_ds(s, y):
        y2 = float(np.sum(np.asarray(y, dtype=float) ** 2))
        return 2.0 * s * y2 / (1.0 + s) ** 3 - 2.0 * sigma**2 * n / (1.0 + s) ** 2

    def d2g_ds2(s, y):
        y2 = float(np.sum(np.asarray(y, dtype=float) ** 2))
        return y2 * (2.0 - 4.0 * s) / (1.0 + s) ** 4 + 4.0 * sigma**2 * n / (1.0 + s) ** 3

    def d2g_dyds(s, y):
        return 4.0 * np.asarray(y, dtype=float) * s / (1.0 + s) ** 3

    def dtheta_ds(s, y):
        return -np.asarray(y, dtype=float) / (1.0 + s) ** 2

    return SmoothFamilyHooks(
        theta=theta, g=g, dtheta_ds=dtheta_ds, dg_ds=dg_ds,
        d2g_ds2=d2g_ds2, d2g_dyds=d2g_dyds,
    )


def hetero_shrink_hooks(sigmas):
    """Closed-form hooks for theta_s(y)_i = y_i/(1 + sigma_i^2 s).

    The criterion is the variance-scaled SURE
    sum_i (y_i - theta_i)^2/sigma_i^2 + 2 sum_i 1/(1 + sigma_i^2 s).
    """
    sig2 = np.asarray(sigmas, dtype=float) ** 2
    if np.any(sig2 <= 0):
        raise DomainError("sigmas must be positive")

    def theta(s, y):
        return np.asarray(y, dtype=float) / (1.0 + sig2 * s)

    def g(s, y):
        y = np.asarray(y, dtype=float)
        u = sig2 * s
        return float(np.sum(y**2 * sig2 * s**2 / (1.0 + u) ** 2) + 2.0 * np.sum(1.0 / (1.0 + u)))

    def dg_ds(s, y):
        y = np.asarray(y, dtype=float)
        u = sig2 * s
        return float(np.sum(2.0 * y**2 * sig2 * s / (1.0 + u) ** 3 - 2.0 * sig2 / (1.0 + u) ** 2))

    def d2g_ds2(s, y):
        y = np.asarray(y, dtype=float)
        u = sig2 * s
        return float(
            np.sum(2.0 * y**2 * sig2 * (1.0 - 2.0 * u) / (1.0 + u) ** 4)
            + np.sum(4.0 * sig2**2 / (1.0 + u) ** 3)
        )

    def d2g_dyds(s, y):
        u = sig2 * s
        return 4.0 * np.asarray(y, dtype=float) * sig2 * s / (1.0 + u) ** 3

    def dtheta_ds(s, y):
        u = sig2 * s
        return -np.asarray(y, dtype=float) * sig2 / (1.0 + u) ** 2

    return SmoothFamilyHooks(
        theta=theta, g=g, dtheta_ds=dtheta_ds, dg_ds=dg_ds,
        d2g_ds2=d2g_ds2, d2g_dyds=d2g_dyds,
    )


class HeteroShrinkFamily(EstimatorFamily):
    """Per-coordinate shrinkage y_i/(1 + sigma_i^2 s) with scaled SURE.

    The plug-in df here is the bare divergence sum_i 1/(1 + sigma_i^2 s);
    the scaled SURE convention adds it with factor 2, no sigma^2.
    """

    def __init__(self, sigmas):
        sigmas = np.asarray(sigmas, dtype=float)
        self.n = sigmas.shape[0]
        self._set_noise(sigmas=sigmas, n=self.n)
        self.domain = TuningDomain(kind="continuous", lower=0.0, upper=math.inf)
        self._sig2 = sigmas**2

    def estimate(self, s, y):
        y = np.asarray(y, dtype=float)
        if math.isinf(s):
            return np.zeros_like(y)
        return y / (1.0 + self._sig2 * s)

    def naive_df(self, s, y):
        if math.isinf(s):
            return 0.0
        return float(np.sum(1.0 / (1.0 + self._sig2 * s)))

    def tune(self, y):
        return tune_hetero_shrink(y, self.sigmas)

    def tune_batch(self, Y):
        # No closed-form batch minimizer here; fall back to the row loop.
        return super().tune_batch(Y)

    def scaled_risk(self, theta0, s):
        """Exact sum_i E(theta_i - theta0_i)^2 / sigma_i^2 at fixed s."""
        theta0 = np.asarray(theta0, dtype=float)
        if math.isinf(s):
            return float(np.sum(theta0**2 / self._sig2))
        u = self._sig2 * s
        bias2 = theta0**2 * (u / (1.0 + u)) ** 2
        var = self._sig2 / (1.0 + u) ** 2
        return float(np.sum((bias2 + var) / self._sig2))

    def oracle(self, model):
        if not model.is_heteroskedastic or model.n != self.n:
            raise DomainError("model does not match this family")
        if not np.array_equal(model.sigmas, self.sigmas):
            raise DomainError("model noise levels differ from the family's")
        theta0 = model.theta0

        def err(s):
            return self.n + self.scaled_risk(theta0, s)

        scale = 1.0 / float(np.mean(self._sig2))
        grid = np.concatenate([[0.0], scale * np.geomspace(1e-4, 1e8, 64)])
        vals = np.array([err(s) for s in grid])
        k = int(np.argmin(vals))
        lo = grid[max(k - 1, 0)]
        hi = grid[min(k + 1, len(grid) - 1)]
        best_s, best_err = float(grid[k]), float(vals[k])
        if hi > lo:
            res = minimize_scalar(err, bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-12 * max(1.0, hi)})
            if res.fun < best_err:
                best_s, best_err = float(res.x), float(res.fun)
        err_inf = err(math.inf)
        if err_inf < best_err:
            return OracleTuning(s0=math.inf, err=err_inf)
        return OracleTuning(s0=best_s, err=best_err)


def _hetero_g_batch(y, sig2, s_values):
    """Scaled SURE at many s values for one y: shape (len(s_values),)."""
    u = sig2[None, :] * s_values[:, None]
    resid = np.sum(y[None, :] ** 2 * sig2[None, :] * s_values[:, None] ** 2 / (1.0 + u) ** 2, axis=1)
    return resid + 2.0 * np.sum(1.0 / (1.0 + u), axis=1)


def tune_hetero_shrink(y, sigmas):
    """Minimize scaled SURE for per-coordinate shrinkage, tracking modality.

    The criterion always slopes downward at s = 0, so the search covers a
    64-point log grid spanning [1e-4, 1e8] around 1/mean(sigma_i^2), refines
    every bracketed interior minimum (root of the closed-form slope when it
    changes sign, bounded golden search otherwise), and compares against the
    fully shrunk endpoint s = +inf.  Ties resolve to the smallest s.  The
    returned fit has `multimodal=True` when more than one distinct interior
    local minimum was found.
    """
    y = np.asarray(y, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    if y.shape != sigmas.shape or y.ndim != 1:
        raise ShapeError("y and sigmas must be matching vectors")
    hooks = hetero_shrink_hooks(sigmas)
    sig2 = sigmas**2
    scale = 1.0 / float(np.mean(sig2))
    grid = scale * np.geomspace(1e-4, 1e8, 64)
    vals = _hetero_g_batch(y, sig2, grid)
    g_inf = float(np.sum(y**2 / sig2))

    # Interior local minima on the grid; compare the edges against s=0
    # (criterion value there is 2n, slope strictly negative) and s=inf.
    left = np.concatenate([[2.0 * y.shape[0]], vals[:-1]])
    right = np.concatenate([vals[1:], [g_inf]])
    is_min = (vals <= left) & (vals <= right)
    candidates = []
    for k in np.nonzero(is_min)[0]:
        lo = grid[k - 1] if k > 0 else grid[0] * 1e-2
        hi = grid[k + 1] if k + 1 < len(grid) else grid[-1] * 1e2
        d_lo, d_hi = hooks.dg_ds(lo, y), hooks.dg_ds(hi, y)
        if d_lo < 0.0 < d_hi:
            s_star = brentq(lambda s: hooks.dg_ds(s, y), lo, hi, xtol=1e-14 * max(1.0, hi))
        else:
            res = minimize_scalar(
                lambda u: hooks.g(math.expm1(u), y),
                bounds=(math.log1p(lo), math.log1p(hi)),
                method="bounded",
                options={"xatol": 1e-14},
            )
            s_star = math.expm1(res.x)
        candidates.append((float(s_star), hooks.g(float(s_star), y)))

    # Deduplicate refinements that converged to the same point.
    distinct = []
    for s_star, val in sorted(candidates):
        if not distinct or abs(math.log1p(s_star) - math.log1p(distinct[-1][0])) > 1e-6:
            distinct.append((s_star, val))
    multimodal = len(distinct) > 1

    best_s, best_val = math.inf, g_inf
    for s_star, val in distinct:
        if val < best_val - 1e-12 * max(1.0, abs(best_val)) or (
            math.isinf(best_s) and val <= best_val
        ):
            best_s, best_val = s_star, val
    fam = HeteroShrinkFamily(sigmas)
    return TunedFit(
        s_hat=best_s,
        theta_hat=fam.estimate(best_s, y),
        sure_min=float(best_val),
        naive_df_at_shat=fam.naive_df(best_s, y),
        multimodal=multimodal,
    )


def exopt_hetero_shrink(y, sigmas, s_hat):
    """Observed excess-optimism statistic for tuned per-coordinate shrinkage.

    Written directly from the ratio form

        2 * sum_i 2 y_i^2 sigma_i^4 s / (1+sigma_i^2 s)^5
        / sum_i (sigma_i^2/(1+sigma_i^2 s)^2) [ y_i^2 (1 - 4 u_i/(1+u_i)
          + 3 u_i^2/(1+u_i)^2) + 2 sigma_i^2/(1+u_i) ],   u_i = sigma_i^2 s,

    which equals exactly twice the implicit-differentiation excess-df
    statistic at the same point (in scaled error units).  Kept as an
    independent code path for cross-checking.
    """
    y = np.asarray(y, dtype=float)
    sig2 = np.asarray(sigmas, dtype=float) ** 2
    if not math.isfinite(s_hat) or s_hat <= 0:
        raise StationarityError("the ratio form needs a finite positive s_hat")
    u = sig2 * s_hat
    num = np.sum(4.0 * y**2 * sig2**2 * s_hat / (1.0 + u) ** 5)
    den = np.sum(
        sig2 / (1.0 + u) ** 2
        * (y**2 * (1.0 - 4.0 * u / (1.0 + u) + 3.0 * u**2 / (1.0 + u) ** 2)
           + 2.0 * sig2 / (1.0 + u))
    )
    if den <= 0:
        raise CurvatureError("criterion curvature is nonpositive at s_hat")
    return float(num / den)


class RidgeRotation:
    """Ridge regression recast as heteroskedastic shrinkage of rotated data.

    With X = U diag(d) V^T (positive singular values only) and
    w = diag(1/d) U^T y, the coordinates w_i are independent with variance
    sigma^2/d_i^2, and the ridge fit with penalty t equals the
    per-coordinate shrinkage w_i/(1 + (sigma^2/d_i^2) s) at s = t/sigma^2.
    Tuning s by scaled SURE in the rotated problem therefore tunes the
    ridge penalty.
    """

    def __init__(self, X, y, sigma=1.0):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ShapeError("X must be 2-d with rows matching y")
        col_norms = np.linalg.norm(X, axis=0)
        tol = 1e-10 * (col_norms.max() if col_norms.size else 0.0)
        U, d, Vt = np.linalg.svd(X, full_matrices=False)
        keep = d > tol
        if not np.any(keep):
            raise DomainError("design matrix has rank zero")
        self.X, self.y, self.sigma = X, y, float(sigma)
        self.U, self.d, self.Vt = U[:, keep], d[keep], Vt[keep]
        self.w = (self.U.T @ y) / self.d
        self.family = HeteroShrinkFamily(self.sigma / self.d)

    def penalty_of(self, s):
        """Ridge penalty t corresponding to the family tuning value s."""
        return self.sigma**2 * s

    def s_of_penalty(self, t):
        return t / self.sigma**2

    def coef(self, s):
        """Ridge coefficient vector at family tuning value s."""
        alpha = self.family.estimate(s, self.w)
        return self.Vt.T @ alpha

    def fitted(self, s):
        alpha = self.family.estimate(s, self.w)
        return self.U @ (self.d * alpha)

    def tune(self):
        """Scaled-SURE tuning of the rotated problem."""
        return tune_hetero_shrink(self.w, self.family.sigmas)


def ridge_as_hetero(X, y, sigma=1.0):
    """Build the ridge-to-heteroskedastic-shrinkage rotation for (X, y)."""
    return RidgeRotation(X, y, sigma=sigma)
