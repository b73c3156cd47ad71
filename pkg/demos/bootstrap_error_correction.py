#!/usr/bin/env python3
"""Repairing the optimism of a tuned SURE minimum with the bootstrap.

min_s SURE(s) is biased low as an estimate of the tuned rule's prediction
error, because the same data pick s and score it.  The bootstrap estimate
of the excess degrees of freedom converts into an additive correction
2 sigma^2 edf_hat, no analytic formula required.

Each row averages 150 independent datasets: tune each one, correct each
one, then compare both columns with the truth measured from fresh-data
replays of the same mean.  The naive column sits consistently below the
truth; the corrected column closes most of that gap.
"""

import numpy as np

from suretune import (
    BootstrapConfig,
    GaussianModel,
    ShrinkMeansFamily,
    corrected_error_estimate,
)


def true_error(family, model, reps, seed):
    rng = np.random.default_rng(seed)
    Y = model.draw(rng, reps)
    Ystar = model.draw(rng, reps)
    fit = family.tune_batch(Y)
    errs = np.sum((Ystar - fit.theta_hat) ** 2, axis=1)
    return float(errs.mean()), float(errs.std(ddof=1) / np.sqrt(reps))


def main():
    datasets = 150
    cfg = BootstrapConfig(B=400, sampler="parametric", seed=17)
    print(f"tuned shrinkage, weak-sparsity mean, {datasets} datasets per row\n")
    print(f"{'n':>5} {'E[sure_min]':>12} {'E[corrected]':>13} {'true Err':>9} {'+/-':>6}")
    for n in (10, 50, 200):
        theta0 = 4.0 / np.sqrt(np.arange(1.0, n + 1))
        model = GaussianModel(theta0, sigma=1.0)
        family = ShrinkMeansFamily(n, 1.0)
        Y = model.draw(np.random.default_rng(100 + n), datasets)
        naive = np.empty(datasets)
        corrected = np.empty(datasets)
        for i in range(datasets):
            corr = corrected_error_estimate(family, Y[i], cfg)
            naive[i] = corr.sure_min
            corrected[i] = corr.estimate
        truth, se = true_error(family, model, 4000, seed=200 + n)
        print(f"{n:5d} {naive.mean():12.2f} {corrected.mean():13.2f}"
              f" {truth:9.2f} {se:6.2f}")
    print("\nthe correction is 2 sigma^2 x (bootstrap edf); it removes the")
    print("tuning bias, not the dataset-to-dataset noise of SURE itself")


if __name__ == "__main__":
    main()
