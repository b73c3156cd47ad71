"""Batch simulation harness: tuned-rule error accounting over a design grid.

A `SimSpec` names an estimator family, mean settings, sample sizes, noise
level, replication counts, and an optional bootstrap configuration.
`run_simulation` then walks the (setting, n) grid and emits long-format rows
(family, setting, n, quantity, method, mean, std_error, reps, status), one
per estimator/quantity pairing:

    quantity edf : monte_carlo, unbiased, implicit_diff, bootstrap,
                   observed_scaled_exopt
    quantity df  : naive, unbiased, monte_carlo, bootstrap, naive_bootstrap
    quantity err : naive (the tuned SURE minimum), corrected (bootstrap
                   debiased), test (independent draw)

plus `err_over_n` copies of the error rows normalized by the sample size.
Pairings a family does not support (and bootstrap rows when B = 0) are
emitted with status="skipped" rather than dropped, so the output shape is
config-independent.

Determinism: the data block for grid cell (setting i, size j) is drawn from
SeedSequence([seed, j, i]) and per-repetition bootstrap streams from
SeedSequence([seed, j, i, rep]); results are byte-identical across reruns
and never depend on thread count.
"""

import io
import math
import sys
from dataclasses import dataclass

import numpy as np

from .bootstrap import BootstrapConfig, _bootstrap_stats
from .core import DomainError, GaussianModel, TunedFit, TuningDomain, _df_stats
from .shrinkage import ShrinkMeansFamily
from .softthresh import SoftThreshFamily
from .stein import edf_implicit_diff, shrink_means_hooks

__all__ = [
    "SETTINGS",
    "FAMILIES",
    "SimSpec",
    "SimRow",
    "ConfigError",
    "parse_config",
    "theta0_for",
    "run_simulation",
    "write_csv",
    "PRESETS",
]

SETTINGS = ("null", "weak_sparsity", "strong_sparsity", "custom")
FAMILIES = ("shrink_means", "soft_threshold", "singleton_shrink")


class SingletonShrinkFamily(ShrinkMeansFamily):
    """Shrinkage at one fixed tuning value; no data-driven search at all.

    Useful as a degenerate reference: with nothing tuned the true excess df
    is zero, so the unbiased statistic is identically 0 and the Monte Carlo
    and bootstrap estimates straddle 0 (the bootstrap one carries a small
    -df/B centering bias at tiny B).
    """

    def __init__(self, n, sigma, s=1.0):
        super().__init__(n, sigma)
        if not 0.0 <= s < math.inf:
            raise DomainError("the fixed tuning value must be finite and nonnegative")
        self.s_fixed = float(s)
        self.domain = TuningDomain(kind="continuous", lower=self.s_fixed, upper=self.s_fixed)

    def tune(self, y):
        y = np.asarray(y, dtype=float)
        s = self.s_fixed
        return TunedFit(
            s_hat=s,
            theta_hat=self.estimate(s, y),
            sure_min=float(self.sure(s, y)),
            naive_df_at_shat=self.naive_df(s, y),
        )

    def tune_batch(self, Y):
        Y = np.asarray(Y, dtype=float)
        s = self.s_fixed
        from .core import TunedBatch

        return TunedBatch(
            s_hat=np.full(Y.shape[0], s),
            theta_hat=self.estimate(s, Y),
            sure_min=np.asarray(self.sure(s, Y), dtype=float),
            naive_df_at_shat=np.full(Y.shape[0], self.naive_df(s, Y)),
        )


@dataclass(frozen=True)
class SimSpec:
    """A full simulation request; fields double as config-file keys."""

    family: str = "shrink_means"
    setting: tuple = ("null",)
    sizes: tuple = (10, 50, 200)
    sigma: float = 1.0
    outer_reps: int = 1000
    bootstrap_B: int = 0
    bootstrap_sampler: str = "parametric"
    bootstrap_c: float = 1.0
    seed: int = 0
    out: str = "-"
    theta0: tuple = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"family must be one of {FAMILIES}")
        settings = (self.setting,) if isinstance(self.setting, str) else tuple(self.setting)
        object.__setattr__(self, "setting", settings)
        for s in settings:
            if s not in SETTINGS:
                raise DomainError(f"setting {s!r} not among {SETTINGS}")
        sizes = tuple(int(n) for n in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if not sizes or any(n < 1 for n in sizes):
            raise DomainError("sizes must be positive")
        if self.outer_reps < 2:
            raise DomainError("outer_reps must be at least 2")
        if self.sigma <= 0:
            raise DomainError("sigma must be positive")
        if self.bootstrap_B < 0:
            raise DomainError("bootstrap_B must be nonnegative (0 disables)")
        if self.bootstrap_B:
            # Fail now on a sampler/scale combination bootstrap would reject.
            BootstrapConfig(B=self.bootstrap_B, sampler=self.bootstrap_sampler,
                            c=self.bootstrap_c, seed=0)
        if "custom" in settings:
            if self.theta0 is None:
                raise DomainError("setting=custom requires theta0")
            theta0 = tuple(float(v) for v in self.theta0)
            object.__setattr__(self, "theta0", theta0)
            bad = [n for n in sizes if n != len(theta0)]
            if bad:
                raise DomainError("custom theta0 length must equal every size")


def theta0_for(setting, n, custom=None):
    """Mean vector for a named setting at sample size n.

    null: zeros.  weak_sparsity: 4 i^{-1/2}, i = 1..n.  strong_sparsity:
    4 on the first floor(log n) coordinates (natural log), 0 elsewhere.
    custom: the supplied vector.
    """
    if setting == "null":
        return np.zeros(n)
    if setting == "weak_sparsity":
        return 4.0 / np.sqrt(np.arange(1, n + 1, dtype=float))
    if setting == "strong_sparsity":
        theta = np.zeros(n)
        theta[: int(math.floor(math.log(n)))] = 4.0
        return theta
    if setting == "custom":
        if custom is None:
            raise DomainError("custom setting needs a vector")
        arr = np.asarray(custom, dtype=float)
        if arr.shape != (n,):
            raise DomainError(f"custom theta0 has length {arr.size}, expected {n}")
        return arr
    raise DomainError(f"unknown setting {setting!r}")


def _make_family(spec, n):
    if spec.family == "shrink_means":
        return ShrinkMeansFamily(n, spec.sigma)
    if spec.family == "soft_threshold":
        return SoftThreshFamily(n, spec.sigma)
    return SingletonShrinkFamily(n, spec.sigma)


@dataclass
class SimRow:
    family: str
    setting: str
    n: int
    quantity: str
    method: str
    value: float = None
    std_error: float = None
    reps: int = 0
    status: str = "ok"


def _implicit_diff_stats(family, Y, fit):
    """Per-rep implicit-diff excess-df statistics for smooth shrinkage.

    Repetitions tuned to the boundary (s_hat = +inf) contribute 0: the
    tuned rule is locally constant there, so the selection adds no
    divergence.
    """
    hooks = shrink_means_hooks(family.n, family.sigma)
    out = np.zeros(Y.shape[0])
    for r in range(Y.shape[0]):
        s = fit.s_hat[r]
        if math.isinf(s):
            continue
        out[r] = edf_implicit_diff(hooks, Y[r], s).value
    return out


def run_simulation(spec):
    """Execute the grid and return the long-format result rows."""
    rows = []
    tuned_shrink = spec.family == "shrink_means"
    fixed_rule = spec.family == "singleton_shrink"
    for i_setting, setting in enumerate(spec.setting):
        for j_size, n in enumerate(spec.sizes):
            family = _make_family(spec, n)
            theta0 = theta0_for(setting, n, custom=spec.theta0)
            model = GaussianModel(theta0, sigma=spec.sigma)
            rng = np.random.default_rng(np.random.SeedSequence([spec.seed, j_size, i_setting]))
            R = spec.outer_reps
            Y = model.draw(rng, R)
            Ystar = model.draw(rng, R)
            fit = family.tune_batch(Y)

            cov_stats = _df_stats(fit.theta_hat, Y, model, "theta0")
            mc_edf_stats = cov_stats - fit.naive_df_at_shat
            test_err = np.sum((Ystar - fit.theta_hat) ** 2, axis=1)
            scaled_exopt = (test_err - fit.sure_min) / (2.0 * spec.sigma**2)

            if tuned_shrink:
                finite = np.isfinite(fit.s_hat)
                unbiased_edf = np.zeros(R)
                sf = fit.s_hat[finite]
                unbiased_edf[finite] = 2.0 * sf / (1.0 + sf)
                implicit_edf = _implicit_diff_stats(family, Y, fit)
            elif fixed_rule:
                # Nothing is tuned, so the plug-in df is already unbiased
                # and there is no stationarity condition to differentiate.
                unbiased_edf = np.zeros(R)
                implicit_edf = None
            else:
                unbiased_edf = implicit_edf = None

            if spec.bootstrap_B:
                boot_edf = np.empty(R)
                boot_df_naive = np.empty(R)
                for r in range(R):
                    child = np.random.SeedSequence([spec.seed, j_size, i_setting, r])
                    cfg = BootstrapConfig(
                        B=spec.bootstrap_B,
                        sampler=spec.bootstrap_sampler,
                        c=spec.bootstrap_c,
                        seed=int(child.generate_state(1)[0]),
                    )
                    _, cov_form, plugin = _bootstrap_stats(family, Y[r], cfg)
                    boot_edf[r] = float((cov_form - plugin).mean())
                    boot_df_naive[r] = float(cov_form.mean())
            else:
                boot_edf = boot_df_naive = None

            def add(quantity, method, stats, scale=1.0):
                if stats is None:
                    rows.append(SimRow(spec.family, setting, n, quantity, method,
                                       status="skipped"))
                    return
                stats = np.asarray(stats, dtype=float) * scale
                se = float(stats.std(ddof=1) / math.sqrt(R))
                rows.append(SimRow(spec.family, setting, n, quantity, method,
                                   value=float(stats.mean()), std_error=se, reps=R))

            add("edf", "monte_carlo", mc_edf_stats)
            add("edf", "unbiased", unbiased_edf)
            add("edf", "implicit_diff", implicit_edf)
            add("edf", "bootstrap", boot_edf)
            add("edf", "observed_scaled_exopt", scaled_exopt)

            add("df", "naive", fit.naive_df_at_shat)
            add("df", "unbiased",
                fit.naive_df_at_shat + unbiased_edf if unbiased_edf is not None else None)
            add("df", "monte_carlo", cov_stats)
            add("df", "bootstrap",
                fit.naive_df_at_shat + boot_edf if boot_edf is not None else None)
            add("df", "naive_bootstrap", boot_df_naive)

            corrected = (
                fit.sure_min + 2.0 * spec.sigma**2 * boot_edf if boot_edf is not None else None
            )
            for quantity, scale in (("err", 1.0), ("err_over_n", 1.0 / n)):
                add(quantity, "naive", fit.sure_min, scale)
                add(quantity, "corrected", corrected, scale)
                add(quantity, "test", test_err, scale)
    return rows


def _fmt(x):
    return "" if x is None else f"{x:.12g}"


def write_csv(rows, dest="-"):
    """Write rows as CSV; dest may be a path, '-' for stdout, or a stream."""
    own = False
    if dest == "-":
        stream = sys.stdout
    elif isinstance(dest, (str, bytes)):
        stream = open(dest, "w", encoding="ascii")
        own = True
    else:
        stream = dest
    try:
        stream.write("family,setting,n,quantity,method,value,std_error,reps,status\n")
        for r in rows:
            stream.write(
                f"{r.family},{r.setting},{r.n},{r.quantity},{r.method},"
                f"{_fmt(r.value)},{_fmt(r.std_error)},{r.reps},{r.status}\n"
            )
    finally:
        if own:
            stream.close()


def rows_to_csv_text(rows):
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


class ConfigError(ValueError):
    """A config file failed to parse; carries the offending line number."""

    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


_PARSERS = {
    "family": str,
    "setting": lambda v: tuple(part.strip() for part in v.split(",") if part.strip()),
    "sizes": lambda v: tuple(int(part) for part in v.split(",") if part.strip()),
    "sigma": float,
    "outer_reps": int,
    "bootstrap_B": int,
    "bootstrap_sampler": str,
    "bootstrap_c": float,
    "seed": int,
    "out": str,
    "theta0": lambda v: tuple(float(part) for part in v.split(",") if part.strip()),
}


def parse_config(text):
    """Parse flat key=value config text into a SimSpec.

    Keys are exactly the SimSpec field names; `setting`, `sizes`, and
    `theta0` accept comma-separated lists.  Lines starting with # and blank
    lines are ignored.  All problems raise ConfigError with the 1-based
    line number.
    """
    values = {}
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(lineno, f"expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _PARSERS:
            raise ConfigError(lineno, f"unknown key {key!r}; valid keys: {', '.join(_PARSERS)}")
        if key in seen:
            raise ConfigError(lineno, f"duplicate key {key!r} (first set on line {seen[key]})")
        seen[key] = lineno
        try:
            values[key] = _PARSERS[key](val)
        except ValueError as exc:
            raise ConfigError(lineno, f"bad value for {key!r}: {exc}") from None
    try:
        return SimSpec(**values)
    except DomainError as exc:
        raise ConfigError(0, str(exc)) from None


def _paper_sizes():
    # 10 sample sizes, log-spaced from 10 to 5000.
    return tuple(int(round(v)) for v in np.geomspace(10, 5000, 10))


PRESETS = {
    "paper-scale": SimSpec(
        family="shrink_means",
        setting=("null", "weak_sparsity", "strong_sparsity"),
        sizes=_paper_sizes(),
        sigma=1.0,
        outer_reps=5000,
        bootstrap_B=1000,
        bootstrap_sampler="parametric",
        seed=0,
    ),
    "desk": SimSpec(
        family="shrink_means",
        setting=("null", "weak_sparsity", "strong_sparsity"),
        sizes=(10, 50, 200),
        sigma=1.0,
        outer_reps=1000,
        bootstrap_B=200,
        bootstrap_sampler="parametric",
        seed=0,
    ),
    "smoke": SimSpec(
        family="shrink_means",
        setting=("null",),
        sizes=(10, 25),
        sigma=1.0,
        outer_reps=40,
        bootstrap_B=16,
        bootstrap_sampler="parametric",
        seed=0,
    ),
}
