"""Command line front end.

Subcommands
-----------
tune       fit a family to a data vector; prints s_hat, SURE minimum, df
edf        excess degrees of freedom by a chosen method
simulate   run a simulation grid from a config file or preset, write CSV
bounds     evaluate named bound quantities (closed form or Monte Carlo)
selfcheck  run the acceptance battery; nonzero exit if any criterion fails

Global flags --seed, --threads, and --out come before the subcommand.
--threads is accepted for symmetry with batch schedulers but never feeds
random number generation, so identical seeds give byte-identical output at
any thread count.

Vector-valued options (--theta0, --sigmas, --center, ...) accept either a
comma-separated list or @path to read the numbers from a file.

Exit status: 0 on success, 1 when a computation or selfcheck fails, 2 on
usage errors (including malformed config files).
"""

import argparse
import dataclasses
import io
import sys

import numpy as np

from .bootstrap import BootstrapConfig, bootstrap_edf
from .bounds import (
    best_subset_constant,
    chi_sq_max_bound,
    edf_upper_bound_simplified,
    gas_stations_rotation,
    gaussian_surface_area_ball,
    general_theta_bound,
    nested_bound_tail_split,
    nested_null_edf_bound,
)
from .core import DomainError, EdfReport, GaussianModel, ShapeError, mc_edf
from .shrinkage import ShrinkMeansFamily, ShrinkRegressionFamily, edf_unbiased_shrink
from .simulate import PRESETS, ConfigError, parse_config, run_simulation, write_csv
from .softthresh import SoftThreshFamily
from .stein import HeteroShrinkFamily, edf_implicit_diff, hetero_shrink_hooks, shrink_means_hooks

CLI_FAMILIES = ("shrink-means", "shrink-regression", "soft-threshold", "hetero-shrink")


def _read_text_vector(text):
    vals = np.loadtxt(io.StringIO(text.replace(",", " ")), dtype=float, ndmin=1)
    return np.ravel(vals)


def _read_vector(path):
    with open(path, "r", encoding="ascii") as fh:
        vec = _read_text_vector(fh.read())
    if vec.size == 0:
        raise DomainError(f"{path} holds no numbers")
    return vec


def _read_matrix(path):
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    X = np.loadtxt(io.StringIO(text.replace(",", " ")), dtype=float, ndmin=2)
    if X.size == 0:
        raise DomainError(f"{path} holds no numbers")
    return X


def _vector_option(value, name):
    """Parse 'v1,v2,...' or '@path' into a float vector."""
    if value.startswith("@"):
        return _read_vector(value[1:])
    try:
        return _read_text_vector(value)
    except ValueError:
        raise DomainError(f"could not parse --{name} as numbers: {value!r}") from None


def _build_family(args, n=None):
    name = args.family
    if name == "shrink-means":
        if n is None:
            raise DomainError("shrink-means needs data or --n")
        return ShrinkMeansFamily(n, args.sigma)
    if name == "soft-threshold":
        if n is None:
            raise DomainError("soft-threshold needs data or --n")
        return SoftThreshFamily(n, args.sigma)
    if name == "shrink-regression":
        if not getattr(args, "design", None):
            raise DomainError("shrink-regression needs --design FILE")
        return ShrinkRegressionFamily(_read_matrix(args.design), args.sigma)
    if not getattr(args, "sigmas", None):
        raise DomainError("hetero-shrink needs --sigmas (list or @path)")
    return HeteroShrinkFamily(_vector_option(args.sigmas, "sigmas"))


def _print_kv(stream, **kv):
    for key, val in kv.items():
        if isinstance(val, float):
            stream.write(f"{key}={val:.12g}\n")
        else:
            stream.write(f"{key}={val}\n")


def _cmd_tune(args):
    y = _read_vector(args.data)
    family = _build_family(args, n=y.shape[0])
    fit = family.tune(y)
    out = sys.stdout
    _print_kv(out, family=args.family, n=y.shape[0], s_hat=float(fit.s_hat),
              sure_min=fit.sure_min, naive_df=float(fit.naive_df_at_shat))
    head = ",".join(f"{v:.6g}" for v in fit.theta_hat[:8])
    suffix = ",..." if fit.theta_hat.shape[0] > 8 else ""
    out.write(f"theta_hat_head={head}{suffix}\n")
    _print_kv(out, theta_hat_norm=float(np.linalg.norm(fit.theta_hat)))
    if args.out and args.out != "-":
        np.savetxt(args.out, fit.theta_hat, fmt="%.12g")
        out.write(f"wrote {args.out}\n")
    return 0


def _edf_monte_carlo(args):
    if args.theta0 is not None:
        theta0 = _vector_option(args.theta0, "theta0")
        n = theta0.shape[0]
    elif args.n:
        theta0, n = np.zeros(args.n), args.n
    elif args.family == "hetero-shrink" and args.sigmas:
        n = _vector_option(args.sigmas, "sigmas").shape[0]
        theta0 = np.zeros(n)
    else:
        raise DomainError("monte-carlo needs --theta0 or --n to size the model")
    family = _build_family(args, n=n)
    if args.family == "hetero-shrink":
        model = GaussianModel(theta0, sigmas=family.sigmas)
    else:
        model = GaussianModel(theta0, sigma=args.sigma)
    return mc_edf(family, model, reps=args.reps, seed=args.seed or 0)


def _cmd_edf(args):
    method = args.method
    if method == "monte-carlo":
        report = _edf_monte_carlo(args)
    else:
        y = _read_vector(args.data) if args.data else None
        if y is None:
            raise DomainError(f"method {method} needs --data FILE")
        family = _build_family(args, n=y.shape[0])
        if method == "analytic":
            if args.family not in ("shrink-means", "shrink-regression"):
                raise DomainError("analytic excess df exists only for the shrinkage families")
            stat = edf_unbiased_shrink(family.tune(y).s_hat)
            report = EdfReport(method="analytic_unbiased", value=stat,
                               std_error=0.0, reps=1)
        elif method == "implicit-diff":
            if args.family == "shrink-means":
                hooks = shrink_means_hooks(y.shape[0], args.sigma)
            elif args.family == "hetero-shrink":
                hooks = hetero_shrink_hooks(family.sigmas)
            else:
                raise DomainError("implicit-diff applies to shrink-means and hetero-shrink")
            report = edf_implicit_diff(hooks, y, family.tune(y).s_hat)
        else:
            sampler = method.removeprefix("bootstrap-")
            cfg = BootstrapConfig(B=args.B, sampler=sampler, c=args.c,
                                  seed=args.seed or 0)
            report = bootstrap_edf(family, y, cfg)
    _print_kv(sys.stdout, method=report.method, value=report.value,
              std_error=report.std_error, reps=report.reps)
    return 0


def _cmd_simulate(args):
    if bool(args.config) == bool(args.preset):
        print("usage error: give exactly one of --config FILE or --preset NAME",
              file=sys.stderr)
        return 2
    if args.preset:
        spec = PRESETS[args.preset]
    else:
        with open(args.config, "r", encoding="ascii") as fh:
            spec = parse_config(fh.read())
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    dest = args.out or spec.out
    rows = run_simulation(spec)
    write_csv(rows, dest)
    if dest != "-":
        print(f"wrote {len(rows)} rows to {dest}")
    return 0


def _cmd_bounds(args):
    out = sys.stdout
    name = args.bound
    if name == "chi-sq-max":
        sizes = _vector_option(args.sizes, "sizes").astype(int)
        _print_kv(out, bound=chi_sq_max_bound(sizes, args.delta))
    elif name == "edf-upper-simplified":
        sizes = _vector_option(args.sizes, "sizes").astype(int)
        _print_kv(out, bound=edf_upper_bound_simplified(sizes, args.delta))
    elif name == "surface-area-ball":
        center = _vector_option(args.center, "center")
        area = gaussian_surface_area_ball(center, args.radius,
                                          directions=args.directions,
                                          seed=args.seed or 0,
                                          method="mc" if args.mc else "auto")
        _print_kv(out, value=area.value, std_error=area.std_error,
                  method=area.method, at_most_one=bool(area.value <= 1.0 + 4 * area.std_error))
    elif name == "gas-stations":
        w = _vector_option(args.weights, "weights")
        rot = gas_stations_rotation(w)
        _print_kv(out, start=rot.start, multiplicity=rot.multiplicity)
    elif name == "nested-null-edf":
        value = nested_null_edf_bound(args.p)
        _print_kv(out, p=args.p, bound=value, less_than_10=bool(value < 10.0))
    elif name == "nested-tail-split":
        split = nested_bound_tail_split(n_terms=args.terms)
        _print_kv(out, sqrt_series=split.sqrt_series,
                  inv_sqrt_series=split.inv_sqrt_series, total=split.total,
                  less_than_10=bool(split.total < 10.0))
    elif name == "general-theta":
        mu = _vector_option(args.mu, "mu")
        rep = general_theta_bound(mu, directions=args.directions,
                                  chi2_draws=args.chi2_draws, seed=args.seed or 0)
        _print_kv(out, windowed=rep.windowed, windowed_se=rep.windowed_se,
                  alternate=rep.alternate, alternate_se=rep.alternate_se,
                  cap=rep.cap, p=rep.p)
    else:
        c = best_subset_constant()
        _print_kv(out, value=c.value, delta=c.delta, half_value=c.half_value)
    return 0


def _cmd_selfcheck(args):
    from .acceptance import run_all

    results = run_all(stream=sys.stdout, only=args.only)
    return 0 if all(r.passed for r in results) else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="suretune",
        description="SURE tuning, excess optimism, and excess degrees of freedom",
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for any randomized computation (default 0)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker hint; recorded only, never affects results")
    parser.add_argument("--out", default=None, help="output path ('-' for stdout)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_family_args(p, with_sigma=True):
        p.add_argument("--family", choices=CLI_FAMILIES, default="shrink-means")
        if with_sigma:
            p.add_argument("--sigma", type=float, default=1.0,
                           help="noise standard deviation")
        p.add_argument("--design", help="design matrix file (shrink-regression)")
        p.add_argument("--sigmas", help="per-coordinate sd list or @path (hetero-shrink)")

    p_tune = sub.add_parser("tune", help="fit one family to a data vector")
    add_family_args(p_tune)
    p_tune.add_argument("--data", required=True, help="data vector file")
    p_tune.set_defaults(func=_cmd_tune)

    p_edf = sub.add_parser("edf", help="estimate excess degrees of freedom")
    add_family_args(p_edf)
    p_edf.add_argument("--method", required=True,
                       choices=("monte-carlo", "analytic", "implicit-diff",
                                "bootstrap-parametric", "bootstrap-bigmodel",
                                "bootstrap-residual"))
    p_edf.add_argument("--data", help="data vector file (non monte-carlo methods)")
    p_edf.add_argument("--n", type=int, default=0, help="model size for monte-carlo")
    p_edf.add_argument("--theta0", help="mean vector, list or @path (monte-carlo)")
    p_edf.add_argument("--reps", type=int, default=2000, help="monte-carlo repetitions")
    p_edf.add_argument("--B", type=int, default=500, help="bootstrap replicates")
    p_edf.add_argument("--c", type=float, default=1.0, help="bigmodel noise scale")
    p_edf.set_defaults(func=_cmd_edf)

    p_sim = sub.add_parser("simulate", help="run a simulation grid, emit CSV")
    p_sim.add_argument("--config", help="flat key=value config file")
    p_sim.add_argument("--preset", choices=sorted(PRESETS),
                       help="named built-in configuration")
    p_sim.set_defaults(func=_cmd_simulate)

    p_b = sub.add_parser("bounds", help="evaluate named bound quantities")
    bsub = p_b.add_subparsers(dest="bound", required=True)

    b1 = bsub.add_parser("chi-sq-max", help="expected max of centered chi-squares")
    b1.add_argument("--sizes", required=True, help="df list, e.g. 1,2,4")
    b1.add_argument("--delta", type=float, required=True)
    b1.set_defaults(func=_cmd_bounds)

    b2 = bsub.add_parser("edf-upper-simplified", help="two-term relaxation of chi-sq-max")
    b2.add_argument("--sizes", required=True)
    b2.add_argument("--delta", type=float, required=True)
    b2.set_defaults(func=_cmd_bounds)

    b3 = bsub.add_parser("surface-area-ball",
                         help="Gaussian surface area of a ball boundary")
    b3.add_argument("--center", required=True, help="center vector, list or @path")
    b3.add_argument("--radius", type=float, required=True)
    b3.add_argument("--directions", type=int, default=100_000)
    b3.add_argument("--mc", action="store_true", help="force the Monte Carlo path")
    b3.set_defaults(func=_cmd_bounds)

    b4 = bsub.add_parser("gas-stations", help="admissible start for a cyclic tour")
    b4.add_argument("--weights", required=True, help="leg weights, list or @path")
    b4.set_defaults(func=_cmd_bounds)

    b5 = bsub.add_parser("nested-null-edf", help="null excess-df bound, nested chain")
    b5.add_argument("--p", type=int, required=True, help="chain length")
    b5.set_defaults(func=_cmd_bounds)

    b6 = bsub.add_parser("nested-tail-split",
                         help="head-plus-tail certification of the infinite sum")
    b6.add_argument("--terms", type=int, default=1000, help="head terms to sum")
    b6.set_defaults(func=_cmd_bounds)

    b7 = bsub.add_parser("general-theta", help="nonnull nested-chain bounds")
    b7.add_argument("--mu", required=True, help="rotated mean, list or @path")
    b7.add_argument("--directions", type=int, default=100_000)
    b7.add_argument("--chi2-draws", dest="chi2_draws", type=int, default=100_000)
    b7.set_defaults(func=_cmd_bounds)

    b8 = bsub.add_parser("best-subset-constant",
                         help="sharp constant for the search-df bound")
    b8.set_defaults(func=_cmd_bounds)

    p_check = sub.add_parser("selfcheck", help="run the acceptance battery")
    p_check.add_argument("--only", default=None,
                         help="run a single criterion by id, e.g. c03")
    p_check.set_defaults(func=_cmd_selfcheck)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
