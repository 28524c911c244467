"""Command-line front end: one subcommand per procedure plus ``reproduce exampleK``.

Every run writes ``<name>.csv`` and ``<name>.json`` (plus PNG figures with
``--figures``, which needs matplotlib) into the output directory, which defaults to
$EVIDENCEKIT_OUTPUT_DIR or ./evidencekit-out. Exit status is 0 on success,
2 for bad arguments or inputs outside a procedure's domain, and 1 when a
computation produces a non-finite result.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import bias, eprocess, freq, likelihood, relbelief
from .io import to_plain, write_csv, write_json
from .kernel import RNG_NAME, NormalParams, rng

log = logging.getLogger("evidencekit")

OUTPUT_ENV = "EVIDENCEKIT_OUTPUT_DIR"
DEFAULT_OUTPUT = "evidencekit-out"
EXAMPLES = tuple(f"example{k}" for k in range(2, 10))


class ConfigError(ValueError):
    """Arguments that no procedure can accept."""


class NumericFailure(ArithmeticError):
    """A computation finished but produced a non-finite value where one is required."""


@dataclass
class RunConfig:
    subcommand: str
    n: int = 2
    xbar: float = 1.47
    sigma0: float = 1.0
    mu0: float = 0.0
    tau0: float = 2.0
    delta: float = 0.01
    alpha: float = 0.05
    gamma: float = 0.5
    a: float = eprocess.DEFAULT_A
    p_sign: float = 0.5
    seed: int = 0
    reps: Optional[int] = None
    output_dir: Path = field(default_factory=lambda: Path(os.environ.get(OUTPUT_ENV, DEFAULT_OUTPUT)))
    psi0: Optional[float] = None
    target: str = relbelief.Target.ABS.value
    delta_sep: float = 0.5
    n2: Optional[int] = None
    max_steps: int = 1000
    tau0_list: tuple[float, ...] = (1.0, 10.0, 100.0, 1000.0)
    workers: int = 1
    figures: bool = False
    example: Optional[str] = None

    def validate(self) -> None:
        if self.n < 0:
            raise ConfigError("--n must be nonnegative")
        if not self.sigma0 > 0 or not self.tau0 > 0:
            raise ConfigError("--sigma0 and --tau0 must be positive")
        if not self.delta > 0:
            raise ConfigError("--delta must be positive")
        for name in ("alpha", "gamma", "a", "p_sign"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ConfigError(f"--{name.replace('_', '-')} must lie in (0, 1)")
        if self.reps is not None and self.reps < 1:
            raise ConfigError("--reps must be positive")
        if self.workers < 1:
            raise ConfigError("--workers must be at least 1")
        if not all(math.isfinite(v) for v in (self.xbar, self.mu0, self.sigma0, self.tau0, self.delta)):
            raise ConfigError("numeric arguments must be finite")

    @property
    def data(self) -> freq.LocationNormalData:
        return freq.LocationNormalData(self.n, self.xbar, self.sigma0)

    def reps_or(self, default: int) -> int:
        return default if self.reps is None else self.reps


def _finite(**values) -> None:
    bad = [k for k, v in values.items() if not np.all(np.isfinite(v))]
    if bad:
        raise NumericFailure(f"non-finite result for {', '.join(bad)}")


class Writer:
    """Collects output paths for one run and renders figures lazily."""

    def __init__(self, cfg: RunConfig, stem: str):
        self.dir = Path(cfg.output_dir)
        self.stem = stem
        self.figures = cfg.figures
        self.paths: list[Path] = []

    def csv(self, header, rows, suffix: str = "") -> None:
        self.paths.append(write_csv(self.dir / f"{self.stem}{suffix}.csv", header, rows))

    def json(self, payload, suffix: str = "") -> None:
        self.paths.append(write_json(self.dir / f"{self.stem}{suffix}.json", payload))

    def figure(self, draw: Callable, suffix: str = "") -> None:
        if not self.figures:
            return
        try:
            from . import plots
        except ImportError:  # pragma: no cover - matplotlib missing
            log.warning("matplotlib not available; skipping figure")
            return
        self.paths.append(draw(plots, self.dir / f"{self.stem}{suffix}.png"))


# ---------------------------------------------------------------------------
# subcommands


def cmd_pvalue(cfg: RunConfig, out: Writer) -> dict:
    d = cfg.data
    p = freq.pvalue_location_normal(d, cfg.mu0)
    res = {"n": d.n, "xbar": d.xbar, "sigma0": d.sigma0, "mu0": cfg.mu0, "z": d.z(cfg.mu0), "pvalue": p}
    out.csv(list(res), [list(res.values())])
    out.json(res)
    return res


def cmd_confint(cfg: RunConfig, out: Writer) -> dict:
    d = cfg.data
    ci = freq.confidence_interval(d, cfg.alpha)
    res = {"n": d.n, "xbar": d.xbar, "sigma0": d.sigma0, "alpha": cfg.alpha, "lo": ci.lo, "hi": ci.hi}
    out.csv(list(res), [list(res.values())])
    out.json(res)
    return res


def _two_stage(cfg: RunConfig, n1: int, n2: int, reps: int) -> dict:
    est = freq.two_stage_rejection_prob(cfg.alpha, n1, n2, reps, cfg.seed, workers=cfg.workers)
    return {
        "alpha": cfg.alpha,
        "n1": n1,
        "n2": n2,
        "reps": reps,
        "seed": cfg.seed,
        "rejection_rate": est.estimate,
        "se": est.se,
        "excess_in_se": (est.estimate - cfg.alpha) / est.se if est.se > 0 else math.inf,
        "rng": RNG_NAME,
    }


def cmd_two_stage(cfg: RunConfig, out: Writer) -> dict:
    n2 = cfg.n if cfg.n2 is None else cfg.n2
    res = _two_stage(cfg, cfg.n, n2, cfg.reps_or(1_000_000))
    out.csv(list(res), [list(res.values())])
    out.json(res)
    return res


def _sequential(cfg: RunConfig, reps: int, max_steps: int, out: Writer) -> dict:
    r = eprocess.simulate_sequential_type1(
        cfg.alpha, cfg.a, cfg.mu0, cfg.sigma0, max_steps, reps, cfg.seed, workers=cfg.workers
    )
    _finite(stopped_mean=r.stopped_mean, step_means=r.step_means)
    steps = np.arange(1, r.step_means.size + 1)
    out.csv(["step", "mean_product", "se"], zip(steps, r.step_means, r.step_se))
    out.figure(lambda plots, path: plots.eprocess_means(steps, r.step_means, r.step_se, path))
    return {
        "alpha": cfg.alpha,
        "a": cfg.a,
        "max_steps": max_steps,
        "reps": reps,
        "seed": cfg.seed,
        "rejection_rate": r.rejection.estimate,
        "rejection_se": r.rejection.se,
        "ville_bound": cfg.alpha,
        "stopped_mean": r.stopped_mean,
        "stopped_se": r.stopped_se,
        "max_step_mean": float(r.step_means.max()),
        "rng": RNG_NAME,
    }


def cmd_eprocess(cfg: RunConfig, out: Writer) -> dict:
    res = _sequential(cfg, cfg.reps_or(100_000), cfg.max_steps, out)
    out.json(res)
    return res


def _likelihood_curves(cfg: RunConfig, out: Writer) -> dict:
    d = cfg.data
    if d.n < 1:
        raise ConfigError("likelihood needs --n >= 1")
    grid = likelihood.psi_grid(d, cfg.delta)
    prof = likelihood.profile_curve(d, grid)
    integ = likelihood.integrated_curve(d, cfg.p_sign, grid)
    # the sampling density of |xbar| read as a function of psi (equal sign weights)
    dens = np.array([likelihood.abs_mean_density(p, 1, d) for p in grid])
    out.csv(
        ["psi", "profile", "integrated", "abs_mean_density"],
        zip(grid, prof.values, integ.values, dens),
    )
    out.figure(
        lambda plots, path: plots.likelihood_curves(
            grid, {"profile": prof.values, "integrated": integ.values}, path
        )
    )
    return {
        "n": d.n,
        "xbar": d.xbar,
        "sigma0": d.sigma0,
        "p_sign": cfg.p_sign,
        "step": cfg.delta,
        "profile_argmax": prof.argmax(),
        "integrated_argmax": integ.argmax(),
    }


def cmd_likelihood(cfg: RunConfig, out: Writer) -> dict:
    res = _likelihood_curves(cfg, out)
    out.json(res)
    return res


def _base(cfg: RunConfig) -> relbelief.BayesInferenceBase:
    return relbelief.BayesInferenceBase(cfg.data, NormalParams(cfg.mu0, cfg.tau0), cfg.delta)


def _evidence(cfg: RunConfig, psi0: float, out: Writer) -> dict:
    target = relbelief.Target(cfg.target)
    grid = relbelief.build_grid(_base(cfg), target)
    report = relbelief.evidence_report(grid, psi0, cfg.gamma)
    out.csv(["psi_mid", "prior_mass", "posterior_mass", "rb"], grid.rows())
    out.figure(lambda plots, path: plots.evidence_grid(grid, path, psi0))
    return report.to_dict()


def cmd_rb(cfg: RunConfig, out: Writer) -> dict:
    psi0 = cfg.mu0 if cfg.psi0 is None else cfg.psi0
    res = _evidence(cfg, psi0, out)
    out.json(res)
    return res


def cmd_bias(cfg: RunConfig, out: Writer) -> dict:
    psi0 = cfg.mu0 if cfg.psi0 is None else cfg.psi0
    if cfg.n < 1:
        raise ConfigError("bias needs --n >= 1")
    r = bias.bias_report(
        _base(cfg),
        psi0,
        cfg.delta_sep,
        cfg.reps_or(10_000),
        cfg.seed,
        target=relbelief.Target(cfg.target),
        workers=cfg.workers,
    )
    res = r.to_dict()
    out.csv(list(res), [list(res.values())])
    out.json(res)
    return res


def _lindley(cfg: RunConfig, out: Writer) -> dict:
    rows = bias.lindley_sweep(cfg.data, cfg.mu0, cfg.tau0_list, cfg.delta)
    table = [[r.tau0, r.rb, r.strength, r.pvalue] for r in rows]
    _finite(table=np.array(table))
    out.csv(["tau0", "rb", "strength", "pvalue"], table)
    out.figure(lambda plots, path: plots.lindley(*np.array(table).T, path))
    return {
        "n": cfg.n,
        "xbar": cfg.xbar,
        "sigma0": cfg.sigma0,
        "mu0": cfg.mu0,
        "delta": cfg.delta,
        "rows": [{"tau0": r.tau0, "rb": r.rb, "strength": r.strength, "pvalue": r.pvalue} for r in rows],
    }


def cmd_lindley(cfg: RunConfig, out: Writer) -> dict:
    res = _lindley(cfg, out)
    out.json(res)
    return res


# ---------------------------------------------------------------------------
# reproduce: fixed inputs per example; --seed, --reps, --workers still apply


def example2(cfg: RunConfig, out: Writer) -> dict:
    d = freq.LocationNormalData(2, 1.47, 1.0)
    mu0 = np.round(np.arange(-1.0, 4.0001, 0.05), 10)
    p = [freq.pvalue_location_normal(d, m) for m in mu0]
    ci = freq.confidence_interval(d, 0.05)
    out.csv(["mu0", "pvalue", "in_ci_95"], [(m, q, ci.contains(m)) for m, q in zip(mu0, p)])
    cfg2 = RunConfig("two-stage", alpha=0.05, seed=cfg.seed, workers=cfg.workers)
    res = {
        "n": d.n,
        "xbar": d.xbar,
        "sigma0": d.sigma0,
        "pvalue_mu0_2": freq.pvalue_location_normal(d, 2.0),
        "ci_95": ci.to_list(),
        "two_stage": _two_stage(cfg2, 50, 50, cfg.reps_or(1_000_000)),
    }
    out.json(res)
    return res


def example3(cfg: RunConfig, out: Writer) -> dict:
    p = np.round(np.linspace(0.001, 1.0, 1000), 10)
    e = eprocess.e_value_power(p, eprocess.DEFAULT_A)
    out.csv(["pvalue", "e_value"], zip(p, e), suffix="_calibration")
    cfg3 = RunConfig("eprocess", alpha=0.05, seed=cfg.seed, workers=cfg.workers, figures=cfg.figures)
    res = _sequential(cfg3, cfg.reps_or(100_000), 1000, out)
    out.json(res)
    return res


def example4(cfg: RunConfig, out: Writer) -> dict:
    cfg4 = RunConfig("likelihood", n=2, xbar=1.47, sigma0=1.0, p_sign=0.5, delta=0.01, figures=cfg.figures)
    res = _likelihood_curves(cfg4, out)
    out.json(res)
    return res


def example5(cfg: RunConfig, out: Writer) -> dict:
    n, k = 10, 5
    x = rng(cfg.seed).standard_normal(n)
    data = likelihood.ScaleNormalData(n, float(np.sum(x * x)), k)
    m = likelihood.scale_normal_mles(data)
    s2 = np.round(np.linspace(0.05, 4.0, 400), 10)
    lik = likelihood.scale_normal_likelihood(data, s2)
    prof = likelihood.scale_normal_profile_likelihood(data, s2)
    out.csv(["sigma2", "likelihood", "profile_likelihood"], zip(s2, lik / lik.max(), prof / prof.max()))
    out.figure(
        lambda plots, path: plots.likelihood_curves(s2, {"likelihood": lik, "profile over y": prof}, path)
    )
    res = {"n": n, "k": k, "sx2": data.sx2, "seed": cfg.seed, **asdict(m)}
    out.json(res)
    return res


def example6(cfg: RunConfig, out: Writer) -> dict:
    cfg6 = RunConfig("rb", n=2, xbar=1.47, sigma0=1.0, mu0=0.0, tau0=2.0, delta=0.01, figures=cfg.figures)
    res = _evidence(cfg6, 2.0, out)
    lim = relbelief.bayes_factor_limit(_base(cfg6), 2.0)
    res = {**res, "bf_limit": lim.limit, "bf_eps": list(lim.eps), "bf_sequence": list(lim.bf)}
    out.json(res)
    return res


def example7(cfg: RunConfig, out: Writer) -> dict:
    u = relbelief.urn_evidence(10**6, 10**3)
    res = {"N": 10**6, "n": 10**3, **asdict(u), "jeffreys_label": relbelief.jeffreys_label(u.rb).value}
    out.csv(list(res), [list(res.values())])
    out.json(res)
    return res


def example8(cfg: RunConfig, out: Writer) -> dict:
    # n = 25, xbar = 1, sigma0 = 1 puts mu0 = 0 five standard errors away
    cfg8 = RunConfig("lindley", n=25, xbar=1.0, sigma0=1.0, mu0=0.0, delta=1e-5, figures=cfg.figures)
    res = _lindley(cfg8, out)
    res["pvalue_at_z5"] = float(freq.two_sided_pvalue(5.0))
    out.json(res)
    return res


def example9(cfg: RunConfig, out: Writer) -> dict:
    data = freq.LocationNormalData(25, 0.0, 1.0)
    taus = (0.5, 1.0, 10.0, 100.0, 1000.0)
    reps = cfg.reps_or(10_000)
    rows = []
    for tau in taus:
        base = relbelief.BayesInferenceBase(data, NormalParams(0.0, tau), 0.01)
        r = bias.bias_report(base, 0.0, 0.2, reps, cfg.seed, target=relbelief.Target.IDENTITY, workers=cfg.workers)
        rows.append(r.to_dict() | {"tau0": tau})
    header = ["tau0", "bias_against", "bias_against_se", "bias_in_favor", "bias_in_favor_se", "sup_attained_at"]
    out.csv(header, [[r[h] for h in header] for r in rows])
    out.figure(
        lambda plots, path: plots.bias_sweep(
            taus, [r["bias_against"] for r in rows], [r["bias_in_favor"] for r in rows], path, "tau0", log_x=True
        )
    )
    res = {"n": 25, "mu0": 0.0, "delta": 0.01, "delta_sep": 0.2, "reps": reps, "seed": cfg.seed, "rows": rows}
    out.json(res)
    return res


REPRODUCERS = {f"example{k}": globals()[f"example{k}"] for k in range(2, 10)}


def cmd_reproduce(cfg: RunConfig, out: Writer) -> dict:
    return REPRODUCERS[cfg.example](cfg, out)


COMMANDS = {
    "pvalue": cmd_pvalue,
    "confint": cmd_confint,
    "two-stage": cmd_two_stage,
    "eprocess": cmd_eprocess,
    "likelihood": cmd_likelihood,
    "rb": cmd_rb,
    "bias": cmd_bias,
    "lindley": cmd_lindley,
    "reproduce": cmd_reproduce,
}


# ---------------------------------------------------------------------------
# argument parsing


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model and procedure settings")
    g.add_argument("--n", type=int, default=2, help="sample size")
    g.add_argument("--xbar", type=float, default=1.47, help="sample mean")
    g.add_argument("--sigma0", type=float, default=1.0, help="known sampling sd")
    g.add_argument("--mu0", type=float, default=0.0, help="hypothesised mean; also the prior mean")
    g.add_argument("--tau0", type=float, default=2.0, help="prior sd")
    g.add_argument("--delta", type=float, default=0.01, help="grid spacing (difference that matters)")
    g.add_argument("--alpha", type=float, default=0.05)
    g.add_argument("--gamma", type=float, default=0.5, help="credible region content")
    g.add_argument("--a", type=float, default=eprocess.DEFAULT_A, help="e-value calibration exponent")
    g.add_argument("--p-sign", type=float, default=0.5, help="P(mu > 0 | |mu|) in the integrated likelihood")
    g.add_argument("--psi0", type=float, default=None, help="hypothesised psi (default: --mu0)")
    g.add_argument("--target", choices=[t.value for t in relbelief.Target], default=relbelief.Target.ABS.value)
    g.add_argument("--delta-sep", type=float, default=0.5, help="separation for bias in favour")
    g.add_argument("--n2", type=int, default=None, help="second-stage size (default: --n)")
    g.add_argument("--max-steps", type=int, default=1000)
    g.add_argument("--tau0-list", type=_float_list, default=(1.0, 10.0, 100.0, 1000.0))
    r = common.add_argument_group("run settings")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--reps", type=int, default=None, help="Monte Carlo replications (per-command default)")
    r.add_argument("--workers", type=int, default=1, help="processes; never changes the numbers")
    r.add_argument(
        "--output-dir",
        type=Path,
        default=None,
        help=f"where files go (default: ${OUTPUT_ENV} or ./{DEFAULT_OUTPUT})",
    )
    r.add_argument("--figures", action="store_true", help="also draw PNG figures (needs matplotlib)")
    r.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="evidencekit", description="Measuring statistical evidence.")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="subcommand")
    helps = {
        "pvalue": "two-sided p-value for mu = mu0",
        "confint": "confidence interval by inverting the p-value",
        "two-stage": "rejection rate of testing twice at level alpha",
        "eprocess": "optional stopping with a product of e-values",
        "likelihood": "profile and integrated likelihoods of |mu|",
        "rb": "relative belief grid and evidence report",
        "bias": "bias against and bias in favour of psi0",
        "lindley": "evidence about mu0 as the prior widens",
        "reproduce": "rerun a worked example",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, parents=[common], help=text, description=text)
        if name == "reproduce":
            p.add_argument("example", choices=EXAMPLES)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    kwargs = {k: v for k, v in vars(ns).items() if k not in ("verbose",) and v is not None}
    return RunConfig(**kwargs)


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse has already printed usage
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(message)s")
    cfg = config_from_args(ns)
    stem = cfg.example if cfg.subcommand == "reproduce" else cfg.subcommand
    try:
        cfg.validate()
        out = Writer(cfg, stem)
        result = COMMANDS[cfg.subcommand](cfg, out)
    except NumericFailure as exc:
        print(f"evidencekit: numeric failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:  # includes ConfigError and domain errors from the library
        parser.print_usage(sys.stderr)
        print(f"evidencekit: error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(to_plain(result), indent=2), file=stdout)
    for path in out.paths:
        log.info("wrote %s", path)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
