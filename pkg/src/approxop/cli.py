"""Command-line front end: ``approxop <subcommand> [flags]``.

Exit codes: 0 success, 2 usage error, 3 term cap exhausted, 4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from approxop import analysis, experiments
from approxop.analysis import BoundInputs, Domain
from approxop.experiments import BetaSchedule, ExperimentReport, Row
from approxop.functions import REGISTRY_HELP, parse_function
from approxop.operators import OperatorParams, evaluate
from approxop.report import emit_report
from approxop.weights import CapExhausted, TruncationPolicy, WeightKind

__all__ = ["CliConfig", "emit_report", "main", "parse_args", "run"]

SUBCOMMANDS = ("eval", "moments", "validate-moments", "converge", "voronovskaya",
               "fourth-moment", "weighted", "bounds")
NEEDS_FN = {"eval", "converge", "voronovskaya", "weighted", "bounds"}
NEEDS_BETA = {"eval", "moments", "converge", "voronovskaya", "fourth-moment", "weighted",
              "bounds"}
EXIT_USAGE, EXIT_CAP, EXIT_IO = 2, 3, 4
ENV_MAX_TERMS = "APPROXOP_MAX_TERMS"


@dataclass(frozen=True)
class CliConfig:
    subcommand: str
    fn_name: Optional[str] = None
    n: Optional[int] = None
    n_list: Optional[Tuple[int, ...]] = None
    beta: Optional[float] = None
    beta_list: Optional[Tuple[float, ...]] = None
    schedule: Optional[Tuple[float, float]] = None
    x: Optional[float] = None
    x_list: Optional[Tuple[float, ...]] = None
    domain: Optional[Tuple[float, float, float]] = None
    x_max: float = 100.0
    step: float = 1.0
    operator: str = "p"
    C: float = 4.0
    alpha_exp: float = 1.0
    dist_e: float = 0.0
    a: float = 1.0
    eps: float = 1e-12
    max_terms: int = 1_000_000
    out_format: str = "csv"
    out_path: Optional[str] = None

    def to_config_text(self):
        """key=value lines accepted back by ``--config``."""
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, tuple):
                v = ",".join(repr(e) for e in v)
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name.replace('_', '-')}={v}")
        return "\n".join(lines) + "\n"


# config-file keys -> argparse dests
_CONFIG_KEYS = {
    "subcommand": "subcommand", "fn-name": "fn", "fn": "fn", "n": "n", "n-list": "n_list",
    "beta": "beta", "beta-list": "beta_list", "schedule": "schedule", "x": "x",
    "x-list": "x_list", "domain": "domain", "x-max": "x_max", "step": "step",
    "operator": "operator", "C": "C", "alpha-exp": "alpha_exp", "dist-e": "dist_e",
    "a": "a", "eps": "eps", "max-terms": "max_terms", "out-format": "format",
    "format": "format", "out-path": "out", "out": "out",
}


def _build_parser():
    p = argparse.ArgumentParser(
        prog="approxop",
        description="Evaluate the generalized-Poisson operator family and its error bounds.",
    )
    p.add_argument("subcommand", nargs="?", choices=SUBCOMMANDS)
    p.add_argument("--config", help="file of key=value lines; flags override it")
    p.add_argument("--print-config", action="store_true",
                   help="print the resolved configuration and exit")
    p.add_argument("--fn", help=f"registered function: {REGISTRY_HELP}")
    p.add_argument("--n", type=int)
    p.add_argument("--n-list")
    p.add_argument("--beta", type=float)
    p.add_argument("--beta-list")
    p.add_argument("--schedule", help="c,p for beta_n = c n^-p")
    p.add_argument("--x", type=float)
    p.add_argument("--x-list")
    p.add_argument("--domain", help="a,b,step")
    p.add_argument("--x-max", type=float, default=100.0)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--operator", choices=("p", "jain", "szasz"), default="p")
    p.add_argument("--C", type=float, default=4.0)
    p.add_argument("--alpha-exp", type=float, default=1.0)
    p.add_argument("--dist-e", type=float, default=0.0)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=1e-12)
    p.add_argument("--max-terms", type=int,
                   default=int(os.environ.get(ENV_MAX_TERMS, 1_000_000)))
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (stdout when omitted)")
    return p


def _read_config(parser, path):
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, val = line.partition("=")
                key = key.strip()
                if not sep or key not in _CONFIG_KEYS:
                    parser.error(f"--config {path}:{lineno}: unrecognized line {line!r}")
                values[_CONFIG_KEYS[key]] = val.strip()
    except OSError as exc:
        parser.error(f"--config: cannot read {path}: {exc.strerror}")
    return values


def _floats(parser, flag, text, count=None):
    try:
        vals = tuple(float(v) for v in str(text).split(","))
    except ValueError:
        parser.error(f"{flag}: expected comma-separated numbers, got {text!r}")
    if count is not None and len(vals) != count:
        parser.error(f"{flag}: expected {count} numbers, got {text!r}")
    return vals


def _ints(parser, flag, text):
    vals = _floats(parser, flag, text)
    if any(v != int(v) for v in vals):
        parser.error(f"{flag}: expected integers, got {text!r}")
    return tuple(int(v) for v in vals)


def _check_beta(parser, flag, b):
    if not 0.0 <= b < 1.0:
        parser.error(f"{flag}: beta must satisfy 0 ≤ β < 1 (got {b!r})")


def parse_args(argv) -> CliConfig:
    """Parse and validate; usage errors exit with status 2 naming the flag."""
    parser = _build_parser()
    pre = parser.parse_args(argv)
    if pre.config:
        conf = _read_config(parser, pre.config)
        typed = {}
        for dest, raw in conf.items():
            action = next(a for a in parser._actions if a.dest == dest)
            typed[dest] = action.type(raw) if action.type else raw
        parser.set_defaults(**typed)
        ns = parser.parse_args(argv)
        # a positional left empty on the command line falls back to the config
        if ns.subcommand is None:
            ns.subcommand = typed.get("subcommand")
    else:
        ns = pre

    if ns.subcommand not in SUBCOMMANDS:
        parser.error(f"a subcommand is required: {', '.join(SUBCOMMANDS)}")
    sub = ns.subcommand

    fn_name = ns.fn
    if fn_name is not None:
        try:
            fn_name = parse_function(fn_name).name
        except KeyError:
            parser.error(f"--fn: unknown function {ns.fn!r}; registry: {REGISTRY_HELP}")
    elif sub in NEEDS_FN:
        parser.error(f"--fn is required for {sub}; registry: {REGISTRY_HELP}")

    if ns.beta is not None and ns.schedule is not None:
        parser.error("--beta and --schedule are mutually exclusive")
    if ns.beta is not None:
        _check_beta(parser, "--beta", ns.beta)
    beta_list = _floats(parser, "--beta-list", ns.beta_list) if ns.beta_list else None
    for b in beta_list or ():
        _check_beta(parser, "--beta-list", b)
    schedule = None
    if ns.schedule is not None:
        schedule = _floats(parser, "--schedule", ns.schedule, 2)
        if schedule[0] < 0 or schedule[1] <= 0:
            parser.error(f"--schedule: need c >= 0 and p > 0, got {ns.schedule!r}")
    if sub in NEEDS_BETA and ns.beta is None and schedule is None:
        parser.error(f"{sub} needs one of --beta or --schedule")

    if ns.n is not None and ns.n < 1:
        parser.error(f"--n: must be a positive integer, got {ns.n}")
    n_list = _ints(parser, "--n-list", ns.n_list) if ns.n_list else None
    if n_list and (min(n_list) < 1 or any(b <= a for a, b in zip(n_list, n_list[1:]))):
        parser.error(f"--n-list: need positive, strictly ascending integers, got {ns.n_list!r}")
    if sub in {"eval", "moments", "bounds"} and ns.n is None:
        parser.error(f"--n is required for {sub}")

    if ns.x is not None and ns.x < 0:
        parser.error(f"--x: must be >= 0, got {ns.x}")
    x_list = _floats(parser, "--x-list", ns.x_list) if ns.x_list else None
    if x_list and min(x_list) < 0:
        parser.error(f"--x-list: values must be >= 0, got {ns.x_list!r}")
    if sub in {"eval", "moments", "bounds"} and ns.x is None and x_list is None:
        parser.error(f"{sub} needs --x or --x-list")
    domain = _floats(parser, "--domain", ns.domain, 3) if ns.domain else None
    if domain is not None:
        try:
            Domain(*domain)
        except ValueError as exc:
            parser.error(f"--domain: {exc}")
    if sub == "converge" and domain is None:
        parser.error("--domain a,b,step is required for converge")
    if not ns.eps > 0:
        parser.error(f"--eps: must be positive, got {ns.eps}")
    if ns.max_terms < 1:
        parser.error(f"--max-terms: must be >= 1, got {ns.max_terms}")
    if not (ns.x_max > 0 and ns.step > 0 and ns.C > 0 and ns.a > 0 and ns.dist_e >= 0):
        parser.error("--x-max, --step, --C and --a must be positive; --dist-e nonnegative")
    if not 0 < ns.alpha_exp <= 1:
        parser.error(f"--alpha-exp: must lie in (0, 1], got {ns.alpha_exp}")

    cfg = CliConfig(
        subcommand=sub, fn_name=fn_name, n=ns.n, n_list=n_list, beta=ns.beta,
        beta_list=beta_list, schedule=schedule, x=ns.x, x_list=x_list, domain=domain,
        x_max=ns.x_max, step=ns.step, operator=ns.operator, C=ns.C,
        alpha_exp=ns.alpha_exp, dist_e=ns.dist_e, a=ns.a, eps=ns.eps,
        max_terms=ns.max_terms, out_format=ns.format, out_path=ns.out,
    )
    if ns.print_config:
        sys.stdout.write(cfg.to_config_text())
        raise SystemExit(0)
    return cfg


def _schedule(cfg):
    if cfg.schedule is not None:
        return BetaSchedule(*cfg.schedule)
    return BetaSchedule.constant(cfg.beta if cfg.beta is not None else 0.0)


def _xs(cfg):
    if cfg.x_list is not None:
        return list(cfg.x_list)
    return [cfg.x] if cfg.x is not None else [1.0]


def _n_values(cfg):
    if cfg.n_list is not None:
        return list(cfg.n_list)
    return [cfg.n] if cfg.n is not None else list(experiments.DEFAULT_N_LIST)


def _scalar(f, x):
    return float(f(np.array([x]))[0])


def _run_eval(cfg, policy):
    f = parse_function(cfg.fn_name)
    sched = _schedule(cfg)
    kind = WeightKind.JAIN if cfg.operator == "jain" else WeightKind.NEW_FAMILY
    rows = []
    for n in _n_values(cfg):
        beta = 0.0 if cfg.operator == "szasz" else sched(n)
        params = OperatorParams(n, beta)
        for x in _xs(cfg):
            res = evaluate(f, params, x, kind, policy)
            rows.append(Row(f"eval:{cfg.operator}:{f.name}", n, beta, x, res.value,
                            _scalar(f, x), None, res.residual_mass))
    return ExperimentReport(rows)


def _run_bounds(cfg, policy):
    f = parse_function(cfg.fn_name)
    sched = _schedule(cfg)
    rows = []
    for n in _n_values(cfg):
        params = OperatorParams(n, sched(n))
        for x in _xs(cfg):
            res = evaluate(f, params, x, policy=policy)
            err = abs(res.value - _scalar(f, x))
            if f.growth is not None:
                b = analysis.local_approx_bound(f, params, x, BoundInputs(C=cfg.C))
                rows.append(Row(f"bound:local:{f.name}", n, params.beta, x, err, 0.0, b,
                                res.residual_mass))
            if f.lip_const is not None:
                inputs = BoundInputs(m_f=f.lip_const, alpha_exp=cfg.alpha_exp,
                                     dist_E=cfg.dist_e)
                b = analysis.lipschitz_bound(inputs, params, x)
                rows.append(Row(f"bound:lipschitz:{f.name}", n, params.beta, x, err, 0.0, b,
                                res.residual_mass))
        if f.growth is not None:
            xs = Domain(0.0, cfg.a, cfg.a / 100).grid()
            sup = max(abs(evaluate(f, params, x, policy=policy).value - v)
                      for x, v in zip(xs, f(xs)))
            b = analysis.rate_bound(f, BoundInputs(m_f=f.m_f, a=cfg.a), params)
            rows.append(Row(f"bound:rate:{f.name}", n, params.beta, f"[0,{cfg.a!r}]", sup,
                            0.0, b, 0.0))
    return ExperimentReport(rows)


def run(cfg: CliConfig) -> ExperimentReport:
    """Execute a validated configuration and return its report."""
    policy = TruncationPolicy(cfg.eps, cfg.max_terms)
    sub = cfg.subcommand
    if sub == "eval":
        return _run_eval(cfg, policy)
    if sub == "bounds":
        return _run_bounds(cfg, policy)
    if sub == "moments":
        sched = _schedule(cfg)
        grid = [(n, sched(n), x) for n in _n_values(cfg) for x in _xs(cfg)]
        return experiments.run_moment_validation(grid, policy)
    if sub == "validate-moments":
        ns = cfg.n_list or ((cfg.n,) if cfg.n else (1, 5, 10, 50))
        bs = cfg.beta_list or ((cfg.beta,) if cfg.beta is not None else (0.0, 0.1, 0.5, 0.9))
        xs = cfg.x_list or ((cfg.x,) if cfg.x is not None else (0.1, 1.0, 5.0))
        grid = [(n, b, x) for n in ns for b in bs for x in xs]
        return experiments.run_moment_validation(grid, policy)
    if sub == "fourth-moment":
        return experiments.run_fourth_moment_limit(_schedule(cfg), _n_values(cfg), _xs(cfg))
    f = parse_function(cfg.fn_name)
    if sub == "converge":
        return experiments.run_convergence(f, _schedule(cfg), _n_values(cfg),
                                           Domain(*cfg.domain), policy)
    if sub == "voronovskaya":
        return experiments.run_voronovskaya(f, _schedule(cfg), _n_values(cfg), _xs(cfg),
                                            policy)
    if sub == "weighted":
        return experiments.run_weighted(f, _schedule(cfg), _n_values(cfg), cfg.x_max,
                                        cfg.step, policy)
    raise AssertionError(sub)


def main(argv=None) -> int:
    try:
        cfg = parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = run(cfg)
    except CapExhausted as exc:
        print(f"approxop: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        print(f"approxop: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return emit_report(report, cfg.out_format, cfg.out_path)
    except OSError as exc:
        print(f"approxop: cannot write {cfg.out_path}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
