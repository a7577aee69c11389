"""Command line front end.

Subcommands:

* ``certify run config.json``    execute a certification run
* ``certify gallery list``       the built-in operator models
* ``certify norms file --s S``   norms of a sampled function
* ``certify axioms name``        metric axiom scan, JSON records

Exit codes: 0 when everything passed (or carried no claim), 2 when a
scan produced a SUSPECT-GROWTH verdict or a failed axiom, 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .dyadic import DyadicSystem, besov_norm, holder_norm, holder_seminorm
from .grid import read_function_csv, sup_norm
from .metrics import (
    check_continuity,
    check_temperance,
    check_weight,
    flat_metric,
    log_phase_points,
    shubin_metric,
    sigma_rho_delta_metric,
)
from .models import gallery, gallery_names, hypoelliptic_metric, hypoelliptic_weight
from .runconfig import run_config

__all__ = ["main"]


def _cmd_run(args) -> int:
    try:
        reports, out = run_config(
            args.config,
            out_dir=args.out,
            jobs=args.jobs,
            seed=args.seed,
            render=not args.no_figures,
        )
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    for rep in reports:
        print(
            f"{rep.experiment_id}: {rep.verdict}"
            f"  slope={rep.slope:+.4f}  max_ratio={rep.max_ratio:.4e}"
            + (f"  [{rep.note}]" if rep.note else "")
        )
    print(f"artifacts in {out}")
    return 2 if any(r.verdict == "SUSPECT-GROWTH" for r in reports) else 0


def _cmd_gallery(args) -> int:
    if args.action != "list":
        print(f"error: unknown gallery action {args.action!r}", file=sys.stderr)
        return 1
    header = f"{'name':<16}{'n':>3}{'r0':>4}{'Q0':>4}{'eps0':>8}  description"
    print(header)
    print("-" * len(header))
    for name in gallery_names():
        model = gallery(name)
        print(
            f"{name:<16}{model.n:>3}{model.r0:>4}{model.q0:>4}"
            f"{str(model.eps0):>8}  {model.description}"
        )
    return 0


def _cmd_norms(args) -> int:
    try:
        f = read_function_csv(args.file)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    s = args.s
    system = DyadicSystem()
    sup = sup_norm(f)
    semi = holder_seminorm(f, s)
    print(f"grid: n={f.grid.n} size={f.grid.size}")
    print(f"sup norm           {sup:.12e}")
    print(f"holder seminorm    {semi:.12e}  (s={s:g})")
    print(f"holder norm        {sup + semi:.12e}")
    print(f"besov norm         {besov_norm(system, f, s):.12e}")
    if semi > 0:
        print(f"besov/holder       {besov_norm(system, f, s) / holder_norm(f, s):.6f}")
    return 0


def _metric_for(name: str, rho: float, delta: float):
    """Returns (metric, weight-or-None, log-plan-dimension-or-None)."""
    if name == "flat":
        return flat_metric(1), None, None
    if name == "rho-delta":
        return sigma_rho_delta_metric(1, rho, delta), None, None
    if name == "shubin":
        return shubin_metric(1, rho), None, None
    model = gallery(name)
    return hypoelliptic_metric(model), hypoelliptic_weight(model), model.n


def _cmd_axioms(args) -> int:
    rng = np.random.default_rng(args.seed)
    try:
        g, weight, log_dim = _metric_for(args.metric, args.rho, args.delta)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    sampler = None
    if log_dim is not None:
        sampler = lambda count: log_phase_points(log_dim, count, rng)

    records = []
    cont = check_continuity(g, rng, trials=args.trials, sampler=sampler)
    records.append(
        {
            "axiom": "continuity",
            "plan": {"trials": cont.trials, "threshold": cont.threshold},
            "constants": {
                "lowest_ratio": cont.lowest_ratio,
                "highest_ratio": cont.highest_ratio,
                "bounds": list(cont.bounds),
            },
            "verdict": "PASS" if cont.passed else "FAIL",
        }
    )
    temp = check_temperance(g, rng, trials=args.trials, sampler=sampler)
    records.append(
        {
            "axiom": "temperance",
            "plan": {"trials": temp.trials, "cap": temp.cap},
            "constants": {"exponent": temp.exponent, "constant": temp.constant},
            "verdict": "PASS" if temp.passed else "FAIL",
        }
    )
    if weight is not None:
        wrep = check_weight(weight, g, rng, trials=args.trials, sampler=sampler)
        records.append(
            {
                "axiom": "weight-admissibility",
                "plan": {"trials": wrep.trials, "cap": wrep.cap},
                "constants": {
                    "continuity_spread": wrep.continuity_spread,
                    "exponent": wrep.exponent,
                    "constant": wrep.constant,
                },
                "verdict": "PASS" if wrep.passed else "FAIL",
            }
        )

    if sampler is not None:
        x, xi = sampler(args.trials)
    else:
        x = rng.uniform(0.0, 1.0, size=(g.n, args.trials))
        xi = rng.uniform(-64.0, 64.0, size=(g.n, args.trials))
    lam_min = float(np.min(g.lambda_value(x, xi)))
    records.append(
        {
            "axiom": "uncertainty",
            "plan": {"trials": args.trials},
            "constants": {"min_lambda": lam_min},
            "verdict": "PASS" if lam_min >= 1.0 - 1e-12 else "FAIL",
        }
    )

    print(json.dumps(records, indent=2))
    return 0 if all(r["verdict"] == "PASS" for r in records) else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="certify",
        description="Empirical boundedness checks for toroidal symbol classes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a certification config")
    p_run.add_argument("config", help="path to the JSON run description")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel experiments")
    p_run.add_argument("--seed", type=int, default=None, help="override the master seed")
    p_run.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p_run.set_defaults(func=_cmd_run)

    p_gal = sub.add_parser("gallery", help="built-in operator models")
    p_gal.add_argument("action", choices=["list"])
    p_gal.set_defaults(func=_cmd_gallery)

    p_norms = sub.add_parser("norms", help="norms of a function stored as CSV")
    p_norms.add_argument("file", help="node-value CSV (j1,...,re,im rows)")
    p_norms.add_argument("--s", type=float, required=True, help="regularity exponent")
    p_norms.set_defaults(func=_cmd_norms)

    p_ax = sub.add_parser("axioms", help="metric axiom scan")
    p_ax.add_argument(
        "metric",
        help="flat | rho-delta | shubin | " + " | ".join(gallery_names()),
    )
    p_ax.add_argument("--trials", type=int, default=10_000)
    p_ax.add_argument("--seed", type=int, default=0)
    p_ax.add_argument("--rho", type=float, default=1.0, help="for rho-delta and shubin")
    p_ax.add_argument("--delta", type=float, default=0.0, help="for rho-delta")
    p_ax.set_defaults(func=_cmd_axioms)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
