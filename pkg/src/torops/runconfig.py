"""Experiment configuration, execution, and artifact emission.

A run is described by one JSON file: a grid, a master seed, and a list
of experiments.  Each experiment is executed independently (optionally
in a thread pool), reports are sorted by id, and the results land in a
CSV with one row per probe, a JSON mirror of the full reports, per-band
plot-data files, and one rendered figure per experiment.  Identical
config and seed must reproduce the CSV byte for byte.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .certify import CertificationReport, certify_corollary_m, certify_graded, certify_holder
from .grid import TorusGrid
from .models import gallery
from .symbols import Symbol, TabulatedSymbol
from .symexpr import parse_symbol

__all__ = [
    "ExperimentSpec",
    "RunConfig",
    "load_config",
    "read_multiplier_table",
    "write_multiplier_table",
    "run_experiment",
    "run_config",
    "write_results_csv",
    "write_report_json",
    "write_plot_data",
]

_FLOAT_FMT = "{:.12e}"
CSV_HEADER = [
    "experiment_id",
    "l",
    "probe_seed",
    "ratio",
    "besov_in",
    "besov_out",
    "slope",
    "verdict",
]


@dataclass(frozen=True)
class ExperimentSpec:
    id: str
    kind: str
    params: dict


@dataclass(frozen=True)
class RunConfig:
    grid: TorusGrid
    seed: int
    out: str | None
    experiments: list[ExperimentSpec]


_KINDS = ("holder", "graded", "corollary")
_REQUIRED = {
    "holder": ("symbol", "s"),
    "graded": ("beta", "s"),
    "corollary": ("symbol", "s", "order", "rho", "delta", "ell"),
}


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a run configuration, enumerating every problem."""
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ValueError(
            f"{path}: invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}"
        ) from None

    problems: list[str] = []
    grid_spec = raw.get("grid")
    grid = None
    if not isinstance(grid_spec, dict):
        problems.append("missing or malformed 'grid' (need {\"n\": ..., \"size\": ...})")
    else:
        try:
            grid = TorusGrid(int(grid_spec.get("n", 1)), int(grid_spec.get("size", 0)))
        except (ValueError, TypeError) as err:
            problems.append(f"grid: {err}")

    experiments = []
    raw_experiments = raw.get("experiments")
    if not isinstance(raw_experiments, list):
        problems.append("missing 'experiments' list")
        raw_experiments = []
    seen_ids: set[str] = set()
    for i, entry in enumerate(raw_experiments):
        where = f"experiments[{i}]"
        if not isinstance(entry, dict):
            problems.append(f"{where}: must be an object")
            continue
        exp_id = entry.get("id")
        if not exp_id:
            problems.append(f"{where}: missing 'id'")
            exp_id = f"experiment-{i}"
        if exp_id in seen_ids:
            problems.append(f"{where}: duplicate id {exp_id!r}")
        seen_ids.add(str(exp_id))
        kind = entry.get("kind", "holder")
        if kind not in _KINDS:
            problems.append(f"{where}: unknown kind {kind!r}; choose from {_KINDS}")
            continue
        missing = [k for k in _REQUIRED[kind] if k not in entry]
        if kind == "graded" and "eps0" not in entry and "model" not in entry:
            missing.append("eps0 (or model)")
        if missing:
            problems.append(f"{where}: missing {', '.join(repr(m) for m in missing)}")
        params = {k: v for k, v in entry.items() if k not in ("id", "kind")}
        experiments.append(ExperimentSpec(str(exp_id), kind, params))

    if problems:
        raise ValueError(f"{path}: " + "; ".join(problems))
    return RunConfig(grid, int(raw.get("seed", 0)), raw.get("out"), experiments)


def write_multiplier_table(symbol: Symbol, xi_lo: int, xi_hi: int, path: str | Path) -> None:
    """Store a one-dimensional frequency multiplier as CSV rows xi, re, im."""
    xi = np.arange(xi_lo, xi_hi + 1)
    vals = symbol.eval(None, xi.astype(float)[None, :])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["xi", "re", "im"])
        for k, v in zip(xi, vals):
            w.writerow([k, _FLOAT_FMT.format(v.real), _FLOAT_FMT.format(v.imag)])


def read_multiplier_table(path: str | Path) -> TabulatedSymbol:
    """Load a multiplier stored by write_multiplier_table."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["xi", "re", "im"]:
        raise ValueError(f"{path}: expected header xi,re,im")
    xi = np.array([int(r[0]) for r in rows[1:]])
    vals = np.array([float(r[1]) + 1j * float(r[2]) for r in rows[1:]])
    order = np.argsort(xi)
    xi, vals = xi[order], vals[order]
    if xi.size == 0 or np.any(np.diff(xi) != 1):
        raise ValueError(f"{path}: frequencies must form a contiguous integer range")
    return TabulatedSymbol(1, vals, (int(xi[0]),), margin=0)


def _build_symbol(source, n: int, base: Path | None) -> Symbol:
    if isinstance(source, str):
        return parse_symbol(source, n)
    if isinstance(source, dict) and "table" in source:
        table_path = Path(source["table"])
        if base is not None and not table_path.is_absolute():
            table_path = base / table_path
        sym = read_multiplier_table(table_path)
        if sym.n != n:
            raise ValueError(f"table {table_path} is {sym.n}-dimensional, grid wants {n}")
        return sym
    raise ValueError(f"symbol source must be an expression or {{\"table\": path}}: {source!r}")


def _bands(params: dict) -> range:
    lo, hi = params.get("bands", [2, 10])
    return range(int(lo), int(hi) + 1)


def _eps0(params: dict, grid_n: int) -> Fraction:
    """Exact loss-rate input for a graded scan.

    The loss exponent is (scan dimension) * eps0 - beta, so when the
    rate comes from a gallery model of a different dimension the value
    is rescaled to keep the model's n * eps0 intact.
    """
    if "model" in params:
        model = gallery(params["model"])
        return Fraction(model.n, grid_n) * model.eps0
    raw = params["eps0"]
    if isinstance(raw, (list, tuple)):
        return Fraction(int(raw[0]), int(raw[1]))
    return Fraction(raw).limit_denominator(10**6)


def run_experiment(
    spec: ExperimentSpec, grid: TorusGrid, seed: int, base: Path | None = None
) -> CertificationReport:
    p = spec.params
    seed = int(p.get("seed", seed))
    common = dict(
        bands=_bands(p),
        probes_per_band=int(p.get("probes", 8)),
        seed=seed,
    )
    if spec.kind == "holder":
        symbol = _build_symbol(p["symbol"], grid.n, base)
        return certify_holder(
            symbol,
            float(p["s"]),
            grid,
            experiment_id=spec.id,
            descriptor=str(p["symbol"]),
            fefferman_eps=p.get("fefferman_eps"),
            **common,
        )
    if spec.kind == "graded":
        return certify_graded(
            _eps0(p, grid.n),
            float(p["beta"]),
            float(p["s"]),
            grid,
            experiment_id=spec.id,
            **common,
        )
    if spec.kind == "corollary":
        symbol = _build_symbol(p["symbol"], grid.n, base)
        report = certify_corollary_m(
            symbol,
            float(p["order"]),
            float(p["rho"]),
            float(p["delta"]),
            int(p["ell"]),
            float(p["s"]),
            grid,
            experiment_id=spec.id,
            descriptor=str(p["symbol"]),
            **common,
        )
        return report
    raise ValueError(f"unknown experiment kind {spec.kind!r}")


def write_results_csv(reports: list[CertificationReport], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for rep in reports:
            for row in rep.rows:
                w.writerow(
                    [
                        rep.experiment_id,
                        row.band,
                        row.probe_seed,
                        _FLOAT_FMT.format(row.ratio),
                        _FLOAT_FMT.format(row.besov_in),
                        _FLOAT_FMT.format(row.besov_out),
                        _FLOAT_FMT.format(rep.slope),
                        rep.verdict,
                    ]
                )


def _report_dict(rep: CertificationReport) -> dict:
    return {
        "experiment_id": rep.experiment_id,
        "descriptor": rep.descriptor,
        "s": rep.s,
        "s_out": rep.s_out,
        "band_ratios": {str(l): rep.band_ratios[l] for l in sorted(rep.band_ratios)},
        "max_ratio": rep.max_ratio,
        "median_ratio": rep.median_ratio,
        "slope": rep.slope,
        "verdict": rep.verdict,
        "seminorms": rep.seminorms,
        "diagnostics": rep.diagnostics,
        "note": rep.note,
        "runtime_seconds": round(rep.runtime, 3),
    }


def write_report_json(reports: list[CertificationReport], path: str | Path) -> None:
    payload = {"reports": [_report_dict(r) for r in reports]}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_plot_data(rep: CertificationReport, path: str | Path) -> None:
    """Per-band maxima as l, ratio, log2(ratio) for external plotting."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["l", "ratio", "log2_ratio"])
        for l in sorted(rep.band_ratios):
            r = rep.band_ratios[l]
            w.writerow([l, _FLOAT_FMT.format(r), _FLOAT_FMT.format(np.log2(r))])


def run_config(
    config: RunConfig | str | Path,
    out_dir: str | Path | None = None,
    jobs: int = 1,
    seed: int | None = None,
    render: bool = True,
) -> tuple[list[CertificationReport], Path]:
    """Execute every experiment and write all artifacts; returns the
    sorted reports and the output directory."""
    base = None
    if not isinstance(config, RunConfig):
        base = Path(config).parent
        config = load_config(config)
    master = config.seed if seed is None else int(seed)
    out = Path(out_dir or config.out or "certify-out")
    out.mkdir(parents=True, exist_ok=True)

    if jobs > 1 and len(config.experiments) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(
                pool.map(
                    lambda sp: run_experiment(sp, config.grid, master, base),
                    config.experiments,
                )
            )
    else:
        reports = [run_experiment(sp, config.grid, master, base) for sp in config.experiments]
    reports.sort(key=lambda r: r.experiment_id)

    write_results_csv(reports, out / "results.csv")
    write_report_json(reports, out / "report.json")
    for rep in reports:
        write_plot_data(rep, out / f"{rep.experiment_id}_bands.csv")
    if render:
        from .plots import render_band_plot

        for rep in reports:
            render_band_plot(rep, out / f"{rep.experiment_id}.png")
    return reports, out
