"""Empirical boundedness certification for toroidal operators.

The certifiers push random band-concentrated probes through an operator
and watch how the per-band Besov gain behaves across scales.  A bounded
operator shows a flat gain profile; an operator losing derivatives shows
gain growing like 2^{l * loss}, which the log-regression slope picks up.
Verdicts are statistical statements about the scanned bands, never
proofs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dyadic import DyadicSystem, besov_norm, holder_seminorm
from .grid import GridFunction, TorusGrid, angle_bracket
from .probes import band_probe
from .quantize import apply_toroidal
from .symbols import ScanPlan, Symbol, fefferman_seminorm, multiplier

__all__ = [
    "ProbeRow",
    "CertificationReport",
    "certify_holder",
    "certify_graded",
    "certify_corollary_m",
    "EnvelopeReport",
    "envelope_report",
    "envelope_scan",
]

SLOPE_LIMIT = 0.05
OUTLIER_FACTOR = 10.0
MIN_BANDS = 5


@dataclass(frozen=True)
class ProbeRow:
    band: int
    probe_seed: int
    ratio: float
    besov_in: float
    besov_out: float


@dataclass
class CertificationReport:
    experiment_id: str
    descriptor: str
    s: float
    s_out: float
    rows: list[ProbeRow]
    band_ratios: dict[int, float]
    max_ratio: float
    median_ratio: float
    slope: float
    verdict: str
    seminorms: dict[str, float] | None = None
    holder_ratios: dict[int, float] | None = None
    diagnostics: dict[str, float] = field(default_factory=dict)
    note: str = ""
    runtime: float = 0.0


def _probe_seed(seed: int, band: int, index: int) -> int:
    return seed * 100_000 + band * 100 + index


def _gain_rows(
    op_symbol: Symbol,
    s_in: float,
    s_out: float,
    grid: TorusGrid,
    bands,
    probes_per_band: int,
    seed: int,
    system: DyadicSystem,
) -> list[ProbeRow]:
    rows = []
    for l in bands:
        for p in range(probes_per_band):
            ps = _probe_seed(seed, l, p)
            f = band_probe(grid, l, np.random.default_rng(ps))
            out = apply_toroidal(op_symbol, f)
            b_in = besov_norm(system, f, s_in)
            b_out = besov_norm(system, out, s_out)
            rows.append(ProbeRow(l, ps, b_out / b_in, b_in, b_out))
    return rows


def _band_maxima(rows: list[ProbeRow]) -> dict[int, float]:
    out: dict[int, float] = {}
    for r in rows:
        out[r.band] = max(out.get(r.band, 0.0), r.ratio)
    return out


def _fit_slope(band_ratios: dict[int, float]) -> float:
    if len(band_ratios) < MIN_BANDS:
        raise ValueError(
            f"slope regression needs at least {MIN_BANDS} bands, got {len(band_ratios)}"
        )
    ls = np.array(sorted(band_ratios), dtype=float)
    vals = np.log2([band_ratios[int(l)] for l in ls])
    return float(np.polyfit(ls, vals, 1)[0])


def _verdict(band_ratios: dict[int, float], slope: float) -> str:
    vals = np.array(list(band_ratios.values()))
    if slope <= SLOPE_LIMIT and np.max(vals) <= OUTLIER_FACTOR * np.median(vals):
        return "BOUNDED"
    return "SUSPECT-GROWTH"


def certify_holder(
    symbol: Symbol,
    s: float,
    grid: TorusGrid,
    bands=range(2, 11),
    probes_per_band: int = 8,
    seed: int = 0,
    s_out: float | None = None,
    experiment_id: str = "",
    descriptor: str = "",
    fefferman_eps: float | None = None,
    seminorm_extent: int = 128,
    holder_audit: bool = False,
) -> CertificationReport:
    """Same-regularity boundedness scan Op(symbol): B^s -> B^{s_out}.

    Per band, the worst probe gain r_l is kept; the verdict is BOUNDED
    when the fitted slope of log2 r_l stays at or below SLOPE_LIMIT and
    no band exceeds OUTLIER_FACTOR times the median.  When an envelope
    exponent is supplied the Fefferman difference constants are attached
    so the measured bound can sit next to the class seminorm.
    """
    start = time.perf_counter()
    if s_out is None:
        s_out = s
    system = DyadicSystem()
    bands = list(bands)
    rows = _gain_rows(symbol, s, s_out, grid, bands, probes_per_band, seed, system)
    band_ratios = _band_maxima(rows)
    slope = _fit_slope(band_ratios)
    verdict = _verdict(band_ratios, slope)

    seminorms = None
    if fefferman_eps is not None:
        rep = fefferman_seminorm(symbol, fefferman_eps, ScanPlan(seminorm_extent))
        seminorms = {"".join(map(str, a)): v for a, v in rep.constants.items()}

    holder_ratios = None
    if holder_audit:
        holder_ratios = {}
        for l in bands:
            f = band_probe(grid, l, np.random.default_rng(_probe_seed(seed, l, 0)))
            out = apply_toroidal(symbol, f)
            holder_ratios[l] = holder_seminorm(out, s) / holder_seminorm(f, s)

    vals = np.array(list(band_ratios.values()))
    return CertificationReport(
        experiment_id=experiment_id,
        descriptor=descriptor,
        s=s,
        s_out=s_out,
        rows=rows,
        band_ratios=band_ratios,
        max_ratio=float(np.max(vals)),
        median_ratio=float(np.median(vals)),
        slope=slope,
        verdict=verdict,
        seminorms=seminorms,
        holder_ratios=holder_ratios,
        runtime=time.perf_counter() - start,
    )


def certify_graded(
    eps0: Fraction | float,
    beta: float,
    s: float,
    grid: TorusGrid,
    bands=range(2, 11),
    probes_per_band: int = 8,
    seed: int = 0,
    weight=None,
    experiment_id: str = "",
    descriptor: str = "",
) -> CertificationReport:
    """Graded boundedness into B^{s - gamma}, gamma = n eps0 - beta.

    Operator powers of the weight are out of reach here, so the scan
    drives the loss-saturating factor of the proof's decomposition: the
    multiplier weight^gamma, which carries exactly the gamma-derivative
    loss the theorem grades away.  The report also records the slope
    measured against the ungraded target B^s, which should expose the
    loss as growth of order gamma.
    """
    start = time.perf_counter()
    n = grid.n
    gamma = float(n * eps0 - beta)
    if not 0.0 <= beta <= float(n * eps0) + 1e-12:
        raise ValueError(f"need 0 <= beta <= n*eps0 = {float(n * eps0)}, got {beta}")
    if not 0.0 < s - gamma < 1.0:
        raise ValueError(f"target regularity s - gamma = {s - gamma} must lie in (0, 1)")
    if weight is None:
        weight = angle_bracket
    saturator = multiplier(n, lambda xi: weight(xi) ** gamma)

    system = DyadicSystem()
    bands = list(bands)
    rows = _gain_rows(saturator, s, s - gamma, grid, bands, probes_per_band, seed, system)
    band_ratios = _band_maxima(rows)
    slope = _fit_slope(band_ratios)
    verdict = _verdict(band_ratios, slope)

    wrong_rows = _gain_rows(saturator, s, s, grid, bands, probes_per_band, seed, system)
    wrong_slope = _fit_slope(_band_maxima(wrong_rows))

    vals = np.array(list(band_ratios.values()))
    return CertificationReport(
        experiment_id=experiment_id,
        descriptor=descriptor or f"weight^{gamma} loss saturator",
        s=s,
        s_out=s - gamma,
        rows=rows,
        band_ratios=band_ratios,
        max_ratio=float(np.max(vals)),
        median_ratio=float(np.median(vals)),
        slope=slope,
        verdict=verdict,
        diagnostics={"gamma": gamma, "beta": beta, "ungraded_slope": wrong_slope},
        runtime=time.perf_counter() - start,
    )


def certify_corollary_m(
    symbol: Symbol,
    order: float,
    rho: float,
    delta: float,
    ell: int,
    s: float,
    grid: TorusGrid,
    **holder_kwargs,
) -> CertificationReport:
    """Boundedness scan gated by the hypothesis order >= delta*ell + (n/2)(1-rho).

    The scan itself is certify_holder; when the hypothesis inequality
    fails, a BOUNDED measurement is downgraded to INFO because the
    theorem makes no claim there.
    """
    n = grid.n
    required = delta * ell + 0.5 * n * (1.0 - rho)
    holds = order >= required - 1e-12
    report = certify_holder(symbol, s, grid, **holder_kwargs)
    report.diagnostics["order"] = order
    report.diagnostics["required_order"] = required
    if holds:
        report.note = f"hypothesis holds: order {order} >= {required}"
    else:
        report.note = (
            f"hypothesis fails: order {order} < {required}; no boundedness claim"
        )
        if report.verdict == "BOUNDED":
            report.verdict = "INFO"
    return report


@dataclass(frozen=True)
class EnvelopeReport:
    bands: list[int]
    operator_sups: list[float]
    envelope_sups: list[float]
    max_excess: float
    tolerance: float
    passed: bool


def envelope_report(
    symbol: Symbol,
    f: GridFunction,
    bands=range(0, 9),
    tolerance: float = 1.05,
) -> EnvelopeReport:
    """Frozen-symbol majorization check, one dimension.

    Bandwise, sup_x |psi_l(R) Op(sigma) f| is compared against the
    envelope max_z sup_x |psi_l(R) sigma_z(D) f| with z running over the
    grid nodes (a lower bound for the continuum sup, which only makes
    the check stricter on the left side's favor).
    """
    grid = f.grid
    if grid.n != 1:
        raise ValueError("envelope scan is implemented for one dimension")
    system = DyadicSystem()
    total = grid.total_nodes
    out = apply_toroidal(symbol, f)
    out_hat = np.fft.fft(out.values) / total
    f_hat = np.fft.fft(f.values) / total
    angles = grid.angle_mesh()

    # frozen multipliers for every z at once: row z holds sigma(z, xi) fhat(xi)
    x_col = grid.node_mesh()[0][:, None]
    xi_row = grid.axis_frequencies()[None, :]
    table = symbol.eval(x_col[None, ...], xi_row[None, ...]) * f_hat[None, :]

    bands = list(bands)
    op_sups, env_sups = [], []
    for l in bands:
        window = system.band(l, angles)
        op_sups.append(float(np.max(np.abs(np.fft.ifft(window * out_hat) * total))))
        frozen = np.fft.ifft(window[None, :] * table, axis=1) * total
        env_sups.append(float(np.max(np.abs(frozen))))
    excess = max(o / e for o, e in zip(op_sups, env_sups))
    return EnvelopeReport(bands, op_sups, env_sups, excess, tolerance, excess <= tolerance)


def envelope_scan(
    symbol: Symbol,
    grid: TorusGrid,
    bands=range(0, 9),
    seed: int = 0,
    tolerance: float = 1.05,
) -> EnvelopeReport:
    """Envelope check driven band by band with matched random probes.

    A probe concentrated on band l leaves nothing on the band edges for
    the spatial modulation to drag in from neighboring scales, so this
    scan isolates the frozen-symbol comparison the way the band-wise
    argument uses it.
    """
    op_sups, env_sups = [], []
    bands = list(bands)
    for l in bands:
        f = band_probe(grid, l, np.random.default_rng(_probe_seed(seed, l, 0)))
        rep = envelope_report(symbol, f, bands=[l], tolerance=tolerance)
        op_sups.append(rep.operator_sups[0])
        env_sups.append(rep.envelope_sups[0])
    excess = max(o / e for o, e in zip(op_sups, env_sups))
    return EnvelopeReport(bands, op_sups, env_sups, excess, tolerance, excess <= tolerance)
