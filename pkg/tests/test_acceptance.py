"""End-to-end acceptance checks, one test per numbered criterion.

Each test prints a single PASS line on success (run with -s or -rA to
see them); a failure is an ordinary pytest failure naming the check.
Sizes and tolerances are fixed; do not tune them to make a run pass.
"""

import json
from fractions import Fraction

import numpy as np
import pytest

from torops.certify import certify_graded, certify_holder, envelope_scan
from torops.dyadic import DyadicSystem, equivalence_report
from torops.euclidean import (
    BoxGrid,
    composition_identity_residual,
    flat_window,
    windowed,
)
from torops.grid import GridFunction, TorusGrid, angle_bracket, sample
from torops.metrics import dual_search, lambda_search, log_phase_points
from torops.models import gallery, gallery_names, hypoelliptic_metric, q0_eps0
from torops.probes import band_probe, weierstrass
from torops.quantize import apply_toroidal
from torops.symbols import CallableSymbol, multiplier, separable_symbol
from torops.symexpr import parse_symbol
from torops.runconfig import run_config

TWO_PI = 6.283185307179586


def _report(num: int, detail: str) -> None:
    print(f"[check {num:02d}] PASS  {detail}")


# -- 1: FFT application against the literal double sum ---------------------


def _direct_apply(symbol, f):
    """O(N^{2n}) matrix quantization: explicit DFT, no FFT calls."""
    grid = f.grid
    P = grid.total_nodes
    X = np.stack([m.ravel() for m in grid.node_mesh()])
    K = np.stack([m.ravel() for m in grid.frequency_mesh()]).astype(float)
    phase = np.exp(-2j * np.pi * (X.T @ K))
    coeffs = phase.T @ f.values.ravel() / P
    if symbol.is_multiplier:
        out = np.conj(phase) @ (symbol.eval(None, K) * coeffs)
    else:
        table = symbol.eval(X[:, :, None], K[:, None, :])
        out = (np.conj(phase) * table) @ coeffs
    return GridFunction(grid, out.reshape(grid.shape))


def _random_symbol(n, rng, kind):
    p = float(rng.uniform(-1.0, 0.0))
    amp = float(rng.uniform(0.2, 0.8))
    freq = float(rng.uniform(3.0, 9.0))
    if kind == 0:
        return multiplier(
            n, lambda xi: angle_bracket(xi) ** p * (1.0 + 0.3 * np.sin(xi[0] / freq))
        )
    if kind == 1:
        return separable_symbol(
            n,
            (
                (lambda x: 1.0 + amp * np.cos(2 * np.pi * x[0]),
                 lambda xi: angle_bracket(xi) ** p),
                (lambda x: amp * np.sin(2 * np.pi * x[n - 1]),
                 lambda xi: np.sin(xi[0] / freq)),
            ),
        )

    def fn(x, xi):
        u = sum(x[d] for d in range(n))
        return np.cos(2 * np.pi * u + xi[0] / freq) * angle_bracket(xi) ** p

    return CallableSymbol(n, fn)


def test_01_quantization_matches_direct_summation():
    worst = 0.0
    rng = np.random.default_rng(101)
    for n, size, trials in ((1, 64, 10), (2, 16, 10)):
        grid = TorusGrid(n, size)
        for t in range(trials):
            a = _random_symbol(n, rng, t % 3)
            f = GridFunction(
                grid, rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
            )
            got = apply_toroidal(a, f)
            want = _direct_apply(a, f)
            worst = max(worst, float(np.max(np.abs(got.values - want.values))))
    assert worst <= 1e-10, f"max deviation {worst:.3e}"
    _report(1, f"20 random pairs, n=1 N=64 and n=2 N=16, max error {worst:.2e} <= 1e-10")


# -- 2: dyadic partition of unity -------------------------------------------


def test_02_partition_of_unity_and_supports():
    system = DyadicSystem()
    rng = np.random.default_rng(202)
    lam = np.concatenate([rng.uniform(0.0, 2.0**11, 10_000), [0.0, 1.0, 2.0**11]])
    total = sum(system.band(l, lam) for l in range(13))
    err = float(np.max(np.abs(total - 1.0)))
    assert err <= 1e-12, f"partition defect {err:.3e}"

    psi0 = system.band(0, np.array([0.0, 0.5, 1.0, 2.0, 3.0]))
    assert psi0[0] == 1.0 and psi0[1] == 1.0 and psi0[2] == 1.0
    assert psi0[3] == 0.0 and psi0[4] == 0.0
    for l in range(1, 13):
        edges = np.array([2.0 ** (l - 1), 2.0 ** (l + 1), 2.0 ** (l - 1) / 2])
        vals = system.band(l, edges)
        assert vals[0] == 0.0 and vals[1] == 0.0 and vals[2] == 0.0
        inside = system.band(l, np.array([2.0**l]))
        assert inside[0] == 1.0
    _report(2, f"sum over l<=12 within {err:.2e} of 1 on 1e4 points; supports exact")


# -- 3: Besov-Holder norm equivalence ---------------------------------------


def _norm_family(grid, s, rng):
    family = [
        (f"weier-M{M}", weierstrass(grid, s, max_level=M)) for M in range(2, 9)
    ]
    family += [(f"probe-l{l}", band_probe(grid, l, rng)) for l in range(2, 9)]
    x = grid.axis_nodes()
    modes = [1, 2, 3, 4, 6, 9, 13, 19, 28, 42, 63, 94, 141, 211, 316, 474]
    family += [
        (f"mode-{k}", GridFunction(grid, np.exp(2j * np.pi * k * x))) for k in modes
    ]
    return family


def test_03_besov_holder_equivalence():
    grid = TorusGrid(1, 1024)
    spreads = {}
    for s in (0.3, 0.5, 0.7):
        rng = np.random.default_rng(303)
        family = _norm_family(grid, s, rng)
        assert len(family) == 30
        rep = equivalence_report(family, s)
        assert rep.verdict == "PASS", f"s={s}: spread {rep.ratio_spread:.1f}"
        spreads[s] = rep.ratio_spread
    detail = ", ".join(f"s={s}: {v:.2f}" for s, v in spreads.items())
    assert max(spreads.values()) <= 50.0
    _report(3, f"30-function ratio spread <= 50 ({detail})")


# -- 4: Holder boundedness for envelope-class symbols -----------------------

ENVELOPE_SYMBOLS = [
    ("one", "1", 0.0),
    ("riesz", "xi1 * angle(xi1)^-1", 0.0),
    ("smooth-quarter", "angle(xi1)^-0.25", 0.5),
    ("mod-quarter", f"(1 + 0.5*cos({TWO_PI}*x1)) * angle(xi1)^-0.25", 0.5),
    ("smooth-threeeighths", "angle(xi1)^-0.375", 0.75),
    ("mod-threeeighths", f"(1 + 0.5*sin({TWO_PI}*x1)) * angle(xi1)^-0.375", 0.75),
]


def test_04_holder_boundedness_and_negative_control():
    grid = TorusGrid(1, 4096)
    bands = range(2, 11)
    for name, text, eps in ENVELOPE_SYMBOLS:
        rep = certify_holder(
            parse_symbol(text, 1),
            0.5,
            grid,
            bands=bands,
            probes_per_band=8,
            seed=404,
            experiment_id=name,
            fefferman_eps=eps,
        )
        assert rep.verdict == "BOUNDED", (name, rep.slope, rep.max_ratio)
        assert rep.slope <= 0.05, (name, rep.slope)
        assert rep.max_ratio <= 10.0 * rep.median_ratio, name
        assert rep.seminorms and all(np.isfinite(v) for v in rep.seminorms.values())

    control = certify_holder(
        parse_symbol("angle(xi1)^0.5", 1),
        0.5,
        grid,
        bands=bands,
        probes_per_band=8,
        seed=404,
        experiment_id="control",
    )
    assert control.verdict == "SUSPECT-GROWTH"
    assert 0.45 <= control.slope <= 0.55, control.slope
    _report(
        4,
        "6 envelope symbols BOUNDED at N=4096 (slope <= 0.05, max <= 10x median); "
        f"control slope {control.slope:.3f} in [0.45, 0.55] SUSPECT-GROWTH",
    )


# -- 5: graded boundedness saturates the loss exponent ----------------------


def test_05_graded_boundedness_and_loss_slope():
    grid = TorusGrid(1, 1024)
    eps0 = Fraction(1, 2)
    results = []
    for gamma in (0.0, 0.1, 0.3):
        beta = float(eps0) - gamma
        rep = certify_graded(
            eps0, beta, 0.6, grid, bands=range(2, 10), probes_per_band=6, seed=505
        )
        assert rep.verdict == "BOUNDED", (gamma, rep.slope)
        wrong = rep.diagnostics["ungraded_slope"]
        assert abs(wrong - gamma) <= 0.1, (gamma, wrong)
        results.append((gamma, wrong))
    detail = ", ".join(f"gamma={g:.1f}: wrong-target slope {w:+.3f}" for g, w in results)
    _report(5, f"graded targets BOUNDED; {detail} (each within 0.1)")


# -- 6: Weyl composition identity -------------------------------------------


def _xxi_pair(box):
    w = flat_window(box, 7.0)
    ax = windowed(lambda x, xi: x + 0.0 * xi, w)
    axi = windowed(lambda x, xi: xi + 0.0 * x, w)
    return ax, axi


def test_06_composition_identity_residuals():
    gauss = lambda x, xi: np.exp(-np.pi * (x**2 + xi**2))

    r_xxi_32 = composition_identity_residual(*_xxi_pair(BoxGrid(32, 6.0)), BoxGrid(32, 6.0))
    r_gss_32 = composition_identity_residual(gauss, gauss, BoxGrid(32, 6.0))
    assert r_xxi_32 <= 1e-3, f"(x, xi) pair residual {r_xxi_32:.3e}"
    assert r_gss_32 <= 1e-4, f"gaussian residual {r_gss_32:.3e}"

    r_xxi_64 = composition_identity_residual(*_xxi_pair(BoxGrid(64, 6.0)), BoxGrid(64, 6.0))
    r_gss_64 = composition_identity_residual(gauss, gauss, BoxGrid(64, 8.0))
    assert r_xxi_64 <= r_xxi_32 / 2, (r_xxi_32, r_xxi_64)
    assert r_gss_64 <= r_gss_32 / 2, (r_gss_32, r_gss_64)
    _report(
        6,
        f"residuals at 32 points: (x, xi) {r_xxi_32:.2e} <= 1e-3, gaussian "
        f"{r_gss_32:.2e} <= 1e-4; refinement shrinks both >= 2x",
    )


# -- 7: uncertainty principle for the model metrics -------------------------


def test_07_uncertainty_principle_and_search_oracles():
    lam_floor = np.inf
    for name in gallery_names():
        model = gallery(name)
        g = hypoelliptic_metric(model)
        rng = np.random.default_rng(707)
        x, xi = log_phase_points(model.n, 100_000, rng)
        lam = g.lambda_value(x, xi)
        lam_floor = min(lam_floor, float(np.min(lam)))
        assert np.min(lam) >= 1.0 - 1e-12, (name, float(np.min(lam)))

        # search oracles on a subsample
        xs, xis = x[:, :32], xi[:, :32]
        searched = lambda_search(g, xs, xis, rng, samples=512)
        closed = g.lambda_value(xs, xis)
        assert np.max(np.abs(searched / closed - 1.0)) <= 0.01, name

        xd, xid = x[:, :8], xi[:, :8]
        tx = rng.normal(size=(model.n, 8))
        txi = rng.normal(size=(model.n, 8))
        cx, cxi = g.coefficients(xd, xid)
        dual_closed = np.einsum("dp,dp->p", 1.0 / cxi, tx**2) + np.einsum(
            "dp,dp->p", 1.0 / cx, txi**2
        )
        dual_searched = dual_search(g, xd, xid, tx, txi, rng, samples=4096)
        rel = dual_searched / dual_closed
        assert np.all(rel >= 0.99) and np.all(rel <= 1.0 + 1e-9), (name, rel)
    _report(
        7,
        f"lambda >= 1 - 1e-12 at 1e5 points per model (min {lam_floor:.6f}); "
        "search oracles within 1% of closed forms",
    )


# -- 8: exact rational exponent table ---------------------------------------


def test_08_exponent_table_exact():
    assert gallery("laplacian").eps0 == Fraction(0)
    assert gallery("laplacian", n=5).eps0 == Fraction(0)
    assert (gallery("kolmogorov").q0, gallery("kolmogorov").eps0) == (5, Fraction(1, 3))
    assert (gallery("mumford").q0, gallery("mumford").eps0) == (7, Fraction(3, 8))
    deg = gallery("degenerate-exp")
    assert (deg.q0, deg.eps0) == (4, Fraction(1, 6))
    assert q0_eps0(3, 1) == (5, Fraction(1, 3))
    assert q0_eps0(4, 1) == (7, Fraction(3, 8))
    assert q0_eps0(3, 2) == (4, Fraction(1, 6))
    _report(
        8,
        "elliptic eps0 = 0; kolmogorov (5, 1/3); mumford (7, 3/8); "
        "degenerate-exp (4, 1/6), all exact rationals",
    )


# -- 9: frozen-coefficient envelope majorization -----------------------------

X_DEPENDENT_SYMBOLS = [
    f"(1 + 0.5*sin({TWO_PI}*x1)) * angle(xi1)^-0.25",
    f"(1 + 0.5*cos({TWO_PI}*x1)) * angle(xi1)^-0.5",
    f"(1 + 0.25*sin({2 * TWO_PI}*x1)) * xi1 * angle(xi1)^-1",
    f"angle(xi1)^(-0.25 - 0.1*sin({TWO_PI}*x1))",
    f"(1 + 0.3*cos({TWO_PI}*x1) + 0.2*sin({2 * TWO_PI}*x1)) * angle(xi1)^-0.375",
]


def test_09_envelope_majorization():
    grid = TorusGrid(1, 1024)
    worst = 0.0
    for text in X_DEPENDENT_SYMBOLS:
        rep = envelope_scan(parse_symbol(text, 1), grid, bands=range(0, 9), seed=909)
        assert rep.passed, (text, rep.max_excess)
        assert rep.max_excess <= 1.05, (text, rep.max_excess)
        worst = max(worst, rep.max_excess)
    _report(
        9,
        f"5 x-dependent symbols, bands l <= 8: operator sup <= 1.05 x envelope "
        f"(worst excess {worst:.3f})",
    )


# -- 10: deterministic artifacts ---------------------------------------------


def test_10_rerun_reproduces_csv_bytes(tmp_path):
    cfg = {
        "grid": {"n": 1, "size": 256},
        "seed": 10,
        "experiments": [
            {"id": "flat", "kind": "holder", "symbol": "1", "s": 0.5,
             "bands": [2, 6], "probes": 3},
            {"id": "smooth", "kind": "holder", "symbol": "angle(xi1)^-0.25",
             "s": 0.5, "bands": [2, 6], "probes": 3},
            {"id": "graded", "kind": "graded", "eps0": [1, 2], "beta": 0.2,
             "s": 0.6, "bands": [2, 6], "probes": 3},
        ],
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    _, out1 = run_config(path, out_dir=tmp_path / "a", jobs=1, render=False)
    _, out2 = run_config(path, out_dir=tmp_path / "b", jobs=3, render=False)
    b1 = (out1 / "results.csv").read_bytes()
    b2 = (out2 / "results.csv").read_bytes()
    assert b1 == b2 and len(b1) > 0
    _report(10, f"rerun (and jobs=3) reproduced results.csv byte for byte ({len(b1)} bytes)")
