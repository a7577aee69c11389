"""Split phase-space metrics and the slowness/temperance axioms.

A metric here is block diagonal over phase space,

    g_X(t) = sum_d hx_d(X) t_{x,d}^2 + hxi_d(X) t_{xi,d}^2,

with positive coefficient fields depending on the base point X = (x, xi).
For such metrics the symplectic dual and the uncertainty parameter
lambda_g have closed forms; the checks below verify those closed forms
against direct search and probe the continuity and temperance axioms
empirically on random point clouds.  Phase points are passed as a pair
of arrays (x, xi), each of shape (n, ...); tangents likewise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import angle_bracket

__all__ = [
    "SplitMetric",
    "flat_metric",
    "sigma_rho_delta_metric",
    "shubin_metric",
    "random_phase_points",
    "log_phase_points",
    "dual_search",
    "lambda_search",
    "ContinuityReport",
    "check_continuity",
    "TemperanceReport",
    "check_temperance",
    "WeightReport",
    "check_weight",
    "smg_seminorms",
]


@dataclass(frozen=True)
class SplitMetric:
    """Block-diagonal metric; ``hx`` and ``hxi`` map (x, xi) to positive
    coefficient arrays of shape (n,) + batch."""

    n: int
    hx: Callable[[np.ndarray, np.ndarray], np.ndarray]
    hxi: Callable[[np.ndarray, np.ndarray], np.ndarray]
    name: str = ""

    def coefficients(self, x, xi) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        cx = np.asarray(self.hx(x, xi), dtype=float)
        cxi = np.asarray(self.hxi(x, xi), dtype=float)
        if np.any(cx <= 0) or np.any(cxi <= 0):
            raise ValueError("metric coefficients must stay positive")
        return cx, cxi

    def eval(self, x, xi, tx, txi) -> np.ndarray:
        cx, cxi = self.coefficients(x, xi)
        tx = np.asarray(tx, dtype=float)
        txi = np.asarray(txi, dtype=float)
        return np.sum(cx * tx**2 + cxi * txi**2, axis=0)

    def dual(self) -> "SplitMetric":
        """g^sigma, the symplectic-form dual.

        sup_S sigma(T, S)^2 / g(S) over split forms is attained axiswise
        by Cauchy-Schwarz, swapping blocks and inverting coefficients.
        """
        hx, hxi = self.hx, self.hxi
        return SplitMetric(
            self.n,
            lambda x, xi: 1.0 / np.asarray(hxi(x, xi), dtype=float),
            lambda x, xi: 1.0 / np.asarray(hx(x, xi), dtype=float),
            name=f"{self.name}^sigma" if self.name else "dual",
        )

    def lambda_value(self, x, xi) -> np.ndarray:
        """Uncertainty parameter min_d (hx_d hxi_d)^{-1/2}; calculi need >= 1."""
        cx, cxi = self.coefficients(x, xi)
        return np.min((cx * cxi) ** -0.5, axis=0)


def flat_metric(n: int) -> SplitMetric:
    one = lambda x, xi: np.ones((n,) + np.shape(xi)[1:])
    return SplitMetric(n, one, one, name="flat")


def sigma_rho_delta_metric(n: int, rho: float, delta: float) -> SplitMetric:
    """<xi>^{2 delta} dx^2 + <xi>^{-2 rho} dxi^2, the (rho, delta) calculus.

    delta > rho would put lambda_g below 1 at large frequency, breaking
    the uncertainty requirement, so it is refused.
    """
    if delta > rho:
        raise ValueError("delta must not exceed rho (uncertainty fails)")

    def hx(x, xi):
        b = angle_bracket(xi) ** (2 * delta)
        return np.broadcast_to(b, (n,) + b.shape)

    def hxi(x, xi):
        b = angle_bracket(xi) ** (-2 * rho)
        return np.broadcast_to(b, (n,) + b.shape)

    return SplitMetric(n, hx, hxi, name=f"rho-delta({rho},{delta})")


def shubin_metric(n: int, rho: float) -> SplitMetric:
    """Isotropic <(x, xi)>^{-rho} (dx^2 + dxi^2); lambda_g = <(x, xi)>^rho."""

    def h(x, xi):
        b = np.sqrt(1.0 + np.sum(x**2, axis=0) + np.sum(xi**2, axis=0)) ** (-rho)
        return np.broadcast_to(b, (n,) + b.shape)

    return SplitMetric(n, h, h, name=f"shubin({rho})")


def random_phase_points(
    n: int, count: int, rng: np.random.Generator, xi_scale: float = 64.0
) -> tuple[np.ndarray, np.ndarray]:
    """x uniform on the unit cell, xi uniform on a symmetric box."""
    x = rng.uniform(0.0, 1.0, size=(n, count))
    xi = rng.uniform(-xi_scale, xi_scale, size=(n, count))
    return x, xi


def log_phase_points(
    n: int,
    count: int,
    rng: np.random.Generator,
    xi_max: float = 2.0**10,
    x_range: tuple[float, float] = (-2.0, 2.0),
) -> tuple[np.ndarray, np.ndarray]:
    """Axiom-scan plan: x uniform, |xi| log-uniform so every dyadic
    frequency range up to xi_max gets comparable coverage."""
    x = rng.uniform(x_range[0], x_range[1], size=(n, count))
    direction = rng.normal(size=(n, count))
    direction /= np.linalg.norm(direction, axis=0)
    mag = np.exp(rng.uniform(np.log(0.125), np.log(xi_max), size=count))
    return x, direction * mag


def _directions(n: int, count: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Random unit tangents plus every coordinate axis.

    For split metrics the extrema of the Rayleigh quotients sit on the
    axes, so including them makes the searches sharp, not just close.
    """
    raw = rng.normal(size=(2 * n, count))
    raw /= np.linalg.norm(raw, axis=0)
    axes = np.eye(2 * n)
    full = np.concatenate([raw, axes.T.reshape(2 * n, 2 * n)], axis=1)
    return full[:n], full[n:]


def dual_search(
    g: SplitMetric,
    x,
    xi,
    tx,
    txi,
    rng: np.random.Generator,
    samples: int = 512,
    refine: bool = True,
) -> np.ndarray:
    """sup_S sigma(T, S)^2 / g_X(S) over sampled directions S.

    Random directions alone leave a covering gap on the sphere, so the
    best sample seeds a local optimizer; the ascent never consults the
    swap-and-invert formula, keeping this an independent oracle.
    """
    sx, sxi = _directions(g.n, samples, rng)
    cx, cxi = g.coefficients(x, xi)
    tx = np.asarray(tx, dtype=float)
    txi = np.asarray(txi, dtype=float)
    # pairing sigma(T, S) = sum_d t_xi,d s_x,d - t_x,d s_xi,d
    pair = np.einsum("dp,dm->pm", txi, sx) - np.einsum("dp,dm->pm", tx, sxi)
    gs = np.einsum("dp,dm->pm", cx, sx**2) + np.einsum("dp,dm->pm", cxi, sxi**2)
    quot = pair**2 / gs
    best = np.max(quot, axis=1)
    if not refine:
        return best
    from scipy.optimize import minimize

    seeds = np.argmax(quot, axis=1)
    dirs = np.concatenate([sx, sxi], axis=0)
    for p in range(best.size):
        v = np.concatenate([txi[:, p], -tx[:, p]])
        w = np.concatenate([cx[:, p], cxi[:, p]])
        # optimize in u = sqrt(w) * s; the quotient becomes isotropic in
        # the denominator, which keeps the ascent well conditioned when
        # the coefficients span many orders of magnitude
        root_w = np.sqrt(w)
        c = v / root_w

        def negative_quotient(u):
            norm = np.dot(u, u)
            if norm == 0.0:
                return 0.0
            return -np.dot(c, u) ** 2 / norm

        start = root_w * dirs[:, seeds[p]]
        res = minimize(
            negative_quotient,
            start / np.linalg.norm(start),
            method="BFGS",
            options={"gtol": 1e-12, "maxiter": 2000},
        )
        best[p] = max(best[p], -res.fun)
    return best


def lambda_search(
    g: SplitMetric, x, xi, rng: np.random.Generator, samples: int = 512
) -> np.ndarray:
    """inf_T sqrt(g^sigma_X(T) / g_X(T)) over sampled directions T."""
    tx, txi = _directions(g.n, samples, rng)
    cx, cxi = g.coefficients(x, xi)
    num = np.einsum("dp,dm->pm", 1.0 / cxi, tx**2) + np.einsum(
        "dp,dm->pm", 1.0 / cx, txi**2
    )
    den = np.einsum("dp,dm->pm", cx, tx**2) + np.einsum("dp,dm->pm", cxi, txi**2)
    return np.sqrt(np.min(num / den, axis=1))


@dataclass(frozen=True)
class ContinuityReport:
    passed: bool
    lowest_ratio: float
    highest_ratio: float
    trials: int
    threshold: float
    bounds: tuple[float, float]


def check_continuity(
    g: SplitMetric,
    rng: np.random.Generator,
    trials: int = 10_000,
    threshold: float = 0.25,
    bounds: tuple[float, float] = (0.25, 4.0),
    xi_scale: float = 64.0,
    sampler=None,
) -> ContinuityReport:
    """Slowness: g_X(Y - X) <= threshold forces g_Y / g_X within bounds.

    Random base points, random g-small steps, random test tangents.
    """
    n = g.n
    x, xi = sampler(trials) if sampler else random_phase_points(n, trials, rng, xi_scale)
    cx, cxi = g.coefficients(x, xi)
    dx = rng.normal(size=(n, trials))
    dxi = rng.normal(size=(n, trials))
    size = np.sum(cx * dx**2 + cxi * dxi**2, axis=0)
    scale = np.sqrt(rng.uniform(0.0, 1.0, size=trials) * threshold / size)
    dx *= scale
    dxi *= scale
    tx = rng.normal(size=(n, trials))
    txi = rng.normal(size=(n, trials))
    at_x = np.sum(cx * tx**2 + cxi * txi**2, axis=0)
    at_y = g.eval(x + dx, xi + dxi, tx, txi)
    ratios = at_y / at_x
    lo, hi = float(np.min(ratios)), float(np.max(ratios))
    passed = bounds[0] <= lo and hi <= bounds[1]
    return ContinuityReport(passed, lo, hi, trials, threshold, bounds)


@dataclass(frozen=True)
class TemperanceReport:
    passed: bool
    exponent: int
    constant: float
    trials: int
    cap: float


def check_temperance(
    g: SplitMetric,
    rng: np.random.Generator,
    trials: int = 10_000,
    max_exponent: int = 8,
    cap: float = 16.0,
    xi_scale: float = 64.0,
    sampler=None,
) -> TemperanceReport:
    """Fit the smallest N with g_Y(T)/g_X(T) <= cap (1 + g^sigma_X(Y-X))^N.

    Pairs are drawn independently so the displacement can be large; the
    ratio is taken two-sided since the axiom quantifies over ordered
    pairs; the report carries the constant realized at the fitted
    exponent.
    """
    n = g.n
    if sampler is None:
        x, xi = random_phase_points(n, trials, rng, xi_scale)
        y, eta = random_phase_points(n, trials, rng, xi_scale)
    else:
        x, xi = sampler(trials)
        y, eta = sampler(trials)
    tx = rng.normal(size=(n, trials))
    txi = rng.normal(size=(n, trials))
    ratios = g.eval(y, eta, tx, txi) / g.eval(x, xi, tx, txi)
    ratios = np.maximum(ratios, 1.0 / ratios)
    growth = 1.0 + g.dual().eval(x, xi, y - x, eta - xi)
    for exponent in range(max_exponent + 1):
        constant = float(np.max(ratios / growth**exponent))
        if constant <= cap:
            return TemperanceReport(True, exponent, constant, trials, cap)
    return TemperanceReport(False, max_exponent, constant, trials, cap)


@dataclass(frozen=True)
class WeightReport:
    passed: bool
    continuity_spread: float
    exponent: int
    constant: float
    trials: int
    cap: float


def check_weight(
    m: Callable[[np.ndarray, np.ndarray], np.ndarray],
    g: SplitMetric,
    rng: np.random.Generator,
    trials: int = 10_000,
    threshold: float = 0.25,
    max_exponent: int = 8,
    cap: float = 16.0,
    xi_scale: float = 64.0,
    sampler=None,
) -> WeightReport:
    """Empirical g-continuity and temperance of a positive weight m.

    Both axioms bound the ratio and its inverse, so each sampled pair
    contributes two-sided.
    """
    n = g.n
    if sampler is None:
        x, xi = random_phase_points(n, trials, rng, xi_scale)
        y, eta = random_phase_points(n, trials, rng, xi_scale)
    else:
        x, xi = sampler(trials)
        y, eta = sampler(trials)
    cx, cxi = g.coefficients(x, xi)
    dx = rng.normal(size=(n, trials))
    dxi = rng.normal(size=(n, trials))
    size = np.sum(cx * dx**2 + cxi * dxi**2, axis=0)
    scale = np.sqrt(rng.uniform(0.0, 1.0, size=trials) * threshold / size)
    base = np.asarray(m(x, xi), dtype=float)
    near = np.asarray(m(x + dx * scale, xi + dxi * scale), dtype=float)
    near_ratio = near / base
    spread = float(np.max(np.maximum(near_ratio, 1.0 / near_ratio)))

    far_ratio = np.asarray(m(y, eta), dtype=float) / base
    far_ratio = np.maximum(far_ratio, 1.0 / far_ratio)
    growth = 1.0 + g.dual().eval(x, xi, y - x, eta - xi)
    for exponent in range(max_exponent + 1):
        constant = float(np.max(far_ratio / growth**exponent))
        if constant <= cap:
            return WeightReport(True, spread, exponent, constant, trials, cap)
    return WeightReport(False, spread, max_exponent, constant, trials, cap)


def smg_seminorms(
    sigma: Callable[[np.ndarray, np.ndarray], np.ndarray],
    g: SplitMetric,
    m: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x: np.ndarray,
    xi: np.ndarray,
    order: int = 3,
    step: float = 0.25,
    mixtures: int = 0,
    rng: np.random.Generator | None = None,
) -> list[float]:
    """Derivative bounds C_j = max |sigma^{(j)}(X; T1..Tj)| / m(X), j <= order.

    Directions run over the phase-space coordinate axes, plus optional
    random mixtures, all normalized to unit g-length at each base
    point; derivatives are nested central differences with the given
    step in g-units.  C_0 = 1 whenever sigma equals the weight itself.
    """
    if order > 3:
        raise ValueError("derivative order capped at 3")
    n = g.n
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    cx, cxi = g.coefficients(x, xi)
    weight = np.asarray(m(x, xi), dtype=float)
    # unit-g coordinate steps: e_d / sqrt(h_d)
    moves = []
    for d in range(n):
        ex = np.zeros((n,) + x.shape[1:])
        ex[d] = cx[d] ** -0.5
        moves.append((ex, np.zeros_like(ex)))
    for d in range(n):
        exi = np.zeros((n,) + xi.shape[1:])
        exi[d] = cxi[d] ** -0.5
        moves.append((np.zeros_like(exi), exi))
    for _ in range(mixtures):
        if rng is None:
            raise ValueError("mixtures need an rng")
        raw = rng.normal(size=2 * n)
        rx = raw[:n].reshape((n,) + (1,) * (x.ndim - 1))
        rxi = raw[n:].reshape((n,) + (1,) * (xi.ndim - 1))
        length = np.sqrt(np.sum(cx * rx**2 + cxi * rxi**2, axis=0))
        moves.append((rx / length, rxi / length))

    def derivative(dirs):
        if not dirs:
            return np.asarray(sigma(x, xi), dtype=complex)
        # expand nested central differences into a signed stencil sum
        total = np.zeros(x.shape[1:], dtype=complex)
        for signs in itertools.product((1.0, -1.0), repeat=len(dirs)):
            ox = np.zeros_like(x)
            oxi = np.zeros_like(xi)
            for s, (mx, mxi) in zip(signs, dirs):
                ox += s * step * mx
                oxi += s * step * mxi
            coeff = math.prod(signs) / (2.0 * step) ** len(dirs)
            total += coeff * np.asarray(sigma(x + ox, xi + oxi), dtype=complex)
        return total

    out = []
    for j in range(order + 1):
        best = 0.0
        for combo in itertools.combinations_with_replacement(moves, j):
            vals = np.abs(derivative(list(combo))) / weight
            best = max(best, float(np.max(vals)))
        out.append(best)
    return out
