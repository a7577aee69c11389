"""Smooth dyadic band decomposition and the norms built on it.

The low-pass bump is glued explicitly from ``e(t) = exp(-1/t)``:

    r(t)     = e(t) / (e(t) + e(1-t))          smooth 0 -> 1 on [0,1]
    psi_0    = 1 - r(|lam| - 1)                1 on [-1,1], 0 outside (-2,2)
    psi_l    = psi_0(2^{-l} lam) - psi_0(2^{-l+1} lam)   for l >= 1

so that sum_{l<=L} psi_l(lam) = psi_0(2^{-L} lam) telescopes exactly and
band l is supported in [2^{l-1}, 2^{l+1}].  Besov norms here are the
B^s_{infty,infty} scale: sup_l 2^{ls} ||band_l f||_inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .grid import GridFunction, TorusGrid, sup_norm

__all__ = [
    "smooth_step",
    "DyadicSystem",
    "build_bump",
    "dyadic_band",
    "band_project",
    "band_sups",
    "besov_norm",
    "holder_displacements",
    "holder_seminorm",
    "holder_norm",
    "EquivalenceReport",
    "equivalence_report",
]


def smooth_step(t: np.ndarray) -> np.ndarray:
    """The C-infinity step r(t) with r=0 for t<=0, r=1 for t>=1, r(t)+r(1-t)=1."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0.0, np.exp(-1.0 / np.where(t > 0.0, t, 1.0)), 0.0)
        b = np.where(t < 1.0, np.exp(-1.0 / np.where(t < 1.0, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def build_bump():
    """Return psi_0: equal to 1 on [-1,1], supported in (-2,2), monotone between."""

    def psi0(lam: np.ndarray) -> np.ndarray:
        return 1.0 - smooth_step(np.abs(np.asarray(lam, dtype=float)) - 1.0)

    return psi0


@dataclass(frozen=True)
class DyadicSystem:
    """The dyadic band family generated by one low-pass bump."""

    psi0: callable = field(default_factory=build_bump)

    def band(self, l: int, lam: np.ndarray) -> np.ndarray:
        if l < 0:
            raise ValueError(f"band index l={l} must be >= 0")
        lam = np.asarray(lam, dtype=float)
        if l == 0:
            return self.psi0(lam)
        return self.psi0(lam / 2.0**l) - self.psi0(lam / 2.0 ** (l - 1))

    def active_bands(self, grid: TorusGrid) -> int:
        """Number of bands that can be nonzero on the grid (indices 0..count-1)."""
        angle_max = float(np.max(grid.angle_mesh()))
        l = 1
        while 2.0 ** (l - 1) <= angle_max:
            l += 1
        return l


def dyadic_band(system: DyadicSystem, l: int, lam: np.ndarray) -> np.ndarray:
    return system.band(l, lam)


def _apply_spectral_weight(f: GridFunction, weight: np.ndarray) -> GridFunction:
    total = f.grid.total_nodes
    coeffs = np.fft.fftn(f.values) / total
    return GridFunction(f.grid, np.fft.ifftn(weight * coeffs) * total)


def band_project(system: DyadicSystem, l: int, f: GridFunction) -> GridFunction:
    """Spectral projection onto band l, the multiplier psi_l(<xi>)."""
    return _apply_spectral_weight(f, system.band(l, f.grid.angle_mesh()))


def band_sups(system: DyadicSystem, f: GridFunction, max_band: int | None = None) -> np.ndarray:
    """Sup norms of all band projections, sharing one forward transform."""
    grid = f.grid
    count = system.active_bands(grid) if max_band is None else max_band + 1
    angles = grid.angle_mesh()
    total = grid.total_nodes
    coeffs = np.fft.fftn(f.values) / total
    sups = np.empty(count)
    for l in range(count):
        piece = np.fft.ifftn(system.band(l, angles) * coeffs) * total
        sups[l] = np.max(np.abs(piece))
    return sups


def besov_norm(
    system: DyadicSystem, f: GridFunction, s: float, max_band: int | None = None
) -> float:
    """sup_l 2^{ls} ||band_l f||_inf over all bands active on the grid."""
    sups = band_sups(system, f, max_band)
    weights = 2.0 ** (s * np.arange(sups.size))
    return float(np.max(weights * sups))


# ---------------------------------------------------------------------------
# Holder seminorm over a dyadic displacement plan
# ---------------------------------------------------------------------------


def holder_displacements(grid: TorusGrid) -> list[tuple[int, ...]]:
    """Integer node shifts of magnitude N/2^j per axis, plus diagonals.

    The zero displacement (j=0, a full revolution) is excluded.
    """
    N = grid.size
    plan: list[tuple[int, ...]] = []
    for j in range(int(math.log2(N)) + 1):
        step = N >> j
        if step % N == 0:
            continue
        for d in range(grid.n):
            v = [0] * grid.n
            v[d] = step
            plan.append(tuple(v))
        if grid.n > 1:
            plan.append((step,) * grid.n)
    return plan


def _torus_distance(shift: Sequence[int], N: int) -> float:
    per_axis = [min(abs(v) % N, N - abs(v) % N) / N for v in shift]
    return math.sqrt(sum(h * h for h in per_axis))


def holder_seminorm(
    f: GridFunction, s: float, displacements: Iterable[tuple[int, ...]] | None = None
) -> float:
    """sup over the plan of ||f(.+h) - f||_inf / |h|^s with torus distance |h|."""
    if not 0.0 < s:
        raise ValueError(f"holder exponent s={s} must be positive")
    plan = holder_displacements(f.grid) if displacements is None else list(displacements)
    best = 0.0
    for shift in plan:
        h = _torus_distance(shift, f.grid.size)
        if h == 0.0:
            continue
        diff = np.roll(f.values, shift=shift, axis=tuple(range(f.grid.n))) - f.values
        best = max(best, float(np.max(np.abs(diff))) / h**s)
    return best


def holder_norm(f: GridFunction, s: float) -> float:
    """Sup norm plus the dyadic-displacement Holder seminorm."""
    return sup_norm(f) + holder_seminorm(f, s)


# ---------------------------------------------------------------------------
# Norm equivalence scan
# ---------------------------------------------------------------------------

EQUIVALENCE_RATIO_CAP = 50.0


@dataclass(frozen=True)
class EquivalenceReport:
    s: float
    names: tuple[str, ...]
    ratios: tuple[float, ...]
    excluded: tuple[str, ...]
    ratio_spread: float
    verdict: str


def equivalence_report(
    family: Sequence[tuple[str, GridFunction]],
    s: float,
    system: DyadicSystem | None = None,
) -> EquivalenceReport:
    """Ratio of Holder norm to Besov norm across a family of functions.

    Functions with vanishing Holder seminorm (constants) are excluded and
    listed; the verdict is PASS when max/min ratio stays below the cap.
    """
    system = system or DyadicSystem()
    names: list[str] = []
    ratios: list[float] = []
    excluded: list[str] = []
    for name, f in family:
        semi = holder_seminorm(f, s)
        if semi == 0.0:
            excluded.append(name)
            continue
        b = besov_norm(system, f, s)
        names.append(name)
        ratios.append((semi + sup_norm(f)) / b)
    if not ratios:
        raise ValueError("equivalence scan needs at least one non-constant function")
    spread = max(ratios) / min(ratios)
    verdict = "PASS" if spread <= EQUIVALENCE_RATIO_CAP else "FAIL"
    return EquivalenceReport(
        s=s,
        names=tuple(names),
        ratios=tuple(ratios),
        excluded=tuple(excluded),
        ratio_spread=spread,
        verdict=verdict,
    )
