"""Test functions for the boundedness experiments.

Two kinds of input drive the certification runs: the classical lacunary
cosine series, whose Holder exponent is prescribed exactly, and random
probes concentrated on one dyadic frequency annulus, which isolate how
an operator treats each scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dyadic import DyadicSystem, besov_norm
from .grid import GridFunction, TorusGrid, angle_bracket, index_of_frequency

__all__ = ["weierstrass", "annulus_frequencies", "band_probe", "ProbeSpec"]


def weierstrass(grid: TorusGrid, s: float, max_level: int | None = None) -> GridFunction:
    """Lacunary series sum_j 2^{-js} cos(2 pi 2^j x_1), j = 0..max_level.

    Lives in the Holder class of exponent s for 0 < s < 1.  The top
    frequency 2^max_level must stay below the Nyquist index N/2.
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"need 0 < s < 1, got s={s}")
    if max_level is None:
        max_level = int(np.log2(grid.size)) - 2
    if 2**max_level >= grid.size // 2:
        raise ValueError(
            f"level {max_level} puts frequency {2 ** max_level} at or above "
            f"Nyquist for size {grid.size}"
        )
    x1 = grid.node_mesh()[0]
    values = np.zeros(grid.shape)
    for j in range(max_level + 1):
        values += 2.0 ** (-j * s) * np.cos(2.0 * np.pi * 2.0**j * x1)
    return GridFunction(grid, values.astype(complex))


def annulus_frequencies(
    grid: TorusGrid, l: int, rng: np.random.Generator, max_modes: int = 32
) -> np.ndarray:
    """Up to max_modes distinct integer frequencies with
    2^{l-1} <= <xi> <= 2^{l+1}, all components below Nyquist.

    Exhaustive in one dimension; rejection-sampled otherwise, where the
    annulus fills most of its bounding box.
    """
    n = grid.n
    limit = grid.size // 2 - 1
    lo2 = 4.0 ** (l - 1)
    hi2 = 4.0 ** (l + 1)
    box = min(int(2.0 ** (l + 1)), limit)
    if 1.0 + n * box * box < lo2:
        raise ValueError(f"band {l} has no representable frequencies at size {grid.size}")
    if n == 1:
        candidates = np.arange(-box, box + 1)[:, None]
        bracket2 = 1.0 + candidates[:, 0] ** 2
        candidates = candidates[(bracket2 >= lo2) & (bracket2 <= hi2)]
        if candidates.shape[0] > max_modes:
            pick = rng.choice(candidates.shape[0], size=max_modes, replace=False)
            candidates = candidates[np.sort(pick)]
        return candidates
    chosen: dict[tuple, None] = {}
    for _ in range(200):
        draw = rng.integers(-box, box + 1, size=(256, n))
        bracket2 = 1.0 + np.sum(draw.astype(float) ** 2, axis=1)
        for row in draw[(bracket2 >= lo2) & (bracket2 <= hi2)]:
            chosen.setdefault(tuple(int(v) for v in row), None)
            if len(chosen) == max_modes:
                return np.array(list(chosen))
    if not chosen:
        raise ValueError(f"band {l} has no representable frequencies at size {grid.size}")
    return np.array(list(chosen))


def band_probe(
    grid: TorusGrid, l: int, rng: np.random.Generator, max_modes: int = 32
) -> GridFunction:
    """Random trigonometric probe on the band-l annulus.

    Distinct frequencies get independent unimodular coefficients and the
    result is scaled to unit Besov norm at smoothness zero, so besov
    ratios of operator outputs read directly as per-band gains.
    """
    freqs = annulus_frequencies(grid, l, rng, max_modes)
    phases = np.exp(2j * np.pi * rng.uniform(size=freqs.shape[0]))
    spectrum = np.zeros(grid.shape, dtype=complex)
    for k, c in zip(freqs, phases):
        spectrum[tuple(index_of_frequency(ki, grid.size) for ki in k)] = c
    values = np.fft.ifftn(spectrum) * grid.total_nodes
    f = GridFunction(grid, values)
    scale = besov_norm(DyadicSystem(), f, 0.0)
    return GridFunction(grid, values / scale)


@dataclass(frozen=True)
class ProbeSpec:
    """Declarative probe: identical spec and seed build identical values.

    kind is one of weierstrass (level = top lacunary index, uses s),
    band_random (level = dyadic band), or single_mode (level = the
    frequency along the first axis).
    """

    kind: str
    s: float = 0.5
    level: int = 4
    seed: int = 0

    _KINDS = ("weierstrass", "band_random", "single_mode")

    def build(self, grid: TorusGrid) -> GridFunction:
        if self.kind == "weierstrass":
            return weierstrass(grid, self.s, self.level)
        if self.kind == "band_random":
            rng = np.random.default_rng(self.seed)
            return band_probe(grid, self.level, rng)
        if self.kind == "single_mode":
            if not abs(self.level) < grid.size // 2:
                raise ValueError(f"mode {self.level} at or above Nyquist")
            x1 = grid.node_mesh()[0]
            return GridFunction(grid, np.exp(2j * np.pi * self.level * x1))
        raise ValueError(f"unknown probe kind {self.kind!r}; choose from {self._KINDS}")
