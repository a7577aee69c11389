"""Uniform grids on the torus [0,1)^n and the discrete Fourier pairing.

Conventions (used by every other module):

* nodes are ``x_j = j/N`` with ``j = 0..N-1`` per axis,
* frequencies are signed integers with ``-N/2 <= xi_d < N/2``,
* analysis:  ``coeffs(xi) = N^{-n} sum_j f(x_j) exp(-2 pi i <x_j, xi>)``,
* synthesis: ``f(x_j) = sum_xi coeffs(xi) exp(+2 pi i <x_j, xi>)``.

Coefficient arrays are stored in FFT layout.  The index <-> frequency
bijection along each axis is ``freq(i) = i`` for ``i < N/2`` and
``i - N`` otherwise; the inverse is ``index(xi) = xi mod N``.  This wrap
map is part of the public contract, see :func:`frequency_of_index` and
:func:`index_of_frequency`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "MAX_TOTAL_NODES",
    "TorusGrid",
    "GridFunction",
    "SpectralCoeffs",
    "angle_bracket",
    "forward_fft",
    "inverse_fft",
    "sample",
    "sup_norm",
    "frequency_of_index",
    "index_of_frequency",
    "write_function_csv",
    "read_function_csv",
    "write_coeffs_csv",
    "read_coeffs_csv",
]

MAX_TOTAL_NODES = 2**26


def frequency_of_index(i: np.ndarray | int, size: int) -> np.ndarray | int:
    """Map an FFT-layout array index to its signed frequency."""
    return np.where(np.asarray(i) < size // 2, i, np.asarray(i) - size)[()]


def index_of_frequency(xi: np.ndarray | int, size: int) -> np.ndarray | int:
    """Map a signed frequency to its FFT-layout array index (the wrap map)."""
    return np.mod(xi, size)


@dataclass(frozen=True)
class TorusGrid:
    """A uniform N^n grid on [0,1)^n with N a power of two.

    Parameters
    ----------
    n : int
        Dimension, 1 to 3.
    size : int
        Nodes per axis N; power of two, at least 8.  The total node
        count N^n must stay at or below 2^26.
    """

    n: int
    size: int

    def __post_init__(self) -> None:
        if self.n not in (1, 2, 3):
            raise ValueError(f"dimension n={self.n} not supported, expected 1, 2 or 3")
        N = self.size
        if N < 8 or (N & (N - 1)) != 0:
            raise ValueError(f"size N={N} must be a power of two >= 8")
        if N**self.n > MAX_TOTAL_NODES:
            raise ValueError(
                f"N^n = {N**self.n} exceeds the node budget {MAX_TOTAL_NODES}"
            )

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.size,) * self.n

    @property
    def total_nodes(self) -> int:
        return self.size**self.n

    def axis_nodes(self) -> np.ndarray:
        """The 1-D node coordinates j/N."""
        return np.arange(self.size) / self.size

    def node_mesh(self) -> np.ndarray:
        """Node coordinates, shape (n,) + shape."""
        axes = [self.axis_nodes()] * self.n
        return np.stack(np.meshgrid(*axes, indexing="ij"))

    def axis_frequencies(self) -> np.ndarray:
        """Signed integer frequencies of one axis in FFT layout."""
        return np.fft.fftfreq(self.size, d=1.0 / self.size).astype(np.int64)

    def frequency_mesh(self) -> np.ndarray:
        """Signed frequencies, shape (n,) + shape, FFT layout."""
        axes = [self.axis_frequencies()] * self.n
        return np.stack(np.meshgrid(*axes, indexing="ij"))

    def angle_mesh(self) -> np.ndarray:
        """<xi> = (1 + |xi|^2)^(1/2) on the frequency mesh."""
        return angle_bracket(self.frequency_mesh())


def angle_bracket(xi: np.ndarray) -> np.ndarray:
    """Japanese bracket (1 + |xi|^2)^(1/2); xi has shape (n, ...) or (...)."""
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 0:
        return np.sqrt(1.0 + xi**2)
    return np.sqrt(1.0 + np.sum(xi**2, axis=0))


@dataclass(frozen=True)
class GridFunction:
    """Complex samples on the nodes of a :class:`TorusGrid`."""

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ValueError(
                f"values shape {v.shape} does not match grid shape {self.grid.shape}"
            )
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SpectralCoeffs:
    """Fourier coefficients in FFT layout on a :class:`TorusGrid`."""

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ValueError(
                f"coefficient shape {v.shape} does not match grid shape {self.grid.shape}"
            )
        object.__setattr__(self, "values", v)


def forward_fft(f: GridFunction) -> SpectralCoeffs:
    """Analysis transform, coeffs(xi) = N^{-n} sum_j f(x_j) e^{-2 pi i <x_j, xi>}."""
    return SpectralCoeffs(f.grid, np.fft.fftn(f.values) / f.grid.total_nodes)


def inverse_fft(c: SpectralCoeffs) -> GridFunction:
    """Synthesis transform, f(x_j) = sum_xi coeffs(xi) e^{+2 pi i <x_j, xi>}."""
    return GridFunction(c.grid, np.fft.ifftn(c.values) * c.grid.total_nodes)


def sample(fn: Callable[..., np.ndarray], grid: TorusGrid) -> GridFunction:
    """Evaluate ``fn(x1, ..., xn)`` on all nodes.

    ``fn`` receives one broadcastable coordinate array per axis and must
    return finite values; the first offending node is reported otherwise.
    """
    mesh = grid.node_mesh()
    values = np.asarray(fn(*mesh), dtype=complex)
    values = np.broadcast_to(values, grid.shape).copy()
    bad = ~np.isfinite(values)
    if np.any(bad):
        j = np.argwhere(bad)[0]
        node = tuple(j / grid.size)
        raise ValueError(f"sampled function is not finite at node x={node}")
    return GridFunction(grid, values)


def sup_norm(f: GridFunction | SpectralCoeffs | np.ndarray) -> float:
    """Maximum modulus over the grid."""
    values = f.values if hasattr(f, "values") else np.asarray(f)
    return float(np.max(np.abs(values)))


# ---------------------------------------------------------------------------
# CSV serialization: index columns first, then real and imaginary parts.
# Functions carry node indices j1..jn, coefficients carry signed xi1..xin.
# ---------------------------------------------------------------------------

_FLOAT_FMT = "{:.17e}"


def _write_rows(path: str, header: list[str], index_mesh: np.ndarray, values: np.ndarray) -> None:
    flat_idx = index_mesh.reshape(index_mesh.shape[0], -1)
    flat_val = values.reshape(-1)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in range(flat_val.size):
            row = [str(int(flat_idx[d, k])) for d in range(flat_idx.shape[0])]
            row.append(_FLOAT_FMT.format(flat_val[k].real))
            row.append(_FLOAT_FMT.format(flat_val[k].imag))
            writer.writerow(row)


def _read_rows(path: str, prefix: str) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        idx_cols = [h for h in header if h.startswith(prefix)]
        if not idx_cols or header[-2:] != ["re", "im"]:
            raise ValueError(
                f"{path}: expected columns {prefix}1..{prefix}n, re, im; got {header}"
            )
        rows = list(reader)
    idx = np.array([[int(r[d]) for d in range(len(idx_cols))] for r in rows], dtype=np.int64)
    val = np.array([complex(float(r[-2]), float(r[-1])) for r in rows])
    return idx, val


def _grid_for_rows(count: int, n: int) -> TorusGrid:
    size = round(count ** (1.0 / n))
    if size**n != count:
        raise ValueError(f"row count {count} is not a perfect {n}-th power")
    return TorusGrid(n, size)


def write_function_csv(f: GridFunction, path: str) -> None:
    header = [f"j{d + 1}" for d in range(f.grid.n)] + ["re", "im"]
    idx = np.stack(np.meshgrid(*[np.arange(f.grid.size)] * f.grid.n, indexing="ij"))
    _write_rows(path, header, idx, f.values)


def read_function_csv(path: str) -> GridFunction:
    idx, val = _read_rows(path, "j")
    n = idx.shape[1]
    grid = _grid_for_rows(val.size, n)
    values = np.zeros(grid.shape, dtype=complex)
    values[tuple(idx.T)] = val
    return GridFunction(grid, values)


def write_coeffs_csv(c: SpectralCoeffs, path: str) -> None:
    header = [f"xi{d + 1}" for d in range(c.grid.n)] + ["re", "im"]
    _write_rows(path, header, c.grid.frequency_mesh(), c.values)


def read_coeffs_csv(path: str) -> SpectralCoeffs:
    idx, val = _read_rows(path, "xi")
    n = idx.shape[1]
    grid = _grid_for_rows(val.size, n)
    values = np.zeros(grid.shape, dtype=complex)
    values[tuple(index_of_frequency(idx, grid.size).T)] = val
    return SpectralCoeffs(grid, values)
