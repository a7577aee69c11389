"""Apply symbols as operators on grid functions.

Op(a) f(x) = sum_xi e^{2 pi i <x, xi>} a(x, xi) fhat(xi), summed over the
signed frequency box of the grid.  Frequency multipliers cost two FFTs.
Symbols with a declared decomposition a = sum_r c_r(x) m_r(xi) cost two
FFTs per term.  General symbols go through a dense table over (node,
frequency) pairs whose inverse transform is taken row by row; only its
diagonal is kept.
"""

from __future__ import annotations

import numpy as np

from .grid import GridFunction, TorusGrid
from .symbols import CallableSymbol, Symbol

__all__ = ["apply_multiplier", "apply_toroidal", "freeze"]

_DENSE_LIMIT = 2**24  # max entries of the (node, frequency) table


def _multiplier_weights(a: Symbol | np.ndarray, grid: TorusGrid) -> np.ndarray:
    if isinstance(a, Symbol):
        return np.asarray(a.eval(None, grid.frequency_mesh().astype(float)))
    w = np.asarray(a)
    if w.shape != grid.shape:
        raise ValueError("multiplier weight array does not match grid shape")
    return w


def apply_multiplier(a: Symbol | np.ndarray, f: GridFunction) -> GridFunction:
    """sigma(D) f for a frequency multiplier.

    ``a`` is either a xi-only symbol or a ready weight array in FFT
    layout (weights[i] multiplies the coefficient of frequency_of_index(i)).
    """
    if isinstance(a, Symbol) and not a.is_multiplier:
        raise ValueError("apply_multiplier needs a frequency multiplier")
    w = _multiplier_weights(a, f.grid)
    spec = np.fft.fftn(f.values)
    return GridFunction(f.grid, np.fft.ifftn(w * spec))


def _dense_apply(a: Symbol, f: GridFunction) -> GridFunction:
    grid = f.grid
    n = grid.n
    if grid.total_nodes**2 > _DENSE_LIMIT:
        raise ValueError(
            "dense application table would exceed the memory budget; "
            "declare separable terms for this symbol or shrink the grid"
        )
    mesh = grid.node_mesh()
    freqs = grid.frequency_mesh().astype(float)
    x_b = mesh.reshape((n,) + grid.shape + (1,) * n)
    xi_b = freqs.reshape((n,) + (1,) * n + grid.shape)
    table = a.eval(x_b, xi_b)
    spec = np.fft.fftn(f.values) / grid.total_nodes
    prod = table * spec.reshape((1,) * n + grid.shape)
    rows = np.fft.ifftn(prod, axes=tuple(range(n, 2 * n))) * grid.total_nodes
    subscripts = {1: "jj->j", 2: "abab->ab", 3: "abcabc->abc"}[n]
    return GridFunction(grid, np.einsum(subscripts, rows))


def _separable_apply(a: CallableSymbol, f: GridFunction) -> GridFunction:
    grid = f.grid
    mesh = grid.node_mesh()
    freqs = grid.frequency_mesh().astype(float)
    spec = np.fft.fftn(f.values)
    out = np.zeros(grid.shape, dtype=complex)
    for c_fn, m_fn in a.separable_terms:
        weights = np.asarray(m_fn(freqs))
        out = out + np.asarray(c_fn(mesh)) * np.fft.ifftn(weights * spec)
    return GridFunction(grid, out)


def apply_toroidal(a: Symbol, f: GridFunction) -> GridFunction:
    """Op(a) f on the grid of f."""
    if a.n != f.grid.n:
        raise ValueError("symbol and function dimensions differ")
    if a.is_multiplier:
        return apply_multiplier(a, f)
    if isinstance(a, CallableSymbol) and a.separable_terms is not None:
        return _separable_apply(a, f)
    return _dense_apply(a, f)


def freeze(a: Symbol, z: np.ndarray) -> CallableSymbol:
    """The frozen multiplier sigma_z(xi) = a(z, xi).

    Freezing realizes the pointwise picture Op(a) f(z) = (sigma_z(D) f)(z).
    """
    z = np.asarray(z, dtype=float).reshape(a.n)

    def fn(x, xi):
        zb = z.reshape((a.n,) + (1,) * (np.ndim(xi) - 1))
        return a.eval(np.broadcast_to(zb, np.shape(xi)), xi)

    return CallableSymbol(a.n, fn, xi_only=True)
