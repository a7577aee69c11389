"""Symbols a(x, xi) on torus phase space and their difference calculus.

Two backends share one interface: closed-form evaluators (vectorized
callables, optionally carrying registered analytic x-derivatives and a
declared separable decomposition) and dense tables sampled on a grid
times a frequency box.  Frequency-side regularity is always measured
with forward differences

    Delta_d a(x, xi) = a(x, xi + e_d) - a(x, xi),

iterated per axis for a multi-index alpha; x-side regularity uses the
registered derivative (closed forms) or spectral differentiation
(tables).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .dyadic import smooth_step
from .grid import TorusGrid, angle_bracket

__all__ = [
    "Symbol",
    "CallableSymbol",
    "TabulatedSymbol",
    "ExtendedSymbol",
    "multiplier",
    "separable_symbol",
    "tabulate",
    "extend_symbol",
    "restriction_check",
    "multi_indices",
    "ClassSpec",
    "ScanPlan",
    "SeminormReport",
    "toroidal_seminorm",
    "fefferman_seminorm",
    "seminorm_doubling_check",
    "cardinal_function",
    "leibniz_difference_residual",
]


def multi_indices(n: int, max_order: int) -> list[tuple[int, ...]]:
    """All multi-indices over n axes with total order at most max_order."""
    out = []
    for total in range(max_order + 1):
        for combo in itertools.product(range(total + 1), repeat=n):
            if sum(combo) == total:
                out.append(combo)
    return out


def _check_index(idx: Sequence[int], n: int, what: str) -> tuple[int, ...]:
    idx = tuple(int(v) for v in idx)
    if len(idx) != n or any(v < 0 for v in idx):
        raise ValueError(f"{what} {idx} is not a multi-index over {n} axes")
    return idx


class Symbol:
    """Common interface: evaluation plus the difference calculus."""

    n: int

    def eval(self, x: np.ndarray | None, xi: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def is_multiplier(self) -> bool:
        raise NotImplementedError

    def x_derivative(self, beta: Sequence[int]) -> "Symbol":
        raise NotImplementedError

    def difference(self, alpha: Sequence[int]) -> "Symbol":
        """Forward difference Delta^alpha in the frequency variables."""
        alpha = _check_index(alpha, self.n, "difference order")
        if sum(alpha) == 0:
            return self
        terms = []
        for gamma in itertools.product(*[range(a + 1) for a in alpha]):
            sign = (-1) ** (sum(alpha) - sum(gamma))
            coeff = sign * math.prod(math.comb(a, g) for a, g in zip(alpha, gamma))
            terms.append((float(coeff), np.array(gamma, dtype=float)))
        base = self

        def diff_fn(x, xi):
            xi = np.asarray(xi, dtype=float)
            acc = None
            for coeff, gamma in terms:
                shifted = xi + gamma.reshape((base.n,) + (1,) * (xi.ndim - 1))
                val = coeff * base.eval(None if base.is_multiplier else x, shifted)
                acc = val if acc is None else acc + val
            return acc

        return CallableSymbol(self.n, diff_fn, xi_only=self.is_multiplier)


@dataclass(frozen=True)
class CallableSymbol(Symbol):
    """Closed-form symbol; ``fn(x, xi)`` must broadcast over point arrays.

    ``x`` and ``xi`` carry shape (n, ...).  ``x_partial``, when given, is
    called as ``x_partial(beta, x, xi)`` and must return the analytic
    derivative of order beta in x.  ``separable_terms`` declares the
    decomposition ``a = sum_r c_r(x) m_r(xi)`` used by the accelerated
    application path; it is trusted, not verified.
    """

    n: int
    fn: Callable[..., np.ndarray]
    xi_only: bool = False
    x_partial: Callable[..., np.ndarray] | None = None
    separable_terms: tuple[tuple[Callable, Callable], ...] | None = None

    def eval(self, x, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if self.xi_only:
            return np.asarray(self.fn(None, xi), dtype=complex)
        if x is None:
            raise ValueError("x-dependent symbol evaluated without x")
        return np.asarray(self.fn(np.asarray(x, dtype=float), xi), dtype=complex)

    @property
    def is_multiplier(self) -> bool:
        return self.xi_only

    def x_derivative(self, beta: Sequence[int]) -> Symbol:
        beta = _check_index(beta, self.n, "derivative order")
        if sum(beta) == 0:
            return self
        if self.xi_only:
            return CallableSymbol(
                self.n, lambda x, xi: np.zeros(np.shape(xi)[1:]), xi_only=True
            )
        if self.x_partial is None:
            raise NotImplementedError(
                "closed-form symbol has no registered x-derivative; "
                "tabulate it to differentiate spectrally"
            )
        partial = self.x_partial
        return CallableSymbol(self.n, lambda x, xi: partial(beta, x, xi))


def multiplier(n: int, m_fn: Callable[[np.ndarray], np.ndarray]) -> CallableSymbol:
    """A xi-only symbol; ``m_fn`` receives the frequency array of shape (n, ...)."""
    return CallableSymbol(
        n,
        lambda x, xi: m_fn(xi),
        xi_only=True,
        separable_terms=((lambda x: 1.0, m_fn),),
    )


def separable_symbol(
    n: int,
    terms: Sequence[tuple[Callable, Callable]],
    term_x_partials: Sequence[Callable] | None = None,
) -> CallableSymbol:
    """Build a = sum_r c_r(x) m_r(xi) with the decomposition declared.

    ``term_x_partials[r]``, when provided, maps (beta, x) to the analytic
    derivative of c_r, enabling x_derivative on the closed form.
    """
    terms = tuple((c, m) for c, m in terms)

    def fn(x, xi):
        return sum(np.asarray(c(x)) * np.asarray(m(xi)) for c, m in terms)

    x_partial = None
    if term_x_partials is not None:
        partials = tuple(term_x_partials)

        def x_partial(beta, x, xi):
            return sum(
                np.asarray(dc(beta, x)) * np.asarray(m(xi))
                for dc, (_, m) in zip(partials, terms)
            )

    return CallableSymbol(n, fn, x_partial=x_partial, separable_terms=terms)


# ---------------------------------------------------------------------------
# Tabulated backend
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TabulatedSymbol(Symbol):
    """Dense samples on (grid nodes) x (frequency box).

    The stored box runs from xi_min to xi_min + extent - 1 per axis and
    always includes ``margin`` look-ahead columns at the top so forward
    differences up to that total order stay in range.  ``grid`` is None
    for xi-only tables.
    """

    n: int
    values: np.ndarray
    xi_min: tuple[int, ...]
    margin: int
    grid: TorusGrid | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        object.__setattr__(self, "xi_min", tuple(int(v) for v in self.xi_min))
        expect = self.grid.shape if self.grid is not None else ()
        if self.values.shape[: len(expect)] != expect:
            raise ValueError("table x-shape does not match grid")
        if self.values.ndim != len(expect) + self.n:
            raise ValueError("table rank does not match dimension n")

    @property
    def is_multiplier(self) -> bool:
        return self.grid is None

    @property
    def xi_extent(self) -> tuple[int, ...]:
        off = 0 if self.grid is None else self.grid.n
        return self.values.shape[off:]

    def _xi_indices(self, xi: np.ndarray) -> list[np.ndarray]:
        xi = np.asarray(xi, dtype=float)
        idx = []
        for d in range(self.n):
            k = np.round(xi[d]).astype(np.int64)
            if not np.allclose(xi[d], k):
                raise ValueError(
                    f"tabulated symbol needs integer frequencies on axis {d + 1}"
                )
            i = k - self.xi_min[d]
            if np.any(i < 0) or np.any(i >= self.xi_extent[d]):
                lo = self.xi_min[d]
                hi = self.xi_min[d] + self.xi_extent[d] - 1
                raise ValueError(
                    f"frequency out of stored range on axis {d + 1}: "
                    f"stored box is [{lo}, {hi}]"
                )
            idx.append(i)
        return idx

    def _x_indices(self, x: np.ndarray) -> list[np.ndarray]:
        assert self.grid is not None
        N = self.grid.size
        idx = []
        for d in range(self.grid.n):
            scaled = np.asarray(x[d], dtype=float) * N
            j = np.round(scaled)
            if not np.allclose(scaled, j, atol=1e-9 * N):
                raise ValueError(f"tabulated symbol needs on-grid x on axis {d + 1}")
            idx.append(j.astype(np.int64) % N)
        return idx

    def eval(self, x, xi) -> np.ndarray:
        ki = self._xi_indices(xi)
        if self.grid is None:
            return self.values[tuple(ki)]
        if x is None:
            raise ValueError("x-dependent symbol evaluated without x")
        xj = self._x_indices(np.asarray(x, dtype=float))
        idx = np.broadcast_arrays(*(xj + ki))
        return self.values[tuple(idx)]

    def x_derivative(self, beta: Sequence[int]) -> Symbol:
        beta = _check_index(beta, self.n, "derivative order")
        if sum(beta) == 0:
            return self
        if self.grid is None:
            return TabulatedSymbol(
                self.n, np.zeros_like(self.values), self.xi_min, self.margin
            )
        N = self.grid.size
        freqs = self.grid.axis_frequencies().astype(float)
        new = self.values
        for d, order in enumerate(beta):
            if order == 0:
                continue
            spec = np.fft.fft(new, axis=d)
            shape = [1] * new.ndim
            shape[d] = N
            spec = spec * (2j * np.pi * freqs.reshape(shape)) ** order
            new = np.fft.ifft(spec, axis=d)
        return TabulatedSymbol(self.n, new, self.xi_min, self.margin, self.grid)


def tabulate(a: Symbol, grid: TorusGrid, xi_extent: int, margin: int = 4) -> TabulatedSymbol:
    """Sample a symbol on grid nodes times the box |xi_d| <= xi_extent.

    ``margin`` extra columns beyond +xi_extent are stored per axis so
    forward differences up to that total order remain evaluable.
    """
    n = a.n
    axes = [np.arange(-xi_extent, xi_extent + margin + 1).astype(float)] * n
    xi = np.stack(np.meshgrid(*axes, indexing="ij"))
    xi_min = (-xi_extent,) * n
    if a.is_multiplier:
        return TabulatedSymbol(n, a.eval(None, xi), xi_min, margin)
    mesh = grid.node_mesh()
    x_b = mesh.reshape((n,) + grid.shape + (1,) * n)
    xi_b = xi.reshape((n,) + (1,) * grid.n + xi.shape[1:])
    return TabulatedSymbol(n, a.eval(x_b, xi_b), xi_min, margin, grid)


# ---------------------------------------------------------------------------
# Seminorm scans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassSpec:
    """Order and type (m, rho, delta) of a toroidal symbol class."""

    m: float
    rho: float = 1.0
    delta: float = 0.0


@dataclass(frozen=True)
class ScanPlan:
    """Finite scan lattice: integer |xi_d| <= xi_extent, x on a subgrid.

    For table-backed symbols ``x_size`` must divide the table's grid size
    so every scan node is a stored node.
    """

    xi_extent: int
    x_size: int = 16

    def xi_mesh(self, n: int) -> np.ndarray:
        axes = [np.arange(-self.xi_extent, self.xi_extent + 1).astype(float)] * n
        return np.stack(np.meshgrid(*axes, indexing="ij"))

    def x_mesh(self, n: int) -> np.ndarray:
        axes = [np.arange(self.x_size) / self.x_size] * n
        return np.stack(np.meshgrid(*axes, indexing="ij"))


@dataclass(frozen=True)
class SeminormReport:
    constants: dict
    sup: float
    flagged: bool
    threshold: float | None


def _scan_max(a: Symbol, weight: np.ndarray, plan: ScanPlan) -> float:
    """max of |a| * weight over the scan lattice; weight indexed like xi mesh."""
    n = a.n
    xi = plan.xi_mesh(n)
    if a.is_multiplier:
        return float(np.max(np.abs(a.eval(None, xi)) * weight))
    flat_x = plan.x_mesh(n).reshape(n, -1)
    best = 0.0
    chunk = max(1, int(2**22 // max(1, xi[0].size)))
    for start in range(0, flat_x.shape[1], chunk):
        xs = flat_x[:, start : start + chunk]
        x_b = xs.reshape((n, -1) + (1,) * n)
        xi_b = xi.reshape((n, 1) + xi.shape[1:])
        vals = np.abs(a.eval(x_b, xi_b)) * weight[None, ...]
        best = max(best, float(np.max(vals)))
    return best


def toroidal_seminorm(
    a: Symbol,
    spec: ClassSpec,
    alpha_max: int,
    beta_max: int,
    plan: ScanPlan,
    threshold: float | None = None,
) -> SeminormReport:
    """Constants C_{alpha,beta} = max |Delta^a d_x^b a| <xi>^{-(m - rho|a| + delta|b|)}."""
    constants: dict[tuple[tuple[int, ...], tuple[int, ...]], float] = {}
    angles = angle_bracket(plan.xi_mesh(a.n))
    for beta in multi_indices(a.n, beta_max):
        ab = a.x_derivative(beta)
        for alpha in multi_indices(a.n, alpha_max):
            weight = angles ** (-(spec.m - spec.rho * sum(alpha) + spec.delta * sum(beta)))
            constants[(alpha, beta)] = _scan_max(ab.difference(alpha), weight, plan)
    sup = max(constants.values())
    return SeminormReport(constants, sup, threshold is not None and sup > threshold, threshold)


def fefferman_seminorm(
    a: Symbol,
    eps: float,
    plan: ScanPlan,
    k: int | None = None,
    threshold: float | None = None,
) -> SeminormReport:
    """Constants C_alpha = max |Delta^alpha a| <xi>^{n eps/2 + (1-eps)|alpha|}.

    The default depth k = floor(n/2) + 1 is the sharp difference order of
    the limited-regularity boundedness hypothesis being certified.
    """
    n = a.n
    if k is None:
        k = n // 2 + 1
    angles = angle_bracket(plan.xi_mesh(n))
    constants: dict[tuple[int, ...], float] = {}
    for alpha in multi_indices(n, k):
        weight = angles ** (n * eps / 2.0 + (1.0 - eps) * sum(alpha))
        constants[alpha] = _scan_max(a.difference(alpha), weight, plan)
    sup = max(constants.values())
    return SeminormReport(constants, sup, threshold is not None and sup > threshold, threshold)


def seminorm_doubling_check(
    a: Symbol,
    spec: ClassSpec,
    alpha_max: int,
    beta_max: int,
    plan: ScanPlan,
    rel_tol: float = 0.02,
) -> tuple[bool, float]:
    """Class-membership surrogate: constants stable when the scan box doubles."""
    small = toroidal_seminorm(a, spec, alpha_max, beta_max, plan)
    big = toroidal_seminorm(a, spec, alpha_max, beta_max, ScanPlan(2 * plan.xi_extent, plan.x_size))
    rel = abs(big.sup - small.sup) / max(small.sup, 1e-300)
    return rel <= rel_tol, rel


def leibniz_difference_residual(
    a: Symbol, b: Symbol, axis: int, xi: np.ndarray, x: np.ndarray | None = None
) -> float:
    """Residual of Delta(ab) = a(.+e) Delta b + (Delta a) b at given points."""
    e = [0] * a.n
    e[axis] = 1
    both_multiplier = a.is_multiplier and b.is_multiplier

    def prod_fn(xx, kk):
        return a.eval(None if a.is_multiplier else xx, kk) * b.eval(
            None if b.is_multiplier else xx, kk
        )

    prod = CallableSymbol(a.n, prod_fn, xi_only=both_multiplier)
    xi = np.asarray(xi, dtype=float)
    shift = np.array(e, dtype=float).reshape((a.n,) + (1,) * (xi.ndim - 1))
    lhs = prod.difference(e).eval(x, xi)
    rhs = a.eval(None if a.is_multiplier else x, xi + shift) * b.difference(e).eval(
        x, xi
    ) + a.difference(e).eval(x, xi) * b.eval(None if b.is_multiplier else x, xi)
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# Extension from the frequency lattice to all of R^n
# ---------------------------------------------------------------------------

_CARDINAL_SPACING = 1.0 / 64.0  # node spacing of the cached 1-D table
_CARDINAL_HALF_RANGE = 512.0  # table covers |t| <= 512


def _bump_spectrum(omega: np.ndarray) -> np.ndarray:
    """Smooth even bump, 1 on |w| <= 1/4 and 0 on |w| >= 3/4, glued so its
    integer translates sum to one exactly (which is what makes the inverse
    transform hit 1 at t=0 and 0 at every other integer)."""
    return 1.0 - smooth_step(2.0 * np.abs(omega) - 0.5)


class _Cardinal:
    """theta(t): inverse Fourier transform of the partition bump.

    Evaluated once by quadrature (a single long FFT of the finely sampled
    bump) and cached on a 1-D table with cubic interpolation.  Integers
    are table nodes, so the cardinal values there carry no interpolation
    error.
    """

    def __init__(self) -> None:
        window = 1.0 / _CARDINAL_SPACING  # total omega window width
        count = int(round(2.0 * _CARDINAL_HALF_RANGE * window))
        domega = window / count
        omega = (np.arange(count) - count // 2) * domega
        spectrum = _bump_spectrum(omega)
        vals = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(spectrum)))
        vals = np.real(vals) * count * domega
        t_nodes = (np.arange(count) - count // 2) / window
        self.half_range = float(-t_nodes[0])
        self.spline = CubicSpline(t_nodes, vals)
        self._slope = self.spline.derivative()

    def value(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        ok = np.abs(t) <= self.half_range
        out = np.zeros_like(t)
        out[ok] = self.spline(t[ok])
        return out

    def slope(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        ok = np.abs(t) <= self.half_range
        out = np.zeros_like(t)
        out[ok] = self._slope(t[ok])
        return out


_CARDINAL_CACHE: _Cardinal | None = None


def cardinal_function() -> _Cardinal:
    global _CARDINAL_CACHE
    if _CARDINAL_CACHE is None:
        _CARDINAL_CACHE = _Cardinal()
    return _CARDINAL_CACHE


@dataclass(frozen=True)
class ExtendedSymbol:
    """Continuous-frequency extension a'(x, xi) = sum_k theta(xi - k) a(x, k).

    The cardinal sum runs over the stored box |k_d| <= xi_max, so points
    within ``margin`` of the box edge are refused: there the truncated
    tail of theta would silently pollute the value.
    """

    base: Symbol
    xi_max: int
    margin: int = 8

    @property
    def n(self) -> int:
        return self.base.n

    def eval(self, x, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        limit = self.xi_max - self.margin
        if np.any(np.abs(xi) > limit):
            raise ValueError(
                f"extension evaluated outside |xi_d| <= {limit} "
                f"(stored box {self.xi_max} minus margin {self.margin})"
            )
        return self._contract(x, xi, deriv_axis=None)

    def derivative_xi(self, x, xi, axis: int) -> np.ndarray:
        """d/dxi_axis of the extension via the cardinal spline derivative."""
        xi = np.asarray(xi, dtype=float)
        limit = self.xi_max - self.margin
        if np.any(np.abs(xi) > limit):
            raise ValueError(f"extension derivative outside |xi_d| <= {limit}")
        return self._contract(x, xi, deriv_axis=axis)

    def _contract(self, x, xi, deriv_axis: int | None) -> np.ndarray:
        theta = cardinal_function()
        n = self.n
        ks = np.arange(-self.xi_max, self.xi_max + 1).astype(float)
        out_shape = xi.shape[1:]
        flat = xi.reshape(n, -1)
        points = flat.shape[1]
        weights = []
        for d in range(n):
            t = flat[d][:, None] - ks[None, :]
            weights.append(theta.slope(t) if deriv_axis == d else theta.value(t))
        kmesh = np.stack(np.meshgrid(*([ks] * n), indexing="ij"))
        if self.base.is_multiplier:
            base_vals = np.broadcast_to(
                self.base.eval(None, kmesh), (points,) + (ks.size,) * n
            )
        else:
            if x is None:
                raise ValueError("x-dependent extension evaluated without x")
            xf = np.broadcast_to(np.asarray(x, dtype=float), (n,) + out_shape)
            x_b = xf.reshape((n, points) + (1,) * n)
            k_b = kmesh.reshape((n, 1) + kmesh.shape[1:])
            base_vals = self.base.eval(x_b, k_b)
        acc = base_vals
        for d in range(n):
            acc = np.einsum("pk...,pk->p...", acc, weights[d])
        return acc.reshape(out_shape)


def extend_symbol(a: Symbol, xi_max: int, margin: int = 8) -> ExtendedSymbol:
    """Cardinal-series extension of lattice frequencies to R^n."""
    return ExtendedSymbol(a, xi_max, margin)


def restriction_check(
    a: Symbol, ext: ExtendedSymbol, plan: ScanPlan, x: np.ndarray | None = None
) -> float:
    """max |a(x,k) - a'(x,k)| over the integer scan lattice."""
    xi = plan.xi_mesh(a.n)
    if a.is_multiplier:
        lhs = a.eval(None, xi)
    else:
        lhs = a.eval(x, xi)
    return float(np.max(np.abs(lhs - ext.eval(x, xi))))
