"""Degenerate second-order model operators and their phase-space data.

Each model carries a nonnegative principal symbol a(x, xi) and the rank
lower bound r0 of its second-order coefficient matrix.  From those the
exponents

    Q0 = r0 + 2(n - r0),    eps0 = Q0/(2n) - 1/2

follow by exact rational arithmetic, and the associated metric and
weight are

    g = m^{-2} (<xi>^2 dx^2 + dxi^2),    m = (a + <xi>)^{1/2},

whose uncertainty parameter has the closed form (a + <xi>)/<xi>.  The
rank is hardcoded per model from the coefficient matrix; checking the
bracket-generating condition is out of scope here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .grid import angle_bracket
from .metrics import SplitMetric

__all__ = [
    "HypoellipticModel",
    "q0_eps0",
    "hypoelliptic_metric",
    "hypoelliptic_weight",
    "lambda_closed_form",
    "sum_of_squares_model",
    "gallery",
    "gallery_names",
]


def q0_eps0(n: int, r0: int) -> tuple[int, Fraction]:
    """Exact (Q0, eps0) from the ambient dimension and the rank bound."""
    if not (isinstance(n, int) and isinstance(r0, int)):
        raise TypeError("n and r0 must be integers")
    if not 1 <= r0 <= n:
        raise ValueError(f"need 1 <= r0 <= n, got r0={r0}, n={n}")
    q0 = r0 + 2 * (n - r0)
    eps0 = Fraction(q0, 2 * n) - Fraction(1, 2)
    return q0, eps0


@dataclass(frozen=True)
class HypoellipticModel:
    """name, ambient dimension, principal symbol evaluator, rank bound.

    ``a`` maps (x, xi) with shapes (n, ...) to a nonnegative array; the
    derived exponents are exact rationals.
    """

    name: str
    n: int
    a: Callable[[np.ndarray, np.ndarray], np.ndarray]
    r0: int
    description: str = ""

    @property
    def q0(self) -> int:
        return q0_eps0(self.n, self.r0)[0]

    @property
    def eps0(self) -> Fraction:
        return q0_eps0(self.n, self.r0)[1]

    def principal(self, x, xi) -> np.ndarray:
        vals = np.asarray(self.a(np.asarray(x, float), np.asarray(xi, float)), float)
        if np.any(vals < 0):
            raise ValueError(f"model {self.name}: principal symbol went negative")
        return vals


def _m_squared(model: HypoellipticModel, x, xi) -> np.ndarray:
    return model.principal(x, xi) + angle_bracket(xi)


def hypoelliptic_metric(model: HypoellipticModel) -> SplitMetric:
    """g = m^{-2}(<xi>^2 dx^2 + dxi^2) with m^2 = a + <xi>."""
    n = model.n

    def hx(x, xi):
        c = angle_bracket(xi) ** 2 / _m_squared(model, x, xi)
        return np.broadcast_to(c, (n,) + c.shape)

    def hxi(x, xi):
        c = 1.0 / _m_squared(model, x, xi)
        return np.broadcast_to(c, (n,) + c.shape)

    return SplitMetric(n, hx, hxi, name=f"{model.name}-metric")


def hypoelliptic_weight(
    model: HypoellipticModel, exponent: float = 1.0
) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """The weight m^exponent, m = (a + <xi>)^{1/2}."""

    def weight(x, xi):
        return _m_squared(model, x, xi) ** (exponent / 2.0)

    return weight


def lambda_closed_form(model: HypoellipticModel, x, xi) -> np.ndarray:
    """(a + <xi>)/<xi>, the uncertainty parameter of the model metric."""
    return _m_squared(model, x, xi) / angle_bracket(xi)


def sum_of_squares_model(
    name: str,
    n: int,
    fields: Sequence[Sequence[float] | Callable],
    r0: int,
    description: str = "",
) -> HypoellipticModel:
    """Model with a = sum_j (b_j(x) . xi)^2 for first-order fields b_j.

    Each field is either a constant coefficient vector of length n or a
    callable x -> (n, ...) coefficient array.
    """
    frozen = []
    for b in fields:
        if callable(b):
            frozen.append(b)
        else:
            vec = np.asarray(b, dtype=float)
            if vec.shape != (n,):
                raise ValueError(f"constant field must have length {n}")
            frozen.append(lambda x, vec=vec: vec.reshape((n,) + (1,) * (x.ndim - 1)))

    def a(x, xi):
        total = np.zeros(np.broadcast_shapes(x.shape[1:], xi.shape[1:]))
        for b in frozen:
            coeff = np.asarray(b(x), dtype=float)
            total = total + np.sum(coeff * xi, axis=0) ** 2
        return total

    return HypoellipticModel(name=name, n=n, a=a, r0=r0, description=description)


def _laplacian(n: int) -> HypoellipticModel:
    def a(x, xi):
        return np.sum(xi**2, axis=0)

    return HypoellipticModel(
        "laplacian", n, a, r0=n, description=f"elliptic -Delta on {n} variables"
    )


def _heat(base: int) -> HypoellipticModel:
    n = base + 1

    def a(x, xi):
        return np.sum(xi[:base] ** 2, axis=0)

    return HypoellipticModel(
        "heat",
        n,
        a,
        r0=base,
        description=f"-Delta_x + d/dt, {base} space variables plus time",
    )


def _kolmogorov() -> HypoellipticModel:
    return sum_of_squares_model(
        "kolmogorov",
        3,
        [[1.0, 0.0, 0.0]],
        r0=1,
        description="-d^2/dx^2 - x d/dy + d/dt",
    )


def _mumford() -> HypoellipticModel:
    return sum_of_squares_model(
        "mumford",
        4,
        [[1.0, 0.0, 0.0, 0.0]],
        r0=1,
        description="theta-direction diffusion transported over the plane",
    )


def _degenerate_exp(delta: float) -> HypoellipticModel:
    if delta <= 0:
        raise ValueError("delta must be positive")

    def a(x, xi):
        mag = np.abs(x[1])
        with np.errstate(divide="ignore"):
            damp = np.where(mag > 0, np.exp(-1.0 / np.where(mag > 0, mag, 1.0) ** delta), 0.0)
        return xi[0] ** 2 + xi[1] ** 2 + damp * xi[2] ** 2

    return HypoellipticModel(
        "degenerate-exp",
        3,
        a,
        r0=2,
        description=f"two elliptic directions, third damped by exp(-1/|x2|^{delta})",
    )


_BUILDERS = {
    "laplacian": lambda params: _laplacian(int(params.get("n", 2))),
    "heat": lambda params: _heat(int(params.get("n", 2))),
    "kolmogorov": lambda params: _kolmogorov(),
    "mumford": lambda params: _mumford(),
    "degenerate-exp": lambda params: _degenerate_exp(float(params.get("delta", 1.0))),
}


def gallery_names() -> list[str]:
    return sorted(_BUILDERS)


def gallery(name: str, **params) -> HypoellipticModel:
    """Look up a model by name; parameters: n for laplacian/heat, delta
    for degenerate-exp."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(
            f"unknown model {name!r}; available: {', '.join(gallery_names())}"
        ) from None
    return builder(params)
