"""Model gallery: exact exponents, metric closed forms, uncertainty."""

from fractions import Fraction

import numpy as np
import pytest

from torops.grid import angle_bracket
from torops.metrics import (
    check_continuity,
    check_temperance,
    check_weight,
    lambda_search,
    log_phase_points,
)
from torops.models import (
    HypoellipticModel,
    gallery,
    gallery_names,
    hypoelliptic_metric,
    hypoelliptic_weight,
    lambda_closed_form,
    q0_eps0,
    sum_of_squares_model,
)


def test_exponent_table_is_exact():
    assert q0_eps0(3, 1) == (5, Fraction(1, 3))
    assert q0_eps0(4, 1) == (7, Fraction(3, 8))
    assert q0_eps0(3, 2) == (4, Fraction(1, 6))
    for n in range(1, 5):
        q0, eps0 = q0_eps0(n, n)
        assert q0 == n
        assert eps0 == 0


def test_exponent_ranges():
    for n in range(1, 7):
        for r0 in range(1, n + 1):
            q0, eps0 = q0_eps0(n, r0)
            assert n <= q0 <= 2 * n
            assert Fraction(0) <= eps0 < Fraction(1, 2)


def test_exponent_validation():
    with pytest.raises(ValueError):
        q0_eps0(3, 0)
    with pytest.raises(ValueError):
        q0_eps0(3, 4)
    with pytest.raises(TypeError):
        q0_eps0(3.0, 1)


def test_gallery_invariants():
    expected = {
        "kolmogorov": (3, 1, 5, Fraction(1, 3)),
        "mumford": (4, 1, 7, Fraction(3, 8)),
        "degenerate-exp": (3, 2, 4, Fraction(1, 6)),
    }
    for name, (n, r0, q0, eps0) in expected.items():
        model = gallery(name)
        assert model.n == n
        assert model.r0 == r0
        assert model.q0 == q0
        assert model.eps0 == eps0
    lap = gallery("laplacian", n=2)
    assert lap.eps0 == 0
    heat = gallery("heat", n=2)
    assert heat.n == 3
    assert heat.r0 == 2
    assert heat.eps0 == Fraction(1, 6)


def test_unknown_model_lists_choices():
    with pytest.raises(ValueError) as err:
        gallery("biharmonic")
    for name in gallery_names():
        assert name in str(err.value)


def test_kolmogorov_symbol_and_sum_of_squares_agree():
    model = gallery("kolmogorov")
    rng = np.random.default_rng(0)
    x = rng.normal(size=(3, 20))
    xi = rng.normal(size=(3, 20))
    assert np.allclose(model.principal(x, xi), xi[0] ** 2)
    rebuilt = sum_of_squares_model("again", 3, [[1.0, 0.0, 0.0]], r0=1)
    assert np.allclose(rebuilt.principal(x, xi), model.principal(x, xi))


def test_sum_of_squares_with_varying_coefficients():
    # grushin-type field x1 d/dx2 gives a = x1^2 xi2^2
    model = sum_of_squares_model(
        "grushin",
        2,
        [lambda x: np.stack([np.zeros_like(x[0]), x[0]])],
        r0=1,
    )
    x = np.array([[0.5, -2.0], [1.0, 1.0]])
    xi = np.array([[1.0, 1.0], [3.0, -1.0]])
    assert np.allclose(model.principal(x, xi), x[0] ** 2 * xi[1] ** 2)


def test_degenerate_exp_vanishes_on_the_degeneracy_line():
    model = gallery("degenerate-exp", delta=1.0)
    x = np.array([[0.3], [0.0], [1.0]])
    xi = np.array([[1.0], [2.0], [10.0]])
    assert np.allclose(model.principal(x, xi), 1.0 + 4.0)
    far = np.array([[0.3], [50.0], [1.0]])
    vals = model.principal(far, xi)
    assert abs(vals[0] - (1.0 + 4.0 + np.exp(-1.0 / 50.0) * 100.0)) < 1e-10


def test_negative_symbol_is_refused():
    bad = HypoellipticModel("bad", 1, lambda x, xi: -np.ones_like(xi[0]), r0=1)
    with pytest.raises(ValueError, match="negative"):
        hypoelliptic_metric(bad).coefficients(np.zeros((1, 1)), np.ones((1, 1)))


def test_lambda_closed_form_matches_metric():
    rng = np.random.default_rng(1)
    for name in gallery_names():
        model = gallery(name)
        g = hypoelliptic_metric(model)
        x, xi = log_phase_points(model.n, 500, rng)
        assert np.allclose(
            g.lambda_value(x, xi), lambda_closed_form(model, x, xi), rtol=1e-12
        )


def test_lambda_never_dips_below_one():
    rng = np.random.default_rng(2)
    for name in gallery_names():
        model = gallery(name)
        g = hypoelliptic_metric(model)
        x, xi = log_phase_points(model.n, 20_000, rng)
        assert np.min(g.lambda_value(x, xi)) >= 1.0 - 1e-12


def test_lambda_search_confirms_closed_form_on_kolmogorov():
    rng = np.random.default_rng(3)
    model = gallery("kolmogorov")
    g = hypoelliptic_metric(model)
    x, xi = log_phase_points(3, 50, rng)
    searched = lambda_search(g, x, xi, rng, samples=64)
    assert np.allclose(searched, lambda_closed_form(model, x, xi), rtol=1e-12)


def test_fully_degenerate_model_sits_at_the_uncertainty_floor():
    flatline = HypoellipticModel("floor", 2, lambda x, xi: np.zeros_like(xi[0]), r0=1)
    g = hypoelliptic_metric(flatline)
    rng = np.random.default_rng(4)
    x, xi = log_phase_points(2, 1000, rng)
    assert np.allclose(g.lambda_value(x, xi), 1.0, atol=1e-14)


def test_elliptic_model_metric_satisfies_axioms():
    rng = np.random.default_rng(5)
    model = gallery("laplacian", n=1)
    g = hypoelliptic_metric(model)
    sampler = lambda count: log_phase_points(1, count, rng)
    cont = check_continuity(g, rng, trials=10_000, sampler=sampler)
    assert cont.passed, (cont.lowest_ratio, cont.highest_ratio)
    temp = check_temperance(g, rng, trials=10_000, sampler=sampler)
    assert temp.passed, (temp.exponent, temp.constant)


def test_elliptic_weight_is_admissible():
    rng = np.random.default_rng(6)
    model = gallery("laplacian", n=1)
    g = hypoelliptic_metric(model)
    m = hypoelliptic_weight(model)
    sampler = lambda count: log_phase_points(1, count, rng)
    rep = check_weight(m, g, rng, trials=10_000, sampler=sampler)
    assert rep.passed, (rep.exponent, rep.constant)


def test_weight_exponent_scales_the_value():
    model = gallery("kolmogorov")
    x = np.array([[0.1], [0.2], [0.3]])
    xi = np.array([[2.0], [1.0], [-1.0]])
    m1 = hypoelliptic_weight(model, 1.0)(x, xi)
    m3 = hypoelliptic_weight(model, -3.0)(x, xi)
    assert np.allclose(m3, m1**-3.0, rtol=1e-14)
