"""Probe construction: lacunary series and band-limited randomness."""

import numpy as np
import pytest

from torops.dyadic import DyadicSystem, band_sups, besov_norm, holder_norm
from torops.grid import TorusGrid, angle_bracket, forward_fft
from torops.probes import ProbeSpec, annulus_frequencies, band_probe, weierstrass


def test_weierstrass_holder_scale():
    grid = TorusGrid(1, 1024)
    for s in (0.3, 0.5, 0.7):
        w = weierstrass(grid, s)
        sups = band_sups(DyadicSystem(), w)
        # bands 0 and 1 blend the first few terms; from l=2 up each
        # lacunary term fills its own band at height 2^{-ls}
        for l in range(2, 9):
            assert abs(sups[l] - 2.0 ** (-l * s)) < 0.02 * 2.0 ** (-l * s)
        assert np.isfinite(holder_norm(w, s))


def test_weierstrass_guards():
    grid = TorusGrid(1, 64)
    with pytest.raises(ValueError, match="Nyquist"):
        weierstrass(grid, 0.5, max_level=5)
    with pytest.raises(ValueError):
        weierstrass(grid, 1.5)


def test_annulus_frequencies_1d_exact():
    grid = TorusGrid(1, 256)
    rng = np.random.default_rng(0)
    freqs = annulus_frequencies(grid, 3, rng, max_modes=1000)
    bracket = angle_bracket(freqs.T.astype(float))
    assert np.all(bracket >= 4.0 - 1e-12)
    assert np.all(bracket <= 16.0 + 1e-12)
    # every integer in the annulus shows up when the cap is generous
    full = [k for k in range(-15, 16) if 16.0 <= 1 + k * k <= 256.0]
    assert freqs.shape[0] == len(full)


def test_annulus_frequencies_distinct_and_capped():
    grid = TorusGrid(1, 4096)
    rng = np.random.default_rng(1)
    freqs = annulus_frequencies(grid, 8, rng)
    assert freqs.shape[0] == 32
    assert len({tuple(k) for k in freqs}) == 32


def test_annulus_frequencies_2d():
    grid = TorusGrid(2, 64)
    rng = np.random.default_rng(2)
    freqs = annulus_frequencies(grid, 4, rng)
    assert freqs.shape == (32, 2)
    bracket2 = 1.0 + np.sum(freqs.astype(float) ** 2, axis=1)
    assert np.all(bracket2 >= 4.0**3)
    assert np.all(bracket2 <= 4.0**5)
    assert np.max(np.abs(freqs)) <= 31


def test_annulus_band_out_of_reach():
    grid = TorusGrid(1, 64)
    rng = np.random.default_rng(3)
    with pytest.raises(ValueError, match="no representable"):
        annulus_frequencies(grid, 9, rng)


def test_band_probe_is_normalized_and_concentrated():
    grid = TorusGrid(1, 1024)
    rng = np.random.default_rng(4)
    sys = DyadicSystem()
    f = band_probe(grid, 6, rng)
    assert abs(besov_norm(sys, f, 0.0) - 1.0) < 1e-12
    sups = band_sups(sys, f)
    outside = [sups[l] for l in range(sups.size) if not 5 <= l <= 7]
    assert max(outside) < 1e-12


def test_band_probe_coefficients_unimodular():
    grid = TorusGrid(1, 256)
    rng = np.random.default_rng(5)
    f = band_probe(grid, 4, rng)
    coeffs = forward_fft(f).values
    mags = np.abs(coeffs[np.abs(coeffs) > 1e-12])
    assert mags.size > 0
    assert np.allclose(mags, mags[0], rtol=1e-10)


def test_band_probe_deterministic_under_seed():
    grid = TorusGrid(1, 512)
    a = band_probe(grid, 5, np.random.default_rng(77))
    b = band_probe(grid, 5, np.random.default_rng(77))
    assert np.array_equal(a.values, b.values)
    c = band_probe(grid, 5, np.random.default_rng(78))
    assert not np.allclose(a.values, c.values)


def test_probe_spec_matches_direct_constructors():
    grid = TorusGrid(1, 256)
    a = ProbeSpec("weierstrass", s=0.4, level=5).build(grid)
    assert np.array_equal(a.values, weierstrass(grid, 0.4, 5).values)
    b = ProbeSpec("band_random", level=4, seed=11).build(grid)
    assert np.array_equal(b.values,
                          band_probe(grid, 4, np.random.default_rng(11)).values)


def test_probe_spec_single_mode_is_one_exponential():
    grid = TorusGrid(1, 128)
    f = ProbeSpec("single_mode", level=-7).build(grid)
    x = grid.node_mesh()[0]
    assert np.allclose(f.values, np.exp(-2j * np.pi * 7 * x), atol=1e-14)
    coeffs = forward_fft(f).values
    hot = np.abs(coeffs) > 1e-12
    assert hot.sum() == 1


def test_probe_spec_is_reproducible():
    grid = TorusGrid(1, 512)
    spec = ProbeSpec("band_random", level=6, seed=99)
    assert np.array_equal(spec.build(grid).values, spec.build(grid).values)


def test_probe_spec_rejects_bad_requests():
    grid = TorusGrid(1, 64)
    with pytest.raises(ValueError, match="Nyquist"):
        ProbeSpec("single_mode", level=32).build(grid)
    with pytest.raises(ValueError, match="chirp"):
        ProbeSpec("chirp").build(grid)
