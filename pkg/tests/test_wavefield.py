import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlinksim.errors import AliasingError
from qlinksim.wavefield import (
    ComplexField,
    GaussianSpec,
    Grid,
    apply_guard_band,
    band_limit_frequency,
    beam_radius,
    gaussian_field,
    guard_band_mask,
    max_safe_distance,
    mode_overlap,
    propagate,
    propagate_rescaled,
    propagate_trimmed,
    total_power,
    transfer_function,
)

WL = 800e-9


def make_gaussian(waist=0.02, window=0.4, n=256, curvature=None):
    grid = Grid(window=window, n=n)
    return gaussian_field(grid, GaussianSpec(waist=waist, curvature=curvature), WL)


class TestGrid:
    def test_spacing(self):
        grid = Grid(window=2.56, n=256)
        assert grid.dx == pytest.approx(0.01)

    def test_mesh_centered(self):
        grid = Grid(window=1.0, n=256)
        X, Y = grid.mesh()
        # FFT-aligned sampling: spans [-w/2, w/2) with one-cell asymmetry
        assert abs(X.mean()) <= grid.dx
        assert X.min() == pytest.approx(-0.5)
        assert X.max() == pytest.approx(0.5 - grid.dx)
        assert X.shape == (256, 256)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            Grid(window=-1.0, n=256)
        with pytest.raises(ValueError):
            Grid(window=1.0, n=100)


class TestGaussianField:
    def test_unit_power(self):
        field = make_gaussian()
        assert total_power(field) == pytest.approx(1.0, rel=1e-9)

    def test_beam_radius_matches_waist(self):
        field = make_gaussian(waist=0.03)
        assert beam_radius(field) == pytest.approx(0.03, rel=1e-3)

    def test_self_overlap(self):
        field = make_gaussian()
        assert mode_overlap(field, field) == pytest.approx(1.0, rel=1e-12)

    def test_orthogonal_windows_overlap_small(self):
        a = make_gaussian(waist=0.01)
        b = make_gaussian(waist=0.08)
        # different waists: overlap = 4 w1^2 w2^2 / (w1^2 + w2^2)^2
        expected = 4 * (0.01 * 0.08) ** 2 / (0.01**2 + 0.08**2) ** 2
        assert mode_overlap(a, b) == pytest.approx(expected, rel=1e-3)


class TestPropagation:
    def test_unitary_within_band(self):
        field = make_gaussian()
        out = propagate(field, 50.0)
        assert total_power(out) == pytest.approx(1.0, rel=1e-9)

    def test_gaussian_analytic_expansion(self):
        """Free-space Gaussian: w(z) = w0 sqrt(1 + (z/zR)^2), to 0.5%."""
        w0 = 0.01
        field = make_gaussian(waist=w0, window=0.3, n=512)
        zr = math.pi * w0**2 / WL
        for z in (0.5 * zr, zr, 2 * zr):
            out = propagate(field, z)
            expected = w0 * math.sqrt(1 + (z / zr) ** 2)
            assert beam_radius(out) == pytest.approx(expected, rel=5e-3)

    def test_converging_curvature_focuses(self):
        f = 200.0
        field = make_gaussian(waist=0.02, curvature=-f)
        out = propagate(field, f)
        assert beam_radius(out) < 0.25 * beam_radius(field)

    def test_composition_of_steps(self):
        field = make_gaussian()
        one = propagate(field, 30.0)
        two = propagate(propagate(field, 12.0), 18.0)
        scale = np.abs(one.samples).max()
        assert np.allclose(two.samples, one.samples, atol=1e-7 * scale)

    def test_aliasing_guard_raises(self):
        field = make_gaussian(waist=0.02, window=0.1, n=256)
        limit = max_safe_distance(field)
        with pytest.raises(AliasingError):
            propagate(field, 10 * limit)

    def test_trimmed_reports_removed_power(self):
        field = make_gaussian(waist=0.02, window=0.1, n=256)
        z = 2 * max_safe_distance(field)
        out, removed = propagate_trimmed(field, z)
        assert 0.0 <= removed < 1.0
        assert total_power(out) == pytest.approx(1.0 - removed, rel=1e-6)

    def test_rescaled_matches_direct(self):
        """Two-step rescaled propagation agrees with the plain propagator."""
        w0 = 0.01
        field = make_gaussian(waist=w0, window=0.3, n=512)
        zr = math.pi * w0**2 / WL
        z = 1.5 * zr
        direct = propagate(field, z)
        rescaled = propagate_rescaled(field, z, output_window=0.3)
        assert total_power(rescaled) == pytest.approx(total_power(direct), rel=1e-3)
        assert beam_radius(rescaled) == pytest.approx(beam_radius(direct), rel=5e-3)

    def test_rescaled_magnified_window_tracks_expansion(self):
        w0 = 0.005
        field = make_gaussian(waist=w0, window=0.2, n=512)
        zr = math.pi * w0**2 / WL
        z = 8 * zr
        out = propagate_rescaled(field, z, output_window=1.0)
        expected = w0 * math.sqrt(1 + (z / zr) ** 2)
        assert beam_radius(out) == pytest.approx(expected, rel=1e-2)
        assert total_power(out) == pytest.approx(1.0, rel=1e-2)


class TestTransferFunction:
    def test_unit_modulus_inside_band(self):
        grid = Grid(window=0.4, n=256)
        H = transfer_function(grid, WL, 100.0)
        mag = np.abs(H[H != 0])
        assert np.allclose(mag, 1.0, atol=1e-12)

    def test_band_limit_decreases_with_distance(self):
        grid = Grid(window=0.4, n=256)
        assert band_limit_frequency(grid, WL, 1000.0) < band_limit_frequency(
            grid, WL, 10.0
        )


class TestGuardBand:
    def test_mask_shape_and_range(self):
        grid = Grid(window=0.4, n=256)
        mask = guard_band_mask(grid)
        assert mask.shape == (256, 256)
        assert np.all((mask >= 0) & (mask <= 1))

    def test_apply_reports_absorbed_power(self):
        # broad beam relative to the window: guard band absorbs the skirt
        field = make_gaussian(waist=0.09, window=0.4, n=256)
        out, absorbed = apply_guard_band(field)
        assert absorbed > 0
        assert total_power(out) == pytest.approx(
            total_power(field) - absorbed, rel=1e-9
        )


@settings(max_examples=20, deadline=None)
@given(
    waist=st.floats(0.01, 0.04),
    z=st.floats(1.0, 200.0),
)
def test_power_conserved_for_any_safe_propagation(waist, z):
    field = make_gaussian(waist=waist, window=0.5, n=256)
    z = min(z, 0.9 * max_safe_distance(field))
    out = propagate(field, z)
    assert total_power(out) == pytest.approx(1.0, rel=1e-9)


@settings(max_examples=20, deadline=None)
@given(waist=st.floats(0.008, 0.05))
def test_overlap_bounded_and_symmetric(waist):
    a = make_gaussian(waist=waist)
    b = make_gaussian(waist=0.02)
    o1, o2 = mode_overlap(a, b), mode_overlap(b, a)
    assert 0.0 <= o1 <= 1.0 + 1e-12
    assert o1 == pytest.approx(o2, rel=1e-9)


def test_field_grid_mismatch_rejected():
    grid = Grid(window=0.4, n=256)
    with pytest.raises(ValueError):
        ComplexField(grid=grid, wavelength=WL, samples=np.zeros((128, 128), complex))
