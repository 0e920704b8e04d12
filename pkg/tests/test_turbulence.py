import numpy as np
import pytest

from qlinksim.errors import GridMismatchError
from qlinksim.turbulence import (
    AtmosphereProfile,
    PhaseScreen,
    UplinkGeometry,
    apply_screen,
    integrated_r0,
    make_screen,
)
from qlinksim.wavefield import GaussianSpec, Grid, gaussian_field, total_power

WL = 800e-9


class TestScreenBasics:
    def test_deterministic_given_seed(self):
        grid = Grid(window=2.0, n=256)
        a = make_screen(grid, r0=0.1, seed=11)
        b = make_screen(grid, r0=0.1, seed=11)
        assert np.array_equal(a.phase, b.phase)
        c = make_screen(grid, r0=0.1, seed=12)
        assert not np.array_equal(a.phase, c.phase)

    def test_zero_mean(self):
        grid = Grid(window=2.0, n=256)
        screen = make_screen(grid, r0=0.1, seed=0)
        assert abs(screen.phase.mean()) < 1e-12

    def test_weak_turbulence_is_flat(self):
        """Huge r0: phase excursions shrink toward zero."""
        grid = Grid(window=2.0, n=256)
        weak = make_screen(grid, r0=1e6, seed=0)
        strong = make_screen(grid, r0=0.05, seed=0)
        assert np.std(weak.phase) < 1e-3 * np.std(strong.phase)

    def test_invalid_r0_rejected(self):
        grid = Grid(window=2.0, n=256)
        with pytest.raises(ValueError):
            make_screen(grid, r0=0.0, seed=0)

    def test_shape_mismatch_rejected(self):
        grid = Grid(window=2.0, n=256)
        with pytest.raises(GridMismatchError):
            PhaseScreen(grid=grid, phase=np.zeros((128, 128)), r0=0.1)


class TestStructureFunction:
    def test_kolmogorov_structure_function(self):
        """Ensemble D(r) vs 6.88 (r/r0)^(5/3) within 10%.

        Averaged over 100 screens; separations kept below window/16 where
        neither the missing sub-grid low frequencies nor the Nyquist cutoff
        bias the estimate.
        """
        grid = Grid(window=2.0, n=256)
        r0 = 0.10
        shifts = (2, 4, 8, 16)
        acc = {s: 0.0 for s in shifts}
        n_screens = 100
        for seed in range(n_screens):
            phase = make_screen(grid, r0, seed=seed).phase
            for shift in shifts:
                diff = (phase - np.roll(phase, shift, axis=1))[:, shift:]
                acc[shift] += float(np.mean(diff * diff))
        for shift in shifts:
            r = shift * grid.dx
            measured = acc[shift] / n_screens
            theory = 6.88 * (r / r0) ** (5.0 / 3.0)
            assert measured == pytest.approx(theory, rel=0.10)

    def test_variance_scales_with_r0(self):
        """Phase variance goes as r0^(-5/3)."""
        grid = Grid(window=2.0, n=256)
        v1 = np.mean(
            [np.var(make_screen(grid, 0.05, seed=s).phase) for s in range(20)]
        )
        v2 = np.mean(
            [np.var(make_screen(grid, 0.10, seed=s).phase) for s in range(20)]
        )
        assert v1 / v2 == pytest.approx(2.0 ** (5.0 / 3.0), rel=0.02)


class TestApplyScreen:
    def test_pure_phase_conserves_power(self):
        grid = Grid(window=2.0, n=256)
        field = gaussian_field(grid, GaussianSpec(waist=0.2), WL)
        screen = make_screen(grid, r0=0.05, seed=0)
        out = apply_screen(field, screen)
        assert total_power(out) == pytest.approx(total_power(field), rel=1e-12)

    def test_grid_mismatch_rejected(self):
        field = gaussian_field(Grid(window=2.0, n=256), GaussianSpec(waist=0.2), WL)
        screen = make_screen(Grid(window=4.0, n=256), r0=0.05, seed=0)
        with pytest.raises(GridMismatchError):
            apply_screen(field, screen)


class TestProfile:
    def test_integrated_r0_single_screen(self):
        assert integrated_r0([0.065]) == pytest.approx(0.065, rel=1e-12)

    def test_per_screen_r0_recombines(self):
        profile = AtmosphereProfile(r0=0.065)
        assert integrated_r0(profile.per_screen_r0()) == pytest.approx(
            0.065, rel=1e-9
        )

    def test_weights_normalized(self):
        profile = AtmosphereProfile()
        assert sum(profile.weights) == pytest.approx(1.0, abs=1e-9)
        with pytest.raises(ValueError):
            AtmosphereProfile(weights=(0.5, 0.2, 0.1, 0.1, 0.05))

    def test_stronger_screens_lower_in_atmosphere(self):
        profile = AtmosphereProfile()
        per = profile.per_screen_r0()
        # larger weight -> more turbulence -> smaller per-screen r0
        assert per[0] == min(per)

    def test_geometry_validation(self):
        with pytest.raises(ValueError):
            UplinkGeometry(tx_waist=-0.1)
        with pytest.raises(ValueError):
            AtmosphereProfile(r0=0.0)
