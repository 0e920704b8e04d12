"""Kolmogorov phase screens and the layered-atmosphere uplink channel.

Screens are FFT-synthesized from the Kolmogorov spectral density
0.023 r0^(-5/3) f^(-11/3) (f in cycles/m) with subharmonic augmentation so
the tilt content, which dominates uplink loss, is not truncated by the
finite grid.  The uplink channel alternates screens and free-space
propagation through the lowest 20 km, then runs the remaining path to orbit
with the rescaled propagator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import BracketExhaustedError, GridMismatchError
from .wavefield import (
    ComplexField,
    GaussianSpec,
    Grid,
    gaussian_field,
    propagate_rescaled,
    propagate_trimmed,
    total_power,
)

__all__ = [
    "PhaseScreen",
    "AtmosphereProfile",
    "UplinkGeometry",
    "make_screen",
    "apply_screen",
    "integrated_r0",
    "uplink_channel",
    "uplink_loss_db",
    "calibrate_r0",
]

_KOLMOGOROV_COEFF = 0.023
_SUBHARMONIC_LEVELS = 5


@dataclass(frozen=True)
class PhaseScreen:
    """A frozen turbulence realization: pure phase (rad) on a grid."""

    grid: Grid
    phase: np.ndarray
    r0: float

    def __post_init__(self):
        if self.phase.shape != (self.grid.n, self.grid.n):
            raise GridMismatchError("phase array does not match grid")
        if not np.all(np.isfinite(self.phase)):
            raise ValueError("phase screen contains non-finite values")


def make_screen(grid: Grid, r0: float, seed) -> PhaseScreen:
    """FFT-synthesized Kolmogorov phase screen, deterministic given seed.

    ``seed`` may be an int or a numpy Generator (the latter lets ensemble
    drivers draw several screens from one stream).  Five levels of 3x3
    subharmonics restore the low-frequency (tilt) power that the discrete
    spectrum misses.
    """
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n, dx = grid.n, grid.dx
    df = 1.0 / grid.window
    fx = np.fft.fftfreq(n, dx)
    FX, FY = np.meshgrid(fx, fx, indexing="xy")
    f = np.hypot(FX, FY)
    with np.errstate(divide="ignore"):
        psd = _KOLMOGOROV_COEFF * r0 ** (-5.0 / 3.0) * np.where(f > 0, f, np.inf) ** (
            -11.0 / 3.0
        )
    psd[0, 0] = 0.0
    cn = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) * np.sqrt(
        psd
    ) * df
    phase = np.real(np.fft.ifft2(cn)) * n * n

    X, Y = grid.mesh()
    for level in range(1, _SUBHARMONIC_LEVELS + 1):
        dfp = df / 3**level
        for i in (-1, 0, 1):
            for j in (-1, 0, 1):
                if i == 0 and j == 0:
                    continue
                fxp, fyp = i * dfp, j * dfp
                fm = math.hypot(fxp, fyp)
                amp = math.sqrt(_KOLMOGOROV_COEFF * r0 ** (-5.0 / 3.0) * fm ** (-11.0 / 3.0))
                c = (rng.standard_normal() + 1j * rng.standard_normal()) * amp * dfp
                phase += np.real(c * np.exp(2j * np.pi * (fxp * X + fyp * Y)))

    phase -= phase.mean()
    return PhaseScreen(grid=grid, phase=phase, r0=r0)


def apply_screen(field: ComplexField, screen: PhaseScreen) -> ComplexField:
    """Multiply by the screen's pure phase; conserves power exactly."""
    if field.grid != screen.grid:
        raise GridMismatchError("field and screen grids differ")
    return ComplexField(
        grid=field.grid,
        wavelength=field.wavelength,
        samples=field.samples * np.exp(1j * screen.phase),
    )


def integrated_r0(per_screen_r0) -> float:
    """Combine per-screen Fried parameters with the (-5/3)-power sum rule."""
    vals = np.asarray(list(per_screen_r0), dtype=float)
    if np.any(vals <= 0):
        raise ValueError("per-screen r0 must be positive")
    return float(np.sum(vals ** (-5.0 / 3.0)) ** (-3.0 / 5.0))


# Relative Cn2 weight of each layer: most turbulence near the surface, a
# thin contribution at the 20 km top where the atmosphere gives out.
_DEFAULT_ALTITUDES = (0.0, 1.25e3, 3.1e3, 7.9e3, 20e3)
_DEFAULT_WEIGHTS = (0.55, 0.20, 0.12, 0.08, 0.05)


@dataclass(frozen=True)
class AtmosphereProfile:
    """Layered turbulence description for the uplink path."""

    r0: float = 0.065
    screen_altitudes: tuple = _DEFAULT_ALTITUDES
    weights: tuple = _DEFAULT_WEIGHTS
    zenith_attenuation_db: float = 0.7

    def __post_init__(self):
        if self.r0 <= 0:
            raise ValueError("integrated r0 must be positive")
        if len(self.screen_altitudes) != len(self.weights):
            raise ValueError("altitudes and weights must have equal length")
        if any(w <= 0 for w in self.weights):
            raise ValueError("layer weights must be positive")
        if not math.isclose(sum(self.weights), 1.0, rel_tol=1e-9):
            raise ValueError("layer weights must sum to 1")
        if list(self.screen_altitudes) != sorted(self.screen_altitudes):
            raise ValueError("screen altitudes must be ascending")
        if self.zenith_attenuation_db < 0:
            raise ValueError("attenuation must be >= 0")

    def per_screen_r0(self) -> np.ndarray:
        """Each layer's Fried parameter; combining them with the (-5/3)
        sum rule recovers the integrated r0."""
        return self.r0 * np.asarray(self.weights) ** (-3.0 / 5.0)


@dataclass(frozen=True)
class UplinkGeometry:
    """Ground transmitter and first-satellite receiver for the uplink run."""

    orbit_altitude: float = 500e3
    tx_waist: float = 0.15
    rx_aperture: float = 0.60
    wavelength: float = 800e-9
    window: float = 6.0
    n: int = 1024
    output_magnification: float = 2.5

    def __post_init__(self):
        for name in (
            "orbit_altitude",
            "tx_waist",
            "rx_aperture",
            "wavelength",
            "window",
            "output_magnification",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def grid(self) -> Grid:
        return Grid(window=self.window, n=self.n)

    def launch_field(self) -> ComplexField:
        return gaussian_field(
            self.grid(), GaussianSpec(waist=self.tx_waist), self.wavelength
        )


def uplink_channel(
    field: ComplexField,
    profile: AtmosphereProfile,
    orbit_altitude: float,
    seed,
    output_magnification: float = 2.5,
) -> ComplexField:
    """Propagate a ground field through the layered atmosphere to orbit.

    Alternates {screen, free-space step} over the profile's layers, then
    covers the remaining vacuum path with the rescaled propagator so the
    output window tracks the diverged beam (output window = input window
    times ``output_magnification``).  Deterministic given seed.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    r0s = profile.per_screen_r0()
    z = 0.0
    for alt, r0_layer in zip(profile.screen_altitudes, r0s):
        if alt > z:
            field, _ = propagate_trimmed(field, alt - z)
            z = alt
        field = apply_screen(field, make_screen(field.grid, r0_layer, rng))
    remaining = orbit_altitude - z
    if remaining < 0:
        raise ValueError("orbit altitude lies below the top phase screen")
    out_window = field.grid.window * output_magnification
    return propagate_rescaled(field, remaining, out_window)


def uplink_loss_db(
    profile: AtmosphereProfile, geometry: UplinkGeometry, seed
) -> float:
    """Coupling loss (dB) into the satellite aperture for one realization."""
    field = geometry.launch_field()
    out = uplink_channel(
        field,
        profile,
        geometry.orbit_altitude,
        seed,
        output_magnification=geometry.output_magnification,
    )
    X, Y = out.grid.mesh()
    inside = X**2 + Y**2 <= (geometry.rx_aperture / 2) ** 2
    captured = float(np.sum(np.abs(out.samples[inside]) ** 2)) * out.grid.dx**2
    launched = total_power(field)
    return -10.0 * math.log10(captured / launched)


def _ensemble_loss(profile, geometry, seeds) -> float:
    return float(np.mean([uplink_loss_db(profile, geometry, s) for s in seeds]))


def calibrate_r0(
    target_uplink_loss_db: float,
    geometry: UplinkGeometry = UplinkGeometry(),
    n_seeds: int = 8,
    seed: int = 0,
    tol_db: float = 0.5,
    bracket: tuple = (0.01, 1.0),
) -> AtmosphereProfile:
    """Bisect the integrated r0 until the ensemble-mean uplink loss matches.

    Loss decreases monotonically with r0 (weaker turbulence); the bracket is
    r0 in [1 cm, 1 m] by default.  Raises if the target lies outside the
    losses achievable on the bracket (beyond tolerance).
    """
    seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n_seeds)]

    def loss_at(r0):
        return _ensemble_loss(
            AtmosphereProfile(
                r0=r0, zenith_attenuation_db=AtmosphereProfile().zenith_attenuation_db
            ),
            geometry,
            seeds,
        )

    lo, hi = bracket
    loss_hi_r0 = loss_at(hi)  # weakest turbulence -> smallest loss
    if target_uplink_loss_db <= loss_hi_r0:
        if abs(target_uplink_loss_db - loss_hi_r0) <= tol_db:
            return AtmosphereProfile(r0=hi)
        raise BracketExhaustedError(
            f"target {target_uplink_loss_db:.2f} dB below minimum achievable "
            f"{loss_hi_r0:.2f} dB at r0 = {hi:g} m"
        )
    loss_lo_r0 = loss_at(lo)
    if target_uplink_loss_db >= loss_lo_r0:
        if abs(target_uplink_loss_db - loss_lo_r0) <= tol_db:
            return AtmosphereProfile(r0=lo)
        raise BracketExhaustedError(
            f"target {target_uplink_loss_db:.2f} dB above maximum achievable "
            f"{loss_lo_r0:.2f} dB at r0 = {lo:g} m"
        )

    for _ in range(30):
        mid = math.sqrt(lo * hi)
        loss_mid = loss_at(mid)
        if abs(loss_mid - target_uplink_loss_db) <= tol_db:
            return AtmosphereProfile(r0=mid)
        if loss_mid > target_uplink_loss_db:
            lo = mid  # too lossy -> need larger r0
        else:
            hi = mid
    raise BracketExhaustedError(
        "bisection did not converge to the target loss within tolerance"
    )
