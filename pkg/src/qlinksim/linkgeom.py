"""Earth geometry, atmospheric attenuation, ground-link diffraction, pointing.

Spherical Earth (radius 6371 km), empirical bounded air-mass formula, and a
wave-optics ground link built on the rescaled Fresnel propagator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import UnknownWavelengthError
from .wavefield import (
    GaussianSpec,
    Grid,
    gaussian_field,
    propagate_rescaled,
    total_power,
)

__all__ = [
    "EARTH_RADIUS",
    "GroundLink",
    "AttenuationModel",
    "air_mass",
    "atmospheric_db",
    "slant_range",
    "slant_range_between",
    "elevation_between",
    "ground_link_diffraction",
    "max_ground_distance",
    "pointing_jitter_loss",
]

EARTH_RADIUS = 6371e3

# bounded empirical air-mass fit (1989 revision); raw value at zenith is
# 0.9997, so results are normalized to exactly 1 at zenith
_AM_A = 0.50572
_AM_B = 96.07995
_AM_C = -1.6364


def _air_mass_raw(zenith_deg: float) -> float:
    return 1.0 / (
        math.cos(math.radians(zenith_deg)) + _AM_A * (_AM_B - zenith_deg) ** _AM_C
    )


_AM_ZENITH = _air_mass_raw(0.0)


def air_mass(zenith_deg: float) -> float:
    """Relative atmospheric path length vs zenith angle (1 at zenith).

    Uses the standard bounded empirical formula, which stays finite at the
    horizon (unlike the secant law).  Domain: 0 <= zenith < 90 degrees.
    """
    if not 0 <= zenith_deg < 90:
        raise ValueError(f"zenith angle must be in [0, 90) deg, got {zenith_deg}")
    return _air_mass_raw(zenith_deg) / _AM_ZENITH


@dataclass(frozen=True)
class AttenuationModel:
    """Zenith attenuation per wavelength, scaled along slant paths by air mass."""

    zenith_db: dict[float, float] = dc_field(
        default_factory=lambda: {1550e-9: 0.5, 800e-9: 0.7, 580e-9: 1.0}
    )

    def __post_init__(self):
        if any(v < 0 for v in self.zenith_db.values()):
            raise ValueError("zenith attenuation must be >= 0")


def atmospheric_db(model: AttenuationModel, wavelength: float, zenith_deg: float) -> float:
    """Atmospheric attenuation (dB) along a slant path at the given zenith angle."""
    for wl, db in model.zenith_db.items():
        if math.isclose(wl, wavelength, rel_tol=1e-6):
            return db * air_mass(zenith_deg)
    raise UnknownWavelengthError(
        f"wavelength {wavelength:g} m not in attenuation table "
        f"{sorted(model.zenith_db)}"
    )


def slant_range(orbit_altitude: float, zenith_deg: float) -> float:
    """Ground-station-to-satellite distance at the given zenith angle."""
    if not 0 <= zenith_deg < 90:
        raise ValueError("zenith angle must be in [0, 90) deg")
    r = EARTH_RADIUS
    h = orbit_altitude
    cz = math.cos(math.radians(zenith_deg))
    return math.sqrt((r * cz) ** 2 + 2 * r * h + h**2) - r * cz


def slant_range_between(ground_distance: float, orbit_altitude: float) -> float:
    """Distance from a ground station to a satellite whose sub-satellite point
    is ``ground_distance`` away along the surface."""
    psi = ground_distance / EARTH_RADIUS
    r = EARTH_RADIUS
    rs = EARTH_RADIUS + orbit_altitude
    return math.sqrt(r**2 + rs**2 - 2 * r * rs * math.cos(psi))


def elevation_between(ground_distance: float, orbit_altitude: float) -> float:
    """Elevation angle (deg) of that satellite as seen from the station."""
    psi = ground_distance / EARTH_RADIUS
    rs = EARTH_RADIUS + orbit_altitude
    d = slant_range_between(ground_distance, orbit_altitude)
    sin_el = (rs * math.cos(psi) - EARTH_RADIUS) / d
    return math.degrees(math.asin(max(-1.0, min(1.0, sin_el))))


@dataclass(frozen=True)
class GroundLink:
    """One ground-to-space (or space-to-ground) leg."""

    orbit_altitude: float = 500e3
    zenith_deg: float = 0.0
    tx_aperture: float = 0.60
    rx_aperture: float = 1.2
    wavelength: float = 800e-9

    def __post_init__(self):
        if not 0 <= self.zenith_deg < 90:
            raise ValueError("zenith angle must be in [0, 90) deg")
        if self.tx_aperture <= 0 or self.rx_aperture <= 0:
            raise ValueError("apertures must be positive")


def ground_link_diffraction(
    link: GroundLink, launch: GaussianSpec, n: int = 1024
) -> float:
    """Diffraction loss (dB) of the launch Gaussian truncated at the receiver.

    Propagates the beam over the slant range with the rescaled Fresnel
    propagator (the output window tracks the diverged beam) and returns
    -10*log10 of the power encircled by the receiving aperture.
    """
    z = slant_range(link.orbit_altitude, link.zenith_deg)
    grid = Grid(window=max(8 * launch.waist, 2.5 * link.tx_aperture), n=n)
    field = gaussian_field(grid, launch, link.wavelength)
    # clip at the transmit aperture
    X, Y = grid.mesh()
    mask = X**2 + Y**2 <= (link.tx_aperture / 2) ** 2
    field = type(field)(grid, link.wavelength, field.samples * mask)
    p0 = total_power(field)
    # analytic estimate of the arrived beam size fixes the output window
    zr = launch.rayleigh_range(link.wavelength)
    w_far = launch.waist * math.sqrt(1 + (z / zr) ** 2)
    out_window = max(6 * w_far, 3 * link.rx_aperture)
    out = propagate_rescaled(field, z, out_window)
    Xo, Yo = out.grid.mesh()
    enc = np.sum(
        np.abs(out.samples[Xo**2 + Yo**2 <= (link.rx_aperture / 2) ** 2]) ** 2
    ) * out.grid.dx**2
    return -10.0 * math.log10(enc / p0)


def max_ground_distance(orbit_altitude: float, min_elevation_deg: float) -> float:
    """Largest ground-station separation with simultaneous visibility of one
    satellite at or above the minimum elevation (spherical Earth)."""
    if min_elevation_deg < 0:
        raise ValueError("min_elevation must be >= 0")
    if orbit_altitude <= 0:
        return 0.0
    e = math.radians(min_elevation_deg)
    psi = math.acos(EARTH_RADIUS / (EARTH_RADIUS + orbit_altitude) * math.cos(e)) - e
    return 2 * EARTH_RADIUS * psi


def pointing_jitter_loss(jitter_rms: float, beam_divergence: float) -> float:
    """Expected pointing loss (dB) for Gaussian radial jitter on a Gaussian beam.

    ``jitter_rms`` is the per-axis RMS pointing error (rad) and
    ``beam_divergence`` the 1/e^2 far-field half-angle (rad).  Averaging the
    instantaneous Gaussian attenuation exp(-2 a^2/theta^2) over a Rayleigh
    radial error gives transmission 1 / (1 + 4 (sigma/theta)^2).
    """
    if jitter_rms < 0 or beam_divergence < 0:
        raise ValueError("jitter and divergence must be >= 0")
    if jitter_rms == 0:
        return 0.0
    if beam_divergence == 0:
        return math.inf
    return 10.0 * math.log10(1.0 + 4.0 * (jitter_rms / beam_divergence) ** 2)
