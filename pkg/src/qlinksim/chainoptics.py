"""Satellite lens chains: elements, perturbations, and full-chain propagation.

Each satellite's telescope assembly is collapsed into a single effective thin
lens with a hard circular aperture and a scalar power transmittance.  A chain
is a sequence of hops {propagate separation, apply lens}; propagation uses the
band-limited angular spectrum with an absorbing guard band, and every removed
watt is accounted per hop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Optional

import numpy as np

from .errors import OffsetOutsideWindowError
from .wavefield import (
    ComplexField,
    GaussianSpec,
    Grid,
    apply_guard_band,
    gaussian_field,
    guard_band_mask,
    propagate_trimmed,
    total_power,
)

__all__ = [
    "SatelliteLens",
    "ChainSpec",
    "ErrorSpec",
    "Hop",
    "Chain",
    "HopRecord",
    "ChainTrace",
    "eigenmode_spec",
    "apply_lens",
    "build_chain",
    "hops_for_distance",
    "perturb_chain",
    "propagate_chain",
]

_DEFAULT_WINDOW_FACTOR = 2.5  # window = 2.5x aperture diameter


@dataclass(frozen=True)
class SatelliteLens:
    """Effective thin lens of one satellite telescope assembly."""

    focal_length: float = 60e3
    aperture_diameter: float = 0.60
    power_transmittance: float = 0.98

    def __post_init__(self):
        if self.focal_length <= 0:
            raise ValueError("focal_length must be positive (use math.inf for flat)")
        if self.aperture_diameter <= 0:
            raise ValueError("aperture_diameter must be positive")
        if not 0 < self.power_transmittance <= 1:
            raise ValueError("power_transmittance must be in (0, 1]")


@dataclass(frozen=True)
class ChainSpec:
    """Geometry and optics of a uniform satellite chain."""

    separation: float = 120e3
    hops: int = 167
    lens: SatelliteLens = dc_field(default_factory=SatelliteLens)
    wavelength: float = 800e-9
    launch: Optional[GaussianSpec] = None

    def __post_init__(self):
        if self.separation <= 0:
            raise ValueError("separation must be positive")
        if self.hops < 1:
            raise ValueError("hops must be >= 1")

    @property
    def total_path(self) -> float:
        return self.hops * self.separation

    def launch_spec(self) -> GaussianSpec:
        """Configured launch beam, defaulting to the chain eigenmode."""
        if self.launch is not None:
            return self.launch
        return eigenmode_spec(self.separation, self.wavelength)


@dataclass(frozen=True)
class ErrorSpec:
    """Per-satellite placement/figure error magnitudes."""

    separation_frac: float = 0.10
    lateral_abs: float = 0.006
    focal_frac: float = 0.05
    distribution: str = "uniform_pm"

    def __post_init__(self):
        if min(self.separation_frac, self.lateral_abs, self.focal_frac) < 0:
            raise ValueError("error magnitudes must be >= 0")
        if self.distribution not in ("uniform_pm", "gaussian_sigma"):
            raise ValueError(f"unknown distribution {self.distribution!r}")

    @property
    def is_zero(self) -> bool:
        return self.separation_frac == 0 and self.lateral_abs == 0 and self.focal_frac == 0


@dataclass(frozen=True)
class Hop:
    """One concrete chain leg: free flight then a (possibly displaced) lens."""

    separation: float
    focal_length: float
    aperture_diameter: float
    power_transmittance: float
    lateral_offset: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class Chain:
    spec: ChainSpec
    hops: tuple[Hop, ...]


@dataclass(frozen=True)
class HopRecord:
    index: int
    power_in: float
    power_after_propagation: float  # after guard band + band-limit accounting
    power_before_aperture: float
    power_after_aperture: float
    power_after_reflection: float
    cumulative_db: float


@dataclass(frozen=True)
class ChainTrace:
    records: tuple[HopRecord, ...]
    final_field: ComplexField
    launch_power: float

    @property
    def final_power(self) -> float:
        return self.records[-1].power_after_reflection

    @property
    def total_loss_db(self) -> float:
        return -10.0 * math.log10(self.final_power / self.launch_power)

    @property
    def reflection_db(self) -> float:
        out = 0.0
        for rec in self.records:
            if rec.power_after_aperture > 0:
                out += -10.0 * math.log10(
                    rec.power_after_reflection / rec.power_after_aperture
                )
        return out

    @property
    def diffraction_db(self) -> float:
        """Everything that is not reflection: clipping, guard band, band limit."""
        return self.total_loss_db - self.reflection_db

    @property
    def per_hop_db(self) -> np.ndarray:
        cum = np.array([r.cumulative_db for r in self.records])
        return np.diff(np.concatenate([[0.0], cum]))


def eigenmode_spec(separation: float, wavelength: float) -> GaussianSpec:
    """Gaussian eigenmode of the periodic f = L/2 lens guide, at a lens plane.

    The guided beam focuses at the hop midpoint with waist sqrt(lambda*L/(2*pi));
    at each lens it has radius sqrt(lambda*L/pi) and converging curvature -L.
    """
    return GaussianSpec(
        waist=math.sqrt(wavelength * separation / math.pi), curvature=-separation
    )


def default_grid(lens: SatelliteLens, n: int = 1024) -> Grid:
    return Grid(window=_DEFAULT_WINDOW_FACTOR * lens.aperture_diameter, n=n)


def hops_for_distance(total_distance: float, separation: float) -> int:
    """Satellite count covering the distance: ceiling(total / separation)."""
    return max(1, math.ceil(total_distance / separation - 1e-9))


def apply_lens(
    field: ComplexField,
    lens: SatelliteLens,
    lateral_offset: tuple[float, float] = (0.0, 0.0),
) -> tuple[ComplexField, float, float]:
    """Aperture, thin-lens phase, and reflection transmittance at one satellite.

    Returns (output field, clipped power, absorbed power); both the aperture
    mask and the lens phase are centered at ``lateral_offset``.
    """
    ox, oy = lateral_offset
    radius = lens.aperture_diameter / 2
    if math.hypot(ox, oy) + radius > field.grid.window / 2:
        raise OffsetOutsideWindowError(
            f"aperture offset {lateral_offset} places the rim outside the window"
        )
    grid = field.grid
    X, Y = grid.mesh()
    r2 = (X - ox) ** 2 + (Y - oy) ** 2
    p_in = total_power(field)
    u = field.samples * (r2 <= radius**2)
    p_ap = float(np.sum(np.abs(u) ** 2) * grid.dx**2)
    clipped = max(0.0, p_in - p_ap)
    if math.isfinite(lens.focal_length):
        k = 2 * np.pi / field.wavelength
        u = u * np.exp(-1j * k * r2 / (2 * lens.focal_length))
    u = u * math.sqrt(lens.power_transmittance)
    absorbed = p_ap * (1.0 - lens.power_transmittance)
    return ComplexField(grid, field.wavelength, u), clipped, absorbed


def build_chain(spec: ChainSpec) -> Chain:
    hop = Hop(
        separation=spec.separation,
        focal_length=spec.lens.focal_length,
        aperture_diameter=spec.lens.aperture_diameter,
        power_transmittance=spec.lens.power_transmittance,
    )
    return Chain(spec=spec, hops=(hop,) * spec.hops)


def perturb_chain(chain: Chain, errors: ErrorSpec, seed: int) -> Chain:
    """Independent per-hop draws of separation, lateral offset, and focal length.

    Deterministic for a given seed; an all-zero ErrorSpec returns the chain
    unchanged.
    """
    if errors.is_zero:
        return chain
    rng = np.random.default_rng(seed)
    n = len(chain.hops)
    if errors.distribution == "uniform_pm":
        sep_d = rng.uniform(-1.0, 1.0, n)
        foc_d = rng.uniform(-1.0, 1.0, n)
        lat = rng.uniform(-1.0, 1.0, (n, 2))
    else:
        sep_d = rng.standard_normal(n)
        foc_d = rng.standard_normal(n)
        lat = rng.standard_normal((n, 2))
    hops = tuple(
        replace(
            h,
            separation=h.separation * (1.0 + errors.separation_frac * sep_d[i]),
            focal_length=h.focal_length * (1.0 + errors.focal_frac * foc_d[i]),
            lateral_offset=(
                h.lateral_offset[0] + errors.lateral_abs * lat[i, 0],
                h.lateral_offset[1] + errors.lateral_abs * lat[i, 1],
            ),
        )
        for i, h in enumerate(chain.hops)
    )
    return Chain(spec=chain.spec, hops=hops)


def propagate_chain(field: ComplexField, chain: Chain) -> ChainTrace:
    """Run the field through every hop with per-hop power accounting.

    Light clipped by apertures, absorbed in the guard band, or removed by the
    band-limit mask counts as diffraction loss; the transmittance factor is
    the reflection component.
    """
    grid = field.grid
    lam = field.wavelength
    k = 2 * np.pi / lam
    guard = guard_band_mask(grid)
    X, Y = grid.mesh()
    da = grid.dx**2

    # cache lens masks/phases keyed by hop optics (nominal chains reuse one)
    lens_cache: dict[tuple, np.ndarray] = {}

    def lens_factor(hop: Hop) -> np.ndarray:
        key = (hop.focal_length, hop.aperture_diameter, hop.lateral_offset)
        got = lens_cache.get(key)
        if got is None:
            ox, oy = hop.lateral_offset
            radius = hop.aperture_diameter / 2
            if math.hypot(ox, oy) + radius > grid.window / 2:
                raise OffsetOutsideWindowError(
                    f"hop aperture offset {hop.lateral_offset} outside window"
                )
            r2 = (X - ox) ** 2 + (Y - oy) ** 2
            got = (r2 <= radius**2).astype(np.complex128)
            if math.isfinite(hop.focal_length):
                got *= np.exp(-1j * k * r2 / (2 * hop.focal_length))
            lens_cache[key] = got
        return got

    launch_power = total_power(field)
    records = []
    cur = field
    for i, hop in enumerate(chain.hops):
        p_in = total_power(cur)
        cur, _removed = propagate_trimmed(cur, hop.separation)
        cur, _guard = apply_guard_band(cur, guard)
        p_prop = total_power(cur)
        u = cur.samples * lens_factor(hop)
        p_ap = float(np.sum(np.abs(u) ** 2) * da)
        u = u * math.sqrt(hop.power_transmittance)
        p_refl = p_ap * hop.power_transmittance
        cur = ComplexField(grid, lam, u)
        records.append(
            HopRecord(
                index=i,
                power_in=p_in,
                power_after_propagation=p_prop,
                power_before_aperture=p_prop,
                power_after_aperture=p_ap,
                power_after_reflection=p_refl,
                cumulative_db=-10.0 * math.log10(p_refl / launch_power),
            )
        )
    return ChainTrace(records=tuple(records), final_field=cur, launch_power=launch_power)
