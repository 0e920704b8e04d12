"""Scalar wave-optics kernel: sampled complex fields and free-space propagation.

Fields live on a square, power-of-two grid and are propagated with the
band-limited angular-spectrum method (exact scalar diffraction on a periodic
grid).  A two-step Fresnel propagator with output-window rescaling covers the
long ground-link legs where the beam outgrows a fixed window.

All operations are pure: fields are treated as immutable values and every
function returns a new field.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    AliasingError,
    GridMismatchError,
    GridTooCoarseError,
    WindowTooSmallError,
    ZeroPowerError,
)

__all__ = [
    "Grid",
    "GaussianSpec",
    "ComplexField",
    "gaussian_field",
    "propagate",
    "propagate_trimmed",
    "propagate_rescaled",
    "total_power",
    "beam_radius",
    "mode_overlap",
    "guard_band_mask",
    "apply_guard_band",
    "transfer_function",
    "band_limit_frequency",
    "max_safe_distance",
]


@dataclass(frozen=True)
class Grid:
    """Square computational window: physical side ``window`` (m), ``n`` samples."""

    window: float
    n: int

    def __post_init__(self):
        if self.window <= 0:
            raise ValueError(f"window must be positive, got {self.window}")
        if self.n < 256 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"n must be a power of two >= 256, got {self.n}")

    @property
    def dx(self) -> float:
        return self.window / self.n

    def coords(self) -> np.ndarray:
        """Centered sample coordinates along one axis (m)."""
        return (np.arange(self.n) - self.n // 2) * self.dx

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        x = self.coords()
        return np.meshgrid(x, x, indexing="xy")

    def freqs(self) -> np.ndarray:
        """FFT-ordered spatial frequencies along one axis (cycles/m)."""
        return np.fft.fftfreq(self.n, self.dx)


@dataclass(frozen=True)
class GaussianSpec:
    """Gaussian launch beam: 1/e^2 amplitude radius ``waist`` at the launch plane.

    ``curvature`` is the radius of curvature R of the launch wavefront (m);
    ``None`` means a flat phase front (the launch plane is the focus).
    Sign convention: R > 0 diverges (phase exp(+ikr^2/2R)), R < 0 converges
    toward a downstream focus.
    """

    waist: float
    curvature: Optional[float] = None

    def __post_init__(self):
        if self.waist <= 0:
            raise ValueError(f"waist must be positive, got {self.waist}")

    def rayleigh_range(self, wavelength: float) -> float:
        return np.pi * self.waist**2 / wavelength


@dataclass(frozen=True)
class ComplexField:
    """Sampled scalar optical field: complex amplitudes on ``grid`` at ``wavelength``."""

    grid: Grid
    wavelength: float
    samples: np.ndarray

    def __post_init__(self):
        if self.wavelength <= 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        if self.samples.shape != (self.grid.n, self.grid.n):
            raise ValueError("samples shape does not match grid")


def gaussian_field(grid: Grid, spec: GaussianSpec, wavelength: float) -> ComplexField:
    """Unit-power Gaussian beam on ``grid``.

    Raises GridTooCoarseError if the waist spans fewer than 4 cells and
    WindowTooSmallError if the waist exceeds window/4 (tail wrap-around).
    """
    if spec.waist < 4 * grid.dx:
        raise GridTooCoarseError(
            f"waist {spec.waist:g} m < 4 grid cells ({4 * grid.dx:g} m); refine the grid"
        )
    if spec.waist > grid.window / 4:
        raise WindowTooSmallError(
            f"waist {spec.waist:g} m > window/4 ({grid.window / 4:g} m); enlarge the window"
        )
    X, Y = grid.mesh()
    r2 = X**2 + Y**2
    u = np.exp(-r2 / spec.waist**2).astype(np.complex128)
    if spec.curvature is not None:
        k = 2 * np.pi / wavelength
        u *= np.exp(1j * k * r2 / (2 * spec.curvature))
    u /= np.sqrt(np.sum(np.abs(u) ** 2) * grid.dx**2)
    return ComplexField(grid, wavelength, u)


def total_power(field: ComplexField) -> float:
    """Sum of |amplitude|^2 times cell area."""
    return float(np.sum(np.abs(field.samples) ** 2) * field.grid.dx**2)


def beam_radius(field: ComplexField) -> float:
    """Second-moment radius about the intensity centroid.

    Normalized so a perfect Gaussian reports its 1/e^2 intensity radius w:
    radius = sqrt(2 <r^2>).
    """
    inten = np.abs(field.samples) ** 2
    p = inten.sum()
    if p <= 0:
        raise ZeroPowerError("beam_radius undefined for a zero-power field")
    X, Y = field.grid.mesh()
    cx = (inten * X).sum() / p
    cy = (inten * Y).sum() / p
    r2 = ((X - cx) ** 2 + (Y - cy) ** 2) * inten
    return float(np.sqrt(2 * r2.sum() / p))


def mode_overlap(field: ComplexField, reference: ComplexField) -> float:
    """Normalized overlap |<ref|field>|^2 / (P_ref * P_field), in [0, 1].

    Both powers divide out, so the result measures shape only and is
    invariant under global phase and amplitude scaling.
    """
    if field.grid != reference.grid or field.wavelength != reference.wavelength:
        raise GridMismatchError("mode_overlap requires identical grid and wavelength")
    da = field.grid.dx**2
    inner = np.sum(np.conj(reference.samples) * field.samples) * da
    pf = total_power(field)
    pr = total_power(reference)
    if pf <= 0 or pr <= 0:
        raise ZeroPowerError("mode_overlap undefined for a zero-power field")
    return float(np.abs(inner) ** 2 / (pf * pr))


def transfer_function(grid: Grid, wavelength: float, distance: float) -> np.ndarray:
    """Band-limited angular-spectrum transfer function (FFT ordering).

    Frequencies beyond the band-limit criterion (or evanescent) are zeroed;
    the caller accounts for any power they carried.
    """
    fx = grid.freqs()
    fxx, fyy = np.meshgrid(fx, fx, indexing="xy")
    f2 = fxx**2 + fyy**2
    inv_lam2 = 1.0 / wavelength**2
    kz = 2 * np.pi * np.sqrt(np.maximum(0.0, inv_lam2 - f2))
    h = np.exp(1j * kz * distance)
    h[f2 >= inv_lam2] = 0
    flim = band_limit_frequency(grid, wavelength, distance)
    h *= (np.abs(fxx) <= flim) & (np.abs(fyy) <= flim)
    return h


def band_limit_frequency(grid: Grid, wavelength: float, distance: float) -> float:
    """Largest alias-free spatial frequency for this grid and distance."""
    df = 1.0 / grid.window
    return 1.0 / (wavelength * np.sqrt((2 * df * distance) ** 2 + 1.0))


def _spectral_bandwidth(field: ComplexField, tol: float) -> float:
    """Smallest max-norm frequency square containing all but ``tol`` of the power."""
    spec = np.abs(np.fft.fft2(field.samples)) ** 2
    total = spec.sum()
    if total <= 0:
        raise ZeroPowerError("bandwidth undefined for a zero-power field")
    fx = field.grid.freqs()
    fxx, fyy = np.meshgrid(fx, fx, indexing="xy")
    fmax = np.maximum(np.abs(fxx), np.abs(fyy)).ravel()
    order = np.argsort(fmax)
    cum = np.cumsum(spec.ravel()[order])
    idx = np.searchsorted(cum, (1.0 - tol) * total)
    return float(fmax[order[min(idx, fmax.size - 1)]])


def max_safe_distance(field: ComplexField, tol: float = 1e-6) -> float:
    """Largest distance whose band limit still contains the field's spectrum."""
    fbw = _spectral_bandwidth(field, tol)
    df = 1.0 / field.grid.window
    if fbw <= 0:
        return np.inf
    arg = (1.0 / (field.wavelength * fbw)) ** 2 - 1.0
    if arg <= 0:
        return 0.0
    return float(np.sqrt(arg) / (2 * df))


def _asm(field: ComplexField, distance: float) -> tuple[ComplexField, float]:
    """Band-limited angular-spectrum step; returns (field, removed spectral power)."""
    h = transfer_function(field.grid, field.wavelength, distance)
    spec = np.fft.fft2(field.samples)
    norm = field.grid.dx**2 / field.grid.n**2
    p_in = float(np.sum(np.abs(spec) ** 2) * norm)
    spec *= h
    p_kept = float(np.sum(np.abs(spec) ** 2) * norm)
    out = np.fft.ifft2(spec)
    return ComplexField(field.grid, field.wavelength, out), max(0.0, p_in - p_kept)


def propagate(field: ComplexField, distance: float, band_tol: float = 1e-6) -> ComplexField:
    """Free-space propagation over ``distance`` (m), power-conserving.

    Raises AliasingError (with the maximum safe distance for this field and
    grid) if more than ``band_tol`` of the spectral power lies beyond the
    angular-spectrum band limit, instead of aliasing silently.
    """
    if distance < 0:
        raise ValueError("distance must be >= 0")
    if distance == 0:
        return ComplexField(field.grid, field.wavelength, field.samples.copy())
    out, removed = _asm(field, distance)
    p_in = total_power(field)
    if p_in > 0 and removed / p_in > band_tol:
        raise AliasingError(
            f"band-limit criterion violated at {distance:g} m "
            f"({removed / p_in:.2e} of the power beyond the limit); "
            f"max safe distance for this field is {max_safe_distance(field, band_tol):g} m",
            max_safe_distance(field, band_tol),
        )
    return out


def propagate_trimmed(field: ComplexField, distance: float) -> tuple[ComplexField, float]:
    """Like propagate, but removes out-of-band spectral power and reports it.

    Used inside lens chains, where hard apertures scatter light to angles
    that would wrap around the periodic window; that light is physically
    lost and the removed power is accounted as diffraction loss.
    """
    if distance < 0:
        raise ValueError("distance must be >= 0")
    if distance == 0:
        return ComplexField(field.grid, field.wavelength, field.samples.copy()), 0.0
    return _asm(field, distance)


def _fresnel_one_step(field: ComplexField, distance: float) -> ComplexField:
    """Single-FFT Fresnel propagation; output grid window = lambda*z/dx."""
    grid = field.grid
    n = grid.n
    lam = field.wavelength
    k = 2 * np.pi / lam
    x1, y1 = grid.mesh()
    dx2 = lam * distance / (n * grid.dx)
    out_grid = Grid(window=dx2 * n, n=n)
    x2, y2 = out_grid.mesh()
    a = field.samples * np.exp(1j * k / (2 * distance) * (x1**2 + y1**2))
    u = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(a))) * grid.dx**2
    u = np.exp(1j * k * distance) / (1j * lam * distance) * np.exp(
        1j * k / (2 * distance) * (x2**2 + y2**2)
    ) * u
    return ComplexField(out_grid, lam, u)


def propagate_rescaled(
    field: ComplexField, distance: float, output_window: float
) -> ComplexField:
    """Two-step Fresnel propagation onto a window of the requested size.

    Handles the long, strongly diverging legs (ground links) where a fixed
    window cannot hold both endpoint beams.  The magnification
    M = output_window / input_window is realized with an intermediate plane
    at z1 = z / (1 + M).
    """
    if distance <= 0:
        raise ValueError("propagate_rescaled requires distance > 0")
    m = output_window / field.grid.window
    if m <= 0:
        raise ValueError("output_window must be positive")
    z1 = distance / (1.0 + m)
    z2 = distance - z1
    mid = _fresnel_one_step(field, z1)
    return _fresnel_one_step(mid, z2)


def guard_band_mask(grid: Grid) -> np.ndarray:
    """Super-Gaussian absorber over the outer ~10% of the window.

    Near-unity inside 85% of the half-window, rolling smoothly to zero at
    the edge; prevents wrap-around of clipped light on the periodic grid.
    """
    X, Y = grid.mesh()
    r = np.sqrt(X**2 + Y**2)
    return np.exp(-((r / (0.95 * grid.window / 2)) ** 40))


def apply_guard_band(
    field: ComplexField, mask: Optional[np.ndarray] = None
) -> tuple[ComplexField, float]:
    """Absorb power near the window edge; returns (field, absorbed power)."""
    if mask is None:
        mask = guard_band_mask(field.grid)
    p_in = total_power(field)
    out = ComplexField(field.grid, field.wavelength, field.samples * mask)
    return out, max(0.0, p_in - total_power(out))
