"""Exception hierarchy for qlinksim.

Numerical guards fail loudly: any condition that would silently corrupt a
result (aliasing, undersampling, exhausted calibration brackets) raises a
dedicated exception instead of returning garbage.
"""


class QLinkError(Exception):
    """Base class for all qlinksim errors."""


class GridTooCoarseError(QLinkError):
    """Feature (waist, r0, ...) spans fewer grid cells than required."""


class WindowTooSmallError(QLinkError):
    """Feature is too large relative to the computational window."""


class AliasingError(QLinkError):
    """Angular-spectrum band-limit criterion violated for this distance.

    Carries ``max_safe_distance`` (m), the largest propagation distance for
    which the field's spectral content stays inside the band limit.
    """

    def __init__(self, message: str, max_safe_distance: float):
        super().__init__(message)
        self.max_safe_distance = max_safe_distance


class GridMismatchError(QLinkError):
    """Two fields do not share the same grid/wavelength."""


class ZeroPowerError(QLinkError):
    """Operation undefined on a field with zero total power."""


class OffsetOutsideWindowError(QLinkError):
    """Aperture shifted (partly) outside the computational window."""


class BracketExhaustedError(QLinkError):
    """Root bracketing failed: target not achievable inside the bracket."""


class DegenerateParameterError(QLinkError):
    """A rate-model parameter set yields zero success probability."""


class NoKeyAtZeroLossError(QLinkError):
    """Finite-key protocol produces no key even at 0 dB channel loss."""


class UnknownPresetError(QLinkError):
    """Requested scenario preset does not exist."""


class UnknownWavelengthError(QLinkError):
    """Wavelength absent from the attenuation table."""


class UnknownParameterError(QLinkError):
    """Sweep parameter path does not resolve to a numeric config field."""


class ConfigError(QLinkError):
    """Scenario config parsing/validation failure (carries field context)."""
