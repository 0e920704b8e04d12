"""Protocol rate models: direct transmission, nested repeaters, and
single/double-memory satellite protocols with finite-key analysis.

These are analytic models over scalar link budgets (no wave optics): direct
transmission is linear in transmittance; nested repeaters use the standard
(3/2)-per-level waiting-time approximation; the memory-satellite protocols
compute a composable finite-key length from sifted-count and QBER models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateParameterError, NoKeyAtZeroLossError

__all__ = [
    "ProtocolParams",
    "RepeaterParams",
    "RateCurve",
    "SPEED_OF_LIGHT",
    "direct_rate",
    "repeater_rate",
    "binary_entropy",
    "memory_key_rate",
    "asymptotic_key_rate_per_pulse",
    "max_tolerable_loss",
    "geo_direct_curve",
]

SPEED_OF_LIGHT = 299_792_458.0


def direct_rate(source_rate: float, total_loss_db: float) -> float:
    """Detected rate for direct transmission: source_rate x 10^(-loss/10)."""
    if total_loss_db < 0:
        raise ValueError("loss must be >= 0 dB")
    if source_rate < 0:
        raise ValueError("source rate must be >= 0")
    return source_rate * 10.0 ** (-total_loss_db / 10.0)


@dataclass(frozen=True)
class RateCurve:
    """A rate-vs-abscissa series (distance in m or loss in dB)."""

    abscissa: tuple
    rates: tuple
    protocol: str
    abscissa_label: str = "ground_distance_m"
    rate_label: str = "rate_hz"

    def __post_init__(self):
        a = np.asarray(self.abscissa, dtype=float)
        r = np.asarray(self.rates, dtype=float)
        if a.size != r.size:
            raise ValueError("abscissa and rates must have equal length")
        if a.size >= 2 and not np.all(np.diff(a) > 0):
            raise ValueError("abscissa must be strictly increasing")
        if np.any(r < 0):
            raise ValueError("rates must be >= 0")


@dataclass(frozen=True)
class RepeaterParams:
    """Nested-repeater model parameters.

    ``per_link_loss_db`` is the total optical loss of one elementary link
    (both arms where the link has two).  ``link_length`` sets the classical
    heralding wait 2L/c; zero means heralding is amortized (multimode
    memories pipeline attempts at the source clock).  ``bell_success``
    overrides the default linear-optics swap probability 0.5 x read_eff^2;
    set it to 1.0 for deterministic gate-based swapping.
    """

    per_link_loss_db: float
    n_links: int = 8
    nesting_level: int = 3
    memory_write_eff: float = 0.9
    memory_read_eff: float = 0.9
    source_eff: float = 0.9
    detector_eff: float = 0.9
    qnd_eff: float = 0.32
    pair_source_rate: float = 10e6
    link_length: float = 0.0
    bell_success: Optional[float] = None

    def __post_init__(self):
        if self.n_links != 2**self.nesting_level:
            raise ValueError("n_links must equal 2**nesting_level")
        for name in (
            "memory_write_eff",
            "memory_read_eff",
            "source_eff",
            "detector_eff",
            "qnd_eff",
        ):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must be in (0, 1]")
        if self.per_link_loss_db < 0:
            raise ValueError("per-link loss must be >= 0 dB")
        if self.pair_source_rate <= 0:
            raise ValueError("pair source rate must be positive")
        if self.link_length < 0:
            raise ValueError("link length must be >= 0")
        if self.bell_success is not None and not 0 < self.bell_success <= 1:
            raise ValueError("bell_success must be in (0, 1]")

    def swap_probability(self) -> float:
        if self.bell_success is not None:
            return self.bell_success
        return 0.5 * self.memory_read_eff**2


def repeater_rate(params: RepeaterParams) -> float:
    """End-to-end entanglement rate of a nested repeater chain.

    Waiting-time approximation: the elementary link succeeds per attempt
    with p0 = transmittance x herald-chain efficiencies; attempts repeat
    every max(1/source_rate, 2 link_length/c); each of the nesting levels
    multiplies the expected time by (3/2)/p_swap.
    """
    transmittance = 10.0 ** (-params.per_link_loss_db / 10.0)
    p0 = (
        transmittance
        * params.source_eff
        * params.qnd_eff
        * params.memory_write_eff
        * params.detector_eff
    )
    if p0 <= 0:
        raise DegenerateParameterError("per-attempt success probability is zero")
    attempt = max(1.0 / params.pair_source_rate, 2.0 * params.link_length / SPEED_OF_LIGHT)
    expected_time = attempt / p0
    p_swap = params.swap_probability()
    expected_time *= (1.5 / p_swap) ** params.nesting_level
    return 1.0 / expected_time


# --- memory-satellite finite-key models -----------------------------------


@dataclass(frozen=True)
class ProtocolParams:
    """Parameters of the memory-satellite QKD protocols.

    Noise probabilities are per coincidence window (the default 200 ns
    window matches the 5 MHz source period, i.e. unity duty cycle).
    ``multiplexing_modes = None`` means memory capacity never binds
    (full multiplexing); set a finite count to cap loaded qubits per pass.
    """

    source_rate: float = 5e6
    transmission_period: float = 240.0
    memory_efficiency: float = 0.6
    detector_efficiency: float = 0.8
    memory_noise_prob: float = 1e-3
    background_prob: float = 6.4e-7
    dark_count_prob: float = 1e-7
    coincidence_window: float = 200e-9
    memory_dephasing_rate: float = 0.0
    error_correction_inefficiency: float = 1.16
    security_epsilon: float = 1e-9
    multiplexing_modes: Optional[int] = None
    swap_efficiency: float = 1.0

    def __post_init__(self):
        for name in (
            "memory_efficiency",
            "detector_efficiency",
            "memory_noise_prob",
            "background_prob",
            "dark_count_prob",
            "swap_efficiency",
        ):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.source_rate < 0 or self.transmission_period < 0:
            raise ValueError("rates and periods must be >= 0")
        if not 0 < self.security_epsilon < 1:
            raise ValueError("security_epsilon must be in (0, 1)")
        if self.memory_dephasing_rate < 0:
            raise ValueError("dephasing rate must be >= 0")
        if self.multiplexing_modes is not None and self.multiplexing_modes < 1:
            raise ValueError("multiplexing_modes must be >= 1 when set")


_PROTOCOLS = ("single_memory", "double_memory")


def binary_entropy(p: float) -> float:
    """Shannon entropy of a bit with bias p, in bits."""
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def _noise_prob(params: ProtocolParams) -> float:
    return params.background_prob + params.dark_count_prob


def _sifted_model(params: ProtocolParams, channel_loss_db: float, protocol: str):
    """Sifted-count and QBER model shared by both protocols.

    Returns (n_sifted, qber).  Loading: photons heralded by ground
    detection with probability t*eta_det per pulse.  single_memory reads
    the stored qubit out (memory efficiency) and re-transmits it through
    the second downlink; double_memory loads a second bank over the other
    station and swaps on board, so no stored qubit crosses a channel again.
    Background/dark clicks produce random outcomes (half are errors).
    """
    if protocol not in _PROTOCOLS:
        raise ValueError(f"unknown protocol {protocol!r}")
    if channel_loss_db < 0:
        raise ValueError("channel loss must be >= 0 dB")
    t = 10.0 ** (-channel_loss_db / 10.0)
    p_noise = _noise_prob(params)
    p_sig_load = t * params.detector_efficiency
    n_pulses = params.source_rate * params.transmission_period
    loaded = n_pulses * (p_sig_load + p_noise)
    if params.multiplexing_modes is not None:
        loaded = min(loaded, float(params.multiplexing_modes))

    e_load = 0.5 * p_noise / (p_sig_load + p_noise) if p_sig_load + p_noise > 0 else 0.5
    dephase = 0.5 * (
        1.0 - math.exp(-params.memory_dephasing_rate * params.transmission_period)
    )

    if protocol == "single_memory":
        p_sig_out = params.memory_efficiency * t * params.detector_efficiency
        delivered = loaded * (p_sig_out + p_noise)
        e_out = 0.5 * p_noise / (p_sig_out + p_noise) if p_sig_out + p_noise > 0 else 0.5
        n = 0.5 * delivered
        qber = e_load + e_out + params.memory_noise_prob + dephase
    else:
        # both banks load the same expected count; swapped pairs are limited
        # by either bank, here symmetric
        n = 0.5 * loaded * params.swap_efficiency
        qber = 2 * e_load + 2 * params.memory_noise_prob + 2 * dephase
    return n, min(qber, 0.5)


def finite_key_length(n: float, qber: float, params: ProtocolParams) -> float:
    """Composable finite-key length from n sifted bits at the given QBER.

    l = n (1 - h(Q + mu) - f_EC h(Q)) - 7 sqrt(n log2(2/eps))
        - 2 log2(1/(2 eps)) - log2(2/eps),
    with mu the statistical deviation of the phase-error estimate.  Returns
    0 when the bound is non-positive.
    """
    if n < 1:
        return 0.0
    eps = params.security_epsilon
    # phase errors are estimated from the conjugate-basis sample of
    # comparable size, hence the two-sided deviation (no factor 1/2)
    mu = math.sqrt(math.log(1.0 / eps) / n)
    q_pe = min(qber + mu, 0.5)
    f_ec = params.error_correction_inefficiency
    length = (
        n * (1.0 - binary_entropy(q_pe) - f_ec * binary_entropy(qber))
        - 7.0 * math.sqrt(n * math.log2(2.0 / eps))
        - 2.0 * math.log2(1.0 / (2.0 * eps))
        - math.log2(2.0 / eps)
    )
    return max(0.0, length)


def memory_key_rate(
    params: ProtocolParams, channel_loss_db: float, protocol: str
) -> tuple:
    """(key_length_bits, key_rate_bits_per_s) at the given single-channel loss.

    The rate is normalized to the two transmission periods each protocol
    occupies (loading pass + delivery/second-loading pass); inter-station
    flight time is geometry-dependent and excluded.
    """
    n, qber = _sifted_model(params, channel_loss_db, protocol)
    length = finite_key_length(n, qber, params)
    duration = 2.0 * params.transmission_period
    rate = length / duration if duration > 0 else 0.0
    return length, rate


def asymptotic_key_rate_per_pulse(
    params: ProtocolParams, channel_loss_db: float, protocol: str
) -> float:
    """Infinite-block-size key rate per source pulse (reference limit)."""
    n, qber = _sifted_model(params, channel_loss_db, protocol)
    n_pulses = params.source_rate * params.transmission_period
    if n_pulses == 0:
        return 0.0
    f_ec = params.error_correction_inefficiency
    per_bit = 1.0 - binary_entropy(qber) - f_ec * binary_entropy(qber)
    return max(0.0, (n / n_pulses) * per_bit)


def max_tolerable_loss(
    params: ProtocolParams, protocol: str, resolution_db: float = 0.1
) -> float:
    """Largest channel loss (dB) with positive key length, by bisection."""
    lo = 0.0
    if memory_key_rate(params, lo, protocol)[0] <= 0:
        raise NoKeyAtZeroLossError(
            f"{protocol}: no positive key even at 0 dB channel loss"
        )
    hi = 1.0
    while memory_key_rate(params, hi, protocol)[0] > 0:
        hi *= 2.0
        if hi > 500.0:
            return math.inf
    while hi - lo > resolution_db:
        mid = 0.5 * (lo + hi)
        if memory_key_rate(params, mid, protocol)[0] > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- GEO direct transmission ----------------------------------------------


def geo_direct_curve(
    ground_distances: Sequence[float],
    source_rate: float = 1e9,
    tx_aperture: float = 0.5,
    rx_aperture: float = 1.0,
    wavelength: float = 580e-9,
    geo_altitude: float = 36_000e3,
    min_elevation_deg: float = 30.0,
    attenuation=None,
) -> RateCurve:
    """Direct-transmission rate from a geostationary satellite vs ground distance.

    Two downlinks to stations placed symmetrically about the sub-satellite
    point; each leg pays far-field diffraction (transmit waist = aperture/4)
    plus air-mass-scaled atmospheric attenuation.  Stations below the
    minimum elevation get zero rate (no service at grazing incidence).
    """
    from .linkgeom import (
        AttenuationModel,
        air_mass,
        atmospheric_db,
        elevation_between,
        slant_range_between,
    )

    if attenuation is None:
        attenuation = AttenuationModel()
    rates = []
    for d in ground_distances:
        if d < 0:
            raise ValueError("ground distance must be >= 0")
        half = d / 2.0
        elev = elevation_between(half, geo_altitude)
        if elev < min_elevation_deg:
            rates.append(0.0)
            continue
        rng = slant_range_between(half, geo_altitude)
        w0 = tx_aperture / 4.0
        theta = wavelength / (math.pi * w0)
        w = w0 * math.sqrt(1.0 + (rng / (math.pi * w0**2 / wavelength)) ** 2)
        capture = 1.0 - math.exp(-2.0 * (rx_aperture / 2.0) ** 2 / w**2)
        leg_db = -10.0 * math.log10(capture) + atmospheric_db(
            attenuation, wavelength, 90.0 - elev
        )
        rates.append(direct_rate(source_rate, 2.0 * leg_db))
    return RateCurve(
        abscissa=tuple(float(d) for d in ground_distances),
        rates=tuple(rates),
        protocol="geo_direct",
    )
