"""End-to-end scenario assembly: presets, loss budgets, Monte Carlo, sweeps.

Each scenario kind wires the wave-optics chain, link geometry, turbulence,
and rate models into a Report with an itemized loss budget.  All runs are
deterministic given (config, seed); Monte Carlo trial i draws its seed from
numpy's SeedSequence(seed).spawn(i) stream.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Optional

import numpy as np

from . import chainoptics, linkgeom, ratemodels, turbulence
from .chainoptics import ChainSpec, ErrorSpec, SatelliteLens, eigenmode_spec
from .errors import UnknownParameterError, UnknownPresetError
from .linkgeom import AttenuationModel, GroundLink
from .ratemodels import ProtocolParams, RateCurve, RepeaterParams
from .turbulence import AtmosphereProfile, UplinkGeometry
from .wavefield import ComplexField, GaussianSpec, Grid, gaussian_field, total_power

__all__ = [
    "ScenarioConfig",
    "LossBudget",
    "Report",
    "SCENARIO_KINDS",
    "PRESETS",
    "preset",
    "run_scenario",
    "monte_carlo",
    "sweep",
]

__version__ = "0.1.0"

SCENARIO_KINDS = (
    "asqn_entanglement",
    "asqn_qubit_uplink",
    "vbg_guide",
    "geo_direct",
    "ground_repeater",
    "space_repeater",
    "single_memory_sat",
    "double_memory_sat",
    "relay_plus_repeater",
)

_BUDGET_COMPONENTS = (
    "chain_diffraction",
    "ground_diffraction",
    "reflection",
    "atmospheric",
    "turbulence_excess",
    "pointing",
    "error_excess",
    "other",
)


@dataclass(frozen=True)
class LossBudget:
    """Itemized loss decomposition; total is the sum of the components."""

    chain_diffraction: float = 0.0
    ground_diffraction: float = 0.0
    reflection: float = 0.0
    atmospheric: float = 0.0
    turbulence_excess: float = 0.0
    pointing: float = 0.0
    error_excess: float = 0.0
    other: float = 0.0

    def __post_init__(self):
        for name in _BUDGET_COMPONENTS:
            if getattr(self, name) < 0:
                raise ValueError(f"budget component {name} must be >= 0 dB")

    @property
    def total(self) -> float:
        return sum(getattr(self, name) for name in _BUDGET_COMPONENTS)

    def items(self):
        return [(name, getattr(self, name)) for name in _BUDGET_COMPONENTS] + [
            ("total", self.total)
        ]


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one scenario run."""

    kind: str = "asqn_entanglement"
    total_ground_distance: float = 20_000e3
    chain: ChainSpec = ChainSpec()
    ground_link: GroundLink = GroundLink()
    attenuation: AttenuationModel = AttenuationModel()
    errors: ErrorSpec = ErrorSpec()
    protocol: ProtocolParams = ProtocolParams()
    atmosphere: AtmosphereProfile = AtmosphereProfile()
    uplink: UplinkGeometry = UplinkGeometry()
    pointing_jitter: float = 0.5e-6
    # detector, source, and coupling inefficiency allowance (not wave optics)
    detection_allowance_db: float = 6.0
    source_rate: float = 1e9
    channel_loss_db: float = 20.0
    repeater_orbit_altitude: float = 1000e3
    repeater_tx_aperture: float = 0.5
    repeater_rx_aperture: float = 1.0
    repeater_wavelength: float = 580e-9
    space_divergence_full: float = 4e-6
    geo_min_elevation_deg: float = 30.0
    vbg_element_db_per_km: float = 1e-4
    ensemble: int = 1
    seed: int = 0
    grid_n: int = 1024
    reduced_hops: Optional[int] = None
    calibrate_uplink_db: Optional[float] = None

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise UnknownPresetError(f"unknown scenario kind {self.kind!r}")
        if self.ensemble < 1:
            raise ValueError("ensemble size must be >= 1")
        if self.total_ground_distance < 0:
            raise ValueError("ground distance must be >= 0")
        if self.pointing_jitter < 0:
            raise ValueError("pointing jitter must be >= 0")


@dataclass(frozen=True)
class Report:
    """Deterministic result record for one scenario (or ensemble) run."""

    kind: str
    budget: LossBudget
    rates: tuple = ()  # ((name, value), ...)
    stats: tuple = ()  # ((name, value), ...)
    curve: Optional[RateCurve] = None
    trace: tuple = ()  # ((hop_index, cumulative_db), ...)
    config_hash: str = ""
    seed: int = 0
    version: str = __version__

    def rate(self, name: str) -> float:
        for k, v in self.rates:
            if k == name:
                return v
        raise KeyError(name)

    def stat(self, name: str) -> float:
        for k, v in self.stats:
            if k == name:
                return v
        raise KeyError(name)

    def to_text(self) -> str:
        lines = [f"kind: {self.kind}", f"seed: {self.seed}", f"version: {self.version}",
                 f"config_hash: {self.config_hash}"]
        for name, val in self.budget.items():
            lines.append(f"budget.{name}: {val:.9g}")
        for name, val in self.rates:
            lines.append(f"rate.{name}: {val:.9g}")
        for name, val in self.stats:
            lines.append(f"stat.{name}: {val:.9g}")
        return "\n".join(lines) + "\n"


def config_hash(config: ScenarioConfig) -> str:
    return hashlib.sha256(repr(config).encode()).hexdigest()[:16]


# --- presets ----------------------------------------------------------------


def _asqn_chain(separation: float, distance: float) -> ChainSpec:
    return ChainSpec(
        separation=separation,
        hops=chainoptics.hops_for_distance(distance, separation),
        lens=SatelliteLens(
            focal_length=separation / 2.0,
            aperture_diameter=0.60,
            power_transmittance=0.98,
        ),
        wavelength=800e-9,
    )


def _vbg_chain(distance: float) -> ChainSpec:
    separation = 4e3
    return ChainSpec(
        separation=separation,
        hops=chainoptics.hops_for_distance(distance, separation),
        lens=SatelliteLens(
            focal_length=separation / 2.0,
            aperture_diameter=0.40,
            power_transmittance=1.0,
        ),
        wavelength=1550e-9,
    )


def _build_presets() -> dict:
    d = 20_000e3
    presets = {
        "asqn_entanglement": ScenarioConfig(
            kind="asqn_entanglement",
            total_ground_distance=d,
            chain=_asqn_chain(120e3, d),
        ),
        "asqn_qubit_uplink": ScenarioConfig(
            kind="asqn_qubit_uplink",
            total_ground_distance=d,
            chain=_asqn_chain(80e3, d),
            ensemble=30,
        ),
        "vbg_guide": ScenarioConfig(
            kind="vbg_guide",
            total_ground_distance=d,
            chain=_vbg_chain(d),
        ),
        "geo_direct": ScenarioConfig(
            kind="geo_direct",
            total_ground_distance=4_000e3,
            source_rate=1e9,
        ),
        "ground_repeater": ScenarioConfig(kind="ground_repeater", total_ground_distance=d),
        "space_repeater": ScenarioConfig(kind="space_repeater", total_ground_distance=d),
        "single_memory_sat": ScenarioConfig(kind="single_memory_sat"),
        "double_memory_sat": ScenarioConfig(kind="double_memory_sat"),
        "relay_plus_repeater": ScenarioConfig(
            kind="relay_plus_repeater",
            total_ground_distance=2_000e3,
            chain=_asqn_chain(120e3, 2_000e3),
        ),
    }
    return presets


PRESETS = _build_presets()


def preset(name: str) -> ScenarioConfig:
    """Fully populated configuration for a named scenario."""
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPresetError(
            f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}"
        ) from None


# --- chain diffraction helpers ----------------------------------------------


def _chain_diffraction_db(
    config: ScenarioConfig,
    launch: Optional[ComplexField] = None,
    chain: Optional[chainoptics.Chain] = None,
):
    """Pure diffraction loss (dB) of the chain, transmittance forced to 1.

    With ``reduced_hops`` set, simulates that many hops, verifies the
    per-hop loss has reached steady state, and extrapolates the remainder
    at the mean of the last five hops.  Returns (db, trace_records).
    """
    spec = config.chain
    lossless = replace(spec, lens=replace(spec.lens, power_transmittance=1.0))
    hops = spec.hops
    k = hops if config.reduced_hops is None else min(config.reduced_hops, hops)
    sim_spec = replace(lossless, hops=k)
    built = chain if chain is not None else chainoptics.build_chain(sim_spec)
    if launch is None:
        grid = chainoptics.default_grid(spec.lens, n=config.grid_n)
        launch = gaussian_field(grid, sim_spec.launch_spec(), spec.wavelength)
    trace = chainoptics.propagate_chain(launch, built)
    db = trace.diffraction_db
    if k < hops:
        per_hop = trace.per_hop_db[-5:]
        db += float(np.mean(per_hop)) * (hops - k)
    records = tuple((r.index, r.cumulative_db) for r in trace.records)
    return db, records


def _reflection_db(spec: ChainSpec) -> float:
    return -10.0 * spec.hops * math.log10(spec.lens.power_transmittance)


def _downlink_spec(config: ScenarioConfig) -> GaussianSpec:
    """Launch Gaussian for a chain-to-ground downlink: waist = aperture/4."""
    return GaussianSpec(waist=config.ground_link.tx_aperture / 4.0)


def _pointing_db(config: ScenarioConfig) -> float:
    """Pointing loss per ground link from the downlink far-field divergence."""
    w0 = _downlink_spec(config).waist
    theta = config.ground_link.wavelength / (math.pi * w0)
    return linkgeom.pointing_jitter_loss(config.pointing_jitter, theta)


# --- scenario pipelines -------------------------------------------------------


def _run_asqn_entanglement(config: ScenarioConfig, error_excess_db: float = 0.0) -> Report:
    chain_db, trace = _chain_diffraction_db(config)
    ground_db = 2.0 * linkgeom.ground_link_diffraction(
        config.ground_link, _downlink_spec(config), n=config.grid_n
    )
    atm = 2.0 * linkgeom.atmospheric_db(
        config.attenuation, config.ground_link.wavelength, config.ground_link.zenith_deg
    )
    budget = LossBudget(
        chain_diffraction=chain_db,
        ground_diffraction=ground_db,
        reflection=_reflection_db(config.chain),
        atmospheric=atm,
        pointing=2.0 * _pointing_db(config),
        error_excess=error_excess_db,
        other=config.detection_allowance_db,
    )
    rates = (
        ("direct_hz", ratemodels.direct_rate(config.source_rate, budget.total)),
    )
    return Report(
        kind=config.kind,
        budget=budget,
        rates=rates,
        trace=trace,
        config_hash=config_hash(config),
        seed=config.seed,
    )


def _relay_sublink(config: ScenarioConfig) -> Report:
    chain_db, trace = _chain_diffraction_db(config)
    budget = LossBudget(
        chain_diffraction=chain_db,
        reflection=_reflection_db(config.chain),
    )
    return Report(
        kind=config.kind,
        budget=budget,
        trace=trace,
        config_hash=config_hash(config),
        seed=config.seed,
    )


def _run_vbg(config: ScenarioConfig) -> Report:
    cfg = config if config.reduced_hops is not None else replace(config, reduced_hops=20)
    chain_db, trace = _chain_diffraction_db(cfg)
    element_db = config.vbg_element_db_per_km * (config.chain.separation / 1e3)
    budget = LossBudget(
        chain_diffraction=chain_db,
        # element absorption/scatter, bookkept on the reflection line
        reflection=element_db * config.chain.hops,
    )
    return Report(
        kind=config.kind,
        budget=budget,
        trace=trace,
        config_hash=config_hash(config),
        seed=config.seed,
    )


def _uplink_matching_focal(config: ScenarioConfig) -> float:
    """Focal length of the first satellite's matching lens: images the
    ground source into the chain's converging eigenmode."""
    return 1.0 / (1.0 / config.uplink.orbit_altitude + 1.0 / config.chain.separation)


def _best_gaussian_fraction(field: ComplexField, power: float, separation: float) -> float:
    """Largest overlap with a fundamental Gaussian, scanning waist and
    (converging) curvature around the chain eigenmode."""
    X, Y = field.grid.mesh()
    r2 = X**2 + Y**2
    k = 2 * math.pi / field.wavelength
    dx2 = field.grid.dx**2
    best = 0.0
    for w in np.linspace(0.08, 0.45, 25):
        for rc in (0.75 * separation, separation, 1.25 * separation, 1.9 * separation, None):
            phase = np.exp(-1j * k * r2 / (2 * rc)) if rc else 1.0
            ref = np.exp(-r2 / w**2) * phase
            num = abs(np.sum(np.conj(ref) * field.samples) * dx2) ** 2
            den = float(np.sum(np.abs(ref) ** 2)) * dx2 * power
            best = max(best, num / den)
    return best


def _uplink_single_trial(config: ScenarioConfig, trial_seed, nominal_chain_db=None) -> tuple:
    """One turbulent uplink + chain injection. Returns (loss_db, fraction,
    chain_excess_db vs the nominal chain)."""
    from scipy.interpolate import RegularGridInterpolator

    geo = config.uplink
    launch = geo.launch_field()
    out = turbulence.uplink_channel(
        launch, config.atmosphere, geo.orbit_altitude, trial_seed, geo.output_magnification
    )
    X, Y = out.grid.mesh()
    inside = X**2 + Y**2 <= (geo.rx_aperture / 2.0) ** 2
    captured = out.samples * inside
    p_cap = float(np.sum(np.abs(captured) ** 2)) * out.grid.dx**2
    loss_db = -10.0 * math.log10(p_cap / total_power(launch))

    # matching lens folds the residual divergence into the chain eigenmode
    k = 2 * math.pi / out.wavelength
    f_match = _uplink_matching_focal(config)
    matched = captured * np.exp(-1j * k * (X**2 + Y**2) / (2.0 * f_match))
    matched_field = ComplexField(out.grid, out.wavelength, matched)
    fraction = _best_gaussian_fraction(matched_field, p_cap, config.chain.separation)

    # resample onto the chain grid and run the relay
    n_c = min(config.grid_n, 512)
    grid_c = chainoptics.default_grid(config.chain.lens, n=n_c)
    coords = out.grid.coords()
    interp_r = RegularGridInterpolator(
        (coords, coords), matched.real, bounds_error=False, fill_value=0.0
    )
    interp_i = RegularGridInterpolator(
        (coords, coords), matched.imag, bounds_error=False, fill_value=0.0
    )
    Xc, Yc = grid_c.mesh()
    pts = np.stack([Yc.ravel(), Xc.ravel()], axis=-1)
    samples_c = (interp_r(pts) + 1j * interp_i(pts)).reshape(n_c, n_c)
    field_c = ComplexField(grid_c, out.wavelength, samples_c)

    cfg_c = replace(config, grid_n=n_c)
    distorted_db, _ = _chain_diffraction_db(cfg_c, launch=field_c)
    if nominal_chain_db is None:
        nominal_chain_db, _ = _chain_diffraction_db(cfg_c)
    return loss_db, fraction, distorted_db - nominal_chain_db


def _run_uplink(config: ScenarioConfig) -> Report:
    atmosphere = config.atmosphere
    if config.calibrate_uplink_db is not None:
        atmosphere = turbulence.calibrate_r0(
            config.calibrate_uplink_db, config.uplink, seed=config.seed
        )
    cfg = replace(config, atmosphere=atmosphere, calibrate_uplink_db=None)
    seeds = [
        int(s.generate_state(1)[0])
        for s in np.random.SeedSequence(config.seed).spawn(config.ensemble)
    ]
    n_c = min(config.grid_n, 512)
    nominal_db, _ = _chain_diffraction_db(replace(cfg, grid_n=n_c))
    results = np.array([_uplink_single_trial(cfg, s, nominal_db) for s in seeds])
    losses, fractions, excesses = results[:, 0], results[:, 1], results[:, 2]

    # free-space baseline isolates the turbulence contribution
    clear = replace(
        atmosphere, r0=1e12, weights=atmosphere.weights, screen_altitudes=atmosphere.screen_altitudes
    )
    clear_db = turbulence.uplink_loss_db(clear, config.uplink, seed=0)

    budget = LossBudget(
        ground_diffraction=clear_db,
        turbulence_excess=max(0.0, float(np.mean(losses)) - clear_db),
        chain_diffraction=max(0.0, float(np.mean(excesses))),
        atmospheric=linkgeom.atmospheric_db(
            config.attenuation, config.uplink.wavelength, 0.0
        ),
    )
    stats = (
        ("uplink_loss_db_mean", float(np.mean(losses))),
        ("uplink_loss_db_std", float(np.std(losses))),
        ("mode_fraction_mean", float(np.mean(fractions))),
        ("mode_fraction_std", float(np.std(fractions))),
        ("chain_excess_db_mean", float(np.mean(excesses))),
        ("chain_excess_db_std", float(np.std(excesses))),
        ("calibrated_r0_m", atmosphere.r0),
        ("loss_p10", float(np.percentile(losses, 10))),
        ("loss_p90", float(np.percentile(losses, 90))),
    )
    return Report(
        kind=config.kind,
        budget=budget,
        stats=stats,
        config_hash=config_hash(config),
        seed=config.seed,
    )


def _ground_repeater_params(config: ScenarioConfig, n_links: int = 8) -> RepeaterParams:
    link_len = config.total_ground_distance / n_links
    arm_db, _ = _downlink_arm_db(config, link_len / 2.0)
    return RepeaterParams(
        per_link_loss_db=2.0 * arm_db,
        n_links=n_links,
        nesting_level=int(math.log2(n_links)),
        qnd_eff=0.32,
        pair_source_rate=10e6,
        link_length=link_len,
        bell_success=1.0,
    )


def _downlink_arm_db(config: ScenarioConfig, ground_half: float) -> tuple:
    """One satellite-to-ground-memory arm: far-field diffraction + air mass."""
    alt = config.repeater_orbit_altitude
    rng = linkgeom.slant_range_between(ground_half, alt)
    elev = linkgeom.elevation_between(ground_half, alt)
    lam = config.repeater_wavelength
    w0 = config.repeater_tx_aperture / 4.0
    zr = math.pi * w0**2 / lam
    w = w0 * math.sqrt(1.0 + (rng / zr) ** 2)
    cap = 1.0 - math.exp(-2.0 * (config.repeater_rx_aperture / 2.0) ** 2 / w**2)
    db = -10.0 * math.log10(cap) + linkgeom.atmospheric_db(
        config.attenuation, lam, 90.0 - elev
    )
    return db, elev


def _space_repeater_params(config: ScenarioConfig, n_links: int = 8) -> RepeaterParams:
    link_len = config.total_ground_distance / n_links
    w = config.space_divergence_full * link_len / 2.0
    cap = 1.0 - math.exp(-2.0 * (config.repeater_rx_aperture / 2.0) ** 2 / w**2)
    return RepeaterParams(
        per_link_loss_db=-10.0 * math.log10(cap),
        n_links=n_links,
        nesting_level=int(math.log2(n_links)),
        qnd_eff=0.9,
        pair_source_rate=20e6,
        link_length=0.0,  # heralding pipelined across multimode memories
        bell_success=1.0,
    )


def _run_repeater(config: ScenarioConfig) -> Report:
    if config.kind == "ground_repeater":
        params = _ground_repeater_params(config)
    else:
        params = _space_repeater_params(config)
    rate = ratemodels.repeater_rate(params)
    budget = LossBudget(ground_diffraction=params.per_link_loss_db)
    rates = (
        ("repeater_hz", rate),
        ("repeater_per_day", rate * 86400.0),
        ("per_link_loss_db", params.per_link_loss_db),
    )
    return Report(
        kind=config.kind,
        budget=budget,
        rates=rates,
        config_hash=config_hash(config),
        seed=config.seed,
    )


def _run_geo(config: ScenarioConfig) -> Report:
    curve = ratemodels.geo_direct_curve(
        [config.total_ground_distance],
        source_rate=config.source_rate,
        min_elevation_deg=config.geo_min_elevation_deg,
        attenuation=config.attenuation,
    )
    rate = curve.rates[0]
    loss = (
        math.inf
        if rate == 0
        else -10.0 * math.log10(rate / config.source_rate)
    )
    budget = LossBudget(ground_diffraction=0.0 if rate == 0 else loss)
    rates = (("direct_hz", rate), ("direct_per_day", rate * 86400.0))
    grid = [
        config.total_ground_distance * (i + 1) / 16.0 for i in range(16)
    ]
    distance_curve = ratemodels.geo_direct_curve(
        grid,
        source_rate=config.source_rate,
        min_elevation_deg=config.geo_min_elevation_deg,
        attenuation=config.attenuation,
    )
    return Report(
        kind=config.kind,
        budget=budget,
        rates=rates,
        curve=distance_curve,
        config_hash=config_hash(config),
        seed=config.seed,
    )


def _run_memory_sat(config: ScenarioConfig) -> Report:
    protocol = "single_memory" if config.kind == "single_memory_sat" else "double_memory"
    length, rate = ratemodels.memory_key_rate(
        config.protocol, config.channel_loss_db, protocol
    )
    try:
        max_loss = ratemodels.max_tolerable_loss(config.protocol, protocol)
    except Exception:
        max_loss = 0.0
    budget = LossBudget(other=config.channel_loss_db)
    rates = (
        ("key_length_bits", length),
        ("key_rate_bps", rate),
        ("max_tolerable_loss_db", max_loss),
    )
    return Report(
        kind=config.kind,
        budget=budget,
        rates=rates,
        config_hash=config_hash(config),
        seed=config.seed,
    )


def run_scenario(config: ScenarioConfig) -> Report:
    """Execute the configured scenario once and assemble its Report."""
    kind = config.kind
    if kind == "asqn_entanglement":
        return _run_asqn_entanglement(config)
    if kind == "asqn_qubit_uplink":
        return _run_uplink(config)
    if kind == "vbg_guide":
        return _run_vbg(config)
    if kind == "geo_direct":
        return _run_geo(config)
    if kind in ("ground_repeater", "space_repeater"):
        return _run_repeater(config)
    if kind in ("single_memory_sat", "double_memory_sat"):
        return _run_memory_sat(config)
    if kind == "relay_plus_repeater":
        return _relay_sublink(config)
    raise UnknownPresetError(f"unknown scenario kind {kind!r}")


def monte_carlo(config: ScenarioConfig, trials: int, seed: int) -> Report:
    """Ensemble of perturbed runs; statistics over total loss.

    For chain scenarios each trial perturbs the chain with the configured
    ErrorSpec; trial i uses SeedSequence(seed).spawn(i).  The uplink
    scenario already runs a seeded ensemble internally.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if config.kind == "asqn_qubit_uplink":
        return _run_uplink(replace(config, ensemble=trials, seed=seed))
    if config.kind not in ("asqn_entanglement", "relay_plus_repeater", "vbg_guide"):
        raise UnknownParameterError(
            f"monte_carlo is defined for chain scenarios, not {config.kind!r}"
        )

    if config.kind == "vbg_guide" and config.reduced_hops is None:
        config = replace(config, reduced_hops=20)
    spec = config.chain
    lossless = replace(spec, lens=replace(spec.lens, power_transmittance=1.0))
    hops = spec.hops if config.reduced_hops is None else min(config.reduced_hops, spec.hops)
    sim_spec = replace(lossless, hops=hops)
    nominal_db, _ = _chain_diffraction_db(config)
    base_chain = chainoptics.build_chain(sim_spec)
    grid = chainoptics.default_grid(spec.lens, n=config.grid_n)
    launch = gaussian_field(grid, sim_spec.launch_spec(), spec.wavelength)

    seeds = [
        int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(trials)
    ]
    totals = []
    for s in seeds:
        chain = chainoptics.perturb_chain(base_chain, config.errors, s)
        trace = chainoptics.propagate_chain(launch, chain)
        db = trace.diffraction_db
        if hops < spec.hops:
            db += float(np.mean(trace.per_hop_db[-5:])) * (spec.hops - hops)
        totals.append(db)
    totals = np.asarray(totals)
    excess = totals - nominal_db
    base = _run_asqn_entanglement(config, error_excess_db=max(0.0, float(np.mean(excess)))) \
        if config.kind == "asqn_entanglement" else run_scenario(config)
    stats = (
        ("trials", float(trials)),
        ("diffraction_db_mean", float(np.mean(totals))),
        ("diffraction_db_std", float(np.std(totals))),
        ("excess_db_mean", float(np.mean(excess))),
        ("excess_db_std", float(np.std(excess))),
        ("excess_db_p10", float(np.percentile(excess, 10))),
        ("excess_db_p90", float(np.percentile(excess, 90))),
        ("nominal_db", float(nominal_db)),
    )
    return Report(
        kind=base.kind,
        budget=base.budget,
        rates=base.rates,
        stats=stats,
        trace=base.trace,
        config_hash=config_hash(config),
        seed=seed,
    )


# --- parameter sweeps ---------------------------------------------------------


def _replace_path(config, path: str, value):
    """Return a copy of config with the dotted-path numeric field replaced."""
    parts = path.split(".")
    obj = config
    chain_objs = [obj]
    for p in parts[:-1]:
        if not dataclasses.is_dataclass(obj) or p not in {f.name for f in dataclasses.fields(obj)}:
            raise UnknownParameterError(f"unknown parameter path {path!r}")
        obj = getattr(obj, p)
        chain_objs.append(obj)
    leaf = parts[-1]
    if not dataclasses.is_dataclass(obj) or leaf not in {f.name for f in dataclasses.fields(obj)}:
        raise UnknownParameterError(f"unknown parameter path {path!r}")
    current = getattr(obj, leaf)
    if not isinstance(current, (int, float)) or isinstance(current, bool):
        raise UnknownParameterError(f"parameter {path!r} is not numeric")
    new = replace(obj, **{leaf: type(current)(value)})
    for parent, name in zip(reversed(chain_objs[:-1]), reversed(parts[:-1])):
        new = replace(parent, **{name: new})
    return new


_PRIMARY_RATE = {
    "asqn_entanglement": "direct_hz",
    "geo_direct": "direct_hz",
    "ground_repeater": "repeater_hz",
    "space_repeater": "repeater_hz",
    "single_memory_sat": "key_rate_bps",
    "double_memory_sat": "key_rate_bps",
}


def sweep(config: ScenarioConfig, parameter_path: str, grid) -> RateCurve:
    """One run per grid point over a numeric config field.

    Returns the scenario's primary rate where it has one, otherwise the
    total budget loss in dB.
    """
    grid = [float(g) for g in grid]
    if len(grid) >= 2 and not all(b > a for a, b in zip(grid, grid[1:])):
        raise ValueError("sweep grid must be strictly increasing")
    values = []
    rate_name = _PRIMARY_RATE.get(config.kind)
    for g in grid:
        cfg = _replace_path(config, parameter_path, g)
        report = run_scenario(cfg)
        values.append(report.rate(rate_name) if rate_name else report.budget.total)
    return RateCurve(
        abscissa=tuple(grid),
        rates=tuple(values),
        protocol=config.kind,
        abscissa_label=parameter_path,
        rate_label=rate_name or "total_db",
    )
