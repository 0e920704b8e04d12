from dataclasses import replace

import pytest

from qlinksim import scenarios
from qlinksim.errors import UnknownParameterError, UnknownPresetError
from qlinksim.ratemodels import RateCurve
from qlinksim.scenarios import (
    PRESETS,
    LossBudget,
    ScenarioConfig,
    config_hash,
    monte_carlo,
    preset,
    run_scenario,
    sweep,
)


class TestPresets:
    def test_all_presets_construct(self):
        for name in PRESETS:
            cfg = preset(name)
            assert isinstance(cfg, ScenarioConfig)

    def test_unknown_preset(self):
        with pytest.raises(UnknownPresetError):
            preset("nonesuch")

    def test_relay_preset_geometry(self):
        cfg = preset("asqn_entanglement")
        assert cfg.chain.separation == pytest.approx(120e3)
        assert cfg.chain.hops == 167
        assert cfg.chain.lens.focal_length == pytest.approx(60e3)
        assert cfg.chain.lens.aperture_diameter == pytest.approx(0.60)
        assert cfg.chain.lens.power_transmittance == pytest.approx(0.98)
        assert cfg.chain.wavelength == pytest.approx(800e-9)

    def test_uplink_preset_geometry(self):
        cfg = preset("asqn_qubit_uplink")
        assert cfg.chain.separation == pytest.approx(80e3)
        assert cfg.uplink.orbit_altitude == pytest.approx(500e3)
        assert cfg.uplink.rx_aperture == pytest.approx(0.60)

    def test_vbg_preset_geometry(self):
        cfg = preset("vbg_guide")
        assert cfg.chain.separation == pytest.approx(4e3)
        assert cfg.chain.lens.focal_length == pytest.approx(2e3)
        assert cfg.chain.wavelength == pytest.approx(1550e-9)


class TestBudget:
    def test_total_is_sum_of_components(self):
        budget = LossBudget(
            chain_diffraction=0.7,
            ground_diffraction=4.2,
            reflection=14.7,
            atmospheric=1.4,
            pointing=2.6,
            other=6.0,
        )
        parts = [v for k, v in budget.items() if k != "total"]
        assert budget.total == pytest.approx(sum(parts), abs=1e-12)

    def test_items_include_total(self):
        names = [k for k, _ in LossBudget().items()]
        assert "total" in names and "chain_diffraction" in names


class TestConfigHash:
    def test_stable_and_sensitive(self):
        a = preset("geo_direct")
        assert config_hash(a) == config_hash(preset("geo_direct"))
        b = replace(a, seed=a.seed + 1)
        assert config_hash(a) != config_hash(b)
        assert len(config_hash(a)) == 16


class TestRateScenarios:
    def test_memory_sat_budget_matches_channel_loss(self):
        cfg = preset("single_memory_sat")
        report = run_scenario(cfg)
        assert report.budget.total == pytest.approx(cfg.channel_loss_db)
        assert report.rate("key_rate_bps") > 0

    def test_double_beats_single_at_same_loss(self):
        single = run_scenario(preset("single_memory_sat"))
        double = run_scenario(preset("double_memory_sat"))
        assert double.rate("max_tolerable_loss_db") > single.rate(
            "max_tolerable_loss_db"
        )

    def test_ground_repeater_daily_rate(self):
        report = run_scenario(preset("ground_repeater"))
        per_day = report.rate("repeater_per_day")
        assert per_day == pytest.approx(report.rate("repeater_hz") * 86400, rel=1e-9)

    def test_space_beats_ground_by_orders_of_magnitude(self):
        ground = run_scenario(preset("ground_repeater"))
        space = run_scenario(preset("space_repeater"))
        assert space.rate("repeater_hz") / ground.rate("repeater_hz") >= 1e3

    def test_geo_direct_report_has_curve(self):
        report = run_scenario(preset("geo_direct"))
        assert isinstance(report.curve, RateCurve)
        assert report.rate("direct_per_day") > 0

    def test_determinism(self):
        a = run_scenario(preset("geo_direct"))
        b = run_scenario(preset("geo_direct"))
        assert a == b


@pytest.fixture(scope="module")
def small_relay():
    cfg = preset("asqn_entanglement")
    return replace(cfg, grid_n=512, reduced_hops=12)


class TestChainScenarios:
    def test_budget_composition(self, small_relay):
        report = run_scenario(small_relay)
        parts = [v for k, v in report.budget.items() if k != "total"]
        assert report.budget.total == pytest.approx(sum(parts), abs=1e-9)
        assert report.budget.reflection == pytest.approx(14.65, abs=0.05)
        assert all(v >= 0 for v in parts)

    def test_trace_present(self, small_relay):
        report = run_scenario(small_relay)
        assert len(report.trace) == 12
        hops, dbs = zip(*report.trace)
        assert all(b >= a for a, b in zip(dbs, dbs[1:]))

    def test_direct_rate_consistent_with_budget(self, small_relay):
        report = run_scenario(small_relay)
        expected = small_relay.source_rate * 10 ** (-report.budget.total / 10)
        assert report.rate("direct_hz") == pytest.approx(expected, rel=1e-9)

    def test_monte_carlo_deterministic(self, small_relay):
        a = monte_carlo(small_relay, trials=2, seed=5)
        b = monte_carlo(small_relay, trials=2, seed=5)
        assert a == b
        c = monte_carlo(small_relay, trials=2, seed=6)
        assert c != a

    def test_monte_carlo_excess_nonnegative_in_budget(self, small_relay):
        report = monte_carlo(small_relay, trials=3, seed=1)
        assert report.budget.error_excess >= 0.0
        assert report.stat("trials") == 3

    def test_monte_carlo_rejects_rate_only_kind(self):
        with pytest.raises(UnknownParameterError):
            monte_carlo(preset("geo_direct"), trials=2, seed=0)


class TestSweep:
    def test_sweep_returns_curve(self):
        cfg = preset("geo_direct")
        grid = [2000e3, 4000e3, 8000e3]
        curve = sweep(cfg, "total_ground_distance", grid)
        assert isinstance(curve, RateCurve)
        assert len(curve.abscissa) == 3
        assert curve.abscissa == tuple(grid)

    def test_sweep_nested_path(self):
        cfg = preset("single_memory_sat")
        curve = sweep(cfg, "channel_loss_db", [5.0, 10.0, 15.0])
        rates = list(curve.rates)
        assert all(b < a for a, b in zip(rates, rates[1:]))

    def test_sweep_unknown_path(self):
        with pytest.raises(UnknownParameterError):
            sweep(preset("geo_direct"), "no.such.field", [1.0, 2.0])


class TestVbg:
    def test_element_loss_bookkeeping(self):
        cfg = replace(preset("vbg_guide"), grid_n=512, reduced_hops=8)
        report = run_scenario(cfg)
        expected = cfg.vbg_element_db_per_km * (cfg.chain.separation / 1e3) * cfg.chain.hops
        assert report.budget.reflection == pytest.approx(expected, rel=1e-9)
        assert report.budget.chain_diffraction < 0.5
