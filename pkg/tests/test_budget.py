import json
import math

import numpy as np
import pandas as pd
import pytest

from optomech.budget import (
    SWEEP_COLUMNS,
    analyze_spectra,
    backaction_dominated_span,
    crossover_power,
    db_ratio,
    noise_budget,
    point_seed,
    run_sweep,
    sql_imprecision_ratio,
    thermal_fraction,
)
from optomech.errors import ConfigError
from optomech.physics import MeasurementConfig, n_thermal, p_sql
from optomech.synth import SynthRequest, synthesize

from .conftest import REFERENCE_EFFICIENCY, REFERENCE_TEMPERATURE, TOP_POWER


@pytest.fixture
def top_config() -> MeasurementConfig:
    return MeasurementConfig(
        power=TOP_POWER, efficiency=REFERENCE_EFFICIENCY, temperature=REFERENCE_TEMPERATURE
    )


def test_top_power_ratios(reference_system, top_config):
    budget = noise_budget(reference_system, top_config)
    assert db_ratio(budget.s_ba, budget.s_th) == pytest.approx(24.0, abs=1.0)
    assert db_ratio(budget.s_imp, budget.s_zp) == pytest.approx(-35.0, abs=1.0)
    assert 1400 <= sql_imprecision_ratio(reference_system, top_config) <= 2000
    assert budget.s_ba / budget.s_th == pytest.approx(250, rel=0.1)


def test_top_power_band_and_thermal_share(reference_system, top_config):
    span = backaction_dominated_span(reference_system, top_config)
    assert span / reference_system.mech_linewidth > 1e4
    assert thermal_fraction(noise_budget(reference_system, top_config)) < 0.005


def test_budget_components_add_up(reference_system, top_config):
    budget = noise_budget(reference_system, top_config)
    assert budget.s_total == budget.s_imp + budget.s_th + budget.s_ba + budget.s_zp
    assert budget.s_th == pytest.approx(2 * budget.n_th * budget.s_zp)
    assert budget.s_ba == pytest.approx(2 * budget.n_ba * budget.s_zp)


def test_balanced_ground_state_budget(reference_system):
    config = MeasurementConfig(power=p_sql(reference_system), efficiency=1.0, temperature=1e-9)
    budget = noise_budget(reference_system, config)
    assert budget.s_imp == pytest.approx(budget.s_ba, rel=1e-12)
    assert budget.s_imp == pytest.approx(budget.s_zp / 2, rel=1e-12)
    assert budget.s_th == 0.0


def test_weak_drive_backaction_is_negligible(reference_system):
    config = MeasurementConfig(power=1e-14, efficiency=REFERENCE_EFFICIENCY, temperature=0.04)
    budget = noise_budget(reference_system, config)
    assert budget.s_ba < 0.005 * budget.s_th
    thermal_peak = budget.s_zp * (2 * budget.n_th + 1)
    assert budget.s_total == pytest.approx(thermal_peak + budget.s_imp, rel=0.005)


def test_undriven_budget_has_unbounded_imprecision(reference_system):
    budget = noise_budget(reference_system, MeasurementConfig(power=0.0))
    assert budget.s_imp == math.inf
    assert budget.s_ba == 0.0
    assert math.isfinite(budget.s_th)


def test_imprecision_and_backaction_are_monotone(reference_system):
    powers = np.geomspace(1e-15, 1e-8, 50)
    configs = [MeasurementConfig(power=p, efficiency=0.02) for p in powers]
    budgets = [noise_budget(reference_system, c) for c in configs]
    s_imp = np.array([b.s_imp for b in budgets])
    s_ba = np.array([b.s_ba for b in budgets])
    assert np.all(np.diff(s_imp) < 0)
    assert np.all(np.diff(s_ba) > 0)


def test_crossover_power(reference_system, top_config):
    crossover = crossover_power(reference_system, top_config)
    assert crossover == pytest.approx(3.3e-11, rel=0.05)
    assert crossover == pytest.approx(
        4 * n_thermal(reference_system, REFERENCE_TEMPERATURE) * p_sql(reference_system)
    )
    assert crossover_power(reference_system, MeasurementConfig(temperature=1e-9)) == 0.0
    at_crossover = noise_budget(reference_system, top_config.with_power(crossover))
    assert at_crossover.s_ba == pytest.approx(at_crossover.s_th)


def test_db_ratio():
    assert db_ratio(3.0, 3.0) == 0.0
    assert db_ratio(100.0, 1.0) == pytest.approx(20.0)
    with pytest.raises(ValueError):
        db_ratio(0.0, 1.0)


def test_point_seed():
    assert point_seed(6, 0) == 6
    assert point_seed(6, 3) == 5


def test_sweep_needs_positive_powers(reference_system, log_grid_config):
    with pytest.raises(ConfigError):
        run_sweep(reference_system, log_grid_config, [], seed=1)
    with pytest.raises(ConfigError):
        run_sweep(reference_system, log_grid_config, [1e-12, 0.0], seed=1)


def test_sweep_reproduces_the_measurement_trade_off(reference_system, log_grid_config):
    powers = np.geomspace(1e-14, TOP_POWER, 13)
    result = run_sweep(reference_system, log_grid_config.with_power(0.0), powers, seed=1)

    assert [p.power for p in result.points] == pytest.approx(list(powers))
    assert all(p.fit.converged for p in result.points)
    floors = np.array([p.apparent_motion for p in result.points])
    floor_slope = np.polyfit(np.log(powers), np.log(floors), 1)[0]
    assert floor_slope == pytest.approx(-1.0, abs=0.05)

    budget = result.points[0].budget
    thermal = budget.s_zp * (2 * budget.n_th + 1)
    above = powers > crossover_power(reference_system, log_grid_config)
    excess = np.array([p.actual_motion for p in result.points])[above] - thermal
    motion_slope = np.polyfit(np.log(powers[above]), np.log(excess), 1)[0]
    assert motion_slope == pytest.approx(1.0, abs=0.05)

    summary = result.summary()
    assert summary["n_points"] == 13
    assert summary["backaction_thermal_db_model"] == pytest.approx(24.0, abs=1.0)
    assert summary["backaction_thermal_db_fit"] == pytest.approx(24.0, abs=1.0)
    assert summary["imprecision_zero_point_db_model"] == pytest.approx(-35.0, abs=1.0)


def test_heavily_averaged_sweep_matches_the_model(reference_system, log_grid_config):
    config = MeasurementConfig(**{**log_grid_config.to_dict(), "n_avg": 10**6})
    result = run_sweep(reference_system, config, [1e-12, 1e-10], seed=4)
    for point in result.points:
        assert point.apparent_motion == pytest.approx(point.budget.s_imp, rel=0.02)
        assert point.actual_motion == pytest.approx(point.budget.actual_motion, rel=0.02)
        assert point.guard_ok


def test_sweep_is_deterministic(reference_system, log_grid_config):
    first = run_sweep(reference_system, log_grid_config, [1e-12, 1e-10, 1e-9], seed=9)
    second = run_sweep(reference_system, log_grid_config, [1e-12, 1e-10, 1e-9], seed=9)
    assert json.dumps(first.to_dict()) == json.dumps(second.to_dict())


def test_broadened_points_are_flagged_not_dropped(reference_system, log_grid_config):
    broadened = MeasurementConfig(
        **{**log_grid_config.to_dict(), "injected_linewidth": 1.3 * reference_system.mech_linewidth}
    )
    result = run_sweep(reference_system, broadened, [1e-12, 1e-10], seed=2)
    assert len(result.points) == 2
    assert all(p.fit.converged and not p.guard_ok for p in result.points)
    assert result.flagged == [0, 1]
    assert not result.all_ok


def test_sweep_csv(tmp_path, reference_system, log_grid_config):
    result = run_sweep(reference_system, log_grid_config, [1e-11, 1e-9], seed=3)
    path = tmp_path / "sweep.csv"
    result.to_csv(path)
    assert path.read_text().splitlines()[0] == ",".join(SWEEP_COLUMNS)
    frame = pd.read_csv(path, float_precision="round_trip")
    assert list(frame["power_w"]) == [1e-11, 1e-9]
    assert frame["floor_fit"].iloc[1] == result.points[1].fit.floor


def test_ingested_spectra_match_the_synthetic_sweep(reference_system, log_grid_config):
    powers = [1e-12, 1e-10]
    spectra = [
        synthesize(SynthRequest.create(reference_system, log_grid_config.with_power(p), 5, index=i))
        for i, p in enumerate(powers)
    ]
    ingested = analyze_spectra(reference_system, log_grid_config, powers, spectra)
    synthetic = run_sweep(reference_system, log_grid_config, powers, seed=5)
    assert ingested.to_dict() == synthetic.to_dict()
    with pytest.raises(ConfigError):
        analyze_spectra(reference_system, log_grid_config, powers, spectra[:1])
