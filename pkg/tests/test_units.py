from dataclasses import replace

import numpy as np
import pytest

from src.errors import BalanceViolation, SocOutOfRange
from src.models.unit import UnitControl, UnitDisturbance, UnitKind, UnitModel, UnitState
from src.services.scenario_service import DEFAULT_UNITS
from src.services.units import (
    energy_change_mwh,
    feasible_control_bounds,
    initial_state,
    step_unit,
    validate_unit,
)
from tests.conftest import DT_5MIN


def test_battery_charge_step(battery):
    state = UnitState(soc=0.45)
    new = step_unit(battery, state, UnitControl(p_load_mw=10.0), UnitDisturbance(), DT_5MIN)
    assert new.soc == pytest.approx(0.45 + 0.95 * 10.0 * (1.0 / 12.0) / 120.0, abs=1e-12)
    assert new.soc == pytest.approx(0.456597, abs=1e-6)
    assert new.last_p_load_mw == 10.0
    assert new.last_p_gen_mw == 0.0


@pytest.mark.parametrize("kind", list(UnitKind))
def test_idle_step_keeps_soc(kind):
    model = DEFAULT_UNITS[kind]
    state = initial_state(model)
    new = step_unit(model, state, UnitControl(), UnitDisturbance(), DT_5MIN)
    assert new.soc == state.soc


def test_wind_balance_accepted_and_violated():
    wind = replace(DEFAULT_UNITS[UnitKind.WIND], p_gen_max_mw=10.0)
    state = UnitState(soc=0.0)
    ok = step_unit(wind, state, UnitControl(p_gen_mw=4.0, spill_mwh=1.0), UnitDisturbance(5.0), 1.0)
    assert ok.soc == 0.0
    assert ok.last_p_gen_mw == 4.0
    with pytest.raises(BalanceViolation):
        step_unit(wind, state, UnitControl(p_gen_mw=4.0), UnitDisturbance(5.0), 1.0)


def test_soc_out_of_range(battery):
    state = UnitState(soc=0.1)
    with pytest.raises(SocOutOfRange):
        step_unit(battery, state, UnitControl(p_gen_mw=10.0), UnitDisturbance(), 1.0)


def test_nonpositive_dt_rejected(battery):
    with pytest.raises(ValueError):
        step_unit(battery, UnitState(soc=0.5), UnitControl(), UnitDisturbance(), 0.0)


def test_bounds_at_full_battery(battery):
    bounds = feasible_control_bounds(battery, UnitState(soc=battery.soc_max), DT_5MIN)
    assert bounds.p_load_max == 0.0
    assert bounds.p_gen_max == pytest.approx(10.0)


def test_bounds_soc_headroom_not_binding(battery):
    bounds = feasible_control_bounds(battery, UnitState(soc=0.45), DT_5MIN)
    headroom = 0.35 * 120.0 / (0.95 * DT_5MIN)
    assert bounds.p_gen_max == min(10.0, headroom) == 10.0


def test_bounds_gas_ramp():
    gas = DEFAULT_UNITS[UnitKind.GAS]
    bounds = feasible_control_bounds(gas, UnitState(soc=0.5, last_p_gen_mw=5.0), DT_5MIN)
    assert bounds.p_gen_max == pytest.approx(min(gas.p_gen_max_mw, 5.0 + 2.5))
    assert bounds.p_gen_min == pytest.approx(2.5)
    assert bounds.dp_gen_max == pytest.approx(2.5)


def test_bounds_without_ramp():
    gas = DEFAULT_UNITS[UnitKind.GAS]
    bounds = feasible_control_bounds(gas, UnitState(soc=0.5, last_p_gen_mw=5.0), DT_5MIN, include_ramp=False)
    assert bounds.p_gen_min == 0.0
    assert bounds.p_gen_max == gas.p_gen_max_mw


def test_renewable_spill_unbounded():
    bounds = feasible_control_bounds(DEFAULT_UNITS[UnitKind.PV], UnitState(soc=0.0), DT_5MIN)
    assert bounds.spill_max == np.inf
    assert not bounds.is_empty


def test_validate_default_units():
    for model in DEFAULT_UNITS.values():
        assert validate_unit(model) == []


def test_validate_wind_with_storage():
    wind = replace(DEFAULT_UNITS[UnitKind.WIND], capacity_mwh=50.0)
    violations = validate_unit(wind)
    assert any("Wind must have zero storage capacity" in v for v in violations)
    assert violations[0].startswith("wind.capacity_mwh")


def test_validate_efficiency_range(battery):
    violations = validate_unit(replace(battery, eta_gen=1.2))
    assert any("efficiency must lie in (0,1]" in v for v in violations)


def test_validate_soc_init_outside_bounds(battery):
    violations = validate_unit(replace(battery, soc_init=0.95))
    assert violations == ["battery.soc_init: soc_init 0.95 outside [0.1, 0.9]"]


def test_validate_ramp_sign(battery):
    violations = validate_unit(replace(battery, ramp_gen_min_mw_per_min=1.0))
    assert any("ramp_gen" in v for v in violations)


def test_efficiency_curve_interpolation():
    gas = replace(
        DEFAULT_UNITS[UnitKind.GAS],
        eta_gen_curve=((0.0, 0.3), (10.0, 0.5), (30.0, 0.4)),
    )
    assert gas.eta_gen_at(5.0) == pytest.approx(0.4)
    assert gas.eta_gen_at(40.0) == pytest.approx(0.4)
    state = UnitState(soc=0.5, last_p_gen_mw=10.0)
    delta = energy_change_mwh(gas, state, UnitControl(p_gen_mw=6.0), UnitDisturbance(), 1.0)
    assert delta == pytest.approx(-0.5 * 6.0)
    assert validate_unit(gas) == []


def test_unit_model_dict_roundtrip():
    model = replace(DEFAULT_UNITS[UnitKind.HYDROGEN], eta_load_curve=((0.0, 0.6), (30.0, 0.7)))
    assert UnitModel.from_dict(model.to_dict()) == model


def test_energy_conservation_property():
    rng = np.random.default_rng(3)
    for _ in range(200):
        kind = [UnitKind.BATTERY, UnitKind.HYDROGEN, UnitKind.GAS][rng.integers(3)]
        model = DEFAULT_UNITS[kind]
        state = UnitState(soc=rng.uniform(model.soc_min, model.soc_max))
        bounds = feasible_control_bounds(model, state, DT_5MIN, include_ramp=False)
        control = UnitControl(
            p_gen_mw=rng.uniform(bounds.p_gen_min, bounds.p_gen_max),
            p_load_mw=rng.uniform(bounds.p_load_min, bounds.p_load_max) if rng.random() < 0.5 else 0.0,
        )
        new = step_unit(model, state, control, UnitDisturbance(), DT_5MIN)
        residual = model.capacity_mwh * (new.soc - state.soc) - energy_change_mwh(
            model, state, control, UnitDisturbance(), DT_5MIN
        )
        assert abs(residual) <= 1e-9
        assert model.soc_min - 1e-9 <= new.soc <= model.soc_max + 1e-9


def test_spill_sign_property():
    rng = np.random.default_rng(5)
    pv = DEFAULT_UNITS[UnitKind.PV]
    for _ in range(200):
        xi = rng.uniform(0.0, 5.0)
        p = rng.uniform(0.0, xi / DT_5MIN)
        spill = xi - p * DT_5MIN
        assert spill >= 0.0
        assert xi - spill >= 0.0
        step_unit(pv, UnitState(soc=0.0), UnitControl(p_gen_mw=p, spill_mwh=spill), UnitDisturbance(xi), DT_5MIN)


def test_enlarging_bounds_never_shrinks_box(battery):
    state = UnitState(soc=0.5, last_p_gen_mw=3.0, last_p_load_mw=0.0)
    small = feasible_control_bounds(battery, state, DT_5MIN)
    large = feasible_control_bounds(replace(battery, p_gen_max_mw=20.0, p_load_max_mw=20.0), state, DT_5MIN)
    assert large.p_gen_max >= small.p_gen_max
    assert large.p_load_max >= small.p_load_max
    assert large.p_gen_min <= small.p_gen_min
