import json

import numpy as np
import pytest

from src.models.profiles import Profiles
from src.models.unit import EnergyBlock, UnitKind, UnitModel
from src.services.scenario_service import DEFAULT_UNITS

DT_5MIN = 5.0 / 60.0


def make_block(*kinds: UnitKind, **overrides) -> EnergyBlock:
    """Block of the default units with `kinds` installed (all when empty)."""
    units = []
    for kind in UnitKind:
        model = DEFAULT_UNITS[kind]
        if kind.value in overrides:
            model = UnitModel.from_dict({**model.to_dict(), **overrides[kind.value]})
        units.append(model)
    included = frozenset(kinds) if kinds else frozenset(UnitKind)
    return EnergyBlock(units=tuple(units), included=included)


def constant_profiles(
    n: int,
    wind: float = 0.0,
    pv: float = 0.0,
    eload: float = 0.0,
    h2: float = 0.0,
    gas: float = 0.0,
    step_minutes: float = 5.0,
) -> Profiles:
    return Profiles(
        step_minutes=step_minutes,
        wind_avail_mw=np.full(n, wind),
        pv_avail_mw=np.full(n, pv),
        eload_mw=np.full(n, eload),
        h2_demand_mwh=np.full(n, h2),
        gas_supply_mwh=np.full(n, gas),
    )


@pytest.fixture
def default_block() -> EnergyBlock:
    return make_block()


@pytest.fixture
def battery() -> UnitModel:
    return DEFAULT_UNITS[UnitKind.BATTERY]


@pytest.fixture
def small_profiles() -> Profiles:
    """Two hours of a load ramp against steady renewables."""
    n = 24
    return Profiles(
        step_minutes=5.0,
        wind_avail_mw=np.full(n, 20.0),
        pv_avail_mw=np.linspace(0.0, 15.0, n),
        eload_mw=np.linspace(30.0, 40.0, n),
        h2_demand_mwh=np.full(n, 0.15),
        gas_supply_mwh=np.full(n, 1.0),
    )


@pytest.fixture
def scenario_file(tmp_path):
    """Full-block scenario on two hours of synthesized profiles."""

    def write(**fields):
        document = {
            "name": "test_block",
            "units": ["wind", "pv", "battery", "hydrogen", "gas"],
            "profiles": {"synthesize": {}},
            "seed": 11,
            "run_hours": 2,
            "step_minutes": 5,
            "mpc": {"n_p": 6, "n_c": 3},
        }
        document.update(fields)
        path = tmp_path / f"{document['name']}.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return write
