"""Data models for homogenized energy units."""

from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Optional

import numpy as np


class UnitKind(str, Enum):
    """The five unit kinds of an energy block, in state-vector order."""

    WIND = "wind"
    PV = "pv"
    BATTERY = "battery"
    HYDROGEN = "hydrogen"
    GAS = "gas"

    @property
    def is_renewable(self) -> bool:
        return self in (UnitKind.WIND, UnitKind.PV)

    @property
    def has_storage(self) -> bool:
        return not self.is_renewable


# Efficiency curve: ((power_mw, efficiency), ...) sorted by power
EfficiencyCurve = tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class UnitModel:
    """
    One homogenized energy unit.

    Every kind is described by the same balance
    C·dx = η_ex·ξ − η_gen·p_gen·Δt + η_load·p_load·Δt − w,
    so the fields below are shared by wind farms, PV stations, batteries,
    the hydrogen chain (fuel cell + electrolyzer + tank) and the gas unit.
    Ramp rates are in MW/min; the *_min ramps are the (negative) fastest
    decrease.
    """

    kind: UnitKind
    capacity_mwh: float
    eta_gen: float = 1.0
    eta_load: float = 1.0
    eta_ex: float = 1.0
    p_gen_min_mw: float = 0.0
    p_gen_max_mw: float = 0.0
    p_load_min_mw: float = 0.0
    p_load_max_mw: float = 0.0
    ramp_gen_min_mw_per_min: float = 0.0
    ramp_gen_max_mw_per_min: float = 0.0
    ramp_load_min_mw_per_min: float = 0.0
    ramp_load_max_mw_per_min: float = 0.0
    soc_min: float = 0.0
    soc_max: float = 1.0
    soc_init: float = 0.0
    eta_gen_curve: Optional[EfficiencyCurve] = None
    eta_load_curve: Optional[EfficiencyCurve] = None

    @property
    def has_storage(self) -> bool:
        """True when the unit carries a state of charge (C > 0)."""
        return self.capacity_mwh > 0

    def eta_gen_at(self, p_mw: float) -> float:
        """Output efficiency at a given output power."""
        return _interp_eta(self.eta_gen_curve, p_mw, self.eta_gen)

    def eta_load_at(self, p_mw: float) -> float:
        """Load efficiency at a given load power."""
        return _interp_eta(self.eta_load_curve, p_mw, self.eta_load)

    def disabled(self) -> "UnitModel":
        """Copy with every power bound pinned to zero (unit not installed)."""
        return replace(
            self,
            p_gen_min_mw=0.0,
            p_gen_max_mw=0.0,
            p_load_min_mw=0.0,
            p_load_max_mw=0.0,
        )

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        data = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "kind":
                value = value.value
            elif isinstance(value, tuple):
                value = [list(point) for point in value]
            data[f.name] = value
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "UnitModel":
        """Create UnitModel from dictionary."""
        data = dict(data)
        data["kind"] = UnitKind(data["kind"])
        for curve in ("eta_gen_curve", "eta_load_curve"):
            if data.get(curve) is not None:
                data[curve] = tuple((float(p), float(e)) for p, e in data[curve])
        return cls(**data)


def _interp_eta(curve: Optional[EfficiencyCurve], p_mw: float, default: float) -> float:
    if not curve:
        return default
    powers = np.array([point[0] for point in curve], dtype=float)
    etas = np.array([point[1] for point in curve], dtype=float)
    return float(np.interp(p_mw, powers, etas))


@dataclass(frozen=True)
class UnitState:
    """State of one unit between dispatch steps."""

    soc: float
    last_p_gen_mw: float = 0.0
    last_p_load_mw: float = 0.0


@dataclass(frozen=True)
class UnitControl:
    """Control applied to one unit over one step."""

    p_gen_mw: float = 0.0
    p_load_mw: float = 0.0
    spill_mwh: float = 0.0


@dataclass(frozen=True)
class UnitDisturbance:
    """External energy exchanged over one step (positive = supply)."""

    xi_mwh: float = 0.0


@dataclass(frozen=True)
class ControlBounds:
    """Box bounds on a unit's controls and on their one-step changes."""

    p_gen_min: float
    p_gen_max: float
    p_load_min: float
    p_load_max: float
    spill_min: float
    spill_max: float
    dp_gen_min: float
    dp_gen_max: float
    dp_load_min: float
    dp_load_max: float

    @property
    def is_empty(self) -> bool:
        return (
            self.p_gen_min > self.p_gen_max
            or self.p_load_min > self.p_load_max
            or self.spill_min > self.spill_max
        )


@dataclass(frozen=True)
class EnergyBlock:
    """
    Ordered collection of units plus which of them are installed.

    Excluded kinds stay in the block (the state space always has five
    rows) but act through `effective()` with zero power bounds.
    """

    units: tuple[UnitModel, ...]
    included: frozenset[UnitKind] = field(default_factory=lambda: frozenset(UnitKind))

    def get(self, kind: UnitKind) -> UnitModel:
        for unit in self.units:
            if unit.kind == kind:
                return unit
        raise KeyError(kind)

    def is_included(self, kind: UnitKind) -> bool:
        return kind in self.included

    def effective(self, kind: UnitKind) -> UnitModel:
        """Model as dispatched: excluded units have no power capability."""
        unit = self.get(kind)
        return unit if self.is_included(kind) else unit.disabled()

    def effective_units(self) -> list[UnitModel]:
        return [self.effective(unit.kind) for unit in self.units]
