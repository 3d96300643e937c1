"""Data models for time-series inputs of an energy block."""

from dataclasses import dataclass

import numpy as np

PROFILE_COLUMNS = ("minute", "wind_mw", "pv_mw", "eload_mw", "h2_mwh", "gas_mwh")


@dataclass(frozen=True)
class Profiles:
    """
    Aligned input series at a fixed step.

    h2_mwh is the hydrogen demand per step as a magnitude (it enters the
    tank as ξ_h = −h2_mwh); gas_mwh is the gas supply per step (ξ_f).
    """

    step_minutes: float
    wind_avail_mw: np.ndarray
    pv_avail_mw: np.ndarray
    eload_mw: np.ndarray
    h2_demand_mwh: np.ndarray
    gas_supply_mwh: np.ndarray
    start_minute: float = 0.0

    def __post_init__(self):
        for name in ("wind_avail_mw", "pv_avail_mw", "eload_mw", "h2_demand_mwh", "gas_supply_mwh"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    def __len__(self) -> int:
        return len(self.eload_mw)

    @property
    def dt_h(self) -> float:
        return self.step_minutes / 60.0

    @property
    def minutes(self) -> np.ndarray:
        return self.start_minute + self.step_minutes * np.arange(len(self))

    @property
    def renewable_avail_mw(self) -> np.ndarray:
        return self.wind_avail_mw + self.pv_avail_mw

    def window(self, start: int, length: int) -> "Profiles":
        """Slice [start, start+length), holding the last value past the end."""
        idx = np.minimum(np.arange(start, start + length), len(self) - 1)
        return Profiles(
            step_minutes=self.step_minutes,
            wind_avail_mw=self.wind_avail_mw[idx],
            pv_avail_mw=self.pv_avail_mw[idx],
            eload_mw=self.eload_mw[idx],
            h2_demand_mwh=self.h2_demand_mwh[idx],
            gas_supply_mwh=self.gas_supply_mwh[idx],
            start_minute=self.start_minute + start * self.step_minutes,
        )

    def equals(self, other: "Profiles") -> bool:
        return (
            self.step_minutes == other.step_minutes
            and self.start_minute == other.start_minute
            and all(
                np.array_equal(getattr(self, name), getattr(other, name))
                for name in ("wind_avail_mw", "pv_avail_mw", "eload_mw", "h2_demand_mwh", "gas_supply_mwh")
            )
        )


@dataclass(frozen=True)
class SynthesisSpec:
    """Parameters of the synthetic profile generator."""

    hours: float = 336.0
    step_minutes: float = 5.0
    wind_peak_mw: float = 60.0
    pv_peak_mw: float = 60.0
    load_base_mw: float = 28.0
    load_morning_peak_mw: float = 18.0
    load_evening_peak_mw: float = 24.0
    h2_kg_per_hour: float = 60.0
    gas_mwh_per_step: float = 1.0
    calm_night_probability: float = 0.35

    @property
    def n_steps(self) -> int:
        return int(round(self.hours * 60.0 / self.step_minutes))
