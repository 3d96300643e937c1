"""Data model for a scenario document."""

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .profiles import SynthesisSpec
from .unit import UnitKind


@dataclass(frozen=True)
class ScenarioSpec:
    """One scenario: which units are installed, which profiles drive them."""

    name: str
    units: frozenset[UnitKind]
    profiles_path: Optional[Path] = None
    synthesis: Optional[SynthesisSpec] = None
    seed: int = 0
    penetration_scale: float = 0.0
    penetration_sources: tuple[str, ...] = ("wind", "pv")
    run_hours: float = 336.0
    step_minutes: float = 5.0
    mpc_overrides: dict = field(default_factory=dict)
    unit_overrides: dict = field(default_factory=dict)
    source_path: Optional[Path] = None

    @property
    def n_steps(self) -> int:
        return int(round(self.run_hours * 60.0 / self.step_minutes))

    def with_seed(self, seed: int) -> "ScenarioSpec":
        return replace(self, seed=seed)

    def with_penetration(self, ratio: float, sources: tuple[str, ...] = ("wind", "pv")) -> "ScenarioSpec":
        return replace(self, penetration_scale=ratio, penetration_sources=sources)

    def with_forecast(self, forecast: str) -> "ScenarioSpec":
        return replace(self, mpc_overrides={**self.mpc_overrides, "forecast": forecast})

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "name": self.name,
            "units": sorted(kind.value for kind in self.units),
            "profiles_path": str(self.profiles_path) if self.profiles_path else None,
            "seed": self.seed,
            "penetration_scale": self.penetration_scale,
            "penetration_sources": list(self.penetration_sources),
            "run_hours": self.run_hours,
            "step_minutes": self.step_minutes,
            "mpc": dict(self.mpc_overrides),
        }
