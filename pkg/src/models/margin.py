"""Data models for flexibility margins, envelopes and indices."""

from dataclasses import asdict, dataclass, fields
from typing import List, Optional

import numpy as np

MARGIN_FIELDS = (
    "ramp_up",
    "ramp_down",
    "power_up",
    "power_down",
    "energy_up",
    "energy_down",
)


@dataclass(frozen=True)
class MarginPoint:
    """
    Flexibility in three dimensions and two directions.

    Ramp in MW/min, power in MW, energy in MWh. All fields are magnitudes;
    the direction is carried by the field name.
    """

    ramp_up: float = 0.0
    ramp_down: float = 0.0
    power_up: float = 0.0
    power_down: float = 0.0
    energy_up: float = 0.0
    energy_down: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in MARGIN_FIELDS], dtype=float)

    @classmethod
    def from_array(cls, values) -> "MarginPoint":
        return cls(*(float(v) for v in values))

    def __add__(self, other: "MarginPoint") -> "MarginPoint":
        return MarginPoint.from_array(self.as_array() + other.as_array())

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BalanceResult:
    """Pass/fail of the balance criterion per dimension and direction."""

    ramp_up: bool
    ramp_down: bool
    power_up: bool
    power_down: bool
    energy_up: bool
    energy_down: bool

    @property
    def passed(self) -> bool:
        return all(getattr(self, f.name) for f in fields(self))

    def failures(self) -> List[str]:
        return [f.name for f in fields(self) if not getattr(self, f.name)]


@dataclass
class Envelope:
    """Provided vs required margin at every step of a trace."""

    minutes: np.ndarray
    provided: List[MarginPoint]
    required: List[MarginPoint]
    dt_h: float
    # (N, 6) shortfall in what was actually delivered (shed, dumped)
    delivered: Optional[np.ndarray] = None

    def __post_init__(self):
        if not (len(self.minutes) == len(self.provided) == len(self.required)):
            raise ValueError("Envelope series must have equal lengths")
        if self.delivered is not None and np.shape(self.delivered) != (len(self.minutes), 6):
            raise ValueError("Delivered shortfalls must be an (N, 6) array")
        if len(self.minutes) > 1 and np.any(np.diff(self.minutes) <= 0):
            raise ValueError("Envelope time must be strictly increasing")

    def __len__(self) -> int:
        return len(self.minutes)

    def shortfalls(self) -> np.ndarray:
        """(N, 6) array of max(required − provided, delivered shortfall, 0)."""
        provided = np.array([p.as_array() for p in self.provided]).reshape(-1, 6)
        required = np.array([r.as_array() for r in self.required]).reshape(-1, 6)
        headroom = np.maximum(required - provided, 0.0)
        if self.delivered is None:
            return headroom
        return np.maximum(headroom, self.delivered)


@dataclass(frozen=True)
class FlexIndices:
    """Insufficiency indices of one run."""

    e_ir: float
    e_io: float
    e_ic: float
    rho: float
    beta: int
    abandonment: float
    utilization: float

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "FlexIndices":
        return cls(**data)
