"""Result model for a completed scenario run."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict

from .margin import FlexIndices


@dataclass
class RunReport:
    """Summary of one run, in the layout of a per-scenario indicator table."""

    scenario: str
    indices: FlexIndices
    max_shortfalls: Dict[str, dict]
    curtailed_mwh: float
    shed_mwh: float
    dumped_mwh: float
    h2_unserved_mwh: float
    flagged_steps: int
    artifacts: Dict[str, Path] = field(default_factory=dict)

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {
            "scenario": self.scenario,
            "indices": self.indices.to_dict(),
            "max_shortfalls": self.max_shortfalls,
            "curtailed_mwh": self.curtailed_mwh,
            "shed_mwh": self.shed_mwh,
            "dumped_mwh": self.dumped_mwh,
            "h2_unserved_mwh": self.h2_unserved_mwh,
            "flagged_steps": self.flagged_steps,
            "artifacts": {name: str(path) for name, path in self.artifacts.items()},
        }

    def format_table(self) -> str:
        """Plain-text indicator table for standard output."""
        idx = self.indices
        rows = [
            ("Scenario", self.scenario),
            ("E_IR (MW/min)", f"{idx.e_ir:.3f}"),
            ("E_IO (MW)", f"{idx.e_io:.3f}"),
            ("E_IC (MWh)", f"{idx.e_ic:.3f}"),
            ("rho", f"{idx.rho:.4f}"),
            ("Abandonment", f"{idx.abandonment:.2%}"),
            ("Curtailed (MWh)", f"{self.curtailed_mwh:.2f}"),
            ("Shed (MWh)", f"{self.shed_mwh:.2f}"),
            ("H2 unserved (MWh)", f"{self.h2_unserved_mwh:.2f}"),
            ("Flagged steps", str(self.flagged_steps)),
        ]
        width = max(len(label) for label, _ in rows)
        return "\n".join(f"{label:<{width}}  {value}" for label, value in rows)
