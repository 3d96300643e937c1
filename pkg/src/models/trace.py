"""Data model for a recorded receding-horizon dispatch."""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from .control import CONTROL_NAMES, DISTURBANCE_NAMES, STATE_NAMES
from .margin import MARGIN_FIELDS, MarginPoint

# Fixed leading column order of trace.csv
TRACE_COLUMNS = (
    ["minute", *STATE_NAMES, *CONTROL_NAMES, *DISTURBANCE_NAMES]
    + ["shed_mw", "spill_w", "spill_pv", "qp_status"]
)
EXTRA_COLUMNS = ["dump_mw", "eload_mw", "net_load_mw", "h2_unserved_mwh"] + [
    f"provided_{name}" for name in MARGIN_FIELDS
]

W_W, W_PV = CONTROL_NAMES.index("w_w"), CONTROL_NAMES.index("w_pv")
P_GEN_W, P_GEN_PV = CONTROL_NAMES.index("p_gen_w"), CONTROL_NAMES.index("p_gen_pv")


@dataclass
class DispatchTrace:
    """
    Per-step record of a dispatch run.

    Row k holds x(k) (the state the step started from), u(k) and the
    applied disturbance ξ(k) in MWh; `final_state` is x(N).
    """

    dt_h: float
    minutes: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    disturbances: np.ndarray
    shed_mw: np.ndarray
    dump_mw: np.ndarray
    eload_mw: np.ndarray
    net_load_mw: np.ndarray
    h2_unserved_mwh: np.ndarray
    provided: np.ndarray
    qp_status: List[str]
    final_state: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.minutes)

    @property
    def spill_mwh(self) -> np.ndarray:
        """(N, 2) spilled wind and PV energy."""
        return self.controls[:, [W_W, W_PV]]

    @property
    def renewable_gen_mw(self) -> np.ndarray:
        """(N, 2) wind and PV output power."""
        return self.controls[:, [P_GEN_W, P_GEN_PV]]

    @property
    def served_eload_mw(self) -> np.ndarray:
        return self.eload_mw - self.shed_mw

    @property
    def h2_served_mwh(self) -> np.ndarray:
        xi_h = self.disturbances[:, DISTURBANCE_NAMES.index("xi_h")]
        return np.maximum(-xi_h, 0.0)

    @property
    def flagged(self) -> np.ndarray:
        return np.array([status == "held" for status in self.qp_status], dtype=bool)

    def provided_points(self) -> List[MarginPoint]:
        return [MarginPoint.from_array(row) for row in self.provided]

    def next_states(self) -> np.ndarray:
        """x(k+1) for every recorded step."""
        tail = self.final_state if self.final_state is not None else self.states[-1]
        return np.vstack([self.states[1:], tail.reshape(1, -1)])

    def to_frame(self) -> pd.DataFrame:
        """Trace as a DataFrame in the fixed CSV column order."""
        data = {"minute": self.minutes}
        for i, name in enumerate(STATE_NAMES):
            data[name] = self.states[:, i]
        for i, name in enumerate(CONTROL_NAMES):
            data[name] = self.controls[:, i]
        for i, name in enumerate(DISTURBANCE_NAMES):
            data[name] = self.disturbances[:, i]
        data["shed_mw"] = self.shed_mw
        data["spill_w"] = self.controls[:, W_W]
        data["spill_pv"] = self.controls[:, W_PV]
        data["qp_status"] = list(self.qp_status)
        data["dump_mw"] = self.dump_mw
        data["eload_mw"] = self.eload_mw
        data["net_load_mw"] = self.net_load_mw
        data["h2_unserved_mwh"] = self.h2_unserved_mwh
        for i, name in enumerate(MARGIN_FIELDS):
            data[f"provided_{name}"] = self.provided[:, i]
        return pd.DataFrame(data, columns=TRACE_COLUMNS + EXTRA_COLUMNS)

    @classmethod
    def from_frame(cls, df: pd.DataFrame, dt_h: Optional[float] = None) -> "DispatchTrace":
        """Rebuild a trace from `to_frame` output."""
        minutes = df["minute"].to_numpy(dtype=float)
        if dt_h is None:
            if len(minutes) < 2:
                raise ValueError("dt_h is required for traces shorter than two steps")
            dt_h = float(minutes[1] - minutes[0]) / 60.0
        return cls(
            dt_h=dt_h,
            minutes=minutes,
            states=df[list(STATE_NAMES)].to_numpy(dtype=float),
            controls=df[list(CONTROL_NAMES)].to_numpy(dtype=float),
            disturbances=df[list(DISTURBANCE_NAMES)].to_numpy(dtype=float),
            shed_mw=df["shed_mw"].to_numpy(dtype=float),
            dump_mw=df["dump_mw"].to_numpy(dtype=float),
            eload_mw=df["eload_mw"].to_numpy(dtype=float),
            net_load_mw=df["net_load_mw"].to_numpy(dtype=float),
            h2_unserved_mwh=df["h2_unserved_mwh"].to_numpy(dtype=float),
            provided=df[[f"provided_{name}" for name in MARGIN_FIELDS]].to_numpy(dtype=float),
            qp_status=[str(s) for s in df["qp_status"]],
        )

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, lineterminator="\n")
        return path

    @classmethod
    def read_csv(cls, path: str | Path, dt_h: Optional[float] = None) -> "DispatchTrace":
        df = pd.read_csv(path, float_precision="round_trip")
        return cls.from_frame(df, dt_h=dt_h)
