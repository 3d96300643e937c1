"""Static SVG charts of a dispatch run and of a penetration sweep."""

import logging
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

import numpy as np  # noqa: E402

from ..models.margin import MARGIN_FIELDS, Envelope  # noqa: E402
from ..models.trace import DispatchTrace  # noqa: E402

logger = logging.getLogger(__name__)

# Fixed salt and no timestamp keep the SVG bytes reproducible
matplotlib.rcParams["svg.hashsalt"] = "flexblock"
_SVG_METADATA = {"Date": None}

_UNITS = {"ramp": "MW/min", "power": "MW", "energy": "MWh"}


def _save(fig: Figure, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata=_SVG_METADATA)
    logger.info(f"Wrote {path}")
    return path


def plot_dispatch(trace: DispatchTrace, path: str | Path) -> Path:
    """
    Dispatch stack: generation above zero, consumption below, load on top.

    Args:
        trace: Dispatch run
        path: Output SVG file

    Returns:
        Path of the written file
    """
    hours = np.asarray(trace.minutes) / 60.0
    u = trace.controls
    fig = Figure(figsize=(11, 7))
    ax_power, ax_soc = fig.subplots(2, 1, sharex=True, gridspec_kw={"height_ratios": [2, 1]})

    supply = [
        ("Wind", u[:, 0]),
        ("PV", u[:, 1]),
        ("Battery discharge", u[:, 2]),
        ("Fuel cell", u[:, 4]),
        ("Gas unit", u[:, 6]),
        ("Shed load", trace.shed_mw),
    ]
    demand = [("Battery charge", -u[:, 3]), ("Electrolyzer", -u[:, 5]), ("Dumped", -trace.dump_mw)]

    ax_power.stackplot(hours, *[series for _, series in supply], labels=[name for name, _ in supply], step="post")
    ax_power.stackplot(hours, *[series for _, series in demand], labels=[name for name, _ in demand], step="post")
    ax_power.step(hours, trace.eload_mw, where="post", color="black", linewidth=1.0, label="Electric load")
    ax_power.set_ylabel("Power (MW)")
    ax_power.legend(loc="upper left", ncol=3, fontsize="small")
    ax_power.grid(True, alpha=0.3)

    for column, label in ((2, "Battery SOC"), (3, "H2 tank SOC"), (4, "Gas store SOC")):
        ax_soc.plot(hours, trace.states[:, column], label=label)
    ax_soc.set_ylabel("SOC")
    ax_soc.set_xlabel("Time (h)")
    ax_soc.set_ylim(0.0, 1.0)
    ax_soc.legend(loc="upper left", ncol=3, fontsize="small")
    ax_soc.grid(True, alpha=0.3)

    fig.tight_layout()
    return _save(fig, Path(path))


def plot_envelope(envelope: Envelope, path: str | Path) -> Path:
    """
    Provided vs required margin for each dimension.

    Upward quantities are drawn above zero and downward ones below, so
    shortfalls show where the required line leaves the provided band.
    """
    hours = np.asarray(envelope.minutes) / 60.0
    provided = np.array([p.as_array() for p in envelope.provided]).reshape(-1, 6)
    required = np.array([r.as_array() for r in envelope.required]).reshape(-1, 6)

    fig = Figure(figsize=(11, 9))
    axes = fig.subplots(3, 1, sharex=True)
    for ax, (dimension, unit) in zip(axes, _UNITS.items()):
        up = MARGIN_FIELDS.index(f"{dimension}_up")
        down = MARGIN_FIELDS.index(f"{dimension}_down")
        ax.fill_between(hours, -provided[:, down], provided[:, up], step="post", alpha=0.3, label="Provided")
        ax.step(hours, required[:, up], where="post", color="tab:red", linewidth=0.8, label="Required")
        ax.step(hours, -required[:, down], where="post", color="tab:red", linewidth=0.8)
        ax.axhline(0.0, color="black", linewidth=0.5)
        ax.set_ylabel(f"{dimension.title()} ({unit})")
        ax.grid(True, alpha=0.3)
    axes[0].legend(loc="upper left", fontsize="small")
    axes[-1].set_xlabel("Time (h)")

    fig.tight_layout()
    return _save(fig, Path(path))


def plot_abandonment(ratios: Sequence[float], abandonment: Sequence[float], path: str | Path) -> Path:
    """Renewable abandonment rate against added penetration."""
    ratios = np.asarray(ratios, dtype=float)
    rates = np.asarray(abandonment, dtype=float)

    fig = Figure(figsize=(7, 4.5))
    ax = fig.subplots()
    ax.plot(ratios * 100.0, rates * 100.0, marker="o")
    ax.set_xlabel("Added renewable access (%)")
    ax.set_ylabel("Abandonment rate (%)")
    ax.grid(True, alpha=0.3)

    fig.tight_layout()
    return _save(fig, Path(path))
