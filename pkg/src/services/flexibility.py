"""Flexibility margins, the balance criterion and insufficiency indices."""

import logging
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

from ..config import POWER_BALANCE_TOL
from ..errors import DivisionByZero, IndexOutOfRange, LengthMismatch
from ..models.margin import MARGIN_FIELDS, BalanceResult, Envelope, FlexIndices, MarginPoint
from ..models.trace import DispatchTrace
from ..models.unit import EnergyBlock, UnitState
from .units import feasible_control_bounds

logger = logging.getLogger(__name__)


def net_load(eload_mw: Sequence[float], renewable_avail_mw: Sequence[float], t: int) -> float:
    """
    Renewable availability minus electric load at step t.

    Negative values are a deficit (upward flexibility needed), positive
    values a surplus (downward flexibility needed).
    """
    if not (0 <= t < len(eload_mw) and t < len(renewable_avail_mw)):
        raise IndexOutOfRange(f"t={t} outside series of length {min(len(eload_mw), len(renewable_avail_mw))}")
    return float(renewable_avail_mw[t]) - float(eload_mw[t])


def net_load_series(eload_mw: Sequence[float], renewable_avail_mw: Sequence[float]) -> np.ndarray:
    eload = np.asarray(eload_mw, dtype=float)
    avail = np.asarray(renewable_avail_mw, dtype=float)
    if eload.shape != avail.shape:
        raise LengthMismatch(f"load has {eload.size} samples, renewables {avail.size}")
    return avail - eload


def provided_margin(block: EnergyBlock, states: Sequence[UnitState], dt_h: float) -> MarginPoint:
    """
    Flexibility the block can offer from its current operating point.

    Upward resources are storage discharge, fuel cell, gas unit and
    dropping load-side consumption. Downward resources are charging,
    electrolysis, backing off generation and curtailing renewables, the
    last counted as unlimited down to zero renewable output.
    """
    if len(states) != len(block.units):
        raise LengthMismatch(f"{len(states)} states for {len(block.units)} units")

    dt_min = dt_h * 60.0
    totals = np.zeros(6)

    for unit, state in zip(block.units, states):
        model = block.effective(unit.kind)

        if model.kind.is_renewable:
            output = max(state.last_p_gen_mw, 0.0)
            totals += [0.0, output / dt_min, 0.0, output, 0.0, output * dt_h]
            continue

        bounds = feasible_control_bounds(model, state, dt_h, include_ramp=False)
        up_gen = max(bounds.p_gen_max - state.last_p_gen_mw, 0.0)
        up_load = max(state.last_p_load_mw - model.p_load_min_mw, 0.0)
        down_gen = max(state.last_p_gen_mw - model.p_gen_min_mw, 0.0)
        down_load = max(bounds.p_load_max - state.last_p_load_mw, 0.0)

        ramp_up = min(model.ramp_gen_max_mw_per_min, up_gen / dt_min) + min(
            -model.ramp_load_min_mw_per_min, up_load / dt_min
        )
        ramp_down = min(-model.ramp_gen_min_mw_per_min, down_gen / dt_min) + min(
            model.ramp_load_max_mw_per_min, down_load / dt_min
        )

        energy_up = energy_down = 0.0
        if model.has_storage and model.p_gen_max_mw > 0:
            energy_up = max(state.soc - model.soc_min, 0.0) * model.capacity_mwh * model.eta_gen_at(
                state.last_p_gen_mw
            )
        if model.has_storage and model.p_load_max_mw > 0:
            energy_down = (
                max(model.soc_max - state.soc, 0.0)
                * model.capacity_mwh
                / model.eta_load_at(state.last_p_load_mw)
            )

        totals += [ramp_up, ramp_down, up_gen + up_load, down_gen + down_load, energy_up, energy_down]

    return MarginPoint.from_array(totals)


def required_margin(net_load_mw: Sequence[float], t: int, dt_h: float) -> MarginPoint:
    """
    Flexibility demanded by the net load at step t.

    Power is |net(t)|, ramp is |net(t+1) − net(t)| per minute, energy is
    the trapezoid of net load over [t, t+1]. At the last sample the
    series is held, so ramp is zero and energy is net(t)·Δt.
    """
    n = len(net_load_mw)
    if not 0 <= t < n:
        raise IndexOutOfRange(f"t={t} outside net load series of length {n}")

    current = float(net_load_mw[t])
    following = float(net_load_mw[t + 1]) if t + 1 < n else current
    change_per_min = (following - current) / (dt_h * 60.0)
    energy = 0.5 * (current + following) * dt_h

    return MarginPoint(
        ramp_up=max(-change_per_min, 0.0),
        ramp_down=max(change_per_min, 0.0),
        power_up=max(-current, 0.0),
        power_down=max(current, 0.0),
        energy_up=max(-energy, 0.0),
        energy_down=max(energy, 0.0),
    )


def balance_check(provided: MarginPoint, required: MarginPoint) -> BalanceResult:
    """Each dimension/direction passes iff provided >= required."""
    flags = provided.as_array() >= required.as_array()
    return BalanceResult(*(bool(flag) for flag in flags))


def delivered_shortfall(trace: DispatchTrace) -> np.ndarray:
    """
    (N, 6) shortfall in what the block actually delivered.

    Shed load is missing upward power (MW) and energy over the step (MWh).
    Surplus the block did not absorb, dumped power plus curtailed
    renewables, is the downward counterpart. Ramp columns stay zero.
    Values below the power-balance tolerance count as zero.
    """
    dt_h = trace.dt_h
    shed = np.asarray(trace.shed_mw, dtype=float)
    surplus = np.asarray(trace.dump_mw, dtype=float) + trace.spill_mwh.sum(axis=1) / dt_h
    shed = np.where(shed >= POWER_BALANCE_TOL, shed, 0.0)
    surplus = np.where(surplus >= POWER_BALANCE_TOL, surplus, 0.0)

    out = np.zeros((len(trace), len(MARGIN_FIELDS)))
    out[:, MARGIN_FIELDS.index("power_up")] = shed
    out[:, MARGIN_FIELDS.index("power_down")] = surplus
    out[:, MARGIN_FIELDS.index("energy_up")] = shed * dt_h
    out[:, MARGIN_FIELDS.index("energy_down")] = surplus * dt_h
    return out


def build_envelope(trace: DispatchTrace, net_load_mw: Sequence[float], dt_h: float) -> Envelope:
    """Pair the trace's provided margins with the required ones."""
    if len(net_load_mw) != len(trace):
        raise LengthMismatch(f"trace has {len(trace)} steps, net load {len(net_load_mw)}")
    required = [required_margin(net_load_mw, t, dt_h) for t in range(len(trace))]
    return Envelope(
        minutes=np.asarray(trace.minutes, dtype=float),
        provided=trace.provided_points(),
        required=required,
        dt_h=dt_h,
        delivered=delivered_shortfall(trace),
    )


def compute_indices(trace: DispatchTrace, net_load_mw: Sequence[float], dt_h: float) -> FlexIndices:
    """
    Ramp, output and energy insufficiency indices of a trace.

    Each index is ρ·Σ_t shortfall_t with ρ = β/N_T. A step's shortfall is
    the larger of the headroom gap (required − provided) and what went
    undelivered (shed load, dumped or curtailed surplus), summed over both
    directions; β counts the steps where the balance criterion fails or something went
    undelivered.
    """
    envelope = build_envelope(trace, net_load_mw, dt_h)
    n_t = len(envelope)
    if n_t == 0:
        raise LengthMismatch("cannot compute indices of an empty trace")

    shortfalls = envelope.shortfalls()
    undelivered = envelope.delivered.any(axis=1)
    failed = [
        not balance_check(p, r).passed or bool(missed)
        for p, r, missed in zip(envelope.provided, envelope.required, undelivered)
    ]
    beta = int(sum(failed))
    rho = beta / n_t

    totals = shortfalls.sum(axis=0)
    e_ir = rho * float(totals[0] + totals[1])
    e_io = rho * float(totals[2] + totals[3])
    e_ic = rho * float(totals[4] + totals[5])

    try:
        abandonment = abandonment_rate(trace)
        utilization = utilization_rate(trace)
    except DivisionByZero:
        logger.warning("No renewable energy in trace; abandonment reported as 0")
        abandonment = utilization = 0.0

    logger.info(f"Indices: E_IR={e_ir:.4f} E_IO={e_io:.4f} E_IC={e_ic:.4f} rho={rho:.4f}")

    return FlexIndices(
        e_ir=e_ir,
        e_io=e_io,
        e_ic=e_ic,
        rho=rho,
        beta=beta,
        abandonment=abandonment,
        utilization=utilization,
    )


def abandonment_rate(trace: DispatchTrace) -> float:
    """Spilled renewable energy over available renewable energy."""
    used = np.maximum(trace.renewable_gen_mw, 0.0) * trace.dt_h
    spilled = np.maximum(trace.spill_mwh, 0.0)
    available = float(used.sum() + spilled.sum())
    if available <= 0.0:
        raise DivisionByZero("trace holds no renewable energy")
    return float(spilled.sum()) / available


def utilization_rate(trace: DispatchTrace) -> float:
    """Mean per-step, per-source share of available renewable energy that was used."""
    used = np.maximum(trace.renewable_gen_mw, 0.0) * trace.dt_h
    available = used + np.maximum(trace.spill_mwh, 0.0)
    mask = available > 0.0
    if not mask.any():
        raise DivisionByZero("trace holds no renewable energy")
    return float(np.mean(used[mask] / available[mask]))


def summarize_envelope(envelope: Envelope) -> Dict[str, dict]:
    """Largest shortfall per dimension and direction, with when it happened."""
    shortfalls = envelope.shortfalls()
    summary: Dict[str, dict] = {}
    for i, name in enumerate(MARGIN_FIELDS):
        if len(envelope) == 0:
            summary[name] = {"value": 0.0, "minute": None}
            continue
        k = int(np.argmax(shortfalls[:, i]))
        summary[name] = {"value": float(shortfalls[k, i]), "minute": float(envelope.minutes[k])}
    return summary


def envelope_frame_columns() -> List[str]:
    return (
        ["time"]
        + [f"provided_{name}" for name in MARGIN_FIELDS]
        + [f"required_{name}" for name in MARGIN_FIELDS]
    )


def write_envelope_csv(envelope: Envelope, path: str | Path) -> Path:
    """Write provided and required margins per step."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    provided = np.array([p.as_array() for p in envelope.provided]).reshape(-1, 6)
    required = np.array([r.as_array() for r in envelope.required]).reshape(-1, 6)
    data = {"time": envelope.minutes}
    for i, name in enumerate(MARGIN_FIELDS):
        data[f"provided_{name}"] = provided[:, i]
    for i, name in enumerate(MARGIN_FIELDS):
        data[f"required_{name}"] = required[:, i]
    pd.DataFrame(data, columns=envelope_frame_columns()).to_csv(path, index=False, lineterminator="\n")
    return path
