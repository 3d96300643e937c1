"""Homogenized unit dynamics and feasibility bounds."""

import logging
import math
from typing import List

from ..config import BALANCE_TOL
from ..errors import BalanceViolation, SocOutOfRange
from ..models.unit import (
    ControlBounds,
    UnitControl,
    UnitDisturbance,
    UnitKind,
    UnitModel,
    UnitState,
)

logger = logging.getLogger(__name__)

# SOC tolerance for bound checks; one BALANCE_TOL of energy on a 1 MWh store
SOC_TOL = 1e-9


def energy_change_mwh(
    model: UnitModel,
    state: UnitState,
    control: UnitControl,
    dist: UnitDisturbance,
    dt_h: float,
) -> float:
    """Right-hand side of C·dx = η_ex·ξ − η_gen·p_gen·Δt + η_load·p_load·Δt − w."""
    eta_gen = model.eta_gen_at(state.last_p_gen_mw)
    eta_load = model.eta_load_at(state.last_p_load_mw)
    return (
        model.eta_ex * dist.xi_mwh
        - eta_gen * control.p_gen_mw * dt_h
        + eta_load * control.p_load_mw * dt_h
        - control.spill_mwh
    )


def step_unit(
    model: UnitModel,
    state: UnitState,
    control: UnitControl,
    dist: UnitDisturbance,
    dt_h: float,
) -> UnitState:
    """
    Advance one unit by one dispatch interval.

    Args:
        model: Unit parameters
        state: State at the start of the interval
        control: Powers (MW) and spill (MWh) held over the interval
        dist: External energy over the interval (MWh)
        dt_h: Interval length in hours

    Returns:
        State at the end of the interval

    Raises:
        BalanceViolation: zero-capacity unit whose inflow is not used or spilled
        SocOutOfRange: the update leaves [soc_min, soc_max]
    """
    if dt_h <= 0:
        raise ValueError(f"dt_h must be positive, got {dt_h}")

    delta = energy_change_mwh(model, state, control, dist, dt_h)

    if not model.has_storage:
        if abs(delta) > BALANCE_TOL:
            raise BalanceViolation(
                f"{model.kind.value}: balance residual {delta:.3e} MWh exceeds {BALANCE_TOL:g}"
            )
        soc = state.soc
    else:
        soc = state.soc + delta / model.capacity_mwh
        if soc < model.soc_min - SOC_TOL or soc > model.soc_max + SOC_TOL:
            raise SocOutOfRange(
                f"{model.kind.value}: SOC {soc:.6f} outside [{model.soc_min}, {model.soc_max}]"
            )

    return UnitState(
        soc=soc,
        last_p_gen_mw=control.p_gen_mw,
        last_p_load_mw=control.p_load_mw,
    )


def feasible_control_bounds(
    model: UnitModel,
    state: UnitState,
    dt_h: float,
    include_ramp: bool = True,
) -> ControlBounds:
    """
    Box bounds on (p_gen, p_load, spill) for the next interval.

    Intersects the static power bounds (commitment fixed on), the ramp
    bounds relative to the last powers and the SOC headroom: p_gen may
    not drain the store below soc_min, p_load may not fill it past soc_max.
    With include_ramp=False the ramp part is skipped.
    """
    dt_min = dt_h * 60.0
    p_gen_lo, p_gen_hi = model.p_gen_min_mw, model.p_gen_max_mw
    p_load_lo, p_load_hi = model.p_load_min_mw, model.p_load_max_mw

    if model.has_storage:
        eta_gen = model.eta_gen_at(state.last_p_gen_mw)
        eta_load = model.eta_load_at(state.last_p_load_mw)
        discharge_mwh = max(state.soc - model.soc_min, 0.0) * model.capacity_mwh
        charge_mwh = max(model.soc_max - state.soc, 0.0) * model.capacity_mwh
        if eta_gen > 0:
            p_gen_hi = min(p_gen_hi, discharge_mwh / (eta_gen * dt_h))
        if eta_load > 0:
            p_load_hi = min(p_load_hi, charge_mwh / (eta_load * dt_h))

    dp_gen_lo = model.ramp_gen_min_mw_per_min * dt_min
    dp_gen_hi = model.ramp_gen_max_mw_per_min * dt_min
    dp_load_lo = model.ramp_load_min_mw_per_min * dt_min
    dp_load_hi = model.ramp_load_max_mw_per_min * dt_min

    if include_ramp:
        p_gen_lo = max(p_gen_lo, state.last_p_gen_mw + dp_gen_lo)
        p_gen_hi = min(p_gen_hi, state.last_p_gen_mw + dp_gen_hi)
        p_load_lo = max(p_load_lo, state.last_p_load_mw + dp_load_lo)
        p_load_hi = min(p_load_hi, state.last_p_load_mw + dp_load_hi)

    spill_hi = math.inf if model.kind.is_renewable else 0.0

    return ControlBounds(
        p_gen_min=p_gen_lo,
        p_gen_max=p_gen_hi,
        p_load_min=p_load_lo,
        p_load_max=p_load_hi,
        spill_min=0.0,
        spill_max=spill_hi,
        dp_gen_min=dp_gen_lo,
        dp_gen_max=dp_gen_hi,
        dp_load_min=dp_load_lo,
        dp_load_max=dp_load_hi,
    )


def validate_unit(model: UnitModel) -> List[str]:
    """
    Check every UnitModel invariant.

    Returns:
        One message per broken rule, naming the field; empty when valid
    """
    violations: List[str] = []
    kind = model.kind.value

    for name in ("eta_gen", "eta_load", "eta_ex"):
        value = getattr(model, name)
        if not 0.0 < value <= 1.0:
            violations.append(f"{kind}.{name}: efficiency must lie in (0,1], got {value}")
    for name in ("eta_gen_curve", "eta_load_curve"):
        curve = getattr(model, name)
        if curve:
            powers = [p for p, _ in curve]
            if powers != sorted(powers):
                violations.append(f"{kind}.{name}: curve powers must be increasing")
            if any(not 0.0 < eta <= 1.0 for _, eta in curve):
                violations.append(f"{kind}.{name}: efficiency must lie in (0,1]")

    if model.capacity_mwh < 0:
        violations.append(f"{kind}.capacity_mwh: capacity must be >= 0")
    if model.kind.is_renewable and model.capacity_mwh != 0:
        violations.append(f"{kind}.capacity_mwh: {model.kind.name.title()} must have zero storage capacity")
    if model.kind.has_storage and model.capacity_mwh <= 0:
        violations.append(f"{kind}.capacity_mwh: {model.kind.name.title()} must have positive storage capacity")

    if model.p_gen_min_mw < 0 or model.p_load_min_mw < 0:
        violations.append(f"{kind}.p_min: power lower bounds must be >= 0")
    if model.p_gen_min_mw > model.p_gen_max_mw:
        violations.append(f"{kind}.p_gen_min_mw: p_gen_min_mw must not exceed p_gen_max_mw")
    if model.p_load_min_mw > model.p_load_max_mw:
        violations.append(f"{kind}.p_load_min_mw: p_load_min_mw must not exceed p_load_max_mw")
    if model.kind.is_renewable and model.p_load_max_mw != 0:
        violations.append(f"{kind}.p_load_max_mw: renewable units are pure generators (p_load_max_mw = 0)")

    for side in ("gen", "load"):
        lo = getattr(model, f"ramp_{side}_min_mw_per_min")
        hi = getattr(model, f"ramp_{side}_max_mw_per_min")
        if not lo <= 0.0 <= hi:
            violations.append(f"{kind}.ramp_{side}: ramp bounds must satisfy min <= 0 <= max")

    if model.has_storage:
        if not 0.0 <= model.soc_min <= model.soc_max <= 1.0:
            violations.append(f"{kind}.soc_min: SOC bounds must satisfy 0 <= soc_min <= soc_max <= 1")
        if not model.soc_min <= model.soc_init <= model.soc_max:
            violations.append(
                f"{kind}.soc_init: soc_init {model.soc_init} outside [{model.soc_min}, {model.soc_max}]"
            )

    if violations:
        logger.debug(f"{kind}: {len(violations)} violation(s)")
    return violations


def initial_state(model: UnitModel) -> UnitState:
    """State at the start of a run."""
    return UnitState(soc=model.soc_init if model.has_storage else 0.0)
