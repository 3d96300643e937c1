"""Profile ingestion, synthesis and penetration scaling."""

import logging
import re
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd
from scipy.signal import lfilter

from ..config import DEFAULT_STEP_MINUTES, H2_LHV_KWH_PER_KG
from ..errors import ParseError, ValidationError
from ..models.profiles import PROFILE_COLUMNS, Profiles, SynthesisSpec

logger = logging.getLogger(__name__)

# CSV column -> Profiles field
_SERIES = {
    "wind_mw": "wind_avail_mw",
    "pv_mw": "pv_avail_mw",
    "eload_mw": "eload_mw",
    "h2_mwh": "h2_demand_mwh",
    "gas_mwh": "gas_supply_mwh",
}
PENETRATION_SOURCES = ("wind", "pv")


def h2_kg_to_mwh(kg: float | np.ndarray) -> float | np.ndarray:
    """Hydrogen mass to energy at the lower heating value."""
    return np.asarray(kg, dtype=float) * H2_LHV_KWH_PER_KG / 1000.0


def _parse_float(cell: str) -> float:
    try:
        return float(cell)
    except ValueError:
        return float("nan")


def load_profiles(path: str | Path) -> Profiles:
    """
    Read a profiles CSV.

    Args:
        path: File with header `minute,wind_mw,pv_mw,eload_mw,h2_mwh,gas_mwh`

    Returns:
        Validated Profiles

    Raises:
        FileNotFoundError: If the file does not exist
        ParseError: Missing column, ragged row or non-numeric cell (row is
            the 1-based line number in the file)
        ValidationError: Negative series values or a non-uniform time step
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Profiles file not found: {path}")

    logger.info(f"Loading profiles from {path}")

    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError as e:
        raise ParseError("empty profiles file") from e
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        raise ParseError("ragged row", row=int(match.group(1)) if match else None) from e

    columns = [c.strip() for c in df.columns]
    df.columns = columns
    for name in PROFILE_COLUMNS:
        if name not in columns:
            raise ParseError("missing column header", column=name)
    unknown = [c for c in columns if c not in PROFILE_COLUMNS]
    if unknown:
        raise ParseError("unexpected column header", column=unknown[0])
    if df.empty:
        raise ParseError("profiles file has no data rows")

    values = {}
    for name in PROFILE_COLUMNS:
        raw = df[name].fillna("").str.strip()
        parsed = np.array([_parse_float(cell) for cell in raw], dtype=float)
        bad = np.flatnonzero(~np.isfinite(parsed))
        if bad.size:
            # header is line 1
            row = int(bad[0]) + 2
            kind = "missing value" if raw.iloc[bad[0]] == "" else f"not a number: {raw.iloc[bad[0]]!r}"
            raise ParseError(kind, row=row, column=name)
        values[name] = parsed

    minutes = values["minute"]
    if len(minutes) > 1:
        steps = np.diff(minutes)
        step = float(steps[0])
        if step <= 0 or not np.allclose(steps, step, rtol=0.0, atol=1e-9):
            raise ValidationError("uniform_step", "minute column must increase by a constant positive step")
    else:
        step = float(DEFAULT_STEP_MINUTES)

    for column in _SERIES:
        negative = np.flatnonzero(values[column] < 0)
        if negative.size:
            raise ValidationError(
                "non_negative",
                f"{column} is negative ({values[column][negative[0]]}) at row {int(negative[0]) + 2}",
            )

    profiles = Profiles(
        step_minutes=step,
        start_minute=float(minutes[0]),
        **{field_name: values[column] for column, field_name in _SERIES.items()},
    )
    logger.info(f"Loaded {len(profiles)} steps of {step:g} min")
    return profiles


def write_profiles(profiles: Profiles, path: str | Path) -> Path:
    """Write profiles in the CSV layout `load_profiles` reads back exactly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = {"minute": profiles.minutes}
    for column, field_name in _SERIES.items():
        data[column] = getattr(profiles, field_name)
    pd.DataFrame(data, columns=list(PROFILE_COLUMNS)).to_csv(path, index=False, lineterminator="\n")
    logger.info(f"Wrote {len(profiles)} profile steps to {path}")
    return path


def _ar1(rng: np.random.Generator, n: int, phi: float) -> np.ndarray:
    """Unit-variance AR(1) series started from its stationary distribution."""
    noise = rng.standard_normal(n)
    start = rng.standard_normal()
    series, _ = lfilter([np.sqrt(1.0 - phi**2)], [1.0, -phi], noise, zi=[phi * start])
    return series


def synthesize_profiles(spec: SynthesisSpec, seed: int) -> Profiles:
    """
    Deterministic synthetic profiles.

    Draws come from numpy's PCG64 generator (`default_rng(seed)`) in a
    fixed order: wind latent, calm nights, cloud cover, load noise,
    hydrogen variation.

    Args:
        spec: Length, step and magnitude settings
        seed: Generator seed

    Returns:
        Profiles starting at minute 0 (midnight)
    """
    rng = np.random.default_rng(seed)
    n = spec.n_steps
    dt_h = spec.step_minutes / 60.0
    t_h = np.arange(n) * dt_h
    hour = np.mod(t_h, 24.0)

    # wind: logistic of a slow latent process, switched off on calm nights
    latent = _ar1(rng, n, phi=0.995)
    wind = spec.wind_peak_mw / (1.0 + np.exp(-(1.6 * latent + 0.4)))
    night = (hour >= 20.0) | (hour < 6.0)
    night_id = np.floor((t_h + 4.0) / 24.0).astype(int)
    calm = rng.random(int(night_id.max()) + 1) < spec.calm_night_probability
    wind = np.where(night & calm[night_id], 0.0, wind)

    # pv: clear-sky half sine between 06:00 and 18:00 times cloud cover
    clear_sky = np.where((hour > 6.0) & (hour < 18.0), np.sin(np.pi * (hour - 6.0) / 12.0), 0.0)
    cloud = np.clip(0.8 + 0.2 * _ar1(rng, n, phi=0.98), 0.2, 1.0)
    pv = spec.pv_peak_mw * clear_sky * cloud

    # electric load: morning and evening peaks on a base
    morning = np.exp(-(((hour - 10.0) / 2.0) ** 2))
    evening = np.exp(-(((hour - 19.0) / 2.0) ** 2))
    noise = 0.6 * _ar1(rng, n, phi=0.9)
    eload = np.maximum(
        spec.load_base_mw + spec.load_morning_peak_mw * morning + spec.load_evening_peak_mw * evening + noise,
        0.0,
    )

    # hydrogen demand: daily swing around the nominal consumption
    nominal = h2_kg_to_mwh(spec.h2_kg_per_hour) * dt_h
    swing = 1.0 + 0.2 * np.sin(2.0 * np.pi * (hour - 8.0) / 24.0) + 0.05 * _ar1(rng, n, phi=0.99)
    h2 = nominal * np.clip(swing, 0.5, 1.5)

    gas = np.full(n, spec.gas_mwh_per_step)

    logger.info(f"Synthesized {n} steps ({spec.hours:g} h) with seed {seed}")
    return Profiles(
        step_minutes=spec.step_minutes,
        wind_avail_mw=wind,
        pv_avail_mw=pv,
        eload_mw=eload,
        h2_demand_mwh=h2,
        gas_supply_mwh=gas,
    )


def scale_penetration(
    profiles: Profiles,
    ratio: float,
    sources: Sequence[str] = PENETRATION_SOURCES,
) -> Profiles:
    """
    Multiply renewable availability by (1 + ratio).

    Args:
        profiles: Base profiles
        ratio: Added renewable access, e.g. 0.1 for +10%
        sources: Which of "wind" and "pv" to scale

    Returns:
        New Profiles; load, hydrogen and gas series unchanged
    """
    if ratio < 0:
        raise ValidationError("penetration_ratio", f"ratio must be >= 0, got {ratio}")
    unknown = [s for s in sources if s not in PENETRATION_SOURCES]
    if unknown:
        raise ValidationError("penetration_sources", f"unknown source {unknown[0]!r}")

    factor = 1.0 + ratio
    wind = profiles.wind_avail_mw * factor if "wind" in sources else profiles.wind_avail_mw.copy()
    pv = profiles.pv_avail_mw * factor if "pv" in sources else profiles.pv_avail_mw.copy()
    return Profiles(
        step_minutes=profiles.step_minutes,
        wind_avail_mw=wind,
        pv_avail_mw=pv,
        eload_mw=profiles.eload_mw.copy(),
        h2_demand_mwh=profiles.h2_demand_mwh.copy(),
        gas_supply_mwh=profiles.gas_supply_mwh.copy(),
        start_minute=profiles.start_minute,
    )
