"""Scenario documents: parsing, block composition and validation."""

import json
import logging
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Dict, List, Optional

from ..config import FLEXBLOCK_DATA_DIR
from ..errors import ConfigError, ParseError, ValidationError
from ..models.control import MpcConfig
from ..models.profiles import Profiles, SynthesisSpec
from ..models.scenario_spec import ScenarioSpec
from ..models.unit import EnergyBlock, UnitKind, UnitModel
from .profile_service import PENETRATION_SOURCES, load_profiles, scale_penetration, synthesize_profiles
from .units import validate_unit

logger = logging.getLogger(__name__)

# Placeholder parameters; every field can be overridden per scenario
DEFAULT_UNITS: Dict[UnitKind, UnitModel] = {
    UnitKind.WIND: UnitModel(
        kind=UnitKind.WIND,
        capacity_mwh=0.0,
        p_gen_max_mw=60.0,
        ramp_gen_min_mw_per_min=-60.0,
        ramp_gen_max_mw_per_min=60.0,
    ),
    UnitKind.PV: UnitModel(
        kind=UnitKind.PV,
        capacity_mwh=0.0,
        p_gen_max_mw=60.0,
        ramp_gen_min_mw_per_min=-60.0,
        ramp_gen_max_mw_per_min=60.0,
    ),
    UnitKind.BATTERY: UnitModel(
        kind=UnitKind.BATTERY,
        capacity_mwh=120.0,
        eta_gen=0.95,
        eta_load=0.95,
        p_gen_max_mw=10.0,
        p_load_max_mw=10.0,
        ramp_gen_min_mw_per_min=-2.0,
        ramp_gen_max_mw_per_min=2.0,
        ramp_load_min_mw_per_min=-2.0,
        ramp_load_max_mw_per_min=2.0,
        soc_min=0.1,
        soc_max=0.9,
        soc_init=0.45,
    ),
    UnitKind.HYDROGEN: UnitModel(
        kind=UnitKind.HYDROGEN,
        capacity_mwh=300.0,
        eta_gen=0.55,
        eta_load=0.70,
        p_gen_max_mw=30.0,
        p_load_max_mw=30.0,
        ramp_gen_min_mw_per_min=-1.0,
        ramp_gen_max_mw_per_min=1.0,
        ramp_load_min_mw_per_min=-1.0,
        ramp_load_max_mw_per_min=1.0,
        soc_min=0.05,
        soc_max=0.95,
        soc_init=0.40,
    ),
    UnitKind.GAS: UnitModel(
        kind=UnitKind.GAS,
        capacity_mwh=60.0,
        eta_gen=0.40,
        p_gen_max_mw=30.0,
        ramp_gen_min_mw_per_min=-0.5,
        ramp_gen_max_mw_per_min=0.5,
        soc_min=0.1,
        soc_max=1.0,
        soc_init=0.5,
    ),
}

_TOP_LEVEL = {
    "name",
    "units",
    "profiles",
    "seed",
    "penetration",
    "run_hours",
    "step_minutes",
    "mpc",
    "unit_overrides",
    "description",
}
_UNIT_FIELDS = {f.name for f in fields(UnitModel)} - {"kind"}
_MPC_FIELDS = {f.name for f in fields(MpcConfig)} - {"dt_h"}
_SYNTHESIS_FIELDS = {f.name for f in fields(SynthesisSpec)} - {"hours", "step_minutes"}


def _number(value, field: str, minimum: Optional[float] = None, strict: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(field, f"expected a number, got {value!r}")
    if minimum is not None and (value < minimum or (strict and value == minimum)):
        op = ">" if strict else ">="
        raise ConfigError(field, f"must be {op} {minimum}, got {value}")
    return float(value)


def _parse_units(raw) -> frozenset[UnitKind]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("units", "expected a non-empty list of unit kinds")
    kinds = []
    for i, name in enumerate(raw):
        try:
            kind = UnitKind(name)
        except ValueError:
            raise ConfigError(f"units[{i}]", f"unknown unit kind {name!r}") from None
        if kind in kinds:
            raise ConfigError(f"units[{i}]", f"duplicate unit kind {name!r}")
        kinds.append(kind)
    return frozenset(kinds)


def _parse_profiles(raw, base_dir: Path) -> tuple[Optional[Path], Optional[SynthesisSpec]]:
    if raw is None:
        return None, SynthesisSpec()
    if not isinstance(raw, dict) or len(raw) != 1 or not ({"path", "synthesize"} & raw.keys()):
        raise ConfigError("profiles", 'expected {"path": ...} or {"synthesize": {...}}')
    if "path" in raw:
        if not isinstance(raw["path"], str):
            raise ConfigError("profiles.path", "expected a string")
        path = Path(raw["path"])
        if not path.is_absolute():
            path = Path(FLEXBLOCK_DATA_DIR or base_dir) / path
        return path, None

    options = raw["synthesize"] or {}
    if not isinstance(options, dict):
        raise ConfigError("profiles.synthesize", "expected an object")
    for key, value in options.items():
        if key not in _SYNTHESIS_FIELDS:
            raise ConfigError(f"profiles.synthesize.{key}", "unknown field")
        _number(value, f"profiles.synthesize.{key}", minimum=0.0)
    return None, SynthesisSpec(**{k: float(v) for k, v in options.items()})


def _parse_mpc(raw) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("mpc", "expected an object")
    for key in raw:
        if key not in _MPC_FIELDS:
            raise ConfigError(f"mpc.{key}", "unknown field")
    for key, size in (("q_weights", 2), ("y_ref", 2), ("r_weights", 9)):
        if key in raw and (not isinstance(raw[key], list) or len(raw[key]) != size):
            raise ConfigError(f"mpc.{key}", f"expected a list of {size} numbers")
    try:
        MpcConfig.from_dict(raw).validate()
    except (TypeError, ValueError) as e:
        raise ConfigError("mpc", str(e)) from e
    return dict(raw)


def _parse_unit_overrides(raw) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("unit_overrides", "expected an object keyed by unit kind")
    overrides = {}
    for name, values in raw.items():
        try:
            kind = UnitKind(name)
        except ValueError:
            raise ConfigError(f"unit_overrides.{name}", f"unknown unit kind {name!r}") from None
        if not isinstance(values, dict):
            raise ConfigError(f"unit_overrides.{name}", "expected an object")
        for key, value in values.items():
            if key not in _UNIT_FIELDS:
                raise ConfigError(f"unit_overrides.{name}.{key}", "unknown field")
            if key.endswith("_curve"):
                if value is not None and not (
                    isinstance(value, list) and all(isinstance(p, list) and len(p) == 2 for p in value)
                ):
                    raise ConfigError(f"unit_overrides.{name}.{key}", "expected a list of [power, efficiency]")
            else:
                _number(value, f"unit_overrides.{name}.{key}")
        overrides[kind.value] = dict(values)
    return overrides


def parse_scenario(data: dict, base_dir: Path, source_path: Optional[Path] = None) -> ScenarioSpec:
    """
    Build a ScenarioSpec from a decoded JSON document.

    Raises:
        ConfigError: naming the offending field, e.g. "units[2]"
    """
    if not isinstance(data, dict):
        raise ConfigError("<document>", "expected a JSON object")
    for key in data:
        if key not in _TOP_LEVEL:
            raise ConfigError(key, "unknown field")

    name = data.get("name", source_path.stem if source_path else "scenario")
    if not isinstance(name, str) or not name:
        raise ConfigError("name", "expected a non-empty string")

    units = _parse_units(data.get("units", [kind.value for kind in UnitKind]))
    profiles_path, synthesis = _parse_profiles(data.get("profiles"), base_dir)

    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed", f"expected a non-negative integer, got {seed!r}")

    penetration = data.get("penetration", {})
    if not isinstance(penetration, dict):
        raise ConfigError("penetration", "expected an object")
    for key in penetration:
        if key not in ("scale", "sources"):
            raise ConfigError(f"penetration.{key}", "unknown field")
    scale = _number(penetration.get("scale", 0.0), "penetration.scale", minimum=0.0)
    sources = penetration.get("sources", list(PENETRATION_SOURCES))
    if not isinstance(sources, list) or not sources or any(s not in PENETRATION_SOURCES for s in sources):
        raise ConfigError("penetration.sources", f"expected a non-empty subset of {list(PENETRATION_SOURCES)}")

    run_hours = _number(data.get("run_hours", 336), "run_hours", minimum=0.0, strict=True)
    step_minutes = _number(data.get("step_minutes", 5), "step_minutes", minimum=0.0, strict=True)

    return ScenarioSpec(
        name=name,
        units=units,
        profiles_path=profiles_path,
        synthesis=synthesis,
        seed=seed,
        penetration_scale=scale,
        penetration_sources=tuple(sources),
        run_hours=run_hours,
        step_minutes=step_minutes,
        mpc_overrides=_parse_mpc(data.get("mpc", {})),
        unit_overrides=_parse_unit_overrides(data.get("unit_overrides", {})),
        source_path=source_path,
    )


def load_scenario(path: str | Path) -> ScenarioSpec:
    """
    Read a scenario JSON document.

    Args:
        path: Scenario file; relative profile paths resolve against its
            directory unless FLEXBLOCK_DATA_DIR is set

    Returns:
        ScenarioSpec

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigError: Malformed JSON or a bad field
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Scenario file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError("<document>", f"invalid JSON at line {e.lineno}: {e.msg}") from e

    spec = parse_scenario(data, path.parent, source_path=path)
    logger.info(f"Loaded scenario '{spec.name}' with units {sorted(k.value for k in spec.units)}")
    return spec


def unit_models(spec: ScenarioSpec) -> List[UnitModel]:
    """Default unit models with the scenario's overrides applied, in state order."""
    models = []
    for kind in UnitKind:
        model = DEFAULT_UNITS[kind]
        overrides = dict(spec.unit_overrides.get(kind.value, {}))
        for curve in ("eta_gen_curve", "eta_load_curve"):
            if overrides.get(curve) is not None:
                overrides[curve] = tuple((float(p), float(e)) for p, e in overrides[curve])
        if overrides:
            model = replace(model, **overrides)
        if kind.is_renewable and kind.value in spec.penetration_sources and spec.penetration_scale:
            # added access must be deliverable
            model = replace(model, p_gen_max_mw=model.p_gen_max_mw * (1.0 + spec.penetration_scale))
        models.append(model)
    return models


def build_block(spec: ScenarioSpec) -> EnergyBlock:
    """Energy block of all five kinds with the scenario's units installed."""
    return EnergyBlock(units=tuple(unit_models(spec)), included=spec.units)


def build_mpc_config(spec: ScenarioSpec) -> MpcConfig:
    """
    Controller settings: defaults, scenario overrides, scenario step.

    Without an explicit `y_ref` the storage units are steered back to
    their initial SOC.
    """
    values = {**spec.mpc_overrides, "dt_h": spec.step_minutes / 60.0}
    if "y_ref" not in values:
        soc_init = {model.kind: model.soc_init for model in unit_models(spec)}
        values["y_ref"] = [soc_init[UnitKind.BATTERY], soc_init[UnitKind.HYDROGEN]]
    cfg = MpcConfig.from_dict(values)
    cfg.validate()
    return cfg


def resolve_profiles(spec: ScenarioSpec) -> Profiles:
    """
    Profiles for a scenario run, penetration applied.

    Raises:
        ValidationError: Profiles step differs from the scenario step, or
            the profiles are shorter than the run length
    """
    if spec.profiles_path is not None:
        profiles = load_profiles(spec.profiles_path)
    else:
        synthesis = replace(
            spec.synthesis or SynthesisSpec(), hours=spec.run_hours, step_minutes=spec.step_minutes
        )
        profiles = synthesize_profiles(synthesis, spec.seed)

    if abs(profiles.step_minutes - spec.step_minutes) > 1e-9:
        raise ValidationError(
            "step_mismatch",
            f"profiles step {profiles.step_minutes:g} min differs from scenario step {spec.step_minutes:g} min",
        )
    if len(profiles) < spec.n_steps:
        raise ValidationError(
            "insufficient horizon", f"profiles cover {len(profiles)} of {spec.n_steps} steps"
        )

    if spec.penetration_scale:
        profiles = scale_penetration(profiles, spec.penetration_scale, spec.penetration_sources)
    return profiles


@dataclass
class CheckResult:
    """Outcome of one validation rule."""

    rule: str
    passed: bool
    message: str = ""

    def to_dict(self) -> dict:
        return {"rule": self.rule, "passed": self.passed, "message": self.message}

    def format(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.rule}" + (f": {self.message}" if self.message else "")


def check_scenario(spec: ScenarioSpec) -> List[CheckResult]:
    """
    Run every unit, controller and profile rule on a scenario.

    Returns:
        One CheckResult per rule, failures included
    """
    results: List[CheckResult] = []

    for model in unit_models(spec):
        violations = validate_unit(model)
        rule = f"unit.{model.kind.value}"
        if violations:
            results.extend(CheckResult(rule, False, message) for message in violations)
        else:
            results.append(CheckResult(rule, True))

    try:
        build_mpc_config(spec)
        results.append(CheckResult("mpc.config", True))
    except ValueError as e:
        results.append(CheckResult("mpc.config", False, str(e)))

    try:
        resolve_profiles(spec)
        results.append(CheckResult("profiles.schema", True))
        results.append(CheckResult("profiles.horizon", True))
    except ParseError as e:
        results.append(CheckResult("profiles.schema", False, str(e)))
    except ValidationError as e:
        rule = "profiles.horizon" if e.rule == "insufficient horizon" else "profiles.schema"
        results.append(CheckResult(rule, False, str(e)))
    except FileNotFoundError as e:
        results.append(CheckResult("profiles.schema", False, str(e)))

    failed = sum(not r.passed for r in results)
    logger.info(f"Checked scenario '{spec.name}': {len(results) - failed} passed, {failed} failed")
    return results
