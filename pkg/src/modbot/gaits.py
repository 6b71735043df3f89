"""Gait preset catalog.

Presets live in a JSON file shipped with the package (one object per
preset) so users can add gaits without touching code. Angles are strings
like "1/2 pi" (kept exact through parse/serialize round-trips) or plain
decimal radians. Schema per preset:

    {"name": str, "period": seconds, "Theta_des": [m-1 angles],
     "modules": [{"theta_des": [n-1 angles], "R": [n angles],
                  "C": [n angles]}, ...]}
"""

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .angles import JOINT_COUNT, JOINT_LIMIT, format_angle, parse_angle
from .coordination import DEFAULT_GAMMA, SystemConfig
from .errors import CatalogError, DimensionError, ParameterError, PresetNotFoundError
from .oscillators import DEFAULT_A, DEFAULT_MU, OscillatorNetworkParams


@dataclass(frozen=True)
class ModuleGait:
    """One module's slice of a gait: desired gaps, amplitudes, offsets."""

    theta_des: tuple[float, ...]
    R: tuple[float, ...]
    C: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "theta_des", tuple(float(x) for x in self.theta_des))
        object.__setattr__(self, "R", tuple(float(x) for x in self.R))
        object.__setattr__(self, "C", tuple(float(x) for x in self.C))


@dataclass(frozen=True)
class GaitPreset:
    """Named locomotion pattern: per-module parameters, inter-module
    offsets, and the gait period."""

    name: str
    period: float
    modules: tuple[ModuleGait, ...]
    Theta_des: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "modules", tuple(self.modules))
        object.__setattr__(self, "Theta_des", tuple(float(x) for x in self.Theta_des))
        if not self.name:
            raise ParameterError("preset name must be non-empty")
        if len(self.modules) < 1:
            raise DimensionError(f"preset {self.name!r} has no modules")
        if len(self.Theta_des) != len(self.modules) - 1:
            raise DimensionError(
                f"preset {self.name!r}: Theta_des must have length "
                f"{len(self.modules) - 1}, got {len(self.Theta_des)}"
            )
        if not self.period > 0:
            raise ParameterError(
                f"preset {self.name!r}: period must be > 0, got {self.period}"
            )

    @property
    def m(self) -> int:
        return len(self.modules)

    @property
    def omega(self) -> float:
        """Shared natural frequency, 2 pi / period."""
        return math.tau / self.period


def validate(preset: GaitPreset) -> list[str]:
    """Check dimensions and joint-limit feasibility.

    Returns a list of human-readable violations, empty when every module
    has n = 5 consistently sized vectors and |R_i| + |C_i| <= 3/4 pi for
    every joint.
    """
    violations = []
    for j, mod in enumerate(preset.modules, start=1):
        if len(mod.R) != JOINT_COUNT:
            violations.append(
                f"module {j}: expected {JOINT_COUNT} amplitudes, got {len(mod.R)}"
            )
        if len(mod.C) != len(mod.R):
            violations.append(
                f"module {j}: C has length {len(mod.C)}, expected {len(mod.R)}"
            )
        if len(mod.theta_des) != len(mod.R) - 1:
            violations.append(
                f"module {j}: theta_des has length {len(mod.theta_des)}, "
                f"expected {len(mod.R) - 1}"
            )
        for i, (ri, ci) in enumerate(zip(mod.R, mod.C), start=1):
            if abs(ri) + abs(ci) > JOINT_LIMIT:
                violations.append(
                    f"module {j} joint {i}: |R|+|C| = {abs(ri) + abs(ci):.4f} rad "
                    f"exceeds the {JOINT_LIMIT:.4f} rad actuator limit"
                )
    return violations


def scale_period(preset: GaitPreset, period: float) -> GaitPreset:
    """Same pattern at a different tempo (consumers derive omega = 2 pi / period)."""
    if not period > 0:
        raise ParameterError(f"period must be > 0, got {period}")
    return GaitPreset(
        name=preset.name,
        period=float(period),
        modules=preset.modules,
        Theta_des=preset.Theta_des,
    )


def module_params(
    preset: GaitPreset,
    index: int = 0,
    mu: float = DEFAULT_MU,
    a: float = DEFAULT_A,
) -> OscillatorNetworkParams:
    """Oscillator-network parameters for one module of the preset."""
    mod = preset.modules[index]
    return OscillatorNetworkParams.uniform_gains(
        omega=preset.omega, R=mod.R, C=mod.C, theta_des=mod.theta_des, mu=mu, a=a
    )


def system_config(
    preset: GaitPreset,
    mu: float = DEFAULT_MU,
    a: float = DEFAULT_A,
    gamma: float = DEFAULT_GAMMA,
    injection: str = "first",
    Theta_des: tuple[float, ...] | None = None,
) -> SystemConfig:
    """Coordinated-system configuration for the whole preset.

    Theta_des overrides the preset's inter-module offsets when given
    (the snake presets ship with 0 but are usually tuned per run).
    """
    return SystemConfig(
        modules=tuple(
            module_params(preset, j, mu=mu, a=a) for j in range(preset.m)
        ),
        Theta_des=preset.Theta_des if Theta_des is None else Theta_des,
        gamma=gamma,
        injection=injection,
    )


def _parse_angle_list(raw, what: str, where: str) -> tuple[float, ...]:
    if not isinstance(raw, list):
        raise CatalogError(f"{what} must be a list of angles", where)
    out = []
    for i, item in enumerate(raw):
        try:
            out.append(parse_angle(item))
        except ParameterError as e:
            raise CatalogError(str(e), f"{where}, {what}[{i}]") from None
    return tuple(out)


def _parse_preset(obj, where: str) -> GaitPreset:
    if not isinstance(obj, dict):
        raise CatalogError("preset entry must be an object", where)
    required = {"name", "period", "Theta_des", "modules"}
    missing = required - obj.keys()
    if missing:
        raise CatalogError(f"missing field(s): {', '.join(sorted(missing))}", where)
    unknown = obj.keys() - required
    if unknown:
        raise CatalogError(f"unknown field(s): {', '.join(sorted(unknown))}", where)
    name = obj["name"]
    if not isinstance(name, str) or not name:
        raise CatalogError("name must be a non-empty string", where)
    where = f"{where} ({name!r})"
    period = obj["period"]
    if isinstance(period, bool) or not isinstance(period, (int, float)):
        raise CatalogError("period must be a number of seconds", where)
    mods_raw = obj["modules"]
    if not isinstance(mods_raw, list) or not mods_raw:
        raise CatalogError("modules must be a non-empty list", where)
    modules = []
    for k, mod in enumerate(mods_raw):
        mwhere = f"{where}, module {k + 1}"
        if not isinstance(mod, dict):
            raise CatalogError("module entry must be an object", mwhere)
        mod_required = {"theta_des", "R", "C"}
        mod_missing = mod_required - mod.keys()
        if mod_missing:
            raise CatalogError(
                f"missing field(s): {', '.join(sorted(mod_missing))}", mwhere
            )
        mod_unknown = mod.keys() - mod_required
        if mod_unknown:
            raise CatalogError(
                f"unknown field(s): {', '.join(sorted(mod_unknown))}", mwhere
            )
        modules.append(
            ModuleGait(
                theta_des=_parse_angle_list(mod["theta_des"], "theta_des", mwhere),
                R=_parse_angle_list(mod["R"], "R", mwhere),
                C=_parse_angle_list(mod["C"], "C", mwhere),
            )
        )
    Theta_des = _parse_angle_list(obj["Theta_des"], "Theta_des", where)
    try:
        return GaitPreset(
            name=name,
            period=float(period),
            modules=tuple(modules),
            Theta_des=Theta_des,
        )
    except (DimensionError, ParameterError) as e:
        raise CatalogError(str(e), where) from None


def parse_catalog(text: str, source: str = "catalog") -> dict[str, GaitPreset]:
    """Parse catalog JSON text into an ordered name -> preset mapping."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise CatalogError(
            f"invalid JSON: {e.msg}", f"{source}: line {e.lineno}, column {e.colno}"
        ) from None
    if not isinstance(data, list):
        raise CatalogError("top level must be a list of presets", source)
    catalog: dict[str, GaitPreset] = {}
    for idx, obj in enumerate(data):
        preset = _parse_preset(obj, f"{source}: preset {idx + 1}")
        if preset.name in catalog:
            raise CatalogError(
                f"duplicate preset name {preset.name!r}", f"{source}: preset {idx + 1}"
            )
        catalog[preset.name] = preset
    return catalog


def serialize_catalog(presets) -> str:
    """Render presets back to catalog JSON; parse(serialize(x)) == x with
    bit-exact angles."""
    entries = []
    for p in presets:
        entries.append(
            {
                "name": p.name,
                "period": p.period,
                "Theta_des": [format_angle(x) for x in p.Theta_des],
                "modules": [
                    {
                        "theta_des": [format_angle(x) for x in m.theta_des],
                        "R": [format_angle(x) for x in m.R],
                        "C": [format_angle(x) for x in m.C],
                    }
                    for m in p.modules
                ],
            }
        )
    return json.dumps(entries, indent=2) + "\n"


def load_catalog(path=None) -> dict[str, GaitPreset]:
    """Load a catalog file, or the shipped one when path is None."""
    if path is None:
        return dict(_shipped_catalog())
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise CatalogError(f"cannot read catalog: {e}", str(path)) from None
    return parse_catalog(text, source=str(path))


@lru_cache(maxsize=1)
def _shipped_catalog() -> dict[str, GaitPreset]:
    text = (
        resources.files("modbot").joinpath("data/gait_catalog.json").read_text("utf-8")
    )
    return parse_catalog(text, source="shipped catalog")


def list_presets(catalog: dict[str, GaitPreset] | None = None) -> tuple[GaitPreset, ...]:
    """All presets in catalog order."""
    return tuple((catalog if catalog is not None else load_catalog()).values())


def get_preset(name: str, catalog: dict[str, GaitPreset] | None = None) -> GaitPreset:
    """Look up one preset by name."""
    cat = catalog if catalog is not None else load_catalog()
    try:
        return cat[name]
    except KeyError:
        raise PresetNotFoundError(name, list(cat)) from None
