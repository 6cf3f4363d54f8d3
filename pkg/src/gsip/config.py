"""Config parsing for the command-line front end.

The format is a TOML-style subset: ``[section]`` headers, ``key = value``
pairs, ``#`` comments.  Values are quoted strings, booleans, or numbers.
Recognized sections are [profile], [family], [grid], [run], and repeated
[case.<id>] sections for sweeps; unknown sections and keys are rejected
with the offending location.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ConfigError, ValidationError
from .families import Family, FamilySpec, auto_interval, bound_level_count, validate_spec
from .grids import Grid
from .profiles import MassProfile, profile_by_name

_PROFILE_KEYS = {"kind": str, "value": float}
_FAMILY_KEYS = {
    "name": str,
    "a": float,
    "alpha": float,
    "R0": float,
    "u0": float,
    "C1": float,
    "b": float,
}
_GRID_KEYS = {"x_lo": float, "x_hi": float, "n": int, "auto_box": bool}
_RUN_KEYS = {
    "command": str,
    "k": int,
    "out": str,
    "id": str,
    "tol_spectrum": float,
    "tol_overlap": float,
    "tol_si": float,
    "plot": bool,
}
_CASE_KEYS = {
    **{k: t for k, t in _FAMILY_KEYS.items() if k != "name"},
    "family": str,
    "profile": str,
    "value": float,
    **_GRID_KEYS,
    "k": int,
}

_COMMANDS = ("generate", "verify", "sweep", "tabulate")

# Eigensolver-backed commands refuse grids below this resolution.
MIN_VERIFY_NODES = 64


@dataclass(frozen=True)
class SweepCase:
    """Per-case overrides inside a sweep config."""

    case_id: str
    values: tuple[tuple[str, object], ...]

    def get(self, key, default=None):
        return dict(self.values).get(key, default)


@dataclass(frozen=True)
class RunConfig:
    """Validated run description built from a config document."""

    command: str = "verify"
    profile_kind: str = "constant"
    profile_value: float | None = None
    family: str = ""
    a: float = 0.0
    alpha: float = 0.0
    R0: float = 0.0
    u0: float = 0.0
    C1: float = 0.0
    b: float = 0.0
    x_lo: float | None = None
    x_hi: float | None = None
    n: int = 4000
    auto_box: bool = False
    k: int = 4
    out: str = "out"
    case_id: str = ""
    tol_spectrum: float = 1e-3
    tol_overlap: float = 1e-6
    tol_si: float = 1e-9
    plot: bool = True
    cases: tuple[SweepCase, ...] = ()


def _parse_value(raw: str, line_no: int, col: int):
    raw = raw.strip()
    if not raw:
        raise ConfigError("missing value", line_no, col)
    if raw.startswith('"'):
        if not (raw.endswith('"') and len(raw) >= 2):
            raise ConfigError("unterminated string", line_no, col)
        return raw[1:-1]
    if raw == "true":
        return True
    if raw == "false":
        return False
    try:
        if any(c in raw for c in ".eE") and not raw.lstrip("+-").isdigit():
            return float(raw)
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"cannot parse value {raw!r}", line_no, col) from None


def _strip_comment(line: str) -> str:
    out = []
    in_str = False
    for ch in line:
        if ch == '"':
            in_str = not in_str
        if ch == "#" and not in_str:
            break
        out.append(ch)
    return "".join(out)


def parse_sections(text: str) -> dict[str, dict]:
    """Raw section dicts keyed by section name, preserving order."""
    sections: dict[str, dict] = {}
    current: dict | None = None
    current_name = ""
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw_line).rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigError("unterminated section header", line_no, len(line))
            name = stripped[1:-1].strip()
            base = name.split(".", 1)[0]
            if base not in ("profile", "family", "grid", "run", "case"):
                raise ConfigError(f"unknown section [{name}]", line_no, 1)
            if base == "case" and ("." not in name or not name.split(".", 1)[1]):
                raise ConfigError("case sections need an id: [case.<id>]", line_no, 1)
            if name in sections:
                raise ConfigError(f"duplicate section [{name}]", line_no, 1)
            current = {}
            current_name = name
            sections[name] = current
            continue
        if "=" not in stripped:
            raise ConfigError("expected `key = value`", line_no, 1)
        if current is None:
            raise ConfigError("key outside any section", line_no, 1)
        key, _, raw_value = line.partition("=")
        col = line.index("=") + 2
        key = key.strip()
        schema = _schema_for(current_name)
        if key not in schema:
            raise ConfigError(
                f"unknown key {key!r} in section [{current_name}]", line_no, 1
            )
        if key in current:
            raise ConfigError(f"duplicate key {key!r}", line_no, 1)
        value = _parse_value(raw_value, line_no, col)
        current[key] = _coerce(key, value, schema[key], line_no, col)
    return sections


def _schema_for(section: str) -> dict:
    base = section.split(".", 1)[0]
    return {
        "profile": _PROFILE_KEYS,
        "family": _FAMILY_KEYS,
        "grid": _GRID_KEYS,
        "run": _RUN_KEYS,
        "case": _CASE_KEYS,
    }[base]


def _coerce(key: str, value, want: type, line_no: int, col: int):
    if want is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError(f"{key} must be a finite number", line_no, col)
        return value
    if want is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if want is bool and isinstance(value, bool):
        return value
    if want is str and isinstance(value, str):
        return value
    raise ConfigError(
        f"{key} expects a {want.__name__} value, got {value!r}", line_no, col
    )


def apply_overrides(sections: dict[str, dict], overrides: list[str]) -> None:
    """Apply --set section.key=value pairs onto the parsed sections."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        path, _, raw = item.partition("=")
        parts = path.strip().rsplit(".", 1)
        if len(parts) != 2:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        section, key = parts
        schema = _schema_for(section) if section.split(".", 1)[0] in (
            "profile", "family", "grid", "run", "case",
        ) else None
        if schema is None or key not in schema:
            raise ConfigError(f"--set targets unknown key {path!r}")
        value = _parse_value(raw, 0, 0)
        sections.setdefault(section, {})[key] = _coerce(key, value, schema[key], 0, 0)


def _build_config(sections: dict[str, dict], command: str | None) -> RunConfig:
    run = dict(sections.get("run", {}))
    cmd = command or run.get("command", "verify")
    if cmd not in _COMMANDS:
        raise ValidationError("command", f"must be one of {_COMMANDS}")
    cases = tuple(
        SweepCase(name.split(".", 1)[1], tuple(sorted(vals.items())))
        for name, vals in sections.items()
        if name.startswith("case.")
    )
    prof = sections.get("profile", {})
    fam = sections.get("family", {})
    grid = sections.get("grid", {})
    return RunConfig(
        command=cmd,
        profile_kind=prof.get("kind", "constant"),
        profile_value=prof.get("value"),
        family=fam.get("name", ""),
        a=fam.get("a", 0.0),
        alpha=fam.get("alpha", 0.0),
        R0=fam.get("R0", 0.0),
        u0=fam.get("u0", 0.0),
        C1=fam.get("C1", 0.0),
        b=fam.get("b", 0.0),
        x_lo=grid.get("x_lo"),
        x_hi=grid.get("x_hi"),
        n=grid.get("n", 4000),
        auto_box=grid.get("auto_box", False),
        k=run.get("k", 4),
        out=run.get("out", "out"),
        case_id=run.get("id", ""),
        tol_spectrum=run.get("tol_spectrum", 1e-3),
        tol_overlap=run.get("tol_overlap", 1e-6),
        tol_si=run.get("tol_si", 1e-9),
        plot=run.get("plot", True),
        cases=cases,
    )


def parse_config(
    text: str, command: str | None = None, overrides: list[str] | None = None
) -> RunConfig:
    """Parse and validate a config document into a RunConfig.

    Raises ConfigError for malformed text (with line/column) and
    ValidationError naming the offending field for semantic problems.
    """
    sections = parse_sections(text)
    if overrides:
        apply_overrides(sections, overrides)
    cfg = _build_config(sections, command)
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    if cfg.n < 5:
        raise ValidationError("n", "grid needs at least 5 interior nodes")
    if cfg.command in ("verify", "sweep") and cfg.n < MIN_VERIFY_NODES:
        raise ValidationError("n", f"verification requires n >= {MIN_VERIFY_NODES}")
    if cfg.k < 0:
        raise ValidationError("k", "level count must be non-negative")
    for name in ("tol_spectrum", "tol_overlap", "tol_si"):
        if getattr(cfg, name) <= 0:
            raise ValidationError(name, "tolerances must be positive")
    if cfg.command == "sweep" and not cfg.cases and not cfg.family:
        raise ValidationError("name", "sweep needs [case.*] sections or a [family]")
    if cfg.command != "sweep" or cfg.family:
        if not cfg.family:
            raise ValidationError("name", "missing family name")
        build_family_spec(cfg)  # raises ValidationError naming the field
    if not cfg.auto_box and (cfg.x_lo is None or cfg.x_hi is None) and cfg.command != "tabulate":
        if not cfg.cases:
            raise ValidationError("x_lo", "explicit grids need x_lo and x_hi (or auto_box = true)")
    for case in cfg.cases:
        build_case_spec(cfg, case)


def _family_from_name(name: str) -> Family:
    try:
        return Family(name)
    except ValueError:
        raise ValidationError(
            "name", f"unknown family {name!r}; expected one of {[f.value for f in Family]}"
        ) from None


def build_profile(kind: str, value: float | None) -> MassProfile:
    try:
        return profile_by_name(kind, value)
    except Exception as exc:
        raise ValidationError("kind", str(exc)) from None


def build_family_spec(cfg: RunConfig) -> FamilySpec:
    profile = build_profile(cfg.profile_kind, cfg.profile_value)
    spec = FamilySpec(
        family=_family_from_name(cfg.family),
        profile=profile,
        a=cfg.a,
        alpha=cfg.alpha,
        R0=cfg.R0,
        u0=cfg.u0,
        C1=cfg.C1,
        b=cfg.b,
    )
    validate_spec(spec)
    return spec


def build_case_spec(cfg: RunConfig, case: SweepCase) -> tuple[FamilySpec, Grid | None, int]:
    """Spec, optional explicit grid, and level count for one sweep case.

    A case that names its own family starts from parameter defaults
    rather than inheriting the base [family] numbers, which belong to a
    different parameterization; likewise a case that switches profile
    kind does not inherit the base profile value.
    """
    vals = dict(case.values)
    own_family = "family" in vals
    name = vals.get("family", cfg.family)
    if not name:
        raise ValidationError("family", f"case {case.case_id!r} does not name a family")
    kind = vals.get("profile", cfg.profile_kind)
    if "value" in vals:
        value = vals["value"]
    else:
        value = cfg.profile_value if kind == cfg.profile_kind else None
    profile = build_profile(kind, value)

    def param(key):
        if key in vals:
            return vals[key]
        return 0.0 if own_family else getattr(cfg, key)

    spec = FamilySpec(
        family=_family_from_name(name),
        profile=profile,
        a=param("a"),
        alpha=param("alpha"),
        R0=param("R0"),
        u0=param("u0"),
        C1=param("C1"),
        b=param("b"),
    )
    validate_spec(spec)
    k = vals.get("k", cfg.k)
    n = vals.get("n", cfg.n)
    if cfg.command in ("verify", "sweep") and n < MIN_VERIFY_NODES:
        raise ValidationError("n", f"verification requires n >= {MIN_VERIFY_NODES}")
    auto = vals.get("auto_box", cfg.auto_box)
    x_lo = vals.get("x_lo", cfg.x_lo)
    x_hi = vals.get("x_hi", cfg.x_hi)
    if auto or x_lo is None or x_hi is None:
        grid = Grid(*auto_interval(spec, max(1, min(k, bound_level_count(spec, max(k, 2))))), n)
    else:
        grid = Grid(x_lo, x_hi, n)
    return spec, grid, k


def resolve_grid(cfg: RunConfig, spec: FamilySpec) -> Grid:
    """Grid for single-case commands: explicit bounds or the auto box."""
    if cfg.auto_box or cfg.x_lo is None or cfg.x_hi is None:
        k_eff = max(1, min(cfg.k, bound_level_count(spec, max(cfg.k, 2))))
        return Grid(*auto_interval(spec, k_eff), cfg.n)
    return Grid(cfg.x_lo, cfg.x_hi, cfg.n)


def serialize_config(cfg: RunConfig) -> str:
    """Config text that parses back to an equal RunConfig."""

    def fmt(value) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, str):
            return f'"{value}"'
        return repr(value)

    lines = ["[profile]", f"kind = {fmt(cfg.profile_kind)}"]
    if cfg.profile_value is not None:
        lines.append(f"value = {fmt(cfg.profile_value)}")
    lines += ["", "[family]"]
    if cfg.family:
        lines.append(f"name = {fmt(cfg.family)}")
    for key in ("a", "alpha", "R0", "u0", "C1", "b"):
        lines.append(f"{key} = {fmt(getattr(cfg, key))}")
    lines += ["", "[grid]"]
    if cfg.x_lo is not None:
        lines.append(f"x_lo = {fmt(cfg.x_lo)}")
    if cfg.x_hi is not None:
        lines.append(f"x_hi = {fmt(cfg.x_hi)}")
    lines.append(f"n = {fmt(cfg.n)}")
    lines.append(f"auto_box = {fmt(cfg.auto_box)}")
    lines += ["", "[run]"]
    lines.append(f"command = {fmt(cfg.command)}")
    lines.append(f"k = {fmt(cfg.k)}")
    lines.append(f"out = {fmt(cfg.out)}")
    if cfg.case_id:
        lines.append(f"id = {fmt(cfg.case_id)}")
    for key in ("tol_spectrum", "tol_overlap", "tol_si"):
        lines.append(f"{key} = {fmt(getattr(cfg, key))}")
    lines.append(f"plot = {fmt(cfg.plot)}")
    for case in cfg.cases:
        lines += ["", f"[case.{case.case_id}]"]
        for key, value in case.values:
            lines.append(f"{key} = {fmt(value)}")
    return "\n".join(lines) + "\n"
