"""Flat ``key=value`` run configurations and the built-in figure presets."""
from __future__ import annotations

import json
from dataclasses import dataclass, fields

from .errors import ConfigError
from .model import MicroscopicParams, SystemParams
from .stochastic import TAPERS, SimulationConfig

COMMANDS = ("steady", "response", "flucspec", "stochastic", "detect")
FORMATS = ("csv", "json")
DETECT_SOURCES = ("response", "flucspec")

# config key -> SystemParams field
PARAM_KEYS = {
    "delta_c": "detuning_cavity",
    "delta_a": "detuning_a",
    "delta_b": "detuning_b",
    "G_A": "coupling_a",
    "G_B": "coupling_b",
    "chi": "drive",
    "kappa": "cavity_decay",
    "gamma_A": "decay_a",
    "gamma_B": "decay_b",
    "N_c": "thermal_c",
    "N_a": "thermal_a",
    "N_b": "thermal_b",
}
MICRO_KEYS = {
    "n_atoms_a": "atom_count_a",
    "n_atoms_b": "atom_count_b",
    "g_a": "single_atom_coupling_a",
    "g_b": "single_atom_coupling_b",
    "Omega": "drive_per_atom",
}
SIM_KEYS = {
    "time_step": "time_step",
    "duration": "duration",
    "burn_in": "burn_in",
    "trajectories": "trajectory_count",
    "seed": "seed",
    "segments": "segments",
    "taper": "taper",
}
OTHER_KEYS = ("command", "preset", "microscopic", "grid_start", "grid_stop", "grid_count",
              "degenerate", "prominence", "detect_source", "output_path", "output_format")
KNOWN_KEYS = frozenset(OTHER_KEYS) | PARAM_KEYS.keys() | MICRO_KEYS.keys() | SIM_KEYS.keys()

_FIG_GRID = {"grid_start": "-100", "grid_stop": "100", "grid_count": "2001", "degenerate": "true"}
_FIG4 = {"grid_start": "-30", "grid_stop": "30", "grid_count": "1201",
         "time_step": "0.001", "duration": "2000", "burn_in": "10", "trajectories": "200",
         "seed": "1", "segments": "40"}


def _preset(**values):
    return {k: str(v) for k, v in values.items()}


PRESETS = {
    "fig2a": _preset(G_A=10, G_B=1, gamma_A=90, gamma_B=9, **_FIG_GRID),
    "fig2b": _preset(G_A=1, G_B=10, gamma_A=9, gamma_B=90, **_FIG_GRID),
    "fig3a": _preset(G_A=10, G_B=10, gamma_A=5, gamma_B=5, **_FIG_GRID),
    "fig3b": _preset(G_A=10, G_B=10, gamma_A=50, gamma_B=50, **_FIG_GRID),
    "fig3c": _preset(G_A=10, G_B=10, gamma_A=50, gamma_B=5, **_FIG_GRID),
    "fig3d": _preset(G_A=10, G_B=10, gamma_A=5, gamma_B=50, **_FIG_GRID),
    "fig4a": _preset(G_A=10, G_B=1, gamma_A=90, gamma_B=9, **_FIG4),
    "fig4b": _preset(G_A=1, G_B=10, gamma_A=9, gamma_B=90, **_FIG4),
    # decoupled cavity: the estimator calibration case
    "cavity": _preset(G_A=0, G_B=0, gamma_A=1, gamma_B=1, grid_start=-3, grid_stop=3,
                      grid_count=61, time_step=0.01, duration=2000, burn_in=40,
                      trajectories=200, seed=1, segments=10),
}
PRESETS["fig4"] = dict(PRESETS["fig4a"])


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: SystemParams
    output_path: str
    output_format: str
    grid: tuple[float, float, int] = (-100.0, 100.0, 2001)
    degenerate: bool = True
    prominence: float = 0.02
    detect_source: str = "response"
    simulation: SimulationConfig | None = None
    microscopic: MicroscopicParams | None = None
    atom_counts: tuple[int | None, int | None] = (None, None)
    preset: str | None = None

    def to_flat(self) -> dict[str, str]:
        """Resolved configuration as ``key -> text``, parseable by :func:`parse_config`."""
        flat = {"command": self.command}
        if self.microscopic is not None:
            flat["microscopic"] = "true"
            for key, name in MICRO_KEYS.items():
                flat[key] = _fmt(getattr(self.microscopic, name))
            skip = {"coupling_a", "coupling_b", "drive"}
        else:
            skip = set()
            for key, count in zip(("n_atoms_a", "n_atoms_b"), self.atom_counts):
                if count is not None:
                    flat[key] = str(count)
        for key, name in PARAM_KEYS.items():
            if name not in skip:
                flat[key] = _fmt(getattr(self.params, name))
        flat.update(grid_start=_fmt(self.grid[0]), grid_stop=_fmt(self.grid[1]),
                    grid_count=str(self.grid[2]), degenerate=_fmt(self.degenerate),
                    prominence=_fmt(self.prominence), detect_source=self.detect_source)
        if self.simulation is not None:
            for key, name in SIM_KEYS.items():
                flat[key] = _fmt(getattr(self.simulation, name))
        flat.update(output_path=self.output_path, output_format=self.output_format)
        return flat

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.to_flat().items())


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_lines(source: str) -> dict[str, tuple[str, int | None]]:
    """``key -> (raw value, line number)`` from a key=value or JSON document."""
    text = source.strip()
    if text.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc.msg}", line=exc.lineno) from None
        if isinstance(doc, dict) and isinstance(doc.get("config"), dict):
            doc = doc["config"]
        if not isinstance(doc, dict):
            raise ConfigError("JSON config must be an object")
        return {str(k): (_fmt(v), None) for k, v in doc.items()}
    entries = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {raw.strip()!r}", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=lineno)
        if key in entries:
            raise ConfigError("duplicate key", key=key, line=lineno)
        entries[key] = (value, lineno)
    return entries


def parse_overrides(items) -> dict[str, tuple[str, None]]:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, value = (part.strip() for part in item.split("=", 1))
        out[key] = (value, None)
    return out


class _Reader:
    def __init__(self, entries):
        self.entries = entries

    def has(self, key):
        return key in self.entries

    def raw(self, key, default=None):
        if key not in self.entries:
            return default
        return self.entries[key][0]

    def fail(self, key, message):
        line = self.entries.get(key, (None, None))[1]
        raise ConfigError(message, key=key, line=line)

    def number(self, key, default=None):
        raw = self.raw(key)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            self.fail(key, f"cannot parse {raw!r} as a number")

    def integer(self, key, default=None):
        raw = self.raw(key)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            self.fail(key, f"cannot parse {raw!r} as an integer")

    def boolean(self, key, default=False):
        raw = self.raw(key)
        if raw is None:
            return default
        lowered = raw.lower()
        if lowered in ("true", "yes", "1", "on"):
            return True
        if lowered in ("false", "no", "0", "off"):
            return False
        self.fail(key, f"cannot parse {raw!r} as a boolean")

    def choice(self, key, options, default=None):
        raw = self.raw(key, default)
        if raw is not None and raw not in options:
            self.fail(key, f"must be one of {', '.join(options)}, got {raw!r}")
        return raw


def parse_config(source: str = "", overrides=None, preset: str | None = None) -> RunConfig:
    """Validate a flat configuration document into a :class:`RunConfig`.

    Precedence, lowest first: ``preset`` (or a ``preset=`` key in the source),
    the source document, then ``overrides`` (a mapping or ``key=value`` strings).
    Unknown keys are errors.
    """
    entries = _parse_lines(source)
    if isinstance(overrides, dict):
        override_entries = {k: (_fmt(v), None) for k, v in overrides.items()}
    else:
        override_entries = parse_overrides(overrides)
    merged = dict(entries)
    merged.update(override_entries)

    preset = merged.get("preset", (preset, None))[0] if preset is None else preset
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(sorted(PRESETS))}",
                              key="preset", line=merged.get("preset", (None, None))[1])
        base = {k: (v, None) for k, v in PRESETS[preset].items()}
        base.update(merged)
        merged = base
    for key, (_, line) in merged.items():
        if key not in KNOWN_KEYS:
            raise ConfigError("unknown key", key=key, line=line)

    r = _Reader(merged)
    micro_mode = r.boolean("microscopic", False)
    required = ["command", "output_path", "gamma_A", "gamma_B"]
    required += list(MICRO_KEYS) if micro_mode else ["G_A", "G_B"]
    command_raw = merged.get("command", (None, None))[0]
    if command_raw == "stochastic":
        required += ["time_step", "duration", "burn_in", "trajectories"]
    missing = [k for k in required if not r.has(k)]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}", key=missing[0])
    if micro_mode:
        clash = [k for k in ("G_A", "G_B", "chi") if r.has(k)]
        if clash:
            r.fail(clash[0], "cannot be combined with microscopic=true")

    command = r.choice("command", COMMANDS)

    values = {}
    for key, name in PARAM_KEYS.items():
        if r.has(key):
            values[name] = r.number(key)

    micro = None
    atom_counts = (r.integer("n_atoms_a"), r.integer("n_atoms_b"))
    if micro_mode:
        micro_values = {}
        for key, name in MICRO_KEYS.items():
            micro_values[name] = r.integer(key) if key.startswith("n_atoms") else r.number(key)
        micro = _build(MicroscopicParams, micro_values, MICRO_KEYS, r)
    for key, count in zip(("n_atoms_a", "n_atoms_b"), atom_counts):
        if count is not None and count < 1:
            r.fail(key, f"must be >= 1, got {count}")
    if micro_mode:
        params = _build(lambda **kw: SystemParams.from_microscopic(micro, **kw), values,
                        PARAM_KEYS, r)
    else:
        params = _build(SystemParams, values, PARAM_KEYS, r)

    start = r.number("grid_start", -100.0)
    stop = r.number("grid_stop", 100.0)
    count = r.integer("grid_count", 2001)
    if count < 2:
        r.fail("grid_count", f"must be >= 2, got {count}")
    if not start < stop:
        r.fail("grid_start", f"grid_start ({start!r}) must be below grid_stop ({stop!r})")

    degenerate = r.boolean("degenerate", True)
    prominence = r.number("prominence", 0.02)
    if not prominence >= 0:
        r.fail("prominence", f"must be >= 0, got {prominence!r}")
    detect_source = r.choice("detect_source", DETECT_SOURCES, "response")

    simulation = None
    if command == "stochastic" or any(r.has(k) for k in SIM_KEYS):
        sim_values = {}
        for key, name in SIM_KEYS.items():
            if not r.has(key):
                continue
            if name in ("time_step", "duration", "burn_in"):
                sim_values[name] = r.number(key)
            elif name == "taper":
                sim_values[name] = r.choice(key, TAPERS)
            else:
                sim_values[name] = r.integer(key)
        if command == "stochastic" or {"time_step", "duration"} <= sim_values.keys():
            simulation = _build(SimulationConfig, sim_values, SIM_KEYS, r)

    default_format = "json" if command in ("steady", "detect") else "csv"
    output_format = r.choice("output_format", FORMATS, default_format)
    if command in ("steady", "detect") and output_format != "json":
        r.fail("output_format", f"the {command} command writes JSON only")
    output_path = r.raw("output_path")
    if not output_path:
        r.fail("output_path", "must not be empty")

    return RunConfig(command=command, params=params, output_path=output_path,
                     output_format=output_format, grid=(start, stop, count),
                     degenerate=degenerate, prominence=prominence, detect_source=detect_source,
                     simulation=simulation, microscopic=micro, atom_counts=atom_counts,
                     preset=preset)


def _build(factory, values, key_map, reader):
    """Construct a record, translating field names in errors back to config keys."""
    try:
        return factory(**values)
    except ConfigError as exc:
        reverse = {name: key for key, name in key_map.items()}
        key = reverse.get(exc.key, exc.key)
        message = str(exc).split(" (key")[0]
        if exc.key:
            message = message.replace(exc.key, key)
        reader.fail(key, message)


def dump_sidecar(config: RunConfig, version: str, warnings=()) -> dict:
    return {
        "tool": "eitcavity",
        "version": version,
        "command": config.command,
        "preset": config.preset,
        "config": config.to_flat(),
        "resolved_params": {f.name: getattr(config.params, f.name) for f in fields(config.params)},
        "warnings": list(warnings),
    }
