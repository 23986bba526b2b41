"""Command-line entry point: ``eitcavity <command> [options] [key=value ...]``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import detect_windows
from .config import COMMANDS, PRESETS, RunConfig, dump_sidecar, parse_config
from .errors import ConfigError, EitCavityError
from .spectra import spectrum_sweep
from .steady import response_sweep, steady_state_analytic, uniform_grid
from .stochastic import estimate_spectrum

EXIT_IO = 5


def _csv_number(value: float) -> str:
    return format(float(value), ".17g")


def _write_table(path: Path, columns: dict[str, np.ndarray], fmt: str) -> None:
    if fmt == "csv":
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in zip(*columns.values()):
                writer.writerow([_csv_number(v) for v in row])
    else:
        doc = {name: [None if not np.isfinite(v) else float(v) for v in values]
               for name, values in columns.items()}
        _write_json(path, doc)


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, allow_nan=False) + "\n", encoding="utf-8")


def _spectrum_columns(curve):
    return {"omega": curve.grid, "s_c": curve.s_c, "s_a": curve.s_a, "s_b": curve.s_b}


def _compute(config: RunConfig, notes: list[str]):
    """Return ``(payload, is_table)`` for the configured command."""
    grid = uniform_grid(*config.grid)
    if config.command == "steady":
        state = steady_state_analytic(config.params, *config.atom_counts)
        # "+ 0.0" folds negative zeros
        return {name: [amp.real + 0.0, amp.imag + 0.0] for name, amp in
                (("amp_c", state.amp_c), ("amp_a", state.amp_a), ("amp_b", state.amp_b))}, False
    if config.command == "response":
        curve = response_sweep(config.params, grid, config.degenerate)
        return {"delta": curve.grid, "intensity_a": curve.intensity_a,
                "intensity_b": curve.intensity_b, "intensity_c": curve.intensity_c}, True
    if config.command == "flucspec":
        return _spectrum_columns(spectrum_sweep(config.params, grid)), True
    if config.command == "stochastic":
        curve = estimate_spectrum(config.params, config.simulation, grid)
        notes.extend(curve.warnings)
        return _spectrum_columns(curve), True
    if config.command == "detect":
        if config.detect_source == "response":
            curve = response_sweep(config.params, grid, config.degenerate)
            names = ("intensity_a", "intensity_b", "intensity_c")
        else:
            curve = spectrum_sweep(config.params, grid)
            names = ("s_a", "s_b", "s_c")
        return {"source": config.detect_source, "prominence": config.prominence,
                "channels": {name: detect_windows(curve, name, config.prominence).to_dict()
                             for name in names}}, False
    raise ConfigError(f"unknown command {config.command!r}", key="command")


def run(config: RunConfig) -> int:
    """Execute one configured command, writing its output and parameter sidecar.

    Returns 0; typed errors propagate to :func:`main`, which maps them to exit codes.
    """
    out = Path(config.output_path)
    notes: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        payload, is_table = _compute(config, notes)
    notes.extend(str(w.message) for w in caught)
    for note in notes:
        print(f"warning: {note}", file=sys.stderr)

    if is_table:
        _write_table(out, payload, config.output_format)
    else:
        _write_json(out, payload)
    sidecar = out.with_name(out.name + ".params.json")
    _write_json(sidecar, dump_sidecar(config, __version__, notes))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eitcavity",
        description="Steady-state response and fluctuation spectra of two atomic "
                    "ensembles coupled through one cavity mode.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", metavar="FILE", help="flat key=value configuration file")
    parser.add_argument("--preset", choices=sorted(PRESETS), help="built-in parameter set")
    parser.add_argument("--out", metavar="PATH", help="output file (sidecar: PATH.params.json)")
    parser.add_argument("--format", choices=("csv", "json"), dest="output_format")
    parser.add_argument("--seed", type=int, metavar="U64", help="stochastic seed")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("overrides", nargs="*", metavar="key=value")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_intermixed_args(argv)
    try:
        source = ""
        if args.config:
            try:
                source = Path(args.config).read_text(encoding="utf-8")
            except OSError as exc:
                print(f"error: cannot read config: {exc}", file=sys.stderr)
                return EXIT_IO
        overrides = list(args.overrides) + [f"command={args.command}"]
        for key, value in (("output_path", args.out), ("output_format", args.output_format),
                           ("seed", args.seed)):
            if value is not None:
                overrides.append(f"{key}={value}")
        config = parse_config(source, overrides, preset=args.preset)
        return run(config)
    except EitCavityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
