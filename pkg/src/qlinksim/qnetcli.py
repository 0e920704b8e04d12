"""Command-line front end: config files, scenario execution, CSV/SVG output.

Config files are TOML with unit-suffixed quantity strings ("120 km",
"5 MHz"); everything is normalized to SI on parse.  Unknown keys are
rejected.  Exit codes: 0 success, 1 usage error, 2 config error,
3 numerical-guard error.  No output file is written on a nonzero exit.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
import typing
from dataclasses import fields as dc_fields, is_dataclass, replace

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import scenarios
from .chainoptics import ChainSpec, ErrorSpec, SatelliteLens
from .errors import (
    AliasingError,
    BracketExhaustedError,
    ConfigError,
    DegenerateParameterError,
    GridTooCoarseError,
    NoKeyAtZeroLossError,
    QLinkError,
    UnknownParameterError,
    UnknownPresetError,
    UnknownWavelengthError,
    WindowTooSmallError,
    ZeroPowerError,
)
from .linkgeom import AttenuationModel, GroundLink
from .ratemodels import ProtocolParams, RateCurve
from .scenarios import Report, ScenarioConfig
from .turbulence import AtmosphereProfile, UplinkGeometry
from .wavefield import GaussianSpec

__all__ = ["parse_config", "serialize_config", "emit_outputs", "main"]

_NUMERICAL_ERRORS = (
    AliasingError,
    BracketExhaustedError,
    DegenerateParameterError,
    GridTooCoarseError,
    NoKeyAtZeroLossError,
    WindowTooSmallError,
    ZeroPowerError,
)

# unit suffix -> (SI factor, dimension)
_UNITS = {
    "m": (1.0, "length"), "km": (1e3, "length"), "cm": (1e-2, "length"),
    "mm": (1e-3, "length"), "um": (1e-6, "length"), "nm": (1e-9, "length"),
    "s": (1.0, "time"), "ms": (1e-3, "time"), "us": (1e-6, "time"),
    "ns": (1e-9, "time"),
    "Hz": (1.0, "rate"), "kHz": (1e3, "rate"), "MHz": (1e6, "rate"),
    "GHz": (1e9, "rate"),
    "rad": (1.0, "angle"), "mrad": (1e-3, "angle"), "urad": (1e-6, "angle"),
    "nrad": (1e-9, "angle"),
    "dB": (1.0, "db"), "deg": (1.0, "deg"),
}

# expected dimension per config field name (fields absent here are plain numbers)
_FIELD_DIMS = {
    "separation": "length", "focal_length": "length", "aperture_diameter": "length",
    "wavelength": "length", "waist": "length", "curvature": "length",
    "total_ground_distance": "length", "orbit_altitude": "length",
    "tx_aperture": "length", "rx_aperture": "length", "tx_waist": "length",
    "window": "length", "r0": "length", "lateral_abs": "length",
    "link_length": "length", "repeater_orbit_altitude": "length",
    "repeater_tx_aperture": "length", "repeater_rx_aperture": "length",
    "repeater_wavelength": "length",
    "transmission_period": "time", "coincidence_window": "time",
    "source_rate": "rate", "pair_source_rate": "rate",
    "memory_dephasing_rate": "rate",
    "pointing_jitter": "angle", "space_divergence_full": "angle",
    "zenith_deg": "deg", "geo_min_elevation_deg": "deg",
    "channel_loss_db": "db", "detection_allowance_db": "db",
    "per_link_loss_db": "db", "calibrate_uplink_db": "db",
    "zenith_attenuation_db": "db", "vbg_element_db_per_km": "db",
}


def _parse_quantity(text: str, field_name: str):
    parts = text.split()
    if len(parts) != 2:
        raise ConfigError(
            f"field {field_name!r}: cannot parse quantity {text!r} "
            "(expected '<number> <unit>')"
        )
    try:
        value = float(parts[0])
    except ValueError:
        raise ConfigError(f"field {field_name!r}: bad number in {text!r}") from None
    unit = parts[1]
    if unit not in _UNITS:
        raise ConfigError(f"field {field_name!r}: unknown unit {unit!r}")
    factor, dim = _UNITS[unit]
    expected = _FIELD_DIMS.get(field_name)
    if expected is not None and dim != expected:
        raise ConfigError(
            f"field {field_name!r}: unit {unit!r} has dimension {dim}, "
            f"expected {expected}"
        )
    return value * factor


def _coerce(value, field_name: str, target_type):
    """Convert a parsed TOML value to the config field's type."""
    origin = typing.get_origin(target_type)
    if origin is typing.Union:
        args = [a for a in typing.get_args(target_type) if a is not type(None)]
        if value is None:
            return None
        return _coerce(value, field_name, args[0])
    if isinstance(value, str) and target_type in (float, int):
        out = _parse_quantity(value, field_name)
        return int(out) if target_type is int else out
    if target_type is float and isinstance(value, (int, float)):
        return float(value)
    if target_type is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"field {field_name!r}: expected integer, got {value!r}")
        return value
    if target_type is str:
        if not isinstance(value, str):
            raise ConfigError(f"field {field_name!r}: expected string, got {value!r}")
        return value
    if origin is tuple or target_type is tuple:
        if not isinstance(value, list):
            raise ConfigError(f"field {field_name!r}: expected array, got {value!r}")
        return tuple(
            _parse_quantity(v, field_name) if isinstance(v, str) else float(v)
            for v in value
        )
    raise ConfigError(f"field {field_name!r}: unsupported value {value!r}")


def _build_dataclass(cls, data: dict, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"section {path!r} must be a table")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dc_fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(
            f"unknown key(s) in {path or 'config'}: {', '.join(sorted(unknown))}"
        )
    kwargs = {}
    for f in dc_fields(cls):
        if f.name not in data:
            continue
        raw = data[f.name]
        target = hints[f.name]
        sub = _nested_dataclass(target)
        if sub is not None:
            if cls is AttenuationModel or sub is dict:
                kwargs[f.name] = raw
            else:
                kwargs[f.name] = _build_dataclass(sub, raw, f"{path}.{f.name}".strip("."))
        else:
            kwargs[f.name] = _coerce(raw, f.name, target)
    try:
        return cls(**kwargs)
    except (ValueError, QLinkError) as exc:
        raise ConfigError(f"invalid {path or cls.__name__}: {exc}") from exc


def _nested_dataclass(target_type):
    """The dataclass inside a (possibly Optional) field type, else None."""
    if is_dataclass(target_type):
        return target_type
    if typing.get_origin(target_type) is typing.Union:
        for a in typing.get_args(target_type):
            if is_dataclass(a):
                return a
    return None


def _build_attenuation(data, path) -> AttenuationModel:
    if not isinstance(data, dict):
        raise ConfigError(f"section {path!r} must be a table of 'wavelength = dB'")
    table = {}
    for key, val in data.items():
        wl = _parse_quantity(key, "wavelength")
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise ConfigError(f"attenuation for {key!r} must be a number (dB)")
        table[wl] = float(val)
    try:
        return AttenuationModel(zenith_db=table)
    except ValueError as exc:
        raise ConfigError(f"invalid {path}: {exc}") from exc


def parse_config(text: str) -> ScenarioConfig:
    """Parse a TOML scenario document into a validated ScenarioConfig."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    base = None
    if "preset" in data:
        name = data.pop("preset")
        if not isinstance(name, str):
            raise ConfigError("preset must be a string")
        base = scenarios.preset(name)
    if "attenuation" in data:
        data = dict(data)
        attenuation = _build_attenuation(data.pop("attenuation"), "attenuation")
    else:
        attenuation = None
    config = _build_dataclass(ScenarioConfig, data, "")
    if base is not None:
        overrides = {k: getattr(config, k) for k in data}
        config = replace(base, **overrides)
    if attenuation is not None:
        config = replace(config, attenuation=attenuation)
    return config


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        if isinstance(value, float) and (math.isnan(value) or math.isinf(value)):
            raise ConfigError("cannot serialize non-finite number")
        return repr(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise ConfigError(f"cannot serialize {value!r}")


def _serialize_section(obj, path: str, lines: list):
    if isinstance(obj, AttenuationModel):
        lines.append(f"[{path}]")
        for k, v in obj.zenith_db.items():
            lines.append(f'"{k!r} m" = {_toml_value(v)}')
        lines.append("")
        return
    scalars, tables = [], []
    for f in dc_fields(obj):
        val = getattr(obj, f.name)
        if val is None:
            continue
        if is_dataclass(val):
            tables.append((f.name, val))
        elif isinstance(val, dict):
            tables.append((f.name, val))
        else:
            scalars.append((f.name, val))
    if path:
        lines.append(f"[{path}]")
    for name, val in scalars:
        lines.append(f"{name} = {_toml_value(val)}")
    lines.append("")
    for name, val in tables:
        sub = f"{path}.{name}" if path else name
        if isinstance(val, dict):
            lines.append(f"[{sub}]")
            for k, v in val.items():
                lines.append(f'"{k!r} m" = {_toml_value(v)}')
            lines.append("")
        else:
            _serialize_section(val, sub, lines)


def serialize_config(config: ScenarioConfig) -> str:
    """Round-trippable TOML for a config (SI values, no unit suffixes)."""
    lines: list = []
    _serialize_section(config, "", lines)
    return "\n".join(lines).strip() + "\n"


# --- outputs ------------------------------------------------------------------


def _atomic_write(path: str, content: str):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(content)
    os.replace(tmp, path)


def _budget_csv(report: Report) -> str:
    rows = ["component,db"]
    rows += [f"{name},{val:.9g}" for name, val in report.budget.items()]
    return "\n".join(rows) + "\n"


def _curves_csv(curve: RateCurve) -> str:
    rows = ["abscissa,value,tag"]
    rows += [
        f"{a:.9g},{r:.9g},{curve.protocol}" for a, r in zip(curve.abscissa, curve.rates)
    ]
    return "\n".join(rows) + "\n"


def _trace_csv(report: Report) -> str:
    rows = ["hop,cum_db"]
    rows += [f"{hop},{db:.9g}" for hop, db in report.trace]
    return "\n".join(rows) + "\n"


def _svg_header(width: int, height: int) -> str:
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">'
    )


def _budget_svg(report: Report) -> str:
    items = [(n, v) for n, v in report.budget.items() if n != "total"]
    width, bar_h, left = 640, 24, 180
    height = bar_h * len(items) + 40
    vmax = max(v for _, v in items) or 1.0
    parts = [_svg_header(width, height)]
    parts.append(
        f'<text x="8" y="16" font-family="sans-serif" font-size="13">'
        f"loss budget, total {report.budget.total:.2f} dB</text>"
    )
    for i, (name, val) in enumerate(items):
        y = 28 + i * bar_h
        w = (width - left - 60) * val / vmax
        parts.append(
            f'<text x="8" y="{y + 15}" font-family="sans-serif" font-size="11">{name}</text>'
        )
        parts.append(
            f'<rect x="{left}" y="{y + 3}" width="{w:.1f}" height="{bar_h - 8}" fill="#4878a8"/>'
        )
        parts.append(
            f'<text x="{left + w + 4:.1f}" y="{y + 15}" font-family="sans-serif" '
            f'font-size="11">{val:.2f}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _curve_svg(curve: RateCurve) -> str:
    width, height, pad = 640, 400, 50
    xs, ys = list(curve.abscissa), list(curve.rates)
    positive = [y for y in ys if y > 0]
    logy = bool(positive) and max(positive) / min(positive) > 100
    ymin = min(positive) if logy else min(ys)
    ymax = max(positive) if logy else (max(ys) or 1.0)
    if ymax == ymin:
        ymax = ymin + 1.0
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x1 = x0 + 1.0

    def px(x):
        return pad + (width - 2 * pad) * (x - x0) / (x1 - x0)

    def py(y):
        if logy:
            y = max(y, ymin)
            frac = (math.log10(y) - math.log10(ymin)) / (
                math.log10(ymax) - math.log10(ymin)
            )
        else:
            frac = (y - ymin) / (ymax - ymin)
        return height - pad - (height - 2 * pad) * frac

    pts = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in zip(xs, ys))
    parts = [_svg_header(width, height)]
    parts.append(
        f'<text x="8" y="16" font-family="sans-serif" font-size="13">'
        f"{curve.protocol}: {curve.rate_label} vs {curve.abscissa_label}"
        f'{" (log y)" if logy else ""}</text>'
    )
    parts.append(
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" '
        f'height="{height - 2 * pad}" fill="none" stroke="#999"/>'
    )
    parts.append(
        f'<polyline points="{pts}" fill="none" stroke="#a85048" stroke-width="2"/>'
    )
    for lab, x, y, anchor in (
        (f"{x0:.4g}", pad, height - pad + 16, "middle"),
        (f"{x1:.4g}", width - pad, height - pad + 16, "middle"),
        (f"{ymin:.4g}", pad - 4, height - pad, "end"),
        (f"{ymax:.4g}", pad - 4, pad + 8, "end"),
    ):
        parts.append(
            f'<text x="{x}" y="{y}" font-family="sans-serif" font-size="11" '
            f'text-anchor="{anchor}">{lab}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _manifest(report: Report, config: ScenarioConfig) -> str:
    import numpy

    head = (
        f"qlinksim_version: {report.version}\n"
        f"numpy_version: {numpy.__version__}\n"
    )
    return head + report.to_text() + "---- config ----\n" + serialize_config(config)


def emit_outputs(report: Report, outdir: str, config: ScenarioConfig) -> list:
    """Write budget.csv, trace.csv, curves.csv (if any), plot.svg, manifest.txt."""
    os.makedirs(outdir, exist_ok=True)
    written = []

    def put(name, content):
        path = os.path.join(outdir, name)
        _atomic_write(path, content)
        written.append(path)

    put("budget.csv", _budget_csv(report))
    put("trace.csv", _trace_csv(report))
    if report.curve is not None:
        put("curves.csv", _curves_csv(report.curve))
        put("plot.svg", _curve_svg(report.curve))
    else:
        put("plot.svg", _budget_svg(report))
    put("manifest.txt", _manifest(report, config))
    return written


# --- command dispatch -----------------------------------------------------------


def _override_value(raw: str, field_name: str):
    low = raw.strip()
    if low in ("true", "false"):
        return low == "true"
    if low == "none":
        return None
    try:
        return int(low)
    except ValueError:
        pass
    try:
        return float(low)
    except ValueError:
        pass
    if " " in low:
        return _parse_quantity(low, field_name)
    return low


def _apply_overrides(config: ScenarioConfig, pairs) -> ScenarioConfig:
    for pair in pairs or ():
        if "=" not in pair:
            raise ConfigError(f"override {pair!r} must be path=value")
        path, raw = pair.split("=", 1)
        path = path.strip()
        parts = path.split(".")
        obj = config
        stack = [obj]
        for p in parts[:-1]:
            if not is_dataclass(obj) or p not in {f.name for f in dc_fields(obj)}:
                raise ConfigError(f"unknown override path {path!r}")
            obj = getattr(obj, p)
            stack.append(obj)
        leaf = parts[-1]
        if not is_dataclass(obj) or leaf not in {f.name for f in dc_fields(obj)}:
            raise ConfigError(f"unknown override path {path!r}")
        value = _override_value(raw, leaf)
        current = getattr(obj, leaf)
        if isinstance(current, float) and isinstance(value, int):
            value = float(value)
        try:
            new = replace(obj, **{leaf: value})
            for parent, name in zip(reversed(stack[:-1]), reversed(parts[:-1])):
                new = replace(parent, **{name: new})
        except (ValueError, QLinkError) as exc:
            raise ConfigError(f"invalid override {pair!r}: {exc}") from exc
        config = new
    return config


def _load_config(args) -> ScenarioConfig:
    if getattr(args, "config", None):
        if not os.path.exists(args.config):
            raise ConfigError(f"config file not found: {args.config}")
        with open(args.config) as fh:
            config = parse_config(fh.read())
    elif getattr(args, "preset", None):
        config = scenarios.preset(args.preset)
    else:
        raise ConfigError("one of --preset or --config is required")
    config = _apply_overrides(config, getattr(args, "set", None))
    if getattr(args, "seed", None) is not None:
        config = replace(config, seed=args.seed)
    return config


def _parse_grid(text: str):
    if ":" in text:
        start, stop, count = text.split(":")
        n = int(count)
        start, stop = float(start), float(stop)
        return [start + (stop - start) * i / (n - 1) for i in range(n)]
    return [float(t) for t in text.split(",")]


def _summary_line(report: Report) -> str:
    bits = [f"total {report.budget.total:.2f} dB"]
    for name, val in report.rates:
        bits.append(f"{name} {val:.4g}")
    for name in ("excess_db_mean", "uplink_loss_db_mean", "mode_fraction_mean"):
        try:
            bits.append(f"{name} {report.stat(name):.4g}")
        except KeyError:
            pass
    return ", ".join(bits)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlink", description="satellite quantum-link simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trials=False):
        p.add_argument("--preset", help="scenario preset name")
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--set", action="append", metavar="PATH=VALUE",
                       help="override a config field (repeatable)")
        p.add_argument("--out", default=os.environ.get("QLINK_OUTDIR", "out"),
                       help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("-v", "--verbose", action="count", default=0)
        if trials:
            p.add_argument("--trials", type=int, default=50)

    common(sub.add_parser("run", help="single scenario run"))
    common(sub.add_parser("mc", help="Monte Carlo ensemble"), trials=True)
    p_sweep = sub.add_parser("sweep", help="parameter sweep")
    common(p_sweep)
    p_sweep.add_argument("--param", required=True, help="dotted config path")
    p_sweep.add_argument("--grid", required=True,
                         help="comma list or start:stop:count")
    sub.add_parser("presets", help="list scenario presets")
    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("--config", required=True)
    p_val.add_argument("--set", action="append", metavar="PATH=VALUE")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1

    try:
        if args.command == "presets":
            for name in sorted(scenarios.PRESETS):
                print(name)
            return 0

        if args.command == "validate":
            config = _load_config(args)
            print(f"ok: {config.kind}")
            return 0

        config = _load_config(args)
        if args.command == "run":
            report = scenarios.run_scenario(config)
        elif args.command == "mc":
            report = scenarios.monte_carlo(
                config, trials=args.trials, seed=config.seed
            )
        else:  # sweep
            curve = scenarios.sweep(config, args.param, _parse_grid(args.grid))
            report = Report(
                kind=config.kind,
                budget=scenarios.LossBudget(),
                curve=curve,
                config_hash=scenarios.config_hash(config),
                seed=config.seed,
            )
        emit_outputs(report, args.out, config)
        print(_summary_line(report))
        return 0
    except (ConfigError, UnknownPresetError, UnknownParameterError,
            UnknownWavelengthError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical guard: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
