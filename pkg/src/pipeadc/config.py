"""
config.py

Flat dotted-key configuration documents::

    # comment
    adc.vref = 0.6
    stages.3.tau = 4.76e-10
    sweep.adc.ota_sharing = on, off

Later assignments win; command-line ``key=value`` overrides beat the file.
Two documents ship with the package: ``ideal`` and ``paper_point``.
"""

import dataclasses
import itertools
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .compare import PowerCalibration
from .core import DEFAULT_FS, DEFAULT_VREF, N_STAGES, AdcConfig, StageParams


class ConfigError(ValueError):
    """Malformed or unknown configuration entry."""


SHIPPED = ("ideal", "paper_point")

_STAGE_FIELDS = {
    "gain_error": float,
    "offset": float,
    "tau": float,
    "cmp_lo": float,
    "cmp_hi": float,
}


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "on", "yes"):
        return True
    if t in ("0", "false", "off", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int(text):
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


def _schema():
    s = {
        "adc.vref": float,
        "adc.fs": float,
        "adc.ota_sharing": _parse_bool,
        "adc.sharing_memory": float,
        "adc.noise_sigma": float,
        "adc.seed": _parse_int,
        "sha.gain_error": float,
        "sha.offset": float,
        "sha.tau": float,
        "ramp.n": _parse_int,
        "tone.n": _parse_int,
        "tone.fin": float,
        "tone.amplitude": float,
        "tone.harmonics": _parse_int,
        "power.p_ota": float,
        "power.p_comparators": float,
        "power.p_digital_clock": float,
        "power.enob": float,
        "compare.n_bits": _parse_int,
        "compare.fs": float,
        "compare.flash_sigma": float,
        "compare.flash_trials": _parse_int,
        "compare.sd_amplitude": float,
        "compare.sd_samples": _parse_int,
    }
    for i in range(1, N_STAGES + 1):
        for name, conv in _STAGE_FIELDS.items():
            s[f"stages.{i}.{name}"] = conv
    for j in range(1, 4):
        s[f"flash.shift.{j}"] = float
    return s


SCHEMA = _schema()


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand needs, resolved from defaults, file and overrides."""

    adc: AdcConfig
    ramp_n: int = 32768
    tone_n: int = 8192
    tone_fin: float = 10.417e6
    tone_amplitude: float = DEFAULT_VREF
    tone_harmonics: int = 5
    power: PowerCalibration = field(default_factory=PowerCalibration)
    power_enob: float = 7.33
    compare_n_bits: int = 8
    compare_fs: float = DEFAULT_FS
    compare_flash_sigma: float = 0.01
    compare_flash_trials: int = 1000
    compare_sd_amplitude: float = 0.5
    compare_sd_samples: int = 2 ** 16
    sweep: tuple = ()
    values: dict = field(default_factory=dict, repr=False)


def parse_text(text, source="<config>"):
    """Parse a document into ``{key: raw string}``; syntax errors raise ConfigError."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        raw[key] = value
    return raw


def shipped_text(name):
    return resources.files("pipeadc").joinpath("configs", f"{name}.cfg").read_text()


def read_config_source(path):
    """Read a config from a file path, or from a shipped config name."""
    p = Path(path)
    if p.is_file():
        return parse_text(p.read_text(), str(p))
    if str(path) in SHIPPED:
        return parse_text(shipped_text(str(path)), str(path))
    raise ConfigError(f"config file not found: {path}")


def convert_values(raw):
    """Type-check raw strings against the schema; ``sweep.*`` keys hold comma lists."""
    values, sweep = {}, []
    for key, text in raw.items():
        if key.startswith("sweep."):
            target = key[len("sweep."):]
            if target not in SCHEMA:
                raise ConfigError(f"unknown sweep key '{key}'")
            items = [t for t in (s.strip() for s in text.split(",")) if t]
            if not items:
                raise ConfigError(f"sweep key '{key}' has an empty value list")
            try:
                sweep.append((target, tuple(SCHEMA[target](t) for t in items)))
            except ValueError as exc:
                raise ConfigError(f"bad value for '{key}': {exc}") from None
            continue
        if key not in SCHEMA:
            raise ConfigError(f"unknown key '{key}'")
        try:
            values[key] = SCHEMA[key](text)
        except ValueError as exc:
            raise ConfigError(f"bad value for '{key}': {exc}") from None
        if isinstance(values[key], float) and not math.isfinite(values[key]):
            raise ConfigError(f"bad value for '{key}': must be finite")
    return values, tuple(sweep)


def build_adc_config(values):
    def get(key, default):
        return values.get(key, default)

    stages = []
    for i in range(1, N_STAGES + 1):
        pre = f"stages.{i}."
        stages.append(StageParams(
            gain_error=get(pre + "gain_error", 0.0),
            offset=get(pre + "offset", 0.0),
            tau=get(pre + "tau", 0.0),
            cmp_threshold_shift=(get(pre + "cmp_lo", 0.0), get(pre + "cmp_hi", 0.0)),
        ))
    return AdcConfig(
        vref=get("adc.vref", DEFAULT_VREF),
        sha=StageParams(get("sha.gain_error", 0.0), get("sha.offset", 0.0), get("sha.tau", 0.0)),
        stages=tuple(stages),
        flash_threshold_shifts=tuple(get(f"flash.shift.{j}", 0.0) for j in range(1, 4)),
        fs=get("adc.fs", DEFAULT_FS),
        ota_sharing=get("adc.ota_sharing", True),
        sharing_memory=get("adc.sharing_memory", 0.0),
        noise_sigma=get("adc.noise_sigma", 0.0),
        seed=get("adc.seed", 0),
    )


def build_run_config(values, sweep=()):
    """Assemble a RunConfig; invalid physical values surface as ConfigError."""
    try:
        adc = build_adc_config(values)
        cal = PowerCalibration(**{
            name: values[f"power.{name}"]
            for name in ("p_ota", "p_comparators", "p_digital_clock")
            if f"power.{name}" in values
        })
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    get = values.get
    defaults = RunConfig(adc=adc)
    return RunConfig(
        adc=adc,
        ramp_n=get("ramp.n", defaults.ramp_n),
        tone_n=get("tone.n", defaults.tone_n),
        tone_fin=get("tone.fin", defaults.tone_fin),
        tone_amplitude=get("tone.amplitude", adc.vref),
        tone_harmonics=get("tone.harmonics", defaults.tone_harmonics),
        power=cal,
        power_enob=get("power.enob", defaults.power_enob),
        compare_n_bits=get("compare.n_bits", defaults.compare_n_bits),
        compare_fs=get("compare.fs", adc.fs),
        compare_flash_sigma=get("compare.flash_sigma", defaults.compare_flash_sigma),
        compare_flash_trials=get("compare.flash_trials", defaults.compare_flash_trials),
        compare_sd_amplitude=get("compare.sd_amplitude", defaults.compare_sd_amplitude),
        compare_sd_samples=get("compare.sd_samples", defaults.compare_sd_samples),
        sweep=tuple(sweep),
        values=dict(values),
    )


def load_run_config(path=None, overrides=(), seed=None, ideal=False):
    """
    Resolve a RunConfig.

    :param path: config file, or a shipped name; ``paper_point`` when None
    :param overrides: ``key=value`` strings applied after the file
    :param seed: replaces ``adc.seed`` when given
    :param ideal: zero every non-ideality after loading
    """
    raw = read_config_source(path if path is not None else "paper_point")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, value = (part.strip() for part in item.split("=", 1))
        raw[key] = value
    values, sweep = convert_values(raw)
    if seed is not None:
        values["adc.seed"] = int(seed)
    run = build_run_config(values, sweep)
    if ideal:
        run = dataclasses.replace(run, adc=run.adc.idealized())
    return run


def sweep_points(run):
    """Cartesian product of the sweep grid, in declaration order."""
    if not run.sweep:
        raise ConfigError("sweep grid is empty; declare at least one sweep.<key> entry")
    keys = [k for k, _ in run.sweep]
    for combo in itertools.product(*(v for _, v in run.sweep)):
        values = dict(run.values)
        values.update(zip(keys, combo))
        yield dict(zip(keys, combo)), build_run_config(values)
