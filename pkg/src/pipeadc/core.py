"""
core.py

Stateless behavioral transfer functions for the analog blocks of the
pipelined converter: sample-and-hold, 1.5-bit stage sub-ADC and MDAC,
2-bit backend flash and single-pole exponential settling.

Voltages passed to the stage and flash functions are normalized to the
reference (x = v / vref, full scale [-1, 1]). The sample-and-hold and the
settling model work in volts.
"""

import enum
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

N_STAGES = 6
N_BITS = 8

DEFAULT_VREF = 0.6
DEFAULT_FS = 166.6e6


class ClockPhase(enum.Enum):
    """Two non-overlapping phases, each half a sample period long."""

    CK1 = 1
    CK2 = 2


def _check_finite(name, value):
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class StageParams:
    """
    Non-idealities of one amplifying block (SHA or MDAC stage).

    :param gain_error: fractional closed-loop gain error (0 = ideal)
    :param offset: output-referred offset in volts
    :param tau: settling time constant in seconds, 0 means instantaneous
    :param cmp_threshold_shift: shifts of the (low, high) sub-ADC
        comparator thresholds in volts
    """

    gain_error: float = 0.0
    offset: float = 0.0
    tau: float = 0.0
    cmp_threshold_shift: tuple = (0.0, 0.0)

    def __post_init__(self):
        for name in ("gain_error", "offset", "tau"):
            _check_finite(name, getattr(self, name))
        if self.tau < 0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        if abs(self.gain_error) >= 0.5:
            raise ValueError(f"|gain_error| must be < 0.5, got {self.gain_error}")
        shifts = tuple(float(s) for s in self.cmp_threshold_shift)
        if len(shifts) != 2:
            raise ValueError("cmp_threshold_shift needs exactly two values")
        for s in shifts:
            _check_finite("cmp_threshold_shift", s)
        object.__setattr__(self, "cmp_threshold_shift", shifts)


def _default_stages():
    return tuple(StageParams() for _ in range(N_STAGES))


@dataclass(frozen=True)
class AdcConfig:
    """
    Full converter description: SHA, six 1.5-bit stages and a 2-bit flash.

    ``noise_sigma`` is input-referred Gaussian noise in volts drawn from a
    generator seeded with ``seed``. ``sharing_memory`` couples a fraction of
    the partner stage's previous output into a shared-OTA stage's settling
    start point; it only acts when ``ota_sharing`` is on.
    """

    vref: float = DEFAULT_VREF
    sha: StageParams = field(default_factory=StageParams)
    stages: tuple = field(default_factory=_default_stages)
    flash_threshold_shifts: tuple = (0.0, 0.0, 0.0)
    fs: float = DEFAULT_FS
    ota_sharing: bool = True
    sharing_memory: float = 0.0
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        _check_finite("vref", self.vref)
        _check_finite("fs", self.fs)
        if self.vref <= 0:
            raise ValueError(f"vref must be > 0, got {self.vref}")
        if self.fs <= 0:
            raise ValueError(f"fs must be > 0, got {self.fs}")
        stages = tuple(self.stages)
        if len(stages) != N_STAGES:
            raise ValueError(f"exactly {N_STAGES} stages required, got {len(stages)}")
        object.__setattr__(self, "stages", stages)
        shifts = tuple(float(s) for s in self.flash_threshold_shifts)
        if len(shifts) != 3:
            raise ValueError("flash_threshold_shifts needs exactly three values")
        object.__setattr__(self, "flash_threshold_shifts", shifts)
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")

    @property
    def period(self):
        return 1.0 / self.fs

    @property
    def half_period(self):
        """Settling window of every amplifier (one clock phase)."""
        return 0.5 / self.fs

    def with_stage(self, index, **changes):
        """Return a copy with stage ``index`` (0-based) modified."""
        stages = list(self.stages)
        stages[index] = replace(stages[index], **changes)
        return replace(self, stages=tuple(stages))

    def idealized(self):
        """Same vref/fs/sharing, every non-ideality zeroed."""
        return AdcConfig(vref=self.vref, fs=self.fs, ota_sharing=self.ota_sharing,
                         seed=self.seed)


class Held(NamedTuple):
    value: float
    clipped: bool


def stage_decide(x, threshold_shifts=(0.0, 0.0)):
    """
    1.5-bit sub-ADC decision.

    Thresholds sit at -1/4 and +1/4 (normalized) plus the given shifts.
    An input exactly on a threshold resolves to the middle code.

    :return: sub-code in {0, 1, 2}
    """
    lo = -0.25 + threshold_shifts[0]
    hi = 0.25 + threshold_shifts[1]
    if x > hi:
        return 2
    if x < lo:
        return 0
    return 1


def mdac_residue(x, c, p, vref):
    """
    Residue target of a 1.5-bit MDAC, normalized.

    Ideal: ``2*x - d`` with ``d = c - 1``. The gain error scales the whole
    closed-loop transfer (input and DAC charge alike), as capacitor mismatch
    or finite OTA gain would; the offset is added after scaling.
    """
    if c not in (0, 1, 2):
        raise ValueError(f"sub-code must be 0, 1 or 2, got {c!r}")
    d = c - 1
    return (1.0 + p.gain_error) * (2.0 * x - d) + p.offset / vref


def settle(target, previous, tau, t_avail):
    """Single-pole step response after ``t_avail`` seconds starting from ``previous``."""
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    if t_avail <= 0:
        raise ValueError(f"t_avail must be > 0, got {t_avail}")
    if tau == 0.0:
        return target
    return target - (target - previous) * math.exp(-t_avail / tau)


def sha_sample(vin, cfg, previous_held):
    """
    Track during ck1, hold during ck2.

    Inputs beyond ``+-vref`` saturate and set the ``clipped`` flag. The held
    value settles from ``previous_held`` over half a sample period.

    :rtype: Held
    """
    _check_finite("vin", vin)
    clipped = abs(vin) > cfg.vref
    if clipped:
        vin = math.copysign(cfg.vref, vin)
    target = vin * (1.0 + cfg.sha.gain_error) + cfg.sha.offset
    return Held(settle(target, previous_held, cfg.sha.tau, cfg.half_period), clipped)


def flash2b_quantize(x, threshold_shifts=(0.0, 0.0, 0.0)):
    """
    2-bit backend flash with thresholds at -1/2, 0, +1/2 (normalized).

    Ties go to the upper code.
    """
    f = 0
    for ideal, shift in zip((-0.5, 0.0, 0.5), threshold_shifts):
        if x >= ideal + shift:
            f += 1
    return f


def stage_threshold_shifts_normalized(p: StageParams, vref: float):
    return (p.cmp_threshold_shift[0] / vref, p.cmp_threshold_shift[1] / vref)


def check_voltages(values: Sequence[float]):
    for v in values:
        _check_finite("voltage", v)
