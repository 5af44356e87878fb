"""
pipeline.py

Whole-converter engine: SHA -> six 1.5-bit stages -> 2-bit flash, the
OTA-sharing clock schedule, digital error correction and waveform-level
conversion with settling memory carried from cycle to cycle.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .core import (
    N_BITS,
    N_STAGES,
    AdcConfig,
    ClockPhase,
    flash2b_quantize,
    mdac_residue,
    settle,
    sha_sample,
    stage_decide,
    stage_threshold_shifts_normalized,
)


class RawStageCodes(NamedTuple):
    c: tuple
    f: int


@dataclass(frozen=True)
class ConversionTrace:
    input: float
    held: float
    residues: tuple
    raw: RawStageCodes
    code: int
    clipped: bool


@dataclass(frozen=True)
class OtaSchedule:
    """
    Which stage each OTA serves in amplify mode, per clock phase.

    ``assignments[phase]`` maps OTA id to the amplifying client. Client 0 is
    the SHA, clients 1..6 are the pipeline stages.
    """

    assignments: dict
    ota_count: int

    def clients(self, phase):
        return set(self.assignments[phase].values())

    def is_valid(self):
        """Every client amplifies exactly once per cycle, and no OTA has two clients in one phase."""
        seen = []
        for phase in ClockPhase:
            mapping = self.assignments[phase]
            if any(not 0 <= ota < self.ota_count for ota in mapping):
                return False
            seen.extend(mapping.values())
        return sorted(seen) == list(range(N_STAGES + 1))


@dataclass(frozen=True)
class CodeStream:
    codes: np.ndarray
    fs: float
    n_bits: int = N_BITS
    clipped: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        codes = np.asarray(self.codes)
        if codes.size and (codes.min() < 0 or codes.max() > 2 ** self.n_bits - 1):
            raise ValueError("code out of range")
        codes = codes.astype(np.int64)
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)

    def __len__(self):
        return len(self.codes)


def build_ota_schedule(cfg):
    """
    Amplify-mode assignment of OTAs for one conversion cycle.

    The SHA holds (amplifies) in CK2, so stage 1 amplifies in CK1 and each
    following stage in the opposite phase of its predecessor. With sharing on,
    stages (1, 2), (3, 4), (5, 6) each share one OTA since the members of a
    pair never amplify in the same phase.
    """
    ck1, ck2 = {}, {0: 0}
    for stage in range(1, N_STAGES + 1):
        if cfg.ota_sharing:
            ota = (stage + 1) // 2
        else:
            ota = stage
        (ck1 if stage % 2 else ck2)[ota] = stage
    ota_count = 1 + (N_STAGES // 2 if cfg.ota_sharing else N_STAGES)
    return OtaSchedule({ClockPhase.CK1: ck1, ClockPhase.CK2: ck2}, ota_count)


def digital_error_correction(raw):
    """Overlap-add of the redundant stage codes into the 8-bit output word."""
    if len(raw.c) != N_STAGES or any(c not in (0, 1, 2) for c in raw.c):
        raise ValueError(f"invalid stage codes {raw.c!r}")
    if raw.f not in (0, 1, 2, 3):
        raise ValueError(f"invalid flash code {raw.f!r}")
    code = 128 + (raw.f - 2)
    for i, c in enumerate(raw.c):
        code += (c - 1) * 2 ** (N_STAGES - i)
    return min(max(code, 0), 255)


class ConverterState:
    """Previous-cycle outputs of the SHA and the six stages, in volts."""

    def __init__(self, values=None):
        self.values = np.zeros(N_STAGES + 1) if values is None else np.array(values, dtype=float)

    @property
    def held(self):
        return self.values[0]

    def copy(self):
        return ConverterState(self.values)


def convert_sample(vin, cfg, state=None):
    """
    Convert one sample, updating ``state`` in place.

    Each stage settles over half a period from its own previous-cycle output
    (plus ``sharing_memory`` times its OTA partner's, when sharing is on).

    :param vin: input voltage, already including any noise
    :param cfg: converter description
    :type cfg: AdcConfig
    :param state: settling memory; a fresh zero state when omitted
    :type state: ConverterState
    :rtype: ConversionTrace
    """
    if state is None:
        state = ConverterState()
    prev = state.values.copy()
    held, clipped = sha_sample(vin, cfg, prev[0])
    k_share = cfg.sharing_memory if cfg.ota_sharing else 0.0
    t_half = cfg.half_period
    outs = [held]
    subcodes = []
    for i, p in enumerate(cfg.stages):
        x = outs[-1] / cfg.vref
        c = stage_decide(x, stage_threshold_shifts_normalized(p, cfg.vref))
        target = mdac_residue(x, c, p, cfg.vref) * cfg.vref
        start = prev[i + 1] + k_share * prev[(i ^ 1) + 1]
        outs.append(settle(target, start, p.tau, t_half))
        subcodes.append(c)
    flash_shifts = tuple(s / cfg.vref for s in cfg.flash_threshold_shifts)
    f = flash2b_quantize(outs[-1] / cfg.vref, flash_shifts)
    raw = RawStageCodes(tuple(subcodes), f)
    state.values[:] = outs
    return ConversionTrace(vin, held, tuple(outs[1:]), raw, digital_error_correction(raw), clipped)


def kernel_params(cfg):
    """Flatten ``cfg`` into the argument arrays of ``kernels.convert_block``."""
    blocks = (cfg.sha,) + cfg.stages
    vref = cfg.vref
    return dict(
        gains=np.array([p.gain_error for p in blocks], dtype=float),
        offsets=np.array([p.offset for p in blocks], dtype=float),
        taus=np.array([p.tau for p in blocks], dtype=float),
        lo_shift=np.array([p.cmp_threshold_shift[0] / vref for p in cfg.stages]),
        hi_shift=np.array([p.cmp_threshold_shift[1] / vref for p in cfg.stages]),
        flash_shift=np.array([s / vref for s in cfg.flash_threshold_shifts]),
        vref=float(vref),
        t_half=float(cfg.half_period),
        k_share=float(cfg.sharing_memory if cfg.ota_sharing else 0.0),
    )


def input_noise(cfg, n):
    if cfg.noise_sigma == 0:
        return np.zeros(n)
    rng = np.random.default_rng(cfg.seed)
    return rng.normal(0.0, cfg.noise_sigma, n)


def convert_waveform(samples, cfg, state=None):
    """
    Sequential conversion of a voltage waveform.

    Settling memory carries from each sample to the next. Input noise, when
    configured, is drawn from a generator seeded by ``cfg.seed`` so runs are
    bit-identical.

    :rtype: CodeStream
    """
    volts = np.ascontiguousarray(samples, dtype=float)
    if volts.ndim != 1 or volts.size == 0:
        raise ValueError("convert_waveform needs a non-empty 1-D sequence")
    if not np.all(np.isfinite(volts)):
        raise ValueError("input contains non-finite values")
    volts = volts + input_noise(cfg, volts.size)
    if state is None:
        state = ConverterState()
    codes, clipped = kernels.convert_block(volts, state=state.values, **kernel_params(cfg))
    return CodeStream(codes, cfg.fs, N_BITS, clipped.astype(bool))


def mux_pixels(pixel_streams, cfg):
    """
    Time-share one converter between several pixel streams.

    Streams are interleaved round-robin into one sequence at ``cfg.fs``,
    converted, then split back. Each returned stream runs at
    ``cfg.fs / len(pixel_streams)``.
    """
    if len(pixel_streams) == 0:
        raise ValueError("need at least one pixel stream")
    arrays = [np.asarray(s, dtype=float) for s in pixel_streams]
    length = len(arrays[0])
    if any(len(a) != length for a in arrays):
        raise ValueError("pixel streams must have equal length")
    m = len(arrays)
    interleaved = np.stack(arrays, axis=1).reshape(-1)
    out = convert_waveform(interleaved, cfg)
    rate = cfg.fs / m
    return [CodeStream(out.codes[j::m], rate, N_BITS, out.clipped[j::m]) for j in range(m)]

