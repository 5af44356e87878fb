"""
compare.py

Desk-scale models of the alternative architectures (first-order
sigma-delta, resistor-ladder flash) and the power / Walden FOM model used
to put the pipeline in context.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .characterize import NoFundamental, coherent_cycles, gen_tone, power_spectrum, spectrum
from .core import DEFAULT_FS, AdcConfig
from .pipeline import build_ota_schedule, convert_waveform

ANCHOR_TOTAL_MW = 38.9
OTA_SHARE = 0.70
COMPARATOR_SHARE = 0.20
DEFAULT_ENOB = 7.33


@dataclass(frozen=True)
class SdConfig:
    osr: int = 64
    n_samples: int = 2 ** 16
    input_amplitude: float = 0.5

    def __post_init__(self):
        if self.osr < 4 or self.osr & (self.osr - 1):
            raise ValueError(f"osr must be a power of two >= 4, got {self.osr}")
        if not 0 <= self.input_amplitude <= 0.9:
            raise ValueError("input amplitude must lie in [0, 0.9]")
        if self.n_samples < 2 * self.osr or self.n_samples & (self.n_samples - 1):
            raise ValueError("n_samples must be a power of two and cover the signal band")


@dataclass(frozen=True)
class FlashConfig:
    n_bits: int = 8
    ladder_sigma: float = 0.01
    n_trials: int = 1000
    rng_seed: int = 0

    def __post_init__(self):
        if not 1 <= self.n_bits <= 8:
            raise ValueError(f"n_bits must be in 1..8, got {self.n_bits}")
        if self.ladder_sigma < 0:
            raise ValueError("ladder_sigma must be >= 0")
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")


@dataclass(frozen=True)
class FlashSummary:
    mean_max_inl: float
    max_max_inl: float
    std_max_inl: float
    per_trial: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class PowerReport:
    ota_count: int
    p_ota: float
    p_comparators: float
    p_digital_clock: float
    total_mw: float
    fom_pj_per_step: float


@dataclass(frozen=True)
class PowerCalibration:
    """
    Per-block power split. Only the 38.9 mW total with sharing on is
    anchored; the 70 % OTA / 20 % comparator / 10 % clock split is assumed.
    """

    p_ota: float = OTA_SHARE * ANCHOR_TOTAL_MW / 4
    p_comparators: float = COMPARATOR_SHARE * ANCHOR_TOTAL_MW
    p_digital_clock: float = ANCHOR_TOTAL_MW - OTA_SHARE * ANCHOR_TOTAL_MW - COMPARATOR_SHARE * ANCHOR_TOTAL_MW


def sd_bitstream(x):
    return kernels.sd_modulate(np.ascontiguousarray(x, dtype=float))


def sd_first_order(cfg, fin_normalized):
    """
    In-band SNR of a first-order single-bit modulator driven by a coherent tone.

    :param cfg: modulator setup
    :type cfg: SdConfig
    :param fin_normalized: tone frequency over the modulator clock
    :return: SNR in dB over bins 1..n/(2*osr), excluding the tone bin
    """
    n = cfg.n_samples
    band = n // (2 * cfg.osr)
    if not 0 < fin_normalized < 1.0 / (2 * cfg.osr):
        raise ValueError(f"tone at {fin_normalized} lies outside the signal band")
    if cfg.input_amplitude == 0:
        raise NoFundamental("zero input amplitude has no signal to measure")
    m = coherent_cycles(n, 1.0, fin_normalized)
    if not 0 < m <= band:
        raise ValueError("tone falls outside the signal band after coherent snapping")
    x = cfg.input_amplitude * np.sin(2.0 * np.pi * ((m * np.arange(n)) % n) / n)
    bits = sd_bitstream(x)
    p = power_spectrum(bits.astype(float))
    in_band = p[1:band + 1].sum()
    p_sig = p[m]
    return 10.0 * math.log10(p_sig / (in_band - p_sig))


def ladder_max_inl(resistors):
    """Largest threshold deviation of a resistor-string flash, in LSB."""
    n_levels = len(resistors)
    taps = np.cumsum(resistors)[:-1] / np.sum(resistors)
    ideal = np.arange(1, n_levels) / n_levels
    if n_levels < 2:
        return 0.0
    return float(np.max(np.abs(taps - ideal)) * n_levels)


def flash_montecarlo(cfg):
    """
    Monte Carlo of ladder mismatch.

    Trial ``t`` draws ``2**n_bits`` resistors ``1 + eps`` with
    ``eps ~ N(0, ladder_sigma)`` from a generator seeded with
    ``(rng_seed, t)``, so trials are independent and reproducible.
    """
    n_levels = 2 ** cfg.n_bits
    worst = np.empty(cfg.n_trials)
    for t in range(cfg.n_trials):
        rng = np.random.default_rng([cfg.rng_seed, t])
        eps = rng.normal(0.0, cfg.ladder_sigma, n_levels) if cfg.ladder_sigma > 0 else np.zeros(n_levels)
        worst[t] = ladder_max_inl(1.0 + eps)
    return FlashSummary(float(worst.mean()), float(worst.max()), float(worst.std()), worst)


def walden_fom(total_mw, enob, fs):
    """Energy per conversion step, pJ."""
    return total_mw * 1e-3 / (2.0 ** enob * fs) * 1e12


def power_model(cfg, calibration=None, enob=DEFAULT_ENOB):
    """
    Sum of OTA, comparator and clock/digital power plus Walden FOM.

    :type cfg: AdcConfig
    :type calibration: PowerCalibration
    :rtype: PowerReport
    """
    cal = calibration or PowerCalibration()
    for name in ("p_ota", "p_comparators", "p_digital_clock"):
        if getattr(cal, name) < 0:
            raise ValueError(f"{name} must be non-negative")
    ota_count = build_ota_schedule(cfg).ota_count
    total = ota_count * cal.p_ota + cal.p_comparators + cal.p_digital_clock
    return PowerReport(ota_count, cal.p_ota, cal.p_comparators, cal.p_digital_clock,
                       total, walden_fom(total, enob, cfg.fs))


SD_OSR_CANDIDATES = (4, 8, 16, 32, 64, 128, 256, 512, 1024)


def required_sd_osr(target_snr_db, amplitude=0.5, n_samples=2 ** 16):
    """Smallest power-of-two OSR whose simulated in-band SNR reaches the target."""
    for osr in SD_OSR_CANDIDATES:
        if n_samples < 16 * osr:
            break
        cfg = SdConfig(osr, n_samples, amplitude)
        fin = 1.0 / (8 * osr)
        snr = sd_first_order(cfg, fin)
        if snr >= target_snr_db:
            return osr, snr
    return None, None


@dataclass(frozen=True)
class CompareRow:
    architecture: str
    metric: str
    value: float
    internal_clock_hz: float
    note: str


def compare_architectures(n_bits=8, fs=DEFAULT_FS, flash_sigma=0.01, flash_trials=1000,
                          seed=0, sd_amplitude=0.5, sd_samples=2 ** 16, pipeline_cfg=None):
    """
    One row per architecture, each value produced by that architecture's simulator.

    Pipeline: ENOB of the simulated converter on a full-scale coherent tone.
    Sigma-delta: smallest OSR reaching the ``n_bits`` ideal SNR, and the
    modulator clock it implies. Flash: mean worst-case ladder INL.
    """
    if not fs > 0:
        raise ValueError(f"fs must be > 0, got {fs}")
    if n_bits < 1:
        raise ValueError(f"n_bits must be >= 1, got {n_bits}")
    rows = []

    cfg = pipeline_cfg if pipeline_cfg is not None else AdcConfig(fs=fs)
    tone, _ = gen_tone(8192, cfg.fs, cfg.fs / 16, cfg.vref)
    enob = spectrum(convert_waveform(tone, cfg)).enob_bits
    rows.append(CompareRow("pipeline", "enob_bits", enob, cfg.fs,
                           f"{build_ota_schedule(cfg).ota_count} OTAs, runs at the output rate"))

    target = 6.02 * n_bits + 1.76
    osr, snr = required_sd_osr(target, sd_amplitude, sd_samples)
    if osr is None:
        rows.append(CompareRow("sigma-delta", "required_osr", math.nan, math.nan,
                               f"no OSR up to {SD_OSR_CANDIDATES[-1]} reaches {target:.2f} dB"))
    else:
        rows.append(CompareRow("sigma-delta", "required_osr", float(osr), fs * osr,
                               f"first-order in-band SNR {snr:.2f} dB >= {target:.2f} dB"))

    flash = flash_montecarlo(FlashConfig(min(n_bits, 8), flash_sigma, flash_trials, seed))
    rows.append(CompareRow("flash", "mean_max_inl_lsb", flash.mean_max_inl, fs,
                           f"{2 ** min(n_bits, 8) - 1} comparators, ladder sigma {flash_sigma:g}"))
    return rows


def format_table(rows):
    header = ("architecture", "metric", "value", "internal_clock_hz", "note")
    cells = [header] + [(r.architecture, r.metric, f"{r.value:.4f}", f"{r.internal_clock_hz:.6g}", r.note)
                        for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
    return "\n".join("  ".join(c[i].ljust(widths[i]) for i in range(len(header))).rstrip()
                     for c in cells) + "\n"
