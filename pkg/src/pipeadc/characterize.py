"""
characterize.py

Stimulus generation and the three converter measurements: stage setup
(step settling down the chain), code-density INL/DNL from a slow ramp, and
SNDR/SFDR/THD/ENOB from a coherently sampled tone.
"""

import csv
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import N_STAGES, settle
from .pipeline import CodeStream

MIN_MEAN_HITS = 64


class InsufficientCoverage(ValueError):
    """Ramp record too short for a meaningful code-density histogram."""


class NoFundamental(ValueError):
    """Spectrum has no signal component."""


@dataclass(frozen=True)
class StaticMetrics:
    """DNL/INL of interior codes 1..254 (index 0 is code 1), in LSB."""

    dnl: np.ndarray
    inl: np.ndarray
    max_dnl: tuple
    max_inl: tuple
    hits: np.ndarray = field(repr=False, default=None)

    @property
    def codes(self):
        return np.arange(1, len(self.dnl) + 1)


@dataclass(frozen=True)
class DynamicMetrics:
    sndr_db: float
    sfdr_db: float
    thd_db: float
    enob_bits: float
    fundamental_bin: int
    worst_spur_bin: int
    power: np.ndarray = field(repr=False, default=None)
    fs: float = 1.0


class SetupRow(NamedTuple):
    stage: str
    ideal_mv: float
    sim_mv: float
    error_pct: float


@dataclass(frozen=True)
class SetupReport:
    rows: tuple

    def row(self, name):
        for r in self.rows:
            if r.stage == name:
                return r
        raise KeyError(name)


def enob_from_sndr(sndr_db):
    return (sndr_db - 1.76) / 6.02


def gen_ramp(n, vmin, vmax):
    """Linear ramp of ``n`` samples including both endpoints."""
    if n < 2:
        raise ValueError(f"ramp needs at least 2 samples, got {n}")
    if not vmax > vmin:
        raise ValueError("vmax must exceed vmin")
    return np.linspace(vmin, vmax, n)


def coherent_cycles(n, fs, target_fin):
    """Odd cycle count nearest ``n * target_fin / fs``; odd keeps it coprime with a power-of-two ``n``."""
    ideal = n * target_fin / fs
    below = 2 * math.floor((ideal - 1) / 2) + 1
    above = below + 2
    m = below if ideal - below <= above - ideal else above
    if m < 1:
        m = 1
    while m >= n / 2:
        m -= 2
    return m


def gen_tone(n, fs, target_fin, amplitude, coherent=True):
    """
    Sampled sinusoid ``amplitude * sin(2*pi*fin*k/fs)``.

    With ``coherent`` the frequency snaps to ``fs * M / n`` for the odd ``M``
    nearest the request, so the record holds an integer number of cycles and
    each sample lands on a distinct phase.

    :return: ``(samples, actual_fin)``
    """
    if not 0 < target_fin < fs / 2:
        raise ValueError(f"tone frequency {target_fin} must lie in (0, fs/2)")
    if coherent:
        if n < 2 or n & (n - 1):
            raise ValueError("coherent tones need a power-of-two record length")
        m = coherent_cycles(n, fs, target_fin)
        fin = fs * m / n
        phase = 2.0 * np.pi * ((m * np.arange(n)) % n) / n
    else:
        fin = target_fin
        phase = 2.0 * np.pi * fin * np.arange(n) / fs
    return amplitude * np.sin(phase), fin


def _codes_of(codes):
    if isinstance(codes, CodeStream):
        return codes.codes, codes.n_bits
    return np.asarray(codes), 8


def inl_dnl(codes):
    """
    Code-density linearity from a full-scale slow ramp.

    The two end codes collect the out-of-range tails and are excluded. DNL of
    each interior code is its hit count over the mean interior count, minus
    one. INL is the running sum of DNL; as the DNL sums to zero this is
    referenced to the line through the first and last interior transition
    levels. A code with no hits shows up as DNL = -1.

    :raises InsufficientCoverage: mean interior hit count below 64
    :rtype: StaticMetrics
    """
    values, n_bits = _codes_of(codes)
    n_codes = 2 ** n_bits
    hits = np.bincount(values.astype(np.int64), minlength=n_codes)[:n_codes]
    interior = hits[1:-1].astype(float)
    mean_hits = interior.mean()
    if mean_hits < MIN_MEAN_HITS:
        raise InsufficientCoverage(
            f"mean {mean_hits:.1f} hits per interior code, need at least {MIN_MEAN_HITS}")
    dnl = interior / mean_hits - 1.0
    inl = np.cumsum(dnl)
    kd = int(np.argmax(np.abs(dnl)))
    ki = int(np.argmax(np.abs(inl)))
    return StaticMetrics(dnl, inl, (float(dnl[kd]), kd + 1), (float(inl[ki]), ki + 1), hits)


def power_spectrum(values):
    """
    One-sided power spectrum of the mean-removed record.

    Scaled so the bins sum to the time-domain mean-square value.
    """
    x = np.asarray(values, dtype=float)
    x = x - x.mean()
    n = x.size
    spec = np.fft.rfft(x)
    p = (spec.real ** 2 + spec.imag ** 2) / (n * n)
    if n % 2 == 0:
        p[1:-1] *= 2.0
    else:
        p[1:] *= 2.0
    return p


def harmonic_bins(fundamental_bin, n, n_harmonics):
    """Bins of harmonics 2..n_harmonics+1 folded into [0, n/2]."""
    bins = []
    for h in range(2, n_harmonics + 2):
        b = (h * fundamental_bin) % n
        if b > n // 2:
            b = n - b
        bins.append(b)
    return bins


def spectrum(codes, n_harmonics=5, fs=None):
    """
    SNDR, SFDR, THD and ENOB of a coherent single-tone record.

    No window is applied; a non-coherent record leaks and reads low.

    :param codes: CodeStream or array of (possibly real-valued) codes
    :param n_harmonics: number of distortion harmonics summed into THD
    :raises NoFundamental: the mean-removed record is identically zero
    :rtype: DynamicMetrics
    """
    values, _ = _codes_of(codes)
    if fs is None:
        fs = codes.fs if isinstance(codes, CodeStream) else 1.0
    n = values.size
    if n < 1024 or n & (n - 1):
        raise ValueError(f"record length must be a power of two >= 1024, got {n}")
    p = power_spectrum(values)
    p[0] = 0.0
    total = p.sum()
    if total <= 0.0:
        raise NoFundamental("record is constant; no fundamental")
    fb = int(np.argmax(p))
    p_sig = p[fb]
    rest = p.copy()
    rest[fb] = 0.0
    p_nd = total - p_sig
    spur = int(np.argmax(rest))
    p_spur = rest[spur]
    harm = sum(p[b] for b in set(harmonic_bins(fb, n, n_harmonics)) if b not in (0, fb))
    sndr = 10.0 * math.log10(p_sig / p_nd) if p_nd > 0 else math.inf
    sfdr = 10.0 * math.log10(p_sig / p_spur) if p_spur > 0 else math.inf
    thd = 10.0 * math.log10(harm / p_sig) if harm > 0 else -math.inf
    return DynamicMetrics(sndr, sfdr, thd, enob_from_sndr(sndr), fb, spur, p, float(fs))


SETUP_NAMES = ("Vin", "SHA") + tuple(f"Stage{i}" for i in range(1, N_STAGES + 1))


def setup_test(cfg, low_cycles=32):
    """
    Full-swing step response of the amplifier chain.

    The input sits at ``-vref`` for ``low_cycles`` cycles, then steps to
    ``+vref``. In the setup configuration every block tracks the previous
    block's output at unity gain, settling for half a period with its own
    time constant. Reported per block: its "ideal" value (the previous row's
    simulated output) and its simulated output in the cycle after the step.
    """
    taus = [cfg.sha.tau] + [p.tau for p in cfg.stages]
    t_half = cfg.half_period
    outputs = [-cfg.vref] * len(taus)
    sequence = [-cfg.vref] * low_cycles + [cfg.vref]
    for vin in sequence:
        source = vin
        nxt = []
        for tau, prev in zip(taus, outputs):
            out = settle(source, prev, tau, t_half)
            nxt.append(out)
            source = out
        outputs = nxt
    rows = [SetupRow("Vin", cfg.vref * 1e3, cfg.vref * 1e3, 0.0)]
    ideal = cfg.vref
    for name, sim in zip(SETUP_NAMES[1:], outputs):
        err = abs(ideal - sim) / abs(ideal) * 100.0
        rows.append(SetupRow(name, ideal * 1e3, sim * 1e3, err))
        ideal = sim
    return SetupReport(tuple(rows))


def taus_for_setup_targets(sim_mv, vref, fs, low_mv=None):
    """
    Time constants that make ``setup_test`` land on the given block outputs.

    ``sim_mv`` lists the simulated outputs of SHA and stages in order; each
    block steps from ``-vref`` toward the previous block's output.
    """
    t_half = 0.5 / fs
    low = -vref * 1e3 if low_mv is None else low_mv
    ideal = vref * 1e3
    taus = []
    for sim in sim_mv:
        residual = (ideal - sim) / (ideal - low)
        taus.append(0.0 if residual <= 0 else t_half / math.log(1.0 / residual))
        ideal = sim
    return taus


def write_static_csv(metrics, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["code", "dnl_lsb", "inl_lsb"])
        for code, d, i in zip(metrics.codes, metrics.dnl, metrics.inl):
            w.writerow([int(code), f"{d:.6f}", f"{i:.6f}"])


def write_spectrum_csv(metrics, n, path):
    p = metrics.power
    ref = p[metrics.fundamental_bin]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin", "freq_hz", "db"])
        for k, pk in enumerate(p):
            db = 10.0 * math.log10(pk / ref) if pk > 0 else -300.0
            w.writerow([k, f"{k * metrics.fs / n:.3f}", f"{db:.4f}"])
