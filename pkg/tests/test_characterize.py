import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pipeadc import AdcConfig, CodeStream, StageParams, convert_waveform
from pipeadc.characterize import (
    InsufficientCoverage,
    NoFundamental,
    coherent_cycles,
    enob_from_sndr,
    gen_ramp,
    gen_tone,
    harmonic_bins,
    inl_dnl,
    power_spectrum,
    setup_test,
    spectrum,
)

from conftest import TAB1_SIM_MV

FS = 166.6e6


def test_gen_ramp():
    np.testing.assert_array_equal(gen_ramp(3, -1, 1), [-1, 0, 1])
    r = gen_ramp(32768, -0.6, 0.6)
    assert r[0] == -0.6 and r[-1] == 0.6
    assert 32768 / 256 == 128
    with pytest.raises(ValueError):
        gen_ramp(1, -1, 1)
    with pytest.raises(ValueError):
        gen_ramp(10, 1, 1)


def test_gen_tone_coherent_snap():
    x, fin = gen_tone(8192, FS, 10.417e6, 0.6)
    assert coherent_cycles(8192, FS, 10.417e6) == 513
    assert fin == pytest.approx(FS * 513 / 8192)
    assert fin == pytest.approx(10.4326e6, rel=1e-4)
    assert math.gcd(513, 8192) == 1
    # odd M over a power-of-two record: every sample on a distinct phase
    assert len(np.unique((513 * np.arange(8192)) % 8192)) == 8192
    assert np.max(np.abs(x)) == pytest.approx(0.6)


def test_gen_tone_edges():
    x, _ = gen_tone(1024, FS, 1e6, 0.0)
    assert not np.any(x)
    with pytest.raises(ValueError):
        gen_tone(1024, FS, 90e6, 0.5)
    with pytest.raises(ValueError):
        gen_tone(1000, FS, 1e6, 0.5)
    _, fin = gen_tone(1000, FS, 1.234e6, 0.5, coherent=False)
    assert fin == 1.234e6


def _ramp_codes(cfg, n=32768):
    return convert_waveform(gen_ramp(n, -cfg.vref, cfg.vref), cfg)


def test_inl_dnl_ideal_floor(ideal_cfg):
    m = inl_dnl(_ramp_codes(ideal_cfg))
    assert np.max(np.abs(m.dnl)) <= 0.02
    assert np.max(np.abs(m.inl)) <= 0.02
    assert len(m.dnl) == 254 and len(m.inl) == 254


def test_inl_dnl_missing_code():
    codes = _ramp_codes(AdcConfig()).codes.copy()
    codes[codes == 96] = 97
    m = inl_dnl(codes)
    assert m.dnl[96 - 1] == -1.0
    assert m.max_dnl == (-1.0, 96)


def test_inl_dnl_invariants(point_run):
    m = inl_dnl(_ramp_codes(point_run.adc))
    assert np.all(m.dnl >= -1.0)
    np.testing.assert_allclose(m.inl, np.cumsum(m.dnl), atol=1e-9)
    assert abs(m.dnl.sum()) < 1e-6


def test_inl_dnl_coverage_error():
    with pytest.raises(InsufficientCoverage):
        inl_dnl(_ramp_codes(AdcConfig(), n=8000))


def _transition_inl(cfg, n=2 ** 21):
    """Transfer-curve oracle: transition levels from a dense static sweep, endpoint-referenced."""
    v = np.linspace(-cfg.vref, cfg.vref, n)
    codes = convert_waveform(v, cfg).codes
    edges = np.array([v[np.argmax(codes >= k)] for k in range(1, 256)])
    width = (edges[-1] - edges[0]) / 254
    return (edges - (edges[0] + width * np.arange(255))) / width


def test_stage1_gain_error_inl_matches_transfer_oracle(ideal_cfg):
    g = 0.005
    cfg = ideal_cfg.with_stage(0, gain_error=g)
    oracle = _transition_inl(cfg)
    m = inl_dnl(_ramp_codes(cfg))
    assert abs(np.max(np.abs(m.inl)) - np.max(np.abs(oracle))) < 0.05
    # sawtooth g*(x - d/2) minus its endpoint line peaks at 3/8 * g * 128 LSB
    assert np.max(np.abs(m.inl)) == pytest.approx(3 / 8 * g * 128, abs=0.05)


def test_gain_deficit_inl_matches_transfer_oracle_per_code(ideal_cfg):
    # monotone transfer: transition levels are well defined for every code
    cfg = ideal_cfg.with_stage(0, gain_error=-0.005)
    oracle = _transition_inl(cfg)
    m = inl_dnl(_ramp_codes(cfg))
    # histogram INL of code k sits on the upper edge of code k (transition k+1)
    assert np.max(np.abs(m.inl - oracle[1:])) < 0.02


def test_enob_relation():
    assert enob_from_sndr(45.9) == pytest.approx(7.332, abs=0.005)


def test_ideal_tone_baseline(ideal_cfg):
    x, _ = gen_tone(8192, FS, 10.417e6, 0.6)
    codes = convert_waveform(x, ideal_cfg).codes
    m = spectrum(CodeStream(codes, FS))
    assert m.sndr_db == pytest.approx(49.9, abs=0.3)
    assert m.enob_bits == pytest.approx(8.0, abs=0.05)
    assert m.fundamental_bin == 513
    # time-domain oracle: quantization error against the known analog input
    err = codes - ((x / 0.6 + 1) * 128 - 0.5)
    err = err - err.mean()
    sndr_td = 10 * np.log10((128 ** 2 / 2) / np.mean(err ** 2))
    assert m.sndr_db == pytest.approx(sndr_td, abs=0.1)


def test_sixteen_bit_floor():
    x, _ = gen_tone(8192, FS, 10.417e6, 1.0)
    codes = np.round(x * 32767.0)
    m = spectrum(codes)
    assert m.sndr_db >= 96.0


def test_spectrum_parseval_and_scale():
    rng = np.random.default_rng(5)
    x, _ = gen_tone(4096, FS, 7e6, 100.0)
    values = np.round(x + 128 + rng.normal(0, 0.7, x.size))
    p = power_spectrum(values)
    centered = values - values.mean()
    assert p.sum() == pytest.approx(np.mean(centered ** 2), rel=1e-9)
    base = spectrum(values)
    for scale in (0.001, 3.7, 1e4):
        s = spectrum(values * scale)
        assert s.sndr_db == pytest.approx(base.sndr_db, abs=1e-9)
        assert s.sfdr_db == pytest.approx(base.sfdr_db, abs=1e-9)
        assert s.enob_bits == pytest.approx(base.enob_bits, abs=1e-9)


def test_spectrum_relations(point_run):
    x, _ = gen_tone(8192, FS, 10.417e6, 0.6)
    m = spectrum(convert_waveform(x, point_run.adc), 5)
    assert m.enob_bits == (m.sndr_db - 1.76) / 6.02
    assert m.sfdr_db >= m.sndr_db - 10 * math.log10(8192 // 2)
    assert m.worst_spur_bin != m.fundamental_bin
    assert m.thd_db < 0


def test_harmonic_folding():
    assert harmonic_bins(513, 8192, 5) == [1026, 1539, 2052, 2565, 3078]
    assert harmonic_bins(3000, 8192, 2) == [8192 - 6000, 9000 - 8192]


def test_thd_counts_only_harmonics():
    n = 4096
    k = np.arange(n)
    sig = np.sin(2 * np.pi * 37 * k / n) + 0.01 * np.sin(2 * np.pi * 74 * k / n) \
        + 0.001 * np.sin(2 * np.pi * 500 * k / n)
    m = spectrum(sig)
    assert m.thd_db == pytest.approx(20 * np.log10(0.01), abs=1e-6)
    assert m.sfdr_db == pytest.approx(40.0, abs=1e-6)
    assert m.worst_spur_bin == 74


def test_spectrum_errors():
    with pytest.raises(NoFundamental):
        spectrum(np.full(1024, 128))
    with pytest.raises(ValueError):
        spectrum(np.arange(1000))


def test_setup_ideal():
    report = setup_test(AdcConfig())
    assert [r.error_pct for r in report.rows] == [0.0] * 8
    vin = report.row("Vin")
    assert (vin.ideal_mv, vin.sim_mv, vin.error_pct) == (600.0, 600.0, 0.0)


def test_setup_reproduces_target_rows(tab1_cfg):
    report = setup_test(tab1_cfg)
    sims = [r.sim_mv for r in report.rows[1:]]
    np.testing.assert_allclose(sims, TAB1_SIM_MV, atol=1e-3)
    assert report.row("SHA").error_pct == pytest.approx(0.05, abs=1e-4)
    for prev, row in zip(report.rows, report.rows[1:]):
        assert row.ideal_mv == prev.sim_mv
        assert row.error_pct == pytest.approx(abs(row.ideal_mv - row.sim_mv) / row.ideal_mv * 100)


@given(st.lists(st.floats(0.0, 1.5e-9), min_size=7, max_size=7))
@settings(max_examples=50, deadline=None)
def test_setup_errors_accumulate(taus):
    taus = sorted(taus)
    cfg = dataclasses.replace(AdcConfig(), sha=StageParams(tau=taus[0]),
                              stages=tuple(StageParams(tau=t) for t in taus[1:]))
    errs = [r.error_pct for r in setup_test(cfg).rows]
    assert all(b >= a - 1e-12 for a, b in zip(errs, errs[1:]))
