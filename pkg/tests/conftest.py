import dataclasses

import numpy as np
import pytest

from pipeadc import AdcConfig, StageParams, _pykernels
from pipeadc.config import load_run_config

# Target step outputs (mV) for SHA, Stage1..Stage6 and printed error column (%).
TAB1_SIM_MV = (599.7, 599.2, 598.5, 596.3, 593.9, 587.4, 575.6)
TAB1_ERROR_PCT = (0.05, 0.08, 0.11, 0.36, 0.4, 1.1, 2.0)


def ideal_code(vin, vref=0.6):
    return np.clip(np.floor((np.asarray(vin) / vref + 1.0) * 128), 0, 255).astype(int)


def code_centers(vref=0.6):
    return ((np.arange(256) + 0.5) / 128 - 1.0) * vref


@pytest.fixture
def ideal_cfg():
    return AdcConfig()


@pytest.fixture
def point_run():
    return load_run_config("paper_point")


@pytest.fixture
def tab1_cfg(point_run):
    cfg = point_run.adc
    stages = tuple(StageParams(tau=p.tau) for p in cfg.stages)
    return dataclasses.replace(AdcConfig(), sha=StageParams(tau=cfg.sha.tau), stages=stages)


@pytest.fixture(params=["compiled", "python"])
def backend(request, monkeypatch):
    from pipeadc import kernels

    if request.param == "python":
        monkeypatch.setattr(kernels, "convert_block", _pykernels.convert_block)
        monkeypatch.setattr(kernels, "sd_modulate", _pykernels.sd_modulate)
    elif kernels.BACKEND != "cython":
        pytest.skip("compiled extension not built")
    return request.param


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(test_acceptance.RESULTS):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:2d}. {title}: {detail}")
