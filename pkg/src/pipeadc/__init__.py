"""Behavioral model and characterization toolkit for an 8-bit OTA-sharing pipelined ADC."""

from .core import (
    AdcConfig,
    ClockPhase,
    StageParams,
    flash2b_quantize,
    mdac_residue,
    settle,
    sha_sample,
    stage_decide,
)
from .kernels import BACKEND
from .pipeline import (
    CodeStream,
    ConversionTrace,
    ConverterState,
    OtaSchedule,
    RawStageCodes,
    build_ota_schedule,
    convert_sample,
    convert_waveform,
    digital_error_correction,
    mux_pixels,
)

__version__ = "0.1.0"
