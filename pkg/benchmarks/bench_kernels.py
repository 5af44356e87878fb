"""
Compare the compiled and pure-Python hot loops.

    python benchmarks/bench_kernels.py [--samples N] [--repeat R]
"""

import argparse
import time

import numpy as np

from pipeadc import _pykernels
from pipeadc.config import load_run_config
from pipeadc.pipeline import ConverterState, kernel_params

try:
    from pipeadc import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=2 ** 16)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    cfg = load_run_config("paper_point").adc
    volts = np.linspace(-0.6, 0.6, args.samples)
    params = kernel_params(cfg)
    sd_in = 0.5 * np.sin(2 * np.pi * 17 * np.arange(args.samples) / args.samples)

    backends = [("python", _pykernels)]
    if _kernels is not None:
        backends.append(("cython", _kernels))
    else:
        print("compiled extension not available; timing the fallback only")

    results = {}
    for name, mod in backends:
        t_conv = best_of(lambda: mod.convert_block(volts, state=ConverterState().values, **params),
                         args.repeat)
        t_sd = best_of(lambda: mod.sd_modulate(sd_in), args.repeat)
        results[name] = (t_conv, t_sd)
        print(f"{name:7s} convert_block {t_conv * 1e3:9.2f} ms "
              f"({args.samples / t_conv / 1e6:7.3f} MS/s)   sd_modulate {t_sd * 1e3:9.2f} ms")

    if "cython" in results:
        py, cy = results["python"], results["cython"]
        print(f"speedup: convert_block x{py[0] / cy[0]:.0f}, sd_modulate x{py[1] / cy[1]:.0f}")
        a = _pykernels.convert_block(volts, state=ConverterState().values, **params)[0]
        b = _kernels.convert_block(volts, state=ConverterState().values, **params)[0]
        print("codes identical:", bool(np.array_equal(a, b)))


if __name__ == "__main__":
    main()
