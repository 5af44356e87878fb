"""
Command-line front end.

    adc <setup|ramp|tone|compare|power|sweep> [--config PATH] [--out DIR]
        [--seed N] [--ideal] [key=value ...]

Exit status: 0 on success, 2 for configuration errors, 3 for runtime or
precondition failures.
"""

import argparse
import csv
import logging
import sys
from pathlib import Path

from .characterize import (
    InsufficientCoverage,
    NoFundamental,
    gen_ramp,
    gen_tone,
    inl_dnl,
    setup_test,
    spectrum,
    write_spectrum_csv,
    write_static_csv,
)
from .compare import compare_architectures, format_table, power_model
from .config import ConfigError, load_run_config, sweep_points
from .pipeline import convert_waveform

log = logging.getLogger("pipeadc")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _num(value):
    return f"{value:.6g}"


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _open(out, name):
    return open(out / name, "w", newline="")


def run_setup(run, out):
    report = setup_test(run.adc)
    with _open(out, "setup.csv") as fh:
        w = _writer(fh)
        w.writerow(["stage", "ideal_mv", "sim_mv", "error_pct"])
        for r in report.rows:
            w.writerow([r.stage, _num(r.ideal_mv), _num(r.sim_mv), _num(r.error_pct)])
    for r in report.rows:
        print(f"{r.stage:7s} {r.ideal_mv:8.2f} {r.sim_mv:8.2f} {r.error_pct:6.3f}%")
    return report


def measure_static(run):
    ramp = gen_ramp(run.ramp_n, -run.adc.vref, run.adc.vref)
    return inl_dnl(convert_waveform(ramp, run.adc))


def measure_dynamic(run):
    tone, _ = gen_tone(run.tone_n, run.adc.fs, run.tone_fin, run.tone_amplitude)
    return spectrum(convert_waveform(tone, run.adc), run.tone_harmonics)


def run_ramp(run, out):
    metrics = measure_static(run)
    write_static_csv(metrics, out / "static.csv")
    lines = [
        f"max_inl,{metrics.max_inl[0]:.6f},{metrics.max_inl[1]}",
        f"max_dnl,{metrics.max_dnl[0]:.6f},{metrics.max_dnl[1]}",
    ]
    (out / "static_summary.csv").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return metrics


def run_tone(run, out):
    metrics = measure_dynamic(run)
    write_spectrum_csv(metrics, run.tone_n, out / "spectrum.csv")
    with _open(out, "dynamic.csv") as fh:
        w = _writer(fh)
        w.writerow(["sndr_db", "sfdr_db", "thd_db", "enob"])
        w.writerow([f"{metrics.sndr_db:.4f}", f"{metrics.sfdr_db:.4f}",
                    f"{metrics.thd_db:.4f}", f"{metrics.enob_bits:.4f}"])
    print(f"sndr {metrics.sndr_db:.2f} dB  sfdr {metrics.sfdr_db:.2f} dB  "
          f"thd {metrics.thd_db:.2f} dB  enob {metrics.enob_bits:.3f}")
    return metrics


def run_compare(run, out):
    rows = compare_architectures(
        n_bits=run.compare_n_bits,
        fs=run.compare_fs,
        flash_sigma=run.compare_flash_sigma,
        flash_trials=run.compare_flash_trials,
        seed=run.adc.seed,
        sd_amplitude=run.compare_sd_amplitude,
        sd_samples=run.compare_sd_samples,
    )
    with _open(out, "compare.csv") as fh:
        w = _writer(fh)
        w.writerow(["architecture", "metric", "value", "internal_clock_hz", "note"])
        for r in rows:
            w.writerow([r.architecture, r.metric, f"{r.value:.6f}", _num(r.internal_clock_hz), r.note])
    table = format_table(rows)
    (out / "compare.txt").write_text(table)
    print(table, end="")
    return rows


def run_power(run, out):
    report = power_model(run.adc, run.power, run.power_enob)
    with _open(out, "power.csv") as fh:
        w = _writer(fh)
        w.writerow(["ota_count", "p_ota_mw", "p_comparators_mw", "p_digital_clock_mw",
                    "total_mw", "fom_pj_per_step"])
        w.writerow([report.ota_count, f"{report.p_ota:.6f}", f"{report.p_comparators:.6f}",
                    f"{report.p_digital_clock:.6f}", f"{report.total_mw:.6f}",
                    f"{report.fom_pj_per_step:.6f}"])
    print(f"ota_count {report.ota_count}  total {report.total_mw:.3f} mW  "
          f"fom {report.fom_pj_per_step:.3f} pJ/step")
    return report


def _cell(value):
    if isinstance(value, bool):
        return "on" if value else "off"
    return _num(value) if isinstance(value, float) else str(value)


def run_sweep(run, out):
    points = list(sweep_points(run))
    keys = list(points[0][0])
    with _open(out, "sweep.csv") as fh:
        w = _writer(fh)
        w.writerow(keys + ["ota_count", "total_mw", "fom_pj", "sndr_db", "sfdr_db", "enob",
                           "max_inl", "max_dnl"])
        for index, (point, sub) in enumerate(points):
            log.info("sweep point %d/%d: %s", index + 1, len(points), point)
            power = power_model(sub.adc, sub.power, sub.power_enob)
            dyn = measure_dynamic(sub)
            stat = measure_static(sub)
            w.writerow([_cell(point[k]) for k in keys] + [
                power.ota_count, f"{power.total_mw:.6f}", f"{power.fom_pj_per_step:.6f}",
                f"{dyn.sndr_db:.4f}", f"{dyn.sfdr_db:.4f}", f"{dyn.enob_bits:.4f}",
                f"{abs(stat.max_inl[0]):.6f}", f"{abs(stat.max_dnl[0]):.6f}",
            ])
    print(f"{len(points)} sweep points written to {out / 'sweep.csv'}")
    return points


COMMANDS = {
    "setup": run_setup,
    "ramp": run_ramp,
    "tone": run_tone,
    "compare": run_compare,
    "power": run_power,
    "sweep": run_sweep,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="adc", description="Pipelined ADC behavioral simulation and characterization")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", default=None,
                        help="config file or shipped name (ideal, paper_point); default paper_point")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="overrides adc.seed")
    parser.add_argument("--ideal", action="store_true", help="zero every non-ideality")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("overrides", nargs="*", metavar="key=value")
    return parser


def main(argv=None):
    args = build_parser().parse_intermixed_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        run = load_run_config(args.config, args.overrides, args.seed, args.ideal)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        COMMANDS[args.command](run, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InsufficientCoverage, NoFundamental, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
