"""Command line front end.

`isacsim run <config> [--out DIR] [--preset table1|ci] [--waveforms LIST]
[--bench] [--oracle]` executes a comparison run. Exit codes: 0 on success,
2 for configuration problems, 3 for scenario problems (impossible geometry),
4 when the run completed but at least one waveform failed.

The environment variable ISACSIM_THREADS caps the numeric thread pools; it is
applied before the numeric stack is imported, so it must be read here and not
in library code.
"""

from __future__ import annotations

import argparse
import os
import sys

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)

_PRESET_PACKETS = {"table1": 2000, "ci": 64}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isacsim",
        description="Range-Doppler waveform comparison simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="execute a comparison run from a config file")
    run.add_argument("config", help="path to the scenario configuration file")
    run.add_argument("--out", help="output directory (overrides the config)")
    run.add_argument(
        "--preset",
        choices=sorted(_PRESET_PACKETS),
        help="override the CPI length: 'table1' = 2000 packets, 'ci' = 64 packets",
    )
    run.add_argument(
        "--waveforms",
        help="comma-separated subset of waveforms to run (overrides the config)",
    )
    run.add_argument("--bench", action="store_true", help="collect benchmark timings")
    run.add_argument(
        "--oracle",
        action="store_true",
        help="cross-check each map against the time-domain oracle",
    )
    return parser


def _apply_thread_env():
    threads = os.environ.get("ISACSIM_THREADS")
    if threads:
        for var in _THREAD_VARS:
            os.environ.setdefault(var, threads)


def main(argv=None) -> int:
    _apply_thread_env()
    args = _build_parser().parse_args(argv)

    # Imported only after the thread caps are in place: these pull in numpy.
    from dataclasses import replace

    from .config import parse_config, parse_waveform_list, with_packets
    from .errors import ConfigError, ScenarioError
    from .harness import run_comparison

    try:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {args.config!r}: {exc}") from None
        cfg = parse_config(text)
        if args.preset:
            cfg = with_packets(cfg, _PRESET_PACKETS[args.preset])
        if args.waveforms:
            try:
                cfg = replace(cfg, waveforms=parse_waveform_list(args.waveforms))
            except ValueError as exc:
                raise ConfigError(f"invalid --waveforms: {exc}") from None
        if args.out:
            cfg = replace(cfg, output_dir=args.out)
        if args.bench:
            cfg = replace(cfg, bench_enabled=True)
        if args.oracle:
            cfg = replace(cfg, run_oracle=True)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        outcome = run_comparison(cfg)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 3

    for warning in outcome.summary["warnings"]:
        print(f"warning: {warning}")
    for entry in outcome.summary["waveforms"]:
        name = entry["waveform"]
        det = entry["detection"]
        if det is None:
            print(f"{name}: FAILED ({entry.get('error', 'no detection')})")
            continue
        pslr = entry["pslr_db"]
        pslr_text = f"{pslr:.2f} dB" if pslr is not None else "no sidelobes"
        line = (
            f"{name}: peak {det['range_m']:.3f} m at {det['velocity_mps']:.3f} m/s "
            f"(bins {det['range_bin']}, {det['doppler_bin']}), PSLR {pslr_text}"
        )
        if "oracle_max_relative_deviation" in entry:
            line += f", oracle deviation {entry['oracle_max_relative_deviation']:.3g}"
        print(line)
    print(f"artifacts written to {outcome.out_dir}")
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
