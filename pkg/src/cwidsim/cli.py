"""Command-line front end.

Subcommands write CSV files into ``--out`` together with ``config_echo.yaml``,
a config that reproduces the run exactly when passed back via ``--config``.

Exit codes: 0 success, 1 runtime error, 2 usage or config error.
"""

import argparse
import csv
import logging
import os
import sys

import yaml

from . import channel as ch
from .config import ConfigError, dump_config, load_config, study_to_dict
from .harness import ascii_roundtrip, reports_summary, reports_to_csv, run_ber_table, run_many
from .modem import effective_bit_rate
from .waveforms import SCHEMES, build_alphabet

logger = logging.getLogger("cwidsim")

WATERFALL_FIELDS = ("scheme", "snr_db", "bits", "errors", "ber")
TABLE3_FIELDS = ("scheme", "equalization", "bitrate_kbps", "bandwidth", "errors", "ber")
BANDWIDTH = {"cosine-QPSK": "11.5kHz"}
# one-bit-per-symbol autocorrelation DBPSK comparison, listed for its rate only
REFERENCE_ROW = ("LFM-DBPSK", 1, "5-18kHz")
TABLE3_ORDER = ("cosine-QPSK", "LFM-QPSK", REFERENCE_ROW[0], "CWID-4", "CWID-8", "CWID-16")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML config (default: shipped study config)")
    common.add_argument("--out", metavar="DIR", default="results", help="output directory")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--scheme", action="append", choices=SCHEMES, metavar="NAME",
                        help="restrict to this scheme (repeatable)")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--quiet", action="store_true", help="errors only")
    verbosity.add_argument("--verbose", action="count", default=0, help="more logging")

    parser = argparse.ArgumentParser(prog="cwidsim", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("alphabet", parents=[common], help="dump carrier waveforms")
    ir = sub.add_parser("channel-ir", parents=[common], help="dump eigenray tap tables")
    ir.add_argument("--depth", type=float, action="append", help="receiver depth in m (repeatable)")
    sub.add_parser("run", parents=[common], help="BER at the config SNR points")
    sub.add_parser("sweep", parents=[common], help="BER waterfall over the sweep points")
    sub.add_parser("table3", parents=[common], help="scheme comparison table")
    sub.add_parser("roundtrip", parents=[common], help="send the config text message")
    return parser


def _setup_logging(args):
    level = logging.WARNING
    if args.quiet:
        level = logging.ERROR
    elif args.verbose == 1:
        level = logging.INFO
    elif args.verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _write(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)
    logger.info("wrote %s", path)


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info("wrote %s", path)


def _summary(path, reports):
    _write(path, yaml.safe_dump(reports_summary(reports), sort_keys=False))


def cmd_alphabet(study, out, args):
    for scheme in study.schemes:
        build_alphabet(scheme).to_csv(os.path.join(out, f"alphabet_{scheme}.csv"))


def cmd_channel_ir(study, out, args):
    base = study.base
    depths = args.depth or base.hydrophone_depths
    rows = []
    for i, depth in enumerate(depths):
        env = base.env.at_depth(depth)
        for ray in ch.compute_eigenrays(env, base.fading.reference_frequency):
            rows.append([i, repr(float(depth)), ray.s, ray.b, repr(ray.distance), repr(ray.delay),
                         repr(ray.grazing_angle), repr(ray.loss_product)])
    _write_rows(os.path.join(out, "channel_ir.csv"),
                ["hydrophone", "depth_m", "s", "b", "distance_m", "delay_s",
                 "grazing_angle_rad", "loss"], rows)


def cmd_run(study, out, args):
    configs = [study.experiment(s) for s in study.schemes]
    reports = run_many(configs, study.workers, study_to_dict(study))
    _write(os.path.join(out, "results.csv"), reports_to_csv(reports))
    _summary(os.path.join(out, "summary.yaml"), reports)


def cmd_sweep(study, out, args):
    configs = [study.experiment(s, study.sweep_points) for s in study.schemes]
    reports = run_many(configs, study.workers, study_to_dict(study))
    _write(os.path.join(out, "waterfall.csv"), reports_to_csv(reports, WATERFALL_FIELDS))
    _summary(os.path.join(out, "summary.yaml"), reports)


def cmd_table3(study, out, args):
    reports = run_ber_table([study.experiment(s) for s in study.schemes], study.workers,
                            study_to_dict(study))
    layout = study.base.layout
    rows = {}
    for rep in reports:
        r = rep.records[0]
        rows[rep.scheme] = [rep.scheme, "PTRM", f"{r.effective_bit_rate / 1e3:.2f}",
                            BANDWIDTH.get(rep.scheme, "5-18kHz"), r.bit_errors, repr(r.ber)]
    if not args.scheme:
        name, bits, band = REFERENCE_ROW
        rows[name] = [name, "PTRM", f"{effective_bit_rate(bits, layout) / 1e3:.2f}", band,
                      "", "out-of-scope"]
    _write_rows(os.path.join(out, "table3.csv"), TABLE3_FIELDS,
                [rows[k] for k in TABLE3_ORDER if k in rows])
    _summary(os.path.join(out, "summary.yaml"), reports)


def cmd_roundtrip(study, out, args):
    schemes = study.schemes if args.scheme else ("CWID-4",)
    snr = study.base.snr_points[0]
    rows = []
    for scheme in schemes:
        decoded, ber = ascii_roundtrip(study.message, study.experiment(scheme), snr)
        rows.append([scheme, repr(snr), study.message, decoded, repr(ber)])
        if not args.quiet:
            print(f"{scheme} @ {snr} dB: {decoded!r} (BER {ber})")
    _write_rows(os.path.join(out, "roundtrip.csv"),
                ["scheme", "snr_db", "message", "decoded", "ber"], rows)


COMMANDS = {
    "alphabet": cmd_alphabet,
    "channel-ir": cmd_channel_ir,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "table3": cmd_table3,
    "roundtrip": cmd_roundtrip,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _setup_logging(args)
    try:
        study = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError(f"--seed must be non-negative, got {args.seed}")
            study = study.with_seed(args.seed)
        if args.scheme:
            study = study.filter_schemes(args.scheme)
            if not study.schemes:
                raise ConfigError(f"none of {args.scheme} is listed in the config schemes")
    except ConfigError as exc:
        print(f"cwidsim: config error: {exc}", file=sys.stderr)
        return 2
    try:
        os.makedirs(args.out, exist_ok=True)
        _write(os.path.join(args.out, "config_echo.yaml"), dump_config(study))
        COMMANDS[args.command](study, args.out, args)
    except Exception as exc:  # any runtime failure maps to exit 1
        logger.debug("failure", exc_info=True)
        print(f"cwidsim: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
