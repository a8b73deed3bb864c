#!/usr/bin/env python3
"""
Batch experiment driver.

    python cli.py run --algo alg3,rls --n 32,64 --kappa 1,2 --trials 100 --out results.csv
    python cli.py verify --ell 2,4,8
    python cli.py summarize results.csv
"""

import argparse
import logging
import sys
from typing import List, Optional

from config import Config, get_config
from distinguishing import SequenceCacheError
from services import (
    EXIT_ANOMALY, EXIT_CONFIG_ERROR, EXIT_OK, SummaryError, get_experiment_service,
    get_sequence_service, summarize,
)
from validators import ExperimentConfig, validate_model

logger = logging.getLogger(__name__)


def configure_logging(cfg: Config, level: Optional[str] = None):
    """Configure the root logger once from the configuration."""
    handlers = [logging.StreamHandler(sys.stderr)]
    if cfg.LOG_FILE:
        handlers.append(logging.FileHandler(cfg.LOG_FILE))
    logging.basicConfig(
        level=getattr(logging, (level or cfg.LOG_LEVEL).upper(), logging.INFO),
        format=cfg.LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected a comma-separated list of integers, got {text!r}")


def _str_list(text: str) -> List[str]:
    return [v.strip() for v in text.split(',') if v.strip()]


def build_parser(cfg: Config) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Unbiased black-box OneMax experiments')
    parser.add_argument('--log-level', help=f'Logging level (default: {cfg.LOG_LEVEL})')
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', help='Run a seed sweep and write a CSV')
    run.add_argument('--algo', type=_str_list, default=['alg3'], help='Comma list of alg3, sampling, rls')
    run.add_argument('--n', type=_int_list, required=True, help='Comma list of string lengths')
    run.add_argument('--kappa', type=_int_list, default=[1], help='Comma list of kappa (block length 2^kappa)')
    run.add_argument('--mode', choices=['paper', 'desk'], default=cfg.DEFAULT_MODE)
    run.add_argument('--trials', type=int, default=cfg.DEFAULT_TRIALS)
    run.add_argument('--seed', type=int, default=0, help='Base seed of the sweep')
    run.add_argument('--out', default=cfg.OUTPUT_PATH, help='Output CSV path')
    run.add_argument('--cache', default=cfg.SEQUENCE_CACHE_DIR, help='Sequence cache directory')
    run.add_argument('--strict', action=argparse.BooleanOptionalAction, default=cfg.STRICT,
                     help='Treat anomalies as failures (exit 2)')
    run.add_argument('--jobs', type=int, default=cfg.JOBS, help='Worker processes')
    run.add_argument('--sequences', choices=['shortest', 'canonical'], default='shortest')
    run.add_argument('--m', type=int, default=None, help='Storage exponent override (desk mode)')
    run.add_argument('--halt-on-hit', action='store_true', help='Stop runs at the first optimal query')

    verify = sub.add_parser('verify', help='Ensure verified sequences are cached')
    verify.add_argument('--ell', type=_int_list, required=True, help='Comma list of block lengths')
    verify.add_argument('--cache', default=cfg.SEQUENCE_CACHE_DIR, help='Sequence cache directory')

    summary = sub.add_parser('summarize', help='Summarize a results CSV')
    summary.add_argument('path', help='Results CSV')
    return parser


def cmd_run(args, cfg: Config) -> int:
    data = {
        'algorithms': args.algo, 'n_values': args.n, 'kappa_values': args.kappa, 'mode': args.mode,
        'trials': args.trials, 'seed': args.seed, 'output_path': args.out, 'cache_dir': args.cache,
        'strict': args.strict, 'jobs': args.jobs, 'sequences': args.sequences, 'm': args.m,
        'halt_on_hit': args.halt_on_hit,
    }
    is_valid, experiment, error = validate_model(data, ExperimentConfig)
    if not is_valid:
        print(f"Configuration error: {error}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    service = get_experiment_service(cfg, experiment.cache_dir)
    try:
        result = service.run_experiment(experiment)
    except SequenceCacheError as e:
        print(f"Sequence cache error: {e}", file=sys.stderr)
        return EXIT_ANOMALY

    print(f"Wrote {len(result.rows)} rows to {result.output_path}")
    if result.anomalies:
        print(f"{len(result.anomalies)} anomalies", file=sys.stderr)
    return result.exit_code


def cmd_verify(args, cfg: Config) -> int:
    service = get_sequence_service(args.cache, cfg)
    try:
        report = service.verify_sequences(args.ell)
    except SequenceCacheError as e:
        print(f"Sequence cache error: {e}", file=sys.stderr)
        return EXIT_ANOMALY
    for entry in report:
        if entry['status'] == 'skipped':
            print(f"ell={entry['ell']}: skipped ({entry['reason']})")
        else:
            print(f"ell={entry['ell']}: t={entry['t']} ({entry['status']})")
    return EXIT_OK


def cmd_summarize(args, cfg: Config) -> int:
    try:
        print(summarize(args.path))
    except SummaryError as e:
        print(f"Summary error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    return EXIT_OK


COMMANDS = {'run': cmd_run, 'verify': cmd_verify, 'summarize': cmd_summarize}


def main(argv: Optional[List[str]] = None, cfg: Optional[Config] = None) -> int:
    cfg = cfg or get_config()
    try:
        cfg.validate()
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return EXIT_CONFIG_ERROR

    parser = build_parser(cfg)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG_ERROR if e.code else EXIT_OK

    configure_logging(cfg, args.log_level)
    return COMMANDS[args.command](args, cfg)


if __name__ == '__main__':
    sys.exit(main())
