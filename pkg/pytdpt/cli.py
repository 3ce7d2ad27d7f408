# pytdpt/cli.py
"""Command-line entry point: ``pytdpt {run,sweep,oracle,predict,copy-configs}``."""

import os
import sys
import argparse
import logging
from typing import List, Optional

from .api import predict_scenario, run_scenario
from .constants import EXIT_CONFIG_ERROR, EXIT_GUARD_ERROR, EXIT_OK
from .errors import ConfigurationError, NumericalConsistencyError, PhysicsGuardError
from .iterator import write_frame
from .oracle import run_oracle_suite
from .utils import copy_example_configs, expand_sweep, load_config, parse_overrides, resolve_config_path


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog='pytdpt', description="Norm analysis of the simple perturbative algorithm.")
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_ArgumentParser)

    def add_config_flags(p):
        p.add_argument('--config', required=True, help="Config file, or the name of a bundled config.")
        p.add_argument('--out', default='./pytdpt_results', help="Output directory.")
        p.add_argument('--set', action='append', default=[], metavar='KEY=VALUE',
                       help="Override a config value; may be repeated.")

    run = sub.add_parser('run', help="Run every point of a config.")
    add_config_flags(run)
    run.add_argument('--jobs', type=int, default=1, help="Worker processes.")

    sweep = sub.add_parser('sweep', help="Run a config that sweeps at least two points.")
    add_config_flags(sweep)
    sweep.add_argument('--jobs', type=int, default=1, help="Worker processes.")

    oracle = sub.add_parser('oracle', help="Run the identity checks.")
    oracle.add_argument('--max-m', type=int, default=4, dest='max_m')

    predict = sub.add_parser('predict', help="Write analytic prediction tables.")
    add_config_flags(predict)

    copy = sub.add_parser('copy-configs', help="Copy the bundled configs.")
    copy.add_argument('--dest', default='./pytdpt_configs')
    return parser


def _load_points(args):
    mapping = load_config(resolve_config_path(args.config))
    mapping.update(parse_overrides(args.set))
    return expand_sweep(mapping)


def main(argv: Optional[List[str]] = None) -> int:
    """Parses ``argv`` and dispatches; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"pytdpt: error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    try:
        if args.command in ('run', 'sweep'):
            points = _load_points(args)
            if args.command == 'sweep' and len(points) < 2:
                raise ConfigurationError(f"'sweep' needs at least two parameter points, got {len(points)}.")
            if args.jobs < 1:
                raise ConfigurationError(f"--jobs must be at least 1, got {args.jobs}.")
            result = run_scenario(points, args.out, jobs=args.jobs)
            print(f"Wrote {len(result.frames)} run(s); manifest: {result.manifest_path}")
            failed = [p for p in result.points if p['status'] != 'ok']
            return EXIT_GUARD_ERROR if failed else EXIT_OK

        if args.command == 'oracle':
            table = run_oracle_suite(args.max_m)
            print(table.to_string(index=False))
            return EXIT_OK if table['passed'].all() else EXIT_GUARD_ERROR

        if args.command == 'predict':
            points = _load_points(args)
            os.makedirs(args.out, exist_ok=True)
            for index, row in enumerate(points.to_dict('records')):
                table = predict_scenario(row)
                path = os.path.join(args.out, f"prediction_{index:03d}.csv")
                write_frame(table, path)
                print(f"point {index + 1}/{len(points)}: predicted onset "
                      f"{table.attrs['predicted_divergence_onset']:.6g} -> {path}")
            return EXIT_OK

        if args.command == 'copy-configs':
            copied = copy_example_configs(args.dest)
            return EXIT_OK if copied else EXIT_CONFIG_ERROR

    except ConfigurationError as e:
        logging.error(str(e))
        return EXIT_CONFIG_ERROR
    except (PhysicsGuardError, NumericalConsistencyError) as e:
        logging.error(str(e))
        return EXIT_GUARD_ERROR
    except OSError as e:
        logging.error(str(e))
        return EXIT_CONFIG_ERROR
    return EXIT_CONFIG_ERROR


def console_main():
    sys.exit(main())
