"""
lifted-networks command line

	lifted-networks table1 --data housing.csv [--config run.cfg] [--seed N] [--out DIR] [--quick]
	lifted-networks spd-demo | hyperbolic-demo | classify-demo | proptest [...]

Exit codes: 0 success, 1 a check failed, 2 configuration or I/O error.
"""

import argparse
import logging
import sys

from .api import COMMANDS
from .config import load_config
from .exceptions import ConfigError, SchemaError
from .reports import render

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2


def build_parser():
	parser = argparse.ArgumentParser(
		prog="lifted-networks",
		description="Lifted universal approximators: Table 1, manifold demos and the property battery",
	)
	parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
	sub = parser.add_subparsers(dest="command", required=True)
	for name in COMMANDS:
		cmd = sub.add_parser(name)
		cmd.add_argument("--config", help="flat key = value config file")
		cmd.add_argument("--seed", type=int, help="master seed (overrides the config)")
		cmd.add_argument("--out", help="output directory (overrides the config)")
		cmd.add_argument("--quick", action="store_true", help="smoke scale")
		if name == "table1":
			cmd.add_argument("--data", help="California housing CSV")
	return parser


def resolve_config(args):
	overrides = {"seed": args.seed, "out": args.out}
	if args.command == "table1":
		overrides["data"] = args.data
	if args.seed is not None and args.seed < 0:
		raise ConfigError(f"--seed must be a non-negative integer, got {args.seed}")
	return load_config(args.command, args.config, quick=args.quick, overrides=overrides)


def main(argv=None):
	args = build_parser().parse_args(argv)
	logging.basicConfig(
		level=logging.DEBUG if args.verbose else logging.INFO,
		format="%(asctime)s %(levelname)s %(name)s: %(message)s",
	)
	try:
		config = resolve_config(args)
		report = COMMANDS[args.command](config)
	except (ConfigError, SchemaError, OSError) as e:
		logger.error(f"{args.command}: {e}")
		return EXIT_CONFIG

	print(report.title)
	print(render(report.columns, report.data))
	print(f"\nartifacts: {report.out}")
	if not report.passed:
		failed = [name for name, ok in report.manifest.checks.items() if not ok]
		logger.error(f"{args.command}: failed checks: {', '.join(failed)}")
		return EXIT_CHECK_FAILED
	return EXIT_OK


if __name__ == "__main__":
	sys.exit(main())
