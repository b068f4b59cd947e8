"""Command-line entry point: `python -m app.cli <command> ...`."""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from app.cli.commands import (
    TARGETS, CompensateCommand, SimulateCountsCommand, SweepCommand, TimingCommand, TomoCommand,
)
from app.utils.enums import ExitCode, NoiseModel, Plane
from app.utils.settings import SETTINGS

COMMANDS = {
    "sweep": SweepCommand,
    "tomo": TomoCommand,
    "timing": TimingCommand,
    "simulate-counts": SimulateCountsCommand,
    "compensate": CompensateCommand,
}


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors, matching the config-error exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(int(ExitCode.CONFIG_ERROR), f"{self.prog}: config error: {message}\n")


def _add_config(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="experiment config (INI sections, or JSON)")
    parser.add_argument("--config-format", choices=("ini", "json"), default=None,
                        help="defaults to json for a .json suffix, else ini")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=SETTINGS.app_name, description="Fiber feed-forward remote state preparation simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sweep = sub.add_parser("sweep", help="fidelity versus Bloch angle on one plane")
    _add_config(sweep)
    sweep.add_argument("--seed", type=int, help="master seed (required)")
    sweep.add_argument("--out", help="output directory (overrides [output] output_dir)")
    sweep.add_argument("--plane", choices=[p.value for p in Plane])
    sweep.add_argument("--feedforward", choices=("on", "off"))
    sweep.add_argument("--infinite-statistics", action="store_true",
                       help="exact probabilities, no count noise or waveplate jitter")

    tomo = sub.add_parser("tomo", help="reconstruct a density matrix from a count file")
    tomo.add_argument("counts", help="count CSV")
    tomo.add_argument("--dim", type=int, choices=(2, 4))
    tomo.add_argument("--target", choices=TARGETS)
    tomo.add_argument("--out", help="write the reconstruction JSON here")

    timing = sub.add_parser("timing", help="timing feasibility and loss budget")
    _add_config(timing)
    timing.add_argument("--format", choices=("text", "json"), default="text")

    simulate = sub.add_parser("simulate-counts", help="write a count CSV sampled from a named state")
    simulate.add_argument("--state", choices=TARGETS, default="psi-minus")
    simulate.add_argument("--dim", type=int, choices=(2, 4), default=4)
    simulate.add_argument("--counts", type=int, default=40_000, help="events per setting")
    simulate.add_argument("--settings", type=int, help="keep only the first N settings of the suite")
    simulate.add_argument("--noise-model", choices=[m.value for m in NoiseModel], default=NoiseModel.MULTINOMIAL.value)
    simulate.add_argument("--exact", action="store_true", help="rounded expected counts instead of samples")
    simulate.add_argument("--seed", type=int)
    simulate.add_argument("--out", required=True)

    compensate = sub.add_parser("compensate", help="compensate a seeded random fiber")
    compensate.add_argument("--seed", type=int)
    compensate.add_argument("--tolerance", type=float, default=1e-6)
    compensate.add_argument("--max-iterations", type=int, default=50)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else int(ExitCode.CONFIG_ERROR)
    return COMMANDS[args.command]().process(args)


if __name__ == "__main__":
    sys.exit(main())
