"""Command-line entry point: ``damlink <subcommand> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..errors import DamLinkError
from .config import PROFILES, ExperimentConfig
from .experiments import cmd_ber, cmd_gen_channel, cmd_papr, cmd_spectral_efficiency

log = logging.getLogger("damlink")

COMMANDS = {
    "spectral-efficiency": cmd_spectral_efficiency,
    "ber": cmd_ber,
    "papr": cmd_papr,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON experiment config, merged over the profile")
    common.add_argument("--profile", choices=PROFILES, default="desk", help="base profile (default: desk)")
    common.add_argument("--seed", type=int, help="override monte_carlo.base_seed")
    common.add_argument("--out", type=Path, help="output file (default: stdout)")
    common.add_argument("--deterministic", action="store_true", help="omit the timestamp from headers")
    common.add_argument("--num-channels", type=int, help="override monte_carlo.num_channels")
    common.add_argument("--num-blocks", type=int, help="override monte_carlo.num_symbol_blocks")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="damlink",
        description="DAM vs OFDM link-level experiments with fully digital and hybrid beamforming.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    g = sub.add_parser("gen-channel", parents=[common], help="write one channel realization as JSON")
    g.add_argument("--draw", type=int, default=0, help="Monte Carlo draw index (default 0)")
    sub.add_parser("spectral-efficiency", parents=[common], help="average effective SE sweep (CSV)")
    sub.add_parser("ber", parents=[common], help="BER versus transmit power (CSV)")
    sub.add_parser("papr", parents=[common], help="PAPR CCDF table (CSV)")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is not None:
        cfg = ExperimentConfig.from_file(args.config, profile=args.profile)
    else:
        cfg = ExperimentConfig.from_profile(args.profile)
    mc = {}
    if args.seed is not None:
        mc["base_seed"] = args.seed
    if args.num_channels is not None:
        mc["num_channels"] = args.num_channels
    if args.num_blocks is not None:
        mc["num_symbol_blocks"] = args.num_blocks
    return cfg.replace({"monte_carlo": mc}) if mc else cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args)
        log.info("profile %s, base seed %d", cfg.name, cfg.base_seed)
        if args.command == "gen-channel":
            text = cmd_gen_channel(cfg, args.draw)
        else:
            text = COMMANDS[args.command](cfg, deterministic=args.deterministic)
    except (DamLinkError, OSError, ValueError) as exc:
        print(f"damlink: error: {exc}", file=sys.stderr)
        return 2
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
        log.info("wrote %s", args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
