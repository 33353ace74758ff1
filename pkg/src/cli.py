"""
Command-line experiment runner.

Subcommands: ``metrics-table``, ``simulate``, ``attack`` and ``game``. Exit codes
are 0 on success, 1 when a check, conservation test or acceptance band fails,
and 2 on usage or configuration errors.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .config import Config
from .core.adversary import AttackerModel, AttackKind, run_attack
from .core.data_io import canonical_json, ingest_csv, persist_report
from .core.errors import DomainError, DTBASError
from .core.game import Distinguisher, Observable, Strategy, expected_band, run_game
from .core.metrics import emit_anonymity_tables, published_values_check
from .core.model import ShareScheme, SimConfig, parse_config_text
from .core.simulation import AggregationSimulation
from .utils.logging_setup import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _add_sim_flags(parser: argparse.ArgumentParser, default_intervals: Optional[int]):
    parser.add_argument("--n-meters", type=int, help="number of smart meters (> 2)")
    parser.add_argument("--m-aggregators", type=int, help="number of aggregators (> 2)")
    parser.add_argument("--scheme", choices=[s.value for s in ShareScheme], help="share scheme")
    parser.add_argument("--modulus", type=int, help="prime ring modulus")
    parser.add_argument("--intervals", type=int, default=default_intervals,
                        help="intervals to simulate (default: the billing period)")
    parser.add_argument("--profiles", type=Path, help="CSV of per-meter readings (meter_id,interval,wh)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dtbas", description="Distributed trust based anonymous aggregation simulator")
    parser.add_argument("--seed", type=int, default=None, help=f"root seed (default {Config.SEED})")
    parser.add_argument("--config", type=Path, help="simulation config file of 'key = value' lines")
    parser.add_argument("--out", type=Path, help="write the JSON report to this path")
    parser.add_argument("--log-level", default=Config.LOG_LEVEL, help="logging level")
    sub = parser.add_subparsers(dest="command", required=True)

    metrics = sub.add_parser("metrics-table", help="reproduce the degree-of-anonymity tables")
    metrics.add_argument("--format", choices=["text", "json"], default="text")
    metrics.add_argument("--check", action="store_true", help="compare against the published values")
    metrics.set_defaults(handler=metrics_table_cmd)

    simulate = sub.add_parser("simulate", help="run split -> aggregate -> supplier -> bill")
    _add_sim_flags(simulate, None)
    simulate.set_defaults(handler=simulate_cmd)

    attack = sub.add_parser("attack", help="evaluate an active or passive attacker")
    _add_sim_flags(attack, Config.ROUND_LENGTH)
    attack.add_argument("--kind", choices=[k.value for k in AttackKind], default=AttackKind.ACTIVE.value)
    attack.add_argument("--compromised", type=int, nargs="+", default=[0],
                        help="aggregators controlled by an active attacker")
    attack.add_argument("--target", type=int, default=0, help="meter the attacker tries to attribute")
    attack.set_defaults(handler=attack_cmd)

    game = sub.add_parser("game", help="run the distinguishing game")
    game.add_argument("--trials", type=int, default=Config.GAME_TRIALS)
    game.add_argument("--n-meters", type=int)
    game.add_argument("--m-aggregators", type=int)
    game.add_argument("--scheme", choices=[s.value for s in ShareScheme])
    game.add_argument("--modulus", type=int)
    game.add_argument("--observable", choices=[o.value for o in Observable],
                      default=Observable.SINGLE_AGGREGATOR.value)
    game.add_argument("--strategy", choices=[s.value for s in Strategy],
                      default=Strategy.COLUMN_SUM_MATCHER.value)
    game.add_argument("--round-length", type=int, default=Config.ROUND_LENGTH)
    game.add_argument("--profiles", type=Path,
                      help="CSV whose meters 0 and 1 are the challenge pair; further meters form the background pool")
    game.add_argument("--workers", type=int, default=Config.GAME_WORKERS)
    game.add_argument("--record-trials", action="store_true", help="include per-trial records")
    game.add_argument("--assert-band", action="store_true",
                      help="exit 1 when the result leaves the expected band")
    game.set_defaults(handler=game_cmd)
    return parser


def resolve_config(args: argparse.Namespace) -> SimConfig:
    """Flags override the config file, which overrides the defaults."""
    values = {
        "n_meters": Config.N_METERS,
        "m_aggregators": Config.M_AGGREGATORS,
        "scheme": Config.SCHEME,
        "modulus": Config.MODULUS,
        "seed": Config.SEED,
        "intervals_per_period": Config.INTERVALS_PER_PERIOD,
    }
    if args.config is not None:
        try:
            values.update(parse_config_text(args.config.read_text(encoding="utf-8")))
        except OSError as e:
            raise DomainError(f"cannot read config {args.config}: {e.strerror}") from e
    overrides = {
        "n_meters": getattr(args, "n_meters", None),
        "m_aggregators": getattr(args, "m_aggregators", None),
        "scheme": getattr(args, "scheme", None),
        "modulus": getattr(args, "modulus", None),
        "seed": args.seed,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    return SimConfig(**values)


def _emit(args: argparse.Namespace, report: dict, summary: str):
    print(summary)
    if args.out is not None:
        persist_report(report, args.out)


def metrics_table_cmd(args: argparse.Namespace) -> int:
    tables = emit_anonymity_tables()
    if args.format == "json":
        sys.stdout.write(canonical_json(tables.to_dict()))
    else:
        sys.stdout.write(tables.format_text())
    if args.out is not None:
        persist_report(tables.to_dict(), args.out)
    if args.check:
        mismatches = published_values_check(tables)
        if mismatches:
            print(f"golden mismatch: {mismatches[0]}", file=sys.stderr)
            return EXIT_FAILED
        print("all table cells match the published values")
    return EXIT_OK


def _simulation(args: argparse.Namespace, config: SimConfig) -> AggregationSimulation:
    profiles = ingest_csv(args.profiles, bound=config.energy_bound) if args.profiles else None
    return AggregationSimulation(config, profiles, args.intervals)


def simulate_cmd(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    result = _simulation(args, config).run()
    report = result.to_report()
    ok = result.conservation_ok and report["bills_match_plaintext"]
    summary = (f"{config.n_meters} meters, {config.m_aggregators} aggregators, {result.n_intervals} intervals: "
               f"conservation {'passed' if result.conservation_ok else 'FAILED'}, "
               f"bills {'match' if report['bills_match_plaintext'] else 'DO NOT match'} plaintext totals")
    _emit(args, report, summary)
    return EXIT_OK if ok else EXIT_FAILED


def attack_cmd(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    if args.kind == AttackKind.PASSIVE.value:
        model = AttackerModel.passive(config.m_aggregators)
    else:
        model = AttackerModel.active(*args.compromised)
    result = _simulation(args, config).run()
    report = run_attack(result, model, args.target, Config.DECRYPTION_DELAY_HOURS)
    known = sum(1 for e in report["estimates"] if e["point_estimate"] is not None)
    summary = (f"{model.kind.value} attack on {sorted(model.compromised)} ({config.scheme.value}): "
               f"{known}/{config.n_meters} readings estimated, "
               f"degree of anonymity {report['anonymity']['degree']}")
    if "passive" in report:
        summary += (f"; full reconstruction after ~{report['passive']['decryption_delay_hours']:g} h "
                    f"of decryption")
    _emit(args, report, summary)
    return EXIT_OK


def game_cmd(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    distinguisher = Distinguisher(Strategy(args.strategy), Observable(args.observable))
    challenge, pool = None, None
    if args.profiles:
        profiles = ingest_csv(args.profiles, bound=config.energy_bound)
        if len(profiles) < 2:
            raise DomainError("the profiles CSV needs at least meters 0 and 1 (the challenge pair)")
        challenge = (profiles[0], profiles[1])
        pool = [profile for meter, profile in sorted(profiles.items()) if meter > 1] or None
    transcript = run_game(distinguisher, config.n_meters, args.trials, config, config.seed,
                          challenge=challenge, pool=pool, round_length=args.round_length,
                          record_trials=args.record_trials, workers=args.workers)
    _emit(args, transcript.to_dict(), transcript.summary())
    if args.assert_band:
        band = expected_band(distinguisher, config.scheme, args.trials)
        if band is None:
            logger.warning("No acceptance band is defined for this configuration")
        else:
            violation = band.check(transcript)
            if violation:
                print(f"band violation: {violation}", file=sys.stderr)
                return EXIT_FAILED
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        Config.validate_config()
        return args.handler(args)
    except (DomainError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DTBASError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED
