"""Command-line entry point: ``phireg {simulate,bruns,regret,experiment,verify}``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bruns import BrunsGameId, build_game, enumerate_144, export
from .dynamics import IntegrationError, IntegratorConfig, integrate
from .experiments import EXPERIMENTS, ExperimentConfig, ExperimentFailure, child_rng, run_experiment, sample_interior, version_string
from .game import ContractViolation, Game, classify_case
from .regret import Partition, regret_report
from .verify import run_checks

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _vector(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_game_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--game", type=Path, help="game JSON with row_payoff and col_payoff")
    src.add_argument("--bruns", help="Bruns game id such as BaxAs")
    p.add_argument("--T", type=float, default=IntegratorConfig.T)
    p.add_argument("--dt", type=float, default=IntegratorConfig.dt)
    p.add_argument("--stride", type=int, default=IntegratorConfig.record_stride)
    p.add_argument("--x0", type=_vector, help="row start, e.g. 0.9,0.1 (random if omitted)")
    p.add_argument("--y0", type=_vector, help="column start (random if omitted)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, help="output file (stdout if omitted)")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="phireg", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="integrate replicator dynamics and write the trajectory CSV")
    _add_game_args(sim)

    reg = sub.add_parser("regret", help="integrate and report external/internal/swap/mosaic regret")
    _add_game_args(reg)
    reg.add_argument("--bins", type=int, default=10)

    br = sub.add_parser("bruns", help="the 144-game suite")
    br.add_argument("action", choices=["list", "export"])
    br.add_argument("--out", type=Path, default=Path("bruns"))

    ex = sub.add_parser("experiment", help="run a batch experiment")
    ex.add_argument("name", choices=EXPERIMENTS)
    ex.add_argument("--config", type=Path)
    ex.add_argument("--seed", type=int)
    ex.add_argument("--trials", type=int)
    ex.add_argument("--T", type=float)
    ex.add_argument("--out", type=Path)

    ver = sub.add_parser("verify", help="run the self-check suite")
    ver.add_argument("--seed", type=int, default=0)
    return p


def _load_game(args) -> tuple[str, Game]:
    if args.game is not None:
        return args.game.stem, Game.load(args.game)
    gid = BrunsGameId.parse(args.bruns)
    return str(gid), build_game(gid)


def _starts(args, g: Game):
    rng = child_rng(args.seed, 0, 0)
    x0 = np.array(args.x0) if args.x0 is not None else sample_interior(rng, g.n)
    y0 = np.array(args.y0) if args.y0 is not None else sample_interior(rng, g.m)
    return x0, y0


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


def _integrate(args):
    name, g = _load_game(args)
    x0, y0 = _starts(args, g)
    cfg = IntegratorConfig(dt=args.dt, T=args.T, record_stride=args.stride)
    return name, g, integrate(g, x0, y0, cfg), cfg


def cmd_simulate(args) -> int:
    name, g, traj, cfg = _integrate(args)
    header = [f"game: {name} {json.dumps(g.to_dict())}", f"integrator: {json.dumps(dataclasses.asdict(cfg))}", f"version: {version_string()}"]
    _emit(traj.to_csv(header), args.out)
    return EXIT_OK


def cmd_regret(args) -> int:
    name, g, traj, _ = _integrate(args)
    rep = regret_report(traj, Partition.interval(args.bins))
    lines = ["game_id,T,external,internal,swap,mosaic"]
    vals = [rep.horizon, rep.external, rep.internal, rep.swap, rep.mosaic]
    lines.append(",".join([name] + [f"{v:.17g}" for v in vals]))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_bruns(args) -> int:
    if args.action == "export":
        paths = export(args.out)
        print(f"wrote {len(paths)} games to {args.out}")
    else:
        for gid, g in enumerate_144():
            print(f"{gid}\t{classify_case(g).value}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig(experiment=args.name)
    over = {"experiment": args.name}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.trials is not None:
        over["trials"] = args.trials
    if args.out is not None:
        over["out"] = str(args.out)
    if args.T is not None:
        over["integrator"] = dataclasses.replace(cfg.integrator, T=args.T)
    cfg = dataclasses.replace(cfg, **over)
    for path in run_experiment(cfg):
        print(path)
    return EXIT_OK


def cmd_verify(args) -> int:
    ok = True
    for name, passed, detail in run_checks(args.seed):
        print(f"{'ok  ' if passed else 'FAIL'} {name}: {detail}")
        ok &= passed
    return EXIT_OK if ok else EXIT_NUMERIC


COMMANDS = {
    "simulate": cmd_simulate,
    "regret": cmd_regret,
    "bruns": cmd_bruns,
    "experiment": cmd_experiment,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as stop:
        return int(stop.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (IntegrationError, ExperimentFailure, ArithmeticError) as err:
        print(f"phireg: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ContractViolation, ValueError, OSError, json.JSONDecodeError) as err:
        print(f"phireg: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
