"""Command line entry point.

    influence annotate p1.mc --ia 1
    influence annotate model.aut --ia 4 --property-vars x --format json --oracle
    influence random --seed 7 > random.aut

Exit status: 0 success, 1 input or parse error, 2 oracle mismatch, 64 usage error.
"""

from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, TextIO

from .analysis import (
    BLK_VAR_LIMIT,
    BlkTooLarge,
    annotation_from_table,
    export_blk,
    influence_analysis,
    matching_table,
    report,
)
from .frontend import FrontendError, build_cfg, cfg_to_lts, parse_program
from .lts import AutFormatError, random_lts, read_aut, write_aut
from .pbes import BesNodeKey, IaVariant, global_solve
from .solver import SolverStore, diagnostic, local_solve, to_dot

EXIT_OK, EXIT_INPUT, EXIT_ORACLE, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    input: Path
    variant: IaVariant
    input_kind: str = "auto"
    output: str = "table"
    emit_blk: Optional[Path] = None
    blk_eval: Optional[str] = None
    force_blk: bool = False
    emit_aut: Optional[Path] = None
    figure: Optional[Path] = None
    diagnose: Optional[tuple[int, str]] = None
    oracle: bool = False
    jobs: int = 1
    property_vars: list[str] = field(default_factory=list)


def _load(config: RunConfig):
    kind = config.input_kind
    if kind == "auto":
        suffix = config.input.suffix.lower()
        if suffix == ".mc":
            kind = "mini-lang"
        elif suffix == ".aut":
            kind = "aut"
        else:
            raise UsageError(f"cannot infer input kind from {config.input.name!r}; use --kind")
    text = config.input.read_text(encoding="utf-8")
    if kind == "aut":
        return read_aut(text), {}
    cfg = build_cfg(parse_program(text))
    names = {}
    for label, node in sorted(cfg.labels.items(), key=lambda kv: (kv[1], kv[0])):
        names[node] = f"{names[node]},{label}" if node in names else label
    return cfg_to_lts(cfg), names


def run(config: RunConfig, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        lts, state_names = _load(config)
    except UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except (OSError, UnicodeDecodeError, FrontendError, AutFormatError) as exc:
        print(f"error: {config.input}: {exc}", file=err)
        return EXIT_INPUT

    variant = config.variant
    unknown = sorted(variant.property_vars - set(lts.universe))
    if unknown:
        print(f"error: property variables not in the program: {', '.join(unknown)}", file=err)
        return EXIT_USAGE
    if config.diagnose is not None:
        s, v = config.diagnose
        if not 0 <= s < lts.num_states or v not in lts.universe:
            print(f"error: --diagnose {s}:{v} names no state/variable of the model", file=err)
            return EXIT_USAGE

    store = SolverStore()
    d = influence_analysis(lts, variant, store=store, jobs=config.jobs)
    table = matching_table(d, lts.universe)
    out.write(report(d, table, config.output))

    status = EXIT_OK
    if config.oracle:
        status = _check_oracle(lts, variant, d, store, err)

    if config.diagnose is not None:
        key = BesNodeKey(variant, *config.diagnose)
        local_solve(store, lts, key)
        out.write(to_dot(diagnostic(store, key), store))

    try:
        if config.emit_aut is not None:
            config.emit_aut.write_text(write_aut(lts), encoding="utf-8")
        if config.emit_blk is not None:
            text = export_blk(lts.universe, variant, config.blk_eval, force=config.force_blk)
            config.emit_blk.write_text(text, encoding="utf-8")
        if config.figure is not None:
            from .plotting import plot_matching_table

            plot_matching_table(table, config.figure, title=f"{variant} on {config.input.name}",
                                state_names=state_names)
    except (BlkTooLarge, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    return status


def _check_oracle(lts, variant, d, store, err) -> int:
    table = global_solve(lts, variant)
    mismatches = [
        f"{k}: local={n.value} global={table[k]}"
        for k, n in sorted(store.nodes.items(), key=lambda kv: (kv[0].state, kv[0].var))
        if n.stable and n.value != table[k]
    ]
    expected = annotation_from_table(lts, variant, table)
    if expected.entries != d.entries:
        mismatches.append("annotation map differs from the fixed point iteration")
    for line in mismatches:
        print(f"oracle mismatch: {line}", file=err)
    return EXIT_ORACLE if mismatches else EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _diagnose_arg(text: str) -> tuple[int, str]:
    state, sep, var = text.partition(":")
    if not sep or not state.isdigit() or not var:
        raise argparse.ArgumentTypeError("expected STATE:VAR, e.g. 0:x")
    return int(state), var


def _vars_arg(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="influence", description="Influence analysis of programs and LTSs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ann = sub.add_parser("annotate", help="annotate every reachable state with influent variables")
    ann.add_argument("input", type=Path, help=".mc source or .aut LTS")
    ann.add_argument("--kind", choices=["auto", "mini-lang", "aut"], default="auto")
    ann.add_argument("--ia", type=int, choices=[1, 2, 3, 4], default=1)
    ann.add_argument("--property-vars", type=_vars_arg, default=[], metavar="A,B,...")
    ann.add_argument("--format", choices=["table", "json"], default="table")
    ann.add_argument("--emit-blk", type=Path, metavar="PATH")
    ann.add_argument("--blk-eval", metavar="VAR", help="add an 'eval B:Y1_VAR' clause")
    ann.add_argument("--force-blk", action="store_true", help=f"allow more than {BLK_VAR_LIMIT} variables")
    ann.add_argument("--emit-aut", type=Path, metavar="PATH")
    ann.add_argument("--figure", type=Path, metavar="PATH", help="render the keep/hide grid")
    ann.add_argument("--diagnose", type=_diagnose_arg, metavar="STATE:VAR")
    ann.add_argument("--oracle", action="store_true", help="cross-check against global iteration")
    ann.add_argument("--jobs", type=int, default=1, metavar="N")

    rnd = sub.add_parser("random", help="print a random LTS in .aut format")
    rnd.add_argument("--seed", type=int, default=0)
    rnd.add_argument("--states", type=int, default=30)
    rnd.add_argument("--transitions", type=int, default=90)
    rnd.add_argument("--vars", type=int, default=4)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "random":
        lts = random_lts(random.Random(args.seed), args.states, args.transitions, args.vars)
        sys.stdout.write(write_aut(lts))
        return EXIT_OK

    if args.property_vars and args.ia != 4:
        parser.error("--property-vars is only valid with --ia 4")
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        variant = IaVariant(args.ia, args.property_vars)
    except ValueError as exc:
        parser.error(str(exc))
    config = RunConfig(
        input=args.input,
        variant=variant,
        input_kind=args.kind,
        output=args.format,
        emit_blk=args.emit_blk,
        blk_eval=args.blk_eval,
        force_blk=args.force_blk,
        emit_aut=args.emit_aut,
        figure=args.figure,
        diagnose=args.diagnose,
        oracle=args.oracle,
        jobs=args.jobs,
        property_vars=args.property_vars,
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
