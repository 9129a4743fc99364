"""Influence analysis driver, abstract matching tables and exports."""

from __future__ import annotations

import json
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional

from .lts import Lts
from .pbes import BesNodeKey, IaVariant, global_solve
from .solver import SolverStore, local_solve

BLK_VAR_LIMIT = 32


class BlkTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class AnnotationMap:
    """``d``: reachable state -> sorted tuple of significant variables."""

    variant: IaVariant
    universe: tuple[str, ...]
    entries: dict

    def __getitem__(self, state: int) -> tuple[str, ...]:
        return self.entries[state]


@dataclass(frozen=True)
class MatchingTable:
    universe: tuple[str, ...]
    entries: dict  # state -> (keep, hide)


def _check_property_vars(lts: Lts, variant: IaVariant) -> None:
    missing = sorted(variant.property_vars - set(lts.universe))
    if missing:
        raise ValueError(f"property variables not in the program: {', '.join(missing)}")


def _explore(lts: Lts) -> list[int]:
    """Reachable states in the order the worklist visits them."""
    visited = deque([lts.initial])
    queued = {lts.initial}
    explored: list[int] = []
    while visited:
        s = visited.popleft()
        explored.append(s)
        for _, t in lts._succ[s]:
            if t not in queued:
                queued.add(t)
                visited.append(t)
    return explored


def _solve_states(lts: Lts, variant: IaVariant, states, store: SolverStore) -> dict:
    out = {}
    for s in states:
        sig = set(variant.property_vars)
        for v in lts.universe:
            if v not in sig and local_solve(store, lts, BesNodeKey(variant, s, v)):
                sig.add(v)
        out[s] = tuple(sorted(sig))
    return out


def _solve_chunk(lts: Lts, variant: IaVariant, states: list[int]) -> dict:
    return _solve_states(lts, variant, states, SolverStore())


def influence_analysis(
    lts: Lts,
    variant: IaVariant,
    store: Optional[SolverStore] = None,
    jobs: int = 1,
) -> AnnotationMap:
    """Annotate every reachable state with the variables influencing it.

    One store serves every ``(state, var)`` resolution, so later queries reuse
    earlier expansions. With ``jobs > 1`` the reachable states are split into
    chunks, each solved in a worker process with its own store; ``store`` is
    then left untouched.
    """
    _check_property_vars(lts, variant)
    states = _explore(lts)
    if jobs <= 1 or len(states) < 2:
        if store is None:
            store = SolverStore()
        entries = _solve_states(lts, variant, states, store)
    else:
        chunks = [states[i::jobs] for i in range(jobs) if states[i::jobs]]
        entries = {}
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            for part in pool.map(_solve_chunk, [lts] * len(chunks), [variant] * len(chunks), chunks):
                entries.update(part)
    return AnnotationMap(variant, lts.universe, dict(sorted(entries.items())))


def annotation_from_table(lts: Lts, variant: IaVariant, table: dict) -> AnnotationMap:
    """Annotation map read off a full solution table (e.g. from ``global_solve``)."""
    _check_property_vars(lts, variant)
    entries = {}
    for s in sorted(lts.reachable()):
        sig = set(variant.property_vars)
        sig.update(v for v in lts.universe if table[BesNodeKey(variant, s, v)])
        entries[s] = tuple(sorted(sig))
    return AnnotationMap(variant, lts.universe, entries)


def oracle_annotation(lts: Lts, variant: IaVariant) -> AnnotationMap:
    return annotation_from_table(lts, variant, global_solve(lts, variant))


def matching_table(d: AnnotationMap, universe: Optional[Iterable[str]] = None) -> MatchingTable:
    universe = tuple(sorted(universe if universe is not None else d.universe))
    entries = {}
    for s, keep in sorted(d.entries.items()):
        keep = tuple(sorted(keep))
        extra = set(keep) - set(universe)
        if extra:
            raise ValueError(f"state {s} keeps variables outside the universe: {sorted(extra)}")
        entries[s] = (keep, tuple(v for v in universe if v not in keep))
    return MatchingTable(universe, entries)


def export_blk(
    universe: Iterable[str],
    variant: IaVariant = IaVariant(1),
    eval_var: Optional[str] = None,
    limit: int = BLK_VAR_LIMIT,
    force: bool = False,
) -> str:
    """Parameterless modal equation block for EVALUATOR-style ``.blk`` files.

    Five single-operator equations per variable; the size grows with the
    square of the number of variables, so more than ``limit`` variables is
    refused unless ``force`` is set.
    """
    names = sorted(set(universe))
    if len(names) > limit and not force:
        raise BlkTooLarge(
            f"{len(names)} variables exceed the .blk limit of {limit} (quadratic output); "
            "pass force=True to emit anyway"
        )
    if eval_var is not None and eval_var not in names:
        raise ValueError(f"eval variable {eval_var!r} is not a program variable")
    lines = ["block mu B is"]
    for x in names:
        others = [z for z in names if z != x] or [x]
        actions = [f'"BOOL {x}"']
        if variant.uses_asserts:
            actions.append(f'"ASSERT {x}"')
        actions.extend(f'"ASSIGN {w} {x}"' for w in sorted(variant.property_vars))
        y4 = " or ".join(f'< "ASSIGN {z} {x}" > Y1_{z}' for z in others)
        killed = " or ".join(f'"ASSIGN {x} {z}"' for z in others)
        lines += [
            f"  Y1_{x} = Y2_{x} or Y3_{x}",
            f"  Y2_{x} = < {' or '.join(actions)} > TRUE",
            f"  Y3_{x} = Y4_{x} or Y5_{x}",
            f"  Y4_{x} = {y4}",
            f"  Y5_{x} = < not ({killed}) > Y1_{x}",
        ]
    lines.append("end block")
    if eval_var is not None:
        lines.append(f"eval B:Y1_{eval_var}")
    return "\n".join(lines) + "\n"


def report(d: AnnotationMap, table: MatchingTable, fmt: str = "table") -> str:
    if fmt == "json":
        doc = {
            "variant": d.variant.name,
            "property_vars": sorted(d.variant.property_vars),
            "universe": list(table.universe),
            "states": [
                {"id": s, "keep": list(keep), "hide": list(hide)}
                for s, (keep, hide) in sorted(table.entries.items())
            ],
        }
        if d.variant.level == 3:
            doc["note"] = "IA3 is evaluated with the IA2 encoding"
        return json.dumps(doc, indent=2) + "\n"
    if fmt != "table":
        raise ValueError(f"unknown report format {fmt!r}")

    def cell(vs) -> str:
        return ",".join(vs) if vs else "-"

    header = f"# {d.variant} universe: {cell(table.universe)}"
    if d.variant.level == 3:
        header += " (IA3 evaluated as IA2)"
    rows = sorted(table.entries.items())
    sw = max((len(str(s)) for s, _ in rows), default=1)
    kw = max((len(cell(k)) for _, (k, _) in rows), default=1)
    lines = [header]
    for s, (keep, hide) in rows:
        lines.append(f"{s:<{sw}}  keep: {cell(keep):<{kw}}   hide: {cell(hide)}")
    return "\n".join(lines) + "\n"
