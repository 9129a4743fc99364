"""Labeled transition systems and the Aldebaran ``.aut`` interchange format.

Labels come in four post-split shapes::

    i               invisible action (tau)
    "BOOL x"        boolean expression reading x
    "ASSERT x"      assertion reading x
    "ASSIGN x y"    assignment to x computed from y
    "ASSIGN x"      assignment to x from constants only

Anything else is rejected.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Union

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class AutFormatError(ValueError):
    """Malformed ``.aut`` text; carries the 1-based line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def check_var(name: str) -> str:
    if not isinstance(name, str) or not IDENT_RE.match(name):
        raise ValueError(f"invalid variable identifier: {name!r}")
    return name


@dataclass(frozen=True)
class Tau:
    kind_rank = 0

    @property
    def variables(self) -> tuple[str, ...]:
        return ()

    def __str__(self) -> str:
        return "i"


@dataclass(frozen=True)
class Bool:
    var: str
    kind_rank = 1

    def __post_init__(self):
        check_var(self.var)

    @property
    def variables(self) -> tuple[str, ...]:
        return (self.var,)

    def __str__(self) -> str:
        return f"BOOL {self.var}"


@dataclass(frozen=True)
class Assert:
    var: str
    kind_rank = 2

    def __post_init__(self):
        check_var(self.var)

    @property
    def variables(self) -> tuple[str, ...]:
        return (self.var,)

    def __str__(self) -> str:
        return f"ASSERT {self.var}"


@dataclass(frozen=True)
class Assign:
    target: str
    source: Optional[str] = None
    kind_rank = 3

    def __post_init__(self):
        check_var(self.target)
        if self.source is not None:
            check_var(self.source)

    @property
    def variables(self) -> tuple[str, ...]:
        if self.source is None:
            return (self.target,)
        return (self.target, self.source)

    def __str__(self) -> str:
        if self.source is None:
            return f"ASSIGN {self.target}"
        return f"ASSIGN {self.target} {self.source}"


ActionLabel = Union[Tau, Bool, Assert, Assign]
TAU = Tau()


def label_sort_key(label: ActionLabel) -> tuple:
    """Kind first, then variable names; unary ASSIGN sorts before binary."""
    return (label.kind_rank, label.variables)


def parse_label(text: str) -> ActionLabel:
    """Parse an unquoted label string such as ``ASSIGN y x``."""
    tokens = text.split()
    if tokens == ["i"]:
        return TAU
    if not tokens:
        raise ValueError("empty label")
    head, args = tokens[0], tokens[1:]
    try:
        if head == "BOOL" and len(args) == 1:
            return Bool(args[0])
        if head == "ASSERT" and len(args) == 1:
            return Assert(args[0])
        if head == "ASSIGN" and len(args) in (1, 2):
            return Assign(*args)
    except ValueError as exc:
        raise ValueError(f"unparsable label {text!r}: {exc}") from None
    raise ValueError(f"unparsable label {text!r}")


@dataclass(frozen=True)
class Lts:
    """A finite LTS over dense state ids ``0..num_states-1``.

    Transitions are deduplicated and kept sorted by (source, label, target),
    which is also the canonical ``.aut`` line order.
    """

    num_states: int
    transitions: tuple[tuple[int, ActionLabel, int], ...]
    initial: int = 0
    _succ: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.num_states < 1:
            raise ValueError("an LTS needs at least one state")
        if not 0 <= self.initial < self.num_states:
            raise ValueError(f"initial state {self.initial} out of range")
        trans = set()
        for src, label, dst in self.transitions:
            for s in (src, dst):
                if not 0 <= s < self.num_states:
                    raise ValueError(f"transition endpoint {s} out of range")
            if not isinstance(label, (Tau, Bool, Assert, Assign)):
                raise TypeError(f"not an action label: {label!r}")
            trans.add((src, label, dst))
        ordered = tuple(sorted(trans, key=lambda t: (t[0], label_sort_key(t[1]), t[2])))
        object.__setattr__(self, "transitions", ordered)
        succ: list[list] = [[] for _ in range(self.num_states)]
        for src, label, dst in ordered:
            succ[src].append((label, dst))
        object.__setattr__(self, "_succ", tuple(tuple(s) for s in succ))

    @property
    def states(self) -> range:
        return range(self.num_states)

    @cached_property
    def actions(self) -> frozenset:
        return frozenset(label for _, label, _ in self.transitions)

    @cached_property
    def universe(self) -> tuple[str, ...]:
        return tuple(sorted({v for a in self.actions for v in a.variables}))

    def check_state(self, s: int) -> None:
        if not isinstance(s, int) or not 0 <= s < self.num_states:
            raise KeyError(f"unknown state {s!r}")

    def reachable(self) -> list[int]:
        """States reachable from the initial state, in breadth-first order."""
        seen = {self.initial}
        order = [self.initial]
        for s in order:
            for _, t in self._succ[s]:
                if t not in seen:
                    seen.add(t)
                    order.append(t)
        return order


def successors(lts: Lts, s: int) -> list[tuple[ActionLabel, int]]:
    """All ``(label, target)`` pairs leaving ``s``, ordered by kind, variables, target."""
    lts.check_state(s)
    return list(lts._succ[s])


def var_universe(lts: Lts) -> tuple[str, ...]:
    return lts.universe


def _format_label(label: ActionLabel) -> str:
    if isinstance(label, Tau):
        return "i"
    return f'"{label}"'


def write_aut(lts: Lts) -> str:
    lines = [f"des ({lts.initial}, {len(lts.transitions)}, {lts.num_states})"]
    for src, label, dst in lts.transitions:
        lines.append(f"({src}, {_format_label(label)}, {dst})")
    return "\n".join(lines) + "\n"


_HEADER_RE = re.compile(r"\s*des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*\Z")
_EDGE_RE = re.compile(r'\s*\(\s*(\d+)\s*,\s*("(?:[^"\\]|\\.)*"|[^,"]*?)\s*,\s*(\d+)\s*\)\s*\Z')


def read_aut(text: str) -> Lts:
    lines = text.splitlines()
    numbered = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not numbered:
        raise AutFormatError("empty file: missing 'des' header", 1)
    lineno, header = numbered[0]
    m = _HEADER_RE.match(header)
    if not m:
        raise AutFormatError(f"bad header {header.strip()!r}", lineno)
    initial, count, nstates = map(int, m.groups())
    if nstates < 1:
        raise AutFormatError("state count must be positive", lineno)
    if initial >= nstates:
        raise AutFormatError(f"initial state {initial} not below state count {nstates}", lineno)
    body = numbered[1:]
    if len(body) != count:
        raise AutFormatError(f"header announces {count} transitions, found {len(body)}", lineno)
    transitions = []
    for lineno, line in body:
        m = _EDGE_RE.match(line)
        if not m:
            raise AutFormatError(f"bad transition {line.strip()!r}", lineno)
        src, raw, dst = int(m.group(1)), m.group(2), int(m.group(3))
        for s in (src, dst):
            if s >= nstates:
                raise AutFormatError(f"state {s} out of range 0..{nstates - 1}", lineno)
        if raw.startswith('"'):
            raw = raw[1:-1]
        try:
            label = parse_label(raw)
        except ValueError as exc:
            raise AutFormatError(str(exc), lineno) from None
        transitions.append((src, label, dst))
    return Lts(nstates, tuple(transitions), initial)


def random_lts(
    rng: random.Random,
    max_states: int = 50,
    max_transitions: int = 150,
    max_vars: int = 4,
) -> Lts:
    """Draw a random LTS mixing all label kinds; used for cross-validation."""
    n = rng.randint(1, max_states)
    names = ["a", "b", "c", "d", "e", "f", "g", "h"][: rng.randint(1, max_vars)]
    m = rng.randint(0, max_transitions)
    transitions = []
    for _ in range(m):
        src, dst = rng.randrange(n), rng.randrange(n)
        roll = rng.random()
        if roll < 0.25:
            label: ActionLabel = TAU
        elif roll < 0.40:
            label = Bool(rng.choice(names))
        elif roll < 0.50:
            label = Assert(rng.choice(names))
        elif roll < 0.62:
            label = Assign(rng.choice(names))
        else:
            label = Assign(rng.choice(names), rng.choice(names))
        transitions.append((src, label, dst))
    return Lts(n, tuple(transitions), rng.randrange(n))


def from_triples(num_states: int, triples: Iterable[tuple[int, str, int]], initial: int = 0) -> Lts:
    """Build an LTS from ``(src, "LABEL ...", dst)`` triples; handy in tests and scripts."""
    return Lts(num_states, tuple((s, parse_label(lbl), t) for s, lbl, t in triples), initial)
