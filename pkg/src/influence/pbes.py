"""Parameterised boolean equation systems for influence analysis.

The influence analyses share one minimal fixed point equation over a single
``Var``-typed parameter ``v``::

    Y(v) =mu  <BOOL v> true
           or <ASSIGN z v> Y(z)
           or <not (ASSIGN v z)> Y(v)

with extra ``<ASSERT v> true`` (IA2, IA3) or ``<ASSIGN w v> true`` for each
property variable ``w`` (IA4). Projecting it on a state ``s`` yields the
boolean variable ``Y_s(v)``, represented here by :class:`BesNodeKey`;
:func:`expand` computes its right-hand side from the LTS successors of ``s``.
"""

from __future__ import annotations

import enum
from collections import namedtuple
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Union

import numpy as np

from .lts import Assert, Assign, Bool, Lts, check_var


class Sign(enum.Enum):
    MU = "mu"
    NU = "nu"


class Op(enum.Enum):
    OR = "or"
    AND = "and"


class _TrueLeaf:
    """The constant ``true`` (empty conjunction) as a dependency target."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "TRUE"

    def __reduce__(self):
        return (_TrueLeaf, ())


TRUE = _TrueLeaf()


class IaVariant(namedtuple("IaVariant", "level property_vars")):
    """Which influence analysis to run; ``property_vars`` only matters for IA4."""

    __slots__ = ()

    def __new__(cls, level: int, property_vars: Iterable[str] = ()):
        level = int(level)
        if level not in (1, 2, 3, 4):
            raise ValueError(f"influence analysis level must be 1..4, got {level}")
        pv = frozenset(check_var(v) for v in property_vars)
        if pv and level != 4:
            raise ValueError("property variables are only meaningful for IA4")
        return super().__new__(cls, level, pv)

    @property
    def name(self) -> str:
        return f"IA{self.level}"

    @property
    def uses_asserts(self) -> bool:
        # IA3 shares the IA2 encoding
        return self.level in (2, 3)

    def __str__(self) -> str:
        if self.level == 4 and self.property_vars:
            return f"IA4({','.join(sorted(self.property_vars))})"
        return self.name


IA1 = IaVariant(1)
IA2 = IaVariant(2)
IA3 = IaVariant(3)


def IA4(*property_vars: str) -> IaVariant:
    return IaVariant(4, property_vars)


class BesNodeKey(NamedTuple):
    variant: IaVariant
    state: int
    var: str

    def __str__(self) -> str:
        return f"Y_{self.state}_{self.var}"


Dep = Union[BesNodeKey, _TrueLeaf]


@dataclass
class BesNode:
    """Solver-side state of one boolean variable ``Y_s(v)``."""

    key: BesNodeKey
    op: Op
    deps: tuple[Dep, ...]
    value: bool = False
    stable: bool = False

    @property
    def has_true_leaf(self) -> bool:
        return bool(self.deps) and self.deps[0] is TRUE

    @property
    def key_deps(self) -> tuple[BesNodeKey, ...]:
        return self.deps[1:] if self.has_true_leaf else self.deps


# Symbolic equations, kept for the general shape of a PBES block.

@dataclass(frozen=True)
class Occurrence:
    """``<modality> Y(arg)``; ``target`` is None for the constant ``true``."""

    modality: str
    target: Union[str, None]
    arg: str


@dataclass(frozen=True)
class Equation:
    lhs: str
    params: tuple[tuple[str, str], ...]
    op: Op
    rhs: tuple[Occurrence, ...]


@dataclass(frozen=True)
class PbesBlock:
    sign: Sign
    equations: tuple[Equation, ...] = field(default=())

    def __post_init__(self):
        names = {eq.lhs for eq in self.equations}
        for eq in self.equations:
            for occ in eq.rhs:
                if occ.target is not None and occ.target not in names:
                    raise ValueError(f"{eq.lhs} references undeclared {occ.target}")


def influence_block(variant: IaVariant) -> PbesBlock:
    """The single-equation modal block for ``variant``."""
    rhs = [Occurrence("BOOL v", None, "v")]
    if variant.uses_asserts:
        rhs.append(Occurrence("ASSERT v", None, "v"))
    for w in sorted(variant.property_vars):
        rhs.append(Occurrence(f"ASSIGN {w} v", None, "v"))
    rhs.append(Occurrence("ASSIGN z:Var v", "Y", "z"))
    rhs.append(Occurrence("not (ASSIGN v z:Var)", "Y", "v"))
    return PbesBlock(Sign.MU, (Equation("Y", (("v", "Var"),), Op.OR, tuple(rhs)),))


def check_key(lts: Lts, key: BesNodeKey) -> None:
    if not isinstance(key, BesNodeKey) or not isinstance(key.variant, IaVariant):
        raise TypeError(f"malformed key {key!r}")
    lts.check_state(key.state)
    if key.var not in lts.universe:
        raise KeyError(f"unknown variable {key.var!r}")


def expand(lts: Lts, key: BesNodeKey) -> BesNode:
    """Project the influence equation on ``key.state`` for variable ``key.var``."""
    check_key(lts, key)
    variant, v = key.variant, key.var
    true_leaf = False
    deps: set[tuple[int, str]] = set()
    for label, t in lts._succ[key.state]:
        if isinstance(label, Assign):
            if label.source == v:
                deps.add((t, label.target))
                if label.target in variant.property_vars:
                    true_leaf = True
            if label.target != v:
                deps.add((t, v))
            continue
        if isinstance(label, Bool) and label.var == v:
            true_leaf = True
        elif isinstance(label, Assert) and label.var == v and variant.uses_asserts:
            true_leaf = True
        deps.add((t, v))
    ordered: list[Dep] = [TRUE] if true_leaf else []
    ordered.extend(BesNodeKey(variant, s, w) for s, w in sorted(deps))
    return BesNode(key, Op.OR, tuple(ordered))


def global_solve(lts: Lts, variant: IaVariant) -> dict[BesNodeKey, bool]:
    """Least fixed point over every ``(state, var)`` key by Kleene iteration.

    Starts from all-false and applies the vectorial functional until it stops
    changing; at most ``|S|*|Var| + 1`` rounds.
    """
    universe = lts.universe
    keys = [BesNodeKey(variant, s, v) for s in lts.states for v in universe]
    if not keys:
        return {}
    index = {k: i for i, k in enumerate(keys)}
    leaf = np.zeros(len(keys), dtype=bool)
    src: list[int] = []
    dst: list[int] = []
    for i, k in enumerate(keys):
        node = expand(lts, k)
        leaf[i] = node.has_true_leaf
        for d in node.key_deps:
            src.append(i)
            dst.append(index[d])
    src_a = np.asarray(src, dtype=np.intp)
    dst_a = np.asarray(dst, dtype=np.intp)
    value = np.zeros(len(keys), dtype=bool)
    for _ in range(len(keys) + 1):
        nxt = leaf.copy()
        nxt[src_a[value[dst_a]]] = True
        if np.array_equal(nxt, value):
            break
        value = nxt
    return {k: bool(value[i]) for i, k in enumerate(keys)}
