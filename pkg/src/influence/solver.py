"""On-the-fly resolution of projected influence variables.

A :class:`SolverStore` memoizes every expanded node of the boolean graph for
one (LTS, variant) pair. :func:`local_solve` explores the graph depth-first
from the requested node, expanding on demand, and pushes stabilized ``true``
values backwards along reverse dependencies. When the reachable portion is
exhausted without the root becoming true, everything visited is stable
``false`` (minimal fixed point).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

from .lts import Lts
from .pbes import TRUE, BesNode, BesNodeKey, IaVariant, Op, _TrueLeaf, check_key, expand


class NotSolvedError(LookupError):
    pass


@dataclass
class SolverStore:
    nodes: dict[BesNodeKey, BesNode] = field(default_factory=dict)
    reverse_deps: dict[BesNodeKey, set[BesNodeKey]] = field(default_factory=dict)
    expansions: int = 0
    lts: Optional[Lts] = None
    variant: Optional[IaVariant] = None

    def bind(self, lts: Lts, variant: IaVariant) -> None:
        if self.lts is None:
            self.lts, self.variant = lts, variant
            return
        if self.lts is not lts and self.lts != lts:
            raise ValueError("store is already bound to a different LTS")
        if self.variant != variant:
            raise ValueError(f"store holds {self.variant} nodes, not {variant}")

    def expand(self, key: BesNodeKey) -> BesNode:
        """Expand ``key`` once, wire reverse deps and settle trivially true nodes."""
        node = self.nodes.get(key)
        if node is not None:
            return node
        node = expand(self.lts, key)
        if node.op is not Op.OR:
            raise NotImplementedError("only disjunctive nodes are supported")
        self.nodes[key] = node
        self.expansions += 1
        for d in node.key_deps:
            self.reverse_deps.setdefault(d, set()).add(key)
        if node.has_true_leaf or any(
            (n := self.nodes.get(d)) is not None and n.stable and n.value for d in node.key_deps
        ):
            self._set_true(key)
        return node

    def _set_true(self, key: BesNodeKey) -> None:
        work = [key]
        node = self.nodes[key]
        node.value = node.stable = True
        while work:
            k = work.pop()
            for parent in self.reverse_deps.get(k, ()):
                pnode = self.nodes[parent]
                if pnode.stable:
                    assert pnode.value, f"stable-false {parent} depends on true {k}"
                    continue
                pnode.value = pnode.stable = True
                work.append(parent)


def local_solve(store: SolverStore, lts: Lts, key: BesNodeKey) -> bool:
    """Value of ``key`` in the least fixed point, reusing everything in ``store``."""
    check_key(lts, key)
    store.bind(lts, key.variant)
    root = store.expand(key)
    if root.stable:
        return root.value

    seen = {key}
    visited = [key]
    stack = [(key, 0)]
    while stack and not root.stable:
        k, i = stack[-1]
        deps = store.nodes[k].deps
        if i >= len(deps):
            stack.pop()
            continue
        stack[-1] = (k, i + 1)
        d = deps[i]
        if d is TRUE or d in seen:
            continue
        child = store.expand(d)
        if child.stable:
            continue
        seen.add(d)
        visited.append(d)
        stack.append((d, 0))

    if not root.stable:
        for k in visited:
            node = store.nodes[k]
            assert not node.stable
            node.stable = True
    return root.value


def reset(store: SolverStore) -> SolverStore:
    return SolverStore()


def stats(store: SolverStore) -> tuple[int, int, int]:
    """``(expansions, stable_true, stable_false)``."""
    st = sum(1 for n in store.nodes.values() if n.stable and n.value)
    sf = sum(1 for n in store.nodes.values() if n.stable and not n.value)
    return store.expansions, st, sf


Target = Union[BesNodeKey, _TrueLeaf]


@dataclass(frozen=True)
class Diagnostic:
    root: BesNodeKey
    verdict: bool
    nodes: frozenset[BesNodeKey]
    edges: frozenset[tuple[BesNodeKey, Target]]

    def successors(self, key: BesNodeKey) -> list[Target]:
        return sorted((t for s, t in self.edges if s == key), key=_target_order)


def _target_order(t: Target) -> tuple:
    return (0, 0, "") if t is TRUE else (1, t.state, t.var)


def diagnostic(store: SolverStore, key: BesNodeKey) -> Diagnostic:
    """Subgraph justifying the verdict of an already solved ``key``.

    True verdicts get one shortest dependency path to a ``TRUE`` leaf (breadth
    first, deps in their stored order). False verdicts get the whole explored
    region reachable from ``key``, closed under dependencies.
    """
    node = store.nodes.get(key)
    if node is None or not node.stable:
        raise NotSolvedError(f"{key} has not been solved")

    if node.value:
        parent: dict[BesNodeKey, Optional[BesNodeKey]] = {key: None}
        queue = deque([key])
        end = None
        while queue:
            k = queue.popleft()
            n = store.expand(k)
            if n.has_true_leaf:
                end = k
                break
            for d in n.key_deps:
                if d not in parent:
                    parent[d] = k
                    queue.append(d)
        assert end is not None, f"true node {key} has no path to TRUE"
        edges = {(end, TRUE)}
        nodes = {end}
        while parent[end] is not None:
            edges.add((parent[end], end))
            end = parent[end]
            nodes.add(end)
        return Diagnostic(key, True, frozenset(nodes), frozenset(edges))

    nodes = {key}
    edges = set()
    queue = deque([key])
    while queue:
        k = queue.popleft()
        n = store.nodes[k]
        assert n.stable and not n.value
        for d in n.deps:
            edges.add((k, d))
            if d not in nodes:
                nodes.add(d)
                queue.append(d)
    return Diagnostic(key, False, frozenset(nodes), frozenset(edges))


def to_dot(diag: Diagnostic, store: Optional[SolverStore] = None) -> str:
    """Render a diagnostic as Graphviz DOT text (for human inspection)."""
    lines = [f'digraph "{diag.root}" {{']
    for k in sorted(diag.nodes, key=_target_order):
        node = store.nodes.get(k) if store is not None else None
        shape = "box" if node is not None and node.op is Op.AND else "ellipse"
        if node is None or not node.stable:
            fill, font = "grey", "black"
        elif node.value:
            fill, font = "white", "black"
        else:
            fill, font = "black", "white"
        extra = ", peripheries=2" if k == diag.root else ""
        lines.append(
            f'  {k} [shape={shape}, style=filled, fillcolor={fill}, fontcolor={font}{extra}];'
        )
    if any(t is TRUE for _, t in diag.edges):
        lines.append("  TRUE [shape=plaintext];")
    for s, t in sorted(diag.edges, key=lambda e: (_target_order(e[0]), _target_order(e[1]))):
        lines.append(f"  {s} -> {'TRUE' if t is TRUE else t};")
    lines.append("}")
    return "\n".join(lines) + "\n"
