import random

import pytest

from conftest import evaluate_restricted, random_corpus
from influence.lts import Lts, TAU, from_triples
from influence.pbes import IA1, IA2, TRUE, BesNodeKey, IaVariant, expand, global_solve
from influence.solver import (
    NotSolvedError,
    SolverStore,
    diagnostic,
    local_solve,
    reset,
    stats,
    to_dot,
)


def key(s, v, variant=IA1):
    return BesNodeKey(variant, s, v)


def test_example_lts_initial_verdicts(example_lts):
    store = SolverStore()
    assert local_solve(store, example_lts, key(0, "x")) is True
    assert local_solve(store, example_lts, key(0, "y")) is False


def test_deadlock_is_false(example_lts):
    store = SolverStore()
    assert local_solve(store, example_lts, key(4, "x")) is False
    assert local_solve(store, example_lts, key(4, "y")) is False


def test_memoization(example_lts):
    store = SolverStore()
    local_solve(store, example_lts, key(0, "x"))
    before = stats(store)[0]
    assert before > 0
    local_solve(store, example_lts, key(0, "x"))
    assert stats(store)[0] == before
    fresh = reset(store)
    assert stats(fresh) == (0, 0, 0)
    local_solve(fresh, example_lts, key(0, "x"))
    assert stats(fresh)[0] > 0


def test_stats_counts(example_lts):
    store = SolverStore()
    local_solve(store, example_lts, key(0, "y"))
    exp, st_true, st_false = stats(store)
    # Y_0(y) -> Y_1(y) (killed), Y_3(y) -> Y_4(y)
    assert (exp, st_true, st_false) == (4, 0, 4)


def _reachable_keys(lts, root):
    seen, stack = {root}, [root]
    while stack:
        for d in expand(lts, stack.pop()).key_deps:
            if d not in seen:
                seen.add(d)
                stack.append(d)
    return seen


def test_expansions_bounded_by_reachable_keys():
    for lts in random_corpus(80, seed=21):
        for v in lts.universe:
            root = key(lts.initial, v, IA2)
            store = SolverStore()
            local_solve(store, lts, root)
            assert stats(store)[0] <= len(_reachable_keys(lts, root))
            assert stats(store)[0] <= lts.num_states * len(lts.universe)


def test_local_matches_global_random():
    rng = random.Random(7)
    for lts in random_corpus(150, seed=1, max_states=30):
        for variant in (IA1, IA2):
            table = global_solve(lts, variant)
            store = SolverStore()
            keys = list(table)
            rng.shuffle(keys)
            for k in keys:
                assert local_solve(store, lts, k) == table[k]


def test_order_independence():
    rng = random.Random(3)
    for lts in random_corpus(40, seed=4):
        keys = [key(s, v) for s in lts.states for v in lts.universe]
        results = []
        for _ in range(3):
            rng.shuffle(keys)
            store = SolverStore()
            results.append({k: local_solve(store, lts, k) for k in keys})
        assert results[0] == results[1] == results[2]


def test_store_invariants_after_solving():
    for lts in random_corpus(40, seed=12):
        store = SolverStore()
        for s in lts.states:
            for v in lts.universe:
                local_solve(store, lts, key(s, v))
        inverse = {}
        for k, node in store.nodes.items():
            for d in node.key_deps:
                inverse.setdefault(d, set()).add(k)
        assert inverse == {d: ps for d, ps in store.reverse_deps.items() if ps}
        for node in store.nodes.values():
            assert node.stable
            if node.has_true_leaf:
                assert node.value


def test_deep_chain_does_not_recurse():
    n = 20000
    triples = [(i, "i", i + 1) for i in range(n - 1)] + [(n - 1, "BOOL x", n - 1)]
    lts = from_triples(n, triples)
    assert local_solve(SolverStore(), lts, key(0, "x")) is True
    ring = [(i, "i", (i + 1) % n) for i in range(n)]
    cyc = from_triples(n, ring + [(0, "BOOL y", 0), (0, "ASSERT x", 0)])
    assert local_solve(SolverStore(), cyc, key(5, "x")) is False


def test_store_binding_is_enforced(example_lts):
    store = SolverStore()
    local_solve(store, example_lts, key(0, "x"))
    with pytest.raises(ValueError):
        local_solve(store, example_lts, key(0, "x", IA2))
    with pytest.raises(ValueError):
        local_solve(store, from_triples(2, [(0, "BOOL x", 1)]), key(0, "x"))


def test_malformed_key(example_lts):
    with pytest.raises(KeyError):
        local_solve(SolverStore(), example_lts, key(7, "x"))


def test_diagnostic_true_example_lts(example_lts):
    store = SolverStore()
    local_solve(store, example_lts, key(0, "x"))
    diag = diagnostic(store, key(0, "x"))
    assert diag.verdict is True
    assert (key(0, "x"), TRUE) in diag.edges
    assert diag.nodes == {key(0, "x")}
    assert evaluate_restricted(diag)


def test_diagnostic_shortest_path(example_lts):
    store = SolverStore()
    assert local_solve(store, example_lts, key(1, "x"))
    diag = diagnostic(store, key(1, "x"))
    # 1 --ASSIGN y x--> 2 --tau--> 0 --BOOL x--> TRUE
    assert diag.edges == {(key(1, "x"), key(2, "x")), (key(2, "x"), key(0, "x")), (key(0, "x"), TRUE)}
    assert evaluate_restricted(diag)


def test_diagnostic_false_deadlock(example_lts):
    store = SolverStore()
    local_solve(store, example_lts, key(4, "x"))
    diag = diagnostic(store, key(4, "x"))
    assert diag.verdict is False
    assert diag.nodes == {key(4, "x")} and diag.edges == frozenset()


def test_diagnostic_false_closed(example_lts):
    store = SolverStore()
    local_solve(store, example_lts, key(0, "y"))
    diag = diagnostic(store, key(0, "y"))
    assert diag.nodes == {key(0, "y"), key(1, "y"), key(3, "y"), key(4, "y")}
    for n in diag.nodes:
        for d in store.nodes[n].deps:
            assert (n, d) in diag.edges
    assert not evaluate_restricted(diag)


def test_diagnostic_requires_solve(example_lts):
    with pytest.raises(NotSolvedError):
        diagnostic(SolverStore(), key(0, "x"))


def test_diagnostics_self_sufficient_random():
    for lts in random_corpus(100, seed=33):
        for variant in (IA1, IA2, IaVariant(4, lts.universe[:1])):
            store = SolverStore()
            for s in lts.states:
                for v in lts.universe:
                    verdict = local_solve(store, lts, key(s, v, variant))
                    diag = diagnostic(store, key(s, v, variant))
                    assert diag.verdict == verdict
                    assert evaluate_restricted(diag) == verdict
                    if not verdict:
                        for n in diag.nodes:
                            assert {(n, d) for d in expand(lts, n).deps} <= diag.edges


def test_to_dot(example_lts):
    store = SolverStore()
    local_solve(store, example_lts, key(0, "y"))
    dot = to_dot(diagnostic(store, key(0, "y")), store)
    assert dot.startswith('digraph "Y_0_y" {')
    assert "Y_0_y -> Y_1_y;" in dot
    assert "fillcolor=black" in dot
    assert to_dot(diagnostic(store, key(0, "y")), store) == dot


def test_empty_lts_single_state():
    lts = Lts(1, ())
    assert lts.universe == ()
    assert Lts(1, ((0, TAU, 0),)).reachable() == [0]
