import random
from fractions import Fraction

import pytest

import grader
from src.errors import FrozenVertexError, IncompatibleSeedError
from src.pointed import to_pointed
from src.seed import (
    MutationSequence,
    Seed,
    change_chart,
    check_compatible,
    cluster_variable_degree,
    exchange_graph,
    initial_variables,
    mutate,
    mutate_bmatrix,
    mutate_lambda,
    mutate_path,
    mutate_variables,
    opposite,
    permute,
    permute_degree,
    principal_seed,
    restrict_seed,
    tropical_mutate,
)
from src.torus import ExponentVector, TorusElement, parse_torus


def test_seed_validation() -> None:
    with pytest.raises(ValueError):
        Seed((1, 2), frozenset(), {}, {(1, 2): Fraction(1), (2, 1): Fraction(1)})
    with pytest.raises(ValueError):
        Seed((1, 2), frozenset({3}), {}, {})
    with pytest.raises(ValueError):
        # half-integral entries in unfrozen columns
        Seed((1, 2), frozenset(), {}, {(1, 2): Fraction(1, 2), (2, 1): Fraction(-1, 2)})
    with pytest.raises(ValueError):
        Seed((1, 2), frozenset(), {}, {}, {(1, 2): 1, (2, 1): 1})
    s = Seed((2, 1), frozenset(), {}, {}, {(2, 1): 3})
    assert s.vertices == (1, 2)
    assert s.lam_entry(1, 2) == -3


def test_mutation_is_an_involution() -> None:
    rng = random.Random(2025)
    for trial in range(500):
        rank = rng.randint(1, 6)
        s = grader.random_seed(rng, rank, rng.randint(0, 2), symmetrizable=trial % 2 == 0)
        k = rng.choice(s.unfrozen)
        assert mutate(mutate(s, k), k) == s, f"trial {trial}: μ_{k} μ_{k} changed the seed"


def test_quantum_mutation_is_an_involution() -> None:
    rng = random.Random(17)
    for trial in range(100):
        s = grader.random_quantum_seed(rng, rng.randint(1, 4))
        k = rng.choice(s.unfrozen)
        assert mutate(mutate(s, k), k) == s, f"trial {trial}: Λ not restored by μ_{k} μ_{k}"


def test_frozen_vertices_do_not_mutate() -> None:
    s = grader.rank2_seed(1, -1, (1, 1))
    with pytest.raises(FrozenVertexError):
        mutate(s, 3)
    with pytest.raises(ValueError):
        mutate(s, 9)


def test_mutate_lambda() -> None:
    _, s = grader.load_fixture("sl2_op")
    mutated = mutate_lambda(s, 0)
    assert mutated == mutate(s, 0)
    assert mutated.b == mutate_bmatrix(s, 0).b
    assert check_compatible(mutated) == check_compatible(s)
    _, classical = grader.load_fixture("sl2_ddot")
    with pytest.raises(ValueError):
        mutate_lambda(classical, 0)


def test_compatibility_is_preserved() -> None:
    rng = random.Random(9)
    for trial in range(200):
        s = grader.random_quantum_seed(rng, rng.randint(1, 4))
        deltas = check_compatible(s)
        assert deltas == {k: s.d[k] for k in s.unfrozen}
        path = MutationSequence(tuple(rng.choice(s.unfrozen) for _ in range(rng.randint(1, 6))))
        assert check_compatible(mutate_path(s, path)) == deltas, f"trial {trial}: δ changed along {path}"


def test_incompatible_seed_is_reported() -> None:
    s = grader.rank2_seed(1, -1, (1, 1))
    broken = s.with_lambda({(1, 3): -1, (2, 4): -1})
    with pytest.raises(IncompatibleSeedError) as info:
        check_compatible(broken)
    assert info.value.column is not None
    with pytest.raises(IncompatibleSeedError):
        check_compatible(s.with_lambda(None))


def test_laurent_phenomenon_and_positivity() -> None:
    """
    Random sequences on seeds of principal coefficients over random rank-4 trees:
    every variable is an exact Laurent quotient with nonnegative coefficients, and
    its degree matches the tropical transport of f_k.
    """
    rng = random.Random(4)
    sequences = 0
    while sequences < 200:
        s = grader.random_tree_seed(rng)
        for _ in range(10):
            steps = tuple(rng.choice(s.unfrozen) for _ in range(rng.randint(1, 8)))
            variables = initial_variables(s)
            current = s
            for t, k in enumerate(steps, start=1):
                variables = mutate_variables(current, k, variables)
                current = mutate(current, k)
                z = variables[k]
                assert all(c.at_one() >= 0 and len(c.terms) == 1 for _, c in z.items()), f"negative coefficient in {z}"
                degree = cluster_variable_degree(s, steps[:t], k)
                assert to_pointed(z).degree == degree, f"{steps[:t]}: degree {to_pointed(z).degree} != {degree}"
            sequences += 1


def test_quantum_exchange_relation() -> None:
    s = grader.rank2_seed(1, -1, (1, 1))
    variables = mutate_variables(s, 1, initial_variables(s))
    x1 = TorusElement.variable(s, 1)
    # x'_1 = x^{-f1 + f2} + x^{-f1 + f3}, each normalized
    expected = parse_torus("x[1]^-1 * x[2] + x[1]^-1 * x[3]", s)
    assert variables[1] == expected, f"x'_1 = {variables[1]}"
    assert variables[1].bar() == variables[1]
    assert x1 * variables[1] != variables[1] * x1
    assert to_pointed(variables[1]).is_bar_invariant()


def test_change_chart_round_trip() -> None:
    _, s = grader.load_fixture("sl2_op")
    z = parse_torus("x[-1] * x[0] + (v + v^-1) * x[0]^2 + x[1]", s)
    there = change_chart(z, [0], s)
    assert there.chart == mutate(s, 0)
    assert change_chart(there, [0], mutate(s, 0)) == z


def test_tropical_mutation_is_an_involution() -> None:
    rng = random.Random(5)
    for _ in range(100):
        s = grader.random_seed(rng, 3, 2)
        k = rng.choice(s.unfrozen)
        m = ExponentVector({i: rng.randint(-3, 3) for i in s.vertices})
        back = tropical_mutate(tropical_mutate(m, k, s), k, mutate(s, k))
        assert back == m, f"tropical μ_{k} twice sends {m} to {back}"


def test_principal_seed() -> None:
    _, s = grader.load_fixture("a2_copy3_dot")
    prin, var = principal_seed(s)
    assert prin.unfrozen == s.unfrozen
    assert len(prin.frozen) == len(s.unfrozen)
    for idx, k in enumerate(s.unfrozen):
        copy = max(s.vertices) + 1 + idx
        assert prin.b_entry(copy, k) == 1
        assert var[copy] == s.column(k).restrict(s.frozen)
    assert grader.exchange_columns(restrict_seed(prin, s.unfrozen, ())) == grader.exchange_columns(
        restrict_seed(s, s.unfrozen, ())
    )


def test_relabel_and_opposite() -> None:
    _, s = grader.load_fixture("sl3_ddot")
    sigma = {1: 2, 2: 1}
    assert permute(permute(s, sigma), sigma) == s
    assert permute(s, sigma).b_entry(2, -1) == s.b_entry(1, -1)
    assert permute_degree(ExponentVector({1: 3, 5: 1}), sigma) == ExponentVector({2: 3, 5: 1})
    assert opposite(opposite(s)) == s
    assert opposite(s).b_entry(1, 2) == -s.b_entry(1, 2)
    with pytest.raises(ValueError):
        permute(s, {1: 2})


def test_exchange_graph_of_a1_times_a1() -> None:
    s = grader.rank2_seed(0, 0, (1, 1)).with_lambda(None)
    graph = exchange_graph(s)
    assert graph.number_of_nodes() == 4
    assert graph.number_of_edges() == 4
    for _, data in graph.nodes(data=True):
        assert mutate_path(s, data["path"]) == data["seed"]
    assert mutate_bmatrix(s, 1).lam is None
