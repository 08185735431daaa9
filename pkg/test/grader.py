import os
import random
from fractions import Fraction
from pathlib import Path
from typing import Any

from src.laurent import VLaurent
from src.seed import BMatrix, LambdaMatrix, Seed, Vertex
from utils.seed_io import read_fixture, seed_from_data

os.chdir(Path(__file__).parent.parent)

FIXTURE_DIR = Path("fixtures")


def load_fixture(name: str) -> tuple[dict[str, Any], Seed]:
    data = read_fixture(FIXTURE_DIR / f"{name}.json")
    return data, seed_from_data(data)


# ---- random values ----------------------------------------------------


def random_laurent(rng: random.Random, low: int = -3, high: int = 3, terms: int = 4) -> VLaurent:
    return VLaurent({rng.randint(low, high): rng.randint(-4, 4) for _ in range(terms)})


def random_bar_antisymmetric(rng: random.Random) -> tuple[VLaurent, VLaurent]:
    """
    :return: ``(d, e)`` with ``e`` in v⁻¹Z[v⁻¹] and ``d = bar(e) - e``.
    """
    e = random_laurent(rng, -5, -1, rng.randint(0, 4))
    return e.bar() - e, e


def random_skew_symmetrizable(rng: random.Random, n: int, d: dict[Vertex, int], max_entry: int = 2) -> BMatrix:
    """
    ``b_ij = S_ij d_j`` for a random skew-symmetric integer S on ``1..n``.
    """
    b: BMatrix = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            s = rng.randint(-max_entry, max_entry)
            if s:
                b[(i, j)] = Fraction(s * d[j])
                b[(j, i)] = Fraction(-s * d[i])
    return b


def random_seed(rng: random.Random, rank: int, frozen: int = 0, symmetrizable: bool = False) -> Seed:
    """
    A classical seed: unfrozen ``1..rank``, frozen ``rank+1..rank+frozen``.
    """
    d = {i: rng.choice((1, 2)) if symmetrizable else 1 for i in range(1, rank + 1)}
    b = random_skew_symmetrizable(rng, rank, d)
    for f in range(rank + 1, rank + frozen + 1):
        d[f] = 1
        for k in range(1, rank + 1):
            x = rng.randint(-2, 2)
            if x:
                b[(f, k)] = Fraction(x)
                b[(k, f)] = Fraction(-x, d[k])
    return Seed(tuple(range(1, rank + frozen + 1)), frozenset(range(rank + 1, rank + frozen + 1)), d, b)


def principal_quantum_seed(d: dict[Vertex, int], b: BMatrix, quantum: bool = True) -> Seed:
    """
    Unfrozen ``1..n`` with principal part ``b``, frozen copies ``k' = k + n``.

    With ``Λ_{k,k'} = -d_k`` and ``Λ_{k',j'} = -d_k b_kj`` the seed is compatible
    with ``δ_k = d_k``.
    """
    n = len(d)
    full_d = dict(d) | {k + n: d[k] for k in d}
    full_b = dict(b)
    lam: LambdaMatrix = {}
    for k in d:
        full_b[(k + n, k)] = Fraction(1)
        full_b[(k, k + n)] = Fraction(-1)
        lam[(k, k + n)] = -d[k]
        for j in d:
            x = d[k] * b.get((k, j), Fraction(0))
            if k < j and x:
                lam[(k + n, j + n)] = -int(x)
    return Seed(tuple(range(1, 2 * n + 1)), frozenset(range(n + 1, 2 * n + 1)), full_d, full_b, lam if quantum else None)


def rank2_seed(b12: int, b21: int, d: tuple[int, int]) -> Seed:
    return principal_quantum_seed({1: d[0], 2: d[1]}, {(1, 2): Fraction(b12), (2, 1): Fraction(b21)})


def random_quantum_seed(rng: random.Random, rank: int) -> Seed:
    d = {i: rng.choice((1, 1, 2, 3)) for i in range(1, rank + 1)}
    return principal_quantum_seed(d, random_skew_symmetrizable(rng, rank, d))


def random_tree_seed(rng: random.Random, rank: int = 4) -> Seed:
    """
    A classical seed of principal coefficients whose principal quiver is a random
    oriented tree (finite mutation type A or D).
    """
    b: BMatrix = {}
    for i in range(2, rank + 1):
        j = rng.randint(1, i - 1)
        sign = rng.choice((1, -1))
        b[(i, j)] = Fraction(sign)
        b[(j, i)] = Fraction(-sign)
    return principal_quantum_seed({i: 1 for i in range(1, rank + 1)}, b, quantum=False)


# ---- comparisons ------------------------------------------------------


def exchange_columns(s: Seed) -> dict[tuple[Vertex, Vertex], Fraction]:
    """
    Nonzero entries of B̃: every row against the unfrozen columns.
    """
    return {(i, k): s.b_entry(i, k) for k in s.unfrozen for i in s.vertices if s.b_entry(i, k)}


def assert_matrix_equal(actual: dict, expected: dict, what: str) -> None:
    keys = sorted(set(actual) | set(expected))
    diff = [(key, actual.get(key, 0), expected.get(key, 0)) for key in keys if actual.get(key, 0) != expected.get(key, 0)]
    assert not diff, f"{what}: entries differ (key, actual, expected): {diff[:6]}"


def assert_same_exchange_matrix(actual: Seed, expected: Seed, what: str) -> None:
    assert actual.vertices == expected.vertices, f"{what}: vertices {actual.vertices} != {expected.vertices}"
    assert actual.frozen == expected.frozen, f"{what}: frozen {sorted(actual.frozen)} != {sorted(expected.frozen)}"
    assert_matrix_equal(exchange_columns(actual), exchange_columns(expected), what)


def upper_lambda(s: Seed) -> dict[tuple[Vertex, Vertex], int]:
    assert s.lam is not None, "seed carries no Λ"
    return {(i, j): x for (i, j), x in s.lam.items() if i < j}
