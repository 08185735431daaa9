import itertools
import random

import pytest

import grader
from src.pointed import (
    PointedElement,
    freeze_element,
    freeze_seed,
    pointed_mul,
    pointed_power,
    to_pointed,
    transport_similar,
)
from src.seed import Seed, initial_variables, mutate, mutate_variables
from src.torus import ExponentVector
from src.triangular import (
    InitialFamily,
    StandardBasis,
    TruncationOrder,
    check_triangularity,
    has_positive_coefficients,
    kl_correct,
    kl_from_standard,
    quantum_word_seed,
    standard_monomial,
    straightening_check,
)
from src.word_seed import CartanData, parse_word, theta_inverse

# (b12, b21, symmetrizers, number of cluster variables)
RANK2 = {
    "A1xA1": (0, 0, (1, 1), 4),
    "A2": (1, -1, (1, 1), 5),
    "B2": (1, -2, (2, 1), 6),
    "G2": (1, -3, (3, 1), 8),
}


def cluster_sequence(s: Seed, count: int) -> list[PointedElement]:
    """
    ``z_0 = x_1, z_1 = x_2`` and then the variables produced by mutating alternately
    at 1 and 2; ``(z_t, z_{t+1})`` is always a cluster.
    """
    variables = initial_variables(s)
    zs = [variables[1], variables[2]]
    current = s
    for t in range(count - 1):
        k = 1 if t % 2 == 0 else 2
        variables = mutate_variables(current, k, variables)
        current = mutate(current, k)
        zs.append(variables[k])
    return [to_pointed(z, s) for z in zs]


def rank2_family(s: Seed, zs: list[PointedElement]) -> InitialFamily:
    shifted = {}
    for k in s.unfrozen:
        for z in zs:
            if z.degree.restrict(s.unfrozen) == ExponentVector.basis(k, -1):
                shifted[k] = z
                break
    return InitialFamily(s, shifted)


@pytest.fixture(scope="module")
def a2_word_seed() -> tuple:
    word = parse_word("1,2,1,2,1,2")
    s = quantum_word_seed(word, CartanData.of_type("a2"))
    return word, s, InitialFamily.from_word(word, s)


@pytest.mark.parametrize("kind", list(RANK2))
def test_cluster_monomials_are_basis_elements(kind: str) -> None:
    b12, b21, d, count = RANK2[kind]
    s = grader.rank2_seed(b12, b21, d)
    zs = cluster_sequence(s, count)
    assert len({z.degree for z in zs[:count]}) == count, f"{kind}: cluster variables repeat too early"
    family = rank2_family(s, zs)
    checked = 0
    for t in range(count):
        for p, q in itertools.product(range(4), repeat=2):
            if not 1 <= p + q <= 3:
                continue
            expected = pointed_mul(pointed_power(zs[t], p), pointed_power(zs[t + 1], q))
            assert has_positive_coefficients(expected)
            bound = max(1, max(n.total() for n in expected.fpoly))
            actual = kl_correct(expected.degree, family, bound)
            assert actual == expected, f"{kind}: L at {expected.degree} is {actual}, cluster monomial is {expected}"
            checked += 1
    assert checked == 9 * count


def test_truncation_is_stable() -> None:
    s = grader.rank2_seed(1, -1, (1, 1))
    family = rank2_family(s, cluster_sequence(s, 5))
    rng = random.Random(8)
    for _ in range(50):
        m = ExponentVector({1: rng.randint(-2, 2), 2: rng.randint(-2, 2), 3: rng.randint(-1, 1), 4: rng.randint(-1, 1)})
        low = kl_correct(m, family, 3)
        high = kl_correct(m, family, 5)
        assert low.fpoly == high.truncate(3).fpoly, f"L_{m} changes below order 3 when computed to order 5"
        assert low.is_bar_invariant()


def test_triangularity_of_rank2_basis() -> None:
    s = grader.rank2_seed(1, -2, (2, 1))
    family = rank2_family(s, cluster_sequence(s, 6))

    def basis(m: ExponentVector, bound: int | None) -> PointedElement:
        return kl_correct(m, family, max(bound or 1, 1))

    degrees = [ExponentVector(), ExponentVector({1: -1, 2: 1}), ExponentVector({1: 1, 2: -2, 3: 1}), ExponentVector({1: -1, 2: -1})]
    report = check_triangularity(basis, s, degrees, 4)
    assert report.checked == len(degrees) * len(s.vertices)
    assert report.passed, str(report)


def test_truncation_order() -> None:
    assert TruncationOrder(3).bound == 3
    with pytest.raises(ValueError):
        TruncationOrder(0)
    s = grader.rank2_seed(0, 0, (1, 1))
    family = rank2_family(s, cluster_sequence(s, 4))
    with pytest.raises(ValueError):
        kl_correct(ExponentVector(), family, -1)


def test_kirillov_reshetikhin_element(a2_word_seed: tuple) -> None:
    _, s, family = a2_word_seed
    element = kl_correct(ExponentVector({2: -1, 6: 1}), family, 4)
    expected = {ExponentVector(n) for n in ({}, {2: 1}, {1: 1, 2: 1}, {2: 1, 4: 1}, {1: 1, 2: 1, 4: 1}, {1: 1, 2: 1, 3: 1, 4: 1})}
    assert set(element.fpoly) == expected, f"got {element}"
    assert all(c == 1 for c in element.fpoly.values())

    frozen = freeze_element(element, [4])
    assert set(frozen.fpoly) == {ExponentVector(), ExponentVector({2: 1}), ExponentVector({1: 1, 2: 1})}

    _, ghl = grader.load_fixture("a3_ghl_dot")
    moved = transport_similar(frozen, freeze_seed(s, [4]), ghl, ExponentVector({2: -1, 4: 1}))
    assert moved.chart == ghl
    assert moved.fpoly == frozen.fpoly


def test_word_family_is_pointed(a2_word_seed: tuple) -> None:
    word, s, family = a2_word_seed
    for k in s.unfrozen:
        z = family.shifted[k]
        assert z.degree.restrict(s.unfrozen) == ExponentVector.basis(k, -1)
        assert z.is_bar_invariant()
    assert kl_correct(ExponentVector.basis(5), family, 2) == PointedElement.monomial(s, ExponentVector.basis(5))
    w = ExponentVector({1: 1, 4: 1})
    assert standard_monomial(w, StandardBasis(word, s)).degree == theta_inverse(w, word)


@pytest.fixture(scope="module")
def short_basis() -> StandardBasis:
    word = parse_word("1,2,1")
    return StandardBasis(word, quantum_word_seed(word, CartanData.of_type("a2")))


def test_straightening(short_basis: StandardBasis) -> None:
    for j, k in itertools.combinations(short_basis.word.positions, 2):
        report = straightening_check(j, k, short_basis)
        assert report.passed, str(report)
    assert not straightening_check(2, 2, short_basis).terms
    with pytest.raises(ValueError):
        straightening_check(3, 1, short_basis)


def test_standard_orders_agree(short_basis: StandardBasis) -> None:
    positions = list(short_basis.word.positions)
    for total in range(1, 4):
        for combo in itertools.combinations_with_replacement(positions, total):
            w = ExponentVector((k, 1) for k in combo)
            lex = kl_from_standard(w, "lex", short_basis, 6)
            revlex = kl_from_standard(w, "revlex", short_basis, 6)
            assert lex == revlex, f"L({w}): lex {lex} != revlex {revlex}"
            assert lex.is_bar_invariant()
            assert lex.degree == theta_inverse(w, short_basis.word)
    with pytest.raises(ValueError):
        short_basis.monomial(ExponentVector({4: 1}))
