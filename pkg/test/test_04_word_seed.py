import math
from fractions import Fraction

import pytest

import grader
from src.errors import WordError
from src.seed import opposite
from src.torus import ExponentVector
from src.tower import ghl_a1_seed
from src.triangular import quantum_word_seed
from src.word_seed import (
    CartanData,
    SignedWord,
    build_ddot_seed,
    build_dot_seed,
    interval_degree,
    interval_variable,
    left_reflect,
    opposite_word,
    parse_word,
    shift,
    sigma_sequence,
    subword,
    theta,
    theta_inverse,
    word_flip,
)

WORD_SEEDS = [
    ("sl2_ddot", "ddot"),
    ("sl3_ddot", "ddot"),
    ("sl3_bfz_ddot", "ddot"),
    ("sl3_dbs_op", "ddot-op"),
    ("a2_copy3_dot", "dot"),
    ("a3_copy4_dot", "dot"),
    ("a3_ghl_dot", "dot"),
]


@pytest.mark.parametrize("name, kind", WORD_SEEDS)
def test_word_seed_fixtures(name: str, kind: str) -> None:
    data, expected = grader.load_fixture(name)
    word = parse_word(data["word"], data["word_start"])
    cartan = CartanData.of_type(data["cartan"])
    match kind:
        case "ddot":
            built = build_ddot_seed(word, cartan)
        case "ddot-op":
            built = opposite(build_ddot_seed(word, cartan))
        case _:
            built = build_dot_seed(word, cartan)
    grader.assert_same_exchange_matrix(built, expected, name)
    assert dict(built.d) == dict(expected.d), f"{name}: symmetrizers differ"


def test_ghl_window_fixture() -> None:
    _, expected = grader.load_fixture("ghl_a1_window")
    grader.assert_same_exchange_matrix(ghl_a1_seed(3), expected, "ghl_a1_window")


def test_cartan_types() -> None:
    b2 = CartanData.of_type("b2")
    assert (b2.entry(1, 2), b2.entry(2, 1)) == (-1, -2)
    assert b2.bilinear(1, 2) == b2.bilinear(2, 1)
    g2 = CartanData.of_type("G2")
    assert (g2.entry(1, 2), g2.entry(2, 1)) == (-3, -1)
    assert CartanData.of_type("d4").entry(2, 4) == -1
    for name in ("x3", "a0", "g3", "b"):
        with pytest.raises(ValueError):
            CartanData.of_type(name)
    with pytest.raises(ValueError):
        CartanData.from_matrix([[2, -1], [-2, 2]])


def test_words() -> None:
    w = parse_word(" 1, -1,2 ")
    assert w.letters == (1, -1, 2)
    assert (w.letter(2), w.sign(2)) == (1, -1)
    assert not w.is_unsigned()
    with pytest.raises(WordError):
        parse_word("1,x")
    with pytest.raises(WordError):
        SignedWord((1, 0))
    with pytest.raises(WordError):
        w.letter(4)
    with pytest.raises(WordError):
        build_ddot_seed(parse_word("1,3"), CartanData.of_type("a2"))
    with pytest.raises(WordError):
        build_ddot_seed(w, CartanData.of_type("a2"), coxeter=(1, 1))


def test_shift() -> None:
    w = parse_word("1,2,1,2,1,2")
    assert shift(w, 1, 1) == 3
    assert shift(w, 1, 2) == 5
    assert shift(w, 5, 1) == math.inf
    assert shift(w, 1, -1) == -math.inf
    assert shift(w, 5, -2) == 1


def test_word_operations() -> None:
    w = parse_word("1,-1,2,-2")
    flipped, relation = word_flip(w, 1)
    assert flipped.letters == (-1, 1, 2, -2)
    assert relation.kind == "mu" and relation.vertices == (1,)
    flipped, relation = word_flip(w, 2)
    assert flipped.letters == (1, 2, -1, -2)
    assert relation.kind == "sigma" and relation.vertices == (2, 3)
    with pytest.raises(WordError):
        word_flip(parse_word("1,2"), 1)
    with pytest.raises(WordError):
        word_flip(w, 4)
    assert left_reflect(w).letters == (-1, -1, 2, -2)
    assert opposite_word(parse_word("1,2,-1")).letters == (1, -2, -1)
    assert subword(w, 2, 3) == SignedWord((-1, 2), 2)
    assert len(subword(w, 3, 2)) == 0


def test_sigma_sequence() -> None:
    path, sigma = sigma_sequence(parse_word("1,2,1,2,1,2"))
    assert path.steps == (1, 3, 2, 4, 1, 2)
    assert sigma == {1: 3, 2: 4, 3: 1, 4: 2, 5: 5, 6: 6}
    with pytest.raises(WordError):
        sigma_sequence(parse_word("1,-1"))


def test_theta() -> None:
    word = parse_word("1,2,1,2,1,2")
    assert theta_inverse(ExponentVector.basis(3), word) == ExponentVector({3: 1, 1: -1})
    assert theta_inverse(ExponentVector.basis(2), word) == ExponentVector.basis(2)
    for w in (ExponentVector({1: 2, 4: 1}), ExponentVector({5: 3}), ExponentVector({2: 1, 3: 1, 6: 2})):
        assert theta(theta_inverse(w, word), word) == w
    # θ(−f_2 + f_6) = β_4 + β_6
    assert theta(ExponentVector({2: -1, 6: 1}), word) == ExponentVector({4: 1, 6: 1})


def test_interval_variables() -> None:
    word = parse_word("1,2,1,2,1,2")
    assert interval_degree(word, 1, 5) == ExponentVector.basis(5)
    assert interval_degree(word, 3, 5) == ExponentVector({5: 1, 1: -1})
    with pytest.raises(WordError):
        interval_degree(word, 1, 2)
    s = quantum_word_seed(word, CartanData.of_type("a2"))
    for j, k in ((1, 1), (3, 3), (3, 5), (2, 6)):
        z = interval_variable(word, j, k, s)
        assert z.degree == interval_degree(word, j, k), f"W[{j},{k}] has degree {z.degree}"
        assert z.is_bar_invariant()
        assert z.fpoly[ExponentVector()] == 1


def test_frozen_block_is_kept() -> None:
    word = parse_word("1,2")
    s = build_dot_seed(word, CartanData.of_type("a2"), frozen_block={(1, 2): Fraction(1, 2), (2, 1): Fraction(-1, 2)})
    assert s.frozen == frozenset({1, 2})
    assert s.b_entry(1, 2) == Fraction(1, 2)
