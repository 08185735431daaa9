from fractions import Fraction

import pytest
import sympy as sp

from src.errors import WordError
from src.lie_oracle import (
    MinorLabel,
    act,
    evaluate_minor,
    exchange_quotient,
    fundamental_weight,
    minor_labels,
    mutated_label,
    parse_label,
    reflect,
    require_type_a,
    sl_samples,
    verify_exchange_on_matrices,
    weight_pairing,
)
from src.seed import Seed, opposite
from src.word_seed import CartanData, build_ddot_seed, parse_word

A2 = CartanData.of_type("a2")

LABELS = {
    "1,-1,2,-2,1,-1": ["1,3", "12,23", "1,2", "2,2", "12,12", "23,12", "2,1", "3,1"],
    "1,2,1,-1,-2,-1": ["1,3", "12,23", "1,2", "12,12", "1,1", "2,1", "23,12", "3,1"],
}


def test_weights() -> None:
    w1 = fundamental_weight(A2, 1)
    assert w1 == (Fraction(2, 3), Fraction(1, 3))
    assert reflect(A2, 1, w1) == (Fraction(-1, 3), Fraction(1, 3))
    assert act(A2, [1, 1], w1) == w1
    assert act(A2, [2, 1], w1) == reflect(A2, 2, reflect(A2, 1, w1))
    assert weight_pairing(A2, w1, w1) == Fraction(2, 3)
    assert weight_pairing(A2, w1, fundamental_weight(A2, 2)) == Fraction(1, 3)


def test_labels() -> None:
    label = MinorLabel((2, 1), (3, 2))
    assert str(label) == "Δ_{12,23}"
    assert parse_label("12,23") == label
    with pytest.raises(ValueError):
        MinorLabel((1,), (1, 2))


@pytest.mark.parametrize("text", list(LABELS))
def test_minor_labels(text: str) -> None:
    labels = minor_labels(parse_word(text), 2)
    assert list(labels) == list(range(-1, 7))
    assert [labels[k] for k in labels] == [parse_label(x) for x in LABELS[text]], {k: str(x) for k, x in labels.items()}


def test_label_errors() -> None:
    with pytest.raises(WordError):
        minor_labels(parse_word("1,3"), 2)
    with pytest.raises(WordError):
        require_type_a(CartanData.of_type("b2"), 2)
    with pytest.raises(WordError):
        require_type_a(A2, 3)
    require_type_a(A2, 2)


def test_samples_have_determinant_one() -> None:
    samples = sl_samples(3, 6, seed=1)
    assert samples[0] == sp.eye(3)
    assert all(g.det() == 1 for g in samples)
    assert sl_samples(3, 6, seed=1) == samples, "samples must be reproducible"
    assert evaluate_minor(parse_label("12,12"), samples[0]) == 1
    assert evaluate_minor(MinorLabel((), ()), samples[0]) == 1
    with pytest.raises(ValueError):
        evaluate_minor(parse_label("4,1"), samples[0])


@pytest.mark.parametrize("text", list(LABELS))
def test_exchange_relations_hold(text: str) -> None:
    word = parse_word(text)
    s = opposite(build_ddot_seed(word, A2))
    for k in s.unfrozen:
        report = verify_exchange_on_matrices(s, word, k, samples=100, rng_seed=k)
        assert report.passed, str(report)
        assert report.samples == 100
        assert report.mode in ("label", "quotient"), str(report)
        if text == "1,-1,2,-2,1,-1" and k >= word.start:
            assert report.mode == "label", f"vertex {k} should be reached by flips"


def test_unreachable_vertices_use_the_exact_quotient() -> None:
    word = parse_word("1,2,1,-1,-2,-1")
    s = opposite(build_ddot_seed(word, A2))
    assert verify_exchange_on_matrices(s, word, 3, samples=10).mode == "label"
    for k in (1, 2):
        assert mutated_label(word, k, 2) is None
        labels = minor_labels(word, 2)
        quotient, _ = exchange_quotient(s, k, labels, 3)
        assert quotient is not None, f"x'_{k} is not a polynomial"
        report = verify_exchange_on_matrices(s, word, k, samples=30)
        assert report.mode == "quotient"
        assert report.passed, str(report)


def test_non_divisible_binomial_fails() -> None:
    word = parse_word("1,2,1,-1,-2,-1")
    s = opposite(build_ddot_seed(word, A2))
    # x_1 = g_12; doubling row and column 1 squares both monomials, which g_12 no longer divides
    doubled = {key: x * 2 if 1 in key else x for key, x in s.b.items()}
    report = verify_exchange_on_matrices(Seed(s.vertices, s.frozen, dict(s.d), doubled), word, 1, samples=10)
    assert report.mode == "quotient"
    assert not report.passed
    assert report.counterexample is None
    assert "not divisible" in str(report)


def test_mutated_label() -> None:
    word = parse_word("1,-1,2,-2,1,-1")
    assert mutated_label(word, 1, 2) == parse_label("2,3")
    s = opposite(build_ddot_seed(word, A2))
    report = verify_exchange_on_matrices(s, word, 1, samples=20)
    assert report.mode == "label"
    assert report.new_label == parse_label("2,3")


def test_wrong_labels_are_caught() -> None:
    word = parse_word("1,-1,2,-2,1,-1")
    s = opposite(build_ddot_seed(word, A2))
    labels = minor_labels(word, 2)
    labels[0] = parse_label("1,1")
    report = verify_exchange_on_matrices(s, word, 1, samples=20, labels=labels)
    assert not report.passed
    assert report.counterexample == 0
    assert "FAIL" in str(report)
