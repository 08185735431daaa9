import random
from fractions import Fraction

import pytest

import grader
from src.laurent import VLaurent, kl_split, parse_laurent, v_power

v = v_power(1)


def test_arithmetic() -> None:
    assert (v + 1) * (v - 1) == v**2 - 1
    assert 3 - v == parse_laurent("-v + 3")
    assert (v + v**-1) ** 2 == v**2 + 2 + v**-2
    assert (v - v).is_zero(), "v - v should vanish"
    assert VLaurent({1: 0, 2: 0}) == 0, "zero coefficients must be dropped"


def test_text_form() -> None:
    x = parse_laurent("v^2 - 3*v^-1 + 1")
    assert str(x) == "v^2 + 1 - 3*v^-1"
    assert str(-x) == "-v^2 - 1 + 3*v^-1"
    assert str(VLaurent()) == "0"
    assert parse_laurent(str(x)) == x
    assert parse_laurent("2*v - v") == v


@pytest.mark.parametrize("text", ["", "v^", "2v", "v^x", "3*"])
def test_parse_rejects(text: str) -> None:
    with pytest.raises(ValueError):
        parse_laurent(text)


def test_degrees() -> None:
    x = parse_laurent("v^3 - v^-2")
    assert x.min_degree == -2
    assert x.max_degree == 3
    with pytest.raises(ValueError):
        _ = VLaurent().min_degree


def test_bar_is_an_involution() -> None:
    rng = random.Random(1)
    for _ in range(50):
        x, y = grader.random_laurent(rng), grader.random_laurent(rng)
        assert x.bar().bar() == x
        assert (x * y).bar() == x.bar() * y.bar(), f"bar is not multiplicative on {x}, {y}"
    assert (v + v**-1).is_bar_invariant()
    assert not (v + 1).is_bar_invariant()


def test_divexact() -> None:
    assert (v**2 - v**-2).divexact(v - v**-1) == v + v**-1
    assert (6 * v**3).divexact(2 * v) == 3 * v**2
    with pytest.raises(ValueError):
        (v**2 + 1).divexact(v + 1)
    with pytest.raises(ValueError):
        (3 * v).divexact(2)
    with pytest.raises(ZeroDivisionError):
        v.divexact(0)
    rng = random.Random(2)
    for _ in range(50):
        a, b = grader.random_laurent(rng), grader.random_laurent(rng)
        if b.is_zero():
            continue
        assert (a * b).divexact(b) == a, f"({a})*({b}) / ({b}) != {a}"


def test_inverse_powers() -> None:
    assert (v**3) ** -2 == v**-6
    with pytest.raises(ValueError):
        (v + 1) ** -1
    assert (2 * v).single_power() is None
    assert v.shift(-3).single_power() == -2


def test_specializations() -> None:
    x = v + v**-1
    assert x.evaluate(2) == Fraction(5, 2)
    assert x.at_one() == 2
    assert parse_laurent("v^-1 - 2*v^-3").in_negative_part()
    assert not parse_laurent("1 + v^-1").in_negative_part()


def test_kl_split_random() -> None:
    rng = random.Random(305)
    for _ in range(1000):
        d, e = grader.random_bar_antisymmetric(rng)
        assert d.bar() == -d
        split = kl_split(d)
        assert split == e, f"kl_split({d}) = {split}, expected {e}"
        assert split.in_negative_part()
        assert split.bar() - split == d


def test_kl_split_rejects_symmetric_input() -> None:
    assert kl_split(v - v**-1) == v**-1
    assert kl_split(VLaurent()) == 0
    with pytest.raises(ValueError):
        kl_split(VLaurent.one())
    with pytest.raises(ValueError):
        kl_split(v + v**-1)
