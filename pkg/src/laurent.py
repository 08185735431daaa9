"""
Laurent polynomials in the quantum parameter v with integer coefficients.

This is the scalar ring of every quantum computation in clusterkit. Values
are immutable and canonical: terms are kept sorted by exponent and zero
coefficients are never stored, so equal values compare (and hash) equal.
"""

import re
from collections import defaultdict
from collections.abc import Iterator, Mapping
from fractions import Fraction

_TERM_RE = re.compile(r"([+-]?)(?:(\d+)(\*v(?:\^(-?\d+))?)?|v(?:\^(-?\d+))?)")


class VLaurent:
    """
    An element of Z[v, v⁻¹].

    :ivar _terms: Sorted tuple of ``(exponent, coefficient)`` pairs, no zero coefficient.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, int] | None = None) -> None:
        """
        :param terms: Map from exponent to coefficient. Zero coefficients are dropped.
        """
        cleaned = {int(e): int(c) for e, c in (terms or {}).items() if c != 0}
        self._terms: tuple[tuple[int, int], ...] = tuple(sorted(cleaned.items()))

    @classmethod
    def monomial(cls, exponent: int, coefficient: int = 1) -> "VLaurent":
        """
        :return: ``coefficient * v^exponent``.
        """
        return cls({exponent: coefficient})

    @classmethod
    def constant(cls, value: int) -> "VLaurent":
        return cls({0: value})

    @classmethod
    def zero(cls) -> "VLaurent":
        return cls()

    @classmethod
    def one(cls) -> "VLaurent":
        return cls({0: 1})

    # ---- inspection -------------------------------------------------

    @property
    def terms(self) -> dict[int, int]:
        """
        :return: A fresh ``exponent -> coefficient`` dict in increasing exponent order.
        """
        return dict(self._terms)

    def items(self) -> Iterator[tuple[int, int]]:
        return iter(self._terms)

    def coefficient(self, exponent: int) -> int:
        for e, c in self._terms:
            if e == exponent:
                return c
        return 0

    @property
    def min_degree(self) -> int:
        """
        :raises ValueError: On the zero polynomial.
        """
        if not self._terms:
            raise ValueError("zero Laurent polynomial has no degree")
        return self._terms[0][0]

    @property
    def max_degree(self) -> int:
        if not self._terms:
            raise ValueError("zero Laurent polynomial has no degree")
        return self._terms[-1][0]

    def is_zero(self) -> bool:
        return not self._terms

    def single_power(self) -> int | None:
        """
        :return: ``α`` if this value equals ``v^α`` exactly, otherwise ``None``.
        """
        if len(self._terms) == 1 and self._terms[0][1] == 1:
            return self._terms[0][0]
        return None

    def is_bar_invariant(self) -> bool:
        return self.bar() == self

    def in_negative_part(self) -> bool:
        """
        :return: True if every exponent is at most -1, i.e. the value lies in v⁻¹Z[v⁻¹].
        """
        return all(e <= -1 for e, _ in self._terms)

    # ---- arithmetic -------------------------------------------------

    @staticmethod
    def _coerce(other: object) -> "VLaurent | None":
        if isinstance(other, VLaurent):
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return VLaurent.constant(other)
        return None

    def __add__(self, other: object) -> "VLaurent":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        acc: defaultdict[int, int] = defaultdict(int, self._terms)
        for e, c in rhs._terms:
            acc[e] += c
        return VLaurent(acc)

    __radd__ = __add__

    def __neg__(self) -> "VLaurent":
        return VLaurent({e: -c for e, c in self._terms})

    def __sub__(self, other: object) -> "VLaurent":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other: object) -> "VLaurent":
        lhs = self._coerce(other)
        if lhs is None:
            return NotImplemented
        return lhs - self

    def __mul__(self, other: object) -> "VLaurent":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        acc: defaultdict[int, int] = defaultdict(int)
        for e1, c1 in self._terms:
            for e2, c2 in rhs._terms:
                acc[e1 + e2] += c1 * c2
        return VLaurent(acc)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "VLaurent":
        if exponent < 0:
            alpha = self.single_power()
            if alpha is None:
                raise ValueError(f"cannot invert {self}")
            return VLaurent.monomial(alpha * exponent)
        result = VLaurent.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def shift(self, k: int) -> "VLaurent":
        """
        :return: ``v^k`` times this value.
        """
        return VLaurent({e + k: c for e, c in self._terms})

    def bar(self) -> "VLaurent":
        """
        The bar involution v ↦ v⁻¹.
        """
        return VLaurent({-e: c for e, c in self._terms})

    def divexact(self, other: "VLaurent | int") -> "VLaurent":
        """
        Exact division in Z[v, v⁻¹].

        :param other: Nonzero divisor.
        :return: The quotient ``q`` with ``q * other == self``.
        :raises ZeroDivisionError: If ``other`` is zero.
        :raises ValueError: If the quotient is not a Laurent polynomial over Z.
        """
        den = self._coerce(other)
        if den is None:
            raise TypeError(f"cannot divide by {other!r}")
        if den.is_zero():
            raise ZeroDivisionError("division by the zero Laurent polynomial")
        if self.is_zero():
            return VLaurent()
        lead_e, lead_c = den._terms[-1]
        floor = self.min_degree - den.min_degree
        rem: dict[int, int] = dict(self._terms)
        quotient: dict[int, int] = {}
        while rem:
            top = max(rem)
            q_exp = top - lead_e
            if q_exp < floor or rem[top] % lead_c:
                raise ValueError(f"{self} is not divisible by {den}")
            q_coeff = rem[top] // lead_c
            quotient[q_exp] = q_coeff
            for e, c in den._terms:
                key = e + q_exp
                value = rem.get(key, 0) - q_coeff * c
                if value:
                    rem[key] = value
                else:
                    rem.pop(key, None)
        return VLaurent(quotient)

    def evaluate(self, value: int | Fraction) -> Fraction:
        """
        Substitute a rational number for v.
        """
        total = Fraction(0)
        for e, c in self._terms:
            total += c * Fraction(value) ** e
        return total

    def at_one(self) -> int:
        """
        The classical specialization v = 1.
        """
        return sum(c for _, c in self._terms)

    # ---- protocol ---------------------------------------------------

    def __eq__(self, other: object) -> bool:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self._terms == rhs._terms

    def __hash__(self) -> int:
        return hash(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces: list[str] = []
        for e, c in reversed(self._terms):
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                power = "v" if e == 1 else f"v^{e}"
                body = power if mag == 1 else f"{mag}*{power}"
            if not pieces:
                pieces.append(f"-{body}" if c < 0 else body)
            else:
                pieces.append(f" - {body}" if c < 0 else f" + {body}")
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"VLaurent({str(self)!r})"


def v_power(k: int) -> VLaurent:
    """
    :return: ``v^k``.
    """
    return VLaurent.monomial(k)


def kl_split(d: VLaurent) -> VLaurent:
    """
    Split a bar-antisymmetric value as ``d = bar(e) - e`` with ``e`` in v⁻¹Z[v⁻¹].

    :param d: A value with ``bar(d) == -d``.
    :return: The unique ``e`` with all exponents at most -1.
    :raises ValueError: If ``d`` is not bar-antisymmetric.
    """
    if d.bar() != -d:
        raise ValueError(f"{d} is not bar-antisymmetric")
    return VLaurent({e: -c for e, c in d.items() if e < 0})


def parse_laurent(text: str) -> VLaurent:
    """
    Parse the ``c*v^k`` grammar, e.g. ``"v^2 - 3*v^-1 + 1"``.

    :raises ValueError: On malformed input.
    """
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty Laurent polynomial literal")
    acc: defaultdict[int, int] = defaultdict(int)
    pos = 0
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"cannot parse Laurent polynomial {text!r} at offset {pos}")
        if pos > 0 and not m.group(1):
            raise ValueError(f"missing sign between terms in {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        if m.group(2) is not None:
            coeff = int(m.group(2))
            if m.group(3):
                exp = int(m.group(4)) if m.group(4) is not None else 1
            else:
                exp = 0
        else:
            coeff = 1
            exp = int(m.group(5)) if m.group(5) is not None else 1
        acc[exp] += sign * coeff
        pos = m.end()
    return VLaurent(acc)
