"""
Quantum torus algebra LP(s) of a seed.

Elements are finite v-Laurent combinations of Laurent monomials ``x^m``
multiplied with the Λ-twisted product ``x^m * x^n = v^{λ(m,n)} x^{m+n}``.
The seed (chart) carries Λ; a seed without Λ gives the commutative product.
"""

import re
from collections import defaultdict
from collections.abc import Iterable, Iterator, Mapping
from typing import TYPE_CHECKING

from src.errors import ChartMismatchError, NotDivisibleError, NotPointedError
from src.laurent import VLaurent, parse_laurent

if TYPE_CHECKING:
    from src.seed import Seed


class ExponentVector:
    """
    A sparse integer vector indexed by vertex ids, used both for degrees
    ``m = Σ m_i f_i`` and for unfrozen supports ``n = Σ n_k e_k``.

    :ivar _items: Sorted tuple of ``(vertex, value)`` pairs without zeros.
    """

    __slots__ = ("_items", "_hash")

    def __init__(self, entries: Mapping[int, int] | Iterable[tuple[int, int]] | None = None) -> None:
        pairs = entries.items() if isinstance(entries, Mapping) else (entries or ())
        acc: defaultdict[int, int] = defaultdict(int)
        for i, value in pairs:
            acc[int(i)] += int(value)
        self._items: tuple[tuple[int, int], ...] = tuple(sorted((i, x) for i, x in acc.items() if x))
        self._hash: int = hash(self._items)

    @classmethod
    def basis(cls, i: int, value: int = 1) -> "ExponentVector":
        """
        :return: ``value * f_i``.
        """
        return cls({i: value})

    @classmethod
    def zero(cls) -> "ExponentVector":
        return cls()

    @classmethod
    def from_dense(cls, vertices: Iterable[int], values: Iterable[int]) -> "ExponentVector":
        return cls(zip(vertices, values))

    def __getitem__(self, i: int) -> int:
        for j, value in self._items:
            if j == i:
                return value
        return 0

    def items(self) -> Iterator[tuple[int, int]]:
        return iter(self._items)

    def as_dict(self) -> dict[int, int]:
        return dict(self._items)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self._items)

    def to_dense(self, vertices: Iterable[int]) -> list[int]:
        lookup = dict(self._items)
        return [lookup.get(i, 0) for i in vertices]

    def restrict(self, vertices: Iterable[int]) -> "ExponentVector":
        keep = set(vertices)
        return ExponentVector((i, x) for i, x in self._items if i in keep)

    def positive_part(self) -> "ExponentVector":
        return ExponentVector((i, x) for i, x in self._items if x > 0)

    def negative_part(self) -> "ExponentVector":
        """
        :return: ``[-m]_+``, a nonnegative vector.
        """
        return ExponentVector((i, -x) for i, x in self._items if x < 0)

    def total(self) -> int:
        return sum(x for _, x in self._items)

    def is_nonnegative(self) -> bool:
        return all(x >= 0 for _, x in self._items)

    def __add__(self, other: "ExponentVector") -> "ExponentVector":
        if not isinstance(other, ExponentVector):
            return NotImplemented
        return ExponentVector(self._items + other._items)

    def __sub__(self, other: "ExponentVector") -> "ExponentVector":
        if not isinstance(other, ExponentVector):
            return NotImplemented
        return ExponentVector(self._items + tuple((i, -x) for i, x in other._items))

    def __neg__(self) -> "ExponentVector":
        return ExponentVector((i, -x) for i, x in self._items)

    def __mul__(self, k: int) -> "ExponentVector":
        if not isinstance(k, int):
            return NotImplemented
        return ExponentVector((i, k * x) for i, x in self._items)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExponentVector):
            return NotImplemented
        return self._items == other._items

    def __lt__(self, other: "ExponentVector") -> bool:
        return self._items < other._items

    def __hash__(self) -> int:
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{i}:{x}" for i, x in self._items) + "}"

    def __repr__(self) -> str:
        return f"ExponentVector({str(self)})"


def parse_exponents(text: str) -> ExponentVector:
    """
    Parse ``"{2:-1, 6:1}"`` (braces optional).

    :raises ValueError: On malformed input.
    """
    body = text.strip().removeprefix("{").removesuffix("}").strip()
    if not body:
        return ExponentVector()
    entries: list[tuple[int, int]] = []
    for chunk in body.split(","):
        key, sep, value = chunk.partition(":")
        if not sep:
            raise ValueError(f"bad exponent entry {chunk!r} in {text!r}")
        entries.append((int(key), int(value)))
    return ExponentVector(entries)


class TorusElement:
    """
    A finite element ``Σ c_m x^m`` of the quantum torus of ``chart``.

    :ivar chart: The seed whose Λ defines the product.
    :ivar _terms: ``ExponentVector -> VLaurent`` map without zero coefficients.
    """

    __slots__ = ("_terms", "chart")

    def __init__(self, terms: Mapping[ExponentVector, VLaurent | int], chart: "Seed") -> None:
        cleaned: dict[ExponentVector, VLaurent] = {}
        allowed = chart.vertex_set
        for m, c in terms.items():
            coeff = c if isinstance(c, VLaurent) else VLaurent.constant(c)
            if coeff.is_zero():
                continue
            if any(i not in allowed for i in m.support):
                raise ValueError(f"degree {m} uses vertices outside the chart")
            cleaned[m] = coeff
        self._terms: dict[ExponentVector, VLaurent] = cleaned
        self.chart: "Seed" = chart

    @classmethod
    def monomial(cls, chart: "Seed", m: ExponentVector, coeff: VLaurent | int = 1) -> "TorusElement":
        return cls({m: coeff}, chart)

    @classmethod
    def variable(cls, chart: "Seed", i: int) -> "TorusElement":
        """
        :return: The cluster variable ``x_i`` of the chart.
        """
        return cls({ExponentVector.basis(i): 1}, chart)

    @classmethod
    def one(cls, chart: "Seed") -> "TorusElement":
        return cls({ExponentVector(): 1}, chart)

    @classmethod
    def zero(cls, chart: "Seed") -> "TorusElement":
        return cls({}, chart)

    @property
    def terms(self) -> dict[ExponentVector, VLaurent]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[ExponentVector, VLaurent]]:
        return iter(self._terms.items())

    def coefficient(self, m: ExponentVector) -> VLaurent:
        return self._terms.get(m, VLaurent())

    def support(self) -> list[ExponentVector]:
        return list(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def rebind(self, chart: "Seed") -> "TorusElement":
        """
        Reinterpret the same terms in another chart on a superset of vertices
        (a frozen or similar seed).
        """
        return TorusElement(self._terms, chart)

    def _check_chart(self, other: "TorusElement") -> None:
        if self.chart.chart_id != other.chart.chart_id:
            raise ChartMismatchError(
                f"elements live in different charts ({self.chart.chart_id[:8]} vs {other.chart.chart_id[:8]})"
            )

    def scale(self, c: VLaurent | int) -> "TorusElement":
        coeff = c if isinstance(c, VLaurent) else VLaurent.constant(c)
        return TorusElement({m: coeff * x for m, x in self._terms.items()}, self.chart)

    def __add__(self, other: "TorusElement") -> "TorusElement":
        if not isinstance(other, TorusElement):
            return NotImplemented
        self._check_chart(other)
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc[m] + c if m in acc else c
        return TorusElement(acc, self.chart)

    def __neg__(self) -> "TorusElement":
        return TorusElement({m: -c for m, c in self._terms.items()}, self.chart)

    def __sub__(self, other: "TorusElement") -> "TorusElement":
        if not isinstance(other, TorusElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: object) -> "TorusElement":
        if isinstance(other, TorusElement):
            return twisted_mul(self, other)
        if isinstance(other, (VLaurent, int)) and not isinstance(other, bool):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other: object) -> "TorusElement":
        if isinstance(other, (VLaurent, int)) and not isinstance(other, bool):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, exponent: int) -> "TorusElement":
        if exponent < 0:
            if len(self._terms) != 1:
                raise NotDivisibleError("only monomials have inverses in the torus")
            ((m, c),) = self._terms.items()
            # (c x^m)^{-1} = c^{-1} x^{-m}; λ(m,-m) = 0
            return TorusElement({m * exponent: c ** exponent}, self.chart)
        result = TorusElement.one(self.chart)
        for _ in range(exponent):
            result = twisted_mul(result, self)
        return result

    def bar(self) -> "TorusElement":
        return bar_element(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TorusElement):
            return NotImplemented
        return self.chart.chart_id == other.chart.chart_id and self._terms == other._terms

    __hash__ = None  # type: ignore[assignment]

    def __str__(self) -> str:
        return format_torus(self)

    def __repr__(self) -> str:
        return f"TorusElement({format_torus(self)!r}, chart={self.chart.chart_id[:8]})"


def twisted_mul(a: TorusElement, b: TorusElement) -> TorusElement:
    """
    The Λ-twisted product, bilinear in the terms.

    :raises ChartMismatchError: If the factors live in different charts.
    """
    a._check_chart(b)
    chart = a.chart
    acc: dict[ExponentVector, VLaurent] = {}
    for m, c in a.items():
        for n, d in b.items():
            key = m + n
            term = (c * d).shift(chart.pairing(m, n))
            acc[key] = acc[key] + term if key in acc else term
    return TorusElement(acc, chart)


def bar_element(a: TorusElement) -> TorusElement:
    """
    The bar involution ``v^α x^m ↦ v^{-α} x^m``, an anti-automorphism of the twisted product.
    """
    return TorusElement({m: c.bar() for m, c in a.items()}, a.chart)


def normalize(a: TorusElement, lead: ExponentVector) -> TorusElement:
    """
    Rescale ``a`` so that the coefficient of ``x^lead`` becomes 1.

    :raises NotPointedError: If ``x^lead`` is absent or its coefficient is not a power of v.
    """
    alpha = a.coefficient(lead).single_power()
    if alpha is None:
        raise NotPointedError(f"coefficient of x^{lead} is {a.coefficient(lead)}, not a power of v")
    if alpha == 0:
        return a
    return a.scale(VLaurent.monomial(-alpha))


def _order_key(chart: "Seed", m: ExponentVector) -> tuple[int, tuple[int, ...]]:
    return m.total(), tuple(m.to_dense(chart.vertices))


def leading_term(a: TorusElement) -> tuple[ExponentVector, VLaurent]:
    """
    The term of ``a`` maximal in the total-degree-then-lex order over the chart's vertices.
    """
    if a.is_zero():
        raise ValueError("zero element has no leading term")
    m = max(a.support(), key=lambda x: _order_key(a.chart, x))
    return m, a.coefficient(m)


def exact_divide(num: TorusElement, den: TorusElement) -> TorusElement:
    """
    Right division: find ``q`` with ``twisted_mul(q, den) == num``.

    Leading-term reduction in a monomial order; quotient exponents are confined
    to the per-coordinate box spanned by the Newton polytopes, so a quotient
    term outside it proves non-divisibility.

    :raises ZeroDivisionError: If ``den`` is zero.
    :raises NotDivisibleError: If no Laurent quotient exists.
    """
    num._check_chart(den)
    if den.is_zero():
        raise ZeroDivisionError("division by zero torus element")
    chart = num.chart
    if num.is_zero():
        return TorusElement.zero(chart)

    coords = {i for m in num.support() + den.support() for i in m.support}
    box: dict[int, tuple[int, int]] = {}
    for i in coords:
        num_vals = [m[i] for m in num.support()]
        den_vals = [m[i] for m in den.support()]
        lo = min(num_vals) - min(den_vals)
        hi = max(num_vals) - max(den_vals)
        if lo > hi:
            raise NotDivisibleError(f"coordinate {i} leaves no room for a quotient")
        box[i] = (lo, hi)

    dm, dc = leading_term(den)
    rem: dict[ExponentVector, VLaurent] = num.terms
    quotient: dict[ExponentVector, VLaurent] = {}
    while rem:
        rm = max(rem, key=lambda x: _order_key(chart, x))
        qm = rm - dm
        for i in set(qm.support) | box.keys():
            lo, hi = box.get(i, (0, 0))
            if not lo <= qm[i] <= hi:
                raise NotDivisibleError(f"quotient term x^{qm} falls outside the Newton box")
        try:
            qc = rem[rm].divexact(dc).shift(-chart.pairing(qm, dm))
        except ValueError as exc:
            raise NotDivisibleError(str(exc)) from exc
        quotient[qm] = qc
        for n, c in den.items():
            key = qm + n
            value = rem.get(key, VLaurent()) - (qc * c).shift(chart.pairing(qm, n))
            if value:
                rem[key] = value
            else:
                rem.pop(key, None)
    return TorusElement(quotient, chart)


def frozen_valuation(a: TorusElement, j: int) -> int:
    """
    The valuation ν_j: the minimal exponent of ``x_j`` over the terms of ``a``.

    :raises ValueError: On the zero element.
    """
    if a.is_zero():
        raise ValueError("valuation of the zero element is undefined")
    return min(m[j] for m in a.support())


def format_monomial(m: ExponentVector, symbol: str = "x") -> str:
    return " * ".join(f"{symbol}[{i}]" if e == 1 else f"{symbol}[{i}]^{e}" for i, e in m.items())


def format_torus(a: TorusElement) -> str:
    """
    Expanded text form, e.g. ``v^-1 * x[2]^-1 * x[6] + x[6]``; terms in decreasing monomial order.
    """
    if a.is_zero():
        return "0"
    pieces: list[str] = []
    ordered = sorted(a.support(), key=lambda x: _order_key(a.chart, x), reverse=True)
    for m in ordered:
        c = a.coefficient(m)
        mono = format_monomial(m)
        negative = False
        if len(c.terms) == 1:
            ((e, k),) = c.items()
            negative = k < 0
            coeff_txt = str(VLaurent({e: abs(k)}))
        else:
            coeff_txt = f"({c})"
        if not mono:
            body = coeff_txt
        elif coeff_txt == "1":
            body = mono
        else:
            body = f"{coeff_txt} * {mono}"
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


_TOKEN_RE = re.compile(r"\s*(x\[-?\d+\](?:\^-?\d+)?|v(?:\^-?\d+)?|\d+|[()*+-])")
_XMON_RE = re.compile(r"x\[(-?\d+)\](?:\^(-?\d+))?")


class TermParser:
    """
    Recursive-descent reader for sums of terms like ``(v + v^-1) * x[0]^2 - 3``.

    A term is a product of integers, powers of ``v``, bracketed scalar sums and,
    when ``allow_x`` is set, variables ``x[i]^e``. Repeated exponents add up.

    :raises ValueError: On a character outside the grammar or a dangling operator.
    """

    def __init__(self, text: str) -> None:
        self.tokens: list[str] = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN_RE.match(stripped, pos)
            if m is None:
                raise ValueError(f"unexpected character at offset {pos} in {text!r}")
            self.tokens.append(m.group(1))
            pos = m.end()
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ValueError("unexpected end of input")
        self.pos += 1
        return tok

    def expression(self, allow_x: bool) -> dict[ExponentVector, VLaurent]:
        acc: dict[ExponentVector, VLaurent] = {}
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        while True:
            coeff, m = self.term(allow_x)
            coeff = coeff if sign > 0 else -coeff
            acc[m] = acc[m] + coeff if m in acc else coeff
            if self.peek() not in ("+", "-"):
                return acc
            sign = -1 if self.take() == "-" else 1

    def term(self, allow_x: bool) -> tuple[VLaurent, ExponentVector]:
        coeff = VLaurent.one()
        m = ExponentVector()
        while True:
            tok = self.take()
            if tok == "(":
                inner = self.expression(allow_x=False)
                if self.take() != ")":
                    raise ValueError("unbalanced parenthesis")
                coeff = coeff * inner.get(ExponentVector(), VLaurent())
            elif tok.startswith("x"):
                if not allow_x:
                    raise ValueError("monomials are not allowed inside a coefficient")
                mx = _XMON_RE.fullmatch(tok)
                assert mx is not None
                m = m + ExponentVector.basis(int(mx.group(1)), int(mx.group(2) or 1))
            elif tok.startswith("v") or tok.isdigit():
                coeff = coeff * parse_laurent(tok)
            else:
                raise ValueError(f"unexpected token {tok!r}")
            if self.peek() != "*":
                return coeff, m
            self.take()


def parse_torus(text: str, chart: "Seed") -> TorusElement:
    """
    Parse a fully expanded sum of terms such as ``(v + v^-1) * x[1] - x[2]^-1``.

    Products of ``x[i]`` inside one term denote the single Laurent monomial
    ``x^m`` (not an ordered twisted product).
    """
    parser = TermParser(text)
    terms = parser.expression(allow_x=True)
    if parser.peek() is not None:
        raise ValueError(f"trailing input in {text!r}")
    return TorusElement(terms, chart)
