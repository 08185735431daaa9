"""
Triangular and standard bases.

The triangular basis element ``L_m`` is computed from the initial family
``I_m = [x^{p+g₊} * x(s[1])^{g₋}]`` by adding ``v⁻¹Z[v⁻¹]`` multiples of
dominated elements, one ``|n|``-layer at a time, until every F-coefficient is
bar-invariant. For word seeds the same element is recovered from the standard
basis ``M(w)`` of ordered products of fundamental variables.
"""

import logging
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from typing import Literal

from src.errors import NotPointedError
from src.laurent import VLaurent, kl_split
from src.pointed import PointedElement, pointed_mul, pointed_power, to_pointed
from src.quantization import find_compatible_lambda
from src.seed import MutationSequence, Seed, Vertex, initial_variables, mutate, mutate_variables
from src.torus import ExponentVector
from src.word_seed import CartanData, SignedWord, build_dot_seed, fundamental_variable, sigma_sequence, theta, theta_inverse

logger = logging.getLogger("clusterkit.triangular")

Order = Literal["lex", "revlex"]
Basis = Callable[[ExponentVector, int | None], PointedElement | None]


@dataclass(frozen=True)
class TruncationOrder:
    """
    The largest total ``Σ n_k`` kept in any F-polynomial.
    """

    bound: int

    def __post_init__(self) -> None:
        if self.bound <= 0:
            raise ValueError(f"truncation order must be positive, got {self.bound}")


def _bound(order: TruncationOrder | int) -> int:
    return order.bound if isinstance(order, TruncationOrder) else TruncationOrder(order).bound


def _layer_key(n: ExponentVector) -> tuple[int, tuple[tuple[int, int], ...]]:
    return n.total(), tuple(n.items())


def _accumulate(
    acc: dict[ExponentVector, VLaurent], z: PointedElement, offset: ExponentVector, coeff: VLaurent, bound: int | None
) -> None:
    for n, c in z.fpoly.items():
        key = offset + n
        if bound is not None and key.total() > bound:
            continue
        value = acc.get(key, VLaurent()) + coeff * c
        if value:
            acc[key] = value
        else:
            acc.pop(key, None)


def decompose(
    degree: ExponentVector,
    coefficients: Mapping[ExponentVector, VLaurent],
    s: Seed,
    basis: Basis,
    bound: int,
) -> dict[ExponentVector, VLaurent]:
    """
    Expand ``Σ c_n x^{degree + B̃n}`` in a pointed family, lowest ``|n|`` first.

    :param basis: ``(m, bound) -> element pointed at m``, or ``None`` if the family has none.
    :return: ``n -> coefficient`` of the element pointed at ``degree + B̃n``.
    :raises NotPointedError: If the family has no element at a needed degree.
    """
    residual = {n: c for n, c in coefficients.items() if c and n.total() <= bound}
    result: dict[ExponentVector, VLaurent] = {}
    while residual:
        n = min(residual, key=_layer_key)
        c = residual[n]
        m = degree + s.p_star(n)
        element = basis(m, bound - n.total())
        if element is None:
            raise NotPointedError(f"no family element pointed at {m}")
        result[n] = c
        _accumulate(residual, element, n, -c, bound)
        residual.pop(n, None)
    return result


@dataclass
class InitialFamily:
    """
    The initial family ``I^s`` of a seed.

    :ivar seed: The quantum seed s (compatible, p* injective).
    :ivar shifted: ``k -> x_k(s[1])`` written in the chart s, for unfrozen k.
    """

    seed: Seed
    shifted: dict[Vertex, PointedElement]
    _powers: dict[tuple[Vertex, int, int | None], PointedElement] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        for k in self.seed.unfrozen:
            z = self.shifted.get(k)
            if z is None:
                raise ValueError(f"missing x_{k}(s[1])")
            if z.chart.chart_id != self.seed.chart_id:
                raise ValueError(f"x_{k}(s[1]) does not live in the initial chart")
            if z.degree.restrict(self.seed.unfrozen) != ExponentVector.basis(k, -1):
                raise NotPointedError(f"x_{k}(s[1]) has degree {z.degree}, expected -f_{k} on unfrozen vertices")

    @classmethod
    def from_sequence(cls, s: Seed, path: MutationSequence | Iterable[Vertex], sigma: Mapping[Vertex, Vertex]) -> "InitialFamily":
        """
        ``x_k(s[1]) = x_{σ(k)}(μ_path s)``.
        """
        variables = initial_variables(s)
        current = s
        for k in path:
            variables = mutate_variables(current, k, variables)
            current = mutate(current, k)
        shifted = {k: to_pointed(variables[sigma.get(k, k)], s) for k in s.unfrozen}
        logger.debug("shifted seed variables computed along %d mutations", len(list(path)))
        return cls(s, shifted)

    @classmethod
    def from_word(cls, word: SignedWord, s: Seed) -> "InitialFamily":
        """
        The green-to-red sequence of an unsigned word seed ``s = dot(word)``.
        """
        path, sigma = sigma_sequence(word)
        return cls.from_sequence(s, path, sigma)

    def _power(self, k: Vertex, e: int, bound: int | None) -> PointedElement:
        key = (k, e, bound)
        if key not in self._powers:
            base = self.shifted[k] if bound is None else self.shifted[k].truncate(bound)
            self._powers[key] = pointed_power(base, e)
        return self._powers[key]

    def generator(self, m: ExponentVector, bound: int | None = None) -> PointedElement:
        """
        ``I^s_m``: with ``g = m`` on unfrozen vertices, the normalized product
        ``[x^{p + g₊} * Π x_k(s[1])^{g₋_k}]`` where ``p`` fixes the frozen part.
        """
        s = self.seed
        frozen = s.frozen_vertices
        p = m.restrict(frozen)
        g_plus = m.restrict(s.unfrozen).positive_part()
        g_minus = m.restrict(s.unfrozen).negative_part()
        for k, e in g_minus.items():
            p = p - self.shifted[k].degree.restrict(frozen) * e
        result = PointedElement.monomial(s, p + g_plus)
        if bound is not None:
            result = result.truncate(bound)
        for k, e in g_minus.items():
            result = pointed_mul(result, self._power(k, e, bound))
        if result.degree != m:
            raise NotPointedError(f"initial element has degree {result.degree}, expected {m}")
        return result


def kl_decomposition(
    target: ExponentVector, family: InitialFamily, order: TruncationOrder | int
) -> tuple[PointedElement, dict[ExponentVector, VLaurent]]:
    """
    :return: ``L_m`` and its corrections ``n -> c_{m + B̃n, m}`` (all in v⁻¹Z[v⁻¹]).
    """
    bound = _bound(order)
    s = family.seed
    current = family.generator(target, bound)
    acc = dict(current.fpoly)
    corrections: dict[ExponentVector, VLaurent] = {}
    for layer in range(1, bound + 1):
        keys = sorted((n for n in acc if n.total() == layer), key=_layer_key)
        for n in keys:
            c = acc.get(n, VLaurent())
            if c.is_bar_invariant():
                continue
            a = kl_split(c - c.bar())
            corrections[n] = a
            lower = family.generator(target + s.p_star(n), bound - layer)
            _accumulate(acc, lower, n, a, bound)
        logger.debug("layer %d: %d corrections so far", layer, len(corrections))
    return PointedElement(target, acc, s, bound), corrections


def kl_correct(target: ExponentVector, family: InitialFamily, order: TruncationOrder | int) -> PointedElement:
    """
    The triangular basis element ``L^s_m`` truncated at ``order``.

    :raises NotPointedError: If an initial element is degenerate.
    """
    element, corrections = kl_decomposition(target, family, order)
    logger.info("L_%s: %d F-terms, %d corrections", target, len(element.fpoly), len(corrections))
    return element


@dataclass
class TriangularityFailure:
    vertex: Vertex
    degree: ExponentVector
    offset: ExponentVector
    coefficient: VLaurent

    def __str__(self) -> str:
        return f"x_{self.vertex} * L_{self.degree}: coefficient {self.coefficient} at n = {self.offset}"


@dataclass
class TriangularityReport:
    checked: int = 0
    failures: list[TriangularityFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def __str__(self) -> str:
        head = f"{'checked:':<16} {self.checked}\n{'result:':<16} {'pass' if self.passed else 'FAIL'}"
        return "\n".join([head, *(str(f) for f in self.failures)])


def check_triangularity(
    family: Basis,
    s: Seed,
    degrees: Iterable[ExponentVector],
    order: TruncationOrder | int,
    vertices: Iterable[Vertex] | None = None,
) -> TriangularityReport:
    """
    Expand ``[x_i * L_m]`` in the family and check the leading coefficient is 1 and
    the others lie in v⁻¹Z[v⁻¹].
    """
    bound = _bound(order)
    report = TriangularityReport()
    for m in degrees:
        base = family(m, bound)
        if base is None:
            raise NotPointedError(f"family has no element at {m}")
        for i in vertices if vertices is not None else s.vertices:
            product = pointed_mul(PointedElement.monomial(s, ExponentVector.basis(i)), base)
            expansion = decompose(product.degree, product.fpoly, s, family, bound)
            report.checked += 1
            for n, c in expansion.items():
                ok = c == VLaurent.one() if not n else c.in_negative_part()
                if not ok:
                    report.failures.append(TriangularityFailure(i, m, n, c))
    return report


def has_positive_coefficients(z: PointedElement) -> bool:
    return all(c >= 0 for coeff in z.fpoly.values() for _, c in coeff.items())


def quantum_word_seed(word: SignedWord, cartan: CartanData) -> Seed:
    """
    ``dot(word)`` with a compatible Λ.
    """
    return find_compatible_lambda(build_dot_seed(word, cartan))


class StandardBasis:
    """
    Ordered products ``M(w) = [W_r^{w_r} * ... * W_s^{w_s}]`` of fundamental variables
    of an unsigned word seed.
    """

    def __init__(self, word: SignedWord, seed: Seed) -> None:
        self.word = word
        self.seed = seed
        self._fundamentals: dict[int, PointedElement] = {}

    def fundamental(self, k: int) -> PointedElement:
        if k not in self._fundamentals:
            self._fundamentals[k] = fundamental_variable(self.word, k, self.seed)
        return self._fundamentals[k]

    def monomial(self, w: ExponentVector, bound: int | None = None) -> PointedElement:
        """
        :raises ValueError: If ``w`` is not a multiplicity vector over the positions.
        """
        if not w.is_nonnegative() or not set(w.support) <= set(self.word.positions):
            raise ValueError(f"{w} is not a multiplicity vector over {list(self.word.positions)}")
        result = PointedElement.one(self.seed)
        if bound is not None:
            result = result.truncate(bound)
        for k in self.word.positions:
            if w[k]:
                result = pointed_mul(result, pointed_power(self.fundamental(k), w[k]))
        return result

    def at_degree(self, m: ExponentVector, bound: int | None = None) -> PointedElement | None:
        """
        ``M(θ(m))``, or ``None`` when ``θ(m)`` has a negative entry.
        """
        w = theta(m, self.word)
        if not w.is_nonnegative():
            return None
        return self.monomial(w, bound)


def standard_monomial(w: ExponentVector, basis: StandardBasis) -> PointedElement:
    """
    ``M(w)``, pointed at ``θ⁻¹(w)``.
    """
    return basis.monomial(w)


@dataclass
class StraighteningReport:
    j: int
    k: int
    terms: dict[ExponentVector, VLaurent]

    @property
    def support(self) -> set[int]:
        return {i for w in self.terms for i in w.support}

    @property
    def passed(self) -> bool:
        return all(self.j < i < self.k for i in self.support)

    def __str__(self) -> str:
        body = ", ".join(f"{c}·M({w})" for w, c in self.terms.items()) or "0"
        return f"W_{self.k}*W_{self.j} straightening: {body} ({'pass' if self.passed else 'FAIL'})"


def straightening_check(j: int, k: int, basis: StandardBasis, order: TruncationOrder | int = 8) -> StraighteningReport:
    """
    Expand ``[W_k * W_j] - [W_j * W_k]`` (that is, ``W_k*W_j - v^{2λ} W_j*W_k`` up to
    the normalization ``v^{λ}``) in the standard basis.

    :raises ValueError: If ``j > k``.
    """
    if j > k:
        raise ValueError(f"straightening needs j <= k, got ({j}, {k})")
    if j == k:
        return StraighteningReport(j, k, {})
    bound = _bound(order)
    wk, wj = basis.fundamental(k), basis.fundamental(j)
    first, second = pointed_mul(wk, wj), pointed_mul(wj, wk)
    diff: dict[ExponentVector, VLaurent] = {}
    _accumulate(diff, first, ExponentVector(), VLaurent.one(), bound)
    _accumulate(diff, second, ExponentVector(), -VLaurent.one(), bound)
    expansion = decompose(first.degree, diff, basis.seed, basis.at_degree, bound)
    terms = {theta(first.degree + basis.seed.p_star(n), basis.word): c for n, c in expansion.items()}
    report = StraighteningReport(j, k, terms)
    logger.debug("%s", report)
    return report


def _order_key(w: ExponentVector, positions: range, order: Order) -> tuple[int, ...]:
    dense = tuple(w[k] for k in positions)
    return dense if order == "lex" else tuple(reversed(dense))


def kl_from_standard(w: ExponentVector, order: Order, basis: StandardBasis, truncation: TruncationOrder | int) -> PointedElement:
    """
    ``L(w)``: the bar-invariant element ``Σ p_{w'} M(w')`` with ``p_w = 1`` and
    ``p_{w'}`` in v⁻¹Z[v⁻¹], found by the usual recursion over ``w'`` in decreasing order.

    :raises ValueError: If ``bar M(w')`` is not triangular in the chosen order.
    """
    bound = _bound(truncation)
    s = basis.seed
    base = theta_inverse(w, basis.word)
    words: dict[ExponentVector, ExponentVector] = {ExponentVector(): w}
    bar_expansions: dict[ExponentVector, dict[ExponentVector, VLaurent]] = {}
    pending = [ExponentVector()]
    while pending:
        n = pending.pop()
        if n in bar_expansions:
            continue
        element = basis.monomial(words[n], bound - n.total()).bar()
        expansion = decompose(element.degree, element.fpoly, s, basis.at_degree, bound - n.total())
        bar_expansions[n] = expansion
        for n2 in expansion:
            key = n + n2
            if key not in words:
                words[key] = theta(base + s.p_star(key), basis.word)
                pending.append(key)

    def rank(n: ExponentVector) -> tuple[int, ...]:
        return _order_key(words[n], basis.word.positions, order)

    for n, expansion in bar_expansions.items():
        for n2 in expansion:
            if n2 and rank(n + n2) >= rank(n):
                raise ValueError(f"bar M({words[n]}) contains M({words[n + n2]}), not lower in {order} order")

    ordered = sorted(words, key=rank, reverse=True)
    if ordered[0] != ExponentVector():
        raise ValueError(f"M({w}) is not maximal among the terms of its bar expansion in {order} order")
    p: dict[ExponentVector, VLaurent] = {ExponentVector(): VLaurent.one()}
    for n in ordered[1:]:
        q = VLaurent()
        for upper, coeff in p.items():
            term = bar_expansions.get(upper, {}).get(n - upper)
            if term is not None and (n - upper).is_nonnegative():
                q = q + coeff.bar() * term
        p[n] = kl_split(-q)

    acc: dict[ExponentVector, VLaurent] = {}
    for n, coeff in p.items():
        if coeff:
            _accumulate(acc, basis.monomial(words[n], bound - n.total()), n, coeff, bound)
    logger.info("L(%s) from the standard basis in %s order: %d terms", w, order, len(acc))
    return PointedElement(base, acc, s, bound)
