"""
Pointed elements and the analysis around them: degrees, F-polynomials, the
dominance order, freezing, similarity transport and frozen-vertex optimization.
"""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import sympy as sp

from src.errors import FrozenVertexError, InjectivityError, NotPointedError, SimilarityError
from src.laurent import VLaurent
from src.seed import MutationSequence, Seed, Vertex, exchange_graph, mutate, mutate_path, tropical_mutate
from src.torus import ExponentVector, TorusElement, TermParser, format_monomial, normalize, parse_exponents

logger = logging.getLogger("clusterkit.pointed")


def _n_key(n: ExponentVector) -> tuple[int, tuple[tuple[int, int], ...]]:
    return n.total(), tuple(n.items())


@dataclass(frozen=True, eq=False)
class PointedElement:
    """
    ``x^m · (1 + Σ c_n p*(y^n))`` in the chart ``chart``.

    :ivar degree: The degree m.
    :ivar fpoly: ``n -> c_n`` with ``c_0 = 1``; keys are nonnegative on unfrozen vertices.
    :ivar chart: The seed.
    :ivar truncation: Largest retained ``Σ n_k``, or ``None`` for an exact (finite) element.
    """

    degree: ExponentVector
    fpoly: Mapping[ExponentVector, VLaurent]
    chart: Seed
    truncation: int | None = field(default=None)

    def __post_init__(self) -> None:
        cleaned: dict[ExponentVector, VLaurent] = {}
        unfrozen = set(self.chart.unfrozen)
        for n, c in self.fpoly.items():
            coeff = c if isinstance(c, VLaurent) else VLaurent.constant(c)
            if coeff.is_zero():
                continue
            if not n.is_nonnegative() or not set(n.support) <= unfrozen:
                raise ValueError(f"F-polynomial key {n} is not in N^⊕ over the unfrozen vertices")
            if self.truncation is not None and n.total() > self.truncation:
                continue
            cleaned[n] = coeff
        if cleaned.get(ExponentVector()) != VLaurent.one():
            raise NotPointedError(f"F-polynomial constant term is {cleaned.get(ExponentVector(), 0)}, not 1")
        object.__setattr__(self, "fpoly", dict(sorted(cleaned.items(), key=lambda kv: _n_key(kv[0]))))

    @classmethod
    def monomial(cls, chart: Seed, m: ExponentVector) -> "PointedElement":
        return cls(m, {ExponentVector(): VLaurent.one()}, chart)

    @classmethod
    def one(cls, chart: Seed) -> "PointedElement":
        return cls.monomial(chart, ExponentVector())

    def expand(self) -> TorusElement:
        """
        The Laurent element ``Σ c_n x^{m + B̃n}``.
        """
        return TorusElement({self.degree + self.chart.p_star(n): c for n, c in self.fpoly.items()}, self.chart)

    def bar(self) -> "PointedElement":
        return replace(self, fpoly={n: c.bar() for n, c in self.fpoly.items()})

    def is_bar_invariant(self) -> bool:
        return all(c.is_bar_invariant() for c in self.fpoly.values())

    def truncate(self, order: int) -> "PointedElement":
        bound = order if self.truncation is None else min(order, self.truncation)
        return PointedElement(self.degree, self.fpoly, self.chart, bound)

    def coefficient(self, n: ExponentVector) -> VLaurent:
        return self.fpoly.get(n, VLaurent())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointedElement):
            return NotImplemented
        return (
            self.chart.chart_id == other.chart.chart_id
            and self.degree == other.degree
            and self.fpoly == other.fpoly
        )

    __hash__ = None  # type: ignore[assignment]

    def __str__(self) -> str:
        return format_pointed(self)

    def __repr__(self) -> str:
        return f"PointedElement({format_pointed(self)!r})"


def format_pointed(z: PointedElement) -> str:
    """
    ``deg: {2:-1, 6:1}; F: 1 + y[2] + y[1]*y[2]``.
    """
    pieces: list[str] = []
    for n, c in z.fpoly.items():
        mono = format_monomial(n, "y").replace(" * ", "*")
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
            body = f"{coeff_txt}*{mono}"
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return f"deg: {z.degree}; F: {''.join(pieces)}"


def parse_pointed(text: str, chart: Seed) -> PointedElement:
    """
    Parse the text form produced by :func:`format_pointed`.

    :raises ValueError: On malformed input.
    """
    head, sep, tail = text.partition(";")
    if not sep or not head.strip().startswith("deg:") or not tail.strip().startswith("F:"):
        raise ValueError(f"expected 'deg: ...; F: ...', got {text!r}")
    degree = parse_exponents(head.strip().removeprefix("deg:"))
    parser = TermParser(tail.strip().removeprefix("F:").replace("y[", "x["))
    terms = parser.expression(allow_x=True)
    if parser.peek() is not None:
        raise ValueError(f"trailing input in {text!r}")
    return PointedElement(degree, terms, chart)


class DominanceSolver:
    """
    Solves ``B̃ n = Δ`` exactly for a seed whose p* is injective.

    A maximal set of independent rows of B̃ is inverted once; every solve is then a
    rational matrix-vector product followed by an exact check on all rows.
    """

    def __init__(self, s: Seed) -> None:
        self.seed = s
        self.columns = s.unfrozen
        self.rows: list[Vertex] = []
        self.inverse: list[list[Fraction]] = []
        if not self.columns:
            return
        mat = s.extended_matrix()
        if mat.rank() < len(self.columns):
            raise InjectivityError(f"B̃ has rank {mat.rank()} < {len(self.columns)} unfrozen columns")
        _, pivots = mat.T.rref()
        self.rows = [s.vertices[p] for p in pivots]
        inv = mat.extract(list(pivots), list(range(len(self.columns)))).inv()
        self.inverse = [
            [Fraction(int(sp.fraction(x)[0]), int(sp.fraction(x)[1])) for x in inv.row(r)] for r in range(inv.rows)
        ]

    def solve(self, delta: ExponentVector) -> ExponentVector | None:
        """
        :return: The integral ``n`` with ``B̃ n = delta``, or ``None`` if none exists.
        """
        if not self.columns:
            return ExponentVector() if not delta else None
        rhs = [delta[i] for i in self.rows]
        values: list[tuple[int, int]] = []
        for k, row in zip(self.columns, self.inverse):
            x = sum((a * b for a, b in zip(row, rhs)), Fraction(0))
            if x.denominator != 1:
                return None
            values.append((k, int(x)))
        n = ExponentVector(values)
        if self.seed.p_star(n) != delta:
            return None
        return n


@lru_cache(maxsize=256)
def dominance_solver(s: Seed) -> DominanceSolver:
    """
    :raises InjectivityError: If p* is not injective on the unfrozen lattice.
    """
    return DominanceSolver(s)


def check_injective(s: Seed) -> None:
    dominance_solver(s)


def dominance_leq(m1: ExponentVector, m2: ExponentVector, s: Seed) -> ExponentVector | None:
    """
    The witness ``n ≥ 0`` with ``m1 = m2 + B̃n``, or ``None`` if ``m1`` is not dominated by ``m2``.
    """
    n = dominance_solver(s).solve(m1 - m2)
    if n is None or not n.is_nonnegative():
        return None
    return n


def to_pointed(z: TorusElement, s: Seed | None = None) -> PointedElement:
    """
    Decompose ``z`` as ``x^m (1 + Σ c_n p*(y^n))``.

    A leading coefficient ``v^α`` is normalized away.

    :raises NotPointedError: If no single term dominates all others, or the lead is not a power of v.
    :raises InjectivityError: If p* is not injective.
    """
    s = s or z.chart
    if z.is_zero():
        raise NotPointedError("the zero element is not pointed")
    solver = dominance_solver(s)
    support = z.support()
    for m in support:
        offsets: dict[ExponentVector, VLaurent] = {}
        for other in support:
            n = solver.solve(other - m)
            if n is None or not n.is_nonnegative():
                break
            offsets[n] = z.coefficient(other)
        else:
            try:
                z = normalize(z, m)
            except NotPointedError as exc:
                raise NotPointedError(f"degree {m}: {exc}") from exc
            return PointedElement(m, {n: z.coefficient(m + s.p_star(n)) for n in offsets}, s)
    raise NotPointedError(f"no term of {z} dominates all others")


def pointed_mul(a: PointedElement, b: PointedElement) -> PointedElement:
    """
    The normalized product ``[a * b]``, pointed at ``deg a + deg b``.

    Truncation orders combine by minimum.
    """
    if a.chart.chart_id != b.chart.chart_id:
        raise SimilarityError("pointed factors live in different charts")
    s = a.chart
    bounds = [t for t in (a.truncation, b.truncation) if t is not None]
    bound = min(bounds) if bounds else None
    base = s.pairing(a.degree, b.degree)
    acc: dict[ExponentVector, VLaurent] = {}
    for n1, c1 in a.fpoly.items():
        left = a.degree + s.p_star(n1)
        for n2, c2 in b.fpoly.items():
            key = n1 + n2
            if bound is not None and key.total() > bound:
                continue
            twist = s.pairing(left, b.degree + s.p_star(n2)) - base
            term = (c1 * c2).shift(twist)
            acc[key] = acc[key] + term if key in acc else term
    return PointedElement(a.degree + b.degree, acc, s, bound)


def pointed_power(a: PointedElement, e: int) -> PointedElement:
    result = PointedElement(ExponentVector(), {ExponentVector(): 1}, a.chart, a.truncation)
    for _ in range(e):
        result = pointed_mul(result, a)
    return result


def codegree(z: PointedElement) -> ExponentVector:
    """
    ``m + B̃ n_max`` for a bipointed element.

    :raises NotPointedError: If the F-polynomial has no componentwise maximal key
        or the element is truncated.
    """
    return z.degree + z.chart.p_star(support_dimension(z))


def support_dimension(z: PointedElement) -> ExponentVector:
    if z.truncation is not None:
        raise NotPointedError("codegree is undefined for a truncated element")
    keys = list(z.fpoly)
    top = ExponentVector(
        (k, max(n[k] for n in keys)) for k in {i for n in keys for i in n.support}
    )
    if top not in z.fpoly:
        raise NotPointedError(f"F-polynomial has no maximal term (componentwise max {top} missing)")
    alpha = z.fpoly[top].single_power()
    if alpha is None:
        raise NotPointedError(f"top coefficient {z.fpoly[top]} is not a power of v")
    return top


def freeze_seed(s: Seed, frozen: Iterable[Vertex]) -> Seed:
    """
    Freeze the vertices in ``frozen``; the matrices are kept unchanged.

    :raises FrozenVertexError: If a vertex is already frozen.
    """
    extra = frozenset(frozen)
    for k in sorted(extra):
        if k not in s.vertex_set:
            raise ValueError(f"vertex {k} is not in the seed")
        if k in s.frozen:
            raise FrozenVertexError(k)
    if not extra:
        return s
    return replace(s, frozen=s.frozen | extra)


freeze = freeze_seed


def freeze_element(z: PointedElement, frozen: Iterable[Vertex]) -> PointedElement:
    """
    The freezing operator: keep only the F-terms supported away from ``frozen``.

    The result lives in the frozen seed.
    """
    extra = frozenset(frozen)
    target = freeze_seed(z.chart, extra)
    kept = {n: c for n, c in z.fpoly.items() if not extra.intersection(n.support)}
    return PointedElement(z.degree, kept, target, z.truncation)


def check_similar(src: Seed, dst: Seed) -> None:
    """
    Similarity with the identity permutation: same unfrozen vertices, symmetrizers
    and principal part.

    :raises SimilarityError: Naming the first mismatch.
    """
    if src.unfrozen != dst.unfrozen:
        raise SimilarityError(f"unfrozen sets differ: {list(src.unfrozen)} vs {list(dst.unfrozen)}")
    for i in src.unfrozen:
        if src.d[i] != dst.d[i]:
            raise SimilarityError(f"symmetrizers differ at {i}")
        for j in src.unfrozen:
            if src.b_entry(i, j) != dst.b_entry(i, j):
                raise SimilarityError(f"b_({i},{j}) differs: {src.b_entry(i, j)} vs {dst.b_entry(i, j)}")


def transport_similar(z: PointedElement, src: Seed, dst: Seed, degree: ExponentVector) -> PointedElement:
    """
    The element similar to ``z`` in ``dst`` pointed at ``degree``.

    :param src: The chart of ``z``.
    :raises SimilarityError: If the seeds are not similar or the unfrozen projections disagree.
    """
    if z.chart.chart_id != src.chart_id:
        raise SimilarityError("element does not live in the source seed")
    check_similar(src, dst)
    unfrozen = z.chart.unfrozen
    if degree.restrict(unfrozen) != z.degree.restrict(unfrozen):
        raise SimilarityError(f"degree {degree} does not project to {z.degree.restrict(unfrozen)}")
    if any(i not in dst.vertex_set for i in degree.support):
        raise SimilarityError(f"degree {degree} uses vertices outside the target seed")
    return PointedElement(degree, z.fpoly, dst, z.truncation)


def is_optimized(s: Seed, j: Vertex) -> bool:
    """
    ``b_jk ≥ 0`` for every unfrozen k.

    :raises ValueError: If ``j`` is not frozen.
    """
    if j not in s.frozen:
        raise ValueError(f"vertex {j} is not frozen")
    return all(s.b_entry(j, k) >= 0 for k in s.unfrozen)


def transport_degree(m: ExponentVector, s: Seed, path: Iterable[Vertex]) -> ExponentVector:
    """
    Tropical transport of ``m`` from the chart ``s`` to ``μ_path(s)``.
    """
    for k in path:
        m = tropical_mutate(m, k, s)
        s = mutate(s, k)
    return m


def find_optimizers(s: Seed, max_seeds: int = 200) -> dict[Vertex, MutationSequence]:
    """
    For every frozen j, a shortest mutation sequence to a seed optimizing j.

    Vertices without an optimizer within ``max_seeds`` seeds are left out.
    """
    graph = exchange_graph(s, max_seeds)
    result: dict[Vertex, MutationSequence] = {}
    nodes = sorted(graph.nodes, key=lambda key: len(graph.nodes[key]["path"]))
    for j in s.frozen_vertices:
        for key in nodes:
            if is_optimized(graph.nodes[key]["seed"], j):
                result[j] = graph.nodes[key]["path"]
                break
        else:
            logger.warning("no seed optimizing %d among %d explored", j, graph.number_of_nodes())
    return result


def dominant_representative_test(
    m: ExponentVector, s: Seed, optimizers: Mapping[Vertex, MutationSequence | Iterable[Vertex]]
) -> bool:
    """
    Transport ``m`` along each optimizing sequence and test the frozen coordinate.

    :raises ValueError: If a sequence does not lead to a seed optimizing its vertex.
    """
    for j, path in optimizers.items():
        steps = list(path)
        if not is_optimized(mutate_path(s, steps), j):
            raise ValueError(f"sequence {steps} does not optimize {j}")
        value = transport_degree(m, s, steps)[j]
        logger.debug("frozen %d: transported coordinate %d", j, value)
        if value < 0:
            return False
    return True
