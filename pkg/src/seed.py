"""
Seeds and mutations.

A :class:`Seed` stores the index set, the frozen vertices, the skew-symmetrizers,
the full square exchange matrix (sparse, rational) and an optional quantization
matrix Λ. Seeds are immutable; every mutation returns a new seed.
"""

import hashlib
import json
import logging
from collections import deque
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property

import networkx as nx
import sympy as sp

from src.errors import ChartMismatchError, FrozenVertexError, IncompatibleSeedError, NotDivisibleError, NotLaurentError
from src.laurent import VLaurent
from src.torus import ExponentVector, TorusElement, exact_divide, twisted_mul

logger = logging.getLogger("clusterkit.seed")

Vertex = int
BMatrix = dict[tuple[Vertex, Vertex], Fraction]
LambdaMatrix = dict[tuple[Vertex, Vertex], int]


def _pos(x: Fraction | int) -> Fraction | int:
    return x if x > 0 else 0


@dataclass(frozen=True, eq=False)
class Seed:
    """
    A (classical or quantum) seed.

    :ivar vertices: The index set I, ascending.
    :ivar frozen: The frozen vertices I_f.
    :ivar d: Positive skew-symmetrizers d_i.
    :ivar b: Nonzero entries ``(i, j) -> b_ij`` of the full square matrix.
    :ivar lam: Nonzero entries of Λ in both orientations, or ``None`` for a classical seed.
    """

    vertices: tuple[Vertex, ...]
    frozen: frozenset[Vertex]
    d: Mapping[Vertex, int]
    b: Mapping[tuple[Vertex, Vertex], Fraction]
    lam: Mapping[tuple[Vertex, Vertex], int] | None = field(default=None)

    def __post_init__(self) -> None:
        vertices = tuple(sorted(set(int(i) for i in self.vertices)))
        vset = frozenset(vertices)
        frozen = frozenset(int(i) for i in self.frozen)
        if not frozen <= vset:
            raise ValueError(f"frozen vertices {sorted(frozen - vset)} are not in the index set")
        d = {int(i): int(x) for i, x in self.d.items() if int(i) in vset}
        for i in vertices:
            d.setdefault(i, 1)
            if d[i] <= 0:
                raise ValueError(f"symmetrizer d_{i} = {d[i]} is not positive")

        b: BMatrix = {}
        for (i, j), x in self.b.items():
            if i not in vset or j not in vset:
                raise ValueError(f"b-entry ({i},{j}) outside the index set")
            value = Fraction(x)
            if value:
                b[(int(i), int(j))] = value
        for (i, j), x in b.items():
            if i == j:
                raise ValueError(f"diagonal entry b_{i}{i} must vanish")
            if d[i] * x != -d[j] * b.get((j, i), Fraction(0)):
                raise ValueError(f"d_{i} b_({i},{j}) != -d_{j} b_({j},{i}): not skew-symmetrizable")
            if j not in frozen and x.denominator != 1:
                raise ValueError(f"b_({i},{j}) = {x} must be an integer in the unfrozen column {j}")

        lam: LambdaMatrix | None = None
        if self.lam is not None:
            lam = {}
            for (i, j), x in self.lam.items():
                if i not in vset or j not in vset:
                    raise ValueError(f"Λ-entry ({i},{j}) outside the index set")
                value = int(x)
                if value != x:
                    raise ValueError(f"Λ_({i},{j}) = {x} is not an integer")
                if i == j and value:
                    raise ValueError(f"diagonal entry Λ_{i}{i} must vanish")
                if not value:
                    continue
                for key, entry in (((i, j), value), ((j, i), -value)):
                    if lam.get(key, entry) != entry:
                        raise ValueError(f"Λ is not skew-symmetric at ({i},{j})")
                    lam[key] = entry

        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "frozen", frozen)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "lam", lam)

    @cached_property
    def vertex_set(self) -> frozenset[Vertex]:
        return frozenset(self.vertices)

    @cached_property
    def unfrozen(self) -> tuple[Vertex, ...]:
        return tuple(i for i in self.vertices if i not in self.frozen)

    @property
    def frozen_vertices(self) -> tuple[Vertex, ...]:
        return tuple(i for i in self.vertices if i in self.frozen)

    @property
    def is_quantum(self) -> bool:
        return self.lam is not None

    def is_frozen(self, i: Vertex) -> bool:
        return i in self.frozen

    def b_entry(self, i: Vertex, j: Vertex) -> Fraction:
        return self.b.get((i, j), Fraction(0))

    def lam_entry(self, i: Vertex, j: Vertex) -> int:
        if self.lam is None:
            return 0
        return self.lam.get((i, j), 0)

    def column(self, k: Vertex) -> ExponentVector:
        """
        The k-th column of B̃, i.e. the degree ``p*(e_k)``.

        :raises FrozenVertexError: If ``k`` is frozen (its column may be fractional).
        """
        if k in self.frozen:
            raise FrozenVertexError(k)
        return self._columns[k]

    @cached_property
    def _columns(self) -> dict[Vertex, ExponentVector]:
        cols: dict[Vertex, list[tuple[int, int]]] = {k: [] for k in self.unfrozen}
        for (i, j), x in self.b.items():
            if j in cols:
                cols[j].append((i, int(x)))
        return {k: ExponentVector(entries) for k, entries in cols.items()}

    def p_star(self, n: ExponentVector) -> ExponentVector:
        """
        ``B̃ n`` for ``n`` supported on unfrozen vertices.
        """
        total = ExponentVector()
        for k, c in n.items():
            total = total + self.column(k) * c
        return total

    def pairing(self, m: ExponentVector, n: ExponentVector) -> int:
        """
        The bilinear form ``λ(m, n) = mᵀ Λ n``; identically zero for a classical seed.
        """
        if not self.lam:
            return 0
        lam = self.lam
        return sum(a * c * lam.get((i, j), 0) for i, a in m.items() for j, c in n.items())

    def extended_matrix(self) -> sp.Matrix:
        """
        B̃ as a sympy matrix with rows ``vertices`` and columns ``unfrozen``.
        """
        return sp.Matrix(
            [[sp.Rational(self.b_entry(i, k).numerator, self.b_entry(i, k).denominator) for k in self.unfrozen] for i in self.vertices]
        )

    def lambda_matrix(self) -> sp.Matrix:
        return sp.Matrix([[self.lam_entry(i, j) for j in self.vertices] for i in self.vertices])

    def with_lambda(self, lam: Mapping[tuple[Vertex, Vertex], int] | None) -> "Seed":
        return replace(self, lam=lam)

    def canonical(self) -> dict:
        """
        JSON-ready canonical form; entries sorted by (i, j), Λ kept above the diagonal.
        """
        data: dict = {
            "vertices": list(self.vertices),
            "frozen": sorted(self.frozen),
            "d": {str(i): self.d[i] for i in self.vertices},
            "b": [[i, j, x.numerator, x.denominator] for (i, j), x in sorted(self.b.items())],
        }
        if self.lam is not None:
            data["lambda"] = [[i, j, x] for (i, j), x in sorted(self.lam.items()) if i < j]
        return data

    @cached_property
    def chart_id(self) -> str:
        payload = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha1(payload.encode()).hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Seed):
            return NotImplemented
        return self.chart_id == other.chart_id

    def __hash__(self) -> int:
        return hash(self.chart_id)

    def __str__(self) -> str:
        lines = [
            f"{'vertices:':<12} {list(self.vertices)}",
            f"{'frozen:':<12} {sorted(self.frozen)}",
            f"{'quantum:':<12} {self.is_quantum}",
            f"{'chart:':<12} {self.chart_id[:12]}",
        ]
        for k in self.unfrozen:
            lines.append(f"  col {k}: {self.column(k)}")
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"Seed(|I|={len(self.vertices)}, |I_uf|={len(self.unfrozen)}, quantum={self.is_quantum})"


@dataclass(frozen=True)
class MutationSequence:
    """
    A sequence of mutation vertices, applied left to right.
    """

    steps: tuple[Vertex, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(int(k) for k in self.steps))

    def __iter__(self) -> Iterator[Vertex]:
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __add__(self, other: "MutationSequence") -> "MutationSequence":
        return MutationSequence(self.steps + other.steps)

    def reversed(self) -> "MutationSequence":
        return MutationSequence(tuple(reversed(self.steps)))

    def __str__(self) -> str:
        return "μ(" + ",".join(str(k) for k in self.steps) + ")"


def check_compatible(s: Seed) -> dict[Vertex, int]:
    """
    Verify ``Λ · col_k B̃ = -δ_k e_k`` for every unfrozen k.

    :return: The map ``k -> δ_k``.
    :raises IncompatibleSeedError: Naming the first violating ``(i, k)``.
    """
    if s.lam is None:
        raise IncompatibleSeedError("seed carries no quantization matrix")
    deltas: dict[Vertex, int] = {}
    for k in s.unfrozen:
        col = s.column(k)
        for i in s.vertices:
            value = s.pairing(ExponentVector.basis(i), col)
            if i == k:
                if value >= 0:
                    raise IncompatibleSeedError(f"λ(f_{k}, p*e_{k}) = {value} is not negative", row=i, column=k)
                deltas[k] = -value
            elif value:
                raise IncompatibleSeedError(f"λ(f_{i}, p*e_{k}) = {value}, expected 0", row=i, column=k)
    return deltas


def _require_unfrozen(s: Seed, k: Vertex) -> None:
    if k not in s.vertex_set:
        raise ValueError(f"vertex {k} is not in the seed")
    if k in s.frozen:
        raise FrozenVertexError(k)


def _mutated_b(s: Seed, k: Vertex) -> BMatrix:
    col_k = {i: x for (i, j), x in s.b.items() if j == k}
    row_k = {j: x for (i, j), x in s.b.items() if i == k}
    b: BMatrix = {key: x for key, x in s.b.items() if k not in key}
    for i, x in col_k.items():
        b[(i, k)] = -x
    for j, x in row_k.items():
        b[(k, j)] = -x
    for i, bik in col_k.items():
        for j, bkj in row_k.items():
            delta = _pos(bik) * _pos(bkj) - _pos(-bik) * _pos(-bkj)
            if delta:
                b[(i, j)] = b.get((i, j), Fraction(0)) + delta
    return b


def mutate_bmatrix(s: Seed, k: Vertex) -> Seed:
    """
    Matrix mutation at an unfrozen vertex; the result is classical (Λ dropped).

    :raises FrozenVertexError: If ``k`` is frozen.
    """
    _require_unfrozen(s, k)
    return replace(s, b=_mutated_b(s, k), lam=None)


def psi_image(s: Seed, k: Vertex) -> ExponentVector:
    """
    ``-f_k + Σ_j [-b_jk]_+ f_j``, the image of f_k under the linear part of the mutation.
    """
    return ExponentVector.basis(k, -1) + s.column(k).negative_part()


def mutate_lambda(s: Seed, k: Vertex) -> Seed:
    """
    Full quantum mutation: ``B̃ ↦ μ_k B̃`` and ``Λ ↦ Ψᵀ Λ Ψ``.

    :raises FrozenVertexError: If ``k`` is frozen.
    :raises ValueError: If ``s`` is classical.
    """
    _require_unfrozen(s, k)
    if s.lam is None:
        raise ValueError("mutate_lambda needs a quantum seed")
    image = psi_image(s, k)
    lam: LambdaMatrix = {key: x for key, x in s.lam.items() if k not in key}
    for j in s.vertices:
        if j == k:
            continue
        value = s.pairing(image, ExponentVector.basis(j))
        if value:
            lam[(k, j)] = value
            lam[(j, k)] = -value
    return Seed(s.vertices, s.frozen, s.d, _mutated_b(s, k), lam)


def mutate(s: Seed, k: Vertex) -> Seed:
    """
    Mutate ``s`` at ``k``, carrying Λ along when present.
    """
    result = mutate_lambda(s, k) if s.is_quantum else mutate_bmatrix(s, k)
    logger.debug("mutated at %d -> chart %s", k, result.chart_id[:8])
    return result


def mutate_path(s: Seed, path: MutationSequence | Iterable[Vertex]) -> Seed:
    for k in path:
        s = mutate(s, k)
    return s


def _ordered_monomial(s: Seed, variables: Mapping[Vertex, TorusElement], p: ExponentVector) -> TorusElement:
    """
    The element corresponding to ``x^p`` (p ≥ 0) of ``s``, built from ``variables``
    as ``v^{-Σ_{a<b} p_a p_b Λ_ab}`` times the ordered product.
    """
    reference = next(iter(variables.values())).chart
    result = TorusElement.one(reference)
    for i, e in p.items():
        result = twisted_mul(result, variables[i] ** e)
    entries = list(p.items())
    twist = sum(
        pa * pb * s.lam_entry(a, b) for idx, (a, pa) in enumerate(entries) for b, pb in entries[idx + 1 :]
    )
    return result.scale(VLaurent.monomial(-twist)) if twist else result


def mutate_variables(s: Seed, k: Vertex, variables: Mapping[Vertex, TorusElement]) -> dict[Vertex, TorusElement]:
    """
    Apply the exchange relation at ``k``.

    ``variables`` holds the cluster variables of ``s`` written in a fixed reference
    chart; the new variable ``x'_k = x^{-f_k + Σ[-b_jk]_+ f_j} + x^{-f_k + Σ[b_ik]_+ f_i}``
    is evaluated through them and exact-divided by ``variables[k]``.

    :raises FrozenVertexError: If ``k`` is frozen.
    :raises NotLaurentError: If the division fails (inconsistent input).
    """
    _require_unfrozen(s, k)
    col = s.column(k)
    fk = ExponentVector.basis(k)
    binomial = None
    for p in (col.negative_part(), col.positive_part()):
        term = _ordered_monomial(s, variables, p).scale(VLaurent.monomial(s.pairing(p, fk)))
        binomial = term if binomial is None else binomial + term
    assert binomial is not None
    try:
        new_k = exact_divide(binomial, variables[k])
    except NotDivisibleError as exc:
        raise NotLaurentError(f"exchange binomial at {k} is not divisible by x_{k}: {exc}") from exc
    result = dict(variables)
    result[k] = new_k
    return result


def initial_variables(s: Seed) -> dict[Vertex, TorusElement]:
    """
    The cluster variables of ``s`` in its own chart.
    """
    return {i: TorusElement.variable(s, i) for i in s.vertices}


def exchange_binomial(s_new: Seed, k: Vertex) -> TorusElement:
    """
    The old variable ``x_k`` written in the chart ``s_new = μ_k s``.
    """
    col = s_new.column(k)
    fk = ExponentVector.basis(k, -1)
    return TorusElement({fk + col.negative_part(): 1, fk + col.positive_part(): 1}, s_new)


def _change_chart_step(z: TorusElement, s: Seed, k: Vertex) -> TorusElement:
    s_new = mutate(s, k)
    old_xk = exchange_binomial(s_new, k)
    fk = ExponentVector.basis(k)
    shift = max(0, -min(m[k] for m in z.support())) if not z.is_zero() else 0
    lifted = twisted_mul(z, TorusElement.monomial(s, fk * shift)) if shift else z

    powers: dict[int, TorusElement] = {0: TorusElement.one(s_new)}
    image = TorusElement.zero(s_new)
    for m, c in lifted.items():
        e = m[k]
        rest = m - fk * e
        if e not in powers:
            powers[e] = old_xk ** e
        coeff = c.shift(-s.pairing(rest, fk * e))
        image = image + twisted_mul(TorusElement.monomial(s_new, rest, coeff), powers[e])
    if not shift:
        return image
    try:
        return exact_divide(image, old_xk ** shift)
    except NotDivisibleError as exc:
        raise NotLaurentError(f"element is not Laurent in the chart mutated at {k}") from exc


def change_chart(z: TorusElement, path: MutationSequence | Iterable[Vertex], s: Seed) -> TorusElement:
    """
    Rewrite ``z`` (an element in the chart ``s``) in the chart ``μ_path(s)``.

    :raises ChartMismatchError: If ``z`` does not live in ``s``.
    :raises NotLaurentError: If the image leaves the Laurent ring of some intermediate chart.
    """
    if z.chart.chart_id != s.chart_id:
        raise ChartMismatchError("element does not live in the given seed")
    current = s
    for k in path:
        _require_unfrozen(current, k)
        z = _change_chart_step(z, current, k)
        current = mutate(current, k)
        logger.debug("changed chart at %d, %d terms", k, len(z))
    return z


def tropical_mutate(m: ExponentVector, k: Vertex, s: Seed) -> ExponentVector:
    """
    The piecewise-linear tropical mutation at ``k`` read off the seed ``s``.
    """
    _require_unfrozen(s, k)
    mk = m[k]
    entries = dict(m.items())
    entries[k] = -mk
    for i, bik in s.column(k).items():
        if i == k:
            continue
        entries[i] = entries.get(i, 0) + _pos(bik) * _pos(mk) - _pos(-bik) * _pos(-mk)
    return ExponentVector(entries)


def cluster_variable_degree(s: Seed, path: MutationSequence | Iterable[Vertex], i: Vertex) -> ExponentVector:
    """
    The degree in the chart ``s`` of the cluster variable ``x_i(μ_path s)``, by
    transporting ``f_i`` tropically back along the path.
    """
    seeds = [s]
    steps = list(path)
    for k in steps:
        seeds.append(mutate(seeds[-1], k))
    m = ExponentVector.basis(i)
    for t in range(len(steps), 0, -1):
        m = tropical_mutate(m, steps[t - 1], seeds[t])
    return m


def opposite(s: Seed) -> Seed:
    """
    The opposite seed: ``B̃ ↦ -B̃`` and ``Λ ↦ -Λ``.
    """
    lam = None if s.lam is None else {key: -x for key, x in s.lam.items()}
    return replace(s, b={key: -x for key, x in s.b.items()}, lam=lam)


def principal_seed(s: Seed) -> tuple[Seed, dict[Vertex, ExponentVector]]:
    """
    The seed of principal coefficients and its variation map.

    Each unfrozen k gets a frozen copy ``k'`` with ``b_{k'k} = 1``; the frozen
    vertices of ``s`` are dropped. The variation map sends ``f_k ↦ f_k`` and
    ``f_{k'} ↦ Σ_{j frozen} b_jk f_j``; Λ is pulled back along it.

    :return: ``(s_prin, var)`` with ``var`` mapping each vertex of ``s_prin`` to a degree of ``s``.
    """
    offset = max(s.vertices) + 1
    copies = {k: offset + idx for idx, k in enumerate(s.unfrozen)}
    vertices = list(s.unfrozen) + list(copies.values())
    b: BMatrix = {
        (i, j): x for (i, j), x in s.b.items() if i not in s.frozen and j not in s.frozen
    }
    d = {k: s.d[k] for k in s.unfrozen}
    for k, kp in copies.items():
        b[(kp, k)] = Fraction(1)
        b[(k, kp)] = Fraction(-1)
        d[kp] = s.d[k]

    var: dict[Vertex, ExponentVector] = {k: ExponentVector.basis(k) for k in s.unfrozen}
    for k, kp in copies.items():
        var[kp] = s.column(k).restrict(s.frozen)

    lam: LambdaMatrix | None = None
    if s.lam is not None:
        lam = {}
        for a in vertices:
            for c in vertices:
                if a < c:
                    value = s.pairing(var[a], var[c])
                    if value:
                        lam[(a, c)] = value
    return Seed(tuple(vertices), frozenset(copies.values()), d, b, lam), var


def apply_variation(var: Mapping[Vertex, ExponentVector], m: ExponentVector) -> ExponentVector:
    total = ExponentVector()
    for i, c in m.items():
        total = total + var[i] * c
    return total


def permute(s: Seed, sigma: Mapping[Vertex, Vertex]) -> Seed:
    """
    Relabel vertices by ``i ↦ sigma(i)`` (vertices missing from ``sigma`` are fixed).
    """
    def relabel(i: Vertex) -> Vertex:
        return sigma.get(i, i)

    if len({relabel(i) for i in s.vertices}) != len(s.vertices):
        raise ValueError("relabeling is not injective")
    lam = None if s.lam is None else {(relabel(i), relabel(j)): x for (i, j), x in s.lam.items()}
    return Seed(
        tuple(relabel(i) for i in s.vertices),
        frozenset(relabel(i) for i in s.frozen),
        {relabel(i): x for i, x in s.d.items()},
        {(relabel(i), relabel(j)): x for (i, j), x in s.b.items()},
        lam,
    )


def permute_degree(m: ExponentVector, sigma: Mapping[Vertex, Vertex]) -> ExponentVector:
    """
    ``(σm)_{σi} = m_i``.
    """
    return ExponentVector((sigma.get(i, i), x) for i, x in m.items())


def restrict_seed(s: Seed, vertices: Iterable[Vertex], frozen: Iterable[Vertex] | None = None) -> Seed:
    """
    The full subseed on ``vertices``; ``frozen`` defaults to the old frozen set
    intersected with the new index set.
    """
    keep = frozenset(vertices)
    new_frozen = frozenset(frozen) if frozen is not None else s.frozen & keep
    lam = None if s.lam is None else {(i, j): x for (i, j), x in s.lam.items() if i in keep and j in keep}
    return Seed(
        tuple(keep),
        new_frozen,
        {i: s.d[i] for i in keep},
        {(i, j): x for (i, j), x in s.b.items() if i in keep and j in keep},
        lam,
    )


def exchange_key(s: Seed) -> tuple:
    """
    Identity of a seed in the exchange graph: the exact extended matrix.
    """
    return tuple(sorted((i, k, s.b_entry(i, k)) for k in s.unfrozen for i in s.vertices if s.b_entry(i, k)))


def exchange_graph(s: Seed, max_seeds: int = 200) -> nx.Graph:
    """
    Breadth-first exploration of the exchange graph, deduplicated by the extended matrix.

    Nodes carry ``seed`` and ``path`` (a :class:`MutationSequence` from ``s``);
    edges carry the mutation vertex ``k``.
    """
    graph = nx.Graph()
    root = exchange_key(s)
    graph.add_node(root, seed=s, path=MutationSequence())
    queue = deque([root])
    while queue:
        key = queue.popleft()
        seed: Seed = graph.nodes[key]["seed"]
        path: MutationSequence = graph.nodes[key]["path"]
        for k in seed.unfrozen:
            nxt = mutate_bmatrix(seed, k)
            nkey = exchange_key(nxt)
            if nkey not in graph:
                if graph.number_of_nodes() >= max_seeds:
                    continue
                graph.add_node(nkey, seed=nxt, path=path + MutationSequence((k,)))
                queue.append(nkey)
            graph.add_edge(key, nkey, k=k)
    logger.info("exchange graph: %d seeds, %d edges", graph.number_of_nodes(), graph.number_of_edges())
    return graph
