"""
Compatible quantization matrices.

``solve_lambda`` sets up the linear system ``Λ · col_k B̃ = -δ_k e_k`` over the
upper-triangular entries of Λ and solves it exactly with sympy.
``extend_lambda`` carries a solution from a good subseed to a larger seed, and
``lambda_from_weights`` builds Λ from weight pairings for double Bruhat words.
"""

import itertools
import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import networkx as nx
import sympy as sp

from src.errors import QuantizationError
from src.lie_oracle import delta_weights, gamma_weights, weight_pairing
from src.seed import LambdaMatrix, Seed, Vertex, check_compatible, opposite
from src.word_seed import CartanData, SignedWord, build_ddot_seed

logger = logging.getLogger("clusterkit.quantize")

Status = Literal["unique", "not_unique", "no_solution"]

# values tried for free parameters, at most four of them at a time
_SEARCH_VALUES = (0, 1, -1, 2, -2)
_SEARCH_DEPTH = 4


@dataclass(frozen=True)
class CompatibilityProblem:
    """
    :ivar seed: The seed; its Λ (if any) is ignored.
    :ivar deltas: Target ``δ_k`` for every unfrozen k.
    :ivar pinned: Λ entries that must be kept.
    """

    seed: Seed
    deltas: Mapping[Vertex, int]
    pinned: Mapping[tuple[Vertex, Vertex], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for k in self.seed.unfrozen:
            if self.deltas.get(k, 0) <= 0:
                raise ValueError(f"δ_{k} must be a positive integer, got {self.deltas.get(k)}")
        for (i, j), x in self.pinned.items():
            if i == j:
                if x:
                    raise ValueError(f"pinned diagonal Λ_({i},{i}) must be 0")
                continue
            if (j, i) in self.pinned and self.pinned[(j, i)] != -x:
                raise ValueError(f"pinned entries at ({i},{j}) are not skew-symmetric")
            if i not in self.seed.vertex_set or j not in self.seed.vertex_set:
                raise ValueError(f"pinned entry ({i},{j}) outside the index set")


@dataclass(frozen=True)
class QuantizationResult:
    """
    :ivar status: ``unique``, ``not_unique`` or ``no_solution``.
    :ivar seed: The seed with Λ; for ``not_unique`` the first integral solution found
        with small free parameters, zero first (``None`` when the search fails).
    :ivar free_directions: A basis of the homogeneous solutions, as sparse upper-triangular entries.
    """

    status: Status
    seed: Seed | None
    free_directions: tuple[dict[tuple[Vertex, Vertex], Fraction], ...] = ()
    message: str = ""


def _to_fraction(x: sp.Expr) -> Fraction:
    num, den = sp.fraction(x)
    return Fraction(int(num), int(den))


def _integral_point(solution: sp.Matrix, params: sp.Matrix) -> list[Fraction] | None:
    """
    Substitute small values for the first free parameters (the rest stay 0) until
    every entry is an integer.
    """
    symbols = list(params)
    searched = symbols[:_SEARCH_DEPTH]
    for values in itertools.product(_SEARCH_VALUES, repeat=len(searched)):
        assignment = {p: 0 for p in symbols}
        assignment.update(zip(searched, values))
        point = [_to_fraction(x) for x in solution.subs(assignment)]
        if all(x.denominator == 1 for x in point):
            return point
    return None


def solve_lambda(problem: CompatibilityProblem) -> QuantizationResult:
    """
    Find an integral skew-symmetric Λ with ``Λ · col_k B̃ = -δ_k e_k`` honoring the pins.
    """
    s = problem.seed
    verts = s.vertices
    pairs = [(i, j) for idx, i in enumerate(verts) for j in verts[idx + 1 :]]
    index = {p: t for t, p in enumerate(pairs)}
    rows: list[list[int]] = []
    rhs: list[int] = []

    for k in s.unfrozen:
        col = s.column(k)
        for i in verts:
            row = [0] * len(pairs)
            for j, bjk in col.items():
                if i < j:
                    row[index[(i, j)]] += bjk
                elif i > j:
                    row[index[(j, i)]] -= bjk
            target = -problem.deltas[k] if i == k else 0
            if not any(row):
                if target:
                    return QuantizationResult("no_solution", None, message=f"row {i} of Λ·col_{k} is identically 0")
                continue
            rows.append(row)
            rhs.append(target)
    for (i, j), x in problem.pinned.items():
        if i == j:
            continue
        row = [0] * len(pairs)
        if i < j:
            row[index[(i, j)]] = 1
            rhs.append(x)
        else:
            row[index[(j, i)]] = 1
            rhs.append(-x)
        rows.append(row)

    if not pairs:
        return QuantizationResult("unique", s.with_lambda({}))
    if not rows:
        directions = tuple({p: Fraction(1)} for p in pairs)
        return QuantizationResult("not_unique", s.with_lambda({}), directions, "no constraints")

    a = sp.Matrix(rows)
    b = sp.Matrix(rhs)
    try:
        solution, params = a.gauss_jordan_solve(b)
    except ValueError:
        logger.info("compatibility system with %d equations has no solution", len(rows))
        return QuantizationResult("no_solution", None, message="linear system is inconsistent")

    if params.shape[0]:
        values = _integral_point(solution, params)
    else:
        values = [_to_fraction(x) for x in solution]
        if any(x.denominator != 1 for x in values):
            values = None
    lam: LambdaMatrix | None = None
    if values is not None:
        lam = {pair: int(x) for pair, x in zip(pairs, values) if x}
    if not params.shape[0]:
        if lam is None:
            return QuantizationResult("no_solution", None, message="the unique solution is not integral")
        return QuantizationResult("unique", s.with_lambda(lam))

    directions = tuple(
        {pair: _to_fraction(x) for pair, x in zip(pairs, vec) if x != 0} for vec in a.nullspace()
    )
    logger.info("compatibility system is under-determined: %d free directions", len(directions))
    return QuantizationResult(
        "not_unique",
        None if lam is None else s.with_lambda(lam),
        directions,
        f"{len(directions)} free parameters",
    )


def find_compatible_lambda(s: Seed) -> Seed:
    """
    Try ``δ_k = c·d_k`` for ``c`` in 1, 2, 3, 4, 6 and return the first integral solution
    (free parameters searched from zero).

    :raises QuantizationError: If none is found.
    """
    for c in (1, 2, 3, 4, 6):
        result = solve_lambda(CompatibilityProblem(s, {k: c * s.d[k] for k in s.unfrozen}))
        if result.seed is not None and result.status != "no_solution":
            logger.debug("compatible Λ found with δ = %d·d", c)
            return result.seed
    raise QuantizationError("no integral compatible Λ with δ proportional to d", hypothesis="solvable")


def _is_connected(s: Seed, vertices: tuple[Vertex, ...]) -> bool:
    if len(vertices) <= 1:
        return True
    graph = nx.Graph()
    graph.add_nodes_from(vertices)
    graph.add_edges_from((i, j) for (i, j) in s.b if i in graph and j in graph)
    return nx.is_connected(graph)


def extend_lambda(sub: Seed, sup: Seed, deltas: Mapping[Vertex, int] | int | None = None) -> Seed:
    """
    Extend the compatible Λ of ``sub`` to ``sup``, keeping ``Λ' = Λ`` on ``I × I``.

    Hypotheses checked, in order: good subseed, ``I'_uf = I``, connectivity of both
    unfrozen blocks, full rank of ``B̃'_{I3,I2}`` (``I3`` the new vertices, ``I2`` the
    frozen vertices of ``sub``), and uniqueness of the solution.

    :param deltas: Targets for the unfrozen vertices of ``sup``; an int means a uniform
        value, ``None`` reuses the (uniform) δ of ``sub``.
    :raises QuantizationError: Naming the failing hypothesis.
    """
    from src.tower import check_good_subseed

    if sub.lam is None:
        raise QuantizationError("the subseed carries no Λ", hypothesis="quantum")
    if sup.vertices == sub.vertices and sup.frozen == sub.frozen and sup.b == sub.b:
        return sup.with_lambda(sub.lam)
    ok, clause = check_good_subseed(sub, sup.with_lambda(None), quantum=False)
    if not ok:
        raise QuantizationError(f"not a good subseed: {clause}", hypothesis="good_subseed")
    if set(sup.unfrozen) != set(sub.vertices):
        raise QuantizationError("unfrozen vertices of the larger seed must equal the smaller index set", hypothesis="partition")
    if not _is_connected(sup, sup.unfrozen):
        raise QuantizationError("B̃' on unfrozen vertices is not connected", hypothesis="connected_sup")
    if not _is_connected(sub, sub.unfrozen):
        raise QuantizationError("B̃ on unfrozen vertices is not connected", hypothesis="connected_sub")
    new = [i for i in sup.vertices if i not in sub.vertex_set]
    old_frozen = sub.frozen_vertices
    block = sp.Matrix([[sp.Rational(sup.b_entry(i, k).numerator, sup.b_entry(i, k).denominator) for k in old_frozen] for i in new])
    if new and old_frozen and block.rank() < min(len(new), len(old_frozen)):
        raise QuantizationError("B̃'_{I3,I2} is not of full rank", hypothesis="full_rank")

    match deltas:
        case int():
            targets = {k: deltas for k in sup.unfrozen}
        case None:
            known = set(check_compatible(sub).values())
            if len(known) != 1:
                raise QuantizationError("δ of the subseed is not uniform; pass explicit targets", hypothesis="deltas")
            targets = {k: known.pop() for k in sup.unfrozen}
        case _:
            targets = dict(deltas)

    verts = sub.vertices
    pinned = {(i, j): sub.lam_entry(i, j) for idx, i in enumerate(verts) for j in verts[idx + 1 :]}
    result = solve_lambda(CompatibilityProblem(sup, targets, pinned))
    if result.status != "unique" or result.seed is None:
        raise QuantizationError(f"extension is {result.status}: {result.message}", hypothesis="unique")
    logger.debug("extended Λ from %d to %d vertices", len(sub.vertices), len(sup.vertices))
    return result.seed


def lambda_from_weights(word: SignedWord, cartan: CartanData, coxeter: tuple[int, ...] | None = None) -> Seed:
    """
    The quantum seed ``ddot(i)^op`` with ``Λ_kj = (γ_k, γ_j) - (δ_k, δ_j)`` for ``k > j``.

    The word is assumed reduced for its pair of Weyl group elements.

    :raises QuantizationError: If a pairing difference is not integral.
    """
    seed = opposite(build_ddot_seed(word, cartan, coxeter))
    gammas = gamma_weights(word, cartan, coxeter)
    deltas = delta_weights(word, cartan, coxeter)
    lam: LambdaMatrix = {}
    for idx, j in enumerate(seed.vertices):
        for k in seed.vertices[idx + 1 :]:
            value = weight_pairing(cartan, gammas[k], gammas[j]) - weight_pairing(cartan, deltas[k], deltas[j])
            if value.denominator != 1:
                raise QuantizationError(f"Λ_({k},{j}) = {value} is not integral", hypothesis="integral")
            if value:
                lam[(k, j)] = int(value)
    return seed.with_lambda(lam)
