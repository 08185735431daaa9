"""
Good-subseed chains.

A :class:`SeedTower` is a list of finite truncations of an infinite-rank seed,
each a good subseed of the next. Windowed computations run stage by stage until
two consecutive stages agree on the window.
"""

import logging
from collections.abc import Callable, Hashable, Iterator, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from src.errors import ClusterKitError, QuantizationError, SubseedError
from src.pointed import PointedElement, check_injective
from src.quantization import CompatibilityProblem, extend_lambda, find_compatible_lambda, solve_lambda
from src.seed import BMatrix, LambdaMatrix, Seed, Vertex
from src.torus import ExponentVector
from src.triangular import InitialFamily, kl_correct
from src.word_seed import CartanData, SignedWord, build_dot_seed, fundamental_variable

logger = logging.getLogger("clusterkit.tower")

StageQuery = Callable[[Seed], Hashable | None]


def check_good_subseed(sub: Seed, sup: Seed, quantum: bool = True) -> tuple[bool, str]:
    """
    Check that ``sub`` is a good subseed of ``sup``.

    Clauses, in order: ``index_set``, ``unfrozen``, ``symmetrizers``, ``matrix``
    (``B̃ = B̃'`` on ``I × I_uf``), ``isolation`` (``b'_jk = 0`` for new ``j`` and
    unfrozen ``k``) and, when ``quantum`` and both seeds carry Λ, ``lambda``.

    :return: ``(True, "")`` or ``(False, diagnostic)`` naming the first violated clause.
    """
    if not sub.vertex_set <= sup.vertex_set:
        return False, f"index_set: {sorted(sub.vertex_set - sup.vertex_set)} missing from the larger seed"
    missing = [k for k in sub.unfrozen if sup.is_frozen(k)]
    if missing:
        return False, f"unfrozen: {missing} are frozen in the larger seed"
    for i in sub.vertices:
        if sub.d[i] != sup.d[i]:
            return False, f"symmetrizers: d_{i} differs ({sub.d[i]} vs {sup.d[i]})"
    for k in sub.unfrozen:
        for i in sub.vertices:
            if sub.b_entry(i, k) != sup.b_entry(i, k):
                return False, f"matrix: ({i},{k}) is {sub.b_entry(i, k)} vs {sup.b_entry(i, k)}"
        for j in sup.vertices:
            if j not in sub.vertex_set and sup.b_entry(j, k):
                return False, f"isolation: ({j},{k}) = {sup.b_entry(j, k)}"
    if quantum and sub.lam is not None and sup.lam is not None:
        for idx, i in enumerate(sub.vertices):
            for j in sub.vertices[idx + 1 :]:
                if sub.lam_entry(i, j) != sup.lam_entry(i, j):
                    return False, f"lambda: ({i},{j}) is {sub.lam_entry(i, j)} vs {sup.lam_entry(i, j)}"
    return True, ""


def require_good_subseed(sub: Seed, sup: Seed, quantum: bool = True) -> None:
    """
    :raises SubseedError: With the violated clause.
    """
    ok, diagnostic = check_good_subseed(sub, sup, quantum)
    if not ok:
        clause, _, _ = diagnostic.partition(":")
        raise SubseedError(f"not a good subseed: {diagnostic}", clause=clause)


@dataclass
class SeedTower:
    """
    :ivar stages: Seeds ``s_0, s_1, ...``.
    :ivar embeddings: Vertex inclusion of stage ``r`` into stage ``r + 1``.
    :ivar rule: How the stages were generated.
    """

    stages: list[Seed] = field(default_factory=list)
    embeddings: list[dict[Vertex, Vertex]] = field(default_factory=list)
    rule: str = "custom"

    def __len__(self) -> int:
        return len(self.stages)

    def __iter__(self) -> Iterator[Seed]:
        return iter(self.stages)

    def __getitem__(self, r: int) -> Seed:
        return self.stages[r]

    def append(self, s: Seed) -> None:
        """
        :raises SubseedError: If the last stage is not a good subseed of ``s``.
        """
        if self.stages:
            require_good_subseed(self.stages[-1], s)
            self.embeddings.append({i: i for i in self.stages[-1].vertices})
        self.stages.append(s)
        logger.debug("tower stage %d: %d vertices", len(self.stages) - 1, len(s.vertices))

    def validate(self) -> None:
        for lower, upper in zip(self.stages, self.stages[1:]):
            require_good_subseed(lower, upper)

    def __str__(self) -> str:
        lines = [f"{'rule:':<16} {self.rule}", f"{'stages:':<16} {len(self.stages)}"]
        for r, s in enumerate(self.stages):
            lines.append(f"{f'stage {r}:':<16} [{s.vertices[0]}, {s.vertices[-1]}] frozen {sorted(s.frozen)}")
        return "\n".join(lines)


def ghl_a1_b(i: Vertex, j: Vertex) -> int:
    """
    The bi-infinite A₁ exchange matrix: ``col_0 = e_{-1} + e_1``, ``col_1 = -e_0 - e_2``
    and ``col_j = e_{j-1} - e_{j+1}`` otherwise.
    """
    match j:
        case 0:
            return 1 if i in (-1, 1) else 0
        case 1:
            return -1 if i in (0, 2) else 0
        case _:
            return 1 if i == j - 1 else -1 if i == j + 1 else 0


def ghl_a1_lambda_entry(i: Vertex, j: Vertex) -> int:
    """
    Closed form of the compatible Λ of the A₁ seed with all δ = 2.

    Entries vanish unless ``j - i`` is odd; then ``Λ_0j = -1``, for ``i < 0``
    ``Λ_ij = 1`` exactly when ``i < j ≤ 0`` and for ``i > 0`` ``Λ_ij = -1`` exactly
    when ``0 < j < i``.
    """
    if (j - i) % 2 == 0:
        return 0
    if i == 0:
        return -1
    if i < 0:
        return 1 if i < j <= 0 else -1
    return -1 if 0 < j < i else 1


def ghl_a1_seed(r: int, quantum: bool = False) -> Seed:
    """
    Stage ``r``: the window ``[-1-r, 1+r]`` with both ends frozen.
    """
    if r < 0:
        raise ValueError(f"radius must be nonnegative, got {r}")
    window = range(-1 - r, 2 + r)
    b: BMatrix = {(i, j): Fraction(ghl_a1_b(i, j)) for i in window for j in window if ghl_a1_b(i, j)}
    lam: LambdaMatrix | None = None
    if quantum:
        lam = {(i, j): ghl_a1_lambda_entry(i, j) for i in window for j in window if i < j and ghl_a1_lambda_entry(i, j)}
    return Seed(tuple(window), frozenset({window[0], window[-1]}), {}, b, lam)


def build_interval_tower(
    rule: str,
    radius: int,
    word: SignedWord | None = None,
    cartan: CartanData | None = None,
) -> SeedTower:
    """
    Truncations of an infinite-rank seed, validated stage to stage.

    ``ghl-a1`` builds the windows ``[-1-r, 1+r]``; ``word`` builds ``dot`` of the
    prefixes of length ``(r + 1)·|word|`` of the periodic word ``word^∞``, whose last
    occurrences are frozen.

    :raises ValueError: On an unknown rule or missing word data.
    :raises SubseedError: If a stage is not a good subseed of the next.
    """
    if radius < 0:
        raise ValueError(f"radius must be nonnegative, got {radius}")
    tower = SeedTower(rule=rule)
    match rule:
        case "ghl-a1":
            for r in range(radius + 1):
                tower.append(ghl_a1_seed(r))
        case "word":
            if word is None or cartan is None or not len(word):
                raise ValueError("the word rule needs a nonempty word and Cartan data")
            for r in range(radius + 1):
                prefix = SignedWord(word.letters * (r + 1), word.start)
                tower.append(build_dot_seed(prefix, cartan))
        case _:
            raise ValueError(f"unknown tower rule {rule!r}")
    logger.info("built %s tower with %d stages", rule, len(tower))
    return tower


def quantize_tower(
    tower: SeedTower,
    deltas: int = 2,
    pinned: Mapping[tuple[Vertex, Vertex], int] | None = None,
) -> SeedTower:
    """
    Solve Λ on the first stage and extend it stage by stage.

    :raises QuantizationError: If the first stage has no unique solution or an
        extension hypothesis fails.
    """
    if not tower.stages:
        return SeedTower(rule=tower.rule)
    base = tower[0]
    result = solve_lambda(CompatibilityProblem(base, {k: deltas for k in base.unfrozen}, dict(pinned or {})))
    if result.status != "unique" or result.seed is None:
        raise QuantizationError(f"first stage is {result.status}: {result.message}", hypothesis="unique")
    quantum = SeedTower(rule=tower.rule)
    quantum.append(result.seed)
    for s in tower.stages[1:]:
        quantum.append(extend_lambda(quantum.stages[-1], s, deltas))
    return quantum


@dataclass(frozen=True)
class StabilityCertificate:
    """
    :ivar stable_stage: The first stage from which the window value no longer changes.
    :ivar compared: The pair of consecutive stages that agreed.
    :ivar evaluated: Stages on which the query was run.
    """

    stable_stage: int
    compared: tuple[int, int]
    evaluated: int

    def __str__(self) -> str:
        return f"stable from stage {self.stable_stage} (stages {self.compared[0]} and {self.compared[1]} agree)"


def stable_compute(tower: SeedTower, query: StageQuery, check_rank: bool = True) -> tuple[Hashable, StabilityCertificate]:
    """
    Run ``query`` on consecutive stages until two of them agree.

    ``query`` returns ``None`` while a stage does not yet cover its window.

    :raises InjectivityError: If ``check_rank`` and a stage has a non-injective p*.
    :raises ClusterKitError: If no two consecutive stages agree.
    """
    previous: Hashable | None = None
    for r, s in enumerate(tower):
        if check_rank:
            check_injective(s)
        value = query(s)
        logger.debug("stage %d query value %s", r, value)
        if value is not None and previous is not None and value == previous:
            return value, StabilityCertificate(r, (r - 1, r), r + 1)
        previous = value
    raise ClusterKitError(f"query did not stabilize within {len(tower)} stages")


def lambda_window_query(window: range) -> StageQuery:
    """
    The Λ entries on ``window × window``, as a sorted tuple.
    """

    def query(s: Seed) -> Hashable | None:
        if s.lam is None:
            raise QuantizationError("stage carries no Λ", hypothesis="quantum")
        if not set(window) <= s.vertex_set:
            return None
        return tuple((i, j, s.lam_entry(i, j)) for i in window for j in window if i < j)

    return query


def matrix_window_query(window: range) -> StageQuery:
    """
    The unfrozen columns of B̃ restricted to ``window``.
    """

    def query(s: Seed) -> Hashable | None:
        if not set(window) <= s.vertex_set:
            return None
        return tuple((i, k, s.b_entry(i, k)) for k in window if not s.is_frozen(k) for i in window)

    return query


def _stage_word(word: SignedWord, s: Seed) -> SignedWord:
    copies, rest = divmod(len(s.vertices), len(word))
    if rest or s.vertices[0] != word.start:
        raise ClusterKitError(f"stage with {len(s.vertices)} vertices is not a prefix of {word}^∞")
    return SignedWord(word.letters * copies, word.start)


def _element_on_window(z: PointedElement, window: range) -> Hashable:
    inside = set(window)
    terms = tuple((tuple(n.items()), tuple(c.items())) for n, c in z.fpoly.items() if set(n.support) <= inside)
    return tuple(z.degree.restrict(inside).items()), terms


def triangular_window_query(word: SignedWord, degree: ExponentVector, order: int, window: range) -> StageQuery:
    """
    ``L_degree`` on the stages of a ``word`` tower, truncated at ``order``: its degree
    and the F-terms supported on ``window``.

    Classical stages are given a compatible Λ first.
    """
    if not set(degree.support) <= set(window):
        raise ValueError(f"degree {degree} is not supported on the window")

    def query(s: Seed) -> Hashable | None:
        if not set(window) <= s.vertex_set:
            return None
        if s.lam is None and s.unfrozen:
            s = find_compatible_lambda(s)
        family = InitialFamily.from_word(_stage_word(word, s), s)
        return _element_on_window(kl_correct(degree, family, order), window)

    return query


def fundamental_window_query(word: SignedWord, k: int, window: range) -> StageQuery:
    """
    The fundamental variable ``W_k`` on the stages of a ``word`` tower, restricted to ``window``.
    """
    if k not in window:
        raise ValueError(f"position {k} is outside the window")

    def query(s: Seed) -> Hashable | None:
        if not set(window) <= s.vertex_set:
            return None
        return _element_on_window(fundamental_variable(_stage_word(word, s), k, s), window)

    return query


def stable_compute_many(
    tower: SeedTower, queries: Mapping[str, StageQuery], jobs: int = 1, check_rank: bool = True
) -> dict[str, tuple[Hashable, StabilityCertificate]]:
    """
    Run independent queries on one tower, ``jobs`` at a time.

    :raises ClusterKitError: From the first query that fails, in the order given.
    """
    if check_rank:
        for s in tower:
            check_injective(s)
    with ThreadPoolExecutor(max_workers=max(jobs, 1)) as pool:
        futures = {name: pool.submit(stable_compute, tower, query, False) for name, query in queries.items()}
        return {name: future.result() for name, future in futures.items()}
