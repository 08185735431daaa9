"""
Seeds built from signed words over a generalized Cartan matrix.

Positions of a word ``i = (i_r, ..., i_s)`` are integers. The seed ``ddot(i)``
lives on ``[r-|J|, s]``: the positions below ``r`` carry the letters of a
Coxeter word and are frozen. ``dot(i)`` is its restriction to ``[r, s]``.
"""

import logging
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from src.errors import WordError
from src.seed import MutationSequence, Seed, cluster_variable_degree, initial_variables, mutate, mutate_variables
from src.torus import ExponentVector

if TYPE_CHECKING:
    from src.pointed import PointedElement

logger = logging.getLogger("clusterkit.word")

Position = int | float


@dataclass(frozen=True)
class CartanData:
    """
    A symmetrizable generalized Cartan matrix.

    :ivar index_set: The letters J, ascending.
    :ivar cartan: ``(a, b) -> C_ab``.
    :ivar symmetrizers: ``a -> D_a`` with ``D_a C_ab = D_b C_ba``.
    """

    index_set: tuple[int, ...]
    cartan: Mapping[tuple[int, int], int]
    symmetrizers: Mapping[int, int]

    def __post_init__(self) -> None:
        index_set = tuple(sorted(self.index_set))
        object.__setattr__(self, "index_set", index_set)
        for a in index_set:
            if self.entry(a, a) != 2:
                raise ValueError(f"C_{a}{a} must be 2")
            if self.symmetrizers.get(a, 0) <= 0:
                raise ValueError(f"symmetrizer D_{a} must be positive")
            for b in index_set:
                if a == b:
                    continue
                if self.entry(a, b) > 0:
                    raise ValueError(f"off-diagonal C_{a}{b} must be nonpositive")
                if self.symmetrizers[a] * self.entry(a, b) != self.symmetrizers[b] * self.entry(b, a):
                    raise ValueError(f"D_a C_ab != D_b C_ba for ({a},{b})")

    def entry(self, a: int, b: int) -> int:
        return self.cartan.get((a, b), 2 if a == b else 0)

    def rank(self) -> int:
        return len(self.index_set)

    def bilinear(self, a: int, b: int) -> int:
        """
        ``(α_a, α_b) = D_a C_ab``.
        """
        return self.symmetrizers[a] * self.entry(a, b)

    @classmethod
    def from_matrix(cls, rows: list[list[int]], symmetrizers: Iterable[int] | None = None) -> "CartanData":
        n = len(rows)
        index_set = tuple(range(1, n + 1))
        cartan = {(a + 1, b + 1): rows[a][b] for a in range(n) for b in range(n)}
        sym = list(symmetrizers) if symmetrizers is not None else [1] * n
        return cls(index_set, cartan, dict(zip(index_set, sym)))

    @classmethod
    def of_type(cls, name: str) -> "CartanData":
        """
        Finite types by name: ``a2``, ``B3``, ``c2``, ``d4``, ``g2``.

        :raises ValueError: On an unknown name.
        """
        kind, rank_text = name[:1].lower(), name[1:]
        if not rank_text.isdigit() or int(rank_text) < 1:
            raise ValueError(f"unknown Cartan type {name!r}")
        n = int(rank_text)
        rows = [[2 if a == b else 0 for b in range(n)] for a in range(n)]
        sym = [1] * n
        for a in range(n - 1):
            rows[a][a + 1] = rows[a + 1][a] = -1
        match kind:
            case "a":
                pass
            case "b" if n >= 2:
                rows[n - 1][n - 2] = -2
                sym = [2] * (n - 1) + [1]
            case "c" if n >= 2:
                rows[n - 2][n - 1] = -2
                sym = [1] * (n - 1) + [2]
            case "d" if n >= 4:
                rows[n - 2][n - 1] = rows[n - 1][n - 2] = 0
                rows[n - 3][n - 1] = rows[n - 1][n - 3] = -1
            case "g" if n == 2:
                rows[0][1] = -3
                sym = [1, 3]
            case _:
                raise ValueError(f"unknown Cartan type {name!r}")
        return cls.from_matrix(rows, sym)


@dataclass(frozen=True)
class SignedWord:
    """
    A finite signed word on the positions ``[start, start + len - 1]``.

    :ivar letters: Signed letters ``ε_k i_k``; zero is not a letter.
    :ivar start: The first position r.
    """

    letters: tuple[int, ...]
    start: int = 1

    def __post_init__(self) -> None:
        letters = tuple(int(x) for x in self.letters)
        if any(x == 0 for x in letters):
            raise WordError("0 is not a signed letter")
        object.__setattr__(self, "letters", letters)

    @property
    def end(self) -> int:
        return self.start + len(self.letters) - 1

    @property
    def positions(self) -> range:
        return range(self.start, self.end + 1)

    def __len__(self) -> int:
        return len(self.letters)

    def _index(self, k: int) -> int:
        if not self.start <= k <= self.end:
            raise WordError(f"position {k} is outside [{self.start}, {self.end}]")
        return k - self.start

    def letter(self, k: int) -> int:
        return abs(self.letters[self._index(k)])

    def sign(self, k: int) -> int:
        return 1 if self.letters[self._index(k)] > 0 else -1

    def is_unsigned(self) -> bool:
        return all(x > 0 for x in self.letters)

    def check_letters(self, cartan: CartanData) -> None:
        unknown = sorted({abs(x) for x in self.letters} - set(cartan.index_set))
        if unknown:
            raise WordError(f"letters {unknown} are not in the Cartan index set")

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.letters)


def parse_word(text: str, start: int = 1) -> SignedWord:
    """
    Parse ``"1,-1,2,-2"``; whitespace is ignored.

    :raises WordError: On malformed input.
    """
    body = text.replace(" ", "").strip(",")
    if not body:
        return SignedWord((), start)
    try:
        return SignedWord(tuple(int(x) for x in body.split(",")), start)
    except ValueError as exc:
        raise WordError(f"cannot parse word {text!r}") from exc


def _extended_letters(w: SignedWord, coxeter: tuple[int, ...] = ()) -> dict[int, int]:
    """
    Unsigned letters on ``[r - |c|, s]``; the Coxeter word fills the positions below r.
    """
    letters = {k: w.letter(k) for k in w.positions}
    for idx, a in enumerate(coxeter):
        letters[w.start - len(coxeter) + idx] = a
    return letters


def _step(letters: Mapping[int, int], k: int, direction: int) -> Position:
    lo, hi = min(letters), max(letters)
    j = k + direction
    while lo <= j <= hi:
        if letters[j] == letters[k]:
            return j
        j += direction
    return math.inf if direction > 0 else -math.inf


def shift(w: SignedWord, k: int, d: int = 1, coxeter: tuple[int, ...] = ()) -> Position:
    """
    ``k[d]``: walk ``|d|`` occurrences of the letter ``i_k`` forward (d > 0) or backward.

    :return: A position, or ``±math.inf`` when walking off the word.
    """
    letters = _extended_letters(w, coxeter)
    if k not in letters:
        raise WordError(f"position {k} is outside the word")
    current: Position = k
    direction = 1 if d > 0 else -1
    for _ in range(abs(d)):
        if math.isinf(current):
            break
        current = _step(letters, int(current), direction)
    return current


def occurrences_after(w: SignedWord, k: int) -> int:
    """
    ``o_+(k)``: later positions carrying the letter ``i_k``.
    """
    a = w.letter(k)
    return sum(1 for j in w.positions if j > k and w.letter(j) == a)


def occurrences_before(w: SignedWord, k: int) -> int:
    a = w.letter(k)
    return sum(1 for j in w.positions if j < k and w.letter(j) == a)


def k_max(w: SignedWord, k: int) -> int:
    a = w.letter(k)
    return max(j for j in w.positions if w.letter(j) == a)


def k_min(w: SignedWord, k: int) -> int:
    a = w.letter(k)
    return min(j for j in w.positions if w.letter(j) == a)


def _ddot_entry(
    j: int, k: int, letters: Mapping[int, int], nxt: Mapping[int, Position], w: SignedWord, cartan: CartanData
) -> int:
    eps = w.sign
    j1, k1 = nxt[j], nxt[k]
    c = cartan.entry(letters[j], letters[k])
    fired: list[int] = []
    if k == j1:
        fired.append(eps(k))
    if j == k1:
        fired.append(-eps(j))
    if j < k < j1 < k1 and eps(int(j1)) == eps(k):
        fired.append(eps(k) * c)
    if j < k < k1 < j1 and eps(k) == -eps(int(k1)):
        fired.append(eps(k) * c)
    if k < j < k1 < j1 and eps(int(k1)) == eps(j):
        fired.append(-eps(j) * c)
    if k < j < j1 < k1 and eps(j) == -eps(int(j1)):
        fired.append(-eps(j) * c)
    assert len(fired) <= 1, f"overlapping exchange cases at ({j},{k})"
    return fired[0] if fired else 0


def build_ddot_seed(
    w: SignedWord,
    cartan: CartanData,
    coxeter: Iterable[int] | None = None,
    frozen_block: Mapping[tuple[int, int], Fraction] | None = None,
) -> Seed:
    """
    The seed ``ddot(i)`` on ``[r-|J|, s]``.

    Columns at unfrozen vertices follow the seven-case exchange formula; rows at
    unfrozen vertices against frozen columns follow skew-symmetrizability. The
    frozen-frozen block is zero unless ``frozen_block`` supplies it.

    :param coxeter: A Coxeter word (a permutation of J); defaults to J ascending.
    :raises WordError: If a letter is outside J or ``coxeter`` is not a permutation of J.
    """
    w.check_letters(cartan)
    cox = tuple(coxeter) if coxeter is not None else cartan.index_set
    if sorted(cox) != list(cartan.index_set):
        raise WordError(f"Coxeter word {cox} is not a permutation of {cartan.index_set}")
    letters = _extended_letters(w, cox)
    nxt = {k: _step(letters, k, 1) for k in letters}
    vertices = sorted(letters)
    unfrozen = [k for k in w.positions if not math.isinf(nxt[k])]
    frozen = frozenset(k for k in vertices if k not in unfrozen)
    d = {k: cartan.symmetrizers[letters[k]] for k in vertices}

    b: dict[tuple[int, int], Fraction] = {}
    for k in unfrozen:
        for j in vertices:
            if j == k:
                continue
            value = _ddot_entry(j, k, letters, nxt, w, cartan)
            if value:
                b[(j, k)] = Fraction(value)
                if j in frozen:
                    b[(k, j)] = Fraction(-d[j] * value, d[k])
    for (i, j), x in (frozen_block or {}).items():
        if i in frozen and j in frozen and x:
            b[(i, j)] = Fraction(x)
    logger.debug("ddot seed of %s: %d vertices, %d unfrozen", w, len(vertices), len(unfrozen))
    return Seed(tuple(vertices), frozen, d, b)


def build_dot_seed(
    w: SignedWord, cartan: CartanData, frozen_block: Mapping[tuple[int, int], Fraction] | None = None
) -> Seed:
    """
    ``dot(i)``: the restriction of ``ddot(i)`` to ``[r, s]``, frozen where ``k[1] = +∞``.
    """
    full = build_ddot_seed(w, cartan)
    keep = set(w.positions)
    b = {(i, j): x for (i, j), x in full.b.items() if i in keep and j in keep}
    for (i, j), x in (frozen_block or {}).items():
        if i in full.frozen and j in full.frozen and i in keep and j in keep and x:
            b[(i, j)] = Fraction(x)
    return Seed(tuple(w.positions), full.frozen & keep, {k: full.d[k] for k in keep}, b)


@dataclass(frozen=True)
class FlipRelation:
    """
    How the seeds of a word and its flip are related: a transposition of two
    vertices (``kind == "sigma"``) or a mutation (``kind == "mu"``).
    """

    kind: str
    vertices: tuple[int, ...]

    def __str__(self) -> str:
        return f"σ_{{{self.vertices[0]},{self.vertices[1]}}}" if self.kind == "sigma" else f"μ_{self.vertices[0]}"


def word_flip(w: SignedWord, k: int) -> tuple[SignedWord, FlipRelation]:
    """
    Swap the letters at ``k`` and ``k + 1`` (which must have opposite signs).

    :raises WordError: If the signs agree or ``k + 1`` leaves the word.
    """
    if not w.start <= k < w.end:
        raise WordError(f"cannot flip at {k}: needs positions {k} and {k + 1}")
    if w.sign(k) != -w.sign(k + 1):
        raise WordError(f"cannot flip at {k}: signs agree")
    letters = list(w.letters)
    idx = k - w.start
    letters[idx], letters[idx + 1] = letters[idx + 1], letters[idx]
    flipped = SignedWord(tuple(letters), w.start)
    if w.letter(k) == w.letter(k + 1):
        return flipped, FlipRelation("mu", (k,))
    return flipped, FlipRelation("sigma", (k, k + 1))


def left_reflect(w: SignedWord) -> SignedWord:
    """
    Negate the sign of the first letter.

    :raises WordError: On the empty word.
    """
    if not w.letters:
        raise WordError("cannot reflect the empty word")
    return SignedWord((-w.letters[0],) + w.letters[1:], w.start)


def opposite_word(w: SignedWord) -> SignedWord:
    """
    The reversed word with negated signs, on the same starting position.
    """
    return SignedWord(tuple(-x for x in reversed(w.letters)), w.start)


def subword(w: SignedWord, a: int, b: int) -> SignedWord:
    if a > b:
        return SignedWord((), a)
    return SignedWord(tuple(w.letters[w._index(a) : w._index(b) + 1]), a)


def sigma_sequence(w: SignedWord) -> tuple[MutationSequence, dict[int, int]]:
    """
    The green-to-red sequence Σ = Σ_r, ..., Σ_s of an unsigned word and the permutation σ.

    ``Σ_k`` mutates at ``k^min, k^min[1], ..., k^min[o_+(k) - 1]``. σ is defined on
    unfrozen positions by ``σ(k) = k^max[-o_-(k) - 1]`` and fixes the frozen ones.

    :raises WordError: If the word has a negative letter.
    """
    if not w.is_unsigned():
        raise WordError("the green-to-red sequence needs an unsigned word")
    steps: list[int] = []
    for k in w.positions:
        current: Position = k_min(w, k)
        for _ in range(occurrences_after(w, k)):
            steps.append(int(current))
            current = shift(w, int(current), 1)
    sigma: dict[int, int] = {}
    for k in w.positions:
        if math.isinf(shift(w, k, 1)):
            sigma[k] = k
        else:
            sigma[k] = int(shift(w, k_max(w, k), -occurrences_before(w, k) - 1))
    return MutationSequence(tuple(steps)), sigma


def theta_inverse(w: ExponentVector, word: SignedWord) -> ExponentVector:
    """
    ``θ⁻¹(β_k) = f_k - f_{k[-1]}`` extended linearly (``f_{-∞} = 0``).
    """
    total = ExponentVector()
    for k, c in w.items():
        total = total + ExponentVector.basis(k, c)
        prev = shift(word, k, -1)
        if not math.isinf(prev):
            total = total - ExponentVector.basis(int(prev), c)
    return total


def theta(m: ExponentVector, word: SignedWord) -> ExponentVector:
    """
    Inverse of :func:`theta_inverse`: ``w_k = m_k + w_{k[1]}``, from the right end.
    """
    values: dict[int, int] = {}
    for k in reversed(word.positions):
        nxt = shift(word, k, 1)
        values[k] = m[k] + (0 if math.isinf(nxt) else values[int(nxt)])
    return ExponentVector(values)


def interval_degree(word: SignedWord, j: int, k: int) -> ExponentVector:
    """
    The degree ``f_k - f_{j[-1]}`` of the interval variable ``W_[j,k]``.

    :raises WordError: If ``j > k`` or the letters differ.
    """
    if j > k or word.letter(j) != word.letter(k):
        raise WordError(f"[{j},{k}] is not an interval of one letter")
    prev = shift(word, j, -1)
    base = ExponentVector.basis(k)
    return base if math.isinf(prev) else base - ExponentVector.basis(int(prev))


def interval_variable(word: SignedWord, j: int, k: int, s: Seed) -> "PointedElement":
    """
    The interval variable ``W_[j,k]`` as a pointed element of the chart ``s = dot(word)``.

    The Σ prefix is run until a mutation produces the target degree; the variable
    is then computed by exact mutation in the initial chart.

    :raises WordError: If no step of Σ produces the degree.
    """
    from src.pointed import to_pointed

    target = interval_degree(word, j, k)
    variables = initial_variables(s)
    if target == ExponentVector.basis(k):
        return to_pointed(variables[k], s)
    path, _ = sigma_sequence(word)
    seeds = [s]
    for k_step in path:
        seeds.append(mutate(seeds[-1], k_step))
    for t, k_step in enumerate(path, start=1):
        if cluster_variable_degree(s, path.steps[:t], k_step) == target:
            for step_seed, vertex in zip(seeds[:t], path.steps[:t]):
                variables = mutate_variables(step_seed, vertex, variables)
            logger.debug("W[%d,%d] found after %d steps of Σ", j, k, t)
            return to_pointed(variables[k_step], s)
    raise WordError(f"no step of Σ produces the degree {target}")


def fundamental_variable(word: SignedWord, k: int, s: Seed) -> "PointedElement":
    """
    ``W_k = W_[k,k]``.
    """
    return interval_variable(word, k, k, s)
