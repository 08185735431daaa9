"""
Classical oracle for double Bruhat word seeds in type A.

Cluster variables of ``ddot(i)^op`` are generalized minors ``Δ_{γ_k, δ_k}``;
in type A these are determinants of submatrices, so exchange relations can be
checked exactly on random integer matrices of determinant 1.
"""

import itertools
import logging
import math
import random
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

import sympy as sp

from src.errors import WordError
from src.seed import Seed, Vertex
from src.word_seed import CartanData, SignedWord, word_flip

logger = logging.getLogger("clusterkit.lie")

WeightVector = tuple[Fraction, ...]


def _coxeter(cartan: CartanData, coxeter: Iterable[int] | None) -> tuple[int, ...]:
    return tuple(coxeter) if coxeter is not None else cartan.index_set


def fundamental_weight(cartan: CartanData, a: int) -> WeightVector:
    """
    ``ϖ_a`` in the simple-root basis: column ``a`` of ``C⁻¹``.
    """
    idx = cartan.index_set
    inv = sp.Matrix([[cartan.entry(p, q) for q in idx] for p in idx]).inv()
    col = idx.index(a)
    return tuple(Fraction(int(sp.fraction(inv[r, col])[0]), int(sp.fraction(inv[r, col])[1])) for r in range(len(idx)))


def reflect(cartan: CartanData, a: int, weight: WeightVector) -> WeightVector:
    """
    ``s_a(λ) = λ - ⟨α_a^∨, λ⟩ α_a``.
    """
    idx = cartan.index_set
    coroot = sum((weight[p] * cartan.entry(a, c) for p, c in enumerate(idx)), Fraction(0))
    pos = idx.index(a)
    return tuple(x - coroot if p == pos else x for p, x in enumerate(weight))


def act(cartan: CartanData, letters: Sequence[int], weight: WeightVector) -> WeightVector:
    """
    ``s_{a_1} ⋯ s_{a_t} λ``; the rightmost reflection acts first.
    """
    for a in reversed(letters):
        weight = reflect(cartan, a, weight)
    return weight


def weight_pairing(cartan: CartanData, x: WeightVector, y: WeightVector) -> Fraction:
    """
    ``(λ, μ) = Σ λ_a μ_b D_a C_ab``.
    """
    idx = cartan.index_set
    return sum(
        (x[p] * y[q] * cartan.bilinear(a, b) for p, a in enumerate(idx) for q, b in enumerate(idx)),
        Fraction(0),
    )


def _split_letters(word: SignedWord, upto: int | None = None) -> tuple[list[int], list[int]]:
    """
    The letters of ``u_{≤k}`` (negative signs) and ``w_{≤k}`` (positive signs).
    """
    u: list[int] = []
    w: list[int] = []
    for k in word.positions:
        if upto is not None and k > upto:
            break
        (w if word.sign(k) > 0 else u).append(word.letter(k))
    return u, w


def gamma_weights(word: SignedWord, cartan: CartanData, coxeter: Iterable[int] | None = None) -> dict[Vertex, WeightVector]:
    """
    ``γ_k = u_{≤k} ϖ_{i_k}``; Coxeter positions get ``ϖ_{c}``.
    """
    cox = _coxeter(cartan, coxeter)
    result: dict[Vertex, WeightVector] = {}
    for idx, a in enumerate(cox):
        result[word.start - len(cox) + idx] = fundamental_weight(cartan, a)
    for k in word.positions:
        u, _ = _split_letters(word, k)
        result[k] = act(cartan, u, fundamental_weight(cartan, word.letter(k)))
    return result


def delta_weights(word: SignedWord, cartan: CartanData, coxeter: Iterable[int] | None = None) -> dict[Vertex, WeightVector]:
    """
    ``δ_k = w⁻¹ w_{≤k} ϖ_{i_k}``; Coxeter positions get ``w⁻¹ ϖ_c``.
    """
    cox = _coxeter(cartan, coxeter)
    _, w_all = _split_letters(word)
    w_inv = list(reversed(w_all))
    result: dict[Vertex, WeightVector] = {}
    for idx, a in enumerate(cox):
        result[word.start - len(cox) + idx] = act(cartan, w_inv, fundamental_weight(cartan, a))
    for k in word.positions:
        _, w_k = _split_letters(word, k)
        result[k] = act(cartan, w_inv + w_k, fundamental_weight(cartan, word.letter(k)))
    return result


@dataclass(frozen=True)
class MinorLabel:
    """
    Row and column index sets of a minor, 1-based.
    """

    rows: tuple[int, ...]
    cols: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(sorted(self.rows)))
        object.__setattr__(self, "cols", tuple(sorted(self.cols)))
        if len(self.rows) != len(self.cols):
            raise ValueError(f"minor label {self} is not square")

    def __str__(self) -> str:
        return f"Δ_{{{''.join(map(str, self.rows))},{''.join(map(str, self.cols))}}}"


def parse_label(text: str) -> MinorLabel:
    """
    ``"12,23"`` -> rows {1,2}, cols {2,3}.
    """
    rows, _, cols = text.strip().partition(",")
    return MinorLabel(tuple(int(c) for c in rows), tuple(int(c) for c in cols))


def _permute_set(letters: Sequence[int], elements: Iterable[int]) -> tuple[int, ...]:
    result = []
    for x in elements:
        for a in reversed(letters):
            if x == a:
                x = a + 1
            elif x == a + 1:
                x = a
        result.append(x)
    return tuple(sorted(result))


def require_type_a(cartan: CartanData, n: int) -> None:
    """
    :raises WordError: Unless ``cartan`` is the type A_n matrix on letters 1..n.
    """
    if cartan.index_set != tuple(range(1, n + 1)):
        raise WordError(f"minor labels need Cartan type A_{n} on letters 1..{n}")
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            expected = 2 if a == b else (-1 if abs(a - b) == 1 else 0)
            if cartan.entry(a, b) != expected:
                raise WordError(f"minor labels need Cartan type A_{n}")


def minor_label(word: SignedWord, k: int, n: int, coxeter: Iterable[int] | None = None) -> MinorLabel:
    """
    The minor ``Δ_{u_{≤k}[1,a], (w⁻¹w_{≤k})[1,a]}`` with ``a = |i_k|`` on ``SL_{n+1}``.

    Coxeter positions below the word carry ``Δ_{[1,a], w⁻¹[1,a]}``.
    """
    cox = tuple(coxeter) if coxeter is not None else tuple(range(1, n + 1))
    _, w_all = _split_letters(word)
    w_inv = list(reversed(w_all))
    if k < word.start:
        pos = k - (word.start - len(cox))
        if not 0 <= pos < len(cox):
            raise WordError(f"position {k} is outside the word")
        a = cox[pos]
        return MinorLabel(tuple(range(1, a + 1)), _permute_set(w_inv, range(1, a + 1)))
    a = word.letter(k)
    if a > n:
        raise WordError(f"letter {a} exceeds the rank {n}")
    u, w_k = _split_letters(word, k)
    return MinorLabel(_permute_set(u, range(1, a + 1)), _permute_set(w_inv + w_k, range(1, a + 1)))


def minor_labels(word: SignedWord, n: int, coxeter: Iterable[int] | None = None) -> dict[Vertex, MinorLabel]:
    first = word.start - n
    return {k: minor_label(word, k, n, coxeter) for k in range(first, word.end + 1)}


def evaluate_minor(label: MinorLabel, g: sp.Matrix) -> int:
    """
    Exact determinant of the labeled submatrix.
    """
    if any(not 1 <= x <= g.rows for x in label.rows + label.cols):
        raise ValueError(f"{label} does not fit a {g.rows}x{g.cols} matrix")
    if not label.rows:
        return 1
    sub = g.extract([r - 1 for r in label.rows], [c - 1 for c in label.cols])
    return int(sub.det(method="berkowitz"))


def random_sl_matrix(size: int, rng: random.Random, factors: int | None = None) -> sp.Matrix:
    """
    A product of elementary unipotent matrices ``I + t E_ij`` with ``t`` in [-3, 3].
    """
    g = sp.eye(size)
    for _ in range(factors if factors is not None else 2 * size * size):
        i, j = rng.sample(range(size), 2)
        t = rng.randint(-3, 3)
        elementary = sp.eye(size)
        elementary[i, j] = t
        g = g * elementary
    return g


def sl_samples(size: int, count: int, seed: int = 0) -> list[sp.Matrix]:
    """
    ``count`` deterministic samples; the first is the identity.
    """
    rng = random.Random(seed)
    samples = [sp.eye(size)] if count > 0 else []
    samples.extend(random_sl_matrix(size, rng) for _ in range(count - 1))
    return samples


def mutated_label(word: SignedWord, k: int, n: int, coxeter: Iterable[int] | None = None, max_states: int = 5000) -> MinorLabel | None:
    """
    The minor of the variable obtained by mutating ``ddot(i)^op`` at ``k``.

    Transposition flips (letters differ, signs opposite) relabel vertices without
    changing variables; they are searched breadth-first until the tracked vertex
    sits in front of the same letter with the opposite sign, where a flip is the
    mutation itself.

    :return: The label, or ``None`` if no such flip sequence is found.
    """
    start = (word.letters, k)
    seen = {start}
    queue = deque([start])
    while queue:
        letters, pos = queue.popleft()
        current = SignedWord(letters, word.start)
        for p in range(current.start, current.end):
            if current.sign(p) == current.sign(p + 1):
                continue
            flipped, relation = word_flip(current, p)
            if relation.kind == "mu":
                if p == pos:
                    return minor_label(flipped, p, n, coxeter)
                continue
            tracked = p + 1 if pos == p else p if pos == p + 1 else pos
            state = (flipped.letters, tracked)
            if state not in seen and len(seen) < max_states:
                seen.add(state)
                queue.append(state)
    return None


@dataclass
class ExchangeReport:
    """
    Outcome of an exchange-relation check at one vertex.

    :ivar mode: ``label`` when ``x'_k`` is the minor reached by flips, ``quotient``
        when ``x'_k`` is the exact polynomial quotient of the exchange binomial by ``x_k``.
    :ivar counterexample: Index of the first failing sample, or ``None`` when the
        binomial is not divisible by ``x_k`` at all.
    """

    vertex: Vertex
    samples: int
    mode: str
    passed: bool
    new_label: MinorLabel | None = None
    counterexample: int | None = None

    def __str__(self) -> str:
        label = f" x'={self.new_label}" if self.new_label else ""
        if self.passed:
            verdict = "ok"
        elif self.counterexample is None:
            verdict = "FAIL, binomial not divisible by x_k"
        else:
            verdict = f"FAIL at sample {self.counterexample}"
        return f"vertex {self.vertex}: {verdict} ({self.mode}, {self.samples} samples){label}"


def generic_matrix(size: int) -> tuple[sp.Matrix, tuple[sp.Symbol, ...]]:
    """
    The matrix of independent entries ``g_ij`` and its symbols, row by row.
    """
    gens = sp.symbols([f"g{i}{j}" for i in range(1, size + 1) for j in range(1, size + 1)])
    return sp.Matrix(size, size, gens), tuple(gens)


def symbolic_minor(label: MinorLabel, g: sp.Matrix) -> sp.Expr:
    if not label.rows:
        return sp.Integer(1)
    return sp.expand(g.extract([r - 1 for r in label.rows], [c - 1 for c in label.cols]).det(method="berkowitz"))


def exchange_quotient(
    seed: Seed, k: Vertex, labels: Mapping[Vertex, MinorLabel], size: int
) -> tuple[sp.Poly | None, MinorLabel | None]:
    """
    Divide ``Π Δ_j^{[b_jk]_+} + Π Δ_j^{[-b_jk]_+}`` by ``Δ_k`` in the polynomial ring of
    the entries of a generic ``size × size`` matrix.

    Minors of SL_n lift to homogeneous polynomials, so ``x'_k`` is regular exactly
    when the division leaves no remainder.

    :return: The quotient (``None`` if the remainder is nonzero) and the minor it
        equals, if any.
    """
    g, gens = generic_matrix(size)
    col = seed.column(k)
    plus = math.prod((symbolic_minor(labels[j], g) ** e for j, e in col.positive_part().items()), start=sp.Integer(1))
    minus = math.prod((symbolic_minor(labels[j], g) ** e for j, e in col.negative_part().items()), start=sp.Integer(1))
    binomial = sp.Poly(sp.expand(plus + minus), *gens, domain="QQ")
    x_k = sp.Poly(symbolic_minor(labels[k], g), *gens, domain="QQ")
    quotient, remainder = binomial.div(x_k)
    if not remainder.is_zero:
        logger.debug("Δ_%s does not divide the exchange binomial at %d", labels[k], k)
        return None, None
    for a in range(1, size):
        for rows in itertools.combinations(range(1, size + 1), a):
            for cols in itertools.combinations(range(1, size + 1), a):
                label = MinorLabel(rows, cols)
                if quotient == sp.Poly(symbolic_minor(label, g), *gens, domain="QQ"):
                    return quotient, label
    return quotient, None


def verify_exchange_on_matrices(
    seed: Seed,
    word: SignedWord,
    k: Vertex,
    samples: int = 100,
    rng_seed: int = 0,
    labels: Mapping[Vertex, MinorLabel] | None = None,
    coxeter: Iterable[int] | None = None,
) -> ExchangeReport:
    """
    Check ``x_k x'_k = Π x_j^{[b_jk]_+} + Π x_j^{[-b_jk]_+}`` on random SL_{n+1} samples.

    When no flip sequence names ``x'_k``, it is taken to be the exact quotient of the
    binomial by ``x_k`` over a generic matrix; a nonzero remainder fails the check.

    :param seed: The seed ``ddot(word)^op`` (classical part is used).
    :param labels: Override of the minor labels, e.g. for negative controls.
    """
    n = len(seed.vertices) - len(word)
    cox = tuple(coxeter) if coxeter is not None else tuple(range(1, n + 1))
    labels = dict(labels) if labels is not None else minor_labels(word, n, cox)
    new_label = mutated_label(word, k, n, cox)
    quotient_expr: sp.Expr | None = None
    if new_label is not None:
        mode = "label"
    else:
        mode = "quotient"
        quotient, new_label = exchange_quotient(seed, k, labels, n + 1)
        if quotient is None:
            logger.warning("exchange binomial at %d is not divisible by x_%d", k, k)
            return ExchangeReport(k, 0, mode, False)
        quotient_expr = quotient.as_expr()
    col = seed.column(k)
    for index, g in enumerate(sl_samples(n + 1, samples, rng_seed)):
        values = {i: evaluate_minor(label, g) for i, label in labels.items()}
        plus = math.prod(values[j] ** e for j, e in col.positive_part().items())
        minus = math.prod(values[j] ** e for j, e in col.negative_part().items())
        if new_label is not None:
            x_new = evaluate_minor(new_label, g)
        else:
            x_new = int(quotient_expr.xreplace(dict(zip(quotient.gens, g))))
        if values[k] * x_new != plus + minus:
            logger.warning("exchange relation at %d fails on sample %d", k, index)
            return ExchangeReport(k, index + 1, mode, False, new_label, index)
    logger.debug("exchange relation at %d holds on %d samples (%s)", k, samples, mode)
    return ExchangeReport(k, samples, mode, True, new_label)
