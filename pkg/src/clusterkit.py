import argparse
import json
import logging
import random
import sys
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, TextIO

from src.errors import ClusterKitError, SeedFileError, WordError
from src.laurent import VLaurent
from src.lie_oracle import ExchangeReport, minor_labels, require_type_a, verify_exchange_on_matrices
from src.pointed import PointedElement, check_injective, format_pointed, freeze_element, freeze_seed
from src.quantization import CompatibilityProblem, find_compatible_lambda, lambda_from_weights, solve_lambda
from src.seed import MutationSequence, Seed, check_compatible, mutate_path, opposite
from src.torus import ExponentVector, parse_exponents
from src.tower import (
    SeedTower,
    StageQuery,
    build_interval_tower,
    fundamental_window_query,
    lambda_window_query,
    matrix_window_query,
    quantize_tower,
    stable_compute_many,
    triangular_window_query,
)
from src.triangular import InitialFamily, StandardBasis, kl_correct, kl_from_standard, straightening_check
from src.word_seed import CartanData, SignedWord, build_ddot_seed, build_dot_seed, parse_word, sigma_sequence
from utils.kit_context import KitContext
from utils.kit_log import setup_logging
from utils.quiver_visual import draw_quiver, to_dot, to_latex
from utils.seed_io import format_seed, load_cartan, load_word, read_fixture, seed_from_data, seed_to_data

logger = logging.getLogger("clusterkit.cli")

Handler = Callable[[argparse.Namespace, KitContext, TextIO], int]

GHL_DEFAULT_PIN = {(-1, 0): 1}


# ---- argument types ---------------------------------------------------


def _arg_word(text: str) -> SignedWord:
    try:
        return parse_word(text)
    except WordError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


class CartanAction(argparse.Action):
    """
    Resolve ``--cartan`` to :class:`CartanData`, keeping the name for seed metadata.
    """

    def __call__(self, parser, namespace, values, option_string=None) -> None:
        try:
            cartan = load_cartan(str(values))
        except SeedFileError as exc:
            raise argparse.ArgumentError(self, str(exc)) from exc
        setattr(namespace, self.dest, cartan)
        setattr(namespace, "cartan_name", str(values))


def _arg_degree(text: str) -> ExponentVector:
    try:
        return parse_exponents(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad degree {text!r}: {exc}") from exc


def _arg_delta(text: str) -> tuple[int, int]:
    key, sep, value = text.partition("=")
    try:
        if not sep:
            raise ValueError("missing '='")
        return int(key), int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected k=v, got {text!r}") from exc


def _arg_pin(text: str) -> tuple[tuple[int, int], int]:
    pair, sep, value = text.partition("=")
    i, comma, j = pair.partition(",")
    try:
        if not sep or not comma:
            raise ValueError("missing separator")
        return (int(i), int(j)), int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected i,j=v, got {text!r}") from exc


def _arg_window(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            raise ValueError("missing '..'")
        return range(int(lo), int(hi) + 1)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}") from exc


def _arg_vertices(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a comma list of vertices, got {text!r}") from exc


def _arg_permutation(text: str) -> dict[int, int]:
    try:
        return parse_exponents(text).as_dict()
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected {{k:σ(k), ...}}, got {text!r}") from exc


# ---- shared helpers ---------------------------------------------------


def _load(ctx: KitContext, name: str) -> tuple[dict[str, Any], Seed]:
    path = ctx.fixture_path(name)
    data = read_fixture(path)
    logger.debug("loaded seed %s", path)
    return data, seed_from_data(data)


def _quantum(s: Seed) -> Seed:
    if s.is_quantum:
        return s
    logger.info("seed carries no Λ, solving for a compatible one")
    return find_compatible_lambda(s)


def _emit(ctx: KitContext, out: TextIO, text: str, payload: Any) -> None:
    if ctx.json_output:
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        out.write(text if text.endswith("\n") else text + "\n")


def _write_seed(args: argparse.Namespace, ctx: KitContext, out: TextIO, s: Seed, meta: dict[str, Any]) -> None:
    text = format_seed(s, meta)
    output = getattr(args, "output", None)
    if output:
        Path(output).write_text(text)
        logger.info("seed written to %s", output)
    if ctx.json_output:
        _emit(ctx, out, text, seed_to_data(s, meta))
    elif not output:
        out.write(text)


def _pointed_payload(z: PointedElement) -> dict[str, Any]:
    return {
        "degree": {str(i): x for i, x in z.degree.items()},
        "terms": [{"n": {str(i): x for i, x in n.items()}, "coefficient": str(c)} for n, c in z.fpoly.items()],
        "truncation": z.truncation,
        "text": format_pointed(z),
    }


def _word_meta(data: dict[str, Any]) -> dict[str, Any]:
    return {key: data[key] for key in ("name", "description") if key in data}


# ---- seed -------------------------------------------------------------


def cmd_seed_show(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    data, s = _load(ctx, args.seed)
    header = f"{'name:':<12} {data.get('name', args.seed)}\n"
    _emit(ctx, out, header + str(s), seed_to_data(s, data))
    return 0


def cmd_seed_check(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    _, s = _load(ctx, args.seed)
    check_injective(s)
    deltas = check_compatible(s) if s.is_quantum else None
    lines = [
        f"{'vertices:':<16} {len(s.vertices)}",
        f"{'unfrozen:':<16} {len(s.unfrozen)}",
        f"{'injective:':<16} yes",
        f"{'compatible:':<16} " + ("classical seed" if deltas is None else ", ".join(f"δ_{k}={v}" for k, v in deltas.items())),
    ]
    payload = {
        "vertices": len(s.vertices),
        "unfrozen": len(s.unfrozen),
        "injective": True,
        "deltas": None if deltas is None else {str(k): v for k, v in deltas.items()},
    }
    _emit(ctx, out, "\n".join(lines), payload)
    return 0


def cmd_seed_freeze(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    data, s = _load(ctx, args.seed)
    _write_seed(args, ctx, out, freeze_seed(s, args.at), _word_meta(data))
    return 0


def cmd_seed_opposite(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    data, s = _load(ctx, args.seed)
    _write_seed(args, ctx, out, opposite(s), _word_meta(data))
    return 0


# ---- word -------------------------------------------------------------


def cmd_word_seed(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    word = SignedWord(args.word.letters, args.start)
    match args.kind:
        case "dot":
            s = build_dot_seed(word, args.cartan)
        case "ddot":
            s = build_ddot_seed(word, args.cartan, args.coxeter)
        case "ddot-op":
            s = lambda_from_weights(word, args.cartan, args.coxeter)
        case _:
            raise ValueError(f"unknown seed kind {args.kind}")
    if args.quantize and not s.is_quantum:
        s = find_compatible_lambda(s)
    meta: dict[str, Any] = {"word": str(word), "word_start": word.start, "cartan": args.cartan_name}
    if args.coxeter is not None:
        meta["coxeter"] = ",".join(str(a) for a in args.coxeter)
    logger.info("%s seed of %s: %d vertices", args.kind, word, len(s.vertices))
    _write_seed(args, ctx, out, s, meta)
    return 0


def cmd_word_sigma(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    word = SignedWord(args.word.letters, args.start)
    path, sigma = sigma_sequence(word)
    lines = [
        f"{'sequence:':<16} {','.join(str(k) for k in path)}",
        f"{'length:':<16} {len(path)}",
        f"{'sigma:':<16} " + ", ".join(f"{k}->{v}" for k, v in sorted(sigma.items())),
    ]
    payload = {"sequence": list(path.steps), "sigma": {str(k): v for k, v in sorted(sigma.items())}}
    _emit(ctx, out, "\n".join(lines), payload)
    return 0


# ---- mutate / quantize --------------------------------------------------


def cmd_mutate(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    data, s = _load(ctx, args.seed)
    path = MutationSequence(tuple(args.at))
    result = mutate_path(s, path)
    logger.info("applied %s", path)
    _write_seed(args, ctx, out, result, _word_meta(data))
    return 0


def cmd_quantize(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    data, s = _load(ctx, args.seed)
    given = dict(args.delta or [])
    unknown = sorted(set(given) - set(s.unfrozen))
    if unknown:
        raise ClusterKitError(f"--delta names vertices {unknown} that are not unfrozen")
    deltas = {k: given.get(k, args.default_delta * s.d[k]) for k in s.unfrozen}
    result = solve_lambda(CompatibilityProblem(s, deltas, dict(args.pin or [])))
    logger.info("compatibility system: %s %s", result.status, result.message)
    if result.seed is None:
        print(f"clusterkit: no integral compatible Λ ({result.status}: {result.message})", file=sys.stderr)
        return 1
    if ctx.json_output:
        payload = {
            "status": result.status,
            "free_directions": [{f"{i},{j}": str(x) for (i, j), x in d.items()} for d in result.free_directions],
            "seed": seed_to_data(result.seed, data),
        }
        _emit(ctx, out, "", payload)
        return 0
    _write_seed(args, ctx, out, result.seed, data)
    return 0


# ---- basis ------------------------------------------------------------


def cmd_basis_tri(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    data, s = _load(ctx, args.seed)
    s = _quantum(s)
    if args.path is not None:
        family = InitialFamily.from_sequence(s, args.path, args.sigma or {})
    else:
        word = load_word(data)
        if word is None:
            raise SeedFileError("the seed file carries no word; pass --path and --sigma")
        family = InitialFamily.from_word(word, s)
    z = kl_correct(args.degree, family, args.order)
    if args.freeze:
        z = freeze_element(z, args.freeze)
    _emit(ctx, out, format_pointed(z), _pointed_payload(z))
    return 0


def _standard_basis(ctx: KitContext, name: str) -> StandardBasis:
    data, s = _load(ctx, name)
    word = load_word(data)
    if word is None:
        raise SeedFileError("the seed file carries no word")
    return StandardBasis(word, _quantum(s))


def cmd_basis_std(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    basis = _standard_basis(ctx, args.seed)
    z = kl_from_standard(args.multiplicity, args.order, basis, args.truncation)
    _emit(ctx, out, format_pointed(z), _pointed_payload(z))
    return 0


def cmd_basis_straighten(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    basis = _standard_basis(ctx, args.seed)
    positions = list(basis.word.positions)
    pairs = [(args.pair[0], args.pair[1])] if args.pair else [
        (j, k) for idx, j in enumerate(positions) for k in positions[idx + 1 :]
    ]
    reports = [straightening_check(j, k, basis, args.truncation) for j, k in pairs]
    payload = [
        {"j": r.j, "k": r.k, "passed": r.passed, "terms": {str(w): str(c) for w, c in r.terms.items()}} for r in reports
    ]
    _emit(ctx, out, "\n".join(str(r) for r in reports), payload)
    return 0 if all(r.passed for r in reports) else 1


# ---- verify -----------------------------------------------------------


def cmd_verify_minors(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    word = SignedWord(args.word.letters, args.start)
    cartan = args.cartan if args.cartan is not None else CartanData.of_type(f"a{max(abs(x) for x in word.letters)}")
    n = cartan.rank()
    require_type_a(cartan, n)
    if args.seed is not None:
        _, s = _load(ctx, args.seed)
    else:
        s = opposite(build_ddot_seed(word, cartan, args.coxeter))
    cox = args.coxeter if args.coxeter is not None else cartan.index_set
    labels = minor_labels(word, n, cox)
    missing = sorted(set(labels) - s.vertex_set)
    if missing or len(labels) != len(s.vertices):
        raise WordError(f"seed vertices {list(s.vertices)} do not match the word positions {sorted(labels)}")

    def check(k: int) -> ExchangeReport:
        return verify_exchange_on_matrices(s, word, k, args.samples, ctx.rng_seed, labels, cox)

    with ThreadPoolExecutor(max_workers=ctx.jobs) as pool:
        reports = list(pool.map(check, s.unfrozen))
    lines = [f"x_{k} = {label}" for k, label in labels.items()]
    lines.extend(str(r) for r in reports)
    payload = {
        "labels": {str(k): str(label) for k, label in labels.items()},
        "reports": [
            {
                "vertex": r.vertex,
                "mode": r.mode,
                "passed": r.passed,
                "samples": r.samples,
                "new_label": None if r.new_label is None else str(r.new_label),
            }
            for r in reports
        ],
    }
    _emit(ctx, out, "\n".join(lines), payload)
    return 0 if all(r.passed for r in reports) else 1


def cmd_verify_compat(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    _, s = _load(ctx, args.seed)
    deltas = check_compatible(s)
    _emit(
        ctx,
        out,
        "\n".join(f"δ_{k} = {v}" for k, v in deltas.items()),
        {"deltas": {str(k): v for k, v in deltas.items()}},
    )
    return 0


def cmd_verify_mutations(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    """
    Random mutation sequences: each must be undone by its reverse, and a quantum
    seed must stay compatible with the same δ.
    """
    _, s = _load(ctx, args.seed)
    rng = random.Random(ctx.rng_seed)
    deltas = check_compatible(s) if s.is_quantum else None
    failures: list[str] = []
    for _ in range(args.samples):
        path = MutationSequence(tuple(rng.choice(s.unfrozen) for _ in range(rng.randint(1, args.length))))
        target = mutate_path(s, path)
        if mutate_path(target, path.reversed()) != s:
            failures.append(f"{path}: reverse does not return to the seed")
        elif deltas is not None and check_compatible(target) != deltas:
            failures.append(f"{path}: δ changed")
    lines = [f"{'sequences:':<16} {args.samples}", f"{'failures:':<16} {len(failures)}", *failures]
    _emit(ctx, out, "\n".join(lines), {"sequences": args.samples, "failures": failures})
    return 0 if not failures else 1


# ---- tower ------------------------------------------------------------


def _tower(args: argparse.Namespace, quantum: bool) -> SeedTower:
    word = None
    if args.word is not None:
        word = SignedWord(args.word.letters, args.start)
    tower = build_interval_tower(args.rule, args.radius, word, args.cartan)
    if not quantum:
        return tower
    pins = dict(args.pin) if args.pin else (GHL_DEFAULT_PIN if args.rule == "ghl-a1" else {})
    return quantize_tower(tower, args.delta, pins)


def cmd_tower_build(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    tower = _tower(args, args.quantize)
    payload = {"rule": tower.rule, "stages": [seed_to_data(s) for s in tower]}
    _emit(ctx, out, str(tower), payload)
    return 0


def _stage_query(name: str, args: argparse.Namespace) -> StageQuery:
    match name:
        case "lambda":
            return lambda_window_query(args.window)
        case "matrix":
            return matrix_window_query(args.window)
    if args.rule != "word" or args.word is None:
        raise ValueError(f"--query {name} needs --rule word and --word")
    word = SignedWord(args.word.letters, args.start)
    if name == "triangular":
        if args.degree is None:
            raise ValueError("--query triangular needs --degree")
        return triangular_window_query(word, args.degree, args.order, args.window)
    if args.position is None:
        raise ValueError("--query fundamental needs --position")
    return fundamental_window_query(word, args.position, args.window)


def _window_result(name: str, value: Any, window: range) -> tuple[list[str], dict[str, Any]]:
    payload: dict[str, Any] = {"query": name, "window": [window.start, window.stop - 1]}
    if name in ("lambda", "matrix"):
        entries = [(i, j, x) for i, j, x in value if x]
        symbol = "Λ" if name == "lambda" else "b"
        payload["entries"] = [[i, j, str(x)] for i, j, x in entries]
        return [f"{symbol}[{i},{j}] = {x}" for i, j, x in entries], payload
    degree, terms = value
    fpoly = {str(ExponentVector(dict(n))): str(VLaurent(dict(c))) for n, c in terms}
    payload["degree"] = str(ExponentVector(dict(degree)))
    payload["fpoly"] = fpoly
    lines = [f"{'degree:':<16} {payload['degree']}", *(f"  F{n}: {c}" for n, c in fpoly.items())]
    return lines, payload


def cmd_tower_compute(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    names = list(dict.fromkeys(args.query or ["lambda"]))
    quantum = "lambda" in names
    tower = _tower(args, quantum)
    queries = {name: _stage_query(name, args) for name in names}
    results = stable_compute_many(tower, queries, ctx.jobs)
    lines: list[str] = []
    payloads = []
    for name, (value, certificate) in results.items():
        assert isinstance(value, tuple)
        if len(names) > 1:
            lines.append(f"[{name}]")
        body, payload = _window_result(name, value, args.window)
        lines.extend(body)
        lines.append(str(certificate))
        payload["stable_stage"] = certificate.stable_stage
        payload["compared"] = list(certificate.compared)
        payloads.append(payload)
    _emit(ctx, out, "\n".join(lines), payloads[0] if len(payloads) == 1 else payloads)
    return 0


# ---- export -----------------------------------------------------------


def cmd_export(args: argparse.Namespace, ctx: KitContext, out: TextIO) -> int:
    data, s = _load(ctx, args.seed)
    match args.format:
        case "dot":
            text = to_dot(s, str(data.get("name", "quiver")).replace("-", "_"))
        case "latex":
            text = to_latex(s)
        case "png":
            path = draw_quiver(s, args.output or "quiver.png", ctx.rng_seed)
            out.write(f"plot saved to {path}\n")
            return 0
        case _:
            raise ValueError(f"unknown export format {args.format}")
    if args.output:
        Path(args.output).write_text(text)
        logger.info("quiver written to %s", args.output)
    else:
        out.write(text)
    return 0


# ---- parser -----------------------------------------------------------


def _add_word_args(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--word", type=_arg_word, required=required, help='signed word, e.g. "1,-1,2,-2"')
    parser.add_argument("--start", type=int, default=1, help="position of the first letter")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clusterkit",
        description="Quantum cluster algebra toolkit",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", dest="verbose", type=int, default=2, help="verbose level 0-3")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--rng-seed", dest="rng_seed", type=int, default=0, help="seed of every random generator")
    parser.add_argument("--jobs", type=int, default=1, help="workers for verification suites and tower queries")
    parser.add_argument("--log-file", dest="log_file", default=None, help="DEBUG log file under logs/")
    parser.set_defaults(cartan=None, cartan_name=None)
    verbs = parser.add_subparsers(dest="verb", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    seed = verbs.add_parser("seed", help="inspect seed files").add_subparsers(dest="action", required=True)
    p = seed.add_parser("show", formatter_class=fmt)
    p.add_argument("--seed", required=True, help="seed file or fixture name")
    p.set_defaults(handler=cmd_seed_show)
    p = seed.add_parser("check", formatter_class=fmt)
    p.add_argument("--seed", required=True)
    p.set_defaults(handler=cmd_seed_check)
    p = seed.add_parser("freeze", formatter_class=fmt)
    p.add_argument("--seed", required=True)
    p.add_argument("--at", type=_arg_vertices, required=True, help="vertices to freeze, e.g. 4 or 1,3")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=cmd_seed_freeze)
    p = seed.add_parser("opposite", formatter_class=fmt)
    p.add_argument("--seed", required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=cmd_seed_opposite)

    word = verbs.add_parser("word", help="seeds of signed words").add_subparsers(dest="action", required=True)
    p = word.add_parser("seed", formatter_class=fmt)
    _add_word_args(p)
    p.add_argument("--cartan", action=CartanAction, required=True, help="type name (a2, g2) or JSON file")
    p.add_argument("--kind", choices=("dot", "ddot", "ddot-op"), default="dot")
    p.add_argument("--coxeter", type=_arg_vertices, default=None, help="Coxeter word for the ddot positions")
    p.add_argument("--quantize", action="store_true", help="attach a compatible Λ")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=cmd_word_seed)
    p = word.add_parser("sigma", formatter_class=fmt)
    _add_word_args(p)
    p.set_defaults(handler=cmd_word_sigma)

    p = verbs.add_parser("mutate", formatter_class=fmt, help="mutate a seed")
    p.add_argument("--seed", required=True)
    p.add_argument("--at", type=int, action="append", required=True, help="mutation vertex, repeatable")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=cmd_mutate)

    p = verbs.add_parser("quantize", formatter_class=fmt, help="solve for a compatible Λ")
    p.add_argument("--seed", required=True)
    p.add_argument("--delta", type=_arg_delta, action="append", help="target δ_k as k=v, repeatable")
    p.add_argument("--default-delta", dest="default_delta", type=int, default=2, help="δ_k / d_k for vertices without --delta")
    p.add_argument("--pin", type=_arg_pin, action="append", help="fixed entry as i,j=v, e.g. -1,0=1")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=cmd_quantize)

    basis = verbs.add_parser("basis", help="triangular and standard bases").add_subparsers(dest="action", required=True)
    p = basis.add_parser("tri", formatter_class=fmt)
    p.add_argument("--seed", required=True)
    p.add_argument("--degree", type=_arg_degree, required=True, help='e.g. "{2:-1,6:1}"')
    p.add_argument("--order", type=int, default=6, help="truncation order")
    p.add_argument("--path", type=_arg_vertices, default=None, help="green-to-red sequence, when the file has no word")
    p.add_argument("--sigma", type=_arg_permutation, default=None, help='permutation, e.g. "{2:4, 4:2}"')
    p.add_argument("--freeze", type=_arg_vertices, default=None, help="apply the freezing operator at these vertices")
    p.set_defaults(handler=cmd_basis_tri)
    p = basis.add_parser("std", formatter_class=fmt)
    p.add_argument("--seed", required=True)
    p.add_argument("--w", dest="multiplicity", type=_arg_degree, required=True, help='multiplicities, e.g. "{1:1,3:1}"')
    p.add_argument("--order", choices=("lex", "revlex"), default="lex")
    p.add_argument("--truncation", type=int, default=6)
    p.set_defaults(handler=cmd_basis_std)
    p = basis.add_parser("straighten", formatter_class=fmt)
    p.add_argument("--seed", required=True)
    p.add_argument("--pair", type=int, nargs=2, default=None, metavar=("J", "K"), help="one pair; all pairs by default")
    p.add_argument("--truncation", type=int, default=8)
    p.set_defaults(handler=cmd_basis_straighten)

    verify = verbs.add_parser("verify", help="verification suites").add_subparsers(dest="action", required=True)
    p = verify.add_parser("minors", formatter_class=fmt)
    _add_word_args(p)
    p.add_argument("--seed", default=None, help="ddot seed of the word; built when omitted")
    p.add_argument("--cartan", action=CartanAction, default=None, help="defaults to type A of the largest letter")
    p.add_argument("--coxeter", type=_arg_vertices, default=None)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(handler=cmd_verify_minors)
    p = verify.add_parser("compat", formatter_class=fmt)
    p.add_argument("--seed", required=True)
    p.set_defaults(handler=cmd_verify_compat)
    p = verify.add_parser("mutations", formatter_class=fmt)
    p.add_argument("--seed", required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--length", type=int, default=8, help="longest random sequence")
    p.set_defaults(handler=cmd_verify_mutations)

    tower = verbs.add_parser("tower", help="good-subseed towers").add_subparsers(dest="action", required=True)
    for action, handler in (("build", cmd_tower_build), ("compute", cmd_tower_compute)):
        p = tower.add_parser(action, formatter_class=fmt)
        p.add_argument("--rule", choices=("ghl-a1", "word"), default="ghl-a1")
        p.add_argument("--radius", type=int, default=5)
        _add_word_args(p, required=False)
        p.add_argument("--cartan", action=CartanAction, default=None)
        p.add_argument("--delta", type=int, default=2, help="uniform δ of the quantization")
        p.add_argument("--pin", type=_arg_pin, action="append", help="pins of the first stage; -1,0=1 for ghl-a1")
        if action == "build":
            p.add_argument("--quantize", action="store_true")
        else:
            p.add_argument(
                "--query",
                choices=("lambda", "matrix", "triangular", "fundamental"),
                action="append",
                help="repeat to run several queries on one tower (default: lambda)",
            )
            p.add_argument("--window", type=_arg_window, required=True, help="a..b, e.g. -2..2")
            p.add_argument("--degree", type=_arg_degree, default=None, help="degree of L_m for --query triangular")
            p.add_argument("--order", type=int, default=6, help="truncation order for --query triangular")
            p.add_argument("--position", type=int, default=None, help="k of W_k for --query fundamental")
        p.set_defaults(handler=handler)

    p = verbs.add_parser("export", formatter_class=fmt, help="draw the quiver")
    p.add_argument("format", choices=("dot", "latex", "png"))
    p.add_argument("--seed", required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=cmd_export)
    return parser


VALUE_OPTIONS = frozenset({"--window", "--pin", "--delta", "--degree", "--w", "--at", "--path", "--freeze", "--coxeter"})


def join_negative_values(argv: Sequence[str]) -> list[str]:
    """
    Rewrite ``--window -2..2`` as ``--window=-2..2`` so argparse does not read the
    value as an option.
    """
    joined: list[str] = []
    tokens = iter(argv)
    for token in tokens:
        if token in VALUE_OPTIONS:
            value = next(tokens, None)
            if value is not None and value[:1] == "-" and value[1:2].isdigit():
                joined.append(f"{token}={value}")
                continue
            joined.append(token)
            if value is not None:
                joined.append(value)
            continue
        joined.append(token)
    return joined


def run(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    """
    Parse ``argv`` and run the command.

    :return: 0 on success, 1 on a domain error, 2 on a usage error.
    """
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(join_negative_values(sys.argv[1:] if argv is None else argv))
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        ctx = KitContext(args)
    except ValueError as exc:
        print(f"clusterkit: error: {exc}", file=sys.stderr)
        return 2
    setup_logging(ctx.verbose, args.log_file)
    logger.debug("%r", ctx)
    handler: Handler = args.handler
    try:
        return handler(args, ctx, out)
    except (ClusterKitError, ValueError) as exc:
        logger.debug("command failed", exc_info=True)
        print(f"clusterkit: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    """
    Entry point of the ``clusterkit`` command.

    Global flags come before the verb::

        clusterkit -v 3 --json tower compute --rule ghl-a1 --radius 5 --window=-2..2
    """
    sys.exit(run())


if __name__ == "__main__":
    main()
