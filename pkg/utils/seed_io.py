import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from src.errors import SeedFileError
from src.seed import Seed
from src.word_seed import CartanData, SignedWord, parse_word

META_KEYS = ("name", "description", "word", "word_start", "cartan", "coxeter")
SEED_KEYS = ("vertices", "frozen", "d", "b", "lambda")


def seed_from_data(data: dict[str, Any]) -> Seed:
    """
    Build a seed from its canonical JSON form.

    :raises SeedFileError: On missing keys or invalid entries.
    """
    try:
        vertices = [int(i) for i in data["vertices"]]
        frozen = [int(i) for i in data.get("frozen", [])]
        d = {int(i): int(x) for i, x in data.get("d", {}).items()}
        b = {(int(i), int(j)): Fraction(int(num), int(den)) for i, j, num, den in data.get("b", [])}
        lam = None
        if "lambda" in data:
            lam = {(int(i), int(j)): int(x) for i, j, x in data["lambda"]}
        return Seed(tuple(vertices), frozenset(frozen), d, b, lam)
    except KeyError as exc:
        raise SeedFileError(f"seed data is missing {exc}") from exc
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SeedFileError(f"invalid seed data: {exc}") from exc


def read_fixture(path: str | Path) -> dict[str, Any]:
    """
    :raises SeedFileError: If the file is missing or not a JSON object.
    """
    try:
        with open(path, "r") as file:
            data = json.load(file)
    except FileNotFoundError as exc:
        raise SeedFileError(f"no such seed file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SeedFileError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SeedFileError(f"{path} does not hold a JSON object")
    return data


def load_seed(path: str | Path) -> Seed:
    return seed_from_data(read_fixture(path))


def load_word(data: dict[str, Any]) -> SignedWord | None:
    """
    The word stored in fixture metadata, if any.
    """
    if "word" not in data:
        return None
    return parse_word(str(data["word"]), int(data.get("word_start", 1)))


def seed_to_data(s: Seed, meta: dict[str, Any] | None = None) -> dict[str, Any]:
    data = {key: value for key, value in (meta or {}).items() if key in META_KEYS}
    data.update(s.canonical())
    return data


def format_seed(s: Seed, meta: dict[str, Any] | None = None) -> str:
    """
    Stable text form: one top-level key per line, one matrix entry per line.
    """
    data = seed_to_data(s, meta)
    lines = ["{"]
    items = list(data.items())
    for idx, (key, value) in enumerate(items):
        tail = "," if idx < len(items) - 1 else ""
        if key in ("b", "lambda") and value:
            lines.append(f"  {json.dumps(key)}: [")
            rows = [f"    {json.dumps(row)}" for row in value]
            lines.append(",\n".join(rows))
            lines.append(f"  ]{tail}")
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(value)}{tail}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dump_seed(s: Seed, path: str | Path, meta: dict[str, Any] | None = None) -> None:
    with open(path, "w") as file:
        file.write(format_seed(s, meta))


def load_cartan(spec: str) -> CartanData:
    """
    A Cartan type name (``a2``, ``g2``) or a JSON file with ``matrix`` rows and
    optional ``symmetrizers``.

    :raises SeedFileError: On an unknown name or malformed file.
    """
    if not spec.endswith(".json"):
        try:
            return CartanData.of_type(spec)
        except ValueError as exc:
            raise SeedFileError(str(exc)) from exc
    data = read_fixture(spec)
    try:
        return CartanData.from_matrix(data["matrix"], data.get("symmetrizers"))
    except (KeyError, TypeError, ValueError) as exc:
        raise SeedFileError(f"invalid Cartan file {spec}: {exc}") from exc
