import io
import json
from pathlib import Path

import pytest

import grader
from src.clusterkit import run
from src.seed import mutate
from utils.quiver_visual import parse_dot_edges
from utils.seed_io import format_seed, seed_from_data

FIXTURES = sorted(p.stem for p in grader.FIXTURE_DIR.glob("*.json"))


def clusterkit(*argv: str) -> tuple[int, str]:
    out = io.StringIO()
    code = run(["-v", "0", *argv], out=out)
    return code, out.getvalue()


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_text_round_trip(name: str) -> None:
    data, s = grader.load_fixture(name)
    text = (grader.FIXTURE_DIR / f"{name}.json").read_text()
    assert format_seed(s, data) == text, f"{name} is not in canonical form"


def test_seed_show_and_check() -> None:
    code, text = clusterkit("seed", "show", "--seed", "sl2_op")
    assert code == 0
    assert "sl2_op" in text
    code, text = clusterkit("--json", "seed", "check", "--seed", "sl2_op")
    assert code == 0
    assert json.loads(text) == {"vertices": 3, "unfrozen": 1, "injective": True, "deltas": {"0": 2}}


def test_mutate_twice_restores_the_seed() -> None:
    data, s = grader.load_fixture("sl3_ddot")
    code, text = clusterkit("mutate", "--seed", "sl3_ddot", "--at", "1", "--at", "1")
    assert code == 0
    meta = {"name": data["name"], "description": data["description"]}
    assert text == format_seed(s, meta)
    code, text = clusterkit("mutate", "--seed", "sl3_ddot", "--at", "2")
    assert seed_from_data(json.loads(text)) == mutate(s, 2)


def test_mutate_writes_output_file(tmp_path: Path) -> None:
    target = tmp_path / "mutated.json"
    code, text = clusterkit("mutate", "--seed", "sl2_op", "--at", "0", "-o", str(target))
    assert code == 0 and text == ""
    code, text = clusterkit("mutate", "--seed", str(target), "--at", "0")
    _, s = grader.load_fixture("sl2_op")
    assert seed_from_data(json.loads(text)) == s


def test_word_commands() -> None:
    code, text = clusterkit("word", "seed", "--word", "1,-1", "--start", "0", "--cartan", "a1", "--kind", "ddot")
    assert code == 0
    _, expected = grader.load_fixture("sl2_ddot")
    grader.assert_same_exchange_matrix(seed_from_data(json.loads(text)), expected, "word seed ddot")

    code, text = clusterkit("word", "sigma", "--word", "1,2,1,2,1,2")
    assert code == 0
    assert "1,3,2,4,1,2" in text
    assert "1->3, 2->4, 3->1, 4->2, 5->5, 6->6" in text

    code, _ = clusterkit("word", "sigma", "--word", "1,-2")
    assert code == 1


def test_quantize() -> None:
    code, text = clusterkit("--json", "quantize", "--seed", "sl2_ddot")
    assert code == 0
    payload = json.loads(text)
    assert payload["status"] == "not_unique"
    assert len(payload["free_directions"]) == 1

    code, text = clusterkit("--json", "quantize", "--seed", "sl2_ddot", "--pin=-1,0=1")
    payload = json.loads(text)
    assert payload["status"] == "unique"
    assert payload["seed"]["lambda"] == [[-1, 0, 1], [0, 1, -1]]

    code, _ = clusterkit("quantize", "--seed", "sl2_ddot", "--delta", "5=1")
    assert code == 1


def test_basis_tri() -> None:
    code, text = clusterkit("--json", "basis", "tri", "--seed", "a2_copy3_dot", "--degree", "{2:-1,6:1}", "--order", "4")
    assert code == 0
    payload = json.loads(text)
    assert payload["degree"] == {"2": -1, "6": 1}
    keys = {tuple(sorted(term["n"])) for term in payload["terms"]}
    assert keys == {(), ("2",), ("1", "2"), ("2", "4"), ("1", "2", "4"), ("1", "2", "3", "4")}

    code, text = clusterkit("basis", "tri", "--seed", "a2_copy3_dot", "--degree", "{2:-1,6:1}", "--order", "4", "--freeze", "4")
    assert code == 0
    assert text.startswith("deg: {2:-1, 6:1}; F: 1 + y[2]")


def test_tower_compute() -> None:
    code, text = clusterkit("tower", "compute", "--rule", "ghl-a1", "--radius", "5", "--window=-2..2")
    assert code == 0, text
    assert "Λ[-2,-1] = 1" in text
    assert "stable from stage 2" in text
    code, text = clusterkit("--json", "tower", "compute", "--radius", "4", "--window=-2..2", "--query", "matrix")
    payload = json.loads(text)
    assert payload["stable_stage"] == 3
    assert ["-1", "0", "1"] not in payload["entries"]
    assert [-1, 0, "1"] in payload["entries"]


def test_tower_compute_accepts_spaced_negative_values() -> None:
    code, text = clusterkit("tower", "compute", "--query", "lambda", "--window", "-2..2", "--pin", "-1,0=1")
    assert code == 0, text
    assert "Λ[-2,-1] = 1" in text
    code, _ = clusterkit("quantize", "--seed", "sl2_ddot", "--pin", "-1,0=1")
    assert code == 0


def test_tower_compute_runs_several_queries() -> None:
    code, text = clusterkit(
        "--json", "--jobs", "2", "tower", "compute", "--radius", "4", "--window", "-2..2", "--query", "lambda", "--query", "matrix"
    )
    assert code == 0, text
    payload = json.loads(text)
    assert [p["query"] for p in payload] == ["lambda", "matrix"]
    assert payload[1]["stable_stage"] == 3


def test_tower_compute_word_queries() -> None:
    word = ["--rule", "word", "--word", "1,2,3", "--cartan", "a3", "--radius", "2", "--window", "1..3"]
    code, text = clusterkit("tower", "compute", *word, "--query", "fundamental", "--position", "2")
    assert code == 0, text
    assert text.splitlines()[0].split() == ["degree:", "{2:1}"]
    assert "stable from stage 1" in text
    word = ["--rule", "word", "--word", "1,2", "--cartan", "a2", "--radius", "3", "--window", "1..2"]
    code, text = clusterkit("--json", "tower", "compute", *word, "--query", "triangular", "--degree", "{}", "--order", "4")
    assert code == 0, text
    payload = json.loads(text)
    assert payload["query"] == "triangular"
    assert payload["stable_stage"] == 1
    assert list(payload["fpoly"].values()) == ["1"]


def test_export_dot() -> None:
    _, s = grader.load_fixture("a2_copy3_dot")
    code, text = clusterkit("export", "dot", "--seed", "a2_copy3_dot")
    assert code == 0
    assert text.startswith("digraph a2_copy3_dot {")
    assert parse_dot_edges(text) == {key: x for key, x in s.b.items() if x > 0}


def test_verify_suites() -> None:
    code, text = clusterkit("--jobs", "2", "verify", "minors", "--word", "1,-1,2,-2,1,-1", "--samples", "10")
    assert code == 0, text
    assert "x_0 = Δ_{12,23}" in text
    code, _ = clusterkit("verify", "compat", "--seed", "ghl_a1_window")
    assert code == 0
    code, text = clusterkit("--json", "verify", "mutations", "--seed", "sl3_dbs_op", "--samples", "10")
    assert code == 0
    assert json.loads(text)["failures"] == []


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["spin"], 2),
        (["--jobs", "0", "seed", "show", "--seed", "sl2_op"], 2),
        (["tower", "compute", "--window", "2"], 2),
        (["tower", "compute", "--window", "1..2", "--query", "fundamental", "--position", "1"], 1),
        (["seed", "show", "--seed", "no_such_seed"], 1),
        (["mutate", "--seed", "sl2_op", "--at", "1"], 1),
        (["verify", "compat", "--seed", "sl2_ddot"], 1),
        (["seed", "freeze", "--seed", "sl2_op", "--at", "-1"], 1),
    ],
)
def test_exit_codes(argv: list[str], expected: int) -> None:
    code, _ = clusterkit(*argv)
    assert code == expected
