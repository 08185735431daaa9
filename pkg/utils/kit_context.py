import os
from pathlib import Path

FIXTURES_ENV = "CLUSTERKIT_FIXTURES"
DEFAULT_FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


class KitContext:
    """
    Runtime configuration of one command-line invocation.

    Built from the parsed arguments; the fixture directory comes from
    ``CLUSTERKIT_FIXTURES`` when set.

    :ivar fixture_dir: Directory holding the versioned seed fixtures.
    :ivar verbose: The verbosity level for logging.
    :ivar json_output: Emit machine-readable JSON instead of text.
    :ivar rng_seed: Seed of every random generator used by the command.
    :ivar jobs: Worker count for verification suites and tower queries.
    """

    def __init__(self, args) -> None:
        """
        :param args: The namespace returned by :func:`argparse.ArgumentParser.parse_args`.
                     Reads ``verbose``, ``json``, ``rng_seed`` and ``jobs`` when present.
        :raises ValueError: If ``jobs`` is not positive.
        """
        self.fixture_dir: Path = Path(os.environ.get(FIXTURES_ENV, DEFAULT_FIXTURES))
        self.verbose: int = getattr(args, "verbose", 2)
        self.json_output: bool = getattr(args, "json", False)
        self.rng_seed: int = getattr(args, "rng_seed", 0)
        self.jobs: int = getattr(args, "jobs", 1)
        if self.jobs < 1:
            raise ValueError(f"--jobs must be positive, got {self.jobs}")

    def fixture_path(self, name: str) -> Path:
        """
        Resolve a fixture name or a path.

        :param name: ``"sl3_ddot"`` resolves to ``<fixture_dir>/sl3_ddot.json``;
                     an existing file path is returned unchanged.
        """
        candidate = Path(name)
        if candidate.suffix == ".json" and candidate.exists():
            return candidate
        return self.fixture_dir / f"{name.removesuffix('.json')}.json"

    def __str__(self) -> str:
        lines = [
            "CLUSTERKIT RUN",
            f"{'fixture-dir:':<16} {self.fixture_dir}",
            f"{'verbose:':<16} {self.verbose}",
            f"{'json:':<16} {self.json_output}",
            f"{'rng-seed:':<16} {self.rng_seed}",
            f"{'jobs:':<16} {self.jobs}",
        ]
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"KitContext(fixture_dir={str(self.fixture_dir)!r}, rng_seed={self.rng_seed}, jobs={self.jobs})"
