"""
Exception hierarchy for clusterkit.

Every domain failure raised by the library derives from :class:`ClusterKitError`,
so the command line front-end can turn it into exit code 1 with a readable
message. Programming errors (bad argument types, malformed literals) keep
using the built-in ``TypeError`` / ``ValueError``.
"""


class ClusterKitError(Exception):
    """Base class of every domain error."""


class ChartMismatchError(ClusterKitError):
    """Two torus elements (or an element and a seed) live in different charts."""


class NotDivisibleError(ClusterKitError):
    """Exact division in a quantum torus has no Laurent quotient."""


class NotLaurentError(NotDivisibleError):
    """An element leaves the Laurent polynomial ring of the target chart."""


class NotPointedError(ClusterKitError):
    """An element is not pointed at a single degree (or its lead is not a power of v)."""


class FrozenVertexError(ClusterKitError):
    """A mutation (or unfrozen-only operation) was requested at a frozen vertex."""

    def __init__(self, vertex: int) -> None:
        super().__init__(f"vertex {vertex} is frozen")
        self.vertex: int = vertex


class IncompatibleSeedError(ClusterKitError):
    """
    The quantization matrix is not compatible with the exchange matrix.

    :ivar row: The vertex ``i`` where ``Λ·col_k`` has the wrong entry.
    :ivar column: The unfrozen vertex ``k``.
    """

    def __init__(self, message: str, row: int | None = None, column: int | None = None) -> None:
        super().__init__(message)
        self.row: int | None = row
        self.column: int | None = column


class InjectivityError(ClusterKitError):
    """The map p* is not injective on the unfrozen lattice (B̃ lacks full column rank)."""


class SimilarityError(ClusterKitError):
    """Two seeds are not similar, or degrees disagree on the unfrozen part."""


class SubseedError(ClusterKitError):
    """A good-subseed clause is violated; ``clause`` names it."""

    def __init__(self, message: str, clause: str) -> None:
        super().__init__(message)
        self.clause: str = clause


class QuantizationError(ClusterKitError):
    """A quantization could not be found or extended; ``hypothesis`` names the failing check."""

    def __init__(self, message: str, hypothesis: str = "") -> None:
        super().__init__(message)
        self.hypothesis: str = hypothesis


class WordError(ClusterKitError):
    """Invalid signed word or word operation."""


class SeedFileError(ClusterKitError):
    """Malformed seed or Cartan data file."""
