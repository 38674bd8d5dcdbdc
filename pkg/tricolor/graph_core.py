"""
Graph and coloring data model, the vertex-violation penalty, and DIMACS `.col` persistence.

Vertices are 0-indexed in memory and 1-indexed in DIMACS files. Colors are 1, 2, 3 with
0 meaning "uncolored".
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, asdict
from decimal import Decimal
from pathlib import Path
from typing import BinaryIO, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from tricolor.errors import ContractViolation, DimacsParseError

logger = logging.getLogger(__name__)

UNCOLORED = 0
COLORS = (1, 2, 3)
GRAPH_TYPES = ("uni", "eq", "flat")

Edge = Tuple[int, int]


def format_p(p: float) -> str:
    """Shortest exact decimal label for an edge probability (0.014 -> '0.014')."""
    return format(Decimal(repr(float(p))).normalize(), "f")


@dataclass(frozen=True)
class GraphMeta:
    """Generation descriptor: type t, edge probability p, variability delta, seed s."""

    graph_type: Optional[str] = None
    p: Optional[float] = None
    delta: int = 0
    seed: Optional[int] = None

    @property
    def is_generated(self) -> bool:
        return self.graph_type is not None and self.p is not None and self.seed is not None

    def instance_id(self, n: int) -> str:
        if not self.is_generated:
            return f"graph_{n}"
        name = f"{self.graph_type}_{n}_{format_p(self.p)}_{self.seed}"
        if self.delta:
            name += f"_d{self.delta}"
        return name


class Graph:
    """Immutable undirected simple graph with an optional planted 3-partition."""

    __slots__ = (
        "n", "edges", "adjacency", "planted_partition", "meta",
        "_edge_set", "_edge_array", "_degrees",
    )

    def __init__(
        self,
        n: int,
        edges: Iterable[Edge],
        planted_partition: Optional[Sequence[int]] = None,
        meta: Optional[GraphMeta] = None,
    ):
        if n < 0:
            raise ContractViolation(f"vertex count must be nonnegative, got {n}")
        normalized = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ContractViolation(f"self-loop on vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ContractViolation(f"edge ({i}, {j}) out of range for n={n}")
            key = (i, j) if i < j else (j, i)
            if key in normalized:
                raise ContractViolation(f"duplicate edge {key}")
            normalized.add(key)

        self.n = n
        self.edges: Tuple[Edge, ...] = tuple(sorted(normalized))
        self._edge_set = frozenset(self.edges)

        neighbors: List[List[int]] = [[] for _ in range(n)]
        for i, j in self.edges:
            neighbors[i].append(j)
            neighbors[j].append(i)
        self.adjacency: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(nb)) for nb in neighbors)

        self._edge_array = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        self._edge_array.setflags(write=False)
        self._degrees = np.array([len(nb) for nb in self.adjacency], dtype=np.int64)
        self._degrees.setflags(write=False)

        if planted_partition is not None:
            planted = tuple(int(c) for c in planted_partition)
            if len(planted) != n:
                raise ContractViolation(
                    f"planted partition has {len(planted)} labels for {n} vertices"
                )
            if any(c not in (0, 1, 2) for c in planted):
                raise ContractViolation("planted partition labels must be in {0, 1, 2}")
            for i, j in self.edges:
                if planted[i] == planted[j]:
                    raise ContractViolation(f"edge ({i}, {j}) lies inside planted class {planted[i]}")
            self.planted_partition: Optional[Tuple[int, ...]] = planted
        else:
            self.planted_partition = None
        self.meta = meta or GraphMeta()

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    @property
    def edge_array(self) -> np.ndarray:
        """(m, 2) int array of edges with i < j."""
        return self._edge_array

    @property
    def max_degree(self) -> int:
        return int(self._degrees.max()) if self.n else 0

    @property
    def instance_id(self) -> str:
        """Generator name, or `graph_{n}_{fingerprint}` when the graph carries no generator meta."""
        if self.meta.is_generated:
            return self.meta.instance_id(self.n)
        return f"{self.meta.instance_id(self.n)}_{self.fingerprint()}"

    def fingerprint(self) -> str:
        """Short hash of the vertex count and edge set."""
        digest = hashlib.sha256(str(self.n).encode("ascii"))
        digest.update(self._edge_array.astype("<i8").tobytes())
        return digest.hexdigest()[:10]

    def degree(self, v: int) -> int:
        return int(self._degrees[v])

    def has_edge(self, i: int, j: int) -> bool:
        return ((i, j) if i < j else (j, i)) in self._edge_set

    def planted_coloring(self) -> Optional["Coloring"]:
        if self.planted_partition is None:
            return None
        return Coloring([c + 1 for c in self.planted_partition])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.edges == other.edges
            and self.planted_partition == other.planted_partition
            and self.meta == other.meta
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, id={self.instance_id!r})"


class Coloring:
    """Per-vertex color assignment in {UNCOLORED, 1, 2, 3}."""

    __slots__ = ("assignment",)

    def __init__(self, assignment: Union[Sequence[int], np.ndarray]):
        arr = np.array(assignment, dtype=np.int8).reshape(-1)
        if arr.size and (arr.min() < UNCOLORED or arr.max() > COLORS[-1]):
            raise ContractViolation("colors must be in {0 (uncolored), 1, 2, 3}")
        self.assignment = arr

    @classmethod
    def empty(cls, n: int) -> "Coloring":
        return cls(np.zeros(n, dtype=np.int8))

    def __len__(self) -> int:
        return int(self.assignment.size)

    def __getitem__(self, v: int) -> int:
        return int(self.assignment[v])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Coloring):
            return NotImplemented
        return np.array_equal(self.assignment, other.assignment)

    def __repr__(self) -> str:
        return f"Coloring({self.to_list()})"

    @property
    def num_uncolored(self) -> int:
        return int(np.count_nonzero(self.assignment == UNCOLORED))

    def to_list(self) -> List[int]:
        return [int(c) for c in self.assignment]

    def copy(self) -> "Coloring":
        return Coloring(self.assignment.copy())


def _checked_colors(g: Graph, col: Coloring) -> np.ndarray:
    if len(col) != g.n:
        raise ContractViolation(f"coloring has length {len(col)} but graph has {g.n} vertices")
    return col.assignment


def violating_vertices(g: Graph, col: Coloring) -> np.ndarray:
    """Boolean mask of vertices that are uncolored or share a color with a neighbor."""
    colors = _checked_colors(g, col)
    violating = colors == UNCOLORED
    if g.m:
        u, v = g.edge_array[:, 0], g.edge_array[:, 1]
        bad = (colors[u] == colors[v]) & (colors[u] != UNCOLORED)
        violating[u[bad]] = True
        violating[v[bad]] = True
    return violating


def penalty(g: Graph, col: Coloring) -> int:
    """
    Number of vertices violating at least one edge constraint or left uncolored.

    Returns 0 iff the coloring is proper.
    """
    return int(np.count_nonzero(violating_vertices(g, col)))


def is_proper(g: Graph, col: Coloring) -> bool:
    return penalty(g, col) == 0


def conflicting_edges(g: Graph, col: Coloring) -> int:
    """Number of edges whose endpoints carry the same (non-zero) color."""
    colors = _checked_colors(g, col)
    if not g.m:
        return 0
    cu = colors[g.edge_array[:, 0]]
    cv = colors[g.edge_array[:, 1]]
    return int(np.count_nonzero((cu == cv) & (cu != UNCOLORED)))


# ---------------------------------------------------------------------------
# DIMACS persistence
# ---------------------------------------------------------------------------

def write_dimacs(g: Graph, sink: BinaryIO) -> None:
    """Write `g` in DIMACS edge format; planted classes and meta go into comment lines."""
    lines = []
    meta = {k: v for k, v in asdict(g.meta).items() if v is not None}
    if g.meta != GraphMeta():
        fields = []
        for key, value in meta.items():
            if key == "p":
                value = format_p(value)
            fields.append(f"{key}={value}")
        lines.append("c meta " + " ".join(fields))
    if g.planted_partition is not None:
        lines.append("c planted " + " ".join(str(c) for c in g.planted_partition))
    lines.append(f"p edge {g.n} {g.m}")
    lines.extend(f"e {i + 1} {j + 1}" for i, j in g.edges)
    sink.write(("\n".join(lines) + "\n").encode("ascii"))


def _parse_meta(fields: List[str], line_no: int) -> GraphMeta:
    values: Dict[str, str] = {}
    for item in fields:
        key, sep, value = item.partition("=")
        if not sep:
            raise DimacsParseError(line_no, f"meta field {item!r} is not key=value")
        values[key] = value
    try:
        return GraphMeta(
            graph_type=values.get("graph_type"),
            p=float(values["p"]) if "p" in values else None,
            delta=int(values.get("delta", 0)),
            seed=int(values["seed"]) if "seed" in values else None,
        )
    except ValueError as exc:
        raise DimacsParseError(line_no, f"bad meta value: {exc}") from None


def read_dimacs(source: BinaryIO) -> Graph:
    """Parse a DIMACS `.col` stream. Errors name the offending line number."""
    n: Optional[int] = None
    declared_m = 0
    edges: List[Edge] = []
    seen = set()
    planted: Optional[List[int]] = None
    meta: Optional[GraphMeta] = None
    line_no = 0

    for line_no, raw in enumerate(source, start=1):
        try:
            line = raw.decode("ascii") if isinstance(raw, bytes) else raw
        except UnicodeDecodeError:
            raise DimacsParseError(line_no, "non-ASCII content") from None
        entries = line.split()
        if not entries:
            continue
        tag = entries[0]
        if tag == "c":
            if len(entries) > 1 and entries[1] == "planted":
                try:
                    planted = [int(x) for x in entries[2:]]
                except ValueError:
                    raise DimacsParseError(line_no, "planted labels must be integers") from None
            elif len(entries) > 1 and entries[1] == "meta":
                meta = _parse_meta(entries[2:], line_no)
            continue
        if tag == "p":
            if n is not None:
                raise DimacsParseError(line_no, "second problem line")
            if len(entries) != 4 or entries[1] not in ("edge", "col"):
                raise DimacsParseError(line_no, f"malformed header {line.strip()!r}")
            try:
                n, declared_m = int(entries[2]), int(entries[3])
            except ValueError:
                raise DimacsParseError(line_no, f"malformed header {line.strip()!r}") from None
            if n < 0 or declared_m < 0:
                raise DimacsParseError(line_no, "negative counts in header")
            continue
        if tag == "e":
            if n is None:
                raise DimacsParseError(line_no, "edge before problem line")
            if len(entries) != 3:
                raise DimacsParseError(line_no, f"malformed edge {line.strip()!r}")
            try:
                i, j = int(entries[1]), int(entries[2])
            except ValueError:
                raise DimacsParseError(line_no, f"malformed edge {line.strip()!r}") from None
            if not (1 <= i <= n and 1 <= j <= n):
                raise DimacsParseError(line_no, f"vertex index out of range 1..{n} in {line.strip()!r}")
            if i == j:
                raise DimacsParseError(line_no, f"self-loop on vertex {i}")
            key = (i - 1, j - 1) if i < j else (j - 1, i - 1)
            if key in seen:
                raise DimacsParseError(line_no, f"duplicate edge {i} {j}")
            seen.add(key)
            edges.append(key)
            continue
        raise DimacsParseError(line_no, f"unknown line type {tag!r}")

    if n is None:
        raise DimacsParseError(line_no, "missing problem line 'p edge n m'")
    if declared_m != len(edges):
        logger.warning("header declares %d edges but %d were read", declared_m, len(edges))
    try:
        return Graph(n, edges, planted_partition=planted, meta=meta)
    except ContractViolation as exc:
        raise DimacsParseError(line_no, str(exc)) from None


def save_graph(g: Graph, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        write_dimacs(g, f)
    return path


def load_graph(path: Union[str, Path]) -> Graph:
    with open(path, "rb") as f:
        return read_dimacs(f)
