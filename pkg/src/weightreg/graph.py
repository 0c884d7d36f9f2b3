"""Simple undirected graphs, vertex partitions, file formats and generators."""
from __future__ import annotations

import io
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np


class GraphFormatError(ValueError):
    """Malformed edge-list or partition text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphValidationError(ValueError):
    """Structurally invalid graph or partition (self-loop, bad cover, ...)."""


def _canon(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple graph on vertices ``0..n-1``.

    Edges are stored as sorted ``(u, v)`` pairs with ``u < v``.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    _adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise GraphValidationError("vertex count must be non-negative")
        canon = set()
        for u, v in self.edges:
            if u == v:
                raise GraphValidationError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphValidationError(f"edge ({u}, {v}) out of range for n={self.n}")
            canon.add(_canon(int(u), int(v)))
        object.__setattr__(self, "edges", frozenset(canon))
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in canon:
            nbrs[u].append(v)
            nbrs[v].append(u)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(x)) for x in nbrs))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        return cls(n, frozenset(_canon(u, v) for u, v in edges))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self._adj[u]

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency_matrix(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for u, v in self.edges:
            A[u, v] = A[v, u] = 1.0
        return A

    def is_regular(self) -> bool:
        return len({self.degree(u) for u in range(self.n)}) <= 1


@dataclass(frozen=True)
class VertexPartition:
    """Ordered partition of ``0..n-1`` into nonempty classes.

    Class order fixes the index ``i`` used by every quotient matrix. Each
    class is stored as a sorted tuple.
    """

    n: int
    classes: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        classes = tuple(tuple(sorted(int(u) for u in c)) for c in self.classes)
        if self.n < 1:
            raise GraphValidationError("partition needs at least one vertex")
        seen: set[int] = set()
        for i, c in enumerate(classes):
            if not c:
                raise GraphValidationError(f"class {i} is empty")
            for u in c:
                if not 0 <= u < self.n:
                    raise GraphValidationError(f"vertex {u} out of range for n={self.n}")
                if u in seen:
                    raise GraphValidationError(f"vertex {u} appears in more than one class")
                seen.add(u)
        if len(seen) != self.n:
            missing = sorted(set(range(self.n)) - seen)
            raise GraphValidationError(f"vertices not covered: {missing}")
        object.__setattr__(self, "classes", classes)

    @classmethod
    def from_labels(cls, labels: Iterable[int]) -> VertexPartition:
        """Build from a per-vertex class label; classes ordered by first occurrence."""
        labels = list(labels)
        order: dict[int, int] = {}
        buckets: list[list[int]] = []
        for u, lab in enumerate(labels):
            if lab not in order:
                order[lab] = len(buckets)
                buckets.append([])
            buckets[order[lab]].append(u)
        return cls(len(labels), tuple(tuple(b) for b in buckets))

    @classmethod
    def trivial(cls, n: int) -> VertexPartition:
        return cls(n, (tuple(range(n)),))

    @classmethod
    def singletons(cls, n: int) -> VertexPartition:
        return cls(n, tuple((u,) for u in range(n)))

    @property
    def m(self) -> int:
        return len(self.classes)

    def class_of(self) -> np.ndarray:
        """Per-vertex class index."""
        out = np.empty(self.n, dtype=int)
        for i, c in enumerate(self.classes):
            out[list(c)] = i
        return out

    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    def canonical(self) -> VertexPartition:
        """Same partition with classes ordered by smallest vertex."""
        return VertexPartition(self.n, tuple(sorted(self.classes)))

    def refines(self, other: VertexPartition) -> bool:
        """True when every class of ``self`` lies inside one class of ``other``."""
        lab = other.class_of()
        return all(len({lab[u] for u in c}) == 1 for c in self.classes)


# ---------------------------------------------------------------------------
# I/O


def _as_text(source: str | bytes | TextIO) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _parse_vertex(tok: str, lineno: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise GraphFormatError(f"expected a vertex id, got {tok!r}", lineno) from None
    if v < 0:
        raise GraphFormatError(f"negative vertex id {v}", lineno)
    return v


def load_edge_list(source: str | bytes | TextIO) -> Graph:
    """Parse the edge-list format.

    One ``u v`` pair per line, ``#`` starts a comment, and an optional
    ``n <count>`` line fixes the vertex count (otherwise ``1 + max id``).
    Repeated edges collapse to one.
    """
    text = _as_text(source)
    header_n: int | None = None
    edges: set[tuple[int, int]] = set()
    max_id = -1
    for lineno, line in _content_lines(text):
        parts = line.split()
        if parts[0] == "n":
            if len(parts) != 2 or header_n is not None:
                raise GraphFormatError("bad 'n <count>' header", lineno)
            header_n = _parse_vertex(parts[1], lineno)
            continue
        if len(parts) != 2:
            raise GraphFormatError(f"expected 'u v', got {line!r}", lineno)
        u, v = (_parse_vertex(t, lineno) for t in parts)
        if u == v:
            raise GraphValidationError(f"line {lineno}: self-loop at vertex {u}")
        edges.add(_canon(u, v))
        max_id = max(max_id, u, v)
    n = max_id + 1 if header_n is None else header_n
    if max_id >= n:
        raise GraphValidationError(f"vertex {max_id} exceeds header count n={n}")
    return Graph(n, frozenset(edges))


def save_edge_list(g: Graph, out: TextIO | None = None) -> str:
    buf = io.StringIO()
    buf.write(f"n {g.n}\n")
    for u, v in g.sorted_edges():
        buf.write(f"{u} {v}\n")
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def load_partition(source: str | bytes | TextIO, n: int) -> VertexPartition:
    """One class per line, vertex ids separated by whitespace."""
    classes = []
    for lineno, line in _content_lines(_as_text(source)):
        classes.append(tuple(_parse_vertex(t, lineno) for t in line.split()))
    return VertexPartition(n, tuple(classes))


def save_partition(p: VertexPartition, out: TextIO | None = None) -> str:
    text = "".join(" ".join(map(str, c)) + "\n" for c in p.classes)
    if out is not None:
        out.write(text)
    return text


# ---------------------------------------------------------------------------
# Structure


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return False
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == g.n


def is_bipartite(g: Graph) -> VertexPartition | None:
    """BFS 2-coloring; returns the two color classes or ``None``.

    Color 0 is given to the smallest vertex of each component, so for a
    connected graph class 0 is the side containing vertex 0. An edgeless
    single vertex has no bipartition.
    """
    color = [-1] * g.n
    for s in range(g.n):
        if color[s] != -1:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in g.neighbors(u):
                if color[v] == -1:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    return None
    sides = tuple(tuple(u for u in range(g.n) if color[u] == c) for c in (0, 1))
    if not all(sides):
        return None
    return VertexPartition(g.n, sides)


# ---------------------------------------------------------------------------
# Generators


def path(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def complete(n: int) -> Graph:
    return Graph.from_edges(n, ((i, j) for i in range(n) for j in range(i + 1, n)))


def complete_bipartite(a: int, b: int) -> Graph:
    """Sides ``0..a-1`` and ``a..a+b-1``."""
    return Graph.from_edges(a + b, ((i, a + j) for i in range(a) for j in range(b)))


def star(k: int) -> Graph:
    """Center 0 with ``k`` leaves."""
    return complete_bipartite(1, k)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def example1() -> Graph:
    """Nine-vertex graph carrying a three-class regular partition.

    Vertex 0 is a hub adjacent to the class ``{1, 2, 3, 4}``; the remaining
    edges form the 8-cycle ``1-5-2-6-3-7-4-8-1`` alternating between
    ``{1, 2, 3, 4}`` and ``{5, 6, 7, 8}``. Intersection numbers are
    b12=4, b21=1, b23=2, b32=2 and the Perron vector is (2, sqrt2, 1) blockwise.

    The weight-intersection numbers follow from ``b*_ij = (nu_j / nu_i) b_ij``:
    b*12 = 2*sqrt2, b*21 = sqrt2, b*23 = sqrt2, b*32 = 2*sqrt2. Some printed
    versions of this example give b*23 and b*32 twice as large, using a
    factor 4 where ``b23 = b32 = 2`` applies.
    """
    edges = [(0, v) for v in (1, 2, 3, 4)]
    ring = [1, 5, 2, 6, 3, 7, 4, 8]
    edges += [(ring[i], ring[(i + 1) % 8]) for i in range(8)]
    return Graph.from_edges(9, edges)


def example1_partition() -> VertexPartition:
    return VertexPartition(9, ((0,), (1, 2, 3, 4), (5, 6, 7, 8)))


def broom() -> Graph:
    """Path 0-1-2 with two extra leaves 3 and 4 on vertex 2."""
    return Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (2, 4)])


FAMILIES = {
    "path": (path, 1),
    "cycle": (cycle, 1),
    "complete": (complete, 1),
    "complete_bipartite": (complete_bipartite, 2),
    "star": (star, 1),
    "petersen": (petersen, 0),
    "example1": (example1, 0),
    "broom": (broom, 0),
}


def generate(family: str, *params: int) -> Graph:
    """Build a named deterministic graph, e.g. ``generate("cycle", 5)``."""
    try:
        fn, arity = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown graph family {family!r}") from None
    if len(params) != arity:
        raise ValueError(f"{family} takes {arity} parameter(s), got {len(params)}")
    if any(p < 1 for p in params):
        raise ValueError(f"{family} parameters must be positive")
    return fn(*params)


def random_connected_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Random spanning tree plus independent extra edges with probability ``p``."""
    edges = set()
    order = rng.permutation(n)
    for k in range(1, n):
        parent = order[rng.integers(0, k)]
        edges.add(_canon(int(order[k]), int(parent)))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.add((i, j))
    return Graph(n, frozenset(edges))


def random_partition(n: int, m: int, rng: np.random.Generator) -> VertexPartition:
    """Uniformly random labels onto exactly ``m`` nonempty classes."""
    m = max(1, min(m, n))
    labels = np.concatenate([np.arange(m), rng.integers(0, m, n - m)])
    rng.shuffle(labels)
    return VertexPartition.from_labels(labels.tolist())
