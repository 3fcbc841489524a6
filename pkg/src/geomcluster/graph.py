"""Undirected integer-weighted graphs: representation, edge-list IO, generators."""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

INF = math.inf
INT64_MAX = 2**63 - 1

Edge = tuple[int, int, int]


class EdgeListError(ValueError):
    """Base class for edge-list parse errors; carries the 1-based line number."""

    kind = "parse error"

    def __init__(self, lineno: int, detail: str):
        self.lineno = lineno
        self.detail = detail
        super().__init__(f"line {lineno}: {self.kind}: {detail}")


class MalformedLineError(EdgeListError):
    kind = "malformed line"


class VertexRangeError(EdgeListError):
    kind = "vertex id out of range"


class DuplicateEdgeError(EdgeListError):
    kind = "duplicate edge"


class SelfLoopError(EdgeListError):
    kind = "self-loop"


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph on vertices ``0..n-1``.

    ``edges`` holds each edge once as ``(u, v, w)`` with ``u < v`` and ``w >= 1``.
    """

    n: int
    edges: tuple[Edge, ...] = ()
    _weights: dict[tuple[int, int], int] = field(
        init=False, repr=False, compare=False, hash=False
    )
    adj: tuple[tuple[tuple[int, int], ...], ...] = field(
        init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        weights: dict[tuple[int, int], int] = {}
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        norm = []
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), int(w)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if u > v:
                u, v = v, u
            if not (0 <= u and v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range for n={self.n}")
            if w < 1:
                raise ValueError(f"edge ({u},{v}) has non-positive weight {w}")
            if (u, v) in weights:
                raise ValueError(f"duplicate edge ({u},{v})")
            weights[(u, v)] = w
            adj[u].append((v, w))
            adj[v].append((u, w))
            norm.append((u, v, w))
        object.__setattr__(self, "edges", tuple(sorted(norm)))
        object.__setattr__(self, "_weights", weights)
        object.__setattr__(self, "adj", tuple(tuple(sorted(a)) for a in adj))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def w_max(self) -> int:
        return max((w for _, _, w in self.edges), default=1)

    @property
    def is_unweighted(self) -> bool:
        return self.w_max == 1

    def neighbors(self, v: int) -> list[int]:
        return [u for u, _ in self.adj[v]]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._weights

    def weight(self, u: int, v: int) -> int:
        return self._weights[(min(u, v), max(u, v))]

    def subgraph_edges(self, keep: Iterable[tuple[int, int]]) -> "Graph":
        """Spanning subgraph on the same vertex set with only the given edges."""
        chosen = {(min(u, v), max(u, v)) for u, v in keep}
        return Graph(self.n, tuple((u, v, self._weights[(u, v)]) for u, v in sorted(chosen)))

    def unweighted(self) -> "Graph":
        if self.is_unweighted:
            return self
        return Graph(self.n, tuple((u, v, 1) for u, v, _ in self.edges))

    def to_csr(self):
        """Symmetric scipy CSR matrix of edge weights."""
        from scipy.sparse import csr_matrix

        if not self.edges:
            return csr_matrix((self.n, self.n), dtype=np.float64)
        arr = np.asarray(self.edges, dtype=np.int64)
        rows = np.concatenate([arr[:, 0], arr[:, 1]])
        cols = np.concatenate([arr[:, 1], arr[:, 0]])
        data = np.concatenate([arr[:, 2], arr[:, 2]]).astype(np.float64)
        return csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def components(self) -> list[int]:
        """Label each vertex with the minimum vertex ID of its connected component."""
        label = [-1] * self.n
        for s in range(self.n):
            if label[s] != -1:
                continue
            label[s] = s
            stack = [s]
            while stack:
                x = stack.pop()
                for y, _ in self.adj[x]:
                    if label[y] == -1:
                        label[y] = s
                        stack.append(y)
        return label

    # serialization

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, obj: dict | str) -> "Graph":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(int(obj["n"]), tuple(tuple(e) for e in obj["edges"]))


def load_edge_list(text: str | Iterable[str]) -> Graph:
    """Parse ``n m`` followed by ``m`` lines of ``u v [w]``.

    Blank lines and ``#`` comments are skipped. Each kind of problem raises its
    own :class:`EdgeListError` subclass naming the offending line.
    """
    lines = text.splitlines() if isinstance(text, str) else list(text)
    records: list[tuple[int, list[str]]] = []
    for i, raw in enumerate(lines, start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            records.append((i, body.split()))
    if not records:
        raise MalformedLineError(1, "missing header 'n m'")

    lineno, head = records[0]
    if len(head) != 2:
        raise MalformedLineError(lineno, "header must be 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise MalformedLineError(lineno, "header must contain two integers") from None
    if n < 1 or m < 0:
        raise MalformedLineError(lineno, f"invalid header n={n} m={m}")

    body = records[1:]
    if len(body) != m:
        where = body[m][0] if len(body) > m else (body[-1][0] if body else lineno)
        raise MalformedLineError(where, f"header declares {m} edges, found {len(body)}")

    seen: set[tuple[int, int]] = set()
    edges: list[Edge] = []
    for lineno, tok in body:
        if len(tok) not in (2, 3):
            raise MalformedLineError(lineno, "expected 'u v' or 'u v w'")
        try:
            u, v = int(tok[0]), int(tok[1])
            w = int(tok[2]) if len(tok) == 3 else 1
        except ValueError:
            raise MalformedLineError(lineno, "non-integer field") from None
        if w < 1:
            raise MalformedLineError(lineno, f"weight must be >= 1, got {w}")
        if not (0 <= u < n and 0 <= v < n):
            raise VertexRangeError(lineno, f"({u},{v}) with n={n}")
        if u == v:
            raise SelfLoopError(lineno, f"vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdgeError(lineno, f"({key[0]},{key[1]})")
        seen.add(key)
        edges.append((key[0], key[1], w))
    return Graph(n, tuple(edges))


def dump_edge_list(g: Graph, *, weights: bool | None = None) -> str:
    """Serialize in the format read by :func:`load_edge_list`.

    Weights are written unless the graph is unweighted (override with ``weights``).
    """
    if weights is None:
        weights = not g.is_unweighted
    out = [f"{g.n} {g.m}"]
    for u, v, w in g.edges:
        out.append(f"{u} {v} {w}" if weights else f"{u} {v}")
    return "\n".join(out) + "\n"


# generators


def _check_wmax(w_max: int) -> None:
    if w_max < 1:
        raise ValueError("w_max must be >= 1")


def gen_random(n: int, edge_prob: float, w_max: int = 1, seed: int = 0) -> Graph:
    """Erdős–Rényi G(n, edge_prob) with weights uniform in ``1..w_max``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= edge_prob <= 1.0:
        raise ValueError("edge_prob must lie in [0, 1]")
    _check_wmax(w_max)
    rng = np.random.Generator(np.random.PCG64(seed))
    iu, ju = np.triu_indices(n, k=1)
    present = rng.random(iu.size) < edge_prob
    weights = rng.integers(1, w_max + 1, size=iu.size)
    edges = tuple(
        (int(u), int(v), int(w))
        for u, v, w in zip(iu[present], ju[present], weights[present])
    )
    return Graph(n, edges)


def gen_grid(width: int, height: int, w_max: int = 1, seed: int = 0) -> Graph:
    """``width x height`` grid; vertex ``(x, y)`` has ID ``y*width + x``."""
    if width < 1 or height < 1:
        raise ValueError("grid dimensions must be >= 1")
    _check_wmax(w_max)
    rng = np.random.Generator(np.random.PCG64(seed))
    pairs = []
    for y in range(height):
        for x in range(width):
            v = y * width + x
            if x + 1 < width:
                pairs.append((v, v + 1))
            if y + 1 < height:
                pairs.append((v, v + width))
    weights = rng.integers(1, w_max + 1, size=len(pairs))
    return Graph(width * height, tuple((u, v, int(w)) for (u, v), w in zip(pairs, weights)))


def gen_path(n: int, w_max: int = 1, seed: int = 0) -> Graph:
    _check_wmax(w_max)
    rng = np.random.Generator(np.random.PCG64(seed))
    weights = rng.integers(1, w_max + 1, size=max(n - 1, 0))
    return Graph(n, tuple((i, i + 1, int(weights[i])) for i in range(n - 1)))


def gen_star(n: int) -> Graph:
    """Star with center 0 and ``n - 1`` leaves."""
    return Graph(n, tuple((0, i, 1) for i in range(1, n)))


def gen_tree(n: int, seed: int = 0, w_max: int = 1) -> Graph:
    """Random recursive tree: vertex ``v`` attaches to a uniform earlier vertex."""
    _check_wmax(w_max)
    rng = np.random.Generator(np.random.PCG64(seed))
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.append((u, v, int(rng.integers(1, w_max + 1))))
    return Graph(n, tuple(edges))


def parse_gen_spec(spec: str) -> Graph:
    """Build a graph from an inline spec.

    Accepted forms: ``er:n:p[:wmax[:seed]]``, ``grid:w:h[:wmax[:seed]]``,
    ``path:n``, ``star:n``, ``tree:n:seed``.
    """
    kind, *args = spec.split(":")
    try:
        if kind == "er" and 2 <= len(args) <= 4:
            n, p = int(args[0]), float(args[1])
            w_max = int(args[2]) if len(args) > 2 else 1
            seed = int(args[3]) if len(args) > 3 else 0
            return gen_random(n, p, w_max, seed)
        if kind == "grid" and 2 <= len(args) <= 4:
            w_max = int(args[2]) if len(args) > 2 else 1
            seed = int(args[3]) if len(args) > 3 else 0
            return gen_grid(int(args[0]), int(args[1]), w_max, seed)
        if kind == "path" and len(args) == 1:
            return gen_path(int(args[0]))
        if kind == "star" and len(args) == 1:
            return gen_star(int(args[0]))
        if kind == "tree" and len(args) == 2:
            return gen_tree(int(args[0]), int(args[1]))
    except ValueError as exc:
        raise ValueError(f"bad generator spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown generator spec {spec!r}")


# shortest paths


def sssp(g: Graph, src: int) -> list[float | int]:
    """Exact single-source distances; unreachable vertices get :data:`INF`."""
    if not 0 <= src < g.n:
        raise ValueError(f"source {src} out of range")
    dist: list[float | int] = [INF] * g.n
    dist[src] = 0
    heap = [(0, src)]
    while heap:
        d, x = heapq.heappop(heap)
        if d > dist[x]:
            continue
        for y, w in g.adj[x]:
            nd = d + w
            if nd > INT64_MAX:
                raise OverflowError(f"distance to {y} exceeds 64-bit range")
            if nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return dist

