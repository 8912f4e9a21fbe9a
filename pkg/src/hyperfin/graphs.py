"""Finite graph substrate: simple graphs, functional graphs and framed windows.

Vertices are always ``0..n-1``.  A :class:`FramedGraph` is a finite window onto
an infinite graph: its ``frontier`` vertices have truncated neighborhoods, and
constructions must not rely on those neighborhoods being complete.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .groups import GroupSpec, Word, ball

__all__ = [
    "SimpleGraph",
    "FramedGraph",
    "FunctionalGraph",
    "Coloring",
    "EdgeSubset",
    "Partition",
    "greedy_coloring",
    "three_color_functional",
    "forward_recurrent_set",
    "components",
    "contract",
    "functional_quotient",
    "power_graph_2",
    "cayley_ball_graph",
    "random_functional_graph",
    "random_bounded_degree_graph",
    "path_graph",
    "cycle_graph",
    "to_dot",
]


@dataclass(frozen=True, eq=False)
class SimpleGraph:
    """Undirected graph with sorted neighbor lists.

    With ``loops=True`` every vertex carries a loop: its neighborhood
    (:meth:`neighborhood`) contains the vertex itself.  Loops are never stored
    in ``adjacency``.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    loops: bool = False

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], loops: bool = False) -> SimpleGraph:
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for {n} vertices")
            if u == v:
                if not loops:
                    raise ValueError(f"loop at {u} in a loop-free graph")
                continue
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs), loops)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((u, v) for u in range(self.n) for v in self.adjacency[u] if u < v)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def edge_array(self) -> np.ndarray:
        return np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, x: int) -> int:
        return len(self.adjacency[x])

    @cached_property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def neighborhood(self, x: int) -> tuple[int, ...]:
        """G(x): the neighbors of x, including x itself when loops are on."""
        if not self.loops:
            return self.adjacency[x]
        return tuple(sorted((x,) + self.adjacency[x]))

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return self.loops
        return (min(u, v), max(u, v)) in self.edge_index

    def distances_from(self, sources: Iterable[int]) -> list[int]:
        """BFS distances (-1 where unreachable)."""
        dist = [-1] * self.n
        q = deque()
        for s in sources:
            if dist[s] < 0:
                dist[s] = 0
                q.append(s)
        while q:
            x = q.popleft()
            for y in self.adjacency[x]:
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    q.append(y)
        return dist

    def is_acyclic(self) -> bool:
        return self.m == self.n - components(self).count

    def induced(self, vertices: Iterable[int]) -> tuple[SimpleGraph, list[int]]:
        """Induced subgraph relabelled in increasing vertex order, plus the old ids."""
        keep = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(keep)}
        edges = [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos]
        return SimpleGraph.from_edges(len(keep), edges, self.loops), keep

    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha256(f"{self.n}:{int(self.loops)}:".encode())
        h.update(self.edge_array.tobytes())
        return h.hexdigest()

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges], "loops": self.loops}

    @classmethod
    def from_json(cls, data: dict) -> SimpleGraph:
        return cls.from_edges(int(data["n"]), [tuple(e) for e in data["edges"]], bool(data.get("loops", False)))


@dataclass(frozen=True, eq=False)
class FramedGraph:
    graph: SimpleGraph
    frontier: frozenset[int] = frozenset()
    labels: tuple[Word, ...] | None = None

    def __post_init__(self) -> None:
        if any(not 0 <= v < self.graph.n for v in self.frontier):
            raise ValueError("frontier vertices must be vertices of the graph")
        if self.labels is not None and len(self.labels) != self.graph.n:
            raise ValueError("one label per vertex is required")

    @property
    def n(self) -> int:
        return self.graph.n

    def interior(self) -> list[int]:
        return [v for v in range(self.graph.n) if v not in self.frontier]

    @cached_property
    def index(self) -> dict[Word, int]:
        if self.labels is None:
            raise ValueError("graph has no vertex labels")
        return {w: i for i, w in enumerate(self.labels)}

    def to_json(self) -> dict:
        out = self.graph.to_json()
        out["frontier"] = sorted(self.frontier)
        if self.labels is not None:
            out["group"] = self.labels[0].spec.to_json()
            out["labels"] = [str(w) for w in self.labels]
        return out

    @classmethod
    def from_json(cls, data: dict) -> FramedGraph:
        labels = None
        if "labels" in data:
            spec = GroupSpec.from_json(data["group"])
            labels = tuple(spec.word(t) for t in data["labels"])
        return cls(SimpleGraph.from_json(data), frozenset(data.get("frontier", ())), labels)


@dataclass(frozen=True, eq=False)
class FunctionalGraph:
    """A map x -> succ[x] without fixed points and at most ``fanin_bound`` preimages per vertex.

    ``succ[x] == -1`` marks a terminal vertex; these only arise as quotients
    in which a whole cycle collapsed into one class.
    """

    succ: tuple[int, ...]
    fanin_bound: int

    def __post_init__(self) -> None:
        n = len(self.succ)
        counts = [0] * n
        for x, y in enumerate(self.succ):
            if y == x:
                raise ValueError(f"{x} is a fixed point")
            if not -1 <= y < n:
                raise ValueError(f"successor {y} of {x} out of range")
            if y >= 0:
                counts[y] += 1
        if n and max(counts) > self.fanin_bound:
            raise ValueError(f"fanin {max(counts)} exceeds bound {self.fanin_bound}")

    @classmethod
    def from_succ(cls, succ: Sequence[int], fanin_bound: int | None = None) -> FunctionalGraph:
        succ = tuple(int(y) for y in succ)
        if fanin_bound is None:
            fanin_bound = _max_fanin(succ)
        return cls(succ, fanin_bound)

    @property
    def n(self) -> int:
        return len(self.succ)

    @cached_property
    def succ_array(self) -> np.ndarray:
        return np.asarray(self.succ, dtype=np.int64)

    @property
    def fanin(self) -> int:
        return _max_fanin(self.succ)

    @property
    def terminals(self) -> list[int]:
        return [x for x, y in enumerate(self.succ) if y < 0]

    @cached_property
    def graph(self) -> SimpleGraph:
        """The undirected graph G_f with edges {x, f(x)}."""
        return SimpleGraph.from_edges(self.n, ((x, y) for x, y in enumerate(self.succ) if y >= 0))

    def to_json(self) -> dict:
        return {"succ": list(self.succ), "fanin": self.fanin_bound}

    @classmethod
    def from_json(cls, data: dict) -> FunctionalGraph:
        return cls(tuple(int(y) for y in data["succ"]), int(data["fanin"]))


def _max_fanin(succ: Sequence[int]) -> int:
    counts = [0] * len(succ)
    for y in succ:
        if 0 <= y < len(counts):
            counts[y] += 1
    return max(counts, default=0)


@dataclass(frozen=True)
class Coloring:
    colors: tuple[int, ...]

    @property
    def num_colors(self) -> int:
        return len(set(self.colors))

    def is_proper(self, g: SimpleGraph) -> bool:
        return all(self.colors[u] != self.colors[v] for u, v in g.edges)


@dataclass(frozen=True, eq=False)
class EdgeSubset:
    host: SimpleGraph
    mask: np.ndarray

    def __post_init__(self) -> None:
        if self.mask.shape != (self.host.m,):
            raise ValueError("edge mask must have one entry per host edge")

    @classmethod
    def from_edges(cls, host: SimpleGraph, edges: Iterable[tuple[int, int]]) -> EdgeSubset:
        mask = np.zeros(host.m, dtype=bool)
        idx = host.edge_index
        for u, v in edges:
            key = (min(u, v), max(u, v))
            if key not in idx:
                raise ValueError(f"{key} is not an edge of the host")
            mask[idx[key]] = True
        return cls(host, mask)

    @classmethod
    def full(cls, host: SimpleGraph) -> EdgeSubset:
        return cls(host, np.ones(host.m, dtype=bool))

    @classmethod
    def empty(cls, host: SimpleGraph) -> EdgeSubset:
        return cls(host, np.zeros(host.m, dtype=bool))

    def edges(self) -> list[tuple[int, int]]:
        return [self.host.edges[i] for i in np.flatnonzero(self.mask)]

    def __len__(self) -> int:
        return int(self.mask.sum())

    def issubset(self, other: EdgeSubset) -> bool:
        return bool(np.all(~self.mask | other.mask))


@dataclass(frozen=True, eq=False)
class Partition:
    """Vertex classes numbered 0..count-1 in order of their smallest member."""

    labels: np.ndarray
    count: int

    @classmethod
    def from_classes(cls, n: int, classes: Iterable[Iterable[int]]) -> Partition:
        raw = [-1] * n
        for i, members in enumerate(classes):
            for v in members:
                if raw[v] != -1:
                    raise ValueError(f"vertex {v} in two classes")
                raw[v] = i
        if -1 in raw:
            raise ValueError("classes do not cover every vertex")
        return cls.from_labels(raw)

    @classmethod
    def from_labels(cls, raw: Sequence[int]) -> Partition:
        index: dict[int, int] = {}
        out = np.empty(len(raw), dtype=np.int64)
        for x, r in enumerate(raw):
            out[x] = index.setdefault(int(r), len(index))
        return cls(out, len(index))

    @classmethod
    def discrete(cls, n: int) -> Partition:
        return cls(np.arange(n, dtype=np.int64), n)

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.count)]
        for x, c in enumerate(self.labels.tolist()):
            out[c].append(x)
        return out

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.count)

    def representatives(self) -> list[int]:
        return [members[0] for members in self.classes()]


def greedy_coloring(g: SimpleGraph, order: Sequence[int] | None = None) -> Coloring:
    """First-fit coloring along ``order``; at most max_degree + 1 colors."""
    if g.loops:
        raise ValueError("cannot properly color a graph with loops")
    order = range(g.n) if order is None else order
    if sorted(order) != list(range(g.n)):
        raise ValueError("order must be a permutation of the vertices")
    colors = [-1] * g.n
    for v in order:
        used = {colors[u] for u in g.adjacency[v]}
        c = 0
        while c in used:
            c += 1
        colors[v] = c
    return Coloring(tuple(colors))


def three_color_functional(fg: FunctionalGraph) -> Coloring:
    return Coloring(tuple(int(c) for c in kernels.three_color(fg.succ_array)))


def forward_recurrent_set(fg: FunctionalGraph, c: Coloring) -> frozenset[int]:
    """Vertices x whose colors along x, f(x), f^2(x) start with 02, 12 or 010.

    For a proper coloring with colors in {0, 1, 2} the set is independent in
    G_f and every orbit x, f(x), f^2(x), f^3(x) meets it.
    """
    if len(c.colors) != fg.n:
        raise ValueError("coloring has the wrong length")
    if any(col not in (0, 1, 2) for col in c.colors):
        raise ValueError("coloring must use colors 0, 1, 2")
    for x, y in enumerate(fg.succ):
        if y >= 0 and c.colors[x] == c.colors[y]:
            raise ValueError(f"coloring is not proper on edge ({x}, {y})")
    mask = kernels.recurrent_mask(fg.succ_array, np.asarray(c.colors, dtype=np.int64))
    return frozenset(np.flatnonzero(mask).tolist())


def components(g: SimpleGraph, e: EdgeSubset | None = None) -> Partition:
    """Connected components of (V, e); all of g's edges when e is None."""
    if e is None:
        arr = g.edge_array
    else:
        if e.host is not g and e.host.fingerprint() != g.fingerprint():
            raise ValueError("edge subset belongs to a different host")
        arr = g.edge_array[e.mask]
    labels, k = kernels.component_labels(g.n, arr[:, 0], arr[:, 1])
    return Partition(labels, k)


def contract(g: SimpleGraph, p: Partition) -> SimpleGraph:
    """The minor G/p: classes become vertices, joined when some cross edge exists."""
    if len(p.labels) != g.n:
        raise ValueError("partition size does not match the graph")
    lab = p.labels
    edges = {
        (min(a, b), max(a, b))
        for u, v in g.edges
        if (a := int(lab[u])) != (b := int(lab[v]))
    }
    return SimpleGraph.from_edges(p.count, sorted(edges))


def functional_quotient(fg: FunctionalGraph, p: Partition) -> FunctionalGraph:
    """Quotient map on classes; classes whose images all stay inside become terminal.

    Each class must be connected in G_f and have a single outgoing target.
    """
    if len(p.labels) != fg.n:
        raise ValueError("partition size does not match the graph")
    lab = p.labels
    inner = [(x, y) for x, y in enumerate(fg.succ) if y >= 0 and lab[x] == lab[y]]
    arr = np.asarray(inner, dtype=np.int64).reshape(-1, 2)
    comp, k = kernels.component_labels(fg.n, arr[:, 0], arr[:, 1])
    if k != p.count:
        raise ValueError("partition classes are not connected in G_f")
    succ = kernels.quotient_succ(fg.succ_array, lab, p.count)
    return FunctionalGraph.from_succ(succ.tolist())


def power_graph_2(g: SimpleGraph) -> SimpleGraph:
    """G^{<=2}: x ~ y iff d(x, y) <= 2; reflexive, so loops are always on."""
    edges = set()
    for x in range(g.n):
        for y in g.adjacency[x]:
            if x < y:
                edges.add((x, y))
            for z in g.adjacency[y]:
                if x < z:
                    edges.add((x, z))
    return SimpleGraph.from_edges(g.n, sorted(edges), loops=True)


def cayley_ball_graph(
    spec: GroupSpec,
    generators: Sequence[Word] | None = None,
    radius: int = 1,
    include_loops: bool = False,
) -> FramedGraph:
    """Ball of the left Cayley graph: w ~ s*w for generators s.

    Vertices are the ball's words in shortlex order; the frontier is the
    sphere of the given radius.
    """
    gens = spec.symmetric_generators() if generators is None else list(generators)
    words = ball(spec, gens, radius)
    index = {w: i for i, w in enumerate(words)}
    edges = []
    for i, w in enumerate(words):
        for s in gens:
            j = index.get(s * w)
            if j is not None and j != i:
                edges.append((i, j))
    g = SimpleGraph.from_edges(len(words), edges, loops=include_loops)
    dist = g.distances_from([index[spec.identity()]])
    frontier = frozenset(i for i, d in enumerate(dist) if d == radius)
    return FramedGraph(g, frontier, tuple(words))


def random_functional_graph(n: int, fanin: int, rng: random.Random) -> FunctionalGraph:
    """Uniform-ish random fixed-point-free map with every fanin at most ``fanin``."""
    if n < 2:
        raise ValueError("need at least two vertices")
    if fanin < 1:
        raise ValueError("fanin bound must be positive")
    while True:
        counts = [0] * n
        open_slots = list(range(n))
        succ = [-1] * n
        order = list(range(n))
        rng.shuffle(order)
        ok = True
        for x in order:
            candidates = [y for y in open_slots if y != x] if len(open_slots) < 8 else None
            if candidates is not None:
                if not candidates:
                    ok = False
                    break
                y = rng.choice(candidates)
            else:
                while True:
                    y = open_slots[rng.randrange(len(open_slots))]
                    if y != x:
                        break
            succ[x] = y
            counts[y] += 1
            if counts[y] == fanin:
                open_slots.remove(y)
        if ok:
            return FunctionalGraph(tuple(succ), fanin)


def random_bounded_degree_graph(n: int, max_degree: int, edge_prob: float, rng: random.Random) -> SimpleGraph:
    edges = []
    deg = [0] * n
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    rng.shuffle(pairs)
    for u, v in pairs:
        if deg[u] < max_degree and deg[v] < max_degree and rng.random() < edge_prob:
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
    return SimpleGraph.from_edges(n, edges)


def path_graph(n: int) -> SimpleGraph:
    return SimpleGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> SimpleGraph:
    if n < 3:
        raise ValueError("a simple cycle needs at least 3 vertices")
    return SimpleGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


_PALETTE = ["red", "blue", "green", "orange", "purple", "brown", "cyan", "magenta", "gray", "olive"]


def to_dot(
    g: SimpleGraph,
    name: str = "G",
    colors: Sequence[int] | None = None,
    partition: Partition | None = None,
    edge_levels: Sequence[int] | None = None,
    frontier: Iterable[int] = (),
    labels: Sequence[object] | None = None,
) -> str:
    """Graphviz text; vertex colors, component ids and per-edge levels become attributes."""
    frontier = set(frontier)
    lines = [f"graph {name} {{"]
    for v in range(g.n):
        attrs = []
        if labels is not None:
            attrs.append(f'label="{labels[v]}"')
        if colors is not None:
            attrs.append(f'color="{_PALETTE[colors[v] % len(_PALETTE)]}"')
            attrs.append(f"colorindex={colors[v]}")
        if partition is not None:
            attrs.append(f"component={int(partition.labels[v])}")
        if v in frontier:
            attrs.append("shape=box")
        lines.append(f"  {v}" + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    for i, (u, v) in enumerate(g.edges):
        attrs = []
        if edge_levels is not None:
            lvl = edge_levels[i]
            attrs.append(f"level={lvl}")
            attrs.append(f'color="{_PALETTE[lvl % len(_PALETTE)]}"')
        lines.append(f"  {u} -- {v}" + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    if g.loops:
        lines.append("  // every vertex carries a loop")
    lines.append("}")
    return "\n".join(lines) + "\n"
