"""Witnesses to hyperfiniteness on finite graphs.

A witness is an increasing chain of edge subsets of a host graph whose union
is every host edge.  Validity asks that each level's components be large:
at least ``min(i, |C|)`` (linear) or ``min(2**i, |C|)`` (exponential) where
C is the host component, since a finite component cannot outgrow itself.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import kernels
from .graphs import (
    EdgeSubset,
    FramedGraph,
    FunctionalGraph,
    SimpleGraph,
    components,
)

__all__ = [
    "WitnessSequence",
    "WitnessReport",
    "LevelStats",
    "ContractionStep",
    "validate_witness",
    "functional_witness",
    "functional_witness_traced",
    "degree_two_witness",
    "spanning_tree_witness",
    "lexleast_path",
    "ExtensionParts",
    "extension_parts",
    "extend_witness",
    "h_prime_check",
]


@dataclass(eq=False)
class WitnessSequence:
    host: SimpleGraph
    levels: list[EdgeSubset]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for lvl in self.levels:
            if lvl.host is not self.host and lvl.host.fingerprint() != self.host.fingerprint():
                raise ValueError("levels over mismatched hosts")

    @classmethod
    def from_masks(cls, host: SimpleGraph, masks: Iterable[np.ndarray], metadata: dict | None = None) -> WitnessSequence:
        return cls(host, [EdgeSubset(host, np.asarray(m, dtype=bool)) for m in masks], dict(metadata or {}))

    def __len__(self) -> int:
        return len(self.levels)

    def edge_levels(self) -> list[int]:
        """First level containing each host edge (len(levels) if never covered)."""
        out = [len(self.levels)] * self.host.m
        for i in range(len(self.levels) - 1, -1, -1):
            for j in np.flatnonzero(self.levels[i].mask):
                out[j] = i
        return out

    def to_json(self) -> dict:
        return {
            "host": self.host.to_json(),
            "host_hash": self.host.fingerprint(),
            "levels": [[list(e) for e in lvl.edges()] for lvl in self.levels],
            "metadata": self.metadata,
        }

    @classmethod
    def from_json(cls, data: dict) -> WitnessSequence:
        host = SimpleGraph.from_json(data["host"])
        if "host_hash" in data and data["host_hash"] != host.fingerprint():
            raise ValueError("host hash does not match the host graph")
        levels = [EdgeSubset.from_edges(host, (tuple(e) for e in lvl)) for lvl in data["levels"]]
        return cls(host, levels, dict(data.get("metadata", {})))


@dataclass(frozen=True)
class LevelStats:
    index: int
    component_count: int
    min_size: int
    max_size: int


@dataclass
class WitnessReport:
    valid: bool
    bound: str
    levels: list[LevelStats]
    clause: str | None = None
    first_bad_level: int | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "bound": self.bound,
            "clause": self.clause,
            "first_bad_level": self.first_bad_level,
            "detail": self.detail,
            "levels": [
                {"index": s.index, "components": s.component_count, "min": s.min_size, "max": s.max_size}
                for s in self.levels
            ],
        }


def _required(bound: str, i: int) -> int:
    if bound == "linear":
        return i
    if bound == "exponential":
        return 1 << min(i, 62)
    raise ValueError(f"unknown bound {bound!r}")


def validate_witness(w: WitnessSequence, bound: str = "linear") -> WitnessReport:
    """Check monotonicity, coverage of the host and the per-level size rule."""
    _required(bound, 0)
    host = w.host
    host_comp = components(host)
    host_sizes = host_comp.sizes()
    stats: list[LevelStats] = []
    verdict: tuple[str, int, str] | None = None
    prev = None
    for i, lvl in enumerate(w.levels):
        p = components(host, lvl)
        sizes = p.sizes()
        stats.append(LevelStats(i, p.count, int(sizes.min(initial=host.n)), int(sizes.max(initial=0))))
        if verdict is not None:
            continue
        if prev is not None and not prev.issubset(lvl):
            verdict = ("monotonicity", i, f"level {i - 1} has edges missing from level {i}")
        else:
            need = np.minimum(_required(bound, i), host_sizes[host_comp.labels])
            have = sizes[p.labels]
            bad = np.flatnonzero(have < need)
            if bad.size:
                v = int(bad[0])
                verdict = ("size", i, f"vertex {v} lies in a component of size {int(have[v])} < {int(need[v])}")
        prev = lvl
    if verdict is None:
        covered = np.zeros(host.m, dtype=bool)
        for lvl in w.levels:
            covered |= lvl.mask
        if not covered.all():
            missing = host.edges[int(np.flatnonzero(~covered)[0])]
            verdict = ("coverage", len(w.levels), f"host edge {missing} is in no level")
    if verdict is None:
        return WitnessReport(True, bound, stats)
    clause, level, detail = verdict
    return WitnessReport(False, bound, stats, clause, level, detail)


@dataclass(frozen=True)
class ContractionStep:
    """Sizes of the classes formed at one contraction step, on the quotient it acted on."""

    nodes: int
    fanin: int
    class_sizes: tuple[int, ...]

    @property
    def upper(self) -> int:
        d = self.fanin
        return 1 + d + d * d + d * d * d

    def within_bounds(self) -> bool:
        return all(2 <= s <= self.upper for s in self.class_sizes)


def _same_class_mask(host: SimpleGraph, labels: np.ndarray) -> np.ndarray:
    e = host.edge_array
    if not len(e):
        return np.zeros(0, dtype=bool)
    return labels[e[:, 0]] == labels[e[:, 1]]


def _iterate_contractions(succ: np.ndarray):
    """Yield (host_labels, step) per contraction until every class is finished."""
    n = len(succ)
    labels = np.arange(n, dtype=np.int64)
    cur = np.asarray(succ, dtype=np.int64)
    while True:
        k = len(cur)
        indeg = np.bincount(cur[cur >= 0], minlength=k)
        done = (cur < 0) & (indeg == 0)
        if done.all():
            return
        colors = kernels.three_color(cur)
        mask = kernels.recurrent_mask(cur, colors)
        cls, count, _ = kernels.contraction_classes(cur, mask)
        sizes = np.bincount(cls, minlength=count)
        live = np.unique(cls[~done])
        fanin = int(indeg.max(initial=0))
        step = ContractionStep(k, fanin, tuple(int(s) for s in sizes[live]))
        cur = kernels.quotient_succ(cur, cls, count)
        labels = cls[labels]
        yield labels, step


def functional_witness_traced(fg: FunctionalGraph) -> tuple[WitnessSequence, list[ContractionStep]]:
    """Iterated contraction witness together with per-step class sizes.

    Step i colors the current quotient, picks its forward-recurrent set A_i,
    joins every other class to its image and contracts.  Level i holds the
    host edges inside a single class after step i; a final level adds every
    remaining host edge.
    """
    host = fg.graph
    masks = []
    steps = []
    for labels, step in _iterate_contractions(fg.succ_array):
        masks.append(_same_class_mask(host, labels))
        steps.append(step)
    masks.append(np.ones(host.m, dtype=bool))
    meta = {"construction": "functional", "steps": len(steps), "fanin": fg.fanin_bound}
    return WitnessSequence.from_masks(host, masks, meta), steps


def functional_witness(fg: FunctionalGraph) -> WitnessSequence:
    return functional_witness_traced(fg)[0]


def _orient_degree_two(g: SimpleGraph) -> list[int]:
    succ = [-1] * g.n
    seen = [False] * g.n
    for start in range(g.n):
        if seen[start]:
            continue
        comp = []
        stack = [start]
        seen[start] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in g.adjacency[v]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        if len(comp) == 1:
            continue
        ends = sorted(v for v in comp if g.degree(v) == 1)
        if ends:
            # path: walk from the lower endpoint; the higher endpoint is terminal
            prev, v = -1, ends[0]
            while True:
                nxt = [u for u in g.adjacency[v] if u != prev]
                if not nxt:
                    break
                succ[v] = nxt[0]
                prev, v = v, nxt[0]
        else:
            first = min(comp)
            prev, v = first, min(g.adjacency[first])
            succ[first] = v
            while v != first:
                nxt = next(u for u in g.adjacency[v] if u != prev)
                succ[v] = nxt
                prev, v = v, nxt
    return succ


def degree_two_witness(g: SimpleGraph) -> WitnessSequence:
    """Witness for a graph of maximum degree 2 via an orientation of its paths and cycles."""
    if g.loops:
        raise ValueError("graph must be loop-free")
    if g.max_degree > 2:
        raise ValueError(f"maximum degree {g.max_degree} exceeds 2")
    fg = FunctionalGraph.from_succ(_orient_degree_two(g))
    w = functional_witness(fg)
    if fg.graph.edges != g.edges:
        raise AssertionError("orientation changed the edge set")
    w = WitnessSequence(g, [EdgeSubset(g, lvl.mask) for lvl in w.levels], w.metadata)
    w.metadata["construction"] = "degree-two"
    return w


def _bfs_forest(g: SimpleGraph) -> list[int]:
    parent = [-1] * g.n
    seen = [False] * g.n
    for r in range(g.n):
        if seen[r]:
            continue
        seen[r] = True
        frontier = [r]
        while frontier:
            nxt = []
            for v in frontier:
                for u in g.adjacency[v]:
                    if not seen[u]:
                        seen[u] = True
                        parent[u] = v
                        nxt.append(u)
            frontier = nxt
    return parent


def spanning_tree_witness(g: SimpleGraph) -> WitnessSequence:
    """Generic witness: contract a BFS spanning forest, then add the remaining edges."""
    forest = FunctionalGraph.from_succ(_bfs_forest(g))
    inner = functional_witness(forest)
    index = g.edge_index
    masks = []
    for lvl in inner.levels[:-1]:
        m = np.zeros(g.m, dtype=bool)
        for e in lvl.edges():
            m[index[e]] = True
        masks.append(m)
    masks.append(np.ones(g.m, dtype=bool))
    return WitnessSequence.from_masks(g, masks, {"construction": "spanning-tree"})


def _distances_to(g: SimpleGraph, a: Iterable[int]) -> list[int]:
    return g.distances_from(sorted(set(a)))


def _next_hops(g: SimpleGraph, dist: list[int]) -> list[int]:
    nxt = [-1] * g.n
    for v in range(g.n):
        if dist[v] > 0:
            nxt[v] = next(u for u in g.adjacency[v] if dist[u] == dist[v] - 1)
    return nxt


def lexleast_path(fg: FramedGraph | SimpleGraph, x: int, a: Iterable[int]) -> list[int]:
    """Least vertex-id sequence among shortest paths from x into a."""
    g = fg.graph if isinstance(fg, FramedGraph) else fg
    dist = _distances_to(g, a)
    if dist[x] < 0:
        raise ValueError(f"vertex {x} cannot reach the target set")
    nxt = _next_hops(g, dist)
    path = [x]
    while dist[path[-1]] > 0:
        path.append(nxt[path[-1]])
    return path


@dataclass
class ExtensionParts:
    """Intermediate objects of the extension: H', H'' and the edge distances m."""

    dist: list[int]
    parent: list[int]
    h_prime: list[tuple[int, int]]
    h_double: list[tuple[int, int]]
    m: dict[tuple[int, int], int]


def _key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def extension_parts(fg: FramedGraph, a: Iterable[int]) -> ExtensionParts:
    g = fg.graph
    a = set(a)
    dist = _distances_to(g, a)
    if any(d < 0 for d in dist):
        raise ValueError("every component must meet the target set")
    parent = _next_hops(g, dist)
    h_prime = sorted(_key(v, p) for v, p in enumerate(parent) if p >= 0)
    m = {_key(v, p): dist[v] for v, p in enumerate(parent) if p >= 0}
    # an H' edge (v, parent v) carries some frontier path iff v's subtree holds a frontier vertex
    carries = [False] * g.n
    for z in fg.frontier:
        v = z
        while parent[v] >= 0 and not carries[v]:
            carries[v] = True
            v = parent[v]
    h_double = sorted(_key(v, p) for v, p in enumerate(parent) if p >= 0 and not carries[v])
    return ExtensionParts(dist, parent, h_prime, h_double, m)


def h_prime_check(g: SimpleGraph, a: Iterable[int], parts: ExtensionParts) -> tuple[bool, bool]:
    """(acyclic, one target per component) for H'."""
    a = set(a)
    sub = SimpleGraph.from_edges(g.n, parts.h_prime)
    p = components(sub)
    acyclic = sub.m == g.n - p.count
    counts = np.bincount(p.labels[sorted(a)], minlength=p.count) if a else np.zeros(p.count, dtype=np.int64)
    return acyclic, bool(np.all(counts == 1))


def extend_witness(fg: FramedGraph, a: Iterable[int], inner: WitnessSequence) -> WitnessSequence:
    """Extend a witness on the subgraph induced by a to the whole host.

    ``inner`` must live on ``fg.graph.induced(a)`` (vertices relabelled in
    increasing order).  Level i joins the inner level i, the H' edges whose
    distance m is not divisible by 2**i and every H'' edge, then keeps the
    host edges whose endpoints fall in one component of that union.
    """
    g = fg.graph
    a = sorted(set(a))
    if not a:
        raise ValueError("target set is empty")
    sub, old_ids = g.induced(a)
    if inner.host.fingerprint() != sub.fingerprint():
        raise ValueError("inner witness is not on the induced subgraph")
    host_comp = components(g)
    if components(sub).count != host_comp.count:
        raise ValueError("the target set must induce one component per host component")
    parts = extension_parts(fg, a)
    inner_edges = [[_key(old_ids[u], old_ids[v]) for u, v in lvl.edges()] for lvl in inner.levels]
    max_m = max(parts.m.values(), default=0)
    i0 = 0
    while (1 << i0) <= max_m:
        i0 += 1
    last = max(len(inner.levels) - 1, i0)
    masks = []
    for i in range(last + 1):
        edges = list(inner_edges[min(i, len(inner_edges) - 1)]) if inner_edges else []
        step = 1 << i
        edges += [e for e, m in parts.m.items() if m % step]
        edges += parts.h_double
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        labels, _ = kernels.component_labels(g.n, arr[:, 0], arr[:, 1])
        masks.append(_same_class_mask(g, labels))
    meta = {
        "construction": "extension",
        "frontier_reading": "an H' edge is kept in H'' when no frontier vertex routes through it",
        "h_prime": len(parts.h_prime),
        "h_double": len(parts.h_double),
    }
    return WitnessSequence.from_masks(g, masks, meta)

