"""Path-usage flows on acyclic Cayley balls and the anti-matching map they induce.

An instance fixes n+1 maps f_i(x) = gamma x with gamma drawn from a finite
set S, no vertex being hit more than n times.  Routing every pair (z, i)
along the unique tree path from z to f_i(z) gives edge counts g whose net
outflow at well-covered vertices is (n+1) minus the number of preimages.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .graphs import FramedGraph, cayley_ball_graph, components
from .groups import GroupSpec, Word, ball

__all__ = [
    "EquidecompositionInstance",
    "GenerationStats",
    "random_instance",
    "path_flow",
    "brute_force_flow",
    "discrepancy",
    "preimage_count",
    "qualifying_vertices",
    "antimatching_map",
    "partition_by_generator",
    "flow_to_json",
]

EdgeFlow = dict[tuple[int, int], int]


def _letters(w: Word) -> list[Word]:
    """Generator letters of w, rightmost first (the order they act on a point)."""
    spec = w.spec
    out = []
    for i, e in reversed(w.syllables):
        step = spec.gen(i) if e > 0 else spec.gen(i).inverse()
        out.extend([step] * abs(e))
    return out


def _word_length(w: Word) -> int:
    return sum(abs(e) for _, e in w.syllables)


@dataclass(eq=False)
class EquidecompositionInstance:
    host: FramedGraph
    radius: int
    n: int
    S: tuple[Word, ...]
    labels: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.host.labels is None:
            raise ValueError("host must carry word labels")
        if len(self.labels) != self.host.n or any(len(row) != self.n + 1 for row in self.labels):
            raise ValueError("every vertex needs n+1 labels")
        if any(not 0 <= j < len(self.S) for row in self.labels for j in row):
            raise ValueError("label index out of range for S")

    @property
    def spec(self) -> GroupSpec:
        return self.host.labels[0].spec

    @property
    def reach(self) -> int:
        """L: the longest element of S, in generator steps."""
        return max((_word_length(g) for g in self.S), default=0)

    def target(self, z: int, i: int) -> int | None:
        """Vertex f_i(z), or None when it lies outside the frame."""
        return self.host.index.get(self.S[self.labels[z][i]] * self.host.labels[z])

    def multiplicity(self) -> list[int]:
        counts = [0] * self.host.n
        for z in range(self.host.n):
            for i in range(self.n + 1):
                t = self.target(z, i)
                if t is not None:
                    counts[t] += 1
        return counts

    def is_valid(self) -> bool:
        return all(c <= self.n for c in self.multiplicity())

    def to_json(self) -> dict:
        return {
            "group": self.spec.to_json(),
            "radius": self.radius,
            "n": self.n,
            "S": [str(g) for g in self.S],
            "labels": [list(row) for row in self.labels],
        }

    @classmethod
    def from_json(cls, data: dict) -> EquidecompositionInstance:
        spec = GroupSpec.from_json(data["group"])
        host = cayley_ball_graph(spec, radius=int(data["radius"]))
        return cls(
            host,
            int(data["radius"]),
            int(data["n"]),
            tuple(spec.word(t) for t in data["S"]),
            tuple(tuple(row) for row in data["labels"]),
        )


@dataclass(frozen=True)
class GenerationStats:
    rejected_draws: int
    restarts: int
    redrawn_sets: int = 0


def _draw_table(host: FramedGraph, S: tuple[Word, ...], n: int, rng: random.Random, max_restarts: int):
    index = host.index
    targets = [[index.get(g * w) for g in S] for w in host.labels]
    pairs = [(z, i) for z in range(host.n) for i in range(n + 1)]
    rejected = restarts = 0
    while restarts <= max_restarts:
        counts = [0] * host.n
        table = [[-1] * (n + 1) for _ in range(host.n)]
        rng.shuffle(pairs)
        ok = True
        for z, i in pairs:
            if not any(t is None or counts[t] < n for t in targets[z]):
                ok = False
                break
            while True:
                j = rng.randrange(len(S))
                t = targets[z][j]
                if t is None or counts[t] < n:
                    break
                rejected += 1
            table[z][i] = j
            if t is not None:
                counts[t] += 1
        if ok:
            return tuple(tuple(row) for row in table), rejected, restarts
        restarts += 1
    return None, rejected, restarts


def random_instance(
    spec: GroupSpec,
    radius: int,
    n: int,
    rng: random.Random,
    S: Sequence[Word] | None = None,
    s_radius: int = 2,
    max_restarts: int = 50,
    max_sets: int = 1000,
) -> tuple[EquidecompositionInstance, GenerationStats]:
    """Seeded instance with every in-frame vertex hit at most n times.

    Each pair (z, i) draws gamma uniformly from S; a draw landing on a full
    vertex is rejected and redrawn, and a pair with no admissible gamma
    restarts the whole table.  Without an explicit S, a random subset of the
    radius-``s_radius`` ball containing a nonidentity element is used, and
    it is redrawn when ``max_restarts`` tables in a row fail (some sets admit
    no valid table at all).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    host = cayley_ball_graph(spec, radius=radius)
    pool = ball(spec, spec.symmetric_generators(), s_radius)
    rejected = restarts = 0
    for redraws in range(max_sets):
        if S is not None:
            if redraws:
                break
            cand = tuple(S)
        else:
            cand = ()
            while all(w.is_identity for w in cand):
                cand = tuple(w for w in pool if rng.random() < 0.5)
        table, rej, rs = _draw_table(host, cand, n, rng, max_restarts)
        rejected += rej
        restarts += rs
        if table is not None:
            inst = EquidecompositionInstance(host, radius, n, cand, table)
            return inst, GenerationStats(rejected, restarts, redraws)
    raise RuntimeError("could not draw a valid instance")


def _check_acyclic(host: FramedGraph) -> None:
    g = host.graph
    if g.m != g.n - components(g).count:
        raise ValueError("host graph has a cycle; paths are not unique")


def path_flow(inst: EquidecompositionInstance) -> EdgeFlow:
    """g((x, y)): number of pairs (z, i) whose path z -> f_i(z) crosses x -> y inside the frame."""
    host = inst.host
    _check_acyclic(host)
    index = host.index
    words = host.labels
    flow: EdgeFlow = {}
    letters = [_letters(g) for g in inst.S]
    for z in range(host.n):
        for j in inst.labels[z]:
            u = z
            for s in letters[j]:
                v = index.get(s * words[u])
                if v is None:
                    break
                flow[(u, v)] = flow.get((u, v), 0) + 1
                u = v
    return flow


def brute_force_flow(inst: EquidecompositionInstance) -> EdgeFlow:
    """Independent count: route each pair by BFS in a ball enlarged by L."""
    spec = inst.spec
    big = cayley_ball_graph(spec, radius=inst.radius + inst.reach)
    big_index = big.index
    small_index = inst.host.index
    to_small = [small_index.get(w) for w in big.labels]
    flow: EdgeFlow = {}
    for z, w in enumerate(inst.host.labels):
        src = big_index[w]
        parent = _bfs_parents(big.graph.adjacency, src)
        for j in inst.labels[z]:
            dst = big_index[inst.S[j] * w]
            path = [dst]
            while path[-1] != src:
                path.append(parent[path[-1]])
            path.reverse()
            for a, b in zip(path, path[1:]):
                x, y = to_small[a], to_small[b]
                if x is None or y is None:
                    break
                flow[(x, y)] = flow.get((x, y), 0) + 1
    return flow


def _bfs_parents(adj: Sequence[Sequence[int]], src: int) -> list[int]:
    parent = [-1] * len(adj)
    parent[src] = src
    q = deque([src])
    while q:
        v = q.popleft()
        for u in adj[v]:
            if parent[u] < 0:
                parent[u] = v
                q.append(u)
    return parent


def discrepancy(inst: EquidecompositionInstance, flow: EdgeFlow, x: int) -> int:
    """Net outflow at x: sum over neighbors y of g((x, y)) - g((y, x))."""
    return sum(flow.get((x, y), 0) - flow.get((y, x), 0) for y in inst.host.graph.adjacency[x])


def preimage_count(inst: EquidecompositionInstance, x: int) -> int:
    return inst.multiplicity()[x]


def qualifying_vertices(inst: EquidecompositionInstance) -> list[int]:
    """Vertices x with |x| + L <= radius: every path touching x lies inside the frame."""
    L = inst.reach
    return [x for x, w in enumerate(inst.host.labels) if _word_length(w) + L <= inst.radius]


def antimatching_map(inst: EquidecompositionInstance, flow: EdgeFlow) -> dict[int, int]:
    """h(x): the shortlex-least neighbor y with g((x, y)) > g((y, x)), where one exists."""
    words = inst.host.labels
    h = {}
    for x in range(inst.host.n):
        positive = [y for y in inst.host.graph.adjacency[x] if flow.get((x, y), 0) > flow.get((y, x), 0)]
        if positive:
            h[x] = min(positive, key=lambda y: words[y].sort_key())
    return h


def partition_by_generator(inst: EquidecompositionInstance, h: dict[int, int]) -> dict[str, set[int]]:
    """A_gamma = {x : h(x) = gamma x} for the three involutions a, b, c."""
    spec = inst.spec
    if spec.rank != 3 or any(f.order != 2 for f in spec.factors):
        raise ValueError("partition by generator needs the free product of three groups of order 2")
    words = inst.host.labels
    parts: dict[str, set[int]] = {spec.names[i]: set() for i in range(3)}
    for x, y in h.items():
        step = words[y] * words[x].inverse()
        if len(step.syllables) != 1:
            raise ValueError(f"h({x}) = {y} is not a generator translate")
        parts[spec.names[step.syllables[0][0]]].add(x)
    return parts


def flow_to_json(inst: EquidecompositionInstance, flow: EdgeFlow) -> list[list]:
    words = inst.host.labels
    return [[str(words[x]), str(words[y]), c] for (x, y), c in sorted(flow.items())]
