"""Pure-Python versions of the functional-graph kernels.

Every function here has a twin with the same signature in ``_speedups``
(Cython).  A successor array ``succ`` encodes a functional graph on
``0..n-1``; ``succ[x] == -1`` marks a terminal vertex with no out-edge.
"""
from __future__ import annotations

from itertools import product

import numpy as np

BACKEND = "python"


def _as_list(a) -> list[int]:
    return a.tolist() if isinstance(a, np.ndarray) else list(a)


def three_color(succ) -> np.ndarray:
    """Proper coloring of the undirected graph of ``succ`` with colors 0, 1, 2.

    Each cycle is colored 0, 1, 0, ... from its smallest vertex, with 2 on
    the last vertex of an odd cycle; terminal vertices get 0; tree vertices
    alternate away from their successor's color.
    """
    succ = _as_list(succ)
    n = len(succ)
    color = [-1] * n
    state = [0] * n  # 0 new, 1 on current path, 2 colored
    for s in range(n):
        if state[s]:
            continue
        path = []
        x = s
        while x >= 0 and state[x] == 0:
            state[x] = 1
            path.append(x)
            x = succ[x]
        if x >= 0 and state[x] == 1:
            idx = path.index(x)
            cyc = path[idx:]
            if len(cyc) == 1:
                raise ValueError(f"vertex {x} is a fixed point")
            m = cyc.index(min(cyc))
            cyc = cyc[m:] + cyc[:m]
            for j, v in enumerate(cyc):
                color[v] = j & 1
                state[v] = 2
            if len(cyc) & 1:
                color[cyc[-1]] = 2
            del path[idx:]
        elif x < 0:
            root = path.pop()
            color[root] = 0
            state[root] = 2
        for v in reversed(path):
            c = color[succ[v]]
            color[v] = 1 - c if c < 2 else 1
            state[v] = 2
    return np.asarray(color, dtype=np.int8)


def recurrent_mask(succ, colors) -> np.ndarray:
    """Indicator of the forward-recurrent set for a proper 3-coloring.

    x is selected when its colors along x, f(x), f^2(x) read 0,2 or 1,2 or
    0,1,0.  Clauses that need an undefined successor are false.
    """
    succ = _as_list(succ)
    colors = _as_list(colors)
    out = [0] * len(succ)
    for x, y in enumerate(succ):
        if y < 0:
            continue
        c0, c1 = colors[x], colors[y]
        if c1 == 2 and c0 < 2:
            out[x] = 1
        elif c0 == 0 and c1 == 1:
            z = succ[y]
            if z >= 0 and colors[z] == 0:
                out[x] = 1
    return np.asarray(out, dtype=np.uint8)


def check_recurrent(succ, mask) -> tuple[bool, bool]:
    """(independent, recurrent) for a candidate set given as an indicator.

    Recurrence asks that one of x, f(x), f^2(x), f^3(x) be selected; a chain
    that reaches a terminal vertex first is exempt.
    """
    succ = _as_list(succ)
    mask = _as_list(mask)
    independent = True
    recurrent = True
    for x in range(len(succ)):
        y = succ[x]
        if mask[x] and y >= 0 and mask[y]:
            independent = False
        z = x
        hit = False
        for _ in range(4):
            if z < 0 or mask[z]:
                hit = True
                break
            z = succ[z]
        if not hit:
            recurrent = False
    return independent, recurrent


def _depths(succ: list[int], is_exit: list[bool]) -> list[int]:
    n = len(succ)
    depth = [-1] * n
    for s in range(n):
        if depth[s] >= 0:
            continue
        path = []
        x = s
        while depth[x] < 0 and not is_exit[x]:
            depth[x] = -2
            path.append(x)
            x = succ[x]
            if depth[x] == -2:
                raise ValueError("a cycle contains no selected vertex")
        d = 0 if is_exit[x] else depth[x]
        if is_exit[x]:
            depth[x] = 0
        for v in reversed(path):
            d += 1
            depth[v] = d
    return depth


def contraction_classes(succ, mask) -> tuple[np.ndarray, int, np.ndarray]:
    """Group each vertex with its successor unless it is selected.

    Selected vertices and terminal vertices close their class.  A selected
    vertex without preimages would be a singleton, so it joins its
    successor's class instead; when that successor sits three steps from its
    own exit it is split off into a fresh class with those leaves.  Returns
    ``(class_index, class_count, joined)`` with classes numbered by their
    smallest member.
    """
    succ = _as_list(succ)
    mask = _as_list(mask)
    n = len(succ)
    is_exit = [bool(mask[x]) or succ[x] < 0 for x in range(n)]
    indeg = [0] * n
    for y in succ:
        if y >= 0:
            indeg[y] += 1
    depth = _depths(succ, is_exit)
    joined = [0 if is_exit[x] else 1 for x in range(n)]
    cut = []
    for x in range(n):
        if mask[x] and indeg[x] == 0 and succ[x] >= 0:
            joined[x] = 1
            v = succ[x]
            if depth[v] >= 3:
                cut.append(v)
    for v in cut:
        joined[v] = 0
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for x in range(n):
        if joined[x]:
            a, b = find(x), find(succ[x])
            if a != b:
                parent[max(a, b)] = min(a, b)
    cls, k = _dense_labels(n, find)
    return np.asarray(cls, dtype=np.int64), k, np.asarray(joined, dtype=np.uint8)


def _dense_labels(n: int, find) -> tuple[list[int], int]:
    index: dict[int, int] = {}
    out = [0] * n
    for x in range(n):
        r = find(x)
        if r not in index:
            index[r] = len(index)
        out[x] = index[r]
    return out, len(index)


def quotient_succ(succ, cls, k: int) -> np.ndarray:
    """Successor array on classes; -1 for classes with no outgoing edge."""
    succ = _as_list(succ)
    cls = _as_list(cls)
    out = [-1] * k
    for x, y in enumerate(succ):
        if y < 0:
            continue
        a, b = cls[x], cls[y]
        if a == b:
            continue
        if out[a] == -1:
            out[a] = b
        elif out[a] != b:
            raise ValueError(f"class {a} has edges to classes {out[a]} and {b}")
    return np.asarray(out, dtype=np.int64)


def component_labels(n: int, us, vs) -> tuple[np.ndarray, int]:
    """Connected components of the edge list (us[i], vs[i]), numbered by smallest member."""
    us = _as_list(us)
    vs = _as_list(vs)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in zip(us, vs):
        a, b = find(u), find(v)
        if a != b:
            parent[max(a, b)] = min(a, b)
    labels, k = _dense_labels(n, find)
    return np.asarray(labels, dtype=np.int64), k


def _proper_colorings(n: int, f: tuple[int, ...]):
    lower: list[list[int]] = [[] for _ in range(n)]
    for x, y in enumerate(f):
        lower[max(x, y)].append(min(x, y))
    colors = [0] * n

    def rec(v: int):
        if v == n:
            yield colors
            return
        for c in range(3):
            if all(colors[u] != c for u in lower[v]):
                colors[v] = c
                yield from rec(v + 1)

    yield from rec(0)


def exhaustive_recurrence(n: int) -> tuple[int, int, int]:
    """Check the recurrent set on every fixed-point-free map of n points.

    Returns ``(maps, colorings, failures)`` where a failure is a proper
    3-coloring whose selected set is not independent or not 4-step
    recurrent.
    """
    maps = colorings = failures = 0
    choices = [[y for y in range(n) if y != x] for x in range(n)]
    for f in product(*choices):
        maps += 1
        for c in _proper_colorings(n, f):
            colorings += 1
            ok_i, ok_r = check_recurrent(f, recurrent_mask(f, c))
            if not (ok_i and ok_r):
                failures += 1
    return maps, colorings, failures
