"""Independent count of proper 3-colorings over all fixed-point-free maps.

Each weak component of a functional graph is one cycle of length L with
trees hanging off it.  Its chromatic polynomial at q colors is
((q-1)^L + (-1)^L (q-1)) (q-1)^(k-L), with a 2-cycle counted as a single
edge, q (q-1)^(k-1).
"""
from __future__ import annotations

from itertools import product


def _components(f: tuple[int, ...]) -> list[tuple[int, int]]:
    n = len(f)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            a = parent[a]
        return a

    for x, y in enumerate(f):
        a, b = find(x), find(y)
        if a != b:
            parent[a] = b
    sizes: dict[int, int] = {}
    for x in range(n):
        sizes[find(x)] = sizes.get(find(x), 0) + 1
    out = []
    for root, k in sizes.items():
        x = next(v for v in range(n) if find(v) == root)
        seen = []
        while x not in seen:
            seen.append(x)
            x = f[x]
        out.append((k, len(seen) - seen.index(x)))
    return out


def colorings(f: tuple[int, ...], q: int = 3) -> int:
    total = 1
    for k, cycle in _components(f):
        if cycle == 2:
            total *= q * (q - 1) ** (k - 1)
        else:
            total *= ((q - 1) ** cycle + (-1) ** cycle * (q - 1)) * (q - 1) ** (k - cycle)
    return total


def total_colorings(n: int) -> int:
    choices = [[y for y in range(n) if y != x] for x in range(n)]
    return sum(colorings(f) for f in product(*choices))


if __name__ == "__main__":
    for n in range(2, 8):
        print(n, total_colorings(n))
