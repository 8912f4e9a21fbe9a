"""Finite partial injections on a group and the twisted action on them.

A group element g acts on a partial map x by ``(g.x)(d) = g * x(g^-1 * d)``:
it translates both the domain and the values on the left.  The w-map sends
x to ``x(1)^-1 . x`` and generates the orbit relation of this action.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .groups import GroupSpec, Word

__all__ = [
    "PartialInjection",
    "OrbitReport",
    "Order",
    "act",
    "w_map",
    "w_iterate",
    "w_iterate_closed_form",
    "orbit_point",
    "orbit_report",
    "less_than",
]


class PartialInjection:
    """An injective finite map between words of one group."""

    __slots__ = ("spec", "_map", "_inv", "_key")

    def __init__(self, spec: GroupSpec, entries: Mapping[Word, Word] | Iterable[tuple[Word, Word]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        fwd: dict[Word, Word] = {}
        inv: dict[Word, Word] = {}
        for k, v in items:
            if k.spec != spec or v.spec != spec:
                raise ValueError("entries must be words of the given group")
            if k in fwd:
                if fwd[k] != v:
                    raise ValueError(f"{k} assigned twice")
                continue
            if v in inv:
                raise ValueError(f"not injective: {inv[v]} and {k} both map to {v}")
            fwd[k] = v
            inv[v] = k
        self.spec = spec
        self._map = fwd
        self._inv = inv
        self._key = None

    def __call__(self, w: Word) -> Word:
        return self._map[w]

    def get(self, w: Word) -> Word | None:
        return self._map.get(w)

    def preimage(self, w: Word) -> Word | None:
        return self._inv.get(w)

    def __contains__(self, w: Word) -> bool:
        return w in self._map

    def __len__(self) -> int:
        return len(self._map)

    def __iter__(self) -> Iterator[Word]:
        return iter(self._map)

    def items(self):
        return self._map.items()

    @property
    def domain(self) -> frozenset[Word]:
        return frozenset(self._map)

    @property
    def range(self) -> frozenset[Word]:
        return frozenset(self._inv)

    def inverse(self) -> PartialInjection:
        return PartialInjection(self.spec, self._inv)

    def extend(self, pairs: Iterable[tuple[Word, Word]]) -> PartialInjection:
        return PartialInjection(self.spec, list(self._map.items()) + list(pairs))

    def _canonical(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted(self._map.items(), key=lambda kv: kv[0].sort_key()))
        return self._key

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PartialInjection):
            return NotImplemented
        return self.spec == other.spec and self._map == other._map

    def __hash__(self) -> int:
        return hash(self._canonical())

    def __repr__(self) -> str:
        body = ", ".join(f"{k} -> {v}" for k, v in self._canonical())
        return f"PartialInjection({{{body}}})"

    def to_json(self) -> dict:
        return {
            "group": self.spec.to_json(),
            "entries": [[str(k), str(v)] for k, v in self._canonical()],
        }

    @classmethod
    def from_json(cls, data: dict) -> PartialInjection:
        spec = GroupSpec.from_json(data["group"])
        return cls(spec, [(spec.word(k), spec.word(v)) for k, v in data["entries"]])

    @classmethod
    def from_text(cls, spec: GroupSpec, pairs: Mapping[str, str]) -> PartialInjection:
        return cls(spec, [(spec.word(k), spec.word(v)) for k, v in pairs.items()])


def act(g: Word, x: PartialInjection) -> PartialInjection:
    """The twisted action: dom(g.x) = g dom(x) and (g.x)(g d) = g x(d)."""
    if g.spec != x.spec:
        raise ValueError("group element and partial injection live in different groups")
    if g.is_identity:
        return x
    return PartialInjection(x.spec, [(g * k, g * v) for k, v in x.items()])


def w_map(x: PartialInjection) -> PartialInjection | None:
    """``x(1)^-1 . x``, or None when the identity is not in dom(x)."""
    one = x.spec.identity()
    if one not in x:
        return None
    return act(x(one).inverse(), x)


def _w_inverse(x: PartialInjection) -> PartialInjection | None:
    # the unique y with w(y) = x is beta^-1 . x where x(beta) = 1
    beta = x.preimage(x.spec.identity())
    if beta is None:
        return None
    return act(beta.inverse(), x)


def w_iterate(x: PartialInjection, n: int) -> PartialInjection | None:
    """n-fold w (its inverse for n < 0); None once a step leaves the data."""
    step = w_map if n >= 0 else _w_inverse
    for _ in range(abs(n)):
        x = step(x)
        if x is None:
            return None
    return x


def orbit_point(x: PartialInjection, n: int, start: Word | None = None) -> Word | None:
    """x^n(start), following x^-1 for negative n; None if the chain runs out."""
    w = x.spec.identity() if start is None else start
    for _ in range(abs(n)):
        w = x.get(w) if n > 0 else x.preimage(w)
        if w is None:
            return None
    return w


def w_iterate_closed_form(x: PartialInjection, n: int) -> PartialInjection | None:
    """``x^n(1)^-1 . x`` computed directly from the orbit of the identity."""
    p = orbit_point(x, n)
    if p is None:
        return None
    return act(p.inverse(), x)


@dataclass(frozen=True)
class OrbitReport:
    orbit_count: int
    begins: Word | None
    ends: Word | None
    is_cycle: bool = False

    @property
    def is_one_orbit(self) -> bool:
        return self.orbit_count <= 1


def orbit_report(x: PartialInjection) -> OrbitReport:
    """Orbit count plus begin/end points.

    The empty map has one orbit that begins and ends at the identity.
    ``begins``/``ends`` are set only when they are unique.
    """
    if len(x) == 0:
        one = x.spec.identity()
        return OrbitReport(0, one, one)
    starts = [k for k in x if x.preimage(k) is None]
    ends = [v for v in x.range if v not in x]
    seen: set[Word] = set()
    for s in starts:
        w = s
        while w in x:
            seen.add(w)
            w = x(w)
    cycles = 0
    if len(seen) < len(x):
        for k in x:
            if k in seen:
                continue
            cycles += 1
            w = k
            while w not in seen:
                seen.add(w)
                w = x(w)
    count = len(starts) + cycles
    return OrbitReport(
        orbit_count=count,
        begins=starts[0] if len(starts) == 1 else None,
        ends=ends[0] if len(ends) == 1 else None,
        is_cycle=(count == 1 and cycles == 1),
    )


class Order(str, enum.Enum):
    LESS = "less"
    NOT_LESS_WITHIN_BOUND = "not-less-within-bound"


def less_than(x: PartialInjection, y: PartialInjection, bound: int) -> Order:
    """Bounded search for n in 1..bound with w^n(x) = y."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    z: PartialInjection | None = x
    for _ in range(bound):
        z = w_map(z)
        if z is None:
            break
        if z == y:
            return Order.LESS
    return Order.NOT_LESS_WITHIN_BOUND
