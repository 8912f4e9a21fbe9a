"""Reduced-word arithmetic in free products of cyclic groups.

A group is described by a :class:`GroupSpec`, an ordered list of cyclic
factors (``None`` for an infinite cyclic factor, ``k >= 2`` for Z/kZ).
Elements are :class:`Word` values holding their canonical syllable list, so
equality of words is equality of group elements.

>>> F2 = free_group(2)
>>> s, t = F2.gens()
>>> str(s * t * t.inverse() * s)
's^2'
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

__all__ = [
    "CyclicFactor",
    "GroupSpec",
    "Word",
    "WordType",
    "MalformedWordError",
    "free_group",
    "free_product_of_cyclics",
    "parse_group",
    "reduce",
    "multiply",
    "invert",
    "classify",
    "length",
    "ball",
    "words_by_length",
]


class MalformedWordError(ValueError):
    """Raised for syllables or text that do not describe a word of the group."""


@dataclass(frozen=True)
class CyclicFactor:
    order: int | None = None  # None is the infinite cyclic group

    def __post_init__(self) -> None:
        if self.order is not None and self.order < 2:
            raise ValueError(f"cyclic factor order must be >= 2 or infinite, got {self.order}")

    @property
    def infinite(self) -> bool:
        return self.order is None

    def normalize(self, exponent: int) -> int:
        if self.order is None:
            return exponent
        return exponent % self.order


@dataclass(frozen=True)
class GroupSpec:
    factors: tuple[CyclicFactor, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.factors:
            raise ValueError("a group needs at least one factor")
        if not self.names:
            object.__setattr__(self, "names", _default_names(self.factors))
        if len(self.names) != len(self.factors):
            raise ValueError("one name per factor is required")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate factor names {self.names}")
        for name in self.names:
            if not (name and name[0].isalpha() and name.isalnum()):
                raise ValueError(f"invalid factor name {name!r}")

    @property
    def rank(self) -> int:
        return len(self.factors)

    def identity(self) -> Word:
        return Word(self, ())

    def gen(self, index: int) -> Word:
        return reduce(self, [(index, 1)])

    def gens(self) -> list[Word]:
        return [self.gen(i) for i in range(self.rank)]

    def symmetric_generators(self) -> list[Word]:
        """Each factor generator together with its inverse, in shortlex order."""
        out = set()
        for g in self.gens():
            out.add(g)
            out.add(g.inverse())
        return sorted(out, key=Word.sort_key)

    def word(self, text: str) -> Word:
        return Word.parse(self, text)

    def to_json(self) -> dict:
        return {"orders": [f.order for f in self.factors], "names": list(self.names)}

    @classmethod
    def from_json(cls, data: dict) -> GroupSpec:
        factors = tuple(CyclicFactor(o) for o in data["orders"])
        return cls(factors, tuple(data.get("names") or ()))


def _default_names(factors: Sequence[CyclicFactor]) -> tuple[str, ...]:
    k = len(factors)
    if all(f.infinite for f in factors):
        if k == 1:
            return ("t",)
        if k <= 8:
            return tuple("stuvwxyz"[:k])
    elif k <= 26:
        return tuple("abcdefghijklmnopqrstuvwxyz"[:k])
    return tuple(f"x{i}" for i in range(1, k + 1))


def free_group(rank: int, names: Sequence[str] | None = None) -> GroupSpec:
    """F_rank as the free product of ``rank`` infinite cyclic groups."""
    return GroupSpec(tuple(CyclicFactor() for _ in range(rank)), tuple(names or ()))


def free_product_of_cyclics(*orders: int | None, names: Sequence[str] | None = None) -> GroupSpec:
    """E.g. ``free_product_of_cyclics(2, 2, 2)`` is <a,b,c | a^2=b^2=c^2=1>."""
    return GroupSpec(tuple(CyclicFactor(o) for o in orders), tuple(names or ()))


def parse_group(text: str) -> GroupSpec:
    """Parse a compact group name.

    ``F<n>`` is the free group of rank n, ``C<k>^<m>`` the free product of m
    copies of Z/kZ, and a comma list such as ``inf,2,3`` gives the factor
    orders directly.
    """
    text = text.strip()
    if text[:1] in "Ff" and text[1:].isdigit():
        return free_group(int(text[1:]))
    if text[:1] in "Cc" and "^" in text:
        k, m = text[1:].split("^", 1)
        return free_product_of_cyclics(*([int(k)] * int(m)))
    orders: list[int | None] = []
    for part in text.split(","):
        part = part.strip().lower()
        orders.append(None if part in ("inf", "z", "0") else int(part))
    return free_product_of_cyclics(*orders)


def _exponent_key(factor: CyclicFactor, e: int) -> int:
    # infinite factors order exponents 1, -1, 2, -2, ...
    if factor.order is not None:
        return e
    return 2 * e - 1 if e > 0 else -2 * e


class Word:
    """Canonical reduced element of a free product of cyclic groups.

    ``syllables`` is a tuple of ``(factor_index, exponent)`` pairs with
    nonzero exponents, exponents in ``1..k-1`` for a factor of order k, and
    no two adjacent syllables from the same factor.  Build words through
    :func:`reduce` or the arithmetic operators rather than the constructor.
    """

    __slots__ = ("spec", "syllables", "_hash")

    def __init__(self, spec: GroupSpec, syllables: tuple[tuple[int, int], ...]) -> None:
        self.spec = spec
        self.syllables = syllables
        self._hash = hash(syllables)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self.syllables == other.syllables and self.spec == other.spec

    def __len__(self) -> int:
        return len(self.syllables)

    def __bool__(self) -> bool:
        return True

    @property
    def is_identity(self) -> bool:
        return not self.syllables

    def sort_key(self) -> tuple:
        factors = self.spec.factors
        return (
            len(self.syllables),
            tuple((i, _exponent_key(factors[i], e)) for i, e in self.syllables),
        )

    def __lt__(self, other: Word) -> bool:
        return self.sort_key() < other.sort_key()

    def __le__(self, other: Word) -> bool:
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other: Word) -> bool:
        return self.sort_key() > other.sort_key()

    def __ge__(self, other: Word) -> bool:
        return self.sort_key() >= other.sort_key()

    def __mul__(self, other: Word) -> Word:
        return multiply(self, other)

    def inverse(self) -> Word:
        return invert(self)

    def __pow__(self, k: int) -> Word:
        base = self if k >= 0 else self.inverse()
        out = self.spec.identity()
        for _ in range(abs(k)):
            out = out * base
        return out

    def __str__(self) -> str:
        if not self.syllables:
            return "1"
        names = self.spec.names
        return ".".join(names[i] if e == 1 else f"{names[i]}^{e}" for i, e in self.syllables)

    def __repr__(self) -> str:
        return f"Word({self})"

    def to_json(self) -> list[list[int]]:
        return [[i, e] for i, e in self.syllables]

    @classmethod
    def from_json(cls, spec: GroupSpec, data: Sequence[Sequence[int]]) -> Word:
        return reduce(spec, [(int(i), int(e)) for i, e in data])

    @classmethod
    def parse(cls, spec: GroupSpec, text: str) -> Word:
        """Parse the dotted text form, e.g. ``"s^2.t^-1"`` or ``"1"``."""
        text = text.strip()
        if text in ("", "1"):
            return spec.identity()
        index = {name: i for i, name in enumerate(spec.names)}
        raw = []
        for part in text.split("."):
            name, _, exp = part.partition("^")
            if name not in index:
                raise MalformedWordError(f"unknown factor {name!r} in {text!r}")
            try:
                e = int(exp) if exp else 1
            except ValueError:
                raise MalformedWordError(f"bad exponent in {part!r}") from None
            raw.append((index[name], e))
        return reduce(spec, raw)


def reduce(spec: GroupSpec, raw: Iterable[tuple[int, int]]) -> Word:
    """Free reduction of a syllable list into canonical form."""
    factors = spec.factors
    stack: list[list[int]] = []
    for i, e in raw:
        if not 0 <= i < len(factors):
            raise MalformedWordError(f"factor index {i} out of range for {len(factors)} factors")
        e = factors[i].normalize(e)
        if e == 0:
            continue
        if stack and stack[-1][0] == i:
            merged = factors[i].normalize(stack[-1][1] + e)
            if merged == 0:
                stack.pop()
            else:
                stack[-1][1] = merged
        else:
            stack.append([i, e])
    return Word(spec, tuple((i, e) for i, e in stack))


def multiply(u: Word, v: Word) -> Word:
    if u.spec != v.spec:
        raise ValueError("cannot multiply words from different groups")
    if not u.syllables:
        return v
    if not v.syllables:
        return u
    factors = u.spec.factors
    left = list(u.syllables)
    right = v.syllables
    j = 0
    while left and j < len(right) and left[-1][0] == right[j][0]:
        i = right[j][0]
        merged = factors[i].normalize(left[-1][1] + right[j][1])
        left.pop()
        j += 1
        if merged != 0:
            left.append((i, merged))
            break
    return Word(u.spec, tuple(left) + right[j:])


def invert(u: Word) -> Word:
    factors = u.spec.factors
    return Word(u.spec, tuple((i, factors[i].normalize(-e)) for i, e in reversed(u.syllables)))


class WordType(str, enum.Enum):
    IDENTITY = "identity"
    GAMMA = "gamma-word"
    DELTA = "delta-word"


def classify(u: Word, gamma_block: Iterable[int]) -> WordType:
    """Gamma-word or Delta-word by the factor of the first syllable."""
    if not u.syllables:
        return WordType.IDENTITY
    return WordType.GAMMA if u.syllables[0][0] in set(gamma_block) else WordType.DELTA


def length(u: Word) -> int:
    return len(u.syllables)


def ball(spec: GroupSpec, generators: Sequence[Word], radius: int) -> list[Word]:
    """All elements within word distance ``radius`` of the identity, shortlex sorted."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    gens = list(dict.fromkeys(generators))
    gen_set = set(gens)
    for g in gens:
        if g.spec != spec:
            raise ValueError("generator from a different group")
        if g.inverse() not in gen_set:
            raise ValueError(f"generating set is not symmetric: missing inverse of {g}")
    seen = {spec.identity(): 0}
    frontier = deque([spec.identity()])
    while frontier:
        w = frontier.popleft()
        d = seen[w]
        if d == radius:
            continue
        for g in gens:
            nxt = g * w
            if nxt not in seen:
                seen[nxt] = d + 1
                frontier.append(nxt)
    return sorted(seen, key=Word.sort_key)


def _exponents(factor: CyclicFactor, cap: int | None) -> list[int]:
    if factor.order is not None:
        return list(range(1, factor.order))
    if cap is None:
        raise ValueError("an exponent cap is needed for infinite factors")
    out = []
    for k in range(1, cap + 1):
        out += [k, -k]
    return out


def words_by_length(
    spec: GroupSpec,
    max_length: int,
    exponent_cap: int | None = None,
    first_factors: Iterable[int] | None = None,
) -> Iterator[Word]:
    """Words of syllable length <= max_length in shortlex order.

    Infinite factors contribute exponents with absolute value at most
    ``exponent_cap``.  ``first_factors`` restricts the factor of the first
    syllable (the identity is yielded only when it is None).
    """
    allowed_first = None if first_factors is None else set(first_factors)
    exps = [_exponents(f, exponent_cap) for f in spec.factors]
    if allowed_first is None:
        yield spec.identity()

    def extend(prefix: list[tuple[int, int]], remaining: int) -> Iterator[tuple]:
        if remaining == 0:
            yield tuple(prefix)
            return
        for i in range(spec.rank):
            if prefix and prefix[-1][0] == i:
                continue
            if not prefix and allowed_first is not None and i not in allowed_first:
                continue
            for e in exps[i]:
                prefix.append((i, e))
                yield from extend(prefix, remaining - 1)
                prefix.pop()

    for n in range(1, max_length + 1):
        yield from (Word(spec, syl) for syl in extend([], n))


