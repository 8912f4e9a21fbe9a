"""Local rules, exact failure probabilities and a Moser-Tardos solver.

A b-local rule assigns to each vertex x a set R(x) of allowed colorings of
its closed neighborhood G(x).  Frontier vertices of a framed graph have
truncated neighborhoods, so the rule is neither evaluated nor counted there.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Mapping, Sequence

from .graphs import FramedGraph, power_graph_2
from .groups import GroupSpec

__all__ = [
    "E_LOWER",
    "E_UPPER",
    "LocalRule",
    "failure_probability",
    "marks_kechris_rule",
    "mk_failure_count",
    "LLLVerdict",
    "lll_condition_check",
    "lll_sweep",
    "minimal_lll_n",
    "satisfies",
    "ResampleBudgetExceeded",
    "MTResult",
    "moser_tardos",
    "power2_degree",
    "power2_degrees",
]

# Rational enclosure of e used for every certified comparison.
E_LOWER = Fraction(2718281828, 10**9)
E_UPPER = Fraction(2718281829, 10**9)

Assignment = Mapping[int, int] | Sequence[int]
Predicate = Callable[[int, Assignment], bool]


@dataclass(eq=False)
class LocalRule:
    """Allowed-set descriptor: an explicit table, a predicate, or both with a counter.

    ``explicit[x]`` lists allowed value tuples ordered like ``G(x)``.
    ``predicate(x, f)`` reads f only on G(x).  ``counter(x)`` returns |R(x)|
    exactly when a closed formula is known.
    """

    b: int
    predicate: Predicate | None = None
    explicit: dict[int, frozenset[tuple[int, ...]]] | None = None
    counter: Callable[[int], int] | None = None
    max_enumeration: int = 25
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.b < 1:
            raise ValueError("alphabet size must be positive")
        if self.predicate is None and self.explicit is None:
            raise ValueError("a rule needs a predicate or an explicit table")

    @classmethod
    def allow_all(cls, b: int) -> LocalRule:
        return cls(b, predicate=lambda x, f: True, name="all")

    @classmethod
    def allow_none(cls, b: int) -> LocalRule:
        return cls(b, predicate=lambda x, f: False, name="none")

    def allows(self, g: FramedGraph, x: int, f: Assignment) -> bool:
        if self.explicit is not None:
            nb = g.graph.neighborhood(x)
            return tuple(f[v] for v in nb) in self.explicit.get(x, frozenset())
        return bool(self.predicate(x, f))

    def to_json(self) -> dict:
        out: dict = {"b": self.b, "name": self.name, "params": self.params}
        if self.explicit is not None:
            out["allowed"] = {str(x): sorted(list(t) for t in ts) for x, ts in self.explicit.items()}
        return out

    @classmethod
    def from_json(cls, data: dict) -> LocalRule:
        if "allowed" not in data:
            raise ValueError("only explicit rules can be read back; rebuild named rules with their builder")
        table = {int(x): frozenset(tuple(t) for t in ts) for x, ts in data["allowed"].items()}
        return cls(int(data["b"]), explicit=table, name=data.get("name", "explicit"))


def _count_allowed(g: FramedGraph, r: LocalRule, x: int, method: str) -> int:
    nb = g.graph.neighborhood(x)
    if method == "count":
        if r.explicit is not None:
            return len(r.explicit.get(x, ()))
        if r.counter is None:
            raise ValueError("rule has no counting formula")
        return r.counter(x)
    if len(nb) > r.max_enumeration:
        raise ValueError(f"|G(x)| = {len(nb)} exceeds the enumeration limit {r.max_enumeration}")
    total = 0
    f: dict[int, int] = {}
    for values in product(range(r.b), repeat=len(nb)):
        f.update(zip(nb, values))
        if r.allows(g, x, f):
            total += 1
    return total


def failure_probability(g: FramedGraph, r: LocalRule, x: int, method: str = "auto") -> Fraction:
    """p_R(x) = 1 - |R(x)| / b^|G(x)| as an exact rational.

    ``method`` is ``"enumerate"`` (walk all b^|G(x)| colorings), ``"count"``
    (explicit table or the rule's counting formula) or ``"auto"``.
    """
    if x in g.frontier:
        raise ValueError(f"vertex {x} is on the frontier; its neighborhood is truncated")
    if method == "auto":
        method = "count" if (r.explicit is not None or r.counter is not None) else "enumerate"
    if method not in ("count", "enumerate"):
        raise ValueError(f"unknown method {method!r}")
    k = len(g.graph.neighborhood(x))
    return 1 - Fraction(_count_allowed(g, r, x, method), r.b**k)


def mk_failure_count(k: int, s0: int, s1: int) -> int:
    """Disallowed colorings of a neighborhood of size k with s0 and s1 distinct rule neighbors."""
    # f(x) = 0 with every S0 neighbor 0, or f(x) = 1 with every S1 neighbor 1
    return 2 ** (k - 1 - s0) + 2 ** (k - 1 - s1)


def marks_kechris_rule(n: int, ball: FramedGraph, split: Sequence[int] | None = None) -> LocalRule:
    """The two-color rule on a ball of F_2n: 0 needs a 1 across S0, 1 needs a 0 across S1.

    ``split`` names the n free factors whose generators (and inverses) form
    S0; the other n factors form S1.  The ball must carry word labels and
    loops so that G(x) = (S u {1}) x.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if ball.labels is None:
        raise ValueError("ball must carry word labels")
    spec: GroupSpec = ball.labels[0].spec
    if spec.rank != 2 * n or any(f.order is not None for f in spec.factors):
        raise ValueError(f"ball must be over the free group of rank {2 * n}")
    if not ball.graph.loops:
        raise ValueError("ball must include loops")
    s0_idx = list(range(n)) if split is None else sorted(set(split))
    if len(s0_idx) != n or any(not 0 <= i < 2 * n for i in s0_idx):
        raise ValueError(f"split must pick exactly {n} of the {2 * n} free factors")
    s1_idx = [i for i in range(2 * n) if i not in s0_idx]
    s0 = [spec.gen(i) ** e for i in s0_idx for e in (1, -1)]
    s1 = [spec.gen(i) ** e for i in s1_idx for e in (1, -1)]
    index = ball.index
    near0: list[tuple[int, ...] | None] = []
    near1: list[tuple[int, ...] | None] = []
    for w in ball.labels:
        a = [index.get(s * w) for s in s0]
        b = [index.get(s * w) for s in s1]
        near0.append(None if None in a else tuple(a))
        near1.append(None if None in b else tuple(b))

    def predicate(x: int, f: Assignment) -> bool:
        if near0[x] is None or near1[x] is None:
            raise ValueError(f"vertex {x} has neighbors outside the ball")
        if f[x] == 0:
            return any(f[v] == 1 for v in near0[x])
        return any(f[v] == 0 for v in near1[x])

    def counter(x: int) -> int:
        k = len(ball.graph.neighborhood(x))
        return 2**k - mk_failure_count(k, len(set(near0[x])), len(set(near1[x])))

    return LocalRule(2, predicate=predicate, counter=counter, name="marks-kechris", params={"n": n, "split": s0_idx})


def power2_degrees(g: FramedGraph) -> list[int]:
    """|G^{<=2}(x)| for every vertex, counting x itself."""
    p = power_graph_2(g.graph)
    return [len(p.neighborhood(x)) for x in range(g.n)]


def power2_degree(g: FramedGraph, x: int) -> int:
    return power2_degrees(g)[x]


@dataclass(frozen=True)
class LLLVerdict:
    n: int
    holds: bool
    lhs: int
    degree: int
    rhs_lower: Fraction
    rhs_upper: Fraction

    @property
    def failure_probability(self) -> Fraction:
        return Fraction(1, self.lhs)

    @property
    def margin(self) -> tuple[Fraction, Fraction]:
        """Enclosure of 2^{2n} - e(1 + 16 n^2)."""
        return self.lhs - self.rhs_upper, self.lhs - self.rhs_lower


def lll_condition_check(n: int) -> LLLVerdict:
    """Certified decision of 2^{2n} > e (1 + (4n)^2)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    lhs = 2 ** (2 * n)
    degree = 1 + (4 * n) ** 2
    lo, hi = E_LOWER * degree, E_UPPER * degree
    if lhs > hi:
        holds = True
    elif lhs < lo:
        holds = False
    else:
        raise ArithmeticError(f"enclosure of e too coarse to decide n = {n}")
    return LLLVerdict(n, holds, lhs, degree, lo, hi)


def lll_sweep(start: int, stop: int) -> list[LLLVerdict]:
    return [lll_condition_check(n) for n in range(start, stop + 1)]


def minimal_lll_n(verdicts: Sequence[LLLVerdict]) -> int | None:
    return next((v.n for v in verdicts if v.holds), None)


def satisfies(g: FramedGraph, r: LocalRule, f: Sequence[int]) -> list[int]:
    """Interior vertices where f restricted to G(x) is not allowed."""
    if len(f) != g.n:
        raise ValueError("assignment must cover every vertex")
    return [x for x in g.interior() if not r.allows(g, x, f)]


class ResampleBudgetExceeded(RuntimeError):
    def __init__(self, resamples: int, violations: int):
        self.resamples = resamples
        self.violations = violations
        super().__init__(f"{violations} violations remain after {resamples} resamples")


@dataclass(frozen=True)
class MTResult:
    assignment: tuple[int, ...]
    resamples: int


def moser_tardos(g: FramedGraph, r: LocalRule, seed: int, max_resamples: int) -> MTResult:
    """Resample G(x) at the lowest-index violated interior vertex until none remain."""
    rng = random.Random(seed)
    f = [rng.randrange(r.b) for _ in range(g.n)]
    interior = g.interior()
    # watchers[v]: interior vertices whose neighborhood contains v
    watchers: list[list[int]] = [[] for _ in range(g.n)]
    for x in interior:
        for v in g.graph.neighborhood(x):
            watchers[v].append(x)
    violated = {x for x in interior if not r.allows(g, x, f)}
    resamples = 0
    while violated:
        if resamples >= max_resamples:
            raise ResampleBudgetExceeded(resamples, len(violated))
        x = min(violated)
        nb = g.graph.neighborhood(x)
        for v in nb:
            f[v] = rng.randrange(r.b)
        resamples += 1
        touched = {u for v in nb for u in watchers[v]}
        for u in touched:
            if r.allows(g, u, f):
                violated.discard(u)
            else:
                violated.add(u)
    if satisfies(g, r, f):
        raise AssertionError("solver returned an assignment that violates the rule")
    return MTResult(tuple(f), resamples)
