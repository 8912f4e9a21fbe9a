from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperfin.dynamics import (
    Order,
    PartialInjection,
    act,
    less_than,
    orbit_point,
    orbit_report,
    w_iterate,
    w_iterate_closed_form,
    w_map,
)
from hyperfin.groups import GroupSpec, ball, free_group, free_product_of_cyclics

C2_3 = free_product_of_cyclics(2, 2, 2)
Z = free_group(1)
F2 = free_group(2)


def random_chain(spec: GroupSpec, rng: random.Random, length: int, through_identity: bool = True) -> PartialInjection:
    """A single-orbit chain of distinct words, passing through 1 when asked."""
    pool = ball(spec, spec.symmetric_generators(), 4)
    pts = rng.sample(pool, length + 1)
    if through_identity and spec.identity() not in pts:
        pts[rng.randrange(len(pts))] = spec.identity()
    return PartialInjection(spec, list(zip(pts, pts[1:])))


def test_rejects_non_injective():
    with pytest.raises(ValueError):
        PartialInjection.from_text(C2_3, {"1": "a", "b": "a"})


def test_act_examples():
    x = PartialInjection.from_text(C2_3, {"1": "a"})
    assert act(C2_3.identity(), x) == x
    assert act(C2_3.word("b"), x) == PartialInjection.from_text(C2_3, {"b": "b.a"})


def test_w_map_examples():
    x = PartialInjection.from_text(Z, {"1": "t", "t": "t^2"})
    assert w_map(x) == PartialInjection.from_text(Z, {"t^-1": "1", "1": "t"})
    y = PartialInjection.from_text(C2_3, {"1": "a", "a": "a.b"})
    assert w_map(y) == PartialInjection.from_text(C2_3, {"a": "1", "1": "b"})
    assert w_map(PartialInjection.from_text(C2_3, {"a": "b"})) is None


def test_w_iterate_examples():
    x = PartialInjection.from_text(Z, {"1": "t", "t": "t^2"})
    assert w_iterate(x, 0) == x
    two = w_iterate(x, 2)
    assert two == act(Z.word("t^-2"), x)
    assert two == w_iterate_closed_form(x, 2)


def test_orbit_report_examples():
    empty = orbit_report(PartialInjection(C2_3))
    assert empty.is_one_orbit and empty.begins.is_identity and empty.ends.is_identity
    r = orbit_report(PartialInjection.from_text(C2_3, {"1": "a", "a": "a.b"}))
    assert (r.orbit_count, str(r.begins), str(r.ends)) == (1, "1", "a.b")
    two = orbit_report(PartialInjection.from_text(C2_3, {"1": "a", "b": "c"}))
    assert two.orbit_count == 2 and not two.is_one_orbit


def test_orbit_report_cycle():
    r = orbit_report(PartialInjection.from_text(C2_3, {"1": "a", "a": "1"}))
    assert r.orbit_count == 1 and r.is_cycle and r.ends is None


def test_less_than_examples():
    x = PartialInjection.from_text(Z, {"1": "t", "t": "t^2"})
    assert less_than(x, x, 5) is Order.NOT_LESS_WITHIN_BOUND
    assert less_than(x, w_map(x), 1) is Order.LESS
    other = PartialInjection.from_text(Z, {"t^5": "t^9"})
    assert less_than(x, other, 10) is Order.NOT_LESS_WITHIN_BOUND
    with pytest.raises(ValueError):
        less_than(x, x, 0)


def test_json_round_trip():
    x = PartialInjection.from_text(F2, {"1": "s", "s": "s.t^-1"})
    assert PartialInjection.from_json(x.to_json()) == x
    assert x.to_json()["entries"] == [["1", "s"], ["s", "s.t^-1"]]


@pytest.mark.parametrize("spec", [C2_3, F2], ids=["C2^3", "F2"])
@given(seed=st.integers(0, 10**6), length=st.integers(1, 8))
def test_action_axioms_and_orbit_transport(spec, seed, length):
    rng = random.Random(seed)
    x = random_chain(spec, rng, length, through_identity=False)
    pool = ball(spec, spec.symmetric_generators(), 3)
    g, h = rng.choice(pool), rng.choice(pool)
    assert act(g, act(h, x)) == act(g * h, x)
    gx = act(g, x)
    assert orbit_report(gx).orbit_count == orbit_report(x).orbit_count
    # the orbit R of x is carried to the orbit gR of g.x
    orbit = set(x.domain) | set(x.range)
    assert set(gx.domain) | set(gx.range) == {g * w for w in orbit}
    assert orbit_report(gx).begins == g * orbit_report(x).begins


@pytest.mark.parametrize("spec", [C2_3, F2], ids=["C2^3", "F2"])
@given(seed=st.integers(0, 10**6), length=st.integers(1, 8))
def test_w_shifts_the_orbit(spec, seed, length):
    x = random_chain(spec, random.Random(seed), length)
    y = w_map(x)
    if y is None:
        return
    x1 = x(spec.identity())
    assert orbit_report(y).is_one_orbit
    assert y.domain == frozenset(x1.inverse() * d for d in x.domain)


@pytest.mark.parametrize("spec", [C2_3, F2], ids=["C2^3", "F2"])
@given(seed=st.integers(0, 10**6), length=st.integers(1, 10))
def test_w_iterate_identity(spec, seed, length):
    x = random_chain(spec, random.Random(seed), length)
    for n in range(-length, length + 1):
        lhs = w_iterate(x, n)
        rhs = w_iterate_closed_form(x, n)
        assert (lhs is None) == (orbit_point(x, n) is None)
        assert lhs == rhs


@given(seed=st.integers(0, 10**6))
def test_less_than_transitive(seed):
    x = random_chain(F2, random.Random(seed), 6)
    chain = [x]
    for _ in range(3):
        nxt = w_map(chain[-1])
        if nxt is None:
            return
        chain.append(nxt)
    a, b, c = chain[0], chain[1], chain[3]
    if less_than(a, b, 5) is Order.LESS and less_than(b, c, 5) is Order.LESS:
        assert less_than(a, c, 10) is Order.LESS
