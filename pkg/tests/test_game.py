from __future__ import annotations

import json
import random

import pytest

from hyperfin.dynamics import PartialInjection, orbit_report
from hyperfin.game import (
    CORRUPTIONS,
    Clause,
    GameConfig,
    GameState,
    IllegalMove,
    Move,
    Player,
    Reason,
    adjudicate_finite,
    check_move,
    corrupt_move,
    explored_ball,
    play,
    replay,
    validate_move,
)
from hyperfin.groups import WordType, classify, free_group, free_product_of_cyclics

C2_3 = free_product_of_cyclics(2, 2, 2)
F2 = free_group(2)
CFG = GameConfig(C2_3, frozenset({0}))
W = C2_3.word


def assert_state_invariants(state: GameState) -> None:
    y = state.y
    values = [v for _, v in y.items()]
    assert len(values) == len(set(values))
    rep = orbit_report(y)
    assert rep.orbit_count == 1 and rep.ends is not None
    if state.move_count:
        last_mover = state.turn.other
        assert classify(rep.ends, state.config.gamma_block) is last_mover.word_type


def test_config_validation():
    with pytest.raises(ValueError):
        GameConfig(C2_3, frozenset())
    with pytest.raises(ValueError):
        GameConfig(C2_3, frozenset({0, 1, 2}))
    with pytest.raises(ValueError):
        GameConfig(C2_3, frozenset({0}), target="sometimes")
    back = GameConfig.from_json(CFG.to_json())
    assert back.gamma_block == CFG.gamma_block and back.delta_block == frozenset({1, 2})


def test_move_keys_distinct():
    with pytest.raises(ValueError):
        Move.of([(W("1"), W("a")), (W("1"), W("a.b"))])


def test_opening_gamma_accepted():
    s = validate_move(GameState.initial(CFG), Move.of([(W("1"), W("a"))]))
    assert s.end == W("a") and s.turn is Player.II


def test_opening_delta_rejected():
    with pytest.raises(IllegalMove) as err:
        validate_move(GameState.initial(CFG), Move.of([(W("1"), W("b"))]))
    assert err.value.clauses == {Clause.WRONG_END}


def test_two_chains_rejected():
    # {1 -> a, a.b -> a.b.a}: the second pair starts a separate chain
    m = Move.of([(W("1"), W("a")), (W("a.b"), W("a.b.a"))])
    assert {v.clause for v in check_move(GameState.initial(CFG), m)} == {Clause.NOT_ONE_ORBIT}


def test_free_group_two_chains_rejected():
    cfg = GameConfig(F2, frozenset({0}))
    s = F2.word
    m = Move.of([(s("1"), s("s")), (s("s^2"), s("s^3"))])
    assert {v.clause for v in check_move(GameState.initial(cfg), m)} == {Clause.NOT_ONE_ORBIT}


def test_forced_key_and_type_clauses():
    s1 = validate_move(GameState.initial(CFG), Move.of([(W("1"), W("a"))]))
    # player II must define y(a)
    got = {v.clause for v in check_move(s1, Move.of([(W("b"), W("b.a"))]))}
    assert Clause.FORCED_VALUE_MISSING in got and Clause.KEY_WRONG_TYPE not in got
    got = {v.clause for v in check_move(s1, Move.of([(W("a"), W("b")), (W("a.b"), W("c"))]))}
    assert Clause.KEY_WRONG_TYPE in got
    got = {v.clause for v in check_move(s1, Move.of([(W("a"), W("b")), (W("1"), W("c"))]))}
    assert Clause.KEY_ALREADY_DEFINED in got
    got = {v.clause for v in check_move(s1, Move.of([(W("a"), W("a"))]))}
    assert got == {Clause.NOT_INJECTIVE}


def test_identity_key_is_never_an_extra_key_for_player_two():
    # identity is neither a Gamma-word nor a Delta-word
    assert CFG.kind(W("1")) is WordType.IDENTITY


def test_adjudicate_empty_state():
    v = adjudicate_finite(GameState.initial(CFG), 2)
    assert (v.winner, v.reason, v.witness) == (Player.I, Reason.MINIMAL_UNDEFINED_DELTA, W("1"))


def test_adjudicate_gamma_words_defined_only():
    # y covers 1 and the length-1 Gamma word a; b is the least undefined Delta word
    y = PartialInjection.from_text(C2_3, {"1": "a", "a": "a.b"})
    v = adjudicate_finite(GameState(CFG, y, Player.I, ()), 2)
    assert (v.winner, v.reason, v.witness) == (Player.I, Reason.MINIMAL_UNDEFINED_DELTA, W("b"))


def test_adjudicate_minimal_gamma_undefined():
    y = PartialInjection.from_text(C2_3, {"1": "b", "b": "c", "c": "b.a"})
    v = adjudicate_finite(GameState(CFG, y, Player.I, ()), 2)
    assert (v.winner, v.reason, v.witness) == (Player.II, Reason.MINIMAL_UNDEFINED_GAMMA, W("a"))


def _total_chain(radius: int) -> PartialInjection:
    words = explored_ball(C2_3, radius)
    pts = words + [W("a.b.c.a.b")]
    return PartialInjection(C2_3, list(zip(pts, pts[1:])))


@pytest.mark.parametrize(
    "target, winner, reason",
    [
        ("always", Player.II, Reason.IN_TARGET),
        ("never", Player.I, Reason.NOT_IN_TARGET),
        ("unknown", None, Reason.UNRESOLVED),
    ],
)
def test_adjudicate_total_free_chain(target, winner, reason):
    cfg = GameConfig(C2_3, frozenset({0}), target)
    v = adjudicate_finite(GameState(cfg, _total_chain(2), Player.I, ()), 2)
    assert (v.winner, v.reason) == (winner, reason)


def test_adjudicate_not_free_delta():
    # y(d) = d.b commutes with every left translate, so 1 witnesses a Delta stabilizer
    y = PartialInjection(C2_3, [(d, d * W("b")) for d in explored_ball(C2_3, 2)])
    v = adjudicate_finite(GameState(CFG, y, Player.I, ()), 2)
    assert (v.winner, v.reason, v.witness) == (Player.I, Reason.NOT_FREE_DELTA, W("1"))


def test_greedy_vs_greedy_four_rounds():
    t = play(CFG, "greedy", "greedy", 4, seed=0)
    assert len(t.states) == 5 and t.verdict is None
    for s in t.states[1:]:
        assert_state_invariants(s)


def test_random_play_reproducible():
    a = play(CFG, "random", "random", 8, seed=42, adjudicate_radius=2).dumps()
    b = play(CFG, "random", "random", 8, seed=42, adjudicate_radius=2).dumps()
    assert a == b
    assert replay(json.loads(a)).dumps() == a


def test_delta_ender_loses_immediately():
    t = play(CFG, "delta-ender", "greedy", 4, seed=0)
    assert t.verdict.winner is Player.II and t.verdict.reason is Reason.ILLEGAL_MOVE
    assert t.moves[0]["violations"][0]["clause"] == Clause.WRONG_END.value


def test_replay_detects_tampering():
    data = json.loads(play(CFG, "greedy", "greedy", 4, seed=0).dumps())
    data["moves"][1]["assignments"][0][1] = "a"
    t = replay(data)
    assert t.verdict.reason is Reason.ILLEGAL_MOVE


@pytest.mark.parametrize("spec", [C2_3, F2], ids=["C2^3", "F2"])
@pytest.mark.parametrize("pair", [("greedy", "greedy"), ("random", "random"), ("greedy", "random"), ("random", "greedy")])
def test_games_and_corruptions(spec, pair):
    cfg = GameConfig(spec, frozenset({0}))
    for seed in range(40):
        t = play(cfg, *pair, 8, seed=seed)
        assert t.verdict is None, t.moves[-1]
        rng = random.Random(seed)
        for state, nxt in zip(t.states, t.states[1:]):
            assert_state_invariants(nxt)
            legal = nxt.history[-1]
            for kind in CORRUPTIONS:
                got = corrupt_move(state, legal, kind, rng)
                if got is None:
                    continue
                bad, clause = got
                with pytest.raises(IllegalMove) as err:
                    validate_move(state, bad)
                assert clause in err.value.clauses, (kind, err.value)
        assert replay(json.loads(t.dumps())).dumps() == t.dumps()
