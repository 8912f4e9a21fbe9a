"""Rule engine for the partial-injection game on a free product Gamma * Delta.

Players alternate extending a finite partial injection y.  Each move must
define y at the point where y currently ends, may define y on extra keys of
the mover's own word type, and must leave y injective with one orbit ending
at a word of the mover's type.  Infinite plays are judged on a finite ball.
"""
from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Sequence

from .dynamics import PartialInjection, act, orbit_report
from .groups import GroupSpec, Word, WordType, classify, words_by_length

__all__ = [
    "Player",
    "Clause",
    "Reason",
    "Violation",
    "IllegalMove",
    "GameConfig",
    "Move",
    "GameState",
    "Verdict",
    "Transcript",
    "check_move",
    "validate_move",
    "adjudicate_finite",
    "explored_ball",
    "greedy_minimal",
    "random_legal",
    "delta_ender",
    "STRATEGIES",
    "TARGETS",
    "play",
    "replay",
    "corrupt_move",
    "CORRUPTIONS",
]


class Player(str, enum.Enum):
    I = "I"
    II = "II"

    @property
    def other(self) -> Player:
        return Player.II if self is Player.I else Player.I

    @property
    def word_type(self) -> WordType:
        return WordType.GAMMA if self is Player.I else WordType.DELTA


class Clause(str, enum.Enum):
    FORCED_VALUE_MISSING = "forced-value-missing"
    KEY_ALREADY_DEFINED = "key-already-defined"
    KEY_WRONG_TYPE = "key-wrong-type"
    NOT_INJECTIVE = "not-injective"
    NOT_ONE_ORBIT = "not-one-orbit"
    WRONG_END = "wrong-end"


class Reason(str, enum.Enum):
    MINIMAL_UNDEFINED_DELTA = "minimal-undefined-delta-or-identity"
    MINIMAL_UNDEFINED_GAMMA = "minimal-undefined-gamma"
    NOT_FREE_DELTA = "not-free-delta-witness"
    NOT_FREE_GAMMA = "not-free-gamma-witness"
    IN_TARGET = "total-in-target"
    NOT_IN_TARGET = "total-not-in-target"
    ILLEGAL_MOVE = "illegal-move"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class Violation:
    clause: Clause
    assignment: tuple[Word, Word] | None = None
    detail: str = ""

    def to_json(self) -> dict:
        out: dict = {"clause": self.clause.value, "detail": self.detail}
        if self.assignment is not None:
            out["assignment"] = [str(self.assignment[0]), str(self.assignment[1])]
        return out


class IllegalMove(ValueError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(f"{v.clause.value}: {v.detail}" for v in self.violations))

    @property
    def clauses(self) -> set[Clause]:
        return {v.clause for v in self.violations}


# Target predicates see y and the explored radius; None means "cannot tell".
TargetPredicate = Callable[[PartialInjection, int], "bool | None"]

TARGETS: dict[str, TargetPredicate] = {
    "always": lambda y, r: True,
    "never": lambda y, r: False,
    "unknown": lambda y, r: None,
}


@dataclass(frozen=True, eq=False)
class GameConfig:
    spec: GroupSpec
    gamma_block: frozenset[int]
    target: str = "always"

    def __post_init__(self) -> None:
        block = frozenset(self.gamma_block)
        object.__setattr__(self, "gamma_block", block)
        if not block or not block < frozenset(range(self.spec.rank)):
            raise ValueError("the Gamma block must be a nonempty proper subset of the factors")
        if self.target not in TARGETS:
            raise ValueError(f"unknown target predicate {self.target!r}")

    @property
    def delta_block(self) -> frozenset[int]:
        return frozenset(range(self.spec.rank)) - self.gamma_block

    @property
    def target_predicate(self) -> TargetPredicate:
        return TARGETS[self.target]

    def kind(self, w: Word) -> WordType:
        return classify(w, self.gamma_block)

    def to_json(self) -> dict:
        return {"group": self.spec.to_json(), "gamma": sorted(self.gamma_block), "target": self.target}

    @classmethod
    def from_json(cls, data: dict) -> GameConfig:
        return cls(GroupSpec.from_json(data["group"]), frozenset(data["gamma"]), data.get("target", "always"))


@dataclass(frozen=True)
class Move:
    assignments: tuple[tuple[Word, Word], ...]

    def __post_init__(self) -> None:
        keys = [k for k, _ in self.assignments]
        if len(set(keys)) != len(keys):
            raise ValueError("assignment keys must be distinct")

    @classmethod
    def of(cls, pairs: Iterable[tuple[Word, Word]]) -> Move:
        return cls(tuple(pairs))

    def to_json(self) -> list[list[str]]:
        return [[str(k), str(v)] for k, v in self.assignments]

    @classmethod
    def from_json(cls, spec: GroupSpec, data: Sequence[Sequence[str]]) -> Move:
        return cls(tuple((spec.word(k), spec.word(v)) for k, v in data))


@dataclass(frozen=True, eq=False)
class GameState:
    config: GameConfig
    y: PartialInjection
    turn: Player = Player.I
    history: tuple[Move, ...] = ()

    @classmethod
    def initial(cls, config: GameConfig) -> GameState:
        return cls(config, PartialInjection(config.spec))

    @property
    def move_count(self) -> int:
        return len(self.history)

    @cached_property
    def end(self) -> Word | None:
        return orbit_report(self.y).ends


def check_move(state: GameState, move: Move) -> list[Violation]:
    """Every rule clause the move breaks; empty when the move is legal."""
    cfg = state.config
    y = state.y
    mover = state.turn
    out: list[Violation] = []
    xi = state.end
    keys = {k for k, _ in move.assignments}
    if xi is None or xi not in keys:
        out.append(Violation(Clause.FORCED_VALUE_MISSING, None, f"y ends at {xi} but the move does not define it"))
    for k, v in move.assignments:
        if k == xi:
            continue
        if k in y:
            out.append(Violation(Clause.KEY_ALREADY_DEFINED, (k, v), f"y({k}) is already {y(k)}"))
        kind = cfg.kind(k)
        if kind is not mover.word_type:
            out.append(Violation(Clause.KEY_WRONG_TYPE, (k, v), f"player {mover.value} may not define a {kind.value} key"))
    used: dict[Word, Word] = {v: k for k, v in y.items()}
    for k, v in move.assignments:
        if v in used and used[v] != k:
            out.append(Violation(Clause.NOT_INJECTIVE, (k, v), f"{v} already has preimage {used[v]}"))
        else:
            used[v] = k
    if out:
        return out
    after = y.extend(move.assignments)
    rep = orbit_report(after)
    if rep.orbit_count != 1:
        out.append(Violation(Clause.NOT_ONE_ORBIT, None, f"{rep.orbit_count} orbits after the move"))
    elif rep.ends is None:
        out.append(Violation(Clause.WRONG_END, None, "y closes into a cycle and ends nowhere"))
    elif cfg.kind(rep.ends) is not mover.word_type:
        out.append(Violation(Clause.WRONG_END, None, f"y ends at {rep.ends}, a {cfg.kind(rep.ends).value}"))
    return out


def validate_move(state: GameState, move: Move) -> GameState:
    """Apply a legal move; raise IllegalMove listing every violated clause otherwise."""
    violations = check_move(state, move)
    if violations:
        raise IllegalMove(violations)
    return GameState(state.config, state.y.extend(move.assignments), state.turn.other, state.history + (move,))


@dataclass(frozen=True)
class Verdict:
    winner: Player | None
    reason: Reason
    witness: Word | None = None

    def to_json(self) -> dict:
        return {
            "winner": self.winner.value if self.winner else "unresolved",
            "reason": self.reason.value,
            "witness": None if self.witness is None else str(self.witness),
        }


def explored_ball(spec: GroupSpec, radius: int) -> list[Word]:
    """Words of syllable length <= radius, infinite exponents capped at radius."""
    return list(words_by_length(spec, radius, exponent_cap=max(radius, 1)))


def _translate_fixes(g: Word, z: dict[Word, Word]) -> bool:
    # g . z agrees with z wherever both are defined, and they overlap somewhere
    gi = g.inverse()
    overlap = False
    for d, zd in z.items():
        src = gi * d
        if src in z:
            overlap = True
            if g * z[src] != zd:
                return False
    return overlap


def adjudicate_finite(state: GameState, explored_radius: int) -> Verdict:
    """Finite-horizon reading of the end-of-game rule on the explored ball."""
    cfg = state.config
    y = state.y
    words = explored_ball(cfg.spec, explored_radius)
    undefined = [w for w in words if w not in y]
    if undefined:
        shortest = len(undefined[0])
        minimal = [w for w in undefined if len(w) == shortest]
        bad = [w for w in minimal if cfg.kind(w) is not WordType.GAMMA]
        if bad:
            return Verdict(Player.I, Reason.MINIMAL_UNDEFINED_DELTA, bad[0])
        return Verdict(Player.II, Reason.MINIMAL_UNDEFINED_GAMMA, minimal[0])
    # y covers the ball: look for alpha, g with g . (alpha^-1 . y) = alpha^-1 . y
    nonid = [w for w in words if not w.is_identity]
    block_elems = {
        WordType.GAMMA: [w for w in nonid if all(i in cfg.gamma_block for i, _ in w.syllables)],
        WordType.DELTA: [w for w in nonid if all(i not in cfg.gamma_block for i, _ in w.syllables)],
    }
    found: list[tuple[Word, WordType]] = []
    for alpha in words:
        if found and len(alpha) > len(found[0][0]):
            break
        z = dict(act(alpha.inverse(), y).items())
        for kind, elems in block_elems.items():
            if any(_translate_fixes(g, z) for g in elems):
                found.append((alpha, kind))
    if found:
        for alpha, kind in found:
            if cfg.kind(alpha) is WordType.DELTA or (alpha.is_identity and kind is WordType.DELTA):
                return Verdict(Player.I, Reason.NOT_FREE_DELTA, alpha)
        return Verdict(Player.II, Reason.NOT_FREE_GAMMA, found[0][0])
    inside = cfg.target_predicate(y, explored_radius)
    if inside is None:
        return Verdict(None, Reason.UNRESOLVED)
    if inside:
        return Verdict(Player.II, Reason.IN_TARGET)
    return Verdict(Player.I, Reason.NOT_IN_TARGET)


# Strategies map (state, rng) to a move.
Strategy = Callable[[GameState, random.Random], Move]


def _candidates(state: GameState, kind: WordType, max_length: int) -> tuple[Word, ...]:
    cfg = state.config
    first = cfg.gamma_block if kind is WordType.GAMMA else cfg.delta_block
    return _words_starting_in(cfg.spec, first, max_length)


@lru_cache(maxsize=256)
def _words_starting_in(spec: GroupSpec, first: frozenset[int], max_length: int) -> tuple[Word, ...]:
    return tuple(words_by_length(spec, max_length, exponent_cap=max_length, first_factors=first))


def _fresh(state: GameState, taken: set[Word], kind: WordType, rng: random.Random | None, pool: int = 24) -> Word:
    length = 1
    while True:
        options = [w for w in _candidates(state, kind, length) if w not in taken]
        if options:
            if rng is None:
                return options[0]
            return rng.choice(options[:pool])
        length += 1


def _occupied(y: PartialInjection) -> set[Word]:
    return set(y.domain) | set(y.range)


def greedy_minimal(state: GameState, rng: random.Random | None = None) -> Move:
    """Define only the forced value, sending it to the least fresh word of the mover's type."""
    xi = state.end
    taken = _occupied(state.y) | {xi}
    return Move(((xi, _fresh(state, taken, state.turn.word_type, None)),))


def random_legal(state: GameState, rng: random.Random) -> Move:
    """Forced value plus a few random extensions of the chain at either end."""
    kind = state.turn.word_type
    xi = state.end
    taken = _occupied(state.y) | {xi}
    v = _fresh(state, taken, kind, rng)
    taken.add(v)
    pairs = [(xi, v)]
    # the new end v has the mover's type, so it may also be defined as an extra key
    for _ in range(rng.randrange(3)):
        nxt = _fresh(state, taken, kind, rng)
        taken.add(nxt)
        pairs.append((pairs[-1][1], nxt))
    begin = orbit_report(state.y).begins if len(state.y) else state.config.spec.identity()
    if rng.random() < 0.3 and begin is not None:
        k = _fresh(state, taken, kind, rng)
        pairs.append((k, begin))
    return Move(tuple(pairs))


def delta_ender(state: GameState, rng: random.Random | None = None) -> Move:
    """Deliberately wrong strategy: always end at a word of the opponent's type."""
    xi = state.end
    taken = _occupied(state.y) | {xi}
    wrong = WordType.DELTA if state.turn is Player.I else WordType.GAMMA
    return Move(((xi, _fresh(state, taken, wrong, None)),))


STRATEGIES: dict[str, Strategy] = {
    "greedy": greedy_minimal,
    "random": random_legal,
    "delta-ender": delta_ender,
}


@dataclass
class Transcript:
    config: GameConfig
    seed: int
    strategies: tuple[str, str]
    states: list[GameState]
    moves: list[dict] = field(default_factory=list)
    verdict: Verdict | None = None

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "seed": self.seed,
            "strategies": list(self.strategies),
            "moves": self.moves,
            "states": [s.y.to_json()["entries"] for s in self.states],
            "verdict": None if self.verdict is None else self.verdict.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def _move_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}/{index}")


def _record(transcript: Transcript, state: GameState, move: Move) -> GameState | None:
    violations = check_move(state, move)
    transcript.moves.append(
        {
            "player": state.turn.value,
            "assignments": move.to_json(),
            "accepted": not violations,
            "violations": [v.to_json() for v in violations],
        }
    )
    if violations:
        transcript.verdict = Verdict(state.turn.other, Reason.ILLEGAL_MOVE)
        return None
    nxt = GameState(state.config, state.y.extend(move.assignments), state.turn.other, state.history + (move,))
    transcript.states.append(nxt)
    return nxt


def play(
    config: GameConfig,
    strategy_I: str | Strategy,
    strategy_II: str | Strategy,
    rounds: int,
    seed: int = 0,
    adjudicate_radius: int | None = None,
) -> Transcript:
    """Alternate the two strategies for ``rounds`` moves; an illegal move loses immediately."""
    names = tuple(s if isinstance(s, str) else getattr(s, "__name__", "custom") for s in (strategy_I, strategy_II))
    strat = [STRATEGIES[s] if isinstance(s, str) else s for s in (strategy_I, strategy_II)]
    state = GameState.initial(config)
    t = Transcript(config, seed, names, [state])
    for i in range(rounds):
        mover = strat[0 if state.turn is Player.I else 1]
        nxt = _record(t, state, mover(state, _move_rng(seed, i)))
        if nxt is None:
            return t
        state = nxt
    if adjudicate_radius is not None:
        t.verdict = adjudicate_finite(state, adjudicate_radius)
    return t


def replay(data: dict, adjudicate_radius: int | None = None) -> Transcript:
    """Re-run the recorded moves through the rule engine."""
    config = GameConfig.from_json(data["config"])
    state = GameState.initial(config)
    t = Transcript(config, int(data.get("seed", 0)), tuple(data.get("strategies", ("replay", "replay"))), [state])
    for rec in data["moves"]:
        nxt = _record(t, state, Move.from_json(config.spec, rec["assignments"]))
        if nxt is None:
            break
        state = nxt
    else:
        if adjudicate_radius is not None:
            t.verdict = adjudicate_finite(state, adjudicate_radius)
        elif data.get("verdict") is not None:
            t.verdict = _verdict_from_json(config.spec, data["verdict"])
    return t


def _verdict_from_json(spec: GroupSpec, data: dict) -> Verdict:
    winner = None if data["winner"] == "unresolved" else Player(data["winner"])
    witness = None if data.get("witness") is None else spec.word(data["witness"])
    return Verdict(winner, Reason(data["reason"]), witness)


def _drop_forced(state: GameState, move: Move, rng: random.Random) -> Move | None:
    xi = state.end
    rest = tuple((k, v) for k, v in move.assignments if k != xi)
    return Move(rest)


def _wrong_type_key(state: GameState, move: Move, rng: random.Random) -> Move | None:
    taken = _occupied(state.y) | {w for kv in move.assignments for w in kv}
    wrong = WordType.DELTA if state.turn is Player.I else WordType.GAMMA
    k = _fresh(state, taken, wrong, rng)
    taken.add(k)
    v = _fresh(state, taken, state.turn.word_type, rng)
    return Move(move.assignments + ((k, v),))


def _redefine_key(state: GameState, move: Move, rng: random.Random) -> Move | None:
    if not len(state.y):
        return None
    k = rng.choice(sorted(state.y.domain))
    taken = _occupied(state.y) | {w for kv in move.assignments for w in kv}
    v = _fresh(state, taken, state.turn.word_type, rng)
    return Move(move.assignments + ((k, v),))


def _collide_value(state: GameState, move: Move, rng: random.Random) -> Move | None:
    taken = _occupied(state.y) | {w for kv in move.assignments for w in kv}
    k = _fresh(state, taken, state.turn.word_type, rng)
    v = rng.choice([v for _, v in move.assignments])
    return Move(move.assignments + ((k, v),))


def _detached_pair(state: GameState, move: Move, rng: random.Random) -> Move | None:
    taken = _occupied(state.y) | {w for kv in move.assignments for w in kv}
    k = _fresh(state, taken, state.turn.word_type, rng)
    taken.add(k)
    v = _fresh(state, taken, state.turn.word_type, rng)
    return Move(move.assignments + ((k, v),))


def _wrong_end(state: GameState, move: Move, rng: random.Random) -> Move | None:
    xi = state.end
    taken = _occupied(state.y) | {xi}
    wrong = WordType.DELTA if state.turn is Player.I else WordType.GAMMA
    return Move(((xi, _fresh(state, taken, wrong, rng)),))


def _close_cycle(state: GameState, move: Move, rng: random.Random) -> Move | None:
    xi = state.end
    begin = orbit_report(state.y).begins if len(state.y) else xi
    return Move(((xi, begin),))


# name -> (mutator, clause the rule engine must report)
CORRUPTIONS: dict[str, tuple[Callable[[GameState, Move, random.Random], Move | None], Clause]] = {
    "drop-forced": (_drop_forced, Clause.FORCED_VALUE_MISSING),
    "wrong-type-key": (_wrong_type_key, Clause.KEY_WRONG_TYPE),
    "redefine-key": (_redefine_key, Clause.KEY_ALREADY_DEFINED),
    "collide-value": (_collide_value, Clause.NOT_INJECTIVE),
    "detached-pair": (_detached_pair, Clause.NOT_ONE_ORBIT),
    "wrong-end": (_wrong_end, Clause.WRONG_END),
    "close-cycle": (_close_cycle, Clause.WRONG_END),
}


def corrupt_move(state: GameState, move: Move, kind: str, rng: random.Random) -> tuple[Move, Clause] | None:
    """A broken variant of a legal move and the clause it must trip (None if not applicable)."""
    mutate, clause = CORRUPTIONS[kind]
    bad = mutate(state, move, rng)
    return None if bad is None else (bad, clause)
