"""Command-line entry point.

JSON goes to stdout, diagnostics to stderr.  Exit status is 0 on success, 1
when a validation or check fails and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from importlib import metadata
from typing import Any, Callable, Sequence

from . import kernels
from .dynamics import PartialInjection, act, orbit_report, w_iterate
from .flows import (
    EquidecompositionInstance,
    antimatching_map,
    brute_force_flow,
    discrepancy,
    flow_to_json,
    partition_by_generator,
    path_flow,
    qualifying_vertices,
    random_instance,
)
from .game import GameConfig, STRATEGIES, TARGETS, adjudicate_finite, play, replay
from .graphs import (
    FramedGraph,
    FunctionalGraph,
    Partition,
    SimpleGraph,
    cayley_ball_graph,
    components,
    contract,
    forward_recurrent_set,
    functional_quotient,
    greedy_coloring,
    random_bounded_degree_graph,
    random_functional_graph,
    three_color_functional,
    to_dot,
)
from .groups import ball, parse_group
from .locallemma import (
    E_UPPER,
    ResampleBudgetExceeded,
    failure_probability,
    lll_condition_check,
    lll_sweep,
    marks_kechris_rule,
    minimal_lll_n,
    moser_tardos,
    satisfies,
)
from .witness import (
    WitnessSequence,
    degree_two_witness,
    extend_witness,
    functional_witness_traced,
    spanning_tree_witness,
    validate_witness,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class CheckFailed(Exception):
    """A computed result failed its own validation; carries the payload to print."""

    def __init__(self, payload: Any):
        super().__init__("check failed")
        self.payload = payload


def rational(q: Fraction | int) -> dict:
    q = Fraction(q)
    return {"num": q.numerator, "den": q.denominator}


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _read_json(path: str) -> Any:
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _graph_from_json(data: dict) -> FramedGraph | FunctionalGraph:
    if "succ" in data:
        return FunctionalGraph.from_json(data)
    if "graph" in data and isinstance(data["graph"], dict):
        return _graph_from_json(data["graph"])
    return FramedGraph.from_json(data)


# group


def cmd_group_ball(a) -> Any:
    spec = parse_group(a.group)
    words = ball(spec, spec.symmetric_generators(), a.radius)
    return {"group": spec.to_json(), "radius": a.radius, "size": len(words), "words": [str(w) for w in words]}


def cmd_group_mul(a) -> Any:
    spec = parse_group(a.group)
    out = spec.identity()
    for text in a.words:
        out = out * spec.word(text)
    return {"group": spec.to_json(), "product": str(out), "syllables": out.to_json()}


# dyn


def _map_arg(a) -> PartialInjection:
    if a.input:
        return PartialInjection.from_json(_read_json(a.input))
    spec = parse_group(a.group)
    pairs = {}
    for item in filter(None, (a.pairs or "").split(",")):
        k, _, v = item.partition("=")
        pairs[k.strip()] = v.strip()
    return PartialInjection.from_text(spec, pairs)


def _report_json(x: PartialInjection) -> dict:
    r = orbit_report(x)
    return {
        "orbit_count": r.orbit_count,
        "one_orbit": r.is_one_orbit,
        "begins": None if r.begins is None else str(r.begins),
        "ends": None if r.ends is None else str(r.ends),
    }


def cmd_dyn_act(a) -> Any:
    x = _map_arg(a)
    return act(x.spec.word(a.element), x).to_json()


def cmd_dyn_w(a) -> Any:
    y = w_iterate(_map_arg(a), a.times)
    return {"defined": y is not None, "result": None if y is None else y.to_json()}


def cmd_dyn_orbit(a) -> Any:
    return _report_json(_map_arg(a))


# game


def _game_config(a) -> GameConfig:
    spec = parse_group(a.group)
    gamma = frozenset(int(i) for i in a.gamma.split(","))
    return GameConfig(spec, gamma, a.target)


def cmd_game_play(a) -> Any:
    t = play(_game_config(a), a.player_one, a.player_two, a.rounds, a.seed, a.radius)
    out = t.to_json()
    if t.verdict is not None and t.verdict.reason.value == "illegal-move":
        raise CheckFailed(out)
    return out


def cmd_game_replay(a) -> Any:
    data = _read_json(a.input)
    t = replay(data)
    out = t.to_json()
    if _dumps(out) != _dumps(data):
        print("replay differs from the recorded transcript", file=sys.stderr)
        raise CheckFailed(out)
    return out


def cmd_game_adjudicate(a) -> Any:
    t = replay(_read_json(a.input))
    return adjudicate_finite(t.states[-1], a.radius).to_json()


# graph


def _gen_graph(kind: str, n: int, fanin: int, radius: int, group: str, seed: int) -> dict:
    rng = random.Random(seed)
    if kind == "functional":
        return random_functional_graph(n, fanin, rng).to_json()
    if kind == "cayley":
        spec = parse_group(group)
        return cayley_ball_graph(spec, radius=radius).to_json()
    if kind == "degree2":
        return random_bounded_degree_graph(n, 2, 0.5, rng).to_json()
    if kind == "random":
        return random_bounded_degree_graph(n, fanin, min(1.0, 2 * fanin / max(n, 1)), rng).to_json()
    raise ValueError(f"unknown graph kind {kind!r}")


def cmd_graph_gen(a) -> Any:
    return _gen_graph(a.kind, a.n, a.fanin, a.radius, a.group, a.seed)


def cmd_graph_color(a) -> Any:
    g = _graph_from_json(_read_json(a.input))
    if isinstance(g, FunctionalGraph):
        c = three_color_functional(g)
        proper = c.is_proper(g.graph)
    else:
        c = greedy_coloring(g.graph)
        proper = c.is_proper(g.graph)
    out = {"colors": list(c.colors), "num_colors": c.num_colors, "proper": proper}
    if not proper:
        raise CheckFailed(out)
    return out


def _functional_input(a) -> FunctionalGraph:
    g = _graph_from_json(_read_json(a.input))
    if not isinstance(g, FunctionalGraph):
        raise ValueError("input must be a functional graph")
    return g


def cmd_graph_recurrent(a) -> Any:
    fg = _functional_input(a)
    c = three_color_functional(fg)
    A = forward_recurrent_set(fg, c)
    mask = [1 if x in A else 0 for x in range(fg.n)]
    independent, recurrent = kernels.check_recurrent(fg.succ_array, mask)
    out = {"A": sorted(A), "size": len(A), "independent": bool(independent), "recurrent": bool(recurrent)}
    if not (independent and recurrent):
        raise CheckFailed(out)
    return out


def cmd_graph_contract(a) -> Any:
    data = _read_json(a.input)
    g = _graph_from_json(data)
    if isinstance(g, FunctionalGraph):
        colors = kernels.three_color(g.succ_array)
        mask = kernels.recurrent_mask(g.succ_array, colors)
        cls, k, _ = kernels.contraction_classes(g.succ_array, mask)
        p = Partition(cls, k)
        q = functional_quotient(g, p)
        return {"classes": p.count, "sizes": p.sizes().tolist(), "quotient": q.to_json()}
    p = components(g.graph)
    return {"classes": p.count, "minor": contract(g.graph, p).to_json()}


# witness


def _build_witness(kind: str, n: int, fanin: int, seed: int) -> WitnessSequence:
    rng = random.Random(seed)
    if kind == "functional":
        w, steps = functional_witness_traced(random_functional_graph(n, fanin, rng))
        w.metadata["step_sizes_ok"] = all(s.within_bounds() for s in steps)
        return w
    if kind == "degree2":
        return degree_two_witness(random_bounded_degree_graph(n, 2, 0.5, rng))
    if kind == "spanning":
        return spanning_tree_witness(random_bounded_degree_graph(n, fanin, min(1.0, 2 * fanin / max(n, 1)), rng))
    if kind == "extension":
        g = random_bounded_degree_graph(n, fanin, min(1.0, 2 * fanin / max(n, 1)), rng)
        a_set = _connected_sample(g, rng)
        sub, _ = g.induced(a_set)
        return extend_witness(FramedGraph(g), a_set, spanning_tree_witness(sub))
    raise ValueError(f"unknown witness kind {kind!r}")


def _connected_sample(g: SimpleGraph, rng: random.Random) -> set[int]:
    """A set meeting each component in one connected, randomly grown piece."""
    chosen: set[int] = set()
    for members in components(g).classes():
        piece = {rng.choice(members)}
        target = rng.randint(1, len(members))
        boundary = {u for v in piece for u in g.adjacency[v]} - piece
        while len(piece) < target and boundary:
            v = rng.choice(sorted(boundary))
            piece.add(v)
            boundary |= set(g.adjacency[v])
            boundary -= piece
        chosen |= piece
    return chosen


def cmd_witness_build(a) -> Any:
    return _build_witness(a.kind, a.n, a.fanin, a.seed).to_json()


def cmd_witness_validate(a) -> Any:
    w = WitnessSequence.from_json(_read_json(a.input))
    rep = validate_witness(w, a.bound).to_json()
    if not rep["valid"]:
        raise CheckFailed(rep)
    return rep


def cmd_witness_stats(a) -> Any:
    w = WitnessSequence.from_json(_read_json(a.input))
    rep = validate_witness(w, a.bound)
    return {"levels": rep.to_json()["levels"], "host_vertices": w.host.n, "host_edges": w.host.m, "metadata": w.metadata}


# lll


def _verdict_json(v) -> dict:
    lo, hi = v.margin
    return {
        "n": v.n,
        "holds": v.holds,
        "lhs": v.lhs,
        "degree": v.degree,
        "p_R": rational(v.failure_probability),
        "rhs_interval": [rational(v.rhs_lower), rational(v.rhs_upper)],
        "margin_interval": [rational(lo), rational(hi)],
    }


def cmd_lll_check(a) -> Any:
    out = _verdict_json(lll_condition_check(a.n))
    if not out["holds"]:
        raise CheckFailed(out)
    return out


def cmd_lll_sweep(a) -> Any:
    vs = lll_sweep(a.start, a.stop)
    return {"from": a.start, "to": a.stop, "minimal_n": minimal_lll_n(vs), "verdicts": [_verdict_json(v) for v in vs]}


def _mk_ball(n: int, radius: int):
    spec = parse_group(f"F{2 * n}")
    b = cayley_ball_graph(spec, radius=radius, include_loops=True)
    return b, marks_kechris_rule(n, b)


def _solve_one(args: tuple[int, int, int, int | None]) -> dict:
    n, radius, seed, budget = args
    b, r = _mk_ball(n, radius)
    if budget is None:
        budget = int(10 * E_UPPER * (1 + 16 * n * n) * b.n) + 1
    try:
        res = moser_tardos(b, r, seed, budget)
    except ResampleBudgetExceeded as exc:
        return {"seed": seed, "solved": False, "resamples": exc.resamples, "violations": exc.violations}
    return {"seed": seed, "solved": True, "resamples": res.resamples, "violations": len(satisfies(b, r, res.assignment))}


def _parallel_map(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def cmd_lll_solve(a) -> Any:
    seeds = [a.seed + k for k in range(a.count)]
    runs = _parallel_map(_solve_one, [(a.n, a.radius, s, a.budget) for s in seeds], a.jobs)
    out = {"n": a.n, "radius": a.radius, "runs": runs, "solved": sum(r["solved"] for r in runs)}
    if out["solved"] < len(runs):
        raise CheckFailed(out)
    return out


def cmd_lll_prob(a) -> Any:
    b, r = _mk_ball(a.n, a.radius)
    p = failure_probability(b, r, 0, a.method)
    return {"n": a.n, "method": a.method, "p_R": rational(p), "expected": rational(Fraction(1, 4**a.n))}


# flows


def _analyze_one(args: tuple[str, int, int, int]) -> dict:
    group, radius, n, seed = args
    inst, stats = random_instance(parse_group(group), radius, n, random.Random(seed))
    return _analyze(inst) | {"seed": seed, "rejected_draws": stats.rejected_draws, "restarts": stats.restarts}


def _analyze(inst: EquidecompositionInstance) -> dict:
    g = path_flow(inst)
    oracle_ok = g == brute_force_flow(inst)
    mult = inst.multiplicity()
    qual = qualifying_vertices(inst)
    ds = [discrepancy(inst, g, x) for x in qual]
    h = antimatching_map(inst, g)
    h2 = all(h.get(y) != x for x, y in h.items())
    out = {
        "valid_instance": inst.is_valid(),
        "oracle_agrees": oracle_ok,
        "qualifying": len(qual),
        "min_discrepancy": min(ds, default=None),
        "discrepancy_formula": all(d == inst.n + 1 - mult[x] for x, d in zip(qual, ds)),
        "h_domain": len(h),
        "h_squared_free": h2,
    }
    if inst.spec.rank == 3 and all(f.order == 2 for f in inst.spec.factors):
        out["partition"] = {k: len(v) for k, v in partition_by_generator(inst, h).items()}
    out["ok"] = bool(
        out["valid_instance"] and oracle_ok and h2 and out["discrepancy_formula"] and all(d >= 1 for d in ds)
    )
    return out


def cmd_flows_gen(a) -> Any:
    inst, stats = random_instance(parse_group(a.group), a.radius, a.n, random.Random(a.seed))
    return inst.to_json() | {"rejected_draws": stats.rejected_draws, "restarts": stats.restarts}


def cmd_flows_analyze(a) -> Any:
    if a.input:
        inst = EquidecompositionInstance.from_json(_read_json(a.input))
        out = _analyze(inst)
        if a.dump_flow:
            out["flow"] = flow_to_json(inst, path_flow(inst))
        if not out["ok"]:
            raise CheckFailed(out)
        return out
    seeds = [a.seed + k for k in range(a.count)]
    runs = _parallel_map(_analyze_one, [(a.group, a.radius, a.n, s) for s in seeds], a.jobs)
    out = {"runs": runs, "ok": all(r["ok"] for r in runs)}
    if not out["ok"]:
        raise CheckFailed(out)
    return out


# export


def _to_dot(data: dict) -> str:
    if "levels" in data:
        w = WitnessSequence.from_json(data)
        return to_dot(w.host, name="witness", edge_levels=w.edge_levels())
    g = _graph_from_json(data)
    if isinstance(g, FunctionalGraph):
        c = three_color_functional(g)
        return to_dot(g.graph, name="functional", colors=c.colors, partition=components(g.graph))
    return to_dot(
        g.graph,
        name="graph",
        partition=components(g.graph),
        frontier=g.frontier,
        labels=None if g.labels is None else [str(w) for w in g.labels],
    )


def cmd_export_dot(a) -> Any:
    return _to_dot(_read_json(a.input))


def cmd_export_json(a) -> Any:
    data = _read_json(a.input)
    if "levels" in data:
        return WitnessSequence.from_json(data).to_json()
    return _graph_from_json(data).to_json()


# parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--fanin", type=int, default=3)
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("--manifest", help="write a run manifest with a result digest to this path")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="hyperfin", description=__doc__.splitlines()[0])
    top = parser.add_subparsers(dest="group_cmd", required=True)

    def sub(parent, name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        p = parent.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=fn)
        return p

    g = top.add_parser("group", help="word arithmetic").add_subparsers(dest="cmd", required=True)
    p = sub(g, "ball", cmd_group_ball, "enumerate a ball")
    p.add_argument("--group", default="F2")
    p = sub(g, "mul", cmd_group_mul, "multiply words")
    p.add_argument("--group", default="F2")
    p.add_argument("words", nargs="+")

    d = top.add_parser("dyn", help="partial injections").add_subparsers(dest="cmd", required=True)
    for name, fn in (("act", cmd_dyn_act), ("w", cmd_dyn_w), ("orbit", cmd_dyn_orbit)):
        p = sub(d, name, fn, f"{name} on a partial injection")
        p.add_argument("--group", default="F2")
        p.add_argument("--pairs", help="comma-separated key=value words, e.g. 1=t,t=t^2")
        p.add_argument("--input", help="partial injection JSON file or - for stdin")
        if name == "act":
            p.add_argument("--element", required=True)
        if name == "w":
            p.add_argument("--times", type=int, default=1)

    gm = top.add_parser("game", help="the partial-injection game").add_subparsers(dest="cmd", required=True)
    p = sub(gm, "play", cmd_game_play, "play two strategies")
    p.add_argument("--group", default="C2^3")
    p.add_argument("--gamma", default="0", help="comma-separated factor indices of the Gamma block")
    p.add_argument("--target", choices=sorted(TARGETS), default="always")
    p.add_argument("--player-one", choices=sorted(STRATEGIES), default="greedy")
    p.add_argument("--player-two", choices=sorted(STRATEGIES), default="greedy")
    p.add_argument("--rounds", type=int, default=8)
    p = sub(gm, "replay", cmd_game_replay, "replay a transcript")
    p.add_argument("--input", default="-")
    p = sub(gm, "adjudicate", cmd_game_adjudicate, "judge a transcript's final state")
    p.add_argument("--input", default="-")

    gr = top.add_parser("graph", help="graph generators and operations").add_subparsers(dest="cmd", required=True)
    p = sub(gr, "gen", cmd_graph_gen, "generate a graph")
    p.add_argument("--kind", choices=["functional", "cayley", "degree2", "random"], default="functional")
    p.add_argument("--group", default="F2")
    for name, fn in (("color", cmd_graph_color), ("recurrent", cmd_graph_recurrent), ("contract", cmd_graph_contract)):
        p = sub(gr, name, fn, name)
        p.add_argument("--input", default="-")

    wt = top.add_parser("witness", help="hyperfiniteness witnesses").add_subparsers(dest="cmd", required=True)
    p = sub(wt, "build", cmd_witness_build, "build a witness")
    p.add_argument("--kind", choices=["functional", "degree2", "spanning", "extension"], default="functional")
    for name, fn in (("validate", cmd_witness_validate), ("stats", cmd_witness_stats)):
        p = sub(wt, name, fn, name)
        p.add_argument("--input", default="-")
        p.add_argument("--bound", choices=["linear", "exponential"], default="linear")

    ll = top.add_parser("lll", help="local lemma arithmetic and solver").add_subparsers(dest="cmd", required=True)
    sub(ll, "check", cmd_lll_check, "certified threshold check")
    p = sub(ll, "sweep", cmd_lll_sweep, "threshold sweep")
    p.add_argument("--from", dest="start", type=int, default=1)
    p.add_argument("--to", dest="stop", type=int, default=12)
    p = sub(ll, "solve", cmd_lll_solve, "Moser-Tardos on a ball")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--budget", type=int)
    p = sub(ll, "prob", cmd_lll_prob, "exact failure probability at the center")
    p.add_argument("--method", choices=["enumerate", "count"], default="count")

    fl = top.add_parser("flows", help="path flows and anti-matchings").add_subparsers(dest="cmd", required=True)
    for name, fn in (("gen", cmd_flows_gen), ("analyze", cmd_flows_analyze)):
        p = sub(fl, name, fn, name)
        p.add_argument("--group", default="C2^3")
        if name == "analyze":
            p.add_argument("--input")
            p.add_argument("--count", type=int, default=1)
            p.add_argument("--dump-flow", action="store_true")

    ex = top.add_parser("export", help="format conversion").add_subparsers(dest="cmd", required=True)
    for name, fn in (("dot", cmd_export_dot), ("json", cmd_export_json)):
        p = sub(ex, name, fn, name)
        p.add_argument("--input", default="-")
    return parser


def _read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"config line without '=': {raw.strip()!r}")
            out[key.strip().replace("-", "_")] = value.strip().strip('"')
    return out


def _parse(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    cfg = _read_config(args.config)
    given = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, value in cfg.items():
        if key in given or not hasattr(args, key):
            continue
        current = getattr(args, key)
        setattr(args, key, type(current)(value) if current is not None and not isinstance(current, bool) else value)
    return args


def _manifest(args: argparse.Namespace, output: str) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "manifest")}
    return {
        "subcommand": f"{args.group_cmd} {args.cmd}",
        "seed": args.seed,
        "parameters": params,
        "version": _version(),
        "backend": kernels.BACKEND,
        "digest": hashlib.sha256(output.encode()).hexdigest(),
    }


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _parse(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    status = EXIT_OK
    try:
        result = args.func(args)
    except CheckFailed as exc:
        result, status = exc.payload, EXIT_FAIL
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"hyperfin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "dot" and isinstance(result, dict) and ({"edges", "succ", "levels"} & result.keys()):
        result = _to_dot(result)
    text = result if isinstance(result, str) else _dumps(result) + "\n"
    sys.stdout.write(text)
    if args.manifest:
        with open(args.manifest, "w") as fh:
            fh.write(_dumps(_manifest(args, text)) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
