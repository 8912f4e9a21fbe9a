"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--n 20000] [--repeat 5] [--exhaustive 6]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from hyperfin.kernels import backends


def random_succ(n: int, rng: np.random.Generator) -> np.ndarray:
    # fixed-point-free functional graph
    succ = rng.integers(0, n - 1, size=n)
    succ[succ >= np.arange(n)] += 1
    return succ.astype(np.int64)


def bench(mod, succ: np.ndarray, repeat: int, exhaustive: int) -> dict:
    colors = mod.three_color(succ)
    mask = mod.recurrent_mask(succ, colors)
    cases = {
        "three_color": lambda: mod.three_color(succ),
        "recurrent_mask": lambda: mod.recurrent_mask(succ, colors),
        "check_recurrent": lambda: mod.check_recurrent(succ, mask),
        "contraction_classes": lambda: mod.contraction_classes(succ, mask),
    }
    out = {name: min(timeit.repeat(fn, number=1, repeat=repeat)) for name, fn in cases.items()}
    if exhaustive:
        out[f"exhaustive_recurrence({exhaustive})"] = min(
            timeit.repeat(lambda: mod.exhaustive_recurrence(exhaustive), number=1, repeat=1)
        )
    return out


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=20_000)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--exhaustive", type=int, default=5, help="0 skips the exhaustive sweep")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    succ = random_succ(args.n, np.random.default_rng(args.seed))
    mods = backends()
    results = {name: bench(mod, succ, args.repeat, args.exhaustive) for name, mod in mods.items()}
    names = list(results["python"])
    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':<28}" + "".join(f"{b:>12}" for b in results) + ("     speedup" if "cython" in results else ""))
    for k in names:
        row = f"{k:<28}" + "".join(f"{results[b][k] * 1e3:>10.2f}ms" for b in results)
        if "cython" in results:
            row += f"{results['python'][k] / max(results['cython'][k], 1e-9):>11.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
