"""Compiled vs pure-Python modular elimination on Yang-Mills ideal slices.

    python3 benchmarks/bench_kernels.py --degrees 5 6 7 --repeat 3

The rows at degree n are u (x) r (x) v for every relator r and every pair of
words with |u| + |v| = n - 3; the column count is 4^n.
"""
import argparse
import random
import statistics
import time

from koszulkit import kernels
from koszulkit._accel import use_numba
from koszulkit.exactlin import random_prime
from koszulkit.presets import yang_mills


def slice_rows(n, p):
    ym = yang_mills()
    g, N = ym.generator_count, ym.degree
    rels = [{k: int(v.numerator * pow(v.denominator, -1, p)) % p for k, v in r.items()}
            for r in ym.relators.space.vectors]
    rows = []
    for i in range(n - N + 1):
        right_len = n - N - i
        for left in range(g**i):
            for right in range(g**right_len):
                for r in rels:
                    rows.append({(left * g**N + c) * g**right_len + right: v for c, v in r.items()})
    return rows


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), statistics.median(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degrees", type=int, nargs="+", default=[5, 6, 7])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    p = random_prime(random.Random(args.seed))
    backends = ["python"] + (["numba"] if use_numba() else [])
    if "numba" in backends:
        # compile outside the timed region
        kernels.rank([{0: 1}], 1, p, backend="numba")
    print(f"prime {p}; backends {', '.join(backends)}")
    print(f"{'n':>2} {'rows':>7} {'cols':>7} {'rank':>7} " + " ".join(f"{b + ' s':>10}" for b in backends)
          + ("   speedup" if len(backends) == 2 else ""))
    for n in args.degrees:
        rows = slice_rows(n, p)
        results = {}
        for b in backends:
            best, _, r = best_of(lambda: kernels.rank(rows, 4**n, p, backend=b), args.repeat)
            results[b] = (best, r)
        ranks = {r for _, r in results.values()}
        if len(ranks) != 1:
            raise SystemExit(f"backends disagree at degree {n}: {results}")
        line = f"{n:>2} {len(rows):>7} {4**n:>7} {ranks.pop():>7} " + " ".join(
            f"{results[b][0]:>10.3f}" for b in backends)
        if len(backends) == 2:
            line += f"   {results['python'][0] / results['numba'][0]:>7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
