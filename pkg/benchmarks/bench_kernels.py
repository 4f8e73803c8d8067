"""Compare the compiled and numpy decoder kernels.

Times the check pass and a full decoder iteration for each algorithm on the
original GF(16)/GF(64) graph and its expansions, for both backends, and checks
that both backends produce the same messages and counters.

    python3 benchmarks/bench_kernels.py [--n 200] [--repeat 5] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from subfield_ldpc import kernels
from subfield_ldpc.codes import random_regular_binary, random_relabel
from subfield_ldpc.decoders import ALGORITHMS, DecodeConfig, Decoder
from subfield_ldpc.expansion import expand
from subfield_ldpc.gf import build_field


def _graphs(n: int, seed: int):
    out = []
    for r, dv, dc, subs in ((4, 3, 6, (2, 1)), (6, 3, 6, (3, 2))):
        pcm = random_relabel(random_regular_binary(n, dv, dc, seed=seed), build_field(2, r), seed + 1)
        out.append((f"GF(2^{r})", pcm))
        for m in subs:
            out.append((f"GF(2^{r})->GF(2^{m})", expand(pcm, m)))
    return out


def _best(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def bench(n: int = 200, repeat: int = 5, iters: int = 5, seed: int = 0, algorithms=ALGORITHMS) -> list[dict]:
    backends = kernels.available()
    rows = []
    for label, graph in _graphs(n, seed):
        for alg in algorithms:
            cfg = DecodeConfig(algorithm=alg, max_iter=iters, early_stop=False, delta=0.75, psi=0.5)
            decs = {b: Decoder(graph, cfg, b) for b in backends}
            any_dec = next(iter(decs.values()))
            rng = np.random.default_rng(seed)
            p = rng.dirichlet(np.ones(any_dec.original.field.q) * 0.3, size=any_dec.original.n_cols)
            row = {"graph": label, "algorithm": alg, "edges": int(any_dec.cg.n_edges)}
            results = {}
            for b, dec in decs.items():
                st = dec.start(p)
                table = np.zeros((4, 4), dtype=np.int64)
                lut = cfg.maxstar == "lut"
                row[f"check_ms[{b}]"] = 1e3 * _best(
                    lambda: dec.kern.check_pass(cfg.kind, dec.cg, st.v2c, st.c2v, table, lut), repeat)
                row[f"decode_ms_per_iter[{b}]"] = 1e3 * _best(lambda: dec.decode(p), repeat) / iters
                results[b] = dec.decode(p)
            if len(results) == 2:
                a, c = results.values()
                row["same_decisions"] = bool(np.array_equal(a.decoded, c.decoded))
                row["same_counters"] = bool(np.array_equal(a.counters.table, c.counters.table))
                row["speedup"] = row["decode_ms_per_iter[python]"] / row["decode_ms_per_iter[cython]"]
            rows.append(row)
    return rows


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200, help="code length")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--iters", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="also write results to this file")
    args = ap.parse_args(argv)
    print(f"backends: {kernels.available()} (default {kernels.default_backend()})")
    rows = bench(args.n, args.repeat, args.iters, args.seed)
    head = f"{'graph':<18}{'algorithm':<10}{'edges':>7}{'numpy ms/it':>13}{'cython ms/it':>14}{'speedup':>9}  agree"
    print(head)
    print("-" * len(head))
    for r in rows:
        py = r.get("decode_ms_per_iter[python]", float("nan"))
        cy = r.get("decode_ms_per_iter[cython]", float("nan"))
        agree = "yes" if r.get("same_decisions", True) and r.get("same_counters", True) else "NO"
        print(f"{r['graph']:<18}{r['algorithm']:<10}{r['edges']:>7}{py:>13.3f}{cy:>14.3f}"
              f"{r.get('speedup', float('nan')):>8.1f}x  {agree}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
