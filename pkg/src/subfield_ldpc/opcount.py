"""Per-iteration operation counts: closed forms, graph-based predictions and measurements.

Cost model (one iteration, flooding schedule, forward/backward check update
with 3d-4 combining steps for a degree-d check, Q = subfield order):

===========  ==========================  ==========================
             check node (degree d)       variable node (degree w)
===========  ==========================  ==========================
LLR-QSPA     comp (3d-4)Q(Q-1)           add 2wQ; comp Q-1 (decision)
             add  (3d-4)Q(3Q-2)
             lut  (3d-4)Q(Q-1)
min-max      comp (3d-4)Q(2Q-1)          add 3wQ; comp wQ + Q (decision)
FFT-QSPA     add 2dQ log2 Q, lut 2dQ,    as LLR-QSPA
             mult (3d-4)Q
===========  ==========================  ==========================

Multiplications by psi on local-check messages add Q mults per local edge.
Decisions are taken on every original variable, or on the r/m information
nodes of each expanded variable.  Normalisation/clipping work is tracked
separately (``aux``) and excluded from these totals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codes import LOCAL, ParityCheckMatrix
from .decoders import ALGORITHMS, DecodeConfig, Decoder, OpCounters
from .expansion import ExpandedGraph, expand

OPS = ("comp", "add", "mult", "lut")


def check_node_ops(algorithm: str, d: int, Q: int) -> dict[str, int]:
    """Operations of one degree-d check update."""
    if d < 2:
        return dict.fromkeys(OPS, 0)
    s = 3 * d - 4
    if algorithm == "llr-qspa":
        return {"comp": s * Q * (Q - 1), "add": s * Q * (3 * Q - 2), "mult": 0, "lut": s * Q * (Q - 1)}
    if algorithm == "min-max":
        return {"comp": s * Q * (2 * Q - 1), "add": 0, "mult": 0, "lut": 0}
    if algorithm == "fft-qspa":
        logq = int(round(math.log2(Q)))
        return {"comp": 0, "add": 2 * d * Q * logq, "mult": s * Q, "lut": 2 * d * Q}
    raise ValueError(f"unknown algorithm {algorithm!r}")


def variable_node_ops(algorithm: str, w: int, Q: int, decides: bool = True, n_local: int = 0,
                      psi: float = 1.0) -> dict[str, int]:
    """Operations of one variable update of degree w (n_local of its edges from local checks)."""
    mult = n_local * Q if psi != 1.0 else 0
    if algorithm == "min-max":
        return {"comp": w * Q + (Q if decides else 0), "add": 3 * w * Q, "mult": mult, "lut": 0}
    if algorithm in ("llr-qspa", "fft-qspa"):
        return {"comp": (Q - 1) if decides else 0, "add": 2 * w * Q, "mult": mult, "lut": 0}
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _acc(total: dict, part: dict, k: int = 1) -> None:
    for op in OPS:
        total[op] += k * part[op]


def predict_iteration_ops(graph, algorithm: str, psi: float = 1.0) -> dict[str, dict[str, int]]:
    """Closed-form per-iteration counts by node class, from the graph's measured degrees."""
    if isinstance(graph, ExpandedGraph):
        pcm = graph.pcm
        decide = np.zeros(pcm.n_cols, dtype=bool)
        decide[graph.info_nodes.reshape(-1)] = True
    else:
        pcm = graph
        decide = np.ones(pcm.n_cols, dtype=bool)
    Q = pcm.field.q
    out = {c: dict.fromkeys(OPS, 0) for c in ("check", "variable", "local")}
    degs = pcm.row_degrees
    for d in np.unique(degs):
        for kind, name in ((0, "check"), (LOCAL, "local")):
            k = int(np.count_nonzero((degs == d) & (pcm.check_type == kind)))
            if k:
                _acc(out[name], check_node_ops(algorithm, int(d), Q), k)
    col_deg = pcm.col_degrees
    is_local_edge = pcm.check_type[pcm.row_of_edge] == LOCAL
    n_local = np.bincount(pcm.col_idx[is_local_edge], minlength=pcm.n_cols)
    for v in range(pcm.n_cols):
        _acc(out["variable"], variable_node_ops(algorithm, int(col_deg[v]), Q, bool(decide[v]), int(n_local[v]), psi))
    return out


def measure_iteration_ops(graph, algorithm: str, psi: float = 1.0, delta: float = 1.0, iterations: int = 1,
                          seed: int = 0, backend: str | None = None) -> OpCounters:
    """Counters after ``iterations`` full iterations on random channel input, divided per iteration."""
    dec = Decoder(graph, DecodeConfig(algorithm=algorithm, psi=psi, delta=delta, max_iter=iterations,
                                      early_stop=False), backend)
    field = dec.original.field
    rng = np.random.default_rng(seed)
    p = rng.random((dec.original.n_cols, field.q)) + 1e-3
    p /= p.sum(axis=1, keepdims=True)
    res = dec.decode(p)
    if res.counters.table.sum() and iterations > 1:
        assert not np.any(res.counters.table % iterations)
    return OpCounters(res.counters.table // iterations)


def totals(by_class: dict[str, dict[str, int]]) -> dict[str, int]:
    return {op: sum(by_class[c][op] for c in ("check", "variable", "local")) for op in OPS}


def code_closed_form(N: int, M: int, dv: float, dc: int, r: int, m: int | None, algorithm: str, p: int = 2,
                     psi: float = 0.5, d_local: int = 3) -> dict[str, float]:
    """Per-iteration totals from code parameters alone (regular column/row weights).

    ``m=None`` gives the original graph over F_{p^r}; otherwise the expansion to
    F_{p^m} with E_f quotient nodes per symbol, L_f weight-``d_local`` local
    checks per symbol and r/m decision nodes per symbol.
    """
    if m is None:
        Q = p**r
        tot = dict.fromkeys(OPS, 0.0)
        _acc(tot, check_node_ops(algorithm, dc, Q), M)
        _acc(tot, variable_node_ops(algorithm, int(dv), Q, True), N)
        return tot
    Q = p**m
    e_f = (p**r - 1) // (p**m - 1)
    l_f = e_f - r // m
    tot = dict.fromkeys(OPS, 0.0)
    _acc(tot, check_node_ops(algorithm, dc, Q), M * e_f)
    _acc(tot, check_node_ops(algorithm, d_local, Q), N * l_f)
    edges = N * e_f * dv + N * l_f * d_local
    v = variable_node_ops(algorithm, 1, Q, False, 1, psi)  # per edge
    for op in OPS:
        tot[op] += edges * (v[op] if op != "mult" else 0)
    tot["mult"] += N * l_f * d_local * (Q if psi != 1.0 else 0)
    dec = variable_node_ops(algorithm, 0, Q, True)
    tot["comp"] += N * (r // m) * dec["comp"]
    return tot


@dataclass
class OpRow:
    setup: str
    counts: dict[str, float]
    percent: dict[str, float]


def op_count_report(setups: list[tuple[str, dict[str, float]]], reference: str | None = None) -> list[OpRow]:
    """Attach percentages relative to ``reference`` (default: the first setup of each algorithm)."""
    rows = []
    base_by_alg: dict[str, dict[str, float]] = {}
    for name, counts in setups:
        alg = name.split("/")[0]
        base = dict(setups)[reference] if reference else base_by_alg.setdefault(alg, counts)
        pct = {op: (100.0 * counts[op] / base[op]) if base[op] else float("nan") for op in OPS}
        rows.append(OpRow(name, dict(counts), pct))
    return rows


def format_report(rows: list[OpRow]) -> str:
    """Fixed-width table: counts in units of 1e5 with percentages of the reference setup."""
    head = f"{'setup':<22}" + "".join(f"{op + ' (1e5)':>16}{'%':>8}" for op in OPS)
    lines = [head, "-" * len(head)]
    for r in rows:
        cells = ""
        for op in OPS:
            v = r.counts[op] / 1e5
            pct = r.percent[op]
            cells += f"{v:>16.2f}" + (f"{pct:>7.1f}%" if np.isfinite(pct) else f"{'-':>8}")
        lines.append(f"{r.setup:<22}{cells}")
    return "\n".join(lines)


def table_for_graph(pcm: ParityCheckMatrix, algorithms=("llr-qspa", "min-max"), subfields=(None,),
                    psi: float = 0.5, measured: bool = False, ordering: str = "cyclic",
                    backend: str | None = None) -> list[OpRow]:
    """Report for a built graph: original plus each requested expansion, per algorithm."""
    entries = []
    graphs = {None: pcm}
    for m in subfields:
        if m is not None and m not in graphs:
            graphs[m] = expand(pcm, m, ordering)
    for alg in algorithms:
        if alg not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {alg!r}")
        for m in (None,) + tuple(s for s in subfields if s is not None):
            g = graphs[m]
            w = 1.0 if m is None else psi
            if measured:
                counts = measure_iteration_ops(g, alg, psi=w, backend=backend).totals()
            else:
                counts = totals(predict_iteration_ops(g, alg, w))
            label = f"{alg}/{'original' if m is None else f'F{pcm.field.p}^{m}'}"
            entries.append((label, {k: float(v) for k, v in counts.items()}))
    return op_count_report(entries)
