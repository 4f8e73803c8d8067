"""Iterative message-passing decoders for original and expanded Tanner graphs.

Three check-node rules are available: LLR-domain QSPA (max* convolution),
FFT-QSPA (Walsh-Hadamard transform, characteristic 2) and min-max.  On an
expanded graph the channel information enters as coset probability vectors
(parity-role nodes damped by ``delta``), messages from local checks are scaled
by ``psi`` at the variable nodes, and convergence is tested on the original
code after recovering each symbol from its information-set coordinates.

All messages are indexed by subfield element index.  LLR messages use the
convention ``values[x] = log p(x) - log p(0)``; min-max metrics are negated
LLRs shifted so the minimum is 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from . import kernels
from ._pykernels import AUX, CHECK, FFT, LLR, LOCAL, MINMAX, VARIABLE, _fb, conv_llr, conv_minmax, wht
from .codes import LOCAL as LOCAL_ROW
from .codes import ParityCheckMatrix, syndrome
from .expansion import ExpandedGraph
from .gf import FieldTable
from .lattice import CosetLattice, LocalCode, recover_symbol

ALGORITHMS = ("llr-qspa", "fft-qspa", "min-max")
_KIND = {"llr-qspa": LLR, "fft-qspa": FFT, "min-max": MINMAX}
NODE_CLASSES = ("check", "variable", "local", "aux")
OP_TYPES = ("comp", "add", "mult", "lut")
DOMAINS = ("llr", "metric", "prob")


# -- configuration and results -------------------------------------------------


@dataclass(frozen=True)
class DecodeConfig:
    algorithm: str = "llr-qspa"
    max_iter: int = 50
    delta: float = 1.0
    psi: float = 1.0
    clip: float = 50.0
    early_stop: bool = True
    maxstar: str = "exact"  # or "lut"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")
        if not 0.0 < self.psi <= 1.0:
            raise ValueError(f"psi must lie in (0, 1], got {self.psi}")
        if not self.clip > 0:
            raise ValueError("clip must be positive")
        if self.maxstar not in ("exact", "lut"):
            raise ValueError("maxstar must be 'exact' or 'lut'")

    @property
    def kind(self) -> int:
        return _KIND[self.algorithm]


def recommended_scaling(algorithm: str, m: int | None = None, code_class: str = "C1") -> tuple[float, float]:
    """Default (delta, psi) for long high-rate codes; (1, 1) disables both scalings.

    ``code_class`` "C1" is the GF(64), column-weight-4 class and "C2" the GF(16)
    class; ``m`` is the subfield degree (None for the original graph).  Short
    codes usually prefer other values; see :func:`subfield_ldpc.sim.sweep_scaling`.
    """
    if m is None:
        return 1.0, 1.0
    if code_class == "C2":
        # min-max on the binary expansion is min-sum, tuned like sum-product there
        return (0.0, 0.3) if algorithm == "min-max" and m > 1 else (0.5, 0.25)
    if algorithm == "min-max":
        return (0.0, 0.3) if m >= 3 else (0.0, 0.4)
    return 0.75, 0.25


@dataclass
class OpCounters:
    """Operation counts, rows = node class (check, variable, local, aux), cols = op type."""

    table: np.ndarray = dc_field(default_factory=lambda: np.zeros((4, 4), dtype=np.int64))

    def _total(self, col: int, include_aux: bool = False) -> int:
        rows = 4 if include_aux else 3
        return int(self.table[:rows, col].sum())

    @property
    def comp(self) -> int:
        return self._total(0)

    @property
    def add(self) -> int:
        return self._total(1)

    @property
    def mult(self) -> int:
        return self._total(2)

    @property
    def lut(self) -> int:
        return self._total(3)

    def of(self, node_class: str, op: str) -> int:
        return int(self.table[NODE_CLASSES.index(node_class), OP_TYPES.index(op)])

    def totals(self) -> dict[str, int]:
        return {op: self._total(i) for i, op in enumerate(OP_TYPES)}

    def as_dict(self) -> dict[str, dict[str, int]]:
        return {c: {op: int(self.table[i, j]) for j, op in enumerate(OP_TYPES)} for i, c in enumerate(NODE_CLASSES)}

    def copy(self) -> "OpCounters":
        return OpCounters(self.table.copy())

    def __add__(self, other: "OpCounters") -> "OpCounters":
        return OpCounters(self.table + other.table)

    def __sub__(self, other: "OpCounters") -> "OpCounters":
        return OpCounters(self.table - other.table)


@dataclass
class DecodeResult:
    decoded: np.ndarray
    converged: bool
    iterations: int
    counters: OpCounters

    def to_json(self) -> dict:
        return {
            "decoded": [int(x) for x in self.decoded],
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "counters": self.counters.as_dict(),
        }


@dataclass(frozen=True)
class Message:
    """A stack of messages (..., Q) tagged with its domain."""

    values: np.ndarray
    domain: str = "llr"

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ValueError(f"unknown message domain {self.domain!r}")


# -- subfield tables -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FieldTabs:
    Q: int
    p: int
    sub_tab: np.ndarray  # [z, x] -> z - x
    perm_in: np.ndarray  # [h, y] -> h^-1 y (row 0 unused)
    perm_out: np.ndarray  # [h, x] -> -(h x)
    vec_to_idx: np.ndarray
    idx_to_vec: np.ndarray


@lru_cache(maxsize=None)
def _tabs_cached(p: int, r: int, poly: tuple[int, ...]) -> FieldTabs:
    from .gf import build_field

    return _make_tabs(build_field(p, r, poly))


def field_tabs(S: FieldTable) -> FieldTabs:
    return _tabs_cached(S.p, S.r, tuple(int(c) for c in S.prim_poly))


def _make_tabs(S: FieldTable) -> FieldTabs:
    Q = S.q
    a = np.arange(Q)
    sub_tab = S.sub(a[:, None], a[None, :]).astype(np.int64)
    perm_in = np.zeros((Q, Q), dtype=np.int64)
    perm_in[1:] = S.div(a[None, :], a[1:, None])
    perm_out = S.neg(S.mul(a[:, None], a[None, :])).astype(np.int64)
    return FieldTabs(
        Q=Q,
        p=S.p,
        sub_tab=np.ascontiguousarray(sub_tab),
        perm_in=np.ascontiguousarray(perm_in),
        perm_out=np.ascontiguousarray(perm_out),
        vec_to_idx=np.ascontiguousarray(S.vec_to_idx, dtype=np.int64),
        idx_to_vec=np.ascontiguousarray(S.idx_to_vec, dtype=np.int64),
    )


# -- compiled graph ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CompiledGraph:
    """Flat arrays consumed by the message-passing kernels."""

    Q: int
    n_vars: int
    n_checks: int
    n_edges: int
    chk_ptr: np.ndarray
    chk_class: np.ndarray  # CHECK or LOCAL counter row
    edge_var: np.ndarray
    edge_label: np.ndarray
    edge_w: np.ndarray
    var_ptr: np.ndarray
    var_edges: np.ndarray
    n_weighted_edges: int
    sub_tab: np.ndarray
    perm_in: np.ndarray
    perm_out: np.ndarray
    vec_to_idx: np.ndarray
    idx_to_vec: np.ndarray
    groups: list  # (degree, edges (n, d), n_regular, n_local) for the numpy backend


def compile_graph(pcm: ParityCheckMatrix, psi: float = 1.0) -> CompiledGraph:
    S = pcm.field
    tabs = field_tabs(S)
    E = pcm.n_edges
    row_of_edge = pcm.row_of_edge
    is_local = pcm.check_type == LOCAL_ROW
    edge_w = np.where(is_local[row_of_edge], float(psi), 1.0) if E else np.zeros(0)
    n_weighted = int(np.count_nonzero(edge_w != 1.0))
    order = np.argsort(pcm.col_idx, kind="stable")
    var_ptr = np.zeros(pcm.n_cols + 1, dtype=np.int64)
    np.cumsum(np.bincount(pcm.col_idx, minlength=pcm.n_cols), out=var_ptr[1:])
    deg = np.diff(pcm.row_ptr)
    groups = []
    for d in np.unique(deg):
        rows = np.flatnonzero(deg == d)
        if d == 0:
            continue
        edges = pcm.row_ptr[rows][:, None] + np.arange(d)[None, :]
        n_loc = int(np.count_nonzero(is_local[rows]))
        groups.append((int(d), edges, len(rows) - n_loc, n_loc))
    return CompiledGraph(
        Q=S.q,
        n_vars=pcm.n_cols,
        n_checks=pcm.n_rows,
        n_edges=E,
        chk_ptr=np.ascontiguousarray(pcm.row_ptr, dtype=np.int64),
        chk_class=np.where(is_local, LOCAL, CHECK).astype(np.int64),
        edge_var=np.ascontiguousarray(pcm.col_idx, dtype=np.int64),
        edge_label=np.ascontiguousarray(pcm.weights, dtype=np.int64),
        edge_w=np.ascontiguousarray(edge_w, dtype=np.float64),
        var_ptr=var_ptr,
        var_edges=np.ascontiguousarray(order, dtype=np.int64),
        n_weighted_edges=n_weighted,
        sub_tab=tabs.sub_tab,
        perm_in=tabs.perm_in,
        perm_out=tabs.perm_out,
        vec_to_idx=tabs.vec_to_idx,
        idx_to_vec=tabs.idx_to_vec,
        groups=groups,
    )


# -- channel initialisation ---------------------------------------------------------


def _check_probs(symbol_probs: np.ndarray, q: int) -> np.ndarray:
    p = np.asarray(symbol_probs, dtype=np.float64)
    if p.ndim != 2 or p.shape[1] != q:
        raise ValueError(f"symbol probabilities must have shape (N, {q}), got {p.shape}")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError("symbol probabilities must be finite and nonnegative")
    dev = np.abs(p.sum(axis=1) - 1.0).max(initial=0.0)
    if dev > 1e-6:
        raise ValueError(f"symbol probabilities are not normalized (max deviation {dev:.3g})")
    return p


def probs_to_llr(p: np.ndarray, clip: float = 50.0) -> np.ndarray:
    """log p(x) - log p(0), clipped to [-clip, clip]; zero probabilities stay finite."""
    lp = np.log(np.maximum(p, 1e-300))
    L = lp - lp[..., :1]
    return np.clip(L, -clip, clip)


def llr_to_metric(L: np.ndarray) -> np.ndarray:
    M = -L
    return M - M.min(axis=-1, keepdims=True)


def coset_probs(symbol_probs, lattice: CosetLattice) -> np.ndarray:
    """(N, E_f, Q): probability that each symbol lies in each coset of each quotient group."""
    p = _check_probs(symbol_probs, lattice.field.q)
    Q = lattice.subfield.q
    ind = np.zeros((lattice.field.q, lattice.E_f, Q))
    g = np.arange(lattice.field.q)[:, None]
    ind[g, np.arange(lattice.E_f)[None, :], lattice.labels] = 1.0
    return np.einsum("nq,qiQ->niQ", p, ind)


def init_cpvs(symbol_probs, lattice: CosetLattice, local: LocalCode, delta: float, clip: float = 50.0) -> np.ndarray:
    """Channel LLRs for every expanded variable (N * E_f, Q); parity-role rows scaled by delta."""
    pc = coset_probs(symbol_probs, lattice)
    L = probs_to_llr(pc, clip)
    scale = np.full(lattice.E_f, float(delta))
    scale[list(local.info_set)] = 1.0
    L = L * scale[None, :, None]
    return L.reshape(-1, lattice.subfield.q)


# -- single-node reference operations ------------------------------------------------


def _unwrap(msgs, domain: str) -> np.ndarray:
    if isinstance(msgs, Message):
        if msgs.domain != domain:
            raise ValueError(f"expected {domain} messages, got {msgs.domain}")
        return np.asarray(msgs.values, dtype=np.float64)
    return np.asarray(msgs, dtype=np.float64)


def _node_row(node_class: str) -> int:
    return {"check": CHECK, "local": LOCAL}[node_class]


def _permute_in(U: np.ndarray, labels: np.ndarray, tabs: FieldTabs) -> np.ndarray:
    return np.take_along_axis(U, tabs.perm_in[labels], axis=-1)


def _permute_out(U: np.ndarray, labels: np.ndarray, tabs: FieldTabs) -> np.ndarray:
    return np.take_along_axis(U, tabs.perm_out[labels], axis=-1)


def _single_check(kind, incoming, labels, field: FieldTable, counters, node_class, lut):
    tabs = field_tabs(field)
    domain = "prob" if kind == FFT else ("metric" if kind == MINMAX else "llr")
    U = _unwrap(incoming, domain)
    labels = np.asarray(labels, dtype=np.int64)
    d, Q = U.shape
    if Q != field.q or len(labels) != d:
        raise ValueError("message/label shape mismatch")
    if np.any(labels == 0):
        raise ValueError("check labels must be nonzero")
    if kind == FFT and field.p != 2:
        raise ValueError("FFT-QSPA requires characteristic 2")
    row = _node_row(node_class)
    table = counters.table if counters is not None else np.zeros((4, 4), dtype=np.int64)
    if d == 1:
        out = np.full((1, Q), 1.0 / Q) if kind == FFT else np.zeros((1, Q))
    else:
        P = _permute_in(U, labels, tabs)[None]
        steps = 3 * d - 4
        if kind == LLR:
            out = _fb(P, lambda a, b: conv_llr(a, b, tabs.sub_tab, lut))[0]
            out = out - out[:, :1]
            table[row] += (steps * Q * (Q - 1), steps * Q * (3 * Q - 2), 0, steps * Q * (Q - 1))
            table[AUX, 1] += d * Q
        elif kind == MINMAX:
            out = _fb(P, lambda a, b: conv_minmax(a, b, tabs.sub_tab))[0]
            table[row, 0] += steps * Q * (2 * Q - 1)
        else:
            logq = Q.bit_length() - 1
            T = wht(P[..., tabs.vec_to_idx])
            R = wht(_fb(T, np.multiply))[0]
            R = np.maximum(R, 0.0)
            out = (R / R.sum(axis=-1, keepdims=True))[:, tabs.idx_to_vec]
            table[row] += (0, 2 * d * Q * logq, steps * Q, 0)
        out = _permute_out(out, labels, tabs)
    if isinstance(incoming, Message):
        return Message(out, domain)
    return out


def check_update_llr_qspa(incoming, labels, field: FieldTable, counters: OpCounters | None = None,
                          node_class: str = "check", maxstar: str = "exact"):
    """Extrinsic LLR outputs of one check via forward/backward max* convolutions."""
    return _single_check(LLR, incoming, labels, field, counters, node_class, maxstar == "lut")


def check_update_minmax(incoming, labels, field: FieldTable, counters: OpCounters | None = None,
                        node_class: str = "check"):
    """Extrinsic min-max outputs; inputs are metrics with per-edge minimum 0."""
    return _single_check(MINMAX, incoming, labels, field, counters, node_class, False)


def check_update_fft(incoming, labels, field: FieldTable, counters: OpCounters | None = None,
                     node_class: str = "check"):
    """Extrinsic probability outputs through the Walsh-Hadamard domain."""
    return _single_check(FFT, incoming, labels, field, counters, node_class, False)


def variable_update(initial, regular_msgs, local_msgs, psi: float, counters: OpCounters | None = None,
                    algorithm: str = "llr-qspa", clip: float = 50.0):
    """Combined belief and extrinsic outputs of one variable node.

    Returns ``(combined, regular_out, local_out)``; ``combined`` is
    ``initial + sum(regular) + psi * sum(local)``.
    """
    kind = _KIND[algorithm]
    domain = "metric" if kind == MINMAX else "llr"
    L = _unwrap(initial, domain)
    Q = L.shape[-1]
    reg = _unwrap(regular_msgs, domain).reshape(-1, Q)
    loc = _unwrap(local_msgs, domain).reshape(-1, Q)
    scaled = np.concatenate([reg, psi * loc]) if len(loc) else reg.copy()
    R = L + scaled.sum(axis=0)
    ext = R[None, :] - scaled
    deg = len(scaled)
    table = counters.table if counters is not None else np.zeros((4, 4), dtype=np.int64)
    table[VARIABLE, 1] += 2 * deg * Q
    if len(loc) and psi != 1.0:
        table[VARIABLE, 2] += len(loc) * Q
    if kind == MINMAX:
        ext = np.minimum(ext - ext.min(axis=-1, keepdims=True), clip)
        table[VARIABLE, 0] += deg * Q
        table[VARIABLE, 1] += deg * Q
        table[AUX, 0] += deg * Q
    else:
        ext = np.clip(ext - ext[:, :1], -clip, clip)
        table[AUX, 1] += deg * Q
        table[AUX, 0] += 2 * deg * Q
    return R, ext[: len(reg)], ext[len(reg):]


# -- full decoder ------------------------------------------------------------------


@dataclass
class DecoderState:
    L: np.ndarray
    v2c: np.ndarray
    c2v: np.ndarray
    post: np.ndarray
    counters: OpCounters
    iteration: int = 0
    decoded: np.ndarray | None = None
    converged: bool = False


class Decoder:
    """Decoder bound to one graph and configuration; reusable across frames.

    ``graph`` is either an original :class:`ParityCheckMatrix` or an
    :class:`ExpandedGraph`.  Instances hold only immutable tables, so one
    decoder may serve many frames (each frame gets its own state).
    """

    def __init__(self, graph, config: DecodeConfig | None = None, backend: str | None = None):
        self.config = config or DecodeConfig()
        self.kern = kernels.get_backend(backend)
        if isinstance(graph, ExpandedGraph):
            self.expanded: ExpandedGraph | None = graph
            self.original = graph.original
            pcm = graph.pcm
            self.decision_nodes = np.ascontiguousarray(graph.info_nodes.reshape(-1))
        elif isinstance(graph, ParityCheckMatrix):
            self.expanded = None
            self.original = graph
            pcm = graph
            self.decision_nodes = np.arange(graph.n_cols, dtype=np.int64)
        else:
            raise TypeError(f"cannot decode on {type(graph).__name__}")
        if self.config.kind == FFT and pcm.field.p != 2:
            raise ValueError("FFT-QSPA requires a characteristic-2 field")
        self.graph = graph
        self.field = pcm.field
        self.cg = compile_graph(pcm, self.config.psi)

    @property
    def backend(self) -> str:
        return self.kern.BACKEND

    def channel_messages(self, symbol_probs) -> np.ndarray:
        """Initial per-variable messages in the algorithm's domain."""
        cfg = self.config
        if self.expanded is not None:
            g = self.expanded
            L = init_cpvs(symbol_probs, g.lattice, g.local, cfg.delta, cfg.clip)
        else:
            L = probs_to_llr(_check_probs(symbol_probs, self.field.q), cfg.clip)
        if cfg.kind == MINMAX:
            L = llr_to_metric(L)
        return np.ascontiguousarray(L)

    def start(self, symbol_probs) -> DecoderState:
        L = self.channel_messages(symbol_probs)
        E, Q = self.cg.n_edges, self.cg.Q
        v2c = np.ascontiguousarray(L[self.cg.edge_var]) if E else np.zeros((0, Q))
        return DecoderState(L=L, v2c=v2c, c2v=np.zeros((E, Q)), post=L.copy(), counters=OpCounters())

    def hard_decision(self, post: np.ndarray, counters: OpCounters | None = None) -> np.ndarray:
        table = counters.table if counters is not None else np.zeros((4, 4), dtype=np.int64)
        vals = self.kern.decide(self.config.kind, post, self.decision_nodes, table)
        if self.expanded is None:
            return np.asarray(vals, dtype=np.int64)
        n = len(self.expanded.local.info_set)
        return np.asarray(recover_symbol(self.expanded.local, vals.reshape(-1, n)), dtype=np.int64)

    def convergence_test(self, post: np.ndarray, counters: OpCounters | None = None) -> tuple[bool, np.ndarray]:
        decoded = self.hard_decision(post, counters)
        return (not np.any(syndrome(self.original, decoded))), decoded

    def step(self, st: DecoderState) -> DecoderState:
        cfg, cg, k = self.config, self.cg, self.kern
        table = st.counters.table
        k.check_pass(cfg.kind, cg, st.v2c, st.c2v, table, cfg.maxstar == "lut")
        k.var_pass(cfg.kind, cg, st.L, st.c2v, st.v2c, st.post, table, cfg.clip)
        st.iteration += 1
        st.converged, st.decoded = self.convergence_test(st.post, st.counters)
        return st

    def decode(self, symbol_probs) -> DecodeResult:
        st = self.start(symbol_probs)
        for _ in range(self.config.max_iter):
            self.step(st)
            if st.converged and self.config.early_stop:
                break
        return DecodeResult(decoded=st.decoded, converged=st.converged, iterations=st.iteration, counters=st.counters)


def convergence_test(graph, combined: np.ndarray, algorithm: str = "llr-qspa",
                     counters: OpCounters | None = None) -> tuple[bool, np.ndarray]:
    """Hard-decide (info-role) nodes, recover symbols and test the original syndrome."""
    dec = Decoder(graph, DecodeConfig(algorithm=algorithm), backend="python")
    return dec.convergence_test(np.asarray(combined, dtype=np.float64), counters)


def decode(graph, symbol_probs, config: DecodeConfig | None = None, backend: str | None = None) -> DecodeResult:
    return Decoder(graph, config, backend).decode(symbol_probs)
