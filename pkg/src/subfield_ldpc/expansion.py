"""Expansion of a Tanner graph over F_{p^r} into a graph over F_{p^m}.

Node layout (original index major, quotient index minor):

* variable ``n * E_f + i``      -- quotient i of original variable n
* regular check ``rho * E_f + j`` -- quotient j of original check rho
* local check ``M * E_f + n * L_f + l`` -- row l of the local PCM for variable n
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import LOCAL, REGULAR, ParityCheckMatrix
from .lattice import CosetLattice, LocalCode, build_lattice, build_local_code
from .gf import build_extension_rep

INFO = 1
PARITY = 0


@dataclass(frozen=True, eq=False)
class ExpandedGraph:
    pcm: ParityCheckMatrix  # over the subfield, check_type tags regular/local
    original: ParityCheckMatrix
    lattice: CosetLattice
    local: LocalCode
    var_orig: np.ndarray
    var_quot: np.ndarray
    var_role: np.ndarray  # INFO / PARITY
    check_orig: np.ndarray  # original check (regular) or original variable (local)
    check_index: np.ndarray  # quotient j (regular) or local row l

    @property
    def E_f(self) -> int:
        return self.lattice.E_f

    @property
    def L_f(self) -> int:
        return self.local.L_f

    @property
    def n_regular(self) -> int:
        return self.original.n_rows * self.E_f

    @property
    def info_nodes(self) -> np.ndarray:
        """(N, r/m) expanded-variable indices of the info positions, in info-set order."""
        N = self.original.n_cols
        info = np.array(self.local.info_set, dtype=np.int64)
        return np.arange(N)[:, None] * self.E_f + info[None, :]

    def mean_var_degree(self) -> float:
        return self.pcm.mean_col_degree()


def expand_graph(pcm: ParityCheckMatrix, lattice: CosetLattice, local: LocalCode | None = None) -> ExpandedGraph:
    if pcm.field != lattice.field:
        raise ValueError(f"PCM field {pcm.field} does not match lattice field {lattice.field}")
    if local is None:
        local = build_local_code(lattice)
    F = lattice.field
    e_f = lattice.E_f
    N, M = pcm.n_cols, pcm.n_rows
    L_f = local.L_f

    # for every quotient j and exponent k: variable-side quotient i and label
    inv_i = np.empty((e_f, F.q - 1), dtype=np.int64)
    inv_lam = np.empty((e_f, F.q - 1), dtype=np.int64)
    ii = np.repeat(np.arange(e_f)[:, None], F.q - 1, axis=1)
    kk = np.repeat(np.arange(F.q - 1)[None, :], e_f, axis=0)
    inv_i[lattice.rule_j, kk] = ii
    inv_lam[lattice.rule_j, kk] = lattice.rule_lambda

    rows: list[list[tuple[int, int]]] = []
    check_orig, check_index, ctype = [], [], []
    for rho in range(M):
        entries = pcm.row(rho)
        for j in range(e_f):
            row = []
            for v, w in entries:
                k = w - 1
                row.append((v * e_f + int(inv_i[j, k]), int(inv_lam[j, k])))
            rows.append(row)
            check_orig.append(rho)
            check_index.append(j)
            ctype.append(REGULAR)
    lp = local.pcm
    local_rows = [[(int(c), int(lp[l, c])) for c in np.flatnonzero(lp[l])] for l in range(L_f)]
    for n in range(N):
        for l in range(L_f):
            rows.append([(n * e_f + c, w) for c, w in local_rows[l]])
            check_orig.append(n)
            check_index.append(l)
            ctype.append(LOCAL)

    sub_pcm = ParityCheckMatrix.from_rows(lattice.subfield, N * e_f, rows, ctype)
    role = np.zeros(e_f, dtype=np.int8)
    role[list(local.info_set)] = INFO
    return ExpandedGraph(
        pcm=sub_pcm,
        original=pcm,
        lattice=lattice,
        local=local,
        var_orig=np.repeat(np.arange(N), e_f),
        var_quot=np.tile(np.arange(e_f), N),
        var_role=np.tile(role, N),
        check_orig=np.asarray(check_orig, dtype=np.int64),
        check_index=np.asarray(check_index, dtype=np.int64),
    )


def expand(pcm: ParityCheckMatrix, m: int, ordering: str = "cyclic", Pi=None) -> ExpandedGraph:
    """Convenience: build extension rep, lattice and local code, then expand."""
    rep = build_extension_rep(pcm.field, m, Pi)
    lat = build_lattice(rep, ordering)
    return expand_graph(pcm, lat, build_local_code(lat))


def expand_codeword(graph: ExpandedGraph, word) -> np.ndarray:
    """Concatenated alternate representations, length N * E_f (batched over leading axes)."""
    word = np.asarray(word, dtype=np.int64)
    return graph.lattice.labels[word].reshape(word.shape[:-1] + (-1,))


def expected_mean_var_degree(dv: float, r: int, m: int, p: int = 2, d_l: int = 3) -> float:
    """Average variable degree of the expanded graph, dv + L_f * d_l / E_f."""
    e_f = (p**r - 1) / (p**m - 1)
    l_f = e_f - r / m
    return dv + l_f * d_l / e_f
