"""Pure numpy message-passing kernels (fallback when the compiled core is unavailable).

All kernels share one signature with the Cython versions in ``_ckernels.pyx``.
``counters`` is an int64 array of shape (4, 4): rows are node classes
(regular check, variable, local check, aux), columns are operation types
(comp, add, mult, lut).  Messages are float64 arrays of shape (n_edges, Q)
indexed by subfield element index.
"""

from __future__ import annotations

import numpy as np

CHECK, VARIABLE, LOCAL, AUX = 0, 1, 2, 3
COMP, ADD, MULT, LUT = 0, 1, 2, 3
LLR, MINMAX, FFT = 0, 1, 2

LUT_STEP = 0.5
LUT_SIZE = 8
# correction term log(1 + e^-d) sampled at bin midpoints of [0, 4)
MAXSTAR_LUT = np.log1p(np.exp(-(np.arange(LUT_SIZE) + 0.5) * LUT_STEP))

BACKEND = "python"
FFT_FLOOR = 1e-14  # relative to the largest output value; transform roundoff is ~1e-16


def maxstar(a, b, lut: bool = False):
    m = np.maximum(a, b)
    d = np.abs(a - b)
    if lut:
        k = np.minimum((d / LUT_STEP).astype(np.int64), LUT_SIZE)
        corr = np.where(k < LUT_SIZE, MAXSTAR_LUT[np.minimum(k, LUT_SIZE - 1)], 0.0)
    else:
        corr = np.log1p(np.exp(-d))
    return m + corr


def conv_llr(a: np.ndarray, b: np.ndarray, sub: np.ndarray, lut: bool = False) -> np.ndarray:
    """out[..., z] = max*_x (a[..., x] + b[..., z - x]).

    Exact mode evaluates the chained max* as one max-normalised log-sum-exp;
    LUT mode reduces pairwise left to right with the tabulated correction.
    """
    t = a[..., None, :] + b[..., sub]
    if lut:
        acc = t[..., 0]
        for x in range(1, t.shape[-1]):
            acc = maxstar(acc, t[..., x], True)
        return acc
    m = t.max(axis=-1)
    return m + np.log(np.exp(t - m[..., None]).sum(axis=-1))


def conv_minmax(a: np.ndarray, b: np.ndarray, sub: np.ndarray) -> np.ndarray:
    """out[..., z] = min_x max(a[..., x], b[..., z - x])."""
    return np.maximum(a[..., None, :], b[..., sub]).min(axis=-1)


def wht(x: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis (length a power of two)."""
    x = np.array(x, dtype=np.float64, copy=True)
    n = x.shape[-1]
    h = 1
    while h < n:
        y = x.reshape(x.shape[:-1] + (n // (2 * h), 2, h))
        a = y[..., 0, :].copy()
        b = y[..., 1, :]
        y[..., 0, :] = a + b
        y[..., 1, :] = a - b
        h *= 2
    return x


def _count(counters, cls_counts, comp=0, add=0, mult=0, lut=0):
    for cls, n in cls_counts:
        if n:
            counters[cls, COMP] += n * comp
            counters[cls, ADD] += n * add
            counters[cls, MULT] += n * mult
            counters[cls, LUT] += n * lut


def _fb(U: np.ndarray, combine):
    """Forward-backward over axis 1 of U (n, d, Q); returns extrinsic outputs (n, d, Q).

    Full prefix and suffix chains are formed (d-1 steps each) plus d-2 middle
    combinations: 3d-4 combining steps per check.
    """
    n, d, Q = U.shape
    Fw = [U[:, 0]]
    for k in range(1, d):
        Fw.append(combine(Fw[-1], U[:, k]))
    Bw = [None] * d
    Bw[d - 1] = U[:, d - 1]
    for k in range(d - 2, -1, -1):
        Bw[k] = combine(U[:, k], Bw[k + 1])
    out = np.empty_like(U)
    out[:, 0] = Bw[1]
    out[:, d - 1] = Fw[d - 2]
    for k in range(1, d - 1):
        out[:, k] = combine(Fw[k - 1], Bw[k + 1])
    return out


def check_pass(kind: int, g, v2c: np.ndarray, c2v: np.ndarray, counters: np.ndarray, lut: bool = False) -> None:
    Q = g.Q
    sub = g.sub_tab
    for d, edges, n_reg, n_loc in g.groups:
        labels = g.edge_label[edges]  # (n, d)
        if d == 1:
            c2v[edges[:, 0]] = 0.0
            continue
        U = np.take_along_axis(v2c[edges], g.perm_in[labels], axis=-1)
        steps = 3 * d - 4
        cls = ((CHECK, n_reg), (LOCAL, n_loc))
        n_all = n_reg + n_loc
        if kind == LLR:
            out = _fb(U, lambda a, b: conv_llr(a, b, sub, lut))
            out -= out[..., :1]
            _count(counters, cls, comp=steps * Q * (Q - 1), add=steps * Q * (3 * Q - 2), lut=steps * Q * (Q - 1))
            _count(counters, ((AUX, n_all),), add=d * Q)
        elif kind == MINMAX:
            out = _fb(U, lambda a, b: conv_minmax(a, b, sub))
            _count(counters, cls, comp=steps * Q * (2 * Q - 1))
        else:
            logq = Q.bit_length() - 1
            mx = U.max(axis=-1, keepdims=True)
            P = np.exp(U - mx)[..., g.vec_to_idx]  # probability domain, vector order
            R = wht(_fb(wht(P), np.multiply))
            R = np.log(np.maximum(R, FFT_FLOOR * R.max(axis=-1, keepdims=True)))[..., g.idx_to_vec]
            out = R - R[..., :1]
            _count(counters, cls, add=2 * d * Q * logq, mult=steps * Q, lut=2 * d * Q)
            _count(counters, ((AUX, n_all),), comp=d * (3 * Q - 2), add=2 * d * Q, mult=d)
        c2v[edges] = np.take_along_axis(out, g.perm_out[labels], axis=-1)


def var_pass(
    kind: int,
    g,
    L: np.ndarray,
    c2v: np.ndarray,
    v2c: np.ndarray,
    post: np.ndarray,
    counters: np.ndarray,
    clip: float,
) -> None:
    Q = g.Q
    w = g.edge_w
    scaled = c2v * w[:, None]
    n_scaled = int(g.n_weighted_edges)
    R = L.copy()
    np.add.at(R, g.edge_var, scaled)
    post[:] = R
    t = R[g.edge_var] - scaled
    E = g.n_edges
    counters[VARIABLE, ADD] += 2 * E * Q
    counters[VARIABLE, MULT] += n_scaled * Q
    if kind == MINMAX:
        t -= t.min(axis=-1, keepdims=True)
        np.minimum(t, clip, out=t)
        counters[VARIABLE, COMP] += E * Q
        counters[VARIABLE, ADD] += E * Q
        counters[AUX, COMP] += E * Q
    else:
        t -= t[:, :1]
        np.clip(t, -clip, clip, out=t)
        counters[AUX, ADD] += E * Q
        counters[AUX, COMP] += 2 * E * Q
    v2c[:] = t


def decide(kind: int, post: np.ndarray, nodes: np.ndarray, counters: np.ndarray) -> np.ndarray:
    Q = post.shape[1]
    sel = post[nodes]
    if kind == MINMAX:
        counters[VARIABLE, COMP] += len(nodes) * Q
        return np.argmin(sel, axis=1)
    counters[VARIABLE, COMP] += len(nodes) * (Q - 1)
    return np.argmax(sel, axis=1)
