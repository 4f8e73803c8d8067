# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled message-passing kernels; same interface and counting as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, log1p, fabs

cnp.import_array()

BACKEND = "cython"

cdef enum:
    CHECK = 0
    VARIABLE = 1
    LOCAL = 2
    AUX = 3

cdef enum:
    LLR = 0
    MINMAX = 1
    FFT = 2

cdef double LUT_STEP = 0.5
cdef int LUT_SIZE = 8
cdef double[8] MAXSTAR_LUT
cdef int _i
for _i in range(8):
    MAXSTAR_LUT[_i] = log1p(exp(-(_i + 0.5) * 0.5))

cdef double FFT_FLOOR = 1e-14
cdef double EXP_FLOOR = 1e-300


cdef inline double _maxstar(double a, double b, bint lut) noexcept nogil:
    cdef double m = a if a >= b else b
    cdef double d = fabs(a - b)
    cdef long k
    if lut:
        k = <long>(d / LUT_STEP)
        if k < LUT_SIZE:
            return m + MAXSTAR_LUT[k]
        return m
    return m + log1p(exp(-d))


cdef inline void _conv_llr_lut(const double* a, const double* b, double* out, const long long* sub,
                               int Q) noexcept nogil:
    cdef int z, x
    cdef double acc
    for z in range(Q):
        acc = a[0] + b[sub[z * Q + 0]]
        for x in range(1, Q):
            acc = _maxstar(acc, a[x] + b[sub[z * Q + x]], True)
        out[z] = acc


cdef inline void _conv_exp(const double* a, const double* b, double* out, const long long* sub,
                           int Q) noexcept nogil:
    # exact max* chain on max-scaled exponentials: out = a (*) b, rescaled so max(out) = 1
    cdef int z, x
    cdef double s, m = 0.0
    for z in range(Q):
        s = 0.0
        for x in range(Q):
            s += a[x] * b[sub[z * Q + x]]
        out[z] = s
        if s > m:
            m = s
    if m > 0.0:
        m = 1.0 / m
        for z in range(Q):
            out[z] *= m


cdef inline void _conv_minmax(const double* a, const double* b, double* out, const long long* sub,
                              int Q) noexcept nogil:
    cdef int z, x
    cdef double acc, t, bb
    for z in range(Q):
        acc = a[0]
        bb = b[sub[z * Q + 0]]
        if bb > acc:
            acc = bb
        for x in range(1, Q):
            t = a[x]
            bb = b[sub[z * Q + x]]
            if bb > t:
                t = bb
            if t < acc:
                acc = t
        out[z] = acc


cdef inline void _mul(const double* a, const double* b, double* out, int Q) noexcept nogil:
    cdef int x
    for x in range(Q):
        out[x] = a[x] * b[x]


cdef enum:
    MODE_LUT = 0
    MODE_MINMAX = 1
    MODE_FFT = 2
    MODE_EXP = 3


cdef inline void _combine(int mode, const double* a, const double* b, double* out,
                          const long long* sub, int Q) noexcept nogil:
    if mode == MODE_EXP:
        _conv_exp(a, b, out, sub, Q)
    elif mode == MODE_LUT:
        _conv_llr_lut(a, b, out, sub, Q)
    elif mode == MODE_MINMAX:
        _conv_minmax(a, b, out, sub, Q)
    else:
        _mul(a, b, out, Q)


cdef inline void _wht(double* x, int Q) noexcept nogil:
    cdef int h = 1, i, j
    cdef double a, b
    while h < Q:
        i = 0
        while i < Q:
            for j in range(i, i + h):
                a = x[j]
                b = x[j + h]
                x[j] = a + b
                x[j + h] = a - b
            i += 2 * h
        h *= 2


def check_pass(int kind, g, double[:, ::1] v2c, double[:, ::1] c2v, long long[:, ::1] counters, bint lut=False):
    cdef const long long[::1] ptr = g.chk_ptr
    cdef const long long[::1] cls = g.chk_class
    cdef const long long[::1] label = g.edge_label
    cdef const long long[:, ::1] perm_in = g.perm_in
    cdef const long long[:, ::1] perm_out = g.perm_out
    cdef const long long[:, ::1] sub_mv = g.sub_tab
    cdef const long long* sub = &sub_mv[0, 0]
    cdef const long long[::1] v2i = g.vec_to_idx
    cdef const long long[::1] i2v = g.idx_to_vec
    cdef int Q = g.Q
    cdef Py_ssize_t n_checks = g.n_checks
    cdef Py_ssize_t c, e0, d, k, dmax = 1
    cdef int x, y, h, s, logq = 0
    cdef int mode
    cdef double mx, ref
    cdef long long steps, n_ck[4]
    cdef long long degsum[4]
    cdef long long convsum[4]
    for c in range(n_checks):
        if ptr[c + 1] - ptr[c] > dmax:
            dmax = ptr[c + 1] - ptr[c]
    while (1 << logq) < Q:
        logq += 1
    cdef double[:, ::1] U = np.empty((dmax, Q))
    cdef double[:, ::1] Fw = np.empty((dmax, Q))
    cdef double[:, ::1] Bw = np.empty((dmax, Q))
    cdef double[::1] res = np.empty(Q)
    cdef double[::1] tmp = np.empty(Q)
    cdef double floor
    if kind == FFT:
        mode = MODE_FFT
    elif kind == MINMAX:
        mode = MODE_MINMAX
    elif lut:
        mode = MODE_LUT
    else:
        mode = MODE_EXP
    for k in range(4):
        n_ck[k] = 0
        degsum[k] = 0
        convsum[k] = 0
    with nogil:
        for c in range(n_checks):
            e0 = ptr[c]
            d = ptr[c + 1] - e0
            if d == 0:
                continue
            if d == 1:
                for x in range(Q):
                    c2v[e0, x] = 0.0
                continue
            for k in range(d):
                h = label[e0 + k]
                if mode == MODE_FFT or mode == MODE_EXP:
                    mx = v2c[e0 + k, 0]
                    for y in range(1, Q):
                        if v2c[e0 + k, y] > mx:
                            mx = v2c[e0 + k, y]
                    if mode == MODE_FFT:
                        for s in range(Q):
                            U[k, s] = exp(v2c[e0 + k, perm_in[h, v2i[s]]] - mx)
                        _wht(&U[k, 0], Q)
                    else:
                        for y in range(Q):
                            U[k, y] = exp(v2c[e0 + k, perm_in[h, y]] - mx)
                else:
                    for y in range(Q):
                        U[k, y] = v2c[e0 + k, perm_in[h, y]]
            # forward / backward chains
            for x in range(Q):
                Fw[0, x] = U[0, x]
                Bw[d - 1, x] = U[d - 1, x]
            for k in range(1, d):
                _combine(mode, &Fw[k - 1, 0], &U[k, 0], &Fw[k, 0], sub, Q)
            for k in range(d - 2, -1, -1):
                _combine(mode, &U[k, 0], &Bw[k + 1, 0], &Bw[k, 0], sub, Q)
            for k in range(d):
                if k == 0:
                    for x in range(Q):
                        res[x] = Bw[1, x]
                elif k == d - 1:
                    for x in range(Q):
                        res[x] = Fw[d - 2, x]
                else:
                    _combine(mode, &Fw[k - 1, 0], &Bw[k + 1, 0], &res[0], sub, Q)
                if mode == MODE_EXP:
                    for x in range(Q):
                        res[x] = log(res[x] if res[x] > EXP_FLOOR else EXP_FLOOR)
                elif mode == MODE_FFT:
                    _wht(&res[0], Q)
                    floor = res[0]
                    for x in range(1, Q):
                        if res[x] > floor:
                            floor = res[x]
                    floor = floor * FFT_FLOOR
                    for x in range(Q):
                        mx = res[i2v[x]]
                        tmp[x] = log(mx if mx > floor else floor)
                    for x in range(Q):
                        res[x] = tmp[x]
                h = label[e0 + k]
                if kind == MINMAX:
                    for x in range(Q):
                        c2v[e0 + k, x] = res[perm_out[h, x]]
                else:
                    ref = res[0]
                    for x in range(Q):
                        c2v[e0 + k, x] = res[perm_out[h, x]] - ref
            n_ck[cls[c]] += 1
            degsum[cls[c]] += d
            convsum[cls[c]] += 3 * d - 4
    cdef long long n_all = 0, d_all = 0
    cdef int r
    cdef long long q = Q
    for r in (CHECK, LOCAL):
        n_all += n_ck[r]
        d_all += degsum[r]
        if kind == LLR:
            counters[r, 0] += convsum[r] * q * (q - 1)
            counters[r, 1] += convsum[r] * q * (3 * q - 2)
            counters[r, 3] += convsum[r] * q * (q - 1)
        elif kind == MINMAX:
            counters[r, 0] += convsum[r] * q * (2 * q - 1)
        else:
            counters[r, 1] += 2 * degsum[r] * q * logq
            counters[r, 2] += convsum[r] * q
            counters[r, 3] += 2 * degsum[r] * q
    if kind == LLR:
        counters[AUX, 1] += d_all * q
    elif kind == FFT:
        counters[AUX, 0] += d_all * (3 * q - 2)
        counters[AUX, 1] += 2 * d_all * q
        counters[AUX, 2] += d_all


def var_pass(int kind, g, const double[:, ::1] L, const double[:, ::1] c2v, double[:, ::1] v2c,
             double[:, ::1] post, long long[:, ::1] counters, double clip):
    cdef const long long[::1] vptr = g.var_ptr
    cdef const long long[::1] vedges = g.var_edges
    cdef const double[::1] w = g.edge_w
    cdef int Q = g.Q
    cdef Py_ssize_t n_vars = g.n_vars, E = g.n_edges
    cdef Py_ssize_t v, a, b, e, t
    cdef int x
    cdef double ww, ref
    cdef double[::1] R = np.empty(Q)
    with nogil:
        for v in range(n_vars):
            a = vptr[v]
            b = vptr[v + 1]
            for x in range(Q):
                R[x] = L[v, x]
            for t in range(a, b):
                e = vedges[t]
                ww = w[e]
                for x in range(Q):
                    R[x] = R[x] + c2v[e, x] * ww
            for x in range(Q):
                post[v, x] = R[x]
            for t in range(a, b):
                e = vedges[t]
                ww = w[e]
                for x in range(Q):
                    v2c[e, x] = R[x] - c2v[e, x] * ww
                if kind == MINMAX:
                    ref = v2c[e, 0]
                    for x in range(1, Q):
                        if v2c[e, x] < ref:
                            ref = v2c[e, x]
                    for x in range(Q):
                        v2c[e, x] = v2c[e, x] - ref
                        if v2c[e, x] > clip:
                            v2c[e, x] = clip
                else:
                    ref = v2c[e, 0]
                    for x in range(Q):
                        v2c[e, x] = v2c[e, x] - ref
                        if v2c[e, x] > clip:
                            v2c[e, x] = clip
                        elif v2c[e, x] < -clip:
                            v2c[e, x] = -clip
    cdef long long q = Q
    counters[VARIABLE, 1] += 2 * E * q
    counters[VARIABLE, 2] += g.n_weighted_edges * q
    if kind == MINMAX:
        counters[VARIABLE, 0] += E * q
        counters[VARIABLE, 1] += E * q
        counters[AUX, 0] += E * q
    else:
        counters[AUX, 1] += E * q
        counters[AUX, 0] += 2 * E * q


def decide(int kind, const double[:, ::1] post, const long long[::1] nodes, long long[:, ::1] counters):
    cdef Py_ssize_t n = nodes.shape[0], i, v
    cdef int Q = post.shape[1], x, best
    cdef double bv
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] o = out
    with nogil:
        for i in range(n):
            v = nodes[i]
            best = 0
            bv = post[v, 0]
            for x in range(1, Q):
                if kind == MINMAX:
                    if post[v, x] < bv:
                        bv = post[v, x]
                        best = x
                else:
                    if post[v, x] > bv:
                        bv = post[v, x]
                        best = x
            o[i] = best
    if kind == MINMAX:
        counters[VARIABLE, 0] += n * Q
    else:
        counters[VARIABLE, 0] += n * (Q - 1)
    return out
