"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that pytest prints in an "acceptance
criteria" section of its terminal summary.  Run on its own with
``pytest tests/test_acceptance.py -v``.
"""

import itertools
import math
import time

import numpy as np
import pytest

from acceptance_log import criterion, note
from gf16_reference import ALT_REP, COSETS, LOCAL_PCM, SUB, big, sub_vec
from oracles import binary_bp, expanded_binary_llrs, local_weights, ml_decode
from subfield_ldpc import kernels
from subfield_ldpc.channel import bi_awgn_symbol_probs
from subfield_ldpc.codes import (
    LOCAL,
    REGULAR,
    encode,
    generator_cache,
    random_regular_binary,
    random_relabel,
    syndrome,
)
from subfield_ldpc.decoders import ALGORITHMS, DecodeConfig, Decoder
from subfield_ldpc.expansion import expand, expand_codeword
from subfield_ldpc.gf import build_extension_rep, build_field, psi_star
from subfield_ldpc.lattice import ORDERINGS, alt_rep, build_lattice, edge_rule, verify_edge_rule
from subfield_ldpc.opcount import measure_iteration_ops, predict_iteration_ops, totals
from subfield_ldpc.sim import FrameRunner, Setup, run_point, sweep_scaling

BACKENDS = kernels.available()


def _full_rank(F, binary, seed=0):
    for s in range(seed, seed + 100):
        pcm = random_relabel(binary, F, s)
        if generator_cache(pcm).rank == pcm.n_rows:
            return pcm
    raise RuntimeError("no full-rank relabelling")


# -- 1 ------------------------------------------------------------------------------------


@criterion(1, "minimal alpha-connected kernel sets have (p^r-1)/(p^m-1) members")
def test_kernel_set_cardinality():
    t0 = time.perf_counter()
    want = {(2, 4, 2): 5, (2, 4, 1): 15, (2, 6, 3): 9, (2, 6, 2): 21, (2, 6, 1): 63, (3, 4, 2): 10}
    for (p, r, m), n in want.items():
        F = build_field(p, r)
        rep = build_extension_rep(F, m)
        # independent: orbit of ker(psi*) under multiplication by alpha
        k0 = frozenset(np.flatnonzero(psi_star(rep, np.arange(F.q)) == 0).tolist())
        assert len(k0) == p ** (r - m)
        orbit, cur = [], k0
        while cur not in orbit:
            orbit.append(cur)
            cur = frozenset(F.mul(F.elem(1), np.array(sorted(cur))).tolist())
        assert cur == k0 and len(orbit) == n
        lat = build_lattice(rep)
        assert lat.E_f == n
        assert {frozenset(lat.kernel(i).tolist()) for i in range(lat.E_f)} == set(orbit)
    assert time.perf_counter() - t0 < 1.0


# -- 2, 3 -----------------------------------------------------------------------------------


@criterion(2, "GF(16)/GF(4) quotient-group coset partitions match the reference layout")
def test_gf16_coset_partitions(lat16):
    assert lat16.subfield.q == 4 and lat16.field.elem(5) == lat16.rep.embed(SUB["w"])
    assert tuple(lat16.rep.Pi) == (SUB["w"], 1, 1)  # x^2 + x + w
    for i, row in enumerate(COSETS):
        for label, members in row.items():
            want = sorted(big(t) for t in members.split())
            assert lat16.coset_members[i][SUB[label]].tolist() == want, (i, label)


@criterion(3, "GF(16)/GF(4) alternate representations, dimension-2 code, local checks annihilate")
def test_gf16_alternate_representation(lat16, local16):
    S = lat16.subfield
    for tok, vec in ALT_REP.items():
        assert alt_rep(lat16, big(tok)).tolist() == sub_vec(vec), tok
    vecs = np.array([sub_vec(v) for v in ALT_REP.values()])
    # closed under addition and subfield scaling, 16 = 4^2 words: a dimension-2 linear code
    words = {tuple(v) for v in vecs}
    assert len(words) == 16
    for a, b in itertools.product(vecs, vecs):
        assert tuple(S.add(a, b)) in words
    for s, a in itertools.product(range(4), vecs):
        assert tuple(S.mul(s, a)) in words
    H = np.array([sub_vec(r) for r in LOCAL_PCM])
    assert np.array_equal(local16.pcm, H)
    for v in vecs:
        assert all(S.sum(S.mul(h, v)) == 0 for h in H)


# -- 4 ------------------------------------------------------------------------------------


def _small_configs():
    for p in (2, 3, 5, 7, 11, 13):
        r = 1
        while p**r <= 256:
            for m in range(1, r + 1):
                if r % m == 0:
                    yield p, r, m
            r += 1


@criterion(4, "edge rule holds for every (i, k, gamma) in all fields with q <= 256")
def test_edge_rule_exhaustive():
    t0 = time.perf_counter()
    n = 0
    for p, r, m in _small_configs():
        F = build_field(p, r)
        rep = build_extension_rep(F, m)
        S = rep.subfield
        g = np.arange(F.q)
        lat = build_lattice(rep, "cyclic")
        # independent labels: psi*_i(x) = psi*(alpha^-i x)
        lab = np.stack([psi_star(rep, F.mul(F.elem(-i), g)) for i in range(lat.E_f)], axis=1)
        for k in range(F.q - 1):
            moved = lab[F.mul(F.elem(k), g)]
            for i in range(lat.E_f):
                j, lam = edge_rule(lat, i, k)
                assert np.array_equal(moved[:, j], S.mul(lam, lab[:, i])), (p, r, m, i, k)
        verify_edge_rule(build_lattice(rep, "systematic"))
        n += 1
    note(4, f"{n} (p, r, m) configurations, {time.perf_counter() - t0:.1f} s")
    assert time.perf_counter() - t0 < 10.0


# -- 5 ------------------------------------------------------------------------------------


@criterion(5, "expanded images of 1000 codewords satisfy all checks; perturbations break a regular check")
def test_codeword_mapping(f16):
    pcm = _full_rank(f16, random_regular_binary(16, 2, 4, seed=0))
    assert (pcm.n_rows, pcm.n_cols) == (8, 16)
    cache = generator_cache(pcm)
    rng = np.random.default_rng(0)
    words = encode(pcm, rng.integers(0, 16, size=(1000, len(cache.free))), cache)
    assert not np.any(syndrome(pcm, words))
    for ordering in ORDERINGS:
        g = expand(pcm, 2, ordering)
        assert not np.any(syndrome(g.pcm, expand_codeword(g, words)))
        bad = words.copy()
        pos = rng.integers(0, 16, size=1000)
        bad[np.arange(1000), pos] = f16.add(bad[np.arange(1000), pos], rng.integers(1, 16, size=1000))
        s = syndrome(g.pcm, expand_codeword(g, bad))
        assert np.all(np.any(s[:, g.pcm.check_type == REGULAR] != 0, axis=1))


# -- 6 ------------------------------------------------------------------------------------


def _formula(graph, alg, psi):
    """Per-iteration totals written out directly from the node degrees."""
    if hasattr(graph, "info_nodes"):
        pcm = graph.pcm
        deciding = graph.info_nodes.size
    else:
        pcm = graph
        deciding = pcm.n_cols
    Q = pcm.field.q
    out = dict(comp=0, add=0, mult=0, lut=0)
    for d in pcm.row_degrees:
        s = 3 * int(d) - 4
        if alg == "llr-qspa":
            out["comp"] += s * Q * (Q - 1)
            out["add"] += s * Q * (3 * Q - 2)
            out["lut"] += s * Q * (Q - 1)
        else:
            out["comp"] += s * Q * (2 * Q - 1)
    E = pcm.n_edges
    n_local_edges = int(np.count_nonzero(pcm.check_type[pcm.row_of_edge] == LOCAL))
    if alg == "llr-qspa":
        out["add"] += 2 * E * Q
        out["comp"] += deciding * (Q - 1)
    else:
        out["add"] += 3 * E * Q
        out["comp"] += E * Q + deciding * Q
    out["mult"] += n_local_edges * Q if psi != 1.0 else 0
    return out


@criterion(6, "operation counters equal closed forms; long-code percentages within 2 points")
def test_counters_and_long_code_percentages():
    t0 = time.perf_counter()
    small = random_relabel(random_regular_binary(72, 4, 12, seed=0), build_field(2, 6), 1)
    for m in (None, 3, 2, 1):
        g = small if m is None else expand(small, m)
        psi = 1.0 if m is None else 0.3
        for alg, backend in itertools.product(("llr-qspa", "min-max"), BACKENDS):
            got = measure_iteration_ops(g, alg, psi=psi, iterations=2, backend=backend).totals()
            assert got == _formula(g, alg, psi), (alg, m, backend)

    # length-1998, rate-0.89, column-weight-4 code over GF(64)
    long = random_relabel(random_regular_binary(1998, 4, 36, seed=1), build_field(2, 6), 2)
    graphs = {None: long, 3: expand(long, 3), 2: expand(long, 2)}
    pct = {}
    for alg in ("llr-qspa", "min-max"):
        base = totals(predict_iteration_ops(long, alg))
        for m in (3, 2):
            t = totals(predict_iteration_ops(graphs[m], alg, 0.5))
            pct[alg, m] = {op: 100.0 * t[op] / base[op] for op in ("comp", "add")}
    targets = {("llr-qspa", 3, "comp"): 17, ("llr-qspa", 2, "comp"): 8, ("min-max", 3, "comp"): 18,
               ("min-max", 2, "comp"): 10, ("min-max", 3, "add"): 178, ("min-max", 2, "add"): 215}
    note(6, ", ".join(f"{a}/m{m} {op} {pct[a, m][op]:.1f}%" for (a, m, op) in targets))
    for (alg, m, op), want in targets.items():
        assert abs(pct[alg, m][op] - want) <= 2.0, (alg, m, op, pct[alg, m][op])
    assert time.perf_counter() - t0 < 60.0


# -- 7 ------------------------------------------------------------------------------------


@criterion(7, "mean expanded variable degree is 19/3 for r=6, m=3, dv=4")
def test_mean_variable_degree():
    pcm = random_relabel(random_regular_binary(144, 4, 16, seed=0), build_field(2, 6), 1)
    g = expand(pcm, 3)
    assert abs(g.pcm.n_edges / g.pcm.n_cols - 19 / 3) <= 1e-9
    assert abs(g.mean_var_degree() - 19 / 3) <= 1e-9


# -- 8 ------------------------------------------------------------------------------------


@criterion(8, "QSPA agrees with block ML on >= 99% of 10^4 frames (N=6 GF(16) code, 6 dB)")
def test_small_code_matches_ml(f16):
    t0 = time.perf_counter()
    pcm = _full_rank(f16, random_regular_binary(6, 2, 4, seed=0))
    assert (pcm.n_rows, pcm.n_cols) == (3, 6)
    cache = generator_cache(pcm)
    codewords = encode(pcm, np.array(list(itertools.product(range(16), repeat=3))), cache)
    assert len({tuple(c) for c in codewords}) == 4096 and not np.any(syndrome(pcm, codewords))
    dec = Decoder(pcm, DecodeConfig("llr-qspa", max_iter=50))
    rng = np.random.default_rng(2024)
    frames, agree = 10_000, 0
    for _ in range(frames):
        x = codewords[rng.integers(len(codewords))]
        probs = bi_awgn_symbol_probs(x, f16, 6.0, 0.5, rng)
        agree += bool(np.array_equal(dec.decode(probs).decoded, ml_decode(codewords, probs)))
    note(8, f"agreement {agree / frames:.4f}")
    assert agree / frames >= 0.99
    assert time.perf_counter() - t0 < 300.0


# -- 9 ------------------------------------------------------------------------------------

BAND_DELTAS = (0.5, 0.75, 1.0)
BAND_PSIS = (0.1, 0.15, 0.25, 0.4)


@pytest.mark.slow
@criterion(9, "F4-expansion QSPA FER <= 3x original QSPA FER near 1e-2 (N=100 GF(16) code)")
def test_expansion_performance_band(f16):
    t0 = time.perf_counter()
    pcm = random_relabel(random_regular_binary(100, 3, 6, seed=0), f16, 1)
    max_iter = 50
    orig = Setup("llr-qspa")
    args = (pcm, [orig], max_iter, 50.0, None, "zero", None)
    runner = FrameRunner(*args)

    # coarse grid: the SNR whose original-graph FER is closest to 1e-2 on a log scale
    grid = np.arange(2.0, 3.51, 0.25)
    coarse = [run_point(args, 0, float(s), 100 + i, 3000, 60, seed=1, runner=runner) for i, s in enumerate(grid)]
    score = [abs(math.log10(max(r.fer, 1e-5)) + 2) for r in coarse]
    snr = float(grid[int(np.argmin(score))])

    ref = run_point(args, 0, snr, 0, 400_000, 200, seed=0, runner=runner)
    assert ref.frame_errors >= 200

    # tune (delta, psi) on independent frames, then measure the winner on the reference frames
    sweep = sweep_scaling(pcm, "llr-qspa", 2, snr, BAND_DELTAS, BAND_PSIS, frames=3000, target_errors=100,
                          seed=1, max_iter=max_iter)
    best = sweep[0].setup.split(":")[1]
    delta = float(best.split(",")[0].split("=")[1])
    psi = float(best.split(",")[1].split("=")[1])
    exp_setup = Setup("llr-qspa", 2, delta, psi)
    eargs = (pcm, [exp_setup], max_iter, 50.0, None, "zero", None)
    res = run_point(eargs, 0, snr, 0, 400_000, 200, seed=0, runner=FrameRunner(*eargs))
    assert res.frame_errors >= 200

    ratio = res.fer / ref.fer
    note(9, f"{snr:.2f} dB: original FER {ref.fer:.2e} ({ref.frame_errors}/{ref.frames}), "
            f"F4 delta={delta:g} psi={psi:g} FER {res.fer:.2e} ({res.frame_errors}/{res.frames}), "
            f"ratio {ratio:.1f}, {time.perf_counter() - t0:.0f} s")
    assert time.perf_counter() - t0 < 1800.0
    assert ratio <= 3.0


# -- 10 -----------------------------------------------------------------------------------


@criterion(10, "m=r decoding is bit-exact; m=1 QSPA equals binary sum-product within 1e-9")
def test_degenerate_reductions():
    worst = {b: _check_degenerate(b) for b in BACKENDS}
    note(10, "max binary message deviation " + ", ".join(f"{b} {w:.1e}" for b, w in worst.items()))
    assert max(worst.values()) <= 1e-9


def _check_degenerate(backend):
    F = build_field(2, 4)
    pcm = random_relabel(random_regular_binary(48, 3, 6, seed=2), F, 3)
    word = np.zeros(48, dtype=np.int64)
    full = expand(pcm, 4)
    for alg in ALGORITHMS:
        cfg = DecodeConfig(alg, max_iter=10)
        for s in range(10):
            probs = bi_awgn_symbol_probs(word, F, 1.0, 0.5, np.random.default_rng(s))
            a, b = Decoder(pcm, cfg, backend).decode(probs), Decoder(full, cfg, backend).decode(probs)
            assert np.array_equal(a.decoded, b.decoded) and a.iterations == b.iterations
            assert np.array_equal(a.counters.table, b.counters.table)

    g = expand(pcm, 1)
    delta, psi = 0.7, 0.25
    worst = 0.0
    for s in range(3):
        probs = bi_awgn_symbol_probs(word, F, 0.5, 0.5, np.random.default_rng(100 + s))
        dec = Decoder(g, DecodeConfig("llr-qspa", max_iter=5, delta=delta, psi=psi), backend)
        st = dec.start(probs)
        lam = expanded_binary_llrs(g, probs, delta)
        for c2v, v2c, _ in binary_bp(g.pcm, lam, local_weights(g.pcm, psi), 5):
            dec.step(st)
            worst = max(worst, np.abs(-st.c2v[:, 1] - c2v).max(), np.abs(-st.v2c[:, 1] - v2c).max())
    return worst


# -- 11 -----------------------------------------------------------------------------------


@criterion(11, "noiseless input converges in one iteration with zero syndrome, all algorithms and graphs")
def test_zero_noise_convergence():
    rng = np.random.default_rng(0)
    for r, subfields in ((4, (None, 4, 2, 1)), (6, (None, 6, 3, 2, 1))):
        F = build_field(2, r)
        pcm = _full_rank(F, random_regular_binary(36, 3, 6, seed=r))
        cache = generator_cache(pcm)
        word = encode(pcm, rng.integers(0, F.q, len(cache.free)), cache)
        probs = bi_awgn_symbol_probs(word, F, math.inf, 0.5, rng)
        for m in subfields:
            graph = pcm if m is None else expand(pcm, m)
            for alg in ALGORITHMS:
                for backend in BACKENDS:
                    for delta, psi in ((1.0, 1.0), (0.0, 0.3), (0.75, 0.25)):
                        res = Decoder(graph, DecodeConfig(alg, delta=delta, psi=psi), backend).decode(probs)
                        assert res.converged and res.iterations == 1, (r, m, alg, backend)
                        assert np.array_equal(res.decoded, word) and not np.any(syndrome(pcm, res.decoded))
