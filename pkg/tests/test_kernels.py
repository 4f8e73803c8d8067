import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subfield_ldpc import _pykernels, kernels
from subfield_ldpc.decoders import DecodeConfig, Decoder
from subfield_ldpc.expansion import expand

needs_cython = pytest.mark.skipif("cython" not in kernels.available(), reason="compiled kernels not built")


def test_python_backend_always_available(monkeypatch):
    assert "python" in kernels.available()
    monkeypatch.setenv("SUBFIELD_LDPC_BACKEND", "python")
    assert kernels.default_backend() == "python"
    assert kernels.get_backend() is _pykernels


def test_unknown_backend(monkeypatch):
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")
    monkeypatch.setenv("SUBFIELD_LDPC_BACKEND", "gpu")
    with pytest.raises(ValueError):
        kernels.get_backend()


def test_auto_prefers_compiled(monkeypatch):
    monkeypatch.delenv("SUBFIELD_LDPC_BACKEND", raising=False)
    want = "cython" if "cython" in kernels.available() else "python"
    assert kernels.default_backend() == want


@needs_cython
def test_cython_backend_selected_by_env(monkeypatch):
    monkeypatch.setenv("SUBFIELD_LDPC_BACKEND", "cython")
    assert kernels.get_backend().BACKEND == "cython"


def test_maxstar_lut_is_close_to_exact():
    a = np.linspace(-10, 10, 101)
    exact = _pykernels.maxstar(a, 0.0)
    approx = _pykernels.maxstar(a, 0.0, lut=True)
    np.testing.assert_allclose(exact, np.logaddexp(a, 0.0), atol=1e-12)
    assert np.abs(exact - approx).max() < 0.13


@needs_cython
@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["llr-qspa", "fft-qspa", "min-max"]), st.sampled_from([None, 2, 1]),
       st.integers(0, 2**31 - 1), st.sampled_from(["exact", "lut"]))
def test_backends_agree_on_random_input(small_gf16_code, alg, m, seed, maxstar):
    g = small_gf16_code if m is None else expand(small_gf16_code, m)
    cfg = DecodeConfig(alg, max_iter=4, delta=0.8, psi=0.3, maxstar=maxstar, early_stop=False)
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.full(16, 0.3), size=small_gf16_code.n_cols)
    p = np.maximum(p, 1e-12)
    p /= p.sum(axis=1, keepdims=True)
    a, b = Decoder(g, cfg, "python"), Decoder(g, cfg, "cython")
    sa, sb = a.start(p), b.start(p)
    for _ in range(4):
        a.step(sa)
        b.step(sb)
        np.testing.assert_allclose(sa.c2v, sb.c2v, atol=1e-7)
        np.testing.assert_allclose(sa.v2c, sb.v2c, atol=1e-7)
    assert np.array_equal(sa.counters.table, sb.counters.table)


@needs_cython
def test_benchmark_script_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parent.parent / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    rows = mod.bench(n=24, repeat=1, iters=2, seed=0, algorithms=("llr-qspa",))
    assert rows and all(r["same_decisions"] and r["same_counters"] for r in rows)
