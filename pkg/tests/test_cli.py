import json

import pytest

from gf16_reference import ALT_REP
from subfield_ldpc.cli import main
from subfield_ldpc.codes import LOCAL, load_pcm, save_pcm


def test_tables_default_gf16(capsys):
    assert main(["tables"]) == 0
    out = capsys.readouterr().out
    assert "E_f = 5, L_f = 3" in out
    assert "Q_0  0: {0, a, a^6, a^11}" in out
    # alternate representation of alpha^3
    want = ALT_REP["a3"].replace("w2", "w^2").split()
    line = next(ln for ln in out.splitlines() if ln.strip().startswith("a^3 :"))
    assert line.split(":")[1].split() == want
    assert "info set [0, 1]" in out


def test_tables_other_field(capsys):
    assert main(["tables", "--field", "2^6", "--subfield", "2^3", "--ordering", "cyclic"]) == 0
    assert "E_f = 9, L_f = 7" in capsys.readouterr().out


def test_tables_bad_subfield(capsys):
    assert main(["tables", "--subfield", "2^3"]) == 2
    assert "error:" in capsys.readouterr().err


def test_expand_writes_alist(tmp_path, capsys, small_gf16_code):
    src = tmp_path / "h.alist"
    save_pcm(small_gf16_code, src)
    out = tmp_path / "x.alist"
    assert main(["expand", "--pcm", str(src), "--subfield", "2^2", "--out", str(out)]) == 0
    g = load_pcm(out)
    assert g.field.q == 4 and g.n_cols == 24 * 5
    assert int((g.check_type == LOCAL).sum()) == 24 * 3
    assert "mean variable degree" in capsys.readouterr().err


def test_decode_random_code(capsys):
    args = ["decode", "--field", "2^4", "--n", "48", "--ebn0", "8", "--compact"]
    assert main(args) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["converged"] and res["errors"] == 0 and len(res["decoded"]) == 48
    assert main(args + ["--graph", "expanded", "--subfield", "2^2", "--alg", "min-max", "--random-codeword"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["errors"] == 0 and res["counters"]["local"]["comp"] > 0


def test_decode_expanded_needs_subfield(capsys):
    assert main(["decode", "--field", "2^4", "--n", "24", "--graph", "expanded"]) == 2
    assert "--subfield" in capsys.readouterr().err


def test_missing_field_for_random_code(capsys):
    assert main(["decode"]) == 2


def test_opcount(capsys):
    assert main(["opcount", "--field", "2^6", "--n", "72", "--dv", "4", "--dc", "12",
                 "--subfield", "2^3", "--subfield", "2^2"]) == 0
    out = capsys.readouterr().out
    for label in ("llr-qspa/original", "llr-qspa/F2^3", "min-max/F2^2"):
        assert label in out


def test_opcount_measured_matches(capsys):
    base = ["opcount", "--field", "2^4", "--n", "24", "--subfield", "2^2", "--alg", "fft-qspa"]
    assert main(base) == 0
    a = capsys.readouterr().out
    assert main(base + ["--measured"]) == 0
    assert capsys.readouterr().out == a


def test_simulate(tmp_path, capsys):
    cfg = {
        "ebn0_db": [2.0],
        "field": "2^4",
        "code": {"n": 24, "dv": 3, "dc": 6, "seed": 3},
        "subfields": ["original", 2],
        "frames": 8,
        "max_iter": 5,
        "workers": 1,
    }
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert main(["simulate", "--config", str(path), "--output", str(tmp_path / "r.csv")]) == 0
    assert (tmp_path / "r.csv").read_text().startswith("setup,ebn0_db,frames")
    assert "llr-qspa/m2" in capsys.readouterr().err
    assert main(["simulate", "--config", str(path)]) == 0
    assert len(json.loads(capsys.readouterr().out)) == 2


def test_simulate_bad_config(tmp_path, capsys):
    (tmp_path / "c.json").write_text('{"ebn0_db": [1.0]}')
    assert main(["simulate", "--config", str(tmp_path / "c.json")]) == 2
    assert "pcm_path or code" in capsys.readouterr().err


def test_sweep(capsys):
    assert main(["sweep", "--field", "2^4", "--n", "24", "--subfield", "2^2", "--ebn0", "2",
                 "--deltas", "0.5", "1", "--psis", "0.25", "--frames", "16", "--max-iter", "5"]) == 0
    out = capsys.readouterr().out
    assert out.count("delta=") == 2


def test_unknown_command():
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_missing_pcm_file(tmp_path, capsys):
    assert main(["expand", "--pcm", str(tmp_path / "none.alist"), "--subfield", "2^2", "--out", "x"]) == 2
    assert "error:" in capsys.readouterr().err
