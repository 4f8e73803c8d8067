"""Command-line interface: ``subfield-ldpc {tables,expand,decode,simulate,opcount,sweep}``."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .channel import bi_awgn_symbol_probs
from .codes import (
    LOCAL,
    ParityCheckMatrix,
    encode,
    generator_cache,
    load_pcm,
    parse_field_spec,
    random_regular_binary,
    random_relabel,
    save_pcm,
)
from .decoders import ALGORITHMS, DecodeConfig, decode, recommended_scaling
from .expansion import expand
from .gf import build_extension_rep, build_field
from .lattice import ORDERINGS, build_lattice, build_local_code
from .opcount import format_report, table_for_graph
from .sim import SimConfig, design_rate, run_fer, sweep_scaling, write_records


def _field(spec: str | None, poly: str | None):
    if spec is None:
        return None
    p, r = parse_field_spec(spec)
    return build_field(p, r, poly)


def _load(args) -> ParityCheckMatrix:
    """PCM from --pcm (relabelled when binary and --field is larger) or a random regular code."""
    fld = _field(args.field, args.poly)
    if args.pcm:
        pcm = load_pcm(args.pcm, fld)
        if pcm.field.q == 2 and fld is not None and fld.q > 2:
            pcm = random_relabel(pcm, fld, args.seed)
        return pcm
    if fld is None:
        raise ValueError("--field is required without --pcm")
    binary = random_regular_binary(args.n, args.dv, args.dc, seed=args.seed)
    return random_relabel(binary, fld, args.seed + 1)


def _subfield_degree(spec: str, field) -> int:
    p, m = parse_field_spec(spec)
    if p != field.p:
        raise ValueError(f"subfield {spec} has characteristic {p}, field has {field.p}")
    return m


def _add_code_args(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--pcm", help="NB-alist file (binary files are relabelled over --field)")
    ap.add_argument("--field", help="field p^r, e.g. 2^4")
    ap.add_argument("--poly", help="primitive polynomial: coefficients c0,c1,... or hex bitmask")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, default=96, help="random code length (without --pcm)")
    ap.add_argument("--dv", type=int, default=3)
    ap.add_argument("--dc", type=int, default=6)


def _sym(sub, a: int) -> str:
    return sub.fmt(a, "w")


def cmd_tables(args) -> int:
    p, r = parse_field_spec(args.field)
    F = build_field(p, r, args.poly)
    m = _subfield_degree(args.subfield, F)
    rep = build_extension_rep(F, m)
    lat = build_lattice(rep, args.ordering)
    loc = build_local_code(lat)
    S = lat.subfield
    print(f"F_{F.q} over F_{S.q}: E_f = {lat.E_f}, L_f = {loc.L_f}, beta = a^{lat.beta_index} (w)")
    print("\nQuotient groups (cosets by label)")
    for i, members in enumerate(lat.coset_members):
        cells = []
        for j, mem in enumerate(members):
            cells.append(f"{_sym(S, j)}: {{" + ", ".join(F.fmt(g) for g in mem) + "}")
        print(f"  Q_{i}  " + "  ".join(cells))
    print("\nAlternate representations")
    for g in range(F.q):
        print(f"  {F.fmt(g):>5} : " + " ".join(f"{_sym(S, v):>4}" for v in lat.labels[g]))
    print(f"\nLocal parity-check matrix (info set {list(loc.info_set)})")
    for row in loc.pcm:
        print("  [" + " ".join(f"{_sym(S, v):>4}" for v in row) + " ]")
    return 0


def cmd_expand(args) -> int:
    pcm = _load(args)
    m = _subfield_degree(args.subfield, pcm.field)
    g = expand(pcm, m, args.ordering)
    save_pcm(g.pcm, args.out)
    n_local = int(np.count_nonzero(g.pcm.check_type == LOCAL))
    print(f"expanded {pcm.n_cols}x{pcm.n_rows} over F_{pcm.field.q} -> {g.pcm.n_cols} variables, "
          f"{g.n_regular} regular + {n_local} local checks over F_{g.pcm.field.q}; "
          f"mean variable degree {g.mean_var_degree():.4f}", file=sys.stderr)
    return 0


def cmd_decode(args) -> int:
    pcm = _load(args)
    F = pcm.field
    if args.graph == "expanded":
        if args.subfield is None:
            raise ValueError("--graph expanded needs --subfield")
        m = _subfield_degree(args.subfield, F)
        graph = expand(pcm, m, args.ordering)
    else:
        m = None
        graph = pcm
    d0, p0 = recommended_scaling(args.alg, m)
    cfg = DecodeConfig(algorithm=args.alg, max_iter=args.max_iter, clip=args.clip,
                       delta=d0 if args.delta is None else args.delta, psi=p0 if args.psi is None else args.psi)
    rng = np.random.default_rng(args.seed)
    word = np.zeros(pcm.n_cols, dtype=np.int64)
    if args.random_codeword:
        cache = generator_cache(pcm)
        word = encode(pcm, rng.integers(0, F.q, len(cache.free)), cache)
    rate = args.rate if args.rate is not None else design_rate(pcm)
    probs = bi_awgn_symbol_probs(word, F, args.ebn0, rate, rng)
    res = decode(graph, probs, cfg)
    out = res.to_json()
    out["errors"] = int(np.count_nonzero(res.decoded != word))
    json.dump(out, sys.stdout, indent=None if args.compact else 2)
    print()
    return 0


def cmd_simulate(args) -> int:
    cfg = SimConfig.from_json(args.config)
    if args.workers is not None:
        cfg.workers = args.workers
    if args.output:
        cfg.output = args.output

    def progress(rec):
        lo, hi = rec.fer_interval()
        print(f"{rec.setup:<22} {rec.ebn0_db:6.2f} dB  frames {rec.frames:>7}  errors {rec.frame_errors:>5}  "
              f"FER {rec.fer:.3e} [{lo:.1e}, {hi:.1e}]  iters {rec.mean_iters:.2f}", file=sys.stderr)

    records = run_fer(cfg, progress=progress)
    if cfg.output:
        write_records(records, cfg.output)
    else:
        json.dump([r.__dict__ for r in records], sys.stdout, indent=2, default=float)
        print()
    return 0


def cmd_opcount(args) -> int:
    pcm = _load(args)
    subfields = [None] + [_subfield_degree(s, pcm.field) for s in args.subfield]
    rows = table_for_graph(pcm, tuple(args.alg), tuple(subfields), psi=args.psi, measured=args.measured,
                           ordering=args.ordering)
    print(f"N={pcm.n_cols} M={pcm.n_rows} over F_{pcm.field.q}; operations per iteration")
    print(format_report(rows))
    return 0


def cmd_sweep(args) -> int:
    pcm = _load(args)
    m = _subfield_degree(args.subfield, pcm.field)
    recs = sweep_scaling(pcm, args.alg, m, args.ebn0, args.deltas, args.psis, frames=args.frames,
                         target_errors=args.target_errors, seed=args.seed, max_iter=args.max_iter,
                         ordering=args.ordering)
    for rec in recs:
        print(f"{rec.setup:<40} frames {rec.frames:>6}  errors {rec.frame_errors:>5}  FER {rec.fer:.3e}  "
              f"iters {rec.mean_iters:.2f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="subfield-ldpc", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tables", help="print quotient-group cosets, alternate representations and local PCM")
    t.add_argument("--field", default="2^4")
    t.add_argument("--poly")
    t.add_argument("--subfield", default="2^2")
    t.add_argument("--ordering", choices=ORDERINGS, default="systematic")
    t.set_defaults(func=cmd_tables)

    e = sub.add_parser("expand", help="expand a PCM to a subfield and write an NB-alist file")
    _add_code_args(e)
    e.add_argument("--subfield", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--ordering", choices=ORDERINGS, default="cyclic")
    e.set_defaults(func=cmd_expand)

    d = sub.add_parser("decode", help="decode one BI-AWGN frame and print a JSON result")
    _add_code_args(d)
    d.add_argument("--graph", choices=("original", "expanded"), default="original")
    d.add_argument("--subfield")
    d.add_argument("--alg", choices=ALGORITHMS, default="llr-qspa")
    d.add_argument("--delta", type=float)
    d.add_argument("--psi", type=float)
    d.add_argument("--max-iter", type=int, default=50)
    d.add_argument("--clip", type=float, default=50.0)
    d.add_argument("--ebn0", type=float, default=3.0)
    d.add_argument("--rate", type=float)
    d.add_argument("--ordering", choices=ORDERINGS, default="cyclic")
    d.add_argument("--random-codeword", action="store_true")
    d.add_argument("--compact", action="store_true")
    d.set_defaults(func=cmd_decode)

    s = sub.add_parser("simulate", help="Monte-Carlo FER sweep from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--workers", type=int)
    s.add_argument("--output", help="CSV or JSON output path (overrides the config)")
    s.set_defaults(func=cmd_simulate)

    o = sub.add_parser("opcount", help="per-iteration operation counts, original vs expansions")
    _add_code_args(o)
    o.add_argument("--subfield", action="append", default=[], help="repeatable, e.g. --subfield 2^3")
    o.add_argument("--alg", action="append", choices=ALGORITHMS)
    o.add_argument("--psi", type=float, default=0.5)
    o.add_argument("--measured", action="store_true", help="run one decoder iteration instead of the closed form")
    o.add_argument("--ordering", choices=ORDERINGS, default="cyclic")
    o.set_defaults(func=cmd_opcount)

    w = sub.add_parser("sweep", help="grid search of (delta, psi) at one Eb/N0")
    _add_code_args(w)
    w.add_argument("--subfield", required=True)
    w.add_argument("--alg", choices=ALGORITHMS, default="llr-qspa")
    w.add_argument("--ebn0", type=float, required=True)
    w.add_argument("--deltas", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.75, 1.0])
    w.add_argument("--psis", type=float, nargs="+", default=[0.1, 0.25, 0.4, 0.6, 1.0])
    w.add_argument("--frames", type=int, default=500)
    w.add_argument("--target-errors", type=int, default=50)
    w.add_argument("--max-iter", type=int, default=50)
    w.add_argument("--ordering", choices=ORDERINGS, default="cyclic")
    w.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "alg", None) is None and args.command == "opcount":
        args.alg = ["llr-qspa", "min-max"]
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
