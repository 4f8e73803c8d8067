"""Monte-Carlo FER/BER simulation of original vs expanded-graph decoders over BI-AWGN.

Every frame draws its noise (and, optionally, its message) from a private
generator seeded by ``(seed, snr_index, frame_index)``: results do not depend
on the worker count, and all setups see the same noise at a given SNR.
Frames are processed in fixed-size chunks; the stopping rule keeps the
shortest prefix of frames that reaches the target error count.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from dataclasses import field as dc_field
from pathlib import Path

import numpy as np

from .channel import bi_awgn_symbol_probs
from .codes import (
    ParityCheckMatrix,
    encode,
    generator_cache,
    load_pcm,
    parse_field_spec,
    random_regular_binary,
    random_relabel,
)
from .decoders import ALGORITHMS, DecodeConfig, Decoder, OpCounters, recommended_scaling
from .expansion import expand
from .gf import build_field

CSV_HEADER = ["setup", "ebn0_db", "frames", "frame_errors", "fer", "ber", "mean_iters", "comp", "add", "mult", "lut"]
THREADS_ENV = "SUBFIELD_LDPC_THREADS"


@dataclass(frozen=True)
class Setup:
    """One decoder configuration: algorithm on the original graph (m=None) or an expansion."""

    algorithm: str
    m: int | None = None
    delta: float = 1.0
    psi: float = 1.0
    ordering: str = "cyclic"
    maxstar: str = "exact"

    @property
    def name(self) -> str:
        return f"{self.algorithm}/{'original' if self.m is None else f'm{self.m}'}"

    def decode_config(self, max_iter: int, clip: float = 50.0) -> DecodeConfig:
        return DecodeConfig(
            algorithm=self.algorithm, max_iter=max_iter, delta=self.delta, psi=self.psi, clip=clip, maxstar=self.maxstar
        )


@dataclass
class SimConfig:
    ebn0_db: list[float]
    algorithms: list[str] = dc_field(default_factory=lambda: ["llr-qspa"])
    subfields: list = dc_field(default_factory=lambda: ["original"])
    pcm_path: str | None = None
    field: str | None = None  # e.g. "2^4"; required with a binary alist or a random code
    poly: str | None = None
    code: dict | None = None  # {"n", "dv", "dc" or "rows", "seed", "label_seed"} random code
    frames: int = 1000
    target_errors: int = 100
    seed: int = 0
    max_iter: int = 50
    clip: float = 50.0
    scaling: dict = dc_field(default_factory=dict)  # setup name -> [delta, psi]
    code_class: str = "C1"
    ordering: str = "cyclic"
    rate: float | None = None
    encoder: str = "zero"  # or "random"
    chunk: int = 32
    workers: int | None = None
    output: str | None = None

    def __post_init__(self):
        self.ebn0_db = [float(x) for x in self.ebn0_db]
        if list(self.ebn0_db) != sorted(self.ebn0_db):
            raise ValueError("Eb/N0 grid must be sorted ascending")
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        if self.target_errors < 1:
            raise ValueError("target_errors must be >= 1")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")
        if self.encoder not in ("zero", "random"):
            raise ValueError("encoder must be 'zero' or 'random'")
        if self.pcm_path is None and self.code is None:
            raise ValueError("either pcm_path or code must be given")

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "SimConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"cannot read simulation config {path}: {exc}") from exc
        cfg = cls.from_dict(data)
        if cfg.pcm_path is not None and not os.path.isabs(cfg.pcm_path):
            cfg.pcm_path = str(Path(path).parent / cfg.pcm_path)
        return cfg

    def build_pcm(self) -> ParityCheckMatrix:
        fld = None
        if self.field is not None:
            p, r = parse_field_spec(self.field)
            fld = build_field(p, r, self.poly)
        if self.pcm_path is not None:
            try:
                pcm = load_pcm(self.pcm_path, fld)
            except OSError as exc:
                raise ValueError(f"cannot load PCM {self.pcm_path}: {exc}") from exc
            if pcm.field.q == 2 and fld is not None and fld.q > 2:
                pcm = random_relabel(pcm, fld, int((self.code or {}).get("label_seed", self.seed)))
            return pcm
        c = self.code
        if fld is None:
            raise ValueError("a random code needs a field")
        dc = c.get("dc")
        rows = c.get("rows")
        binary = random_regular_binary(int(c["n"]), int(c["dv"]), None if dc is None else int(dc),
                                       seed=int(c.get("seed", 0)), m=None if rows is None else int(rows))
        return random_relabel(binary, fld, int(c.get("label_seed", 1)))

    def setups(self) -> list[Setup]:
        out = []
        for alg in self.algorithms:
            for sf in self.subfields:
                m = None if sf in ("original", None) else int(sf)
                probe = Setup(alg, m)
                if probe.name in self.scaling:
                    delta, psi = self.scaling[probe.name]
                else:
                    delta, psi = recommended_scaling(alg, m, self.code_class)
                out.append(Setup(alg, m, float(delta), float(psi), self.ordering))
        return out


@dataclass
class FerRecord:
    setup: str
    ebn0_db: float
    frames: int
    frame_errors: int
    symbol_errors: int
    bit_errors: int
    fer: float
    ber: float
    mean_iters: float
    comp: float  # per-iteration operation counts (regular + variable + local)
    add: float
    mult: float
    lut: float
    converged_frames: int = 0

    def fer_interval(self, z: float = 1.96) -> tuple[float, float]:
        """Wilson score interval for the frame error rate."""
        n, k = self.frames, self.frame_errors
        if n == 0:
            return 0.0, 1.0
        p = k / n
        den = 1 + z * z / n
        c = (p + z * z / (2 * n)) / den
        h = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
        return max(0.0, c - h), min(1.0, c + h)

    def csv_row(self) -> list:
        return [self.setup, self.ebn0_db, self.frames, self.frame_errors, self.fer, self.ber, self.mean_iters,
                self.comp, self.add, self.mult, self.lut]


# -- frame processing ----------------------------------------------------------------


def frame_rng(seed: int, snr_index: int, frame: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(snr_index), int(frame)])


@dataclass
class _Chunk:
    errors: np.ndarray  # per-frame 0/1
    symbol_errors: np.ndarray
    bit_errors: np.ndarray
    iters: np.ndarray
    converged: np.ndarray
    counters: np.ndarray  # per-frame (4, 4) tables


class FrameRunner:
    """Holds the code, its expansions and decoders; runs frames for any setup."""

    def __init__(self, pcm: ParityCheckMatrix, setups: list[Setup], max_iter: int, clip: float = 50.0,
                 rate: float | None = None, encoder: str = "zero", backend: str | None = None):
        self.pcm = pcm
        self.field = pcm.field
        self.setups = list(setups)
        self.rate = rate if rate is not None else design_rate(pcm)
        self.encoder = encoder
        self.cache = generator_cache(pcm) if encoder == "random" else None
        graphs = {}
        self.decoders = []
        for s in self.setups:
            key = (s.m, s.ordering)
            if s.m is not None and key not in graphs:
                graphs[key] = expand(pcm, s.m, s.ordering)
            g = pcm if s.m is None else graphs[key]
            self.decoders.append(Decoder(g, s.decode_config(max_iter, clip), backend))
        self.bits = self.field.digits

    def codeword(self, rng: np.random.Generator) -> np.ndarray:
        if self.cache is None:
            return np.zeros(self.pcm.n_cols, dtype=np.int64)
        k = self.pcm.n_cols - self.cache.rank
        return encode(self.pcm, rng.integers(0, self.field.q, k), self.cache)

    def run(self, setup_index: int, ebn0_db: float, seed: int, snr_index: int, start: int, stop: int) -> _Chunk:
        dec = self.decoders[setup_index]
        n = stop - start
        out = _Chunk(np.zeros(n, np.int64), np.zeros(n, np.int64), np.zeros(n, np.int64), np.zeros(n, np.int64),
                     np.zeros(n, bool), np.zeros((n, 4, 4), np.int64))
        for i, f in enumerate(range(start, stop)):
            rng = frame_rng(seed, snr_index, f)
            x = self.codeword(rng)
            probs = bi_awgn_symbol_probs(x, self.field, ebn0_db, self.rate, rng)
            res = dec.decode(probs)
            wrong = res.decoded != x
            out.errors[i] = int(wrong.any())
            out.symbol_errors[i] = int(wrong.sum())
            out.bit_errors[i] = int((self.bits[res.decoded] != self.bits[x]).sum())
            out.iters[i] = res.iterations
            out.converged[i] = res.converged
            out.counters[i] = res.counters.table
        return out


def design_rate(pcm: ParityCheckMatrix) -> float:
    return 1.0 - pcm.n_rows / pcm.n_cols


def worker_count(requested: int | None = None) -> int:
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get(THREADS_ENV)
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


_RUNNER: FrameRunner | None = None


def _init_worker(args):
    global _RUNNER
    _RUNNER = FrameRunner(*args)


def _run_chunk(task):
    return _RUNNER.run(*task)


def _summarize(setup: Setup, ebn0: float, chunks: list[_Chunk], target: int, frames: int, n_symbols: int,
               bits_per_symbol: int) -> FerRecord:
    err = np.concatenate([c.errors for c in chunks])[:frames]
    stop = frames
    cum = np.cumsum(err)
    hit = np.flatnonzero(cum >= target)
    if len(hit):
        stop = int(hit[0]) + 1
    sl = slice(0, stop)
    sym = np.concatenate([c.symbol_errors for c in chunks])[sl]
    bit = np.concatenate([c.bit_errors for c in chunks])[sl]
    its = np.concatenate([c.iters for c in chunks])[sl]
    conv = np.concatenate([c.converged for c in chunks])[sl]
    tab = np.concatenate([c.counters for c in chunks])[sl].sum(axis=0)
    total_iters = int(its.sum())
    per_it = OpCounters(tab).totals()
    scale = 1.0 / total_iters if total_iters else 0.0
    fe = int(err[sl].sum())
    return FerRecord(
        setup=setup.name,
        ebn0_db=float(ebn0),
        frames=stop,
        frame_errors=fe,
        symbol_errors=int(sym.sum()),
        bit_errors=int(bit.sum()),
        fer=fe / stop,
        ber=float(bit.sum()) / (stop * n_symbols * bits_per_symbol),
        mean_iters=total_iters / stop,
        comp=per_it["comp"] * scale,
        add=per_it["add"] * scale,
        mult=per_it["mult"] * scale,
        lut=per_it["lut"] * scale,
        converged_frames=int(conv.sum()),
    )


def run_point(runner_args: tuple, setup_index: int, ebn0_db: float, snr_index: int, frames: int, target_errors: int,
              seed: int, chunk: int = 32, workers: int = 1, pool=None, runner: FrameRunner | None = None) -> FerRecord:
    """Simulate one (setup, SNR) point; deterministic for any ``workers``."""
    chunks: list[_Chunk] = []
    errors = 0
    next_frame = 0
    if runner is None and pool is None:
        runner = FrameRunner(*runner_args)
    while next_frame < frames and errors < target_errors:
        batch = []
        for _ in range(max(1, workers)):
            if next_frame >= frames:
                break
            stop = min(frames, next_frame + chunk)
            batch.append((setup_index, ebn0_db, seed, snr_index, next_frame, stop))
            next_frame = stop
        if pool is not None:
            results = list(pool.map(_run_chunk, batch))
        else:
            results = [runner.run(*t) for t in batch]
        for r in results:
            chunks.append(r)
            errors += int(r.errors.sum())
    pcm = runner_args[0]
    setup = runner_args[1][setup_index]
    return _summarize(setup, ebn0_db, chunks, target_errors, frames, pcm.n_cols, pcm.field.r)


def run_fer(config: SimConfig, backend: str | None = None, progress=None) -> list[FerRecord]:
    pcm = config.build_pcm()
    setups = config.setups()
    args = (pcm, setups, config.max_iter, config.clip, config.rate, config.encoder, backend)
    workers = worker_count(config.workers)
    records = []
    pool = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(args,)) if workers > 1 else None
    runner = None if pool is not None else FrameRunner(*args)
    try:
        for si, ebn0 in enumerate(config.ebn0_db):
            for k in range(len(setups)):
                rec = run_point(args, k, ebn0, si, config.frames, config.target_errors, config.seed, config.chunk,
                                workers, pool, runner)
                records.append(rec)
                if progress is not None:
                    progress(rec)
    finally:
        if pool is not None:
            pool.shutdown()
    if config.output:
        write_records(records, config.output)
    return records


# -- persistence ----------------------------------------------------------------------


def write_csv(records: list[FerRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow(r.csv_row())


def write_json(records: list[FerRecord], path) -> None:
    Path(path).write_text(json.dumps([asdict(r) for r in records], indent=2))


def write_records(records: list[FerRecord], path) -> None:
    """Write ``<path>`` as CSV (or JSON for a .json suffix) plus the other format alongside."""
    p = Path(path)
    if p.suffix == ".json":
        write_json(records, p)
        write_csv(records, p.with_suffix(".csv"))
    else:
        write_csv(records, p)
        write_json(records, p.with_suffix(".json"))


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# -- parameter sweep ----------------------------------------------------------------


def sweep_scaling(pcm: ParityCheckMatrix, algorithm: str, m: int, ebn0_db: float, deltas, psis, frames: int = 500,
                  target_errors: int = 50, seed: int = 0, max_iter: int = 50, ordering: str = "cyclic",
                  rate: float | None = None, backend: str | None = None) -> list[FerRecord]:
    """FER on a (delta, psi) grid at one SNR with common random numbers; sorted best first."""
    setups = [Setup(algorithm, m, float(d), float(p), ordering) for d in deltas for p in psis]
    args = (pcm, setups, max_iter, 50.0, rate, "zero", backend)
    runner = FrameRunner(*args)
    out = []
    for k, s in enumerate(setups):
        rec = run_point(args, k, ebn0_db, 0, frames, target_errors, seed, runner=runner)
        rec.setup = f"{s.name}:delta={s.delta:g},psi={s.psi:g}"
        out.append(rec)
    order = sorted(range(len(out)), key=lambda i: (out[i].fer, out[i].mean_iters))
    return [out[i] for i in order]
