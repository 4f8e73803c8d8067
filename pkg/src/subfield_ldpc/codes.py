"""Sparse non-binary parity-check matrices: NB-alist I/O, random relabeling, encoding, syndromes.

NB-alist dialect (zero-based)::

    # comment lines start with '#'
    n m
    max_col_degree max_row_degree
    col degrees (n integers)
    row degrees (m integers)
    one line per column: "row exponent row exponent ..."
    #local r1 r2 ...        (optional: rows that are local checks)

An entry ``row e`` stands for weight alpha**e.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .gf import FieldTable, build_field

REGULAR = 0
LOCAL = 1


class AlistFormatError(ValueError):
    def __init__(self, msg: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {msg}" if lineno is not None else msg)


class EncodeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ParityCheckMatrix:
    """CSR sparse PCM over a finite field; weights are nonzero element indices."""

    field: FieldTable
    n_cols: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    weights: np.ndarray
    check_type: np.ndarray = dc_field(default=None)

    def __post_init__(self):
        if self.check_type is None:
            object.__setattr__(self, "check_type", np.zeros(self.n_rows, dtype=np.int8))
        for a in (self.row_ptr, self.col_idx, self.weights, self.check_type):
            a.setflags(write=False)

    @classmethod
    def from_rows(
        cls,
        field: FieldTable,
        n_cols: int,
        rows: Sequence[Iterable[tuple[int, int]]],
        check_type: Sequence[int] | None = None,
    ) -> "ParityCheckMatrix":
        ptr = [0]
        cols: list[int] = []
        wts: list[int] = []
        for r, row in enumerate(rows):
            seen = set()
            for c, w in row:
                c, w = int(c), int(w)
                if not 0 <= c < n_cols:
                    raise ValueError(f"row {r}: column {c} out of range")
                if not 0 < w < field.q:
                    raise ValueError(f"row {r}: weight {w} is not a nonzero element")
                if c in seen:
                    raise ValueError(f"row {r}: duplicate column {c}")
                seen.add(c)
                cols.append(c)
                wts.append(w)
            ptr.append(len(cols))
        ct = None if check_type is None else np.asarray(check_type, dtype=np.int8)
        return cls(
            field=field,
            n_cols=int(n_cols),
            row_ptr=np.asarray(ptr, dtype=np.int64),
            col_idx=np.asarray(cols, dtype=np.int64),
            weights=np.asarray(wts, dtype=np.int64),
            check_type=ct,
        )

    @classmethod
    def from_dense(cls, field: FieldTable, H) -> "ParityCheckMatrix":
        H = np.asarray(H)
        rows = [[(c, H[r, c]) for c in np.flatnonzero(H[r])] for r in range(H.shape[0])]
        return cls.from_rows(field, H.shape[1], rows)

    @property
    def n_rows(self) -> int:
        return len(self.row_ptr) - 1

    @property
    def n_edges(self) -> int:
        return len(self.col_idx)

    def row(self, r: int) -> list[tuple[int, int]]:
        a, b = self.row_ptr[r], self.row_ptr[r + 1]
        return list(zip(self.col_idx[a:b].tolist(), self.weights[a:b].tolist()))

    @property
    def rows(self) -> list[list[tuple[int, int]]]:
        return [self.row(r) for r in range(self.n_rows)]

    @cached_property
    def row_of_edge(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_rows), np.diff(self.row_ptr))

    @property
    def row_degrees(self) -> np.ndarray:
        return np.diff(self.row_ptr)

    @property
    def col_degrees(self) -> np.ndarray:
        return np.bincount(self.col_idx, minlength=self.n_cols)

    def mean_row_degree(self, kind: int | None = None) -> float:
        d = self.row_degrees
        if kind is not None:
            d = d[self.check_type == kind]
        return float(d.mean()) if len(d) else 0.0

    def mean_col_degree(self) -> float:
        return float(self.col_degrees.mean()) if self.n_cols else 0.0

    def to_dense(self) -> np.ndarray:
        H = np.zeros((self.n_rows, self.n_cols), dtype=np.int64)
        H[self.row_of_edge, self.col_idx] = self.weights
        return H

    def same_as(self, other: "ParityCheckMatrix") -> bool:
        return (
            self.field == other.field
            and self.n_cols == other.n_cols
            and np.array_equal(self.row_ptr, other.row_ptr)
            and np.array_equal(self.col_idx, other.col_idx)
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.check_type, other.check_type)
        )


# -- file I/O --------------------------------------------------------------


def save_pcm(pcm: ParityCheckMatrix, path) -> None:
    Path(path).write_text(format_alist(pcm))


def format_alist(pcm: ParityCheckMatrix) -> str:
    F = pcm.field
    cols: list[list[tuple[int, int]]] = [[] for _ in range(pcm.n_cols)]
    for r in range(pcm.n_rows):
        for c, w in pcm.row(r):
            cols[c].append((r, w - 1))
    cdeg = [len(c) for c in cols]
    rdeg = pcm.row_degrees.tolist()
    lines = [
        f"# field {F.p}^{F.r} poly " + ",".join(str(c) for c in F.prim_poly),
        f"{pcm.n_cols} {pcm.n_rows}",
        f"{max(cdeg, default=0)} {max(rdeg, default=0)}",
        " ".join(map(str, cdeg)),
        " ".join(map(str, rdeg)),
    ]
    for c in cols:
        lines.append(" ".join(f"{r} {e}" for r, e in c))
    local = np.flatnonzero(pcm.check_type == LOCAL)
    if len(local):
        lines.append("#local " + " ".join(map(str, local.tolist())))
    return "\n".join(lines) + "\n"


def load_pcm(path, field: FieldTable | None = None) -> ParityCheckMatrix:
    return parse_alist(Path(path).read_text(), field)


def parse_alist(text: str, field: FieldTable | None = None) -> ParityCheckMatrix:
    """Parse the NB-alist dialect.  A ``# field p^r poly c0,c1,...`` comment selects the field when none is given."""
    body: list[tuple[int, list[int]]] = []
    local_rows: list[int] = []
    header_field = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s.startswith("#"):
            toks = s[1:].split()
            if toks and toks[0] == "local":
                try:
                    local_rows.extend(int(t) for t in toks[1:])
                except ValueError:
                    raise AlistFormatError("bad #local row index", lineno) from None
            elif toks and toks[0] == "field" and len(toks) >= 2:
                header_field = (toks[1], toks[3] if len(toks) >= 4 and toks[2] == "poly" else None, lineno)
            continue
        try:
            body.append((lineno, [int(t) for t in s.split()]))
        except ValueError:
            raise AlistFormatError(f"non-integer token in {s!r}", lineno) from None

    if field is None:
        if header_field is None:
            raise AlistFormatError("no field given and no '# field p^r' header")
        spec, poly, ln = header_field
        try:
            p, r = parse_field_spec(spec)
            field = build_field(p, r, [int(c) for c in poly.split(",")] if poly else None)
        except ValueError as exc:
            raise AlistFormatError(str(exc), ln) from None

    while body and not body[-1][1]:
        body.pop()
    while body and not body[0][1]:
        body.pop(0)
    if len(body) < 2:
        raise AlistFormatError("truncated header", body[-1][0] if body else None)
    body += [(body[-1][0], [])] * (4 - len(body))
    (ln0, nm) = body[0]
    if len(nm) != 2:
        raise AlistFormatError("expected 'n m'", ln0)
    n, m = nm
    if n < 0 or m < 0:
        raise AlistFormatError("negative dimensions", ln0)
    if len(body[1][1]) != 2:
        raise AlistFormatError("expected 'max_col_degree max_row_degree'", body[1][0])
    ln_c, cdeg = body[2]
    ln_r, rdeg = body[3]
    idx = 4
    if len(cdeg) != n:
        raise AlistFormatError(f"expected {n} column degrees, got {len(cdeg)}", ln_c)
    if len(rdeg) != m:
        raise AlistFormatError(f"expected {m} row degrees, got {len(rdeg)}", ln_r)
    rows: list[list[tuple[int, int]]] = [[] for _ in range(m)]
    seen: set[tuple[int, int]] = set()
    for c in range(n):
        if idx + c >= len(body):
            if cdeg[c] == 0:
                continue
            raise AlistFormatError(f"missing entries for column {c}", body[-1][0])
        ln, toks = body[idx + c]
        if len(toks) != 2 * cdeg[c]:
            raise AlistFormatError(f"column {c}: expected {cdeg[c]} (row, exponent) pairs", ln)
        for t in range(cdeg[c]):
            r, e = toks[2 * t], toks[2 * t + 1]
            if not 0 <= r < m:
                raise AlistFormatError(f"row index {r} out of range", ln)
            if not 0 <= e < field.q - 1:
                raise AlistFormatError(f"exponent {e} out of range for GF({field.q})", ln)
            if (r, c) in seen:
                raise AlistFormatError(f"duplicate entry ({r}, {c})", ln)
            seen.add((r, c))
            rows[r].append((c, 1 + e))
    extra = body[idx + n :]
    if extra and any(toks for _, toks in extra):
        raise AlistFormatError("unexpected trailing data", extra[0][0])
    for r in range(m):
        if len(rows[r]) != rdeg[r]:
            raise AlistFormatError(f"row {r}: degree {len(rows[r])} does not match header {rdeg[r]}", ln_r)
        rows[r].sort()
    ct = np.zeros(m, dtype=np.int8)
    for r in local_rows:
        if not 0 <= r < m:
            raise AlistFormatError(f"#local row {r} out of range")
        ct[r] = LOCAL
    return ParityCheckMatrix.from_rows(field, n, rows, ct)


def parse_field_spec(spec: str) -> tuple[int, int]:
    """'2^4' -> (2, 4); '16' -> (2, 4)."""
    s = spec.strip()
    if "^" in s:
        p, r = s.split("^")
        return int(p), int(r)
    q = int(s)
    for p in range(2, q + 1):
        if q % p == 0:
            r = 0
            while q % p == 0:
                q //= p
                r += 1
            if q != 1:
                raise ValueError(f"{spec} is not a prime power")
            return p, r
    raise ValueError(f"bad field spec {spec!r}")


# -- construction -----------------------------------------------------------


def random_regular_binary(n: int, dv: int, dc: int | None = None, seed: int = 0, max_tries: int = 200,
                          m: int | None = None) -> ParityCheckMatrix:
    """Column-weight-``dv`` binary PCM from a random socket permutation.

    Rows have weight ``dc`` (``n*dv`` must then be divisible by ``dc``), or, when
    ``m`` is given instead, the ``n*dv`` edges are spread over ``m`` rows with
    weights differing by at most one.  Double edges are repaired and 4-cycles
    broken by random edge swaps when possible; this is a plain random
    construction, not PEG.
    """
    E = n * dv
    if m is None:
        if dc is None or E % dc:
            raise ValueError("n*dv must be divisible by dc")
        m = E // dc
    if not 0 < m <= E:
        raise ValueError("invalid number of rows")
    row_w = np.full(m, E // m)
    row_w[: E % m] += 1
    if row_w.max() > n:
        raise ValueError("row weight exceeds the number of columns")
    rng = np.random.default_rng(seed)
    F2 = build_field(2, 1)
    cols = np.repeat(np.arange(n), dv)
    for _ in range(max_tries):
        sockets = np.repeat(np.arange(m), row_w)
        rng.shuffle(sockets)
        if not _repair_double_edges(cols, sockets, rng):
            continue
        row_sets = [set() for _ in range(m)]
        for c, r in zip(cols, sockets):
            row_sets[r].add(int(c))
        _break_four_cycles(row_sets, n, rng)
        rows = [[(c, 1) for c in sorted(s)] for s in row_sets]
        return ParityCheckMatrix.from_rows(F2, n, rows)
    raise RuntimeError("failed to build a simple regular graph")


def _repair_double_edges(cols: np.ndarray, sockets: np.ndarray, rng, rounds: int = 100000) -> bool:
    """Swap row sockets until no (column, row) pair repeats; returns success."""
    E = len(cols)
    seen: dict[tuple[int, int], int] = {}
    dup = []
    for e in range(E):
        key = (int(cols[e]), int(sockets[e]))
        if key in seen:
            dup.append(e)
        else:
            seen[key] = e
    for _ in range(rounds):
        if not dup:
            return True
        e = dup[-1]
        f = int(rng.integers(E))
        c1, r1, c2, r2 = int(cols[e]), int(sockets[e]), int(cols[f]), int(sockets[f])
        if r1 == r2 or (c1, r2) in seen or (c2, r1) in seen:
            continue
        if seen.get((c2, r2)) == f:
            del seen[(c2, r2)]
        else:
            continue  # f is itself a duplicate; pick another partner
        sockets[e], sockets[f] = r2, r1
        seen[(c1, r2)] = e
        seen[(c2, r1)] = f
        dup.pop()
    return not dup


def _break_four_cycles(row_sets: list[set], n: int, rng, rounds: int | None = None) -> None:
    """Greedy edge swaps that never increase the number of excess row overlaps."""
    m = len(row_sets)
    if m < 2:
        return
    col_rows: list[set] = [set() for _ in range(n)]
    for r, s in enumerate(row_sets):
        for c in s:
            col_rows[c].add(r)
    O = np.zeros((m, m), dtype=np.int64)
    for rs in col_rows:
        idx = np.fromiter(rs, dtype=np.int64)
        O[np.ix_(idx, idx)] += 1
    np.fill_diagonal(O, 0)

    def move(c, src, dst):
        col_rows[c].discard(src)
        others = np.fromiter(col_rows[c], dtype=np.int64)
        O[src, others] -= 1
        O[others, src] -= 1
        O[dst, others] += 1
        O[others, dst] += 1
        col_rows[c].add(dst)
        row_sets[src].discard(c)
        row_sets[dst].add(c)

    def cost(rows):
        sub = O[rows]
        return int(np.maximum(sub - 1, 0).sum())

    rounds = 200 * m if rounds is None else rounds
    bad = np.argwhere(np.triu(O > 1))
    for it in range(rounds):
        if it % 64 == 0:
            bad = np.argwhere(np.triu(O > 1))
        if len(bad) == 0:
            return
        r1, r2 = (int(x) for x in bad[rng.integers(len(bad))])
        if O[r1, r2] < 2:
            continue
        shared = list(row_sets[r1] & row_sets[r2])
        c1 = shared[rng.integers(len(shared))]
        r3 = int(rng.integers(m))
        if r3 in (r1, r2) or c1 in row_sets[r3]:
            continue
        cands = [c for c in row_sets[r3] if c not in row_sets[r1]]
        if not cands:
            continue
        c2 = cands[rng.integers(len(cands))]
        rows = [r1, r3]
        before = cost(rows)
        move(c1, r1, r3)
        move(c2, r3, r1)
        if cost(rows) > before:
            move(c2, r1, r3)
            move(c1, r3, r1)


def count_four_cycles(pcm: ParityCheckMatrix) -> int:
    """Number of row pairs sharing two or more columns."""
    B = (pcm.to_dense() != 0).astype(np.int64)
    O = B @ B.T
    return int(np.triu(O > 1, 1).sum())


def random_relabel(binary_pcm: ParityCheckMatrix, field: FieldTable, seed: int) -> ParityCheckMatrix:
    """Replace every 1 by an i.i.d. uniform nonzero element of ``field`` (row-major order)."""
    if binary_pcm.field.q != 2:
        raise ValueError("random_relabel expects a binary PCM")
    if field.q <= 2:
        raise ValueError("target field must have q > 2")
    rng = np.random.default_rng(seed)
    w = rng.integers(1, field.q, size=binary_pcm.n_edges)
    return ParityCheckMatrix(
        field=field,
        n_cols=binary_pcm.n_cols,
        row_ptr=binary_pcm.row_ptr.copy(),
        col_idx=binary_pcm.col_idx.copy(),
        weights=w.astype(np.int64),
        check_type=binary_pcm.check_type.copy(),
    )


# -- linear algebra -----------------------------------------------------------


def syndrome(pcm: ParityCheckMatrix, word) -> np.ndarray:
    """Per-row sums of weight * symbol over the field (batched over leading axes)."""
    F = pcm.field
    word = np.asarray(word, dtype=np.int64)
    out = np.zeros(word.shape[:-1] + (pcm.n_rows,), dtype=np.int64)
    if pcm.n_edges == 0:
        return out
    prod = F.mul(pcm.weights, word[..., pcm.col_idx])
    nonempty = np.flatnonzero(np.diff(pcm.row_ptr) > 0)
    starts = pcm.row_ptr[nonempty]
    if F.p == 2:
        v = F.idx_to_vec[prod]
        acc = np.bitwise_xor.reduceat(v, starts, axis=-1)
    else:
        digits = F.digits[prod]  # (..., E, r)
        acc_d = np.add.reduceat(digits, starts, axis=-2) % F.p
        acc = (acc_d * F.p ** np.arange(F.r)).sum(axis=-1)
    out[..., nonempty] = F.vec_to_idx[acc]
    return out


def is_codeword(pcm: ParityCheckMatrix, word) -> bool:
    return not np.any(syndrome(pcm, word))


@dataclass
class GeneratorCache:
    """Reduced row-echelon form of H used for systematic encoding."""

    pivots: np.ndarray
    free: np.ndarray
    rref: np.ndarray  # (rank, n) dense in element indices
    rank: int


def _rref(F: FieldTable, H: np.ndarray) -> tuple[np.ndarray, list[int]]:
    A = np.array(H, dtype=np.int64)
    m, n = A.shape
    pivots: list[int] = []
    row = 0
    for c in range(n):
        if row >= m:
            break
        nz = np.flatnonzero(A[row:, c])
        if len(nz) == 0:
            continue
        p = row + int(nz[0])
        if p != row:
            A[[row, p]] = A[[p, row]]
        A[row] = F.mul(A[row], F.inv(int(A[row, c])))
        others = np.flatnonzero(A[:, c])
        for o in others:
            if o != row:
                A[o] = F.sub(A[o], F.mul(int(A[o, c]), A[row]))
        pivots.append(c)
        row += 1
    return A[:row], pivots


def rank(pcm: ParityCheckMatrix) -> int:
    return len(_rref(pcm.field, pcm.to_dense())[1])


def generator_cache(pcm: ParityCheckMatrix) -> GeneratorCache:
    R, piv = _rref(pcm.field, pcm.to_dense())
    free = np.array([c for c in range(pcm.n_cols) if c not in set(piv)], dtype=np.int64)
    return GeneratorCache(pivots=np.array(piv, dtype=np.int64), free=free, rref=R, rank=len(piv))


def encode(pcm: ParityCheckMatrix, message, cache: GeneratorCache | None = None) -> np.ndarray:
    """Systematic encoding: message symbols go to the non-pivot columns of rref(H)."""
    if cache is None:
        cache = generator_cache(pcm)
    if cache.rank < pcm.n_rows:
        raise EncodeError(f"PCM is rank deficient ({cache.rank} < {pcm.n_rows})")
    F = pcm.field
    message = np.asarray(message, dtype=np.int64)
    if message.shape[-1] != len(cache.free):
        raise EncodeError(f"message length {message.shape[-1]} != k = {len(cache.free)}")
    word = np.zeros(message.shape[:-1] + (pcm.n_cols,), dtype=np.int64)
    word[..., cache.free] = message
    for i, c in enumerate(cache.pivots):
        acc = np.zeros(message.shape[:-1], dtype=np.int64)
        coeffs = cache.rref[i, cache.free]
        for t in np.flatnonzero(coeffs):
            acc = F.add(acc, F.mul(int(coeffs[t]), message[..., t]))
        word[..., c] = F.neg(acc)
    return word
