"""Quotient-group family of F_{p^r} over a subfield, alternate representations, local code.

Every quotient group is described by one exponent ``e_j``: its coset labels are
``label_j(g) = psi*(alpha**e_j * g)``, so its trivial coset is
``alpha**(-e_j) * ker(psi*)``.  Two orderings are provided:

``cyclic``
    ``e_j = -j``, i.e. ``label_j(g) = psi*(alpha**-j * g)``.  The edge rule then
    has the closed form ``j = (i + k) mod E_f``.
``systematic``
    coordinates are the points of the projective space over F_{p^m}, unit
    vectors first, so the first r/m positions are the raw coefficients of the
    extension representation and the local PCM comes out in ``[P | I]`` form.
    For GF(16) over GF(4) with x^4+x+1 this gives the classic Q_0..Q_4 layout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from .gf import ExtensionRep, FieldTable, psi_star

ORDERINGS = ("cyclic", "systematic")


@dataclass(frozen=True, eq=False)
class CosetLattice:
    rep: ExtensionRep
    ordering: str
    exponents: np.ndarray = dc_field(repr=False)  # e_j in [0, q-1)
    labels: np.ndarray = dc_field(repr=False)  # (q, E_f) subfield indices
    rule_j: np.ndarray = dc_field(repr=False)  # (E_f, q-1)
    rule_lambda: np.ndarray = dc_field(repr=False)  # (E_f, q-1) subfield indices

    @property
    def field(self) -> FieldTable:
        return self.rep.field

    @property
    def subfield(self) -> FieldTable:
        return self.rep.subfield

    @property
    def E_f(self) -> int:
        return len(self.exponents)

    @property
    def n_info(self) -> int:
        """Dimension of the local code, r/m."""
        return self.rep.degree

    @property
    def beta_index(self) -> int:
        return self.rep.beta_index

    @cached_property
    def coset_members(self) -> list[list[np.ndarray]]:
        """``coset_members[i][j]``: big-field indices of coset C^j_i, ascending."""
        qm = self.subfield.q
        return [[np.flatnonzero(self.labels[:, i] == j) for j in range(qm)] for i in range(self.E_f)]

    def kernel(self, i: int) -> np.ndarray:
        return self.coset_members[i][0]

    @cached_property
    def generator(self) -> np.ndarray:
        """(r/m, E_f) generator of the alternate-representation code.

        Column j holds ``psi*(alpha**e_j * alpha**t)`` for t < r/m, so that
        ``alt_rep(g) = coeffs(g) @ generator`` when the basis is {1, alpha, ...}.
        Rows are the images of the basis elements 1, alpha, ... .
        """
        F = self.field
        rows = [self.labels[F.elem(t)] for t in range(self.n_info)]
        return np.array(rows, dtype=np.int64)


def alt_rep(lattice: CosetLattice, g):
    """Vector of coset labels of g, one per quotient group."""
    return lattice.labels[g]


def _functional_vectors(rep: ExtensionRep) -> dict[tuple[int, ...], int]:
    """Map each nonzero row vector w in F_{p^m}^n to the exponent e with psi*(alpha^e * .) = w . coeffs."""
    F = rep.field
    n = rep.degree
    theta_pows = [F.pow(rep.theta, t) for t in range(n)]
    out: dict[tuple[int, ...], int] = {}
    for e in range(F.q - 1):
        mu = F.elem(e)
        w = tuple(int(psi_star(rep, F.mul(mu, tp))) for tp in theta_pows)
        out[w] = e
    return out


def _normalize_point(sub: FieldTable, w: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Scale w so its first nonzero coordinate is 1; return (point, scale) with w = scale * point."""
    lead = next(x for x in w if x)
    inv = sub.inv(lead)
    return tuple(int(sub.mul(x, inv)) for x in w), int(lead)


def _systematic_exponents(rep: ExtensionRep) -> np.ndarray:
    sub = rep.subfield
    n = rep.degree
    vecs = _functional_vectors(rep)
    units = [tuple(1 if t == s else 0 for t in range(n)) for s in range(n)]
    rest = []
    for w in itertools.product(range(sub.q), repeat=n):
        if sum(1 for x in w if x) < 2:
            continue
        pt, _ = _normalize_point(sub, w)
        if pt == w:
            rest.append(w)
    rest.sort()
    return np.array([vecs[w] for w in units + rest], dtype=np.int64)


def build_lattice(rep: ExtensionRep, ordering: str = "cyclic", verify: bool | None = None) -> CosetLattice:
    """Build the E_f = (p^r-1)/(p^m-1) quotient groups with their labels and edge rule.

    The edge rule is checked exhaustively against the labels when ``verify`` is
    true (default for q <= 256).
    """
    if ordering not in ORDERINGS:
        raise ValueError(f"ordering must be one of {ORDERINGS}")
    F = rep.field
    q = F.q
    qm = rep.subfield.q
    e_f = (q - 1) // (qm - 1)

    if ordering == "cyclic":
        exps = (-np.arange(e_f)) % (q - 1)
    else:
        exps = _systematic_exponents(rep)
    if len(exps) != e_f or len(set((exps % e_f).tolist())) != e_f:
        raise RuntimeError("quotient exponents do not give distinct kernels")

    g = np.arange(q)
    labels = np.empty((q, e_f), dtype=np.int64)
    for j, e in enumerate(exps):
        labels[:, j] = psi_star(rep, F.mul(F.elem(int(e)), g))

    # edge rule: alpha^k applied to quotient i lands in quotient j with scale lambda
    pos = np.empty(e_f, dtype=np.int64)
    pos[exps % e_f] = np.arange(e_f)
    k = np.arange(q - 1)
    target = (exps[:, None] - k[None, :]) % (q - 1)  # e_j must equal e_i - k mod E_f
    rule_j = pos[target % e_f]
    shift = (exps[rule_j] + k[None, :] - exps[:, None]) % (q - 1)
    # shift is a multiple of E_f: lambda = alpha^shift = beta^(shift / E_f)
    rule_lambda = 1 + (shift // e_f) % (qm - 1)

    for arr in (exps, labels, rule_j, rule_lambda):
        arr.setflags(write=False)
    lat = CosetLattice(rep=rep, ordering=ordering, exponents=exps, labels=labels, rule_j=rule_j, rule_lambda=rule_lambda)
    if verify is None:
        verify = q <= 256
    if verify:
        verify_edge_rule(lat)
    return lat


def edge_rule(lattice: CosetLattice, i: int, k: int) -> tuple[int, int]:
    """(j, lambda): psi*_j(alpha^k g) = lambda * psi*_i(g) for every g."""
    return int(lattice.rule_j[i, k % (lattice.field.q - 1)]), int(lattice.rule_lambda[i, k % (lattice.field.q - 1)])


def inverse_edge_rule(lattice: CosetLattice, j: int, k: int) -> tuple[int, int]:
    """Quotient i on the variable side feeding check-side quotient j through alpha^k, with its label."""
    k %= lattice.field.q - 1
    i = int(np.flatnonzero(lattice.rule_j[:, k] == j)[0])
    return i, int(lattice.rule_lambda[i, k])


def verify_edge_rule(lattice: CosetLattice) -> None:
    F = lattice.field
    S = lattice.subfield
    g = np.arange(F.q)
    L = lattice.labels
    for k in range(F.q - 1):
        moved = L[F.mul(F.elem(k), g)]  # (q, E_f) labels of alpha^k g
        lhs = moved[:, lattice.rule_j[:, k]]
        rhs = S.mul(lattice.rule_lambda[:, k][None, :], L)
        if not np.array_equal(lhs, rhs):
            raise AssertionError(f"edge rule fails for k={k}")


# -- local code -------------------------------------------------------------


def _rank_insert(basis: list[tuple[int, np.ndarray]], row: np.ndarray, S: FieldTable) -> bool:
    """Reduce ``row`` against an echelon basis; append and return True if independent."""
    v = row.copy()
    for piv, b in basis:
        if v[piv]:
            v = S.sub(v, S.mul(v[piv], b))
    nz = np.flatnonzero(v)
    if len(nz) == 0:
        return False
    piv = int(nz[0])
    v = S.mul(v, S.inv(int(v[piv])))
    # keep basis reduced at the new pivot so later reductions stay simple
    for idx, (p2, b) in enumerate(basis):
        if b[piv]:
            basis[idx] = (p2, S.sub(b, S.mul(b[piv], v)))
    basis.append((piv, np.asarray(v)))
    return True


def _weight3_candidates(lattice: CosetLattice):
    """Weight-3 dual codewords in lexicographic order of their support.

    Three columns are dependent exactly when their generator columns are
    collinear points; the coefficients are unique up to scale and normalised
    so the first one is 1.
    """
    S = lattice.subfield
    G = lattice.generator  # (n, E_f)
    e_f = lattice.E_f
    cols = [tuple(int(x) for x in G[:, j]) for j in range(e_f)]
    point_of: dict[tuple[int, ...], tuple[int, int]] = {}
    for j, c in enumerate(cols):
        pt, scale = _normalize_point(S, c)
        point_of[pt] = (j, scale)
    seen = set()
    for j1 in range(e_f):
        w1 = np.array(cols[j1])
        for j2 in range(j1 + 1, e_f):
            w2 = np.array(cols[j2])
            for a in range(1, S.q):
                comb = tuple(int(x) for x in S.add(w1, S.mul(a, w2)))
                if not any(comb):
                    continue
                pt, s = _normalize_point(S, comb)
                j3, s3 = point_of[pt]
                if j3 in (j1, j2):
                    continue
                # w1 + a w2 = s * pt and col j3 = s3 * pt, so w1 + a w2 - (s/s3) col_j3 = 0
                h = np.zeros(e_f, dtype=np.int64)
                h[j1] = 1
                h[j2] = a
                h[j3] = S.neg(S.div(s, s3))
                key = tuple(h.tolist())
                if key in seen:
                    continue
                seen.add(key)
                yield tuple(sorted((j1, j2, j3))), h


@dataclass(frozen=True, eq=False)
class LocalCode:
    lattice: CosetLattice
    pcm: np.ndarray  # (E_f - r/m, E_f) subfield indices
    info_set: tuple[int, ...]
    gen_map: np.ndarray = dc_field(repr=False)  # flat info-value code -> big field index

    @property
    def L_f(self) -> int:
        return self.pcm.shape[0]

    @property
    def parity_set(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.lattice.E_f) if j not in self.info_set)

    def info_code(self, values) -> np.ndarray:
        """Flatten subfield values on the info set into a gen_map index."""
        values = np.asarray(values)
        qm = self.lattice.subfield.q
        w = qm ** np.arange(values.shape[-1])
        return values @ w


def _singular_four_cycle(h: np.ndarray, rows: list[np.ndarray], S: FieldTable) -> bool:
    sup = set(np.flatnonzero(h).tolist())
    for g in rows:
        shared = sorted(sup & set(np.flatnonzero(g).tolist()))
        for a, b in itertools.combinations(shared, 2):
            if S.mul(h[a], g[b]) == S.mul(h[b], g[a]):
                return True
    return False


def build_local_code(lattice: CosetLattice) -> LocalCode:
    """Local PCM built from weight-3 dual codewords, chosen greedily in lexicographic order.

    A first pass skips rows that would close a 4-cycle whose 2x2 submatrix is
    singular; a second pass fills any remaining rank without that filter.
    """
    S = lattice.subfield
    F = lattice.field
    e_f = lattice.E_f
    n = lattice.n_info

    # info set: lexicographically smallest independent columns of the generator
    G = lattice.generator
    info: list[int] = []
    basis: list[tuple[int, np.ndarray]] = []
    for j in range(e_f):
        if len(info) == n:
            break
        if _rank_insert(basis, G[:, j].copy(), S):
            info.append(j)
    info_set = tuple(info)

    target = e_f - n
    rows: list[np.ndarray] = []
    if target > 0:
        rbasis: list[tuple[int, np.ndarray]] = []
        cands = list(_weight3_candidates(lattice))
        for strict in (True, False):
            for _, h in cands:
                if len(rows) == target:
                    break
                if strict and _singular_four_cycle(h, rows, S):
                    continue
                if _rank_insert(rbasis, h, S):
                    rows.append(h)
        if len(rows) != target:
            raise RuntimeError("could not complete local PCM from weight-3 rows")
    pcm = np.array(rows, dtype=np.int64).reshape(target, e_f)

    # gen_map: info values -> element
    L = lattice.labels[:, list(info_set)]
    w = S.q ** np.arange(n)
    code = L @ w
    gen_map = np.full(F.q, -1, dtype=np.int64)
    gen_map[code] = np.arange(F.q)
    if np.any(gen_map < 0):
        raise RuntimeError("info set does not determine the symbol")
    pcm.setflags(write=False)
    gen_map.setflags(write=False)
    return LocalCode(lattice=lattice, pcm=pcm, info_set=info_set, gen_map=gen_map)


def recover_symbol(local: LocalCode, info_values):
    """Big-field element whose alternate representation agrees with ``info_values`` on the info set."""
    out = local.gen_map[local.info_code(info_values)]
    return int(out) if np.ndim(out) == 0 else out


def local_syndrome(local: LocalCode, vec) -> np.ndarray:
    """PCM times an alternate-representation vector (or a stack of them)."""
    S = local.lattice.subfield
    vec = np.atleast_2d(np.asarray(vec))
    out = np.zeros((vec.shape[0], local.L_f), dtype=np.int64)
    for r in range(local.L_f):
        acc = np.zeros(vec.shape[0], dtype=np.int64)
        for j in np.flatnonzero(local.pcm[r]):
            acc = S.add(acc, S.mul(local.pcm[r, j], vec[:, j]))
        out[:, r] = acc
    return out
