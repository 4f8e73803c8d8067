"""Finite field arithmetic for F_{p^r}, its subfields and the extension representation.

Elements are plain integers using the *index* convention: ``0`` is the additive
zero and ``k >= 1`` stands for ``alpha**(k-1)``.  Every arithmetic method accepts
Python ints or numpy integer arrays.

Internally each element also has a *vector* form: the base-p digits of its
polynomial-basis coordinates packed into one integer (bit vector when p == 2),
which makes addition a digit-wise sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Sequence

import numpy as np

MAX_FIELD_ORDER = 1 << 16


class FieldConstructionError(ValueError):
    """Raised when a field or extension cannot be built from the given polynomial."""


class SubfieldError(ValueError):
    """Raised when m does not divide r."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _poly_str(coeffs: Sequence[int]) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
        if c != 1 and i > 0:
            mono = f"{c}{mono}"
        elif c != 1:
            mono = str(c)
        terms.append(mono)
    return "+".join(terms) if terms else "0"


def _polymod_p(a: list[int], b: list[int], p: int) -> list[int]:
    """Remainder of a / b over F_p (coefficient lists, constant first)."""
    a = list(a)
    db = len(b) - 1
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) - 1 >= db and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        coef = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - db
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * bc) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    coeffs = list(coeffs)
    r = len(coeffs) - 1
    if r < 1:
        return False
    if r == 1:
        return True
    if coeffs[0] == 0:
        return False
    for d in range(1, r // 2 + 1):
        for code in range(p**d):
            trial = [(code // p**i) % p for i in range(d)] + [1]
            if not _polymod_p(coeffs, trial, p):
                return False
    return True


def _lfsr_powers(coeffs: Sequence[int], p: int) -> list[int] | None:
    """Vector forms of x^0 .. x^(q-2) modulo a monic polynomial, or None if x is not primitive."""
    r = len(coeffs) - 1
    q = p**r
    if p == 2:
        mask = 0
        for i, c in enumerate(coeffs[:r]):
            if c:
                mask |= 1 << i
        top = 1 << r
        out = [1]
        v = 1
        for _ in range(q - 2):
            v <<= 1
            if v & top:
                v ^= top | mask
            if v == 1:
                return None
            out.append(v)
        v <<= 1
        if v & top:
            v ^= top | mask
        return out if v == 1 else None

    pw = [p**i for i in range(r)]
    neg = [(-c) % p for c in coeffs[:r]]
    digits = [1] + [0] * (r - 1)
    out = [1]
    for k in range(q - 1):
        carry = digits[-1]
        digits = [0] + digits[:-1]
        if carry:
            digits = [(d + carry * n) % p for d, n in zip(digits, neg)]
        v = sum(d * w for d, w in zip(digits, pw))
        if k == q - 2:
            return out if v == 1 else None
        if v == 1:
            return None
        out.append(v)
    return None


def default_primitive_poly(p: int, r: int) -> tuple[int, ...]:
    """Smallest monic primitive polynomial of degree r, ordered by sum(c_i * p**i)."""
    if r == 1 and p == 2:
        return (1, 1)
    for code in range(p**r):
        coeffs = [(code // p**i) % p for i in range(r)] + [1]
        if coeffs[0] == 0:
            continue
        if _lfsr_powers(coeffs, p) is not None:
            return tuple(coeffs)
    raise FieldConstructionError(f"no primitive polynomial of degree {r} over F_{p}")


@dataclass(frozen=True, eq=False)
class FieldTable:
    """Log/antilog tables of F_{p^r}.

    ``exp_vec[k]`` is the vector form of alpha**k and ``vec_to_idx`` maps a vector
    form back to the element index.
    """

    p: int
    r: int
    prim_poly: tuple[int, ...]
    exp_vec: np.ndarray = dc_field(repr=False)
    vec_to_idx: np.ndarray = dc_field(repr=False)

    @property
    def q(self) -> int:
        return self.p**self.r

    @property
    def order(self) -> int:
        return self.q

    def __repr__(self) -> str:
        return f"FieldTable(GF({self.p}^{self.r}), prim_poly={_poly_str(self.prim_poly)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldTable):
            return NotImplemented
        return (self.p, self.r, self.prim_poly) == (other.p, other.r, other.prim_poly)

    def __hash__(self) -> int:
        return hash((self.p, self.r, self.prim_poly))

    @cached_property
    def idx_to_vec(self) -> np.ndarray:
        out = np.zeros(self.q, dtype=np.int64)
        out[1:] = self.exp_vec
        return out

    @cached_property
    def digits(self) -> np.ndarray:
        """(q, r) base-p coordinates of each element, indexed by element index."""
        v = self.idx_to_vec
        return np.stack([(v // self.p**i) % self.p for i in range(self.r)], axis=1)

    @cached_property
    def _pw(self) -> np.ndarray:
        return np.array([self.p**i for i in range(self.r)], dtype=np.int64)

    # -- element conversions -------------------------------------------------
    def elem(self, k: int) -> int:
        """Index of alpha**k."""
        return 1 + (k % (self.q - 1))

    def log(self, a):
        """Discrete log of a nonzero element."""
        a = np.asarray(a)
        if np.any(a == 0):
            raise ValueError("zero has no discrete logarithm")
        out = a - 1
        return int(out) if out.ndim == 0 else out

    def to_vec(self, a):
        return self.idx_to_vec[a]

    def from_vec(self, v):
        return self.vec_to_idx[v]

    # -- arithmetic ----------------------------------------------------------
    def add(self, a, b):
        va, vb = self.idx_to_vec[a], self.idx_to_vec[b]
        if self.p == 2:
            return self.vec_to_idx[va ^ vb]
        da = self.digits[a]
        db = self.digits[b]
        return self.vec_to_idx[((da + db) % self.p) @ self._pw]

    def neg(self, a):
        if self.p == 2:
            return a
        return self.vec_to_idx[((-self.digits[a]) % self.p) @ self._pw]

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = np.where((a == 0) | (b == 0), 0, 1 + (a + b - 2) % (self.q - 1))
        return int(out) if out.ndim == 0 else out

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no inverse")
        out = 1 + (-(a - 1)) % (self.q - 1)
        return int(out) if out.ndim == 0 else out

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n: int):
        a = np.asarray(a, dtype=np.int64)
        if n == 0:
            out = np.ones_like(a)
        else:
            out = np.where(a == 0, 0, 1 + ((a - 1) * n) % (self.q - 1))
        return int(out) if out.ndim == 0 else out

    @cached_property
    def add_table(self) -> np.ndarray:
        if self.q > 4096:
            raise ValueError("addition table only materialised for q <= 4096")
        idx = np.arange(self.q)
        return np.asarray(self.add(idx[:, None], idx[None, :]), dtype=np.int64)

    @cached_property
    def mul_table(self) -> np.ndarray:
        if self.q > 4096:
            raise ValueError("multiplication table only materialised for q <= 4096")
        idx = np.arange(self.q)
        return np.asarray(self.mul(idx[:, None], idx[None, :]), dtype=np.int64)

    def sum(self, values) -> int:
        acc = 0
        for v in np.asarray(values).ravel():
            acc = self.add(acc, int(v))
        return int(acc)

    def fmt(self, a: int, name: str = "a") -> str:
        a = int(a)
        if a == 0:
            return "0"
        if a == 1:
            return "1"
        k = a - 1
        return name if k == 1 else f"{name}^{k}"


def build_field(p: int, r: int, prim_poly: Sequence[int] | int | None = None) -> FieldTable:
    """Build F_{p^r}.

    ``prim_poly`` is a coefficient list (constant term first) or, for p == 2, an
    integer bitmask such as ``0b10011`` for x^4+x+1.
    """
    if not _is_prime(p):
        raise FieldConstructionError(f"characteristic {p} is not prime")
    if r < 1:
        raise FieldConstructionError("extension degree must be >= 1")
    if p**r > MAX_FIELD_ORDER:
        raise FieldConstructionError(f"field order {p}^{r} exceeds {MAX_FIELD_ORDER}")

    if prim_poly is None:
        coeffs = default_primitive_poly(p, r)
    else:
        coeffs = parse_poly(prim_poly, p)
        if len(coeffs) - 1 != r:
            raise FieldConstructionError(
                f"polynomial {_poly_str(coeffs)} has degree {len(coeffs) - 1}, expected {r}"
            )
        if coeffs[-1] != 1:
            raise FieldConstructionError(f"polynomial {_poly_str(coeffs)} is not monic")

    if p == 2 and r == 1:
        # x+1 has root 1, which is the generator of F_2^*
        exp_vec = np.array([1], dtype=np.int64)
    else:
        powers = _lfsr_powers(coeffs, p)
        if powers is None:
            if not is_irreducible(coeffs, p):
                raise FieldConstructionError(f"polynomial {_poly_str(coeffs)} is reducible over F_{p}")
            raise FieldConstructionError(
                f"polynomial {_poly_str(coeffs)} is irreducible but not primitive over F_{p}"
            )
        exp_vec = np.array(powers, dtype=np.int64)

    q = p**r
    vec_to_idx = np.zeros(q, dtype=np.int64)
    vec_to_idx[exp_vec] = np.arange(1, q)
    exp_vec.setflags(write=False)
    vec_to_idx.setflags(write=False)
    return FieldTable(p=p, r=r, prim_poly=tuple(int(c) for c in coeffs), exp_vec=exp_vec, vec_to_idx=vec_to_idx)


def parse_poly(spec, p: int = 2) -> tuple[int, ...]:
    """Accept a coefficient sequence, a p == 2 bitmask int, or a CLI string.

    Strings are either comma-separated coefficients (constant term first) or a
    hex bitmask like ``0x13``.
    """
    if isinstance(spec, str):
        s = spec.strip()
        if s.lower().startswith("0x"):
            spec = int(s, 16)
        else:
            spec = [int(t) for t in s.split(",") if t.strip()]
    if isinstance(spec, (int, np.integer)):
        if p != 2:
            raise FieldConstructionError("integer bitmask polynomials are only defined for p = 2")
        v = int(spec)
        if v <= 0:
            raise FieldConstructionError("empty polynomial")
        return tuple((v >> i) & 1 for i in range(v.bit_length()))
    coeffs = [int(c) % p for c in spec]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def subfield_beta(field: FieldTable, m: int) -> int:
    """Index of beta = alpha**((p^r-1)/(p^m-1)), the generator of F_{p^m}^*."""
    if m < 1 or field.r % m:
        raise SubfieldError(f"m={m} does not divide r={field.r}")
    e_f = (field.q - 1) // (field.p**m - 1)
    return field.elem(e_f)


def subfield_elements(field: FieldTable, m: int) -> np.ndarray:
    """Big-field indices of the subfield, ordered by subfield index (0, 1, beta, beta^2, ...)."""
    beta = subfield_beta(field, m)
    qm = field.p**m
    return np.array([0] + [field.pow(beta, j) for j in range(qm - 1)], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class ExtensionRep:
    """F_{p^r} written as polynomials of degree < r/m over F_{p^m}.

    ``coeffs[g, t]`` is the subfield index of the coefficient of x^t in E_g(x),
    with x mapped to ``theta`` (a root of ``Pi``).  ``subfield`` carries the
    arithmetic of F_{p^m} in its own index convention (k -> beta**(k-1)).
    """

    field: FieldTable
    m: int
    Pi: tuple[int, ...]
    coeffs: np.ndarray = dc_field(repr=False)
    beta_index: int = 0
    theta: int = 0
    subfield: FieldTable | None = None
    sub_to_big: np.ndarray = dc_field(default=None, repr=False)
    big_to_sub: np.ndarray = dc_field(default=None, repr=False)

    @property
    def degree(self) -> int:
        """Number of coefficients per element, r/m."""
        return self.field.r // self.m

    def embed(self, s):
        """Subfield index -> big field index."""
        return self.sub_to_big[s]

    def restrict(self, g):
        """Big field index of a subfield element -> subfield index (-1 if not in subfield)."""
        return self.big_to_sub[g]


def _subfield_maps(field: FieldTable, m: int) -> tuple[np.ndarray, np.ndarray]:
    sub_to_big = subfield_elements(field, m)
    big_to_sub = np.full(field.q, -1, dtype=np.int64)
    big_to_sub[sub_to_big] = np.arange(len(sub_to_big))
    return sub_to_big, big_to_sub


def _big_poly_mul(field: FieldTable, a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = field.add(out[i + j], field.mul(x, y))
    return [int(c) for c in out]


def _big_poly_eval(field: FieldTable, coeffs: Sequence[int], x):
    acc = np.zeros_like(np.asarray(x))
    for c in reversed(coeffs):
        acc = field.add(field.mul(acc, x), c)
    return acc


def minimal_polynomial(field: FieldTable, g: int, m: int) -> list[int]:
    """Minimal polynomial of g over F_{p^m}, coefficients as big-field indices (constant first)."""
    qm = field.p**m
    conj = []
    y = g
    while y not in conj:
        conj.append(y)
        y = field.pow(y, qm)
    poly = [1]
    for c in conj:
        poly = _big_poly_mul(field, poly, [int(field.neg(c)), 1])
    return poly


def subfield_table(field: FieldTable, m: int) -> FieldTable:
    """FieldTable of F_{p^m} whose primitive element is beta, so indices agree with the embedding."""
    if m == field.r:
        return field
    beta = subfield_beta(field, m)
    mp = minimal_polynomial(field, beta, 1)
    # coefficients lie in the prime field F_p = {0} u <alpha^((q-1)/(p-1))>
    prime = subfield_elements(field, 1)
    lookup = {int(b): i for i, b in enumerate(prime)}
    # prime-field index k -> integer value: element beta_1^(k-1) where beta_1 generates F_p^*
    # Recover integer values by repeated addition of 1.
    values = {0: 0}
    acc = 0
    for n in range(1, field.p):
        acc = field.add(acc, 1)
        values[int(acc)] = n
    coeffs = []
    for c in mp:
        if int(c) not in lookup:
            raise FieldConstructionError("minimal polynomial of beta not over the prime field")
        coeffs.append(values[int(c)])
    return build_field(field.p, m, coeffs)


def build_extension_rep(field: FieldTable, m: int, Pi: Sequence[int] | None = None) -> ExtensionRep:
    """Polynomial representation of F_{p^r} over F_{p^m}.

    ``Pi`` holds subfield indices (constant term first).  When omitted it is the
    minimal polynomial of alpha over F_{p^m}, so x <-> alpha and the basis is
    {1, alpha, ..., alpha^(r/m - 1)}.
    """
    if m < 1 or field.r % m:
        raise SubfieldError(f"m={m} does not divide r={field.r}")
    n = field.r // m
    beta = subfield_beta(field, m)
    sub = subfield_table(field, m)
    sub_to_big, big_to_sub = _subfield_maps(field, m)

    if Pi is None:
        big = minimal_polynomial(field, field.elem(1), m)
        Pi_t = tuple(int(big_to_sub[c]) for c in big)
        theta = field.elem(1)
    else:
        Pi_t = tuple(int(c) for c in Pi)
        while len(Pi_t) > 1 and Pi_t[-1] == 0:
            Pi_t = Pi_t[:-1]
        if any(c < 0 or c >= sub.q for c in Pi_t):
            raise FieldConstructionError("Pi coefficient outside the subfield")
        if len(Pi_t) - 1 != n:
            raise FieldConstructionError(f"Pi has degree {len(Pi_t) - 1}, expected r/m = {n}")
        if Pi_t[0] == 0:
            raise FieldConstructionError("Pi has a zero constant term")
        if Pi_t[-1] != 1:
            raise FieldConstructionError("Pi must be monic")
        big = [int(sub_to_big[c]) for c in Pi_t]
        allx = np.arange(field.q)
        roots = allx[np.asarray(_big_poly_eval(field, big, allx)) == 0]
        roots = [int(x) for x in roots if x != 0]
        if not roots:
            raise FieldConstructionError("Pi is reducible over the subfield (no root in F_{p^r})")
        theta = min(roots)
        if minimal_polynomial(field, theta, m) != big:
            raise FieldConstructionError("Pi is reducible over the subfield")
        if n > 1 and np.gcd(theta - 1, field.q - 1) != 1:
            raise FieldConstructionError("Pi is irreducible but its root is not primitive in F_{p^r}")

    qm = field.p**m
    # enumerate all coefficient vectors c and compute sum_t c_t theta^t
    grid = np.indices((qm,) * n).reshape(n, -1).T  # (q, n) subfield indices
    acc = np.zeros(len(grid), dtype=np.int64)
    for t in range(n):
        basis = field.pow(theta, t)
        acc = field.add(acc, field.mul(sub_to_big[grid[:, t]], basis))
    coeffs = np.empty((field.q, n), dtype=np.int64)
    coeffs[acc] = grid
    if len(np.unique(acc)) != field.q:
        raise FieldConstructionError("basis {1, theta, ...} does not span F_{p^r}")
    coeffs.setflags(write=False)
    return ExtensionRep(
        field=field,
        m=m,
        Pi=Pi_t,
        coeffs=coeffs,
        beta_index=int(beta) - 1,
        theta=int(theta),
        subfield=sub,
        sub_to_big=sub_to_big,
        big_to_sub=big_to_sub,
    )


def psi_star(rep: ExtensionRep, h):
    """Constant term of E_h(x): the surjective additive map F_{p^r} -> F_{p^m}."""
    out = rep.coeffs[np.asarray(h), 0]
    return int(out) if out.ndim == 0 else out
