import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subfield_ldpc.gf import (
    FieldConstructionError,
    SubfieldError,
    build_extension_rep,
    build_field,
    default_primitive_poly,
    is_irreducible,
    parse_poly,
    psi_star,
    subfield_beta,
    subfield_elements,
)

CONFIGS = [(2, 1), (2, 2), (2, 3), (2, 4), (2, 6), (2, 8), (3, 2), (3, 4), (5, 2)]


# -- independent oracle: coefficient-list polynomial arithmetic over F_p -------------


def poly_mulmod(a, b, mod, p):
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    r = len(mod) - 1
    for k in range(len(prod) - 1, r - 1, -1):
        c = prod[k]
        if c:
            for t in range(r + 1):
                prod[k - r + t] = (prod[k - r + t] - c * mod[t]) % p
    return (prod + [0] * r)[:r]


def oracle_powers(mod, p):
    r = len(mod) - 1
    x = [0, 1] + [0] * (r - 2) if r > 1 else [mod[0] and (-mod[0]) % p]
    cur = [1] + [0] * (r - 1)
    out = []
    for _ in range(p**r - 1):
        out.append(tuple(cur))
        cur = poly_mulmod(cur, x, mod, p)
    return out


@pytest.mark.parametrize("p,r", CONFIGS)
def test_antilog_matches_polynomial_oracle(p, r):
    F = build_field(p, r)
    powers = oracle_powers(list(F.prim_poly), p)
    assert len(set(powers)) == F.q - 1
    for k, vec in enumerate(powers):
        assert tuple(F.digits[F.elem(k)]) == vec
    assert F.pow(F.elem(1), F.q - 1) == 1


@pytest.mark.parametrize("p,r", [(2, 3), (2, 4), (3, 2), (5, 2)])
def test_field_axioms_exhaustive(p, r):
    F = build_field(p, r)
    q = F.q
    a, b = np.meshgrid(np.arange(q), np.arange(q), indexing="ij")
    add, mul = F.add(a, b), F.mul(a, b)
    # commutativity, identities, inverses
    assert np.array_equal(add, add.T) and np.array_equal(mul, mul.T)
    assert np.array_equal(F.add(np.arange(q), 0), np.arange(q))
    assert np.array_equal(F.mul(np.arange(q), 1), np.arange(q))
    assert np.all(F.add(np.arange(q), F.neg(np.arange(q))) == 0)
    nz = np.arange(1, q)
    assert np.all(F.mul(nz, F.inv(nz)) == 1)
    # every row of the tables is a permutation (Latin squares)
    assert all(len(set(row)) == q for row in add)
    assert all(len(set(row)) == q - 1 for row in mul[1:, 1:])
    # associativity and distributivity on all triples
    c = np.arange(q)
    A, B, C = np.meshgrid(c, c, c, indexing="ij")
    assert np.array_equal(F.add(F.add(A, B), C), F.add(A, F.add(B, C)))
    assert np.array_equal(F.mul(F.mul(A, B), C), F.mul(A, F.mul(B, C)))
    assert np.array_equal(F.mul(A, F.add(B, C)), F.add(F.mul(A, B), F.mul(A, C)))


def test_multiplication_matches_oracle_gf256():
    F = build_field(2, 8)
    mod = list(F.prim_poly)
    rng = np.random.default_rng(0)
    for a, b in rng.integers(0, 256, size=(500, 2)):
        want = poly_mulmod(list(F.digits[a]), list(F.digits[b]), mod, 2)
        assert tuple(F.digits[F.mul(a, b)]) == tuple(want)


def test_gf16_default_polynomial_relation():
    F = build_field(2, 4)
    assert F.prim_poly == (1, 1, 0, 0, 1)
    a = F.elem(1)
    assert F.pow(a, 4) == F.add(a, 1)  # alpha^4 = alpha + 1


def test_default_polynomials():
    assert default_primitive_poly(2, 4) == (1, 1, 0, 0, 1)
    assert default_primitive_poly(2, 6) == (1, 1, 0, 0, 0, 0, 1)
    assert build_field(2, 1).q == 2 and build_field(2, 1).elem(0) == 1


def test_reducible_polynomial_rejected():
    # x^4 + x^2 + 1 = (x^2 + x + 1)^2 over F_2
    sq = poly_mulmod([1, 1, 1], [1, 1, 1], [0, 0, 0, 0, 0, 1], 2)
    assert sq == [1, 0, 1, 0, 1]
    assert not is_irreducible((1, 0, 1, 0, 1), 2)
    with pytest.raises(FieldConstructionError, match="reducible"):
        build_field(2, 4, (1, 0, 1, 0, 1))


def test_irreducible_but_not_primitive_rejected():
    # x^4 + x^3 + x^2 + x + 1 divides x^5 - 1
    assert is_irreducible((1, 1, 1, 1, 1), 2)
    with pytest.raises(FieldConstructionError, match="not primitive"):
        build_field(2, 4, (1, 1, 1, 1, 1))


@pytest.mark.parametrize("bad", [(1, 1, 0, 1), (1, 1, 0, 0, 2), 4])
def test_bad_polynomial_shapes(bad):
    with pytest.raises(FieldConstructionError):
        build_field(2, 4, bad)


def test_parse_poly_forms():
    assert parse_poly("0x13") == (1, 1, 0, 0, 1)
    assert parse_poly("1,1,0,0,1") == (1, 1, 0, 0, 1)
    assert parse_poly(0b10011) == (1, 1, 0, 0, 1)


def test_zero_has_no_log(f16):
    with pytest.raises(ValueError):
        f16.log(0)
    assert f16.log(f16.elem(7)) == 7


@pytest.mark.parametrize("p,r,m", [(2, 4, 2), (2, 4, 1), (2, 6, 3), (2, 6, 2), (2, 8, 4), (3, 4, 2), (2, 4, 4)])
def test_subfield_closure(p, r, m):
    F = build_field(p, r)
    S = subfield_elements(F, m)
    assert len(set(S.tolist())) == p**m
    s = set(S.tolist())
    for a, b in itertools.product(S, S):
        assert F.add(a, b) in s and F.mul(a, b) in s


def test_beta_values(f16):
    assert subfield_beta(f16, 2) == f16.elem(5)
    assert subfield_beta(f16, 4) == f16.elem(1)
    assert subfield_beta(build_field(2, 6), 3) == build_field(2, 6).elem(9)
    with pytest.raises(SubfieldError):
        subfield_beta(f16, 3)


def test_extension_rep_gf16_over_gf4(f16, rep16):
    S = rep16.subfield
    omega = 2  # subfield index of beta
    # Pi(x) = x^2 + x + omega
    assert tuple(rep16.Pi) == (omega, 1, 1)
    # alpha^2 = omega + alpha, since alpha^2 + alpha = alpha^5
    assert tuple(rep16.coeffs[f16.elem(2)]) == (omega, 1)
    assert tuple(rep16.coeffs[f16.elem(5)]) == (omega, 0)
    # subfield elements are constants
    for s in range(S.q):
        g = rep16.embed(s)
        assert tuple(rep16.coeffs[g]) == (s, 0)


def test_extension_rep_m1_is_base_representation(f16):
    rep = build_extension_rep(f16, 1)
    assert np.array_equal(rep.coeffs, f16.digits)


@pytest.mark.parametrize("p,r,m", [(2, 4, 2), (2, 4, 1), (2, 6, 3), (2, 6, 2), (2, 8, 4), (3, 4, 2)])
def test_extension_rep_is_linear_bijection(p, r, m):
    F = build_field(p, r)
    rep = build_extension_rep(F, m)
    S = rep.subfield
    assert len({tuple(c) for c in rep.coeffs}) == F.q
    a, b = np.meshgrid(np.arange(F.q), np.arange(F.q), indexing="ij")
    lhs = rep.coeffs[F.add(a, b)]
    rhs = S.add(rep.coeffs[a], rep.coeffs[b])
    assert np.array_equal(lhs, rhs)
    # subfield scalars act coordinate-wise
    for s in range(S.q):
        assert np.array_equal(rep.coeffs[F.mul(rep.embed(s), np.arange(F.q))], S.mul(s, rep.coeffs))
    assert rep.Pi[0] != 0


def test_bad_modulus_polynomial(f16):
    with pytest.raises(FieldConstructionError):
        build_extension_rep(f16, 2, (0, 1, 1))  # zero constant term
    with pytest.raises(FieldConstructionError):
        build_extension_rep(f16, 2, (1, 0, 1))  # x^2 + 1 = (x + 1)^2


def test_psi_star_values(f16, rep16):
    assert psi_star(rep16, f16.elem(3)) == 2  # omega
    assert psi_star(rep16, 0) == 0


@pytest.mark.parametrize("p,r,m", [(2, 4, 2), (2, 6, 3), (2, 6, 2), (2, 8, 4), (3, 4, 2)])
def test_psi_star_homomorphism_and_kernel(p, r, m):
    F = build_field(p, r)
    rep = build_extension_rep(F, m)
    a, b = np.meshgrid(np.arange(F.q), np.arange(F.q), indexing="ij")
    assert np.array_equal(psi_star(rep, F.add(a, b)), rep.subfield.add(psi_star(rep, a), psi_star(rep, b)))
    img = psi_star(rep, np.arange(F.q))
    assert set(img.tolist()) == set(range(p**m))
    assert np.count_nonzero(img == 0) == p ** (r - m)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 255), st.integers(0, 255), st.integers(1, 255))
def test_gf256_division_property(a, b, c):
    F = build_field(2, 8)
    assert F.mul(F.div(a, c), c) == a
    assert F.sub(F.add(a, b), b) == a
    assert F.pow(c, 255) == 1
