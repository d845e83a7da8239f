"""Exact operator algebra tests."""

import random
from fractions import Fraction

import numpy as np
import pytest

from sympovm.operators import (
    CR0,
    CR1,
    BipartiteOperator,
    CRat,
    is_psd,
    ketbra,
    kraus_from_separable_form,
    mat,
    mat_eye,
    mat_mul,
    mat_trace,
    mat_vec,
    maximally_entangled_projector,
    partial_transpose,
    swap_operator,
    tensor,
)
from sympovm.symmetry import commutant_basis, kind


def random_hermitian_grid(rng, n, den=7):
    grid = [[CR0] * n for _ in range(n)]
    for i in range(n):
        grid[i][i] = CRat(Fraction(rng.randint(-den, den), den))
        for j in range(i + 1, n):
            z = CRat(Fraction(rng.randint(-den, den), den),
                     Fraction(rng.randint(-den, den), den))
            grid[i][j] = z
            grid[j][i] = z.conjugate()
    return tuple(tuple(r) for r in grid)


def charpoly_psd(grid):
    """Independent PSD oracle: coefficient signs of the characteristic polynomial.

    Faddeev-LeVerrier gives det(lam*1 - M) = lam^n + c1 lam^(n-1) + ... + cn
    exactly; a Hermitian matrix is PSD iff (-1)^k ck >= 0 for all k.
    """
    n = len(grid)
    m = mat(grid)
    am = m
    coeffs = []
    for k in range(1, n + 1):
        ck = mat_trace(am) / CRat(-k)
        coeffs.append(ck)
        if k < n:
            shifted = tuple(tuple(am[i][j] + (ck if i == j else CR0)
                                  for j in range(n)) for i in range(n))
            am = mat_mul(m, shifted)
    for k, c in enumerate(coeffs, start=1):
        assert not c.im
        if (-1) ** k * c.re < 0:
            return False
    return True


def test_tensor_identity():
    i2 = mat_eye(2)
    assert tensor(i2, i2) == BipartiteOperator.identity(2)


def test_tensor_basis_projector():
    op = tensor(ketbra(0, 0, 2), ketbra(1, 1, 2))
    # single 1 at composite index (0,1),(0,1) = row/col 1
    for r in range(4):
        for c in range(4):
            assert op.entries[r][c] == (1 if r == c == 1 else 0)


def test_tensor_sigma_x_flips_00_to_11():
    sx = mat([[0, 1], [1, 0]])
    op = tensor(sx, sx)
    vec = [CR1, CR0, CR0, CR0]  # |00>
    out = mat_vec(op.entries, vec)
    assert list(out) == [CR0, CR0, CR0, CR1]  # |11>


def test_tensor_dimension_mismatch():
    with pytest.raises(ValueError):
        tensor(mat_eye(2), mat_eye(3))


def test_tensor_multiplicative_on_traces():
    rng = random.Random(5)
    for _ in range(20):
        a = random_hermitian_grid(rng, 3)
        b = random_hermitian_grid(rng, 3)
        assert tensor(a, b).trace() == mat_trace(a) * mat_trace(b)


def test_partial_transpose_involution():
    rng = random.Random(1)
    for _ in range(25):
        d = rng.choice((2, 3))
        m = BipartiteOperator(d, random_hermitian_grid(rng, d * d))
        assert partial_transpose(partial_transpose(m)) == m


def test_partial_transpose_of_swap():
    f = swap_operator(2)
    assert partial_transpose(f) == maximally_entangled_projector(2).scale(2)


def test_partial_transpose_of_bell_projector():
    # PT of the psi+ projector is half of (psi+ + psi- + phi+ - phi-)
    basis = commutant_basis(kind("bell", 2))
    psi_p, psi_m, phi_p, phi_m = basis.projectors
    got = partial_transpose(psi_p)
    expect = (psi_p + psi_m + phi_p - phi_m).scale(Fraction(1, 2))
    assert got == expect


def test_is_psd_trivial_cases():
    assert is_psd(BipartiteOperator.identity(2))
    neg = BipartiteOperator(2, [[CRat(x if i == j else 0) for j in range(4)]
                                for i, x in enumerate([1, Fraction(-1, 3), 0, 0])])
    assert not is_psd(neg)
    assert is_psd(maximally_entangled_projector(3))


def test_is_psd_rejects_non_hermitian():
    m = BipartiteOperator(2, [[CRat(0)] * 4 for _ in range(4)])
    grid = [list(r) for r in m.entries]
    grid[0][1] = CRat(1)
    with pytest.raises(ValueError):
        is_psd(BipartiteOperator(2, grid))


def test_is_psd_agrees_with_charpoly_oracle():
    rng = random.Random(7)
    for trial in range(200):
        g = random_hermitian_grid(rng, 4, den=5)
        if trial % 2:
            g = mat_mul(tuple(tuple(x.conjugate() for x in col)
                              for col in zip(*g)), g)  # g†g is PSD
        m = BipartiteOperator(2, g)
        assert is_psd(m) == charpoly_psd(g)


def test_entangled_projector_and_swap_identities():
    assert maximally_entangled_projector(2).trace() == 1
    assert swap_operator(2).trace() == 2
    f3 = swap_operator(3)
    assert f3 @ f3 == BipartiteOperator.identity(3)
    # F fixes the (unnormalised) maximally entangled vector, d = 4
    f4 = swap_operator(4)
    vec = [CR1 if i % 5 == 0 else CR0 for i in range(16)]  # sum_i |ii>
    assert list(mat_vec(f4.entries, vec)) == vec
    with pytest.raises(ValueError):
        maximally_entangled_projector(1)


def reconstruct(pairs, d):
    total = BipartiteOperator.zeros(d)
    for p in pairs:
        total = total + p.element()
    return total


def test_kraus_projector_term():
    pairs = kraus_from_separable_form([(1, ketbra(0, 0, 2), mat_eye(2))])
    assert len(pairs) == 1
    assert pairs[0].a_op.mat == ketbra(0, 0, 2)
    assert pairs[0].b_op.mat == mat_eye(2)
    assert reconstruct(pairs, 2) == tensor(ketbra(0, 0, 2), mat_eye(2))


def test_kraus_diagonal_square_root():
    a = mat([[4, 0], [0, 1]])
    pairs = kraus_from_separable_form([(1, a, mat_eye(2))])
    assert len(pairs) == 1
    assert pairs[0].a_op.radicand == 1
    assert pairs[0].a_op.mat == mat([[2, 0], [0, 1]])


def test_kraus_isotropic_element():
    # x = 1, y = 0 at d = 2: terms (1, |i><i|, |i><i|)
    terms = [(1, ketbra(i, i, 2), ketbra(i, i, 2)) for i in range(2)]
    pairs = kraus_from_separable_form(terms)
    assert len(pairs) == 2
    want = tensor(ketbra(0, 0, 2), ketbra(0, 0, 2)) + \
        tensor(ketbra(1, 1, 2), ketbra(1, 1, 2))
    assert reconstruct(pairs, 2) == want


def test_kraus_radicand_keeps_reconstruction_exact():
    # weight 1/3 is not a rational square; the radicand carries it exactly
    third = Fraction(1, 3)
    terms = [(third, ketbra(0, 0, 2), mat_eye(2))]
    pairs = kraus_from_separable_form(terms)
    got = reconstruct(pairs, 2)
    assert got == tensor(ketbra(0, 0, 2), mat_eye(2)).scale(third)


def test_kraus_rejects_non_psd():
    bad = mat([[1, 0], [0, -1]])
    with pytest.raises(ValueError):
        kraus_from_separable_form([(1, bad, mat_eye(2))])


def test_kraus_float_fallback():
    a = np.array([[2.0, 1.0], [1.0, 2.0]])
    b = np.eye(2)
    pairs = kraus_from_separable_form([(1.0, a, b)])
    got = pairs[0].element().to_numpy()
    assert np.max(np.abs(got - np.kron(a, b))) < 1e-9


def test_matrix_json_round_trip():
    rng = random.Random(3)
    m = BipartiteOperator(2, random_hermitian_grid(rng, 4))
    blob = m.to_json()
    again = BipartiteOperator.from_json(blob)
    assert again == m
    assert again.to_json() == blob


def test_float_mode_operator():
    arr = np.diag([1.0, 0.5, 0.25, 0.0])
    m = BipartiteOperator(2, arr, exact=False)
    assert is_psd(m)
    assert partial_transpose(partial_transpose(m)) == m
