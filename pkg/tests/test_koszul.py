from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from liespec.corpus import BUNDLED, random_solvable
from liespec.errors import CharacterError, DimensionError, FlagError, NotApplicableError
from liespec.koszul import (
    HOMOTOPY_TOL,
    KoszulComplex,
    boundary,
    exterior_basis,
    homotopy,
    lp_operator,
    normalize_wedge,
    split_check,
    theta,
)
from liespec.liealg import OperatorFamily, jordan_holder_flag, verify_closure
from liespec.spectrum import homology_dims, weights

from conftest import X, Y, bundled_family

SOLVABLE_CORPUS = [name for name in BUNDLED if name != "sl2"]


def adapted(fam):
    flag = jordan_holder_flag(fam)
    return flag.adapted, flag.constants


def test_exterior_basis_small():
    b = exterior_basis(1, 2)
    assert b.wedges(0) == ((),)
    assert b.wedges(1) == ((0,), (1,))
    assert b.wedges(2) == ((0, 1),)


def test_exterior_basis_order_and_size():
    assert exterior_basis(1, 3).wedges(2) == ((0, 1), (0, 2), (1, 2))
    b = exterior_basis(2, 4)
    assert sum(len(b.wedges(p)) for p in range(5)) == 16
    assert all(b.size(p) == 2 * comb(4, p) for p in range(5))


def test_wedge_normalization():
    assert normalize_wedge((2, 0, 1)) == (1, (0, 1, 2))
    assert normalize_wedge((1, 0)) == (-1, (0, 1))
    assert normalize_wedge((1, 1)) == (0, None)


def test_single_generator_boundary_is_shifted_operator():
    fam = OperatorFamily((X,))
    bf = boundary(fam, [0.25])
    assert np.allclose(bf.maps[1], X - 0.25 * np.eye(2))


def test_g2_first_boundary_block_row(g2):
    t = 1.7
    d0 = boundary(g2, [0, t]).maps[1]
    assert np.allclose(d0, np.hstack([Y, X - t * np.eye(2)]))


def test_boundary_shapes():
    fam, sc = adapted(bundled_family("upper3"))
    bf = KoszulComplex(fam, sc).boundary(np.array([0, 0, 0, 1.5]))
    for p in range(1, fam.n + 1):
        assert bf.maps[p].shape == (3 * comb(4, p - 1), 3 * comb(4, p))
    assert bf.out_of(0).shape == (0, 3)
    assert bf.out_of(5).shape == (3, 0)


@pytest.mark.parametrize("name", SOLVABLE_CORPUS)
def test_boundary_matches_exact_construction(name):
    fam, sc = adapted(bundled_family(name))
    cx = KoszulComplex(fam, sc)
    rng = np.random.default_rng(1)
    mats = oracles.exact_family(fam)
    for _ in range(3):
        f = np.zeros(fam.n)
        f[cx.derived().shape[1] :] = rng.integers(-6, 7, fam.n - cx.derived().shape[1]) / 4
        exact = oracles.exact_boundaries(mats, oracles.rational_character(f))
        got = cx.boundary(f)
        for p, m in exact.items():
            assert np.allclose(got.maps[p], np.array(m, dtype=float), atol=1e-12), (name, p)


def test_non_character_rejected(g2):
    with pytest.raises(CharacterError):
        boundary(g2, [1.0, 0.0])
    with pytest.raises(CharacterError):
        boundary(g2, [0.0, 0.0, 0.0])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 4), st.integers(1, 4))
def test_d_squared_is_zero(seed, d, n):
    n = min(n, d + d * (d - 1) // 2)
    fam, sc = adapted(random_solvable(seed, d, n))
    cx = KoszulComplex(fam, sc)
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    f[: cx.derived().shape[1]] = 0
    for num, den in cx.boundary(f).composite_residuals().values():
        assert num <= 1e-10 * (1 + den)


def test_boundary_is_affine_in_character():
    fam, sc = adapted(random_solvable(11, 3, 3))
    cx = KoszulComplex(fam, sc)
    k = cx.derived().shape[1]
    rng = np.random.default_rng(0)
    a = rng.standard_normal(3) + 0j
    b = rng.standard_normal(3) + 0j
    a[:k] = b[:k] = 0
    mid = 0.3 * a + 0.7 * b
    ba, bb, bm = cx.boundary(a), cx.boundary(b), cx.boundary(mid)
    for p in bm.maps:
        assert np.allclose(bm.maps[p], 0.3 * ba.maps[p] + 0.7 * bb.maps[p], atol=1e-14)


def test_theta_g2(g2):
    th = theta(g2, 1)
    assert np.allclose(th[0], 0)
    assert np.allclose(th[1], np.eye(2))


def test_theta_abelian(diag_pair):
    for block in theta(diag_pair, 1):
        assert np.allclose(block, 0)


def test_theta_heisenberg_strictly_upper(heisenberg):
    fam, sc = adapted(heisenberg)
    for block in theta(fam, 2, sc):
        assert np.allclose(np.tril(block), 0)


@pytest.mark.parametrize("name", SOLVABLE_CORPUS)
def test_theta_diagonal_matches_weights(name):
    fam, sc = adapted(bundled_family(name))
    d = fam.d
    for j in range(fam.n):
        table = weights(sc, j)
        blocks = theta(fam, j, sc)
        b = exterior_basis(1, j)
        for p, block in enumerate(blocks):
            assert np.allclose(np.tril(block, -1), 0)
            for alpha in b.wedges(p):
                i = b.position(alpha) * d
                assert np.allclose(np.diag(block)[i : i + d], table.entries[alpha])


def test_theta_needs_invariant_prefix(g2):
    swapped = OperatorFamily((X, Y), ("x", "y"))
    with pytest.raises(FlagError):
        theta(swapped, 1)


def test_lp_degree_zero_is_shifted_last_generator(g2):
    assert np.allclose(lp_operator(g2, [0, 2.0], 0), X - 2 * np.eye(2))


def test_lp_g2_degree_one(g2):
    t = 0.3
    assert np.allclose(lp_operator(g2, [0, t], 1), X - (t + 1) * np.eye(2))


def test_lp_abelian_every_degree(diag_pair):
    b = diag_pair.generators[1]
    assert np.allclose(lp_operator(diag_pair, [0, 1], 0), b - np.eye(2))
    assert np.allclose(lp_operator(diag_pair, [0, 1], 1), b - np.eye(2))


def test_lp_degree_out_of_range(g2):
    with pytest.raises(DimensionError):
        lp_operator(g2, [0, 0], 2)


def test_split_check_g2_zero(g2):
    assert max(split_check(g2, [0, 0]).values()) <= 1e-10


def test_split_check_single_generator():
    assert max(split_check(OperatorFamily((X,)), [0.1]).values()) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_split_check_random_three_dim(seed):
    fam, sc = adapted(random_solvable(seed, 3, 3))
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    f[: KoszulComplex(fam, sc).derived().shape[1]] = 0
    assert max(split_check(fam, f, sc).values()) <= 1e-10


def test_homotopy_g2_off_spectrum(g2):
    h = homotopy(g2, [0, 5])
    assert h.ok
    assert max(h.identity_residuals.values()) <= HOMOTOPY_TOL


def test_homotopy_g2_minus_half_is_singular(g2):
    # -1/2 is an eigenvalue of x itself, so already L_0 = x + 1/2 is singular
    with pytest.raises(NotApplicableError, match="L_0"):
        homotopy(g2, [0, -0.5])


def test_homotopy_single_operator_resolvent():
    h = homotopy(OperatorFamily((X,)), [2.0])
    assert h.ok
    assert np.allclose(h.maps[0], np.linalg.inv(X - 2 * np.eye(2)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 3), st.integers(1, 3))
def test_homotopy_success_means_acyclic(seed, d, n):
    n = min(n, d + d * (d - 1) // 2)
    fam, sc = adapted(random_solvable(seed, d, n))
    rng = np.random.default_rng(seed)
    f = 3 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    f[: KoszulComplex(fam, sc).derived().shape[1]] = 0
    try:
        h = homotopy(fam, f, sc)
    except NotApplicableError:
        return
    assert h.ok
    assert sum(homology_dims(fam, f, sc)) == 0
