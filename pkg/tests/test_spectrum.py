from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from liespec import numkit as nk
from liespec.corpus import BUNDLED, random_commuting, random_nilpotent, random_solvable
from liespec.errors import ClassificationError, FlagError, NotApplicableError
from liespec.koszul import KoszulComplex
from liespec.liealg import OperatorFamily, jordan_holder_flag, verify_closure
from liespec.spectrum import (
    component_spectrum,
    homology_dims,
    is_in_spectrum,
    joint_spectrum,
    nilpotent_bound_check,
    projection_check,
    taylor_oracle,
    weights,
)

from conftest import X, Y, bundled_family

SOLVABLE_CORPUS = [name for name in BUNDLED if name != "sl2"]


def close_sets(a, b, radius=1e-8):
    return nk.sets_match(a, b, radius)


def test_weights_g2(g2):
    sc = verify_closure(g2)
    table = weights(sc, 1)
    assert table.entries[()] == 0
    assert table.entries[(0,)] == pytest.approx(1)


def test_weights_vanish_on_nilpotent(heisenberg):
    flag = jordan_holder_flag(heisenberg)
    for j in range(3):
        assert all(abs(r) < 1e-12 for r in weights(flag.constants, j).values())


@pytest.mark.parametrize("name", SOLVABLE_CORPUS)
def test_weights_are_additive(name):
    sc = jordan_holder_flag(bundled_family(name)).constants
    for j in range(sc.n):
        e = weights(sc, j).entries
        for alpha, r in e.items():
            assert r == pytest.approx(sum(e[(i,)] for i in alpha), abs=1e-12)


def test_weights_need_adapted_basis():
    swapped = OperatorFamily((X, Y))
    with pytest.raises(FlagError):
        weights(verify_closure(swapped), 1)


def test_component_spectra_g2(g2):
    assert close_sets([(v,) for v in component_spectrum(g2, 1)], [(0.5,), (-0.5,), (-1.5,)])
    assert close_sets([(v,) for v in component_spectrum(g2, 0)], [(0,)])


def test_component_spectrum_commutative_is_plain_spectrum(diag_pair):
    assert close_sets([(v,) for v in component_spectrum(diag_pair, 1)], [(3,), (4,)])


def test_homology_g2_members_and_strictness(g2):
    assert sum(homology_dims(g2, [0, 0.5])) > 0
    assert sum(homology_dims(g2, [0, -1.5])) > 0
    assert homology_dims(g2, [0, -0.5]) == (0, 0, 0)


def test_homology_single_operator_is_cokernel():
    fam = OperatorFamily((np.diag([2.0, 2.0, 5.0]).astype(complex),))
    assert homology_dims(fam, [2.0]) == (2, 2)
    assert homology_dims(fam, [3.0]) == (0, 0)


def test_is_in_spectrum_examples(g2):
    assert is_in_spectrum(g2, [0, -1.5])
    assert not is_in_spectrum(g2, [0, 5])
    assert is_in_spectrum(OperatorFamily((np.eye(2, dtype=complex),)), [1])


def test_joint_spectrum_g2(g2):
    r = joint_spectrum(g2)
    assert close_sets(r.points, [(0, 0.5), (0, -1.5)])
    assert r.classification == "solvable"
    assert all(any(b) for b in r.betti)


def test_joint_spectrum_diagonal_pair(diag_pair):
    assert close_sets(joint_spectrum(diag_pair).points, [(1, 3), (2, 4)])


def test_joint_spectrum_heisenberg(heisenberg):
    r = joint_spectrum(heisenberg)
    assert close_sets(r.points, [(0, 0, 0)])
    assert r.betti == ((1, 2, 2, 1),)


def test_joint_spectrum_rejects_sl2(sl2):
    with pytest.raises(ClassificationError):
        joint_spectrum(sl2)


@pytest.mark.parametrize("name", SOLVABLE_CORPUS)
def test_betti_vectors_match_exact_ranks_on_the_whole_grid(name):
    r = joint_spectrum(bundled_family(name))
    fam, flag = r.flag.original, r.flag
    mats = oracles.exact_family(fam)
    cx = KoszulComplex(flag.adapted, flag.constants)
    tinv = np.linalg.inv(flag.change_of_basis)
    for f in product(*r.candidate_grid):
        f = np.array(f)
        if np.abs(f[: flag.k]).max(initial=0) > 1e-8:
            continue
        exact = oracles.exact_betti(mats, oracles.rational_character(tinv.T @ f))
        assert homology_dims(flag.adapted, f, flag.constants, complex_=cx) == exact
        member = any(nk.point_distance(f, p) <= 1e-8 for p in r.points)
        assert member == any(exact)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 3), st.integers(1, 3))
def test_homology_does_not_depend_on_the_basis(seed, d, n):
    n = min(n, d + d * (d - 1) // 2)
    r = joint_spectrum(random_solvable(seed, d, n))
    orig = r.flag.original
    for p, q, b in zip(r.points, r.original_coordinates(), r.betti):
        assert homology_dims(orig, q) == b


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 4), st.integers(1, 4))
def test_spectrum_points_are_characters_in_the_grid(seed, d, n):
    n = min(n, d + d * (d - 1) // 2)
    r = joint_spectrum(random_solvable(seed, d, n))
    assert r.points
    for p, b in zip(r.points, r.betti):
        assert any(b)
        assert sum((-1) ** i * v for i, v in enumerate(b)) == 0
        assert all(abs(v) <= 1e-9 for v in p[: r.flag.k])
        for j, v in enumerate(p):
            assert min(abs(v - g) for g in r.candidate_grid[j]) <= 1e-8


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 3), st.integers(1, 3))
def test_last_coordinate_off_its_component_spectrum_is_acyclic(seed, d, n):
    n = min(n, d + d * (d - 1) // 2)
    r = joint_spectrum(random_solvable(seed, d, n))
    flag = r.flag
    rng = np.random.default_rng(seed)
    for _ in range(5):
        f = 3 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        f[: flag.k] = 0
        if min(abs(f[-1] - g) for g in r.candidate_grid[-1]) > 1e-3:
            assert sum(homology_dims(flag.adapted, f, flag.constants)) == 0


def test_taylor_oracle_examples(diag_pair):
    assert close_sets(taylor_oracle(diag_pair), [(1, 3), (2, 4)])
    jordan = OperatorFamily((np.array([[5, 1], [0, 5]], dtype=complex),))
    assert close_sets(taylor_oracle(jordan), [(5,)])


def test_taylor_oracle_recovers_triangular_construction():
    rng = np.random.default_rng(4)
    for _ in range(10):
        mats, expected = oracles.triangular_commuting(rng, 4, 2)
        assert close_sets(taylor_oracle(OperatorFamily(tuple(mats))), expected, 1e-7)


def test_taylor_oracle_needs_commuting_family(g2):
    with pytest.raises(NotApplicableError):
        taylor_oracle(g2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 6), st.integers(1, 3))
def test_commuting_spectrum_equals_joint_eigenvalues(seed, d, n):
    fam = random_commuting(seed, d, min(n, d))
    r = joint_spectrum(fam)
    assert close_sets(r.original_coordinates(), taylor_oracle(fam), 1e-7)


def test_projection_g2(g2):
    rep = projection_check(g2, 1)
    assert rep.ok
    assert close_sets(rep.ideal_points, [(0,)])


def test_projection_abelian(diag_pair):
    rep = projection_check(diag_pair, 1)
    assert rep.ok
    assert close_sets(rep.ideal_points, [(1,), (2,)])


def test_projection_heisenberg(heisenberg):
    flag = jordan_holder_flag(heisenberg)
    rep = projection_check(flag.adapted, 2, flag.constants)
    assert rep.ok
    assert close_sets(rep.ideal_points, [(0, 0)])


@pytest.mark.parametrize("name", SOLVABLE_CORPUS)
def test_projection_every_prefix(name):
    r = joint_spectrum(bundled_family(name))
    for j in range(1, r.flag.n):
        assert projection_check(r.flag.adapted, j, r.flag.constants, full_points=r.points).ok


def test_nilpotent_bound_heisenberg(heisenberg):
    rep = nilpotent_bound_check(heisenberg)
    assert rep.ok()
    assert rep.max_weight == 0


def test_nilpotent_bound_abelian(diag_pair):
    assert nilpotent_bound_check(diag_pair).ok()


def test_nilpotent_bound_refuses_g2(g2):
    with pytest.raises(NotApplicableError):
        nilpotent_bound_check(g2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000), st.integers(2, 4), st.integers(1, 4))
def test_nilpotent_grid_is_product_of_spectra(seed, d, n):
    n = min(n, d * (d - 1) // 2 + 1)
    fam = random_nilpotent(seed, d, n)
    r = joint_spectrum(fam)
    for j, g in enumerate(r.flag.adapted.generators):
        assert close_sets([(v,) for v in r.candidate_grid[j]], [(mu,) for mu, _ in nk.spectral_set(g)])
    assert nilpotent_bound_check(fam, result=r).ok()
