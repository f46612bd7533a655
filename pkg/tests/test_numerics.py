import numpy as np
import pytest

from inscribe.errors import NonFinite
from inscribe.numerics import numeric_rank, psd_project, rank_truncate, sym_eig


def random_symmetric(rng, size=20, scale=1.0):
    g = rng.standard_normal((size, size)) * scale
    return (g + g.T) / 2


def test_sym_eig_sorted_descending():
    eig = sym_eig(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(eig.values, [3.0, 2.0, 1.0])


def test_sym_eig_all_ones_matrix():
    # eigenvalues of the all-one 3x3 matrix are {3, 0, 0}
    eig = sym_eig(np.ones((3, 3)))
    np.testing.assert_allclose(eig.values, [3.0, 0.0, 0.0], atol=1e-12)


def test_sym_eig_reflection():
    eig = sym_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(eig.values, [1.0, -1.0], atol=1e-14)


def test_sym_eig_reconstruction_and_orthonormality():
    rng = np.random.default_rng(7)
    for _ in range(20):
        X = random_symmetric(rng, scale=3.0)
        eig = sym_eig(X)
        err = np.linalg.norm(X - eig.reconstruct())
        assert err <= 1e-10 * (1 + np.linalg.norm(X))
        assert np.abs(eig.vectors.T @ eig.vectors - np.eye(20)).max() <= 1e-10
        assert abs(eig.values.sum() - np.trace(X)) <= 1e-9 * (1 + abs(np.trace(X)))


def test_sym_eig_rejects_nonfinite_and_asymmetric():
    with pytest.raises(NonFinite):
        sym_eig(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        sym_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_psd_project_clamps_negative_eigenvalue():
    np.testing.assert_allclose(psd_project(np.diag([2.0, -1.0])), np.diag([2.0, 0.0]), atol=1e-14)


def test_psd_project_fixes_psd_inputs():
    rng = np.random.default_rng(3)
    g = rng.standard_normal((6, 6))
    X = g @ g.T
    np.testing.assert_allclose(psd_project(X), X, atol=1e-10)


def test_psd_project_offdiagonal_pair():
    # clamp the -1 eigenpair of [[0,1],[1,0]] and reconstruct
    expected = np.array([[0.5, 0.5], [0.5, 0.5]])
    np.testing.assert_allclose(psd_project(np.array([[0.0, 1.0], [1.0, 0.0]])), expected, atol=1e-14)


def test_psd_project_idempotent_and_nonexpansive():
    rng = np.random.default_rng(11)
    for _ in range(25):
        X = random_symmetric(rng)
        Y = random_symmetric(rng)
        PX, PY = psd_project(X), psd_project(Y)
        assert np.linalg.norm(psd_project(PX) - PX) <= 1e-10 * (1 + np.linalg.norm(PX))
        assert np.linalg.norm(PX - PY) <= np.linalg.norm(X - Y) + 1e-12


def test_rank_truncate_keeps_top_values():
    np.testing.assert_allclose(rank_truncate(np.diag([3.0, 2.0, 1.0]), 2), np.diag([3.0, 2.0, 0.0]), atol=1e-14)


def test_rank_truncate_rank_one_fixed_point():
    v = np.array([1.0, -2.0, 0.5])
    X = np.outer(v, v)
    for r in (1, 2, 3):
        np.testing.assert_allclose(rank_truncate(X, r), X, atol=1e-12)


def test_rank_truncate_orders_by_absolute_value():
    np.testing.assert_allclose(rank_truncate(np.diag([5.0, -4.0, 1.0]), 2), np.diag([5.0, -4.0, 0.0]), atol=1e-14)


def test_rank_truncate_is_nearest_low_rank():
    rng = np.random.default_rng(19)
    for _ in range(10):
        X = random_symmetric(rng, size=12)
        r = int(rng.integers(1, 6))
        best = rank_truncate(X, r)
        g = rng.standard_normal((12, r))
        competitor = g @ g.T  # arbitrary matrix of rank <= r
        assert np.linalg.norm(X - best) <= np.linalg.norm(X - competitor) + 1e-10


def test_rank_truncate_validates_r():
    with pytest.raises(ValueError):
        rank_truncate(np.eye(3), 0)
    with pytest.raises(ValueError):
        rank_truncate(np.eye(3), 4)


def test_numeric_rank_basics():
    assert numeric_rank(np.eye(3), 1e-6) == 3
    assert numeric_rank(np.diag([1.0, 1e-9]), 1e-6) == 1
    assert numeric_rank(np.zeros((4, 4)), 1e-6) == 0
    with pytest.raises(ValueError):
        numeric_rank(np.eye(2), 0.0)


def test_numeric_rank_of_inscription_gram():
    # bordered Gram matrix of the unit-circle triangle has rank d+1 = 3
    ang = 2 * np.pi * np.arange(3) / 3
    V = np.column_stack([np.cos(ang), np.sin(ang)])
    H = -2.0 * V
    W = np.vstack([
        np.hstack([[1.0], np.zeros(2)]),
        np.hstack([np.ones((3, 1)), V]),
        np.hstack([np.ones((3, 1)), -H]),
    ])
    assert numeric_rank(W @ W.T, 1e-6) == 3
