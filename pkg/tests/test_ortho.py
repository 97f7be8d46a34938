"""Tests for Gram machinery, projections and left g-orthogonalization."""

import numpy as np
import pytest

from nnormlab import (
    DependentFamilyError,
    DimensionError,
    UnsupportedSizeError,
    Vector,
    bordered_determinant_project,
    g,
    gahler_n_norm_euclidean,
    gram_determinant,
    gram_matrix,
    left_g_orthogonalize,
    lp_norm,
    project,
    space,
    vector,
)


def _random_independent(rng, spc, n):
    while True:
        xs = tuple(Vector(rng.standard_normal(spc.d), spc) for _ in range(n))
        try:
            left_g_orthogonalize(xs)
            return xs
        except DependentFamilyError:
            continue


def test_gram_matrix_euclidean_identity():
    gm = gram_matrix((vector([1, 0], 2), vector([0, 1], 2)))
    np.testing.assert_allclose(gm.entries, np.eye(2), atol=0)


def test_gram_matrix_euclidean_dot_products():
    gm = gram_matrix((vector([1, 1], 2), vector([1, -1], 2)))
    np.testing.assert_allclose(gm.entries, [[2, 0], [0, 2]], atol=1e-15)


def test_gram_matrix_p3_closed_form():
    gm = gram_matrix((vector([1, 1], 3), vector([1, 0], 3)))
    expected = [[2 ** (2 / 3), 2 ** (-1 / 3)], [1.0, 1.0]]
    np.testing.assert_allclose(gm.entries, expected, rtol=1e-14)


def test_gram_matrix_not_symmetric_for_p3():
    gm = gram_matrix((vector([1, 2], 3), vector([2, -1], 3)))
    assert abs(gm.entries[0, 1] - gm.entries[1, 0]) > 1e-3


def test_gram_diagonal_is_squared_norm():
    rng = np.random.default_rng(2)
    for p in (1, 1.5, 2, 3):
        spc = space(3, p)
        Y = tuple(Vector(rng.standard_normal(3), spc) for _ in range(3))
        gm = gram_matrix(Y)
        for i, y in enumerate(Y):
            assert gm.entries[i, i] == pytest.approx(lp_norm(y) ** 2, rel=1e-10)


def test_gram_matrix_mixed_spaces():
    with pytest.raises(DimensionError):
        gram_matrix((vector([1, 0], 2), vector([1, 0, 0], 2)))


def test_gram_determinant_examples():
    assert gram_determinant((vector([1, 0], 2), vector([0, 1], 2))) == 1.0
    assert gram_determinant((vector([1, 0], 3), vector([1, 0], 3))) == pytest.approx(0.0, abs=1e-15)
    assert gram_determinant((vector([1, 1], 2), vector([1, -1], 2))) == pytest.approx(4.0, abs=1e-12)


def test_project_euclidean_line():
    got = project(vector([1, 1], 2), (vector([1, 0], 2),))
    np.testing.assert_allclose(got.coords, [1, 0], atol=1e-15)


def test_project_fixed_point_in_span():
    for p in (1.5, 2, 3):
        got = project(vector([2, 0], p), (vector([1, 0], p),))
        np.testing.assert_allclose(got.coords, [2, 0], atol=1e-12)


def test_project_p3_half():
    # solve g((1,1),(1,1)) c = g((1,1),(0,1)): 2^(2/3) c = 2^(-1/3), c = 1/2
    got = project(vector([0, 1], 3), (vector([1, 1], 3),))
    np.testing.assert_allclose(got.coords, [0.5, 0.5], rtol=1e-14)


def test_project_annihilates_residual():
    rng = np.random.default_rng(4)
    for p in (1.5, 2, 3):
        spc = space(4, p)
        Y = _random_independent(rng, spc, 2)
        x = Vector(rng.standard_normal(4), spc)
        xy = project(x, Y)
        residual = x - xy
        for y in Y:
            assert abs(g(y, residual)) <= 1e-8 * (1 + lp_norm(y) * lp_norm(residual))


def test_project_idempotent():
    rng = np.random.default_rng(6)
    for p in (1.5, 2, 3):
        spc = space(4, p)
        Y = _random_independent(rng, spc, 2)
        x = Vector(rng.standard_normal(4), spc)
        once = project(x, Y)
        twice = project(once, Y)
        np.testing.assert_allclose(twice.coords, once.coords, atol=1e-9)


def test_project_dependent_family():
    with pytest.raises(DependentFamilyError):
        project(vector([1, 1], 2), (vector([1, 0], 2), vector([2, 0], 2)))


def test_bordered_singleton_formula():
    # 2x2 bordered determinant: x_Y = (g(y,x)/g(y,y)) y
    for p in (1.5, 2, 3):
        y = vector([1, 2], p)
        x = vector([3, -1], p)
        got = bordered_determinant_project(x, (y,))
        coefficient = g(y, x) / g(y, y)
        np.testing.assert_allclose(got.coords, coefficient * y.coords, rtol=1e-12)


def test_bordered_matches_project_on_examples():
    cases = [
        (vector([1, 1], 2), (vector([1, 0], 2),)),
        (vector([2, 0], 3), (vector([1, 0], 3),)),
        (vector([0, 1], 3), (vector([1, 1], 3),)),
    ]
    for x, Y in cases:
        a = project(x, Y)
        b = bordered_determinant_project(x, Y)
        np.testing.assert_allclose(b.coords, a.coords, rtol=1e-10, atol=1e-14)


def test_bordered_matches_least_squares_euclidean():
    rng = np.random.default_rng(8)
    spc = space(3, 2)
    Y = _random_independent(rng, spc, 2)
    x = Vector(rng.standard_normal(3), spc)
    got = bordered_determinant_project(x, Y)
    basis = np.array([y.coords for y in Y]).T
    coeffs, *_ = np.linalg.lstsq(basis, x.coords, rcond=None)
    np.testing.assert_allclose(got.coords, basis @ coeffs, atol=1e-10)


def test_bordered_matches_project_random():
    rng = np.random.default_rng(10)
    for p in (1, 1.5, 2, 3):
        spc = space(4, p)
        for size in (1, 2, 3):
            # at p = 1 an independent family can still have a singular Gram
            # matrix; the projection precondition excludes those
            while True:
                Y = _random_independent(rng, spc, size)
                x = Vector(rng.standard_normal(4), spc)
                try:
                    a = project(x, Y)
                    break
                except DependentFamilyError:
                    continue
            b = bordered_determinant_project(x, Y)
            scale = 1.0 + float(np.linalg.norm(a.coords))
            assert float(np.linalg.norm(a.coords - b.coords)) / scale <= 1e-10


def test_bordered_size_guard():
    spc = space(5, 2)
    Y = tuple(Vector(np.eye(5)[i], spc) for i in range(4))
    with pytest.raises(UnsupportedSizeError):
        bordered_determinant_project(Vector(np.ones(5), spc), Y)


def test_orthogonalize_euclidean_example():
    result = left_g_orthogonalize((vector([1, 0], 2), vector([1, 1], 2)))
    np.testing.assert_allclose(result.orthogonalized[0].coords, [1, 0], atol=0)
    np.testing.assert_allclose(result.orthogonalized[1].coords, [0, 1], atol=1e-15)


def test_orthogonalize_keeps_orthogonal_pair():
    for p in (1, 1.5, 2, 3):
        result = left_g_orthogonalize((vector([1, 0], p), vector([0, 1], p)))
        np.testing.assert_allclose(result.orthogonalized[0].coords, [1, 0], atol=0)
        np.testing.assert_allclose(result.orthogonalized[1].coords, [0, 1], atol=1e-15)


def test_orthogonalize_p3_example():
    result = left_g_orthogonalize((vector([1, 1], 3), vector([0, 1], 3)))
    np.testing.assert_allclose(result.orthogonalized[1].coords, [-0.5, 0.5], rtol=1e-14)
    assert result.coefficients[1] == pytest.approx((0.5,), rel=1e-14)


def test_orthogonalize_first_vector_untouched():
    rng = np.random.default_rng(12)
    spc = space(3, 3)
    xs = _random_independent(rng, spc, 3)
    result = left_g_orthogonalize(xs)
    assert result.orthogonalized[0] == xs[0]


def test_orthogonalize_left_orthogonality_only():
    rng = np.random.default_rng(14)
    for p in (1.5, 3, 6):
        spc = space(4, p)
        for _ in range(20):
            xs = _random_independent(rng, spc, 3)
            out = left_g_orthogonalize(xs).orthogonalized
            for i in range(3):
                for j in range(i + 1, 3):
                    bound = 1e-8 * (1 + lp_norm(out[i]) * lp_norm(out[j]))
                    assert abs(g(out[i], out[j])) <= bound


def test_orthogonalize_difference_in_prefix_span():
    rng = np.random.default_rng(16)
    spc = space(4, 3)
    xs = _random_independent(rng, spc, 3)
    result = left_g_orthogonalize(xs)
    for i in range(1, 3):
        basis = np.array([x.coords for x in xs[:i]]).T
        diff = result.orthogonalized[i].coords - xs[i].coords
        coeffs, *_ = np.linalg.lstsq(basis, diff, rcond=None)
        misfit = float(np.linalg.norm(basis @ coeffs - diff))
        assert misfit <= 1e-9 * (1 + float(np.linalg.norm(diff)))


def test_orthogonalize_classical_gram_schmidt_at_p2():
    rng = np.random.default_rng(18)
    spc = space(4, 2)
    for _ in range(20):
        xs = _random_independent(rng, spc, 3)
        ours = left_g_orthogonalize(xs).orthogonalized
        reference = []
        for x in xs:
            v = x.coords.copy()
            for u in reference:
                v -= (u @ v) / (u @ u) * u
            reference.append(v)
        for mine, ref in zip(ours, reference):
            np.testing.assert_allclose(mine.coords, ref, atol=1e-10)


def test_orthogonalize_volume_invariance_at_p2():
    rng = np.random.default_rng(20)
    spc = space(4, 2)
    for _ in range(20):
        xs = _random_independent(rng, spc, 3)
        result = left_g_orthogonalize(xs)
        volume = gahler_n_norm_euclidean(xs)
        product = np.prod([lp_norm(v) for v in result.orthogonalized])
        assert volume == pytest.approx(product, rel=1e-9)


def test_orthogonalize_rejects_dependent():
    with pytest.raises(DependentFamilyError):
        left_g_orthogonalize((vector([1, 2], 2), vector([2, 4], 2)))
    with pytest.raises(DependentFamilyError):
        left_g_orthogonalize((vector([1, 0, 0], 2), vector([0, 1, 0], 2),
                              vector([1, 1, 0], 2)))


def test_orthogonalize_step_gram_dets_positive():
    rng = np.random.default_rng(22)
    spc = space(4, 3)
    xs = _random_independent(rng, spc, 3)
    result = left_g_orthogonalize(xs)
    assert len(result.step_gram_dets) == 2
    assert all(d > 0 for d in result.step_gram_dets)


def test_orthogonalization_result_json():
    result = left_g_orthogonalize((vector([1, 1], 3), vector([0, 1], 3)))
    data = result.to_dict()
    assert set(data) == {"originals", "orthogonalized", "coefficients",
                         "step_gram_dets"}
    assert data["coefficients"] == [[], [0.5]]
