import json

import numpy as np
import pytest

from inscribe.core import (
    FacetIncidence,
    GramBorderMatrix,
    Inscription,
    PolytopeVRep,
    count_types,
    extract_vertices,
    facet_enumeration,
    load_polytope,
    normalize_inscription,
    random_inscribed,
    save_polytope,
    slack_from_reps,
    verify_inscription,
    zero_pattern,
)
from inscribe.errors import (
    DegenerateIncidence,
    InteriorPoint,
    NegativeSlack,
    NotFullDimensional,
    Unsupported,
    ZeroVertex,
)
from inscribe.numerics import numeric_rank


def regular_triangle():
    V = np.array([[1.0, 0.0], [-0.5, np.sqrt(3) / 2], [-0.5, -np.sqrt(3) / 2]])
    return PolytopeVRep(2, V), -2.0 * V  # facet normals h_j = -2 v_j


def unit_square():
    s = 1 / np.sqrt(2)
    V = np.array([[s, s], [-s, s], [-s, -s], [s, -s]])
    return PolytopeVRep(2, V)


class TestPolytopeVRep:
    def test_requires_affine_span(self):
        with pytest.raises(NotFullDimensional):
            PolytopeVRep(2, np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]))

    def test_requires_enough_vertices(self):
        with pytest.raises(ValueError):
            PolytopeVRep(3, np.eye(3))


class TestSlackFromReps:
    def test_regular_triangle(self):
        poly, H = regular_triangle()
        slack = slack_from_reps(poly, H)
        # oracle: S_ij = 1 + 2 v_i . v_j computed entrywise
        expected = 1.0 + 2.0 * poly.vertices @ poly.vertices.T
        expected[np.abs(expected) < 1e-12] = 0.0
        np.testing.assert_allclose(slack.entries, expected, atol=1e-12)
        assert slack.entries[0, 0] == 3.0
        assert np.array_equal(slack.zero_set.on_facet, ~np.eye(3, dtype=bool))

    def test_empty_facet_list(self):
        poly, _ = regular_triangle()
        slack = slack_from_reps(poly, [])
        assert slack.entries.shape == (3, 0)

    def test_square_axis_facets(self):
        poly = unit_square()
        s = 1 / np.sqrt(2)
        H = np.array([[1 / s, 0.0], [0.0, 1 / s], [-1 / s, 0.0], [0.0, -1 / s]])
        slack = slack_from_reps(poly, H)
        # oracle: evaluate all 16 slacks directly
        for i in range(4):
            for j in range(4):
                raw = 1.0 - H[j] @ poly.vertices[i]
                assert abs(slack.entries[i, j] - (0.0 if abs(raw) < 1e-12 else raw)) < 1e-12
        assert np.array_equal(slack.zero_set.on_facet.sum(axis=1), np.full(4, 2))

    def test_negative_slack(self):
        poly, _ = regular_triangle()
        with pytest.raises(NegativeSlack):
            slack_from_reps(poly, 2.0 * poly.vertices)  # h_j = 2 v_j gives S_jj = -1


class TestZeroPattern:
    def test_triangle_pattern(self):
        poly, H = regular_triangle()
        raw = 1.0 - poly.vertices @ H.T
        inc = zero_pattern(raw, 1e-7, d=2)
        assert np.array_equal(inc.on_facet, ~np.eye(3, dtype=bool))

    def test_no_zeros_is_degenerate(self):
        with pytest.raises(DegenerateIncidence):
            zero_pattern(np.ones((2, 2)), 1e-7)

    def test_tiny_entry_counts_as_zero(self):
        S = np.ones((3, 3))
        S[0, 0] = 1e-12
        inc = zero_pattern(S, 1e-7)
        assert inc.on_facet[0, 0] and inc.on_facet.sum() == 1


class TestFacetEnumeration:
    def test_square(self):
        inc = facet_enumeration(unit_square())
        assert inc.m == 4
        assert np.array_equal(inc.on_facet.sum(axis=0), np.full(4, 2))

    def test_cross_polytope_3d(self):
        V = np.vstack([np.eye(3), -np.eye(3)])
        inc = facet_enumeration(PolytopeVRep(3, V))
        # oracle: the 8 facets are exactly the sign-octant triples
        assert inc.m == 8
        found = {tuple(np.flatnonzero(inc.on_facet[:, j])) for j in range(8)}
        expected = set()
        for sx in (0, 3):
            for sy in (1, 4):
                for sz in (2, 5):
                    expected.add(tuple(sorted((sx, sy, sz))))
        assert found == expected

    def test_interior_point(self):
        V = np.vstack([np.eye(3), -np.eye(3), np.zeros((1, 3))])
        with pytest.raises(InteriorPoint):
            facet_enumeration(PolytopeVRep(3, V))


class TestRandomInscribed:
    def test_minimal_point_count_is_a_simplex(self):
        poly, inc = random_inscribed(4, 3, rng_seed=0)
        assert inc.m == 4
        assert np.array_equal(inc.on_facet.sum(axis=0), np.full(4, 3))

    def test_simplicial_and_slack_rank(self):
        poly, inc = random_inscribed(8, 5, rng_seed=42)
        assert np.array_equal(inc.on_facet.sum(axis=0), np.full(inc.m, 5))
        fitted = verify_inscription(poly, inc)
        assert fitted.ok
        slack = slack_from_reps(poly, fitted.facet_normals)
        assert numeric_rank(slack.entries, 1e-6) == 6

    def test_precondition(self):
        with pytest.raises(ValueError):
            random_inscribed(3, 3, rng_seed=1)

    def test_deterministic(self):
        p1, i1 = random_inscribed(6, 3, rng_seed=5)
        p2, i2 = random_inscribed(6, 3, rng_seed=5)
        np.testing.assert_array_equal(p1.vertices, p2.vertices)
        assert np.array_equal(i1.on_facet, i2.on_facet)


class TestNormalizeInscription:
    def test_centered_input_is_unchanged(self):
        poly, _ = regular_triangle()
        out = normalize_inscription(poly)
        np.testing.assert_allclose(out.vertices, poly.vertices, atol=1e-12)

    def test_shifted_triangle(self):
        # triangle on the unit circle with centroid (0.3, 0)
        a = np.arccos(-0.05)
        ang = np.array([0.0, a, -a])
        poly = PolytopeVRep(2, np.column_stack([np.cos(ang), np.sin(ang)]))
        np.testing.assert_allclose(poly.vertices.mean(axis=0), [0.3, 0.0], atol=1e-12)
        inc = facet_enumeration(poly)
        out = normalize_inscription(poly, inc)
        np.testing.assert_allclose(np.linalg.norm(out.vertices, axis=1), 1.0, atol=1e-9)
        assert abs(out.vertices.mean(axis=0)[0]) < 0.3
        assert np.array_equal(facet_enumeration(out).on_facet, inc.on_facet)

    def test_rejects_off_sphere_vertices(self):
        poly = PolytopeVRep(2, np.array([[0.5, 0.0], [0.0, 1.0], [-1.0, 0.0]]))
        with pytest.raises(ValueError):
            normalize_inscription(poly)

    def test_preserves_pattern_on_random_inscriptions(self):
        for seed in range(5):
            poly, inc = random_inscribed(7, 4, rng_seed=100 + seed)
            out = normalize_inscription(poly, inc)
            assert np.array_equal(facet_enumeration(out).on_facet, inc.on_facet)


class TestExtractVertices:
    def test_triangle_round_trip(self):
        poly, H = regular_triangle()
        X = GramBorderMatrix.from_inscription(Inscription(poly, H))
        out = extract_vertices(X, 2)
        gram = out.vertices @ out.vertices.T
        np.testing.assert_allclose(gram, poly.vertices @ poly.vertices.T, atol=1e-9)

    def test_rank_one_border_matrix_has_zero_vertices(self):
        X = GramBorderMatrix(n=3, m=3, data=np.ones((7, 7)))
        with pytest.raises(ZeroVertex):
            extract_vertices(X, 2)

    def test_square_family_certificate_end_to_end(self):
        from inscribe.families import FamilySpec, build_family

        cert = build_family(FamilySpec("ngon", 4))
        out = extract_vertices(cert.gram_matrix(), 2)
        assert verify_inscription(out, cert.incidence).ok


class TestVerifyInscription:
    def test_triangle_matches_itself(self):
        poly, H = regular_triangle()
        report = verify_inscription(poly, slack_from_reps(poly, H).zero_set)
        assert report.ok and report.bad_facets == ()

    def test_wrong_shape_is_not_ok(self):
        report = verify_inscription(unit_square(), FacetIncidence(~np.eye(3, dtype=bool)))
        assert not report.ok

    def test_perturbed_tetrahedron_is_deterministic(self):
        poly, inc = random_inscribed(4, 3, rng_seed=3)
        v = np.array(poly.vertices)
        step = np.array([0.2, 0.0, 0.0])
        v[0] = (v[0] + step) / np.linalg.norm(v[0] + step)
        bumped = PolytopeVRep(3, v)
        first = verify_inscription(bumped, inc)
        second = verify_inscription(bumped, inc)
        assert first.ok == second.ok and first.bad_facets == second.bad_facets
        # regression pin for this seed/perturbation
        assert not first.ok and first.bad_facets == (0, 1, 3)


class TestCountTypes:
    @pytest.mark.parametrize(
        "n,d,expected",
        [(8, 5, 8), (8, 6, 3), (9, 6, 18), (9, 7, 3), (10, 7, 29), (10, 8, 4)],
    )
    def test_paper_values(self, n, d, expected):
        assert count_types(n, d) == expected

    def test_smallest_case(self):
        assert count_types(5, 3) == 1

    def test_nondecreasing_in_d(self):
        counts = [count_types(d + 2, d) for d in range(2, 12)]
        assert all(a <= b for a, b in zip(counts, counts[1:]))

    def test_unsupported(self):
        with pytest.raises(Unsupported):
            count_types(12, 5)


class TestPolytopeJson:
    def test_round_trip(self, tmp_path):
        poly, inc = random_inscribed(5, 3, rng_seed=9)
        path = tmp_path / "poly.json"
        save_polytope(path, poly, inc)
        loaded, loaded_inc = load_polytope(path)
        np.testing.assert_array_equal(loaded.vertices, poly.vertices)
        assert np.array_equal(loaded_inc.on_facet, inc.on_facet)

    def test_facets_optional(self, tmp_path):
        poly, _ = regular_triangle()
        path = tmp_path / "poly.json"
        save_polytope(path, poly)
        _, inc = load_polytope(path)
        assert inc is None

    def test_rejects_bad_indices(self, tmp_path):
        path = tmp_path / "poly.json"
        path.write_text(json.dumps({"dim": 2, "vertices": [[1, 0], [0, 1], [-1, -1]], "facets": [[0, 7]]}))
        with pytest.raises(ValueError):
            load_polytope(path)
