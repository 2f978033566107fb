import numpy as np
import pytest

from chamferkit import (
    PointCloud,
    TransformSpec,
    acosh1p,
    chamfer,
    chamfer_poincare,
    clip_to_ball,
    match_brute,
    poincare_distance,
    transform,
)

from testutil import ball_cloud, mixed_cloud, naive_chamfer, uniform_cloud

ALL_KINDS = [
    TransformSpec("l1"),
    TransformSpec("l2"),
    TransformSpec("exp", alpha=0.7, beta=1.0),
    TransformSpec("exp", alpha=1.0, beta=2.0),
    TransformSpec("hyper", alpha=1.0, beta=2.0),
    TransformSpec("hyper", alpha=2.0, beta=1.0),
    TransformSpec("hyper", alpha=0.5, beta=3.0),
]


class TestTransformSpec:
    def test_defaults(self):
        spec = TransformSpec("hyper")
        assert spec.alpha == 1.0 and spec.beta == 2.0

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown transform kind"):
            TransformSpec("l3")

    def test_positivity_enforced_for_parametric_kinds(self):
        for kind in ("exp", "hyper"):
            with pytest.raises(ValueError):
                TransformSpec(kind, alpha=0.0)
            with pytest.raises(ValueError):
                TransformSpec(kind, alpha=-1.0)
            with pytest.raises(ValueError):
                TransformSpec(kind, beta=0.0)
            with pytest.raises(ValueError):
                TransformSpec(kind, alpha=np.inf)

    def test_l1_l2_ignore_parameters(self):
        TransformSpec("l1", alpha=-5.0)  # no error: parameters unused


class TestTransform:
    def test_zero_maps_to_zero_all_kinds(self):
        for spec in ALL_KINDS:
            assert transform(spec, 0.0) == 0.0

    def test_spot_values(self):
        assert transform(TransformSpec("hyper", 1.0, 2.0), 1.0) == pytest.approx(
            1.3169578969248166, abs=1e-12
        )
        assert transform(TransformSpec("hyper", 0.5, 2.0), 2.0) == pytest.approx(
            1.7627471740390861, abs=1e-12
        )
        assert transform(TransformSpec("l2"), 3.0) == 9.0
        assert transform(TransformSpec("l1"), 3.0) == 3.0
        assert transform(TransformSpec("exp", 1.0, 1.0), 1.0) == pytest.approx(
            1.0 - np.exp(-1.0), rel=1e-15
        )

    def test_exp_bounded_and_saturating(self):
        spec = TransformSpec("exp", alpha=1.0, beta=1.0)
        d = np.linspace(0, 30, 400)
        v = transform(spec, d)
        assert (np.diff(v) > 0).all()
        assert v.max() < 1.0
        # far out the curve is indistinguishable from its asymptote
        assert transform(spec, 1e6) == 1.0
        assert transform(spec, np.array([40.0, 1e3, 1e6])).max() <= 1.0

    def test_negative_distance_rejected(self):
        for spec in ALL_KINDS:
            with pytest.raises(ValueError, match="non-negative"):
                transform(spec, -0.5)

    def test_array_input_matches_scalar(self):
        spec = TransformSpec("hyper", 1.3, 2.0)
        d = np.array([0.0, 0.5, 2.0])
        out = transform(spec, d)
        assert out.shape == (3,)
        for i, x in enumerate(d):
            assert out[i] == transform(spec, float(x))

    def test_strictly_increasing_random_triples(self):
        rng = np.random.default_rng(20)
        for _ in range(2000):
            alpha = float(rng.uniform(0.05, 8.0))
            beta = float(rng.uniform(0.2, 4.0))
            d1, d2 = np.sort(rng.uniform(0.0, 10.0, size=2))
            if d1 == d2:
                continue
            spec = TransformSpec("hyper", alpha, beta)
            assert transform(spec, d1) < transform(spec, d2)

    def test_small_distance_series_agreement(self):
        # sqrt(2a)*d*(1 - a*d^2/12) approximates the hyper curve near zero
        for alpha in (0.5, 1.0, 2.0, 5.0):
            spec = TransformSpec("hyper", alpha, 2.0)
            d = np.logspace(-10, -4, 200)
            series = np.sqrt(2 * alpha) * d * (1 - alpha * d * d / 12.0)
            np.testing.assert_allclose(transform(spec, d), series, rtol=1e-8)

    def test_acosh1p_matches_library_away_from_zero(self):
        # only away from zero: below u ~ 0.1 the plain arccosh(1 + u)
        # loses digits to cancellation, which is what acosh1p avoids (the
        # small-u regime is checked against the series expansion instead)
        u = np.logspace(-1, 6, 100)
        np.testing.assert_allclose(acosh1p(u), np.arccosh(1.0 + u), rtol=1e-14)


class TestPoincareDistance:
    def test_coincident_zero(self):
        assert poincare_distance([0.3, 0.1, 0], [0.3, 0.1, 0]) == 0.0

    def test_origin_closed_form(self):
        # from the origin the geodesic reduces to 2*artanh(r)
        assert poincare_distance([0, 0, 0], [0.5, 0, 0]) == pytest.approx(
            np.log(3.0), abs=1e-12
        )
        r = 0.77
        assert poincare_distance([0, 0, 0], [0, r, 0]) == pytest.approx(
            2 * np.arctanh(r), rel=1e-12
        )

    def test_symmetry(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            p = rng.uniform(-0.5, 0.5, 3)
            q = rng.uniform(-0.5, 0.5, 3)
            assert poincare_distance(p, q) == poincare_distance(q, p)

    def test_boundary_rejected(self):
        with pytest.raises(ValueError, match="unit ball"):
            poincare_distance([1, 0, 0], [0, 0, 0])
        with pytest.raises(ValueError, match="unit ball"):
            poincare_distance([0, 0, 0], [0.8, 0.8, 0])


class TestClipToBall:
    def test_radial_scaling(self):
        c = PointCloud([[2, 0, 0], [0.1, 0, 0]])
        out = clip_to_ball(c, 0.9)
        np.testing.assert_allclose(out.points[0], [0.9, 0, 0], rtol=1e-15)
        np.testing.assert_array_equal(out.points[1], [0.1, 0, 0])

    def test_all_norms_bounded(self):
        rng = np.random.default_rng(22)
        c = PointCloud(rng.normal(scale=2.0, size=(200, 3)))
        out = clip_to_ball(c, 0.97)
        assert (np.linalg.norm(out.points, axis=1) <= 0.97 + 1e-15).all()

    def test_invalid_max_norm(self):
        c = PointCloud([[0, 0, 0]])
        for bad in (0.0, 1.0, -0.5, 2.0):
            with pytest.raises(ValueError):
                clip_to_ball(c, bad)


class TestChamfer:
    def test_identity_is_exactly_zero(self):
        rng = np.random.default_rng(23)
        c = uniform_cloud(rng, 100)
        for spec in ALL_KINDS:
            assert chamfer(c, c, spec).value == 0.0

    def test_single_pair_hyper(self):
        a = PointCloud([[0, 0, 0]])
        b = PointCloud([[1, 0, 0]])
        rep = chamfer(a, b, TransformSpec("hyper", 1.0, 2.0))
        assert rep.value == pytest.approx(2.6339157938496336, abs=1e-10)
        assert rep.d1 == pytest.approx(rep.d2)

    def test_hand_enumeration_l1_l2(self):
        a = PointCloud([[0, 0, 0], [2, 0, 0]])
        b = PointCloud([[1, 0, 0]])
        assert chamfer(a, b, TransformSpec("l2")).value == pytest.approx(2.0, abs=1e-15)
        assert chamfer(a, b, TransformSpec("l1")).value == pytest.approx(2.0, abs=1e-15)

    def test_report_parts_sum(self):
        rng = np.random.default_rng(24)
        a = uniform_cloud(rng, 37)
        b = uniform_cloud(rng, 53)
        for spec in ALL_KINDS:
            rep = chamfer(a, b, spec)
            assert rep.value == rep.d1 + rep.d2
            assert rep.value >= 0

    def test_symmetry(self):
        rng = np.random.default_rng(25)
        for _ in range(10):
            a = mixed_cloud(rng, int(rng.integers(2, 120)))
            b = mixed_cloud(rng, int(rng.integers(2, 120)))
            for spec in ALL_KINDS:
                ab = chamfer(a, b, spec)
                ba = chamfer(b, a, spec)
                assert ab.value == pytest.approx(ba.value, rel=1e-12)
                assert ab.d1 == pytest.approx(ba.d2, rel=1e-12)

    def test_translation_invariance(self):
        rng = np.random.default_rng(26)
        a = uniform_cloud(rng, 64)
        b = uniform_cloud(rng, 80)
        for _ in range(5):
            v = rng.uniform(-30, 30, 3)
            a2 = PointCloud(a.points + v)
            b2 = PointCloud(b.points + v)
            for spec in ALL_KINDS:
                assert chamfer(a2, b2, spec).value == pytest.approx(
                    chamfer(a, b, spec).value, rel=1e-10
                )

    def test_matches_min_over_transformed_oracle(self):
        rng = np.random.default_rng(27)
        for _ in range(12):
            a = mixed_cloud(rng, int(rng.integers(1, 100)))
            b = mixed_cloud(rng, int(rng.integers(1, 100)))
            for spec in ALL_KINDS:
                expected = naive_chamfer(a, b, spec)
                got = chamfer(a, b, spec).value
                assert got == pytest.approx(expected, rel=1e-12)

    def test_precomputed_match_reused(self):
        rng = np.random.default_rng(28)
        a = uniform_cloud(rng, 30)
        b = uniform_cloud(rng, 40)
        m = match_brute(a, b)
        rep = chamfer(a, b, TransformSpec("l2"), match=m)
        assert rep.match is m
        assert rep.value == chamfer(a, b, TransformSpec("l2")).value


class TestChamferPoincare:
    def test_identity_zero(self):
        rng = np.random.default_rng(29)
        c = ball_cloud(rng, 50)
        assert chamfer_poincare(c, c).value == 0.0

    def test_single_pair_hand_value(self):
        a = PointCloud([[0, 0, 0]])
        b = PointCloud([[0.5, 0, 0]])
        assert chamfer_poincare(a, b).value == pytest.approx(2 * np.log(3.0), abs=1e-12)

    def test_two_target_hand_value(self):
        # both b-points equidistant from the origin: d1 = ln3, d2 = ln3
        a = PointCloud([[0, 0, 0]])
        b = PointCloud([[0.5, 0, 0], [0, 0.5, 0]])
        assert chamfer_poincare(a, b).value == pytest.approx(2 * np.log(3.0), abs=1e-12)

    def test_matches_pairwise_oracle(self):
        rng = np.random.default_rng(30)
        for _ in range(8):
            a = ball_cloud(rng, int(rng.integers(1, 60)))
            b = ball_cloud(rng, int(rng.integers(1, 60)))
            dm = np.empty((len(a), len(b)))
            for j in range(len(a)):
                for k in range(len(b)):
                    dm[j, k] = poincare_distance(a.points[j], b.points[k])
            expected = dm.min(axis=1).mean() + dm.min(axis=0).mean()
            assert chamfer_poincare(a, b).value == pytest.approx(expected, rel=1e-12)

    def test_domain_violation_rejected(self):
        inside = PointCloud([[0.1, 0, 0]])
        outside = PointCloud([[0.0, 0, 0], [1.2, 0, 0]])
        with pytest.raises(ValueError, match="unit ball"):
            chamfer_poincare(inside, outside)
        with pytest.raises(ValueError, match="unit ball"):
            chamfer_poincare(outside, inside)

    def test_not_translation_invariant(self):
        # the counterexample the Euclidean kinds cannot produce
        a = PointCloud([[0.0, 0, 0]])
        b = PointCloud([[0.2, 0, 0]])
        base = chamfer_poincare(a, b).value
        shift = np.array([0.7, 0, 0])
        moved = chamfer_poincare(
            PointCloud(a.points + shift), PointCloud(b.points + shift)
        ).value
        assert abs(moved - base) > 0.1

    def test_symmetry(self):
        rng = np.random.default_rng(31)
        a = ball_cloud(rng, 40)
        b = ball_cloud(rng, 30)
        assert chamfer_poincare(a, b).value == pytest.approx(
            chamfer_poincare(b, a).value, rel=1e-12
        )
