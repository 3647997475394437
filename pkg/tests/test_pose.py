import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from embodiment import quat
from embodiment.pose import (
    AdditiveOffset,
    BodyPart,
    ClipFrames,
    LayerWeights,
    Pose,
    Skeleton,
    SkeletonError,
    Joint,
    compose_layers,
    make_additive,
    scale_offset,
)

from oracles import (
    compose_reference,
    quat_mul_ref,
    quat_scale_ref,
    random_pose,
    rotation_angle,
)


def small_skeleton() -> Skeleton:
    return Skeleton(
        (
            Joint("root", None, BodyPart.SPINE),
            Joint("chest", 0, BodyPart.SPINE),
            Joint("head", 1, BodyPart.HEAD),
            Joint("l_arm", 1, BodyPart.ARMS),
            Joint("r_arm", 1, BodyPart.ARMS),
            Joint("l_leg", 0, BodyPart.LEGS),
            Joint("r_leg", 0, BodyPart.LEGS),
        )
    )


class TestQuat:
    def test_multiply_matches_scipy(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(20, 4))
        b = rng.normal(size=(20, 4))
        a /= np.linalg.norm(a, axis=-1, keepdims=True)
        b /= np.linalg.norm(b, axis=-1, keepdims=True)
        got = quat.multiply(a, b)
        want = quat_mul_ref(a, b)
        assert rotation_angle(got, want).max() < 1e-12

    def test_scale_endpoints(self):
        q = quat.from_axis_angle([0, 1, 0], 1.2)
        assert np.allclose(quat.scale(q, 0.0), [1, 0, 0, 0])
        assert np.allclose(quat.scale(q, 1.0), q)

    def test_scale_matches_rotvec_fraction(self):
        rng = np.random.default_rng(4)
        q = rng.normal(size=(15, 4))
        q /= np.linalg.norm(q, axis=-1, keepdims=True)
        for w in (0.25, 0.5, 0.9):
            got = quat.scale(q, w)
            want = np.array([quat_scale_ref(qi, w) for qi in q])
            assert rotation_angle(got, want).max() < 1e-10

    def test_slerp_midpoint(self):
        a = quat.from_axis_angle([1, 0, 0], 0.0)
        b = quat.from_axis_angle([1, 0, 0], np.pi / 2)
        mid = quat.slerp(a, b, 0.5)
        assert np.allclose(mid, quat.from_axis_angle([1, 0, 0], np.pi / 4), atol=1e-12)


class TestSkeleton:
    def test_requires_single_root(self):
        with pytest.raises(SkeletonError):
            Skeleton((Joint("a", None, BodyPart.SPINE), Joint("b", None, BodyPart.SPINE)))

    def test_parent_must_precede_child(self):
        with pytest.raises(SkeletonError):
            Skeleton((Joint("a", 1, BodyPart.SPINE), Joint("b", None, BodyPart.SPINE)))

    def test_json_round_trip(self):
        s = small_skeleton()
        assert Skeleton.from_json_dict(s.to_json_dict()) == s


class TestMakeAdditive:
    def test_identity_case(self):
        base = Pose.identity(7)
        off = make_additive(base, base)
        assert np.allclose(off.rotations, quat.identity(7))
        assert np.allclose(off.translations, 0.0)

    def test_forced_offset(self):
        # base rotation r, clip rotation r*q  ->  offset rotation q
        r = quat.from_axis_angle([0, 0, 1], 0.7)
        q = quat.from_axis_angle([1, 0, 0], 0.4)
        base = Pose(np.array([r]), np.zeros((1, 3)))
        clip = Pose(np.array([quat.multiply(r, q)]), np.zeros((1, 3)))
        off = make_additive(clip, base)
        assert rotation_angle(off.rotations[0], q)[0] < 1e-12

    def test_round_trip_random(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            base = random_pose(rng, 7)
            clip = random_pose(rng, 7)
            off = make_additive(clip, base)
            # recompose through the scipy reference, joint by joint
            back_rot = quat_mul_ref(base.rotations, off.rotations)
            assert rotation_angle(back_rot, clip.rotations).max() < 1e-6
            assert np.allclose(base.translations + off.translations, clip.translations, atol=1e-9)

    def test_rejects_mismatched_joint_counts(self):
        with pytest.raises(SkeletonError):
            make_additive(Pose.identity(3), Pose.identity(4))


class TestScaleOffset:
    def test_zero_weight_is_identity(self):
        rng = np.random.default_rng(5)
        off = make_additive(random_pose(rng, 4), random_pose(rng, 4))
        scaled = scale_offset(off, 0.0)
        assert np.array_equal(scaled.rotations, quat.identity(4))
        assert np.array_equal(scaled.translations, np.zeros((4, 3)))

    def test_full_weight_unchanged(self):
        rng = np.random.default_rng(6)
        off = make_additive(random_pose(rng, 4), random_pose(rng, 4))
        scaled = scale_offset(off, 1.0)
        assert np.array_equal(scaled.rotations, off.rotations)
        assert np.array_equal(scaled.translations, off.translations)

    def test_half_of_right_angle_is_45_degrees(self):
        q90 = quat.from_axis_angle([0, 1, 0], np.pi / 2)
        off = AdditiveOffset(np.array([q90]), np.zeros((1, 3)))
        scaled = scale_offset(off, 0.5)
        q45 = quat.from_axis_angle([0, 1, 0], np.pi / 4)
        assert rotation_angle(scaled.rotations[0], q45)[0] < 1e-12

    def test_rejects_out_of_range_weight(self):
        off = AdditiveOffset.identity(2)
        with pytest.raises(ValueError):
            scale_offset(off, 1.5)
        with pytest.raises(ValueError):
            scale_offset(off, -0.1)


def random_offset(rng, n):
    return make_additive(random_pose(rng, n), random_pose(rng, n))


class TestComposeLayers:
    def test_all_identity_returns_base_exactly(self):
        skel = small_skeleton()
        rng = np.random.default_rng(7)
        base = random_pose(rng, len(skel))
        ident = AdditiveOffset.identity(len(skel))
        out = compose_layers(skel, base, ident, ident, ident)
        assert np.array_equal(out.rotations, base.rotations)
        assert np.array_equal(out.translations, base.translations)

    def test_zero_weights_return_base(self):
        skel = small_skeleton()
        rng = np.random.default_rng(8)
        base = random_pose(rng, len(skel))
        out = compose_layers(
            skel,
            base,
            random_offset(rng, len(skel)),
            random_offset(rng, len(skel)),
            random_offset(rng, len(skel)),
            LayerWeights(0.0, 0.0, 0.0),
        )
        assert np.array_equal(out.rotations, base.rotations)
        assert np.array_equal(out.translations, base.translations)

    def test_body_only_routing(self):
        skel = small_skeleton()
        rng = np.random.default_rng(9)
        base = random_pose(rng, len(skel))
        clip = random_pose(rng, len(skel))
        body = make_additive(clip, base)
        ident = AdditiveOffset.identity(len(skel))
        out = compose_layers(skel, base, body, ident, ident)
        for i, joint in enumerate(skel.joints):
            if joint.body_part == BodyPart.ARMS:
                # arm joints receive only the arms layer: unchanged
                assert np.array_equal(out.rotations[i], base.rotations[i])
                assert np.array_equal(out.translations[i], base.translations[i])
            else:
                assert rotation_angle(out.rotations[i], clip.rotations[i])[0] < 1e-6
                assert np.allclose(out.translations[i], clip.translations[i], atol=1e-9)

    def test_matches_reference_composition(self):
        skel = small_skeleton()
        rng = np.random.default_rng(10)
        for _ in range(10):
            base = random_pose(rng, len(skel))
            offs = {name: random_offset(rng, len(skel)) for name in ("body", "arms", "head")}
            weights = dict(body=float(rng.uniform()), arms=float(rng.uniform()), head=float(rng.uniform()))
            got = compose_layers(
                skel, base, offs["body"], offs["arms"], offs["head"],
                LayerWeights(weights["body"], weights["arms"], weights["head"]),
            )
            want = compose_reference(skel, base, offs, weights)
            assert rotation_angle(got.rotations, want.rotations).max() < 1e-9
            assert np.allclose(got.translations, want.translations, atol=1e-9)

    def test_output_rotations_stay_unit(self):
        skel = small_skeleton()
        rng = np.random.default_rng(12)
        base = random_pose(rng, len(skel))
        out = compose_layers(
            skel, base,
            random_offset(rng, len(skel)),
            random_offset(rng, len(skel)),
            random_offset(rng, len(skel)),
        )
        assert np.abs(np.linalg.norm(out.rotations, axis=-1) - 1.0).max() < 1e-6


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_routing_invariance_property(seed):
    """Arm joints never react to body/head offsets; legs never to arms/head."""
    skel = small_skeleton()
    rng = np.random.default_rng(seed)
    base = random_pose(rng, len(skel))
    arms = random_offset(rng, len(skel))
    body_a, body_b = random_offset(rng, len(skel)), random_offset(rng, len(skel))
    head_a, head_b = random_offset(rng, len(skel)), random_offset(rng, len(skel))
    out_a = compose_layers(skel, base, body_a, arms, head_a)
    out_b = compose_layers(skel, base, body_b, arms, head_b)
    arm_idx = skel.part_indices(BodyPart.ARMS)
    assert np.array_equal(out_a.rotations[arm_idx], out_b.rotations[arm_idx])
    assert np.array_equal(out_a.translations[arm_idx], out_b.translations[arm_idx])
    body = random_offset(rng, len(skel))
    out_c = compose_layers(skel, base, body, body_a, head_a)
    out_d = compose_layers(skel, base, body, body_b, head_b)
    leg_idx = skel.part_indices(BodyPart.LEGS)
    assert np.array_equal(out_c.rotations[leg_idx], out_d.rotations[leg_idx])
    assert np.array_equal(out_c.translations[leg_idx], out_d.translations[leg_idx])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_round_trip_property(seed):
    """Body-routed joints reproduce the clip after make_additive + compose."""
    skel = small_skeleton()
    rng = np.random.default_rng(seed)
    base = random_pose(rng, len(skel))
    clip = random_pose(rng, len(skel))
    off = make_additive(clip, base)
    ident = AdditiveOffset.identity(len(skel))
    out = compose_layers(skel, base, off, ident, ident, LayerWeights(1.0, 1.0, 1.0))
    for part in (BodyPart.HEAD, BodyPart.SPINE, BodyPart.LEGS):
        idx = skel.part_indices(part)
        assert rotation_angle(out.rotations[idx], clip.rotations[idx]).max() < 1e-6
        assert np.allclose(out.translations[idx], clip.translations[idx], atol=1e-9)


class TestClipFrames:
    def test_sample_interpolates(self):
        q0 = quat.identity(1)
        q1 = np.array([quat.from_axis_angle([0, 0, 1], np.pi / 2)])
        frames = ClipFrames(
            frame_rate=1.0,
            frames=[Pose(q0, np.zeros((1, 3))), Pose(q1, np.ones((1, 3)))],
        )
        mid = frames.sample(0.5)
        assert np.allclose(mid.translations, 0.5)
        want = quat.from_axis_angle([0, 0, 1], np.pi / 4)
        assert rotation_angle(mid.rotations[0], want)[0] < 1e-12

    def test_sample_clamps_to_ends(self):
        p = Pose.identity(2)
        frames = ClipFrames(frame_rate=10.0, frames=[p, p, p])
        assert np.array_equal(frames.sample(99.0).rotations, p.rotations)

    def test_json_round_trip(self):
        rng = np.random.default_rng(13)
        frames = ClipFrames(frame_rate=5.0, frames=[random_pose(rng, 3) for _ in range(4)])
        back = ClipFrames.from_json_dict(frames.to_json_dict())
        assert back.frame_rate == frames.frame_rate
        for a, b in zip(frames.frames, back.frames):
            assert np.array_equal(a.rotations, b.rotations)
            assert np.array_equal(a.translations, b.translations)
