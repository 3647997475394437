"""Regenerate the bundled manifest fixtures.

    python3 fixtures/make_fixtures.py

Produces desk_manifest.json (the minimal 7-clip arms-only library),
studio_manifest.json (three layers, used by the end-to-end tests and
demos) and empty_manifest.json. The .tsvann annotation files and the
bad/ manifests are hand-written, not generated.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from embodiment import quat  # noqa: F401  (import keeps package path resolution honest)
from embodiment.clips import ClipLibrary, ClipMetadata, Layer, TaxonomyKind, save_manifest
from embodiment.pose import BodyPart, ClipFrames, Joint, Pose, Skeleton

HERE = Path(__file__).parent


def build_skeleton() -> Skeleton:
    j = [
        ("root", None, BodyPart.SPINE),
        ("spine", 0, BodyPart.SPINE),
        ("chest", 1, BodyPart.SPINE),
        ("neck", 2, BodyPart.HEAD),
        ("head", 3, BodyPart.HEAD),
        ("l_shoulder", 2, BodyPart.ARMS),
        ("l_elbow", 5, BodyPart.ARMS),
        ("l_hand", 6, BodyPart.ARMS),
        ("r_shoulder", 2, BodyPart.ARMS),
        ("r_elbow", 8, BodyPart.ARMS),
        ("r_hand", 9, BodyPart.ARMS),
        ("l_hip", 0, BodyPart.LEGS),
        ("l_knee", 11, BodyPart.LEGS),
        ("l_foot", 12, BodyPart.LEGS),
        ("r_hip", 0, BodyPart.LEGS),
        ("r_knee", 14, BodyPart.LEGS),
        ("r_foot", 15, BodyPart.LEGS),
    ]
    return Skeleton(tuple(Joint(n, p, b) for n, p, b in j))


BONE_OFFSETS = {
    "root": (0.0, 0.95, 0.0),
    "spine": (0.0, 0.15, 0.0),
    "chest": (0.0, 0.18, 0.0),
    "neck": (0.0, 0.12, 0.0),
    "head": (0.0, 0.10, 0.0),
    "l_shoulder": (0.18, 0.08, 0.0),
    "l_elbow": (0.26, 0.0, 0.0),
    "l_hand": (0.24, 0.0, 0.0),
    "r_shoulder": (-0.18, 0.08, 0.0),
    "r_elbow": (-0.26, 0.0, 0.0),
    "r_hand": (-0.24, 0.0, 0.0),
    "l_hip": (0.09, -0.05, 0.0),
    "l_knee": (0.0, -0.42, 0.0),
    "l_foot": (0.0, -0.40, 0.0),
    "r_hip": (-0.09, -0.05, 0.0),
    "r_knee": (0.0, -0.42, 0.0),
    "r_foot": (0.0, -0.40, 0.0),
}


def base_pose(skeleton: Skeleton) -> Pose:
    pose = Pose.identity(len(skeleton))
    pose.translations[:] = [BONE_OFFSETS[j.name] for j in skeleton.joints]
    return pose


def wave_frames(skeleton: Skeleton, base: Pose, joints: list[str], duration: float,
                amplitude: float, fps: float = 10.0) -> ClipFrames:
    """Simple sinusoidal swing on the named joints, absolute clip-space poses."""
    names = [j.name for j in skeleton.joints]
    n_frames = int(round(duration * fps)) + 1
    frames = []
    for f in range(n_frames):
        t = f / fps
        pose = base.copy()
        angle = amplitude * math.sin(2.0 * math.pi * t / duration)
        half = 0.5 * angle
        delta = np.array([math.cos(half), 0.0, 0.0, math.sin(half)])
        for name in joints:
            i = names.index(name)
            w, x, y, z = pose.rotations[i]
            dw, dx, dy, dz = delta
            pose.rotations[i] = [
                w * dw - x * dx - y * dy - z * dz,
                w * dx + x * dw + y * dz - z * dy,
                w * dy - x * dz + y * dw + z * dx,
                w * dz + x * dy - y * dx + z * dw,
            ]
        frames.append(pose)
    return ClipFrames(frame_rate=fps, frames=frames)


def stance(cid: str, layer: Layer, duration: float = 2.0, frames=None, tags=()) -> ClipMetadata:
    return ClipMetadata(
        id=cid, kind=TaxonomyKind.STANCE, layer=layer, duration=duration,
        looping=True, frames=frames, semantic_tags=frozenset(tags),
    )


def action(cid: str, kind: TaxonomyKind, layer: Layer, stance_id: str, duration: float,
           tags=(), to_stance=None, blend=0.1, frames=None, likelihood=1.0) -> ClipMetadata:
    return ClipMetadata(
        id=cid, kind=kind, layer=layer, stance=stance_id, to_stance=to_stance,
        duration=duration, blend_in=blend, blend_out=blend,
        semantic_tags=frozenset(tags), base_likelihood=likelihood, frames=frames,
    )


def desk_library() -> ClipLibrary:
    skeleton = build_skeleton()
    base = base_pose(skeleton)
    g, f, t = TaxonomyKind.GESTURE, TaxonomyKind.FIDGET, TaxonomyKind.STANCE_TRANSITION
    arms = Layer.ARMS
    clips = [
        stance("arms_relaxed", arms,
               frames=wave_frames(skeleton, base, ["l_shoulder", "r_shoulder"], 2.0, 0.03)),
        stance("arms_crossed", arms),
        action("beat_left", g, arms, "arms_relaxed", 1.2, tags=("left", "positive"),
               frames=wave_frames(skeleton, base, ["l_shoulder", "l_elbow"], 1.2, 0.5)),
        action("point_right", g, arms, "arms_crossed", 1.0, tags=("right", "positive")),
        action("tap_fingers", f, arms, "arms_relaxed", 0.8, tags=("right",), blend=0.05),
        action("relax_to_crossed", t, arms, "arms_relaxed", 1.5, to_stance="arms_crossed",
               frames=wave_frames(skeleton, base, ["l_elbow", "r_elbow"], 1.5, 0.8)),
        action("crossed_to_relax", t, arms, "arms_crossed", 1.5, to_stance="arms_relaxed"),
    ]
    return ClipLibrary(
        skeleton=skeleton,
        base_pose=base,
        clips={c.id: c for c in clips},
        start_stances={arms: "arms_relaxed"},
    )


ARM_GESTURES = [
    ("beat_l", 1.2, ("left", "positive")),
    ("beat_r", 1.1, ("right", "positive")),
    ("chop_l", 0.9, ("left", "negative")),
    ("sweep_lr", 1.6, ("both", "positive")),
]
ARM_FIDGETS = [
    ("tap_l", 0.7, ("left",)),
    ("scratch_r", 0.9, ("right",)),
    ("shift_lr", 1.3, ("both",)),
]
HEAD_GESTURES = [
    ("nod", 0.8, ("positive-nod", "positive")),
    ("nod_slow", 1.4, ("positive-nod", "positive")),
    ("shake", 0.9, ("negative-shake", "negative")),
    ("shake_fast", 0.6, ("negative-shake", "negative")),
]


def studio_library() -> ClipLibrary:
    skeleton = build_skeleton()
    base = base_pose(skeleton)
    g, f, t = TaxonomyKind.GESTURE, TaxonomyKind.FIDGET, TaxonomyKind.STANCE_TRANSITION
    clips: list[ClipMetadata] = []

    arm_stances = ["a_rest", "a_hips"]
    for sid in arm_stances:
        clips.append(stance(sid, Layer.ARMS))
        for name, dur, tags in ARM_GESTURES:
            clips.append(action(f"{sid}.{name}", g, Layer.ARMS, sid, dur, tags=tags))
        for name, dur, tags in ARM_FIDGETS:
            clips.append(action(f"{sid}.{name}", f, Layer.ARMS, sid, dur, tags=tags))
    side_tags = ("left", "right", "both")
    clips.append(action("a_rest_to_hips", t, Layer.ARMS, "a_rest", 1.4,
                        to_stance="a_hips", tags=side_tags))
    clips.append(action("a_hips_to_rest", t, Layer.ARMS, "a_hips", 1.4,
                        to_stance="a_rest", tags=side_tags))

    head_stances = ["h_neutral", "h_tilt"]
    for sid in head_stances:
        clips.append(stance(sid, Layer.HEAD))
        for name, dur, tags in HEAD_GESTURES:
            clips.append(action(f"{sid}.{name}", g, Layer.HEAD, sid, dur, tags=tags, blend=0.05))
        clips.append(action(f"{sid}.drift", f, Layer.HEAD, sid, 1.1, blend=0.05))
    clips.append(action("h_neutral_to_tilt", t, Layer.HEAD, "h_neutral", 0.9, to_stance="h_tilt"))
    clips.append(action("h_tilt_to_neutral", t, Layer.HEAD, "h_tilt", 0.9, to_stance="h_neutral"))

    body_stances = ["b_center", "b_left"]
    for sid in body_stances:
        clips.append(stance(sid, Layer.BODY))
        clips.append(action(f"{sid}.sway", f, Layer.BODY, sid, 1.8, blend=0.2))
    clips.append(action("b_center_to_left", t, Layer.BODY, "b_center", 1.6, to_stance="b_left"))
    clips.append(action("b_left_to_center", t, Layer.BODY, "b_left", 1.6, to_stance="b_center"))

    return ClipLibrary(
        skeleton=skeleton,
        base_pose=base,
        clips={c.id: c for c in clips},
        start_stances={Layer.ARMS: "a_rest", Layer.HEAD: "h_neutral", Layer.BODY: "b_center"},
    )


def empty_library() -> ClipLibrary:
    skeleton = build_skeleton()
    return ClipLibrary(skeleton=skeleton, base_pose=base_pose(skeleton), clips={})


def main() -> None:
    for name, build in [
        ("desk_manifest.json", desk_library),
        ("studio_manifest.json", studio_library),
        ("empty_manifest.json", empty_library),
    ]:
        path = HERE / name
        path.write_bytes(save_manifest(build()))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
