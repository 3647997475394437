"""Additive layer composition, step by step.

Poses never overwrite each other here. Every animation is stored as a
per-joint offset against one neutral base pose, and the three layers
(body, arms, head) stack their offsets onto the body parts they are
allowed to influence:

    body -> head, spine, legs
    arms -> head, spine, arms
    head -> head, spine

Run:  python3 demos/01_additive_pose_composition.py
"""

import numpy as np

from embodiment import quat
from embodiment.pose import (
    AdditiveOffset,
    BodyPart,
    LayerWeights,
    Pose,
    compose_layers,
    make_additive,
    scale_offset,
)
from embodiment.clips import load_manifest
from pathlib import Path

FIXTURES = Path(__file__).parent.parent / "fixtures"

library = load_manifest(str(FIXTURES / "desk_manifest.json"))
skeleton, base = library.skeleton, library.base_pose
names = [j.name for j in skeleton.joints]

print(f"skeleton: {len(skeleton)} joints, parts:",
      {p.value: len(skeleton.part_indices(p)) for p in BodyPart})

# 1. turn an absolute pose into an additive offset --------------------------
clip_pose = base.copy()
lift = quat.from_axis_angle([0, 0, 1], np.pi / 3)  # raise the left arm 60°
for joint in ("l_shoulder", "l_elbow"):
    i = names.index(joint)
    clip_pose.rotations[i] = quat.multiply(clip_pose.rotations[i], lift)

offset = make_additive(clip_pose, base)
angles = np.degrees(quat.angle_between(offset.rotations, quat.identity(len(skeleton))))
print("\noffset angles per joint (degrees):")
for name, angle in zip(names, angles):
    if angle > 1e-6:
        print(f"  {name:12s} {angle:6.1f}")

# 2. weights scale offsets along the shortest arc ---------------------------
for w in (0.0, 0.5, 1.0):
    scaled = scale_offset(offset, w)
    i = names.index("l_shoulder")
    a = np.degrees(quat.angle_between(scaled.rotations[i], quat.IDENTITY))
    print(f"weight {w:.1f} -> l_shoulder offset {float(a):5.1f}°")

# 3. routing: the same offset lands differently per layer -------------------
identity = AdditiveOffset.identity(len(skeleton))
as_arms = compose_layers(skeleton, base, identity, offset, identity, LayerWeights())
as_body = compose_layers(skeleton, base, offset, identity, identity, LayerWeights())

i_arm, i_leg = names.index("l_shoulder"), names.index("l_knee")
print("\nwith the offset on the ARMS layer:")
print("  l_shoulder moved:", not np.array_equal(as_arms.rotations[i_arm], base.rotations[i_arm]))
print("  l_knee moved:    ", not np.array_equal(as_arms.rotations[i_leg], base.rotations[i_leg]))
print("with the offset on the BODY layer:")
print("  l_shoulder moved:", not np.array_equal(as_body.rotations[i_arm], base.rotations[i_arm]))
print("  l_knee moved:    ", not np.array_equal(as_body.rotations[i_leg], base.rotations[i_leg]))

# 4. round trip: base ⊕ make_additive(clip) reproduces the clip -------------
out = compose_layers(skeleton, base, offset, offset, offset, LayerWeights())
err = quat.angle_between(out.rotations, clip_pose.rotations)
spine_head_legs = np.concatenate(
    [skeleton.part_indices(p) for p in (BodyPart.SPINE, BodyPart.HEAD, BodyPart.LEGS)]
)
print(f"\nround-trip rotation error, non-arm joints: {err[spine_head_legs].max():.2e} rad")
print("(arm joints intentionally receive the arms layer only)")
