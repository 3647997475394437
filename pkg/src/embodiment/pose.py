"""Skeletal poses and additive layer composition.

A pose is one transform (rotation + translation) per skeleton joint.
Animation layers do not overwrite joints; they stack additive offsets
on top of a shared neutral base pose. Each layer influences a fixed
set of body parts:

    body layer -> head, spine, legs
    arms layer -> head, spine, arms
    head layer -> head, spine

Offsets compose in the fixed order body, then arms, then head
(quaternion products do not commute, so the order is part of the
contract). Joints that receive no layer keep the base transform
bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import quat


class BodyPart(str, Enum):
    HEAD = "head"
    SPINE = "spine"
    ARMS = "arms"
    LEGS = "legs"


# per body part: which layers apply, in composition order (body, arms, head)
LAYER_ROUTING = {
    BodyPart.HEAD: ("body", "arms", "head"),
    BodyPart.SPINE: ("body", "arms", "head"),
    BodyPart.LEGS: ("body",),
    BodyPart.ARMS: ("arms",),
}


class SkeletonError(ValueError):
    """Malformed skeleton or mismatched pose/skeleton pairing."""


@dataclass(frozen=True)
class Joint:
    name: str
    parent: Optional[int]  # None for the root
    body_part: BodyPart


@dataclass(frozen=True)
class Skeleton:
    joints: tuple[Joint, ...]

    def __post_init__(self):
        roots = [i for i, j in enumerate(self.joints) if j.parent is None]
        if len(roots) != 1:
            raise SkeletonError(f"skeleton must have exactly one root, found {len(roots)}")
        names = set()
        for i, j in enumerate(self.joints):
            if j.parent is not None and not 0 <= j.parent < i:
                raise SkeletonError(
                    f"joint {j.name!r} (index {i}) has parent {j.parent}; "
                    "parents must precede children"
                )
            if j.name in names:
                raise SkeletonError(f"duplicate joint name {j.name!r}")
            names.add(j.name)

    def __len__(self) -> int:
        return len(self.joints)

    def part_indices(self, part: BodyPart) -> np.ndarray:
        return np.array([i for i, j in enumerate(self.joints) if j.body_part == part], dtype=int)

    def to_json_dict(self) -> dict:
        return {
            "joints": [
                {"name": j.name, "parent": j.parent, "body_part": j.body_part.value}
                for j in self.joints
            ]
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Skeleton":
        joints = tuple(
            Joint(j["name"], j["parent"], BodyPart(j["body_part"])) for j in data["joints"]
        )
        return cls(joints)


@dataclass(frozen=True)
class JointTransform:
    rotation: np.ndarray  # unit quaternion [w, x, y, z]
    translation: np.ndarray  # meters

    def to_json_dict(self) -> dict:
        return {
            "rotation": [float(v) for v in self.rotation],
            "translation": [float(v) for v in self.translation],
        }


def _as_transform_arrays(transforms: Sequence[JointTransform]):
    rot = np.array([t.rotation for t in transforms], dtype=float)
    trans = np.array([t.translation for t in transforms], dtype=float)
    return rot, trans


@dataclass
class Pose:
    """One transform per joint. rotations (J,4) scalar-first, translations (J,3)."""

    rotations: np.ndarray
    translations: np.ndarray

    def __post_init__(self):
        self.rotations = np.asarray(self.rotations, dtype=float)
        self.translations = np.asarray(self.translations, dtype=float)
        if self.rotations.shape != (len(self.translations), 4):
            raise SkeletonError("pose rotations/translations joint counts disagree")
        norms = np.linalg.norm(self.rotations, axis=-1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            raise SkeletonError("pose rotations must be unit quaternions (|q|=1 within 1e-6)")

    def __len__(self) -> int:
        return len(self.translations)

    def joint(self, i: int) -> JointTransform:
        return JointTransform(self.rotations[i].copy(), self.translations[i].copy())

    def copy(self) -> "Pose":
        return Pose(self.rotations.copy(), self.translations.copy())

    @classmethod
    def identity(cls, n_joints: int) -> "Pose":
        return cls(quat.identity(n_joints), np.zeros((n_joints, 3)))

    @classmethod
    def from_joints(cls, transforms: Sequence[JointTransform]) -> "Pose":
        return cls(*_as_transform_arrays(transforms))

    def to_json_list(self) -> list[dict]:
        return [self.joint(i).to_json_dict() for i in range(len(self))]

    @classmethod
    def from_json_list(cls, data: Sequence[dict]) -> "Pose":
        rot = np.array([d["rotation"] for d in data], dtype=float)
        trans = np.array([d["translation"] for d in data], dtype=float)
        return cls(rot, trans)


@dataclass
class AdditiveOffset:
    """Per-joint delta relative to the base pose.

    Rotations are local deltas (base ⊕ delta = base_rot * delta_rot),
    translations plain differences. The identity offset leaves the base
    pose untouched.
    """

    rotations: np.ndarray
    translations: np.ndarray

    def __post_init__(self):
        self.rotations = np.asarray(self.rotations, dtype=float)
        self.translations = np.asarray(self.translations, dtype=float)
        if self.rotations.shape != (len(self.translations), 4):
            raise SkeletonError("offset rotations/translations joint counts disagree")

    def __len__(self) -> int:
        return len(self.translations)

    @classmethod
    def identity(cls, n_joints: int) -> "AdditiveOffset":
        return cls(quat.identity(n_joints), np.zeros((n_joints, 3)))

    def to_json_list(self) -> list[dict]:
        return [
            {
                "rotation": [float(v) for v in self.rotations[i]],
                "translation": [float(v) for v in self.translations[i]],
            }
            for i in range(len(self))
        ]

    @classmethod
    def from_json_list(cls, data: Sequence[dict]) -> "AdditiveOffset":
        rot = np.array([d["rotation"] for d in data], dtype=float)
        trans = np.array([d["translation"] for d in data], dtype=float)
        return cls(rot, trans)


@dataclass(frozen=True)
class LayerWeights:
    """Influence weight per layer, each in [0, 1]. Defaults to full influence."""

    w_body: float = 1.0
    w_arms: float = 1.0
    w_head: float = 1.0

    def __post_init__(self):
        for name in ("w_body", "w_arms", "w_head"):
            w = getattr(self, name)
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {w}")


def make_additive(clip_pose: Pose, base_pose: Pose) -> AdditiveOffset:
    """Convert an absolute pose into an offset relative to the base pose.

    For every joint, base ⊕ offset reproduces the clip pose, where ⊕ is
    quaternion multiplication for rotations and addition for translations.
    """
    if len(clip_pose) != len(base_pose):
        raise SkeletonError(
            f"pose joint counts differ: clip has {len(clip_pose)}, base has {len(base_pose)}"
        )
    rel = quat.multiply(quat.conjugate(base_pose.rotations), clip_pose.rotations)
    return AdditiveOffset(quat.normalize(rel), clip_pose.translations - base_pose.translations)


def scale_offset(offset: AdditiveOffset, w: float) -> AdditiveOffset:
    """Scale an offset by weight w: rotations interpolate from identity
    toward the full delta along the shortest arc, translations multiply."""
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"offset weight must be in [0, 1], got {w}")
    if w == 1.0:
        return AdditiveOffset(offset.rotations.copy(), offset.translations.copy())
    if w == 0.0:
        return AdditiveOffset.identity(len(offset))
    return AdditiveOffset(quat.scale(offset.rotations, w), offset.translations * w)


def apply_offset(base: Pose, offset: AdditiveOffset) -> Pose:
    """base ⊕ offset on every joint, ignoring layer routing."""
    if len(base) != len(offset):
        raise SkeletonError(
            f"joint counts differ: base has {len(base)}, offset has {len(offset)}"
        )
    rot = quat.normalize(quat.multiply(base.rotations, offset.rotations))
    return Pose(rot, base.translations + offset.translations)


def compose_layers(
    skeleton: Skeleton,
    base: Pose,
    body: AdditiveOffset,
    arms: AdditiveOffset,
    head: AdditiveOffset,
    weights: LayerWeights = LayerWeights(),
) -> Pose:
    """Compose the three layer offsets onto the base pose.

    Each joint receives only the layers its body part is routed to, in
    the order body, arms, head; each offset is scaled by its layer weight
    before application. Joints with no routed layer are copied from the
    base unchanged. Rotations are renormalized after composition to keep
    them unit length.
    """
    n = len(skeleton)
    for name, value in (("base", base), ("body", body), ("arms", arms), ("head", head)):
        if len(value) != n:
            raise SkeletonError(
                f"{name} has {len(value)} joints but skeleton has {n}"
            )
    layers = {
        "body": scale_offset(body, weights.w_body),
        "arms": scale_offset(arms, weights.w_arms),
        "head": scale_offset(head, weights.w_head),
    }
    out_rot = base.rotations.copy()
    out_trans = base.translations.copy()
    for part, layer_names in LAYER_ROUTING.items():
        idx = skeleton.part_indices(part)
        if len(idx) == 0:
            continue
        # accumulate the combined delta first so joints whose routed offsets
        # are all identity keep the base transform bit-for-bit
        delta_rot = quat.identity(len(idx))
        delta_trans = np.zeros((len(idx), 3))
        for layer_name in layer_names:
            off = layers[layer_name]
            delta_rot = quat.multiply(delta_rot, off.rotations[idx])
            delta_trans = delta_trans + off.translations[idx]
        changed = np.any(delta_rot != quat.IDENTITY, axis=-1)
        touched = idx[changed]
        if len(touched):
            out_rot[touched] = quat.normalize(
                quat.multiply(base.rotations[touched], delta_rot[changed])
            )
        out_trans[idx] = base.translations[idx] + delta_trans
    return Pose(out_rot, out_trans)


@dataclass
class ClipFrames:
    """Keyframed joint animation sampled at a fixed frame rate.

    Frames hold absolute poses in clip space; they are converted to
    additive offsets against the base pose at composition time. Sampling
    between keyframes interpolates translations linearly and rotations
    along the shortest arc.
    """

    frame_rate: float
    frames: list[Pose] = field(default_factory=list)

    def __post_init__(self):
        if self.frame_rate <= 0:
            raise ValueError(f"frame_rate must be > 0, got {self.frame_rate}")
        counts = {len(f) for f in self.frames}
        if len(counts) > 1:
            raise SkeletonError("all keyframes must share one joint count")

    @property
    def duration(self) -> float:
        if not self.frames:
            return 0.0
        return (len(self.frames) - 1) / self.frame_rate

    def sample(self, t: float) -> Pose:
        if not self.frames:
            raise ValueError("clip has no keyframes")
        if len(self.frames) == 1:
            return self.frames[0].copy()
        x = np.clip(t * self.frame_rate, 0.0, len(self.frames) - 1)
        i = int(np.floor(x))
        if i >= len(self.frames) - 1:
            return self.frames[-1].copy()
        u = x - i
        a, b = self.frames[i], self.frames[i + 1]
        rot = quat.slerp(a.rotations, b.rotations, u)
        trans = (1.0 - u) * a.translations + u * b.translations
        return Pose(rot, trans)

    def to_json_dict(self) -> dict:
        return {
            "frame_rate": self.frame_rate,
            "keyframes": [f.to_json_list() for f in self.frames],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ClipFrames":
        frames = [Pose.from_json_list(f) for f in data["keyframes"]]
        return cls(frame_rate=float(data["frame_rate"]), frames=frames)
