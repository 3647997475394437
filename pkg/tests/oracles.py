"""Independent reference implementations the tests check against.

Everything here recomputes expected values through a different route
than the library (scipy rotations, brute-force rule enumeration, direct
formula evaluation) so the tests do not simply mirror the code under
test.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.transform import Rotation

from embodiment.clips import ClipLibrary, ClipMetadata, Layer, TaxonomyKind
from embodiment.pose import BodyPart, Joint, Pose, Skeleton

# --- quaternion reference (scipy uses xyzw order; the library uses wxyz) ---


def to_scipy(q_wxyz: np.ndarray) -> Rotation:
    q = np.asarray(q_wxyz, dtype=float)
    return Rotation.from_quat(np.roll(q, -1, axis=-1))


def from_scipy(r: Rotation) -> np.ndarray:
    return np.roll(r.as_quat(), 1, axis=-1)


def quat_mul_ref(a_wxyz, b_wxyz) -> np.ndarray:
    return from_scipy(to_scipy(a_wxyz) * to_scipy(b_wxyz))


def quat_scale_ref(q_wxyz, w: float) -> np.ndarray:
    """Shortest-arc fractional rotation via rotation vectors."""
    return from_scipy(Rotation.from_rotvec(w * to_scipy(q_wxyz).as_rotvec()))


def rotation_angle(a_wxyz, b_wxyz) -> np.ndarray:
    """Geodesic distance between rotations, radians."""
    rel = to_scipy(a_wxyz).inv() * to_scipy(b_wxyz)
    return np.atleast_1d(rel.magnitude())


def compose_reference(skeleton: Skeleton, base: Pose, offsets: dict, weights: dict) -> Pose:
    """Per-joint application of the documented routing table via scipy."""
    routing = {
        BodyPart.HEAD: ["body", "arms", "head"],
        BodyPart.SPINE: ["body", "arms", "head"],
        BodyPart.LEGS: ["body"],
        BodyPart.ARMS: ["arms"],
    }
    rot = base.rotations.copy()
    trans = base.translations.copy()
    for i, joint in enumerate(skeleton.joints):
        r = to_scipy(base.rotations[i])
        t = np.array(base.translations[i])
        for layer in routing[joint.body_part]:
            off = offsets[layer]
            w = weights[layer]
            r = r * Rotation.from_rotvec(w * to_scipy(off.rotations[i]).as_rotvec())
            t = t + w * off.translations[i]
        rot[i] = from_scipy(r)
        trans[i] = t
    return Pose(rot / np.linalg.norm(rot, axis=-1, keepdims=True), trans)


# --- random poses -----------------------------------------------------------


def random_pose(rng: np.random.Generator, n_joints: int) -> Pose:
    q = rng.normal(size=(n_joints, 4))
    q /= np.linalg.norm(q, axis=-1, keepdims=True)
    return Pose(q, rng.normal(scale=0.3, size=(n_joints, 3)))


# --- brute-force state machine expansion ------------------------------------


def expand_oracle(clips: list[ClipMetadata]) -> tuple[set[str], set[tuple[str, str, float]]]:
    """Enumerate the expansion rules directly from the clip list."""
    nodes = {c.id for c in clips}
    by_id = {c.id: c for c in clips}
    edges: set[tuple[str, str, float]] = set()

    def exit_time(cid: str) -> float:
        c = by_id[cid]
        return c.trim_end - c.blend_out

    for c in clips:
        if c.kind == TaxonomyKind.STANCE:
            edges.add((c.id, c.id, exit_time(c.id)))  # looping self-loop
        elif c.kind in (TaxonomyKind.GESTURE, TaxonomyKind.FIDGET):
            edges.add((c.stance, c.id, exit_time(c.stance)))
            edges.add((c.id, c.stance, exit_time(c.id)))
        elif c.kind == TaxonomyKind.STANCE_TRANSITION:
            edges.add((c.stance, c.id, exit_time(c.stance)))
            edges.add((c.id, c.to_stance, exit_time(c.id)))
    return nodes, edges


def count_formulas(clips: list[ClipMetadata]) -> tuple[int, int]:
    """Closed-form node/edge counts for a valid graph."""
    n_stance = sum(1 for c in clips if c.kind == TaxonomyKind.STANCE)
    n_action = sum(
        1 for c in clips if c.kind in (TaxonomyKind.GESTURE, TaxonomyKind.FIDGET)
    )
    n_trans = sum(1 for c in clips if c.kind == TaxonomyKind.STANCE_TRANSITION)
    return (
        n_stance + n_action + n_trans,
        n_stance + 2 * n_action + 2 * n_trans,
    )


# --- random graph construction -----------------------------------------------


def tiny_skeleton() -> Skeleton:
    return Skeleton(
        (
            Joint("root", None, BodyPart.SPINE),
            Joint("hand", 0, BodyPart.ARMS),
        )
    )


def random_graph_clips(
    rng: np.random.Generator,
    max_stances: int = 9,
    max_actions_per_stance: int = 5,
    full_transitions: bool = True,
) -> list[ClipMetadata]:
    """A random valid single-layer clip set, fully transition-connected."""
    n_stances = int(rng.integers(1, max_stances + 1))
    stances = [f"s{i}" for i in range(n_stances)]
    clips = [
        ClipMetadata(
            id=s,
            kind=TaxonomyKind.STANCE,
            layer=Layer.ARMS,
            duration=float(rng.uniform(1.0, 3.0)),
            looping=True,
        )
        for s in stances
    ]
    for s in stances:
        for k in range(int(rng.integers(0, max_actions_per_stance + 1))):
            kind = TaxonomyKind.GESTURE if rng.random() < 0.5 else TaxonomyKind.FIDGET
            duration = float(rng.uniform(0.5, 2.0))
            blend = float(rng.uniform(0.0, 0.2))
            clips.append(
                ClipMetadata(
                    id=f"{s}.act{k}",
                    kind=kind,
                    layer=Layer.ARMS,
                    stance=s,
                    duration=duration,
                    blend_in=blend,
                    blend_out=blend,
                )
            )
    if full_transitions:
        for a in stances:
            for b in stances:
                if a == b:
                    continue
                clips.append(
                    ClipMetadata(
                        id=f"{a}.to.{b}",
                        kind=TaxonomyKind.STANCE_TRANSITION,
                        layer=Layer.ARMS,
                        stance=a,
                        to_stance=b,
                        duration=float(rng.uniform(1.0, 2.0)),
                    )
                )
    return clips


def library_from_clips(clips: list[ClipMetadata]) -> ClipLibrary:
    skeleton = tiny_skeleton()
    return ClipLibrary(
        skeleton=skeleton,
        base_pose=Pose.identity(len(skeleton)),
        clips={c.id: c for c in clips},
    )
