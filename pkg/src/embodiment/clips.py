"""Clip metadata and the manifest file that persists an authored embodiment.

The manifest is a JSON document:

    {
      "format_version": 1,
      "skeleton": {"joints": [{"name", "parent", "body_part"}, ...]},
      "base_pose": [{"rotation": [w,x,y,z], "translation": [x,y,z]}, ...],
      "start_stances": {"arms": "stance-id", ...},
      "exit_overrides": [{"from": "clip", "to": "clip", "exit_time": 1.2}],
      "clips": [ClipMetadata..., sorted by id]
    }

Saving is canonical (sorted keys, sorted clips, 2-space indent) so two
consecutive saves of the same library are byte identical. Unknown fields
are rejected in strict mode and preserved through a round trip in
lenient mode.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Union

from .pose import ClipFrames, Pose, Skeleton


class TaxonomyKind(str, Enum):
    STANCE = "stance"
    GESTURE = "gesture"
    FIDGET = "fidget"
    STANCE_TRANSITION = "stance_transition"


class Layer(str, Enum):
    BODY = "body"
    ARMS = "arms"
    HEAD = "head"


class ManifestError(ValueError):
    """Manifest parse or invariant failure, with clip/field context."""

    def __init__(self, message: str, clip_id: Optional[str] = None, field_name: Optional[str] = None):
        self.clip_id = clip_id
        self.field_name = field_name
        prefix = ""
        if clip_id is not None:
            prefix += f"clip {clip_id!r}"
        if field_name is not None:
            prefix += f" field {field_name!r}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


@dataclass(frozen=True)
class ClipMetadata:
    """One animation clip plus its taxonomy slot, timings and semantics.

    ``stance`` is the owning stance for gestures/fidgets and the source
    stance for transitions; stance clips name themselves. ``trim_start``
    and ``trim_end`` bound the playable window inside the raw clip, and
    ``blend_in``/``blend_out`` the crossfade ramps inside that window.
    """

    id: str
    kind: TaxonomyKind
    layer: Layer
    duration: float
    stance: str = ""
    to_stance: Optional[str] = None
    blend_in: float = 0.0
    blend_out: float = 0.0
    trim_start: float = 0.0
    trim_end: Optional[float] = None  # defaults to duration
    looping: bool = False
    semantic_tags: frozenset[str] = frozenset()
    base_likelihood: float = 1.0
    frames: Optional[ClipFrames] = None
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.trim_end is None:
            object.__setattr__(self, "trim_end", self.duration)
        object.__setattr__(self, "semantic_tags", frozenset(self.semantic_tags))
        if self.kind == TaxonomyKind.STANCE and not self.stance:
            object.__setattr__(self, "stance", self.id)
        self.validate()

    def validate(self) -> None:
        if not self.id:
            raise ManifestError("clip id must be non-empty", clip_id=self.id, field_name="id")
        if self.duration <= 0:
            raise ManifestError(
                f"duration must be > 0, got {self.duration}", self.id, "duration"
            )
        if self.looping != (self.kind == TaxonomyKind.STANCE):
            if self.looping:
                raise ManifestError(
                    f"looping clips must be stances, kind is {self.kind.value}",
                    self.id,
                    "looping",
                )
            raise ManifestError("stance clips must loop", self.id, "looping")
        if (self.to_stance is not None) != (self.kind == TaxonomyKind.STANCE_TRANSITION):
            raise ManifestError(
                "to_stance is required for stance transitions and forbidden otherwise",
                self.id,
                "to_stance",
            )
        if self.kind == TaxonomyKind.STANCE and self.stance != self.id:
            raise ManifestError(
                "a stance clip's stance field must be its own id", self.id, "stance"
            )
        if self.kind != TaxonomyKind.STANCE and not self.stance:
            raise ManifestError("non-stance clips must name an owning stance", self.id, "stance")
        if not 0.0 <= self.trim_start:
            raise ManifestError(
                f"trim_start must be >= 0, got {self.trim_start}", self.id, "trim_start"
            )
        if not self.trim_start < self.trim_end <= self.duration:
            raise ManifestError(
                f"need trim_start < trim_end <= duration, got "
                f"[{self.trim_start}, {self.trim_end}] with duration {self.duration}",
                self.id,
                "trim_end",
            )
        if self.blend_in < 0 or self.blend_out < 0:
            raise ManifestError("blend times must be >= 0", self.id, "blend_in")
        if self.blend_in + self.blend_out > self.playable_length + 1e-12:
            raise ManifestError(
                f"blend_in + blend_out ({self.blend_in + self.blend_out}) exceeds "
                f"playable length ({self.playable_length})",
                self.id,
                "blend_out",
            )
        if self.base_likelihood <= 0:
            raise ManifestError(
                f"base_likelihood must be > 0, got {self.base_likelihood}",
                self.id,
                "base_likelihood",
            )

    @property
    def playable_length(self) -> float:
        return self.trim_end - self.trim_start

    @property
    def exit_time(self) -> float:
        """Earliest-exit time on outgoing edges: end of the playable window
        minus the blend-out ramp."""
        return self.trim_end - self.blend_out

    def to_json_dict(self) -> dict:
        data = {
            "id": self.id,
            "kind": self.kind.value,
            "layer": self.layer.value,
            "stance": self.stance,
            "duration": self.duration,
            "blend_in": self.blend_in,
            "blend_out": self.blend_out,
            "trim_start": self.trim_start,
            "trim_end": self.trim_end,
            "looping": self.looping,
            "semantic_tags": sorted(self.semantic_tags),
            "base_likelihood": self.base_likelihood,
        }
        if self.to_stance is not None:
            data["to_stance"] = self.to_stance
        if self.frames is not None:
            data["frames"] = self.frames.to_json_dict()
        data.update(self.extras)
        return data

    _FIELDS = frozenset(
        {
            "id",
            "kind",
            "layer",
            "stance",
            "to_stance",
            "duration",
            "blend_in",
            "blend_out",
            "trim_start",
            "trim_end",
            "looping",
            "semantic_tags",
            "base_likelihood",
            "frames",
        }
    )

    @classmethod
    def from_json_dict(cls, data: dict, strict: bool = True) -> "ClipMetadata":
        clip_id = data.get("id", "<missing id>")
        unknown = set(data) - cls._FIELDS
        if unknown and strict:
            raise ManifestError(
                f"unknown fields {sorted(unknown)} (strict mode)", clip_id
            )
        try:
            kind = TaxonomyKind(data["kind"])
            layer = Layer(data["layer"])
        except (KeyError, ValueError) as exc:
            raise ManifestError(f"bad kind/layer: {exc}", clip_id) from exc
        frames = None
        if data.get("frames") is not None:
            frames = ClipFrames.from_json_dict(data["frames"])
        try:
            return cls(
                id=data["id"],
                kind=kind,
                layer=layer,
                stance=data.get("stance", ""),
                to_stance=data.get("to_stance"),
                duration=float(data["duration"]),
                blend_in=float(data.get("blend_in", 0.0)),
                blend_out=float(data.get("blend_out", 0.0)),
                trim_start=float(data.get("trim_start", 0.0)),
                trim_end=None if data.get("trim_end") is None else float(data["trim_end"]),
                looping=bool(data.get("looping", False)),
                semantic_tags=frozenset(data.get("semantic_tags", ())),
                base_likelihood=float(data.get("base_likelihood", 1.0)),
                frames=frames,
                extras={k: data[k] for k in unknown},
            )
        except KeyError as exc:
            raise ManifestError(f"missing required field {exc}", clip_id) from exc


@dataclass
class ClipLibrary:
    """A skeleton, its neutral base pose and every authored clip."""

    skeleton: Skeleton
    base_pose: Pose
    clips: dict[str, ClipMetadata] = field(default_factory=dict)
    start_stances: dict[Layer, str] = field(default_factory=dict)
    exit_overrides: dict[tuple[str, str], float] = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.base_pose) != len(self.skeleton):
            raise ManifestError(
                f"base pose has {len(self.base_pose)} joints, "
                f"skeleton has {len(self.skeleton)}"
            )

    def stance_ids(self) -> set[str]:
        return {c.id for c in self.clips.values() if c.kind == TaxonomyKind.STANCE}

    def validate_references(self) -> None:
        stances = self.stance_ids()
        for clip in self.clips.values():
            if clip.kind == TaxonomyKind.STANCE:
                continue
            if clip.stance not in stances:
                raise ManifestError(
                    f"references unknown stance {clip.stance!r}", clip.id, "stance"
                )
            if clip.kind == TaxonomyKind.STANCE_TRANSITION and clip.to_stance not in stances:
                raise ManifestError(
                    f"references unknown target stance {clip.to_stance!r}",
                    clip.id,
                    "to_stance",
                )
            stance_clip = self.clips[clip.stance]
            if stance_clip.layer != clip.layer:
                raise ManifestError(
                    f"is on layer {clip.layer.value} but its stance "
                    f"{clip.stance!r} is on layer {stance_clip.layer.value}",
                    clip.id,
                    "layer",
                )
            if clip.kind == TaxonomyKind.STANCE_TRANSITION:
                target = self.clips[clip.to_stance]
                if target.layer != clip.layer:
                    raise ManifestError(
                        f"transitions to stance {clip.to_stance!r} on a different layer",
                        clip.id,
                        "to_stance",
                    )
        for layer, stance in self.start_stances.items():
            if stance not in stances:
                raise ManifestError(
                    f"start stance {stance!r} for layer {layer.value} does not exist"
                )
            if self.clips[stance].layer != layer:
                raise ManifestError(
                    f"start stance {stance!r} is not on layer {layer.value}"
                )

    def with_clip(self, clip: ClipMetadata) -> "ClipLibrary":
        if clip.id in self.clips:
            raise ManifestError("duplicate clip id", clip.id, "id")
        clips = dict(self.clips)
        clips[clip.id] = clip
        return replace(self, clips=clips)


FORMAT_VERSION = 1

_TOP_FIELDS = frozenset(
    {"format_version", "skeleton", "base_pose", "start_stances", "exit_overrides", "clips"}
)


def load_manifest(source: Union[str, bytes, io.IOBase], strict: bool = True) -> ClipLibrary:
    """Load and validate a manifest from a path, bytes, or binary stream.

    All clip invariants and cross-references (owning stances, transition
    targets, start stances) are checked; the first violation raises
    ManifestError naming the clip and field.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        with open(source, "rb") as fh:
            text = fh.read().decode("utf-8")
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"not valid JSON: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ManifestError("manifest root must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ManifestError(
            f"unsupported format_version {version!r} (expected {FORMAT_VERSION})"
        )
    unknown = set(doc) - _TOP_FIELDS
    if unknown and strict:
        raise ManifestError(f"unknown top-level fields {sorted(unknown)} (strict mode)")
    for required in ("skeleton", "base_pose"):
        if required not in doc:
            raise ManifestError(f"missing top-level field {required!r}")
    skeleton = Skeleton.from_json_dict(doc["skeleton"])
    base_pose = Pose.from_json_list(doc["base_pose"])
    clips: dict[str, ClipMetadata] = {}
    for entry in doc.get("clips", []):
        clip = ClipMetadata.from_json_dict(entry, strict=strict)
        if clip.id in clips:
            raise ManifestError("duplicate clip id", clip.id, "id")
        clips[clip.id] = clip
    start_stances = {Layer(k): v for k, v in doc.get("start_stances", {}).items()}
    exit_overrides = {
        (o["from"], o["to"]): float(o["exit_time"]) for o in doc.get("exit_overrides", [])
    }
    library = ClipLibrary(
        skeleton=skeleton,
        base_pose=base_pose,
        clips=clips,
        start_stances=start_stances,
        exit_overrides=exit_overrides,
        extras={k: doc[k] for k in unknown},
    )
    library.validate_references()
    return library


def save_manifest(library: ClipLibrary) -> bytes:
    """Serialize a library to canonical manifest bytes (round-trip stable)."""
    doc = {
        "format_version": FORMAT_VERSION,
        "skeleton": library.skeleton.to_json_dict(),
        "base_pose": library.base_pose.to_json_list(),
        "start_stances": {
            layer.value: stance for layer, stance in sorted(library.start_stances.items())
        },
        "clips": [
            library.clips[cid].to_json_dict() for cid in sorted(library.clips)
        ],
    }
    if library.exit_overrides:
        doc["exit_overrides"] = [
            {"from": src, "to": dst, "exit_time": t}
            for (src, dst), t in sorted(library.exit_overrides.items())
        ]
    doc.update(library.extras)
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")
