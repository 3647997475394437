"""Action requests, meta actions and meta plans.

Requests arrive at mixed abstraction levels (a named clip, an abstract
"do a gesture", a target stance, or an open interval to fill). The
planner normalizes them all into meta actions: a unified record with
abstract kind, optional specific clip, layer, tags, timing and priority.
A meta plan is the conflict-free, per-layer, time-ordered list of those.

Default priorities by source: specific requests 2, abstract requests 1,
generated filler 0. Higher wins.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

from .clips import Layer, TaxonomyKind

PRIORITY_SPECIFIC = 2
PRIORITY_ABSTRACT = 1
PRIORITY_GENERATED = 0


@dataclass(frozen=True)
class SpecificClipRequest:
    clip_id: str
    start: float
    priority: Optional[int] = None


@dataclass(frozen=True)
class AbstractActionRequest:
    kind: TaxonomyKind  # gesture, fidget or stance_transition; never stance
    layer: Layer
    start: float
    semantic: Optional[str] = None
    side: Optional[str] = None  # "left" | "right" | "both", arm actions only
    duration_hint: Optional[float] = None
    priority: Optional[int] = None


@dataclass(frozen=True)
class StanceRequest:
    target_stance: str
    layer: Layer
    start: float
    priority: Optional[int] = None


@dataclass(frozen=True)
class UnspecifiedRequest:
    """An open interval the generator should fill with plausible behavior."""

    start: float
    end: float
    priority: Optional[int] = None


ActionRequest = Union[
    SpecificClipRequest, AbstractActionRequest, StanceRequest, UnspecifiedRequest
]


@dataclass(frozen=True)
class MetaAction:
    kind: TaxonomyKind
    layer: Layer
    start: float
    duration: float
    priority: int
    specific_clip: Optional[str] = None
    semantic: Optional[str] = None
    side: Optional[str] = None
    to_stance: Optional[str] = None
    seq: int = 0  # arrival order, tie-break after (start, priority)

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError(f"meta action duration must be > 0, got {self.duration}")

    @property
    def end(self) -> float:
        return self.start + self.duration

    def required_tags(self) -> frozenset[str]:
        tags = set()
        if self.semantic:
            tags.add(self.semantic)
        if self.side:
            tags.add(self.side)
        return frozenset(tags)

    def shifted_to(self, start: float) -> "MetaAction":
        return replace(self, start=start)

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "layer": self.layer.value,
            "start": self.start,
            "duration": self.duration,
            "priority": self.priority,
            "specific_clip": self.specific_clip,
            "semantic": self.semantic,
            "side": self.side,
            "to_stance": self.to_stance,
            "seq": self.seq,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "MetaAction":
        return cls(
            kind=TaxonomyKind(data["kind"]),
            layer=Layer(data["layer"]),
            start=float(data["start"]),
            duration=float(data["duration"]),
            priority=int(data["priority"]),
            specific_clip=data.get("specific_clip"),
            semantic=data.get("semantic"),
            side=data.get("side"),
            to_stance=data.get("to_stance"),
            seq=int(data.get("seq", 0)),
        )


@dataclass(frozen=True)
class MetaPlan:
    """Per-layer, start-ordered, non-overlapping meta actions."""

    lanes: dict[Layer, tuple[MetaAction, ...]] = field(default_factory=dict)

    @classmethod
    def empty(cls) -> "MetaPlan":
        return cls(lanes={})

    @classmethod
    def from_actions(cls, actions: list[MetaAction]) -> "MetaPlan":
        lanes: dict[Layer, list[MetaAction]] = {}
        for action in actions:
            lanes.setdefault(action.layer, []).append(action)
        out = {
            layer: tuple(sorted(acts, key=lambda a: (a.start, a.seq)))
            for layer, acts in lanes.items()
        }
        plan = cls(lanes=out)
        plan.assert_conflict_free()
        return plan

    def lane(self, layer: Layer) -> tuple[MetaAction, ...]:
        return self.lanes.get(layer, ())

    def all_actions(self) -> list[MetaAction]:
        out: list[MetaAction] = []
        for layer in sorted(self.lanes, key=lambda l: l.value):
            out.extend(self.lanes[layer])
        return out

    def __len__(self) -> int:
        return sum(len(lane) for lane in self.lanes.values())

    def assert_conflict_free(self, eps: float = 1e-9) -> None:
        for layer, lane in self.lanes.items():
            for a, b in zip(lane, lane[1:]):
                if b.start < a.start:
                    raise ValueError(f"lane {layer.value} is not sorted by start")
                if b.start < a.end - eps:
                    raise ValueError(
                        f"lane {layer.value} overlaps: [{a.start}, {a.end}) and "
                        f"[{b.start}, {b.end})"
                    )

    def to_json_dict(self) -> dict:
        return {
            "layers": {
                layer.value: [a.to_json_dict() for a in lane]
                for layer, lane in sorted(self.lanes.items())
            }
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "MetaPlan":
        lanes = {
            Layer(layer): tuple(MetaAction.from_json_dict(a) for a in actions)
            for layer, actions in data.get("layers", {}).items()
        }
        plan = cls(lanes=lanes)
        plan.assert_conflict_free()
        return plan


def requests_to_json(requests: list[ActionRequest]) -> dict:
    out = []
    for r in requests:
        if isinstance(r, SpecificClipRequest):
            out.append(
                {"type": "specific_clip", "clip": r.clip_id, "start": r.start, "priority": r.priority}
            )
        elif isinstance(r, AbstractActionRequest):
            out.append(
                {
                    "type": "abstract",
                    "kind": r.kind.value,
                    "layer": r.layer.value,
                    "start": r.start,
                    "semantic": r.semantic,
                    "side": r.side,
                    "duration_hint": r.duration_hint,
                    "priority": r.priority,
                }
            )
        elif isinstance(r, StanceRequest):
            out.append(
                {
                    "type": "stance",
                    "target": r.target_stance,
                    "layer": r.layer.value,
                    "start": r.start,
                    "priority": r.priority,
                }
            )
        elif isinstance(r, UnspecifiedRequest):
            out.append(
                {"type": "unspecified", "start": r.start, "end": r.end, "priority": r.priority}
            )
        else:
            raise TypeError(f"not an action request: {r!r}")
    return {"requests": out}


def requests_from_json(data: dict) -> list[ActionRequest]:
    out: list[ActionRequest] = []
    for entry in data.get("requests", []):
        rtype = entry.get("type")
        priority = entry.get("priority")
        if rtype == "specific_clip":
            out.append(
                SpecificClipRequest(entry["clip"], float(entry["start"]), priority)
            )
        elif rtype == "abstract":
            out.append(
                AbstractActionRequest(
                    kind=TaxonomyKind(entry["kind"]),
                    layer=Layer(entry["layer"]),
                    start=float(entry["start"]),
                    semantic=entry.get("semantic"),
                    side=entry.get("side"),
                    duration_hint=entry.get("duration_hint"),
                    priority=priority,
                )
            )
        elif rtype == "stance":
            out.append(
                StanceRequest(entry["target"], Layer(entry["layer"]), float(entry["start"]), priority)
            )
        elif rtype == "unspecified":
            out.append(
                UnspecifiedRequest(float(entry["start"]), float(entry["end"]), priority)
            )
        else:
            raise ValueError(f"unknown request type {rtype!r}")
    return out
