"""Tiered interval annotations of dyadic conversations (.tsvann format).

One record per line, tab separated:

    # comment lines start with a hash
    duration<TAB><seconds>                      (header, required first record)
    <tier><TAB><start_s><TAB><end_s><TAB><label>[:semantic]

Tiers are fixed: head_stance, head_action, left_arm, right_arm, legs.
Legal labels per tier:

    left_arm, right_arm   gesture | fidget | stance-transition
    head_action           nodding | shaking
    head_stance, legs     stance-transition

An optional semantic suffix rides after a colon ("gesture:positive").
Intervals within a tier must be sorted and non-overlapping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .actions import (
    PRIORITY_ABSTRACT,
    AbstractActionRequest,
    ActionRequest,
)
from .clips import Layer, TaxonomyKind

TIER_NAMES = ("head_stance", "head_action", "left_arm", "right_arm", "legs")

_ARM_LABELS = frozenset({"gesture", "fidget", "stance-transition"})
LEGAL_LABELS: dict[str, frozenset[str]] = {
    "left_arm": _ARM_LABELS,
    "right_arm": _ARM_LABELS,
    "head_action": frozenset({"nodding", "shaking"}),
    "head_stance": frozenset({"stance-transition"}),
    "legs": frozenset({"stance-transition"}),
}

_ARM_KIND = {
    "gesture": TaxonomyKind.GESTURE,
    "fidget": TaxonomyKind.FIDGET,
    "stance-transition": TaxonomyKind.STANCE_TRANSITION,
}

# head_action labels map to head-layer gestures with a canonical semantic
HEAD_ACTION_SEMANTIC = {"nodding": "positive-nod", "shaking": "negative-shake"}


class AnnotationParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Interval:
    start: float
    end: float
    label: str
    semantic: Optional[str] = None

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass
class AnnotationDoc:
    duration: float
    tiers: dict[str, tuple[Interval, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for tier in self.tiers:
            if tier not in TIER_NAMES:
                raise AnnotationParseError(f"unknown tier {tier!r}")

    def interval_count(self) -> int:
        return sum(len(v) for v in self.tiers.values())


def _parse_label(raw: str, tier: str, line: int) -> tuple[str, Optional[str]]:
    label, _, semantic = raw.partition(":")
    if label not in LEGAL_LABELS[tier]:
        raise AnnotationParseError(
            f"illegal label {label!r} for tier {tier!r} "
            f"(legal: {sorted(LEGAL_LABELS[tier])})",
            line,
        )
    return label, (semantic or None)


def parse(text: str) -> AnnotationDoc:
    """Parse .tsvann text; raises AnnotationParseError with a line number."""
    duration: Optional[float] = None
    raw_tiers: dict[str, list[tuple[int, Interval]]] = {t: [] for t in TIER_NAMES}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if fields[0] == "duration":
            if duration is not None:
                raise AnnotationParseError("duplicate duration header", lineno)
            if len(fields) != 2:
                raise AnnotationParseError("duration header needs exactly one value", lineno)
            try:
                duration = float(fields[1])
            except ValueError:
                raise AnnotationParseError(f"bad duration {fields[1]!r}", lineno) from None
            if duration <= 0:
                raise AnnotationParseError("duration must be > 0", lineno)
            continue
        if duration is None:
            raise AnnotationParseError("records before the duration header", lineno)
        if len(fields) != 4:
            raise AnnotationParseError(
                f"expected tier<TAB>start<TAB>end<TAB>label, got {len(fields)} fields", lineno
            )
        tier, start_s, end_s, label_s = fields
        if tier not in TIER_NAMES:
            raise AnnotationParseError(f"unknown tier {tier!r}", lineno)
        try:
            start, end = float(start_s), float(end_s)
        except ValueError:
            raise AnnotationParseError(f"bad interval times {start_s!r}/{end_s!r}", lineno) from None
        if end <= start:
            raise AnnotationParseError(f"end {end} must be > start {start}", lineno)
        if start < 0 or end > duration:
            raise AnnotationParseError(
                f"interval [{start}, {end}] outside media duration {duration}", lineno
            )
        label, semantic = _parse_label(label_s, tier, lineno)
        raw_tiers[tier].append((lineno, Interval(start, end, label, semantic)))
    if duration is None:
        raise AnnotationParseError("missing duration header")
    tiers: dict[str, tuple[Interval, ...]] = {}
    for tier, entries in raw_tiers.items():
        entries.sort(key=lambda e: e[1].start)
        for (_, a), (line_b, b) in zip(entries, entries[1:]):
            if b.start < a.end:
                raise AnnotationParseError(
                    f"tier {tier!r} intervals overlap: [{a.start}, {a.end}] and "
                    f"[{b.start}, {b.end}]",
                    line_b,
                )
        tiers[tier] = tuple(iv for _, iv in entries)
    return AnnotationDoc(duration=duration, tiers=tiers)


def serialize(doc: AnnotationDoc) -> str:
    """Canonical .tsvann text: header, then tiers in declaration order."""
    lines = [f"duration\t{doc.duration:g}"]
    for tier in TIER_NAMES:
        for iv in doc.tiers.get(tier, ()):
            label = iv.label if iv.semantic is None else f"{iv.label}:{iv.semantic}"
            lines.append(f"{tier}\t{iv.start:g}\t{iv.end:g}\t{label}")
    return "\n".join(lines) + "\n"


def load(path: str) -> AnnotationDoc:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def _request_for(tier: str, iv: Interval) -> AbstractActionRequest:
    if tier in ("left_arm", "right_arm"):
        return AbstractActionRequest(
            kind=_ARM_KIND[iv.label],
            layer=Layer.ARMS,
            start=iv.start,
            semantic=iv.semantic,
            side="left" if tier == "left_arm" else "right",
            duration_hint=iv.duration,
            priority=PRIORITY_ABSTRACT,
        )
    if tier == "head_action":
        return AbstractActionRequest(
            kind=TaxonomyKind.GESTURE,
            layer=Layer.HEAD,
            start=iv.start,
            semantic=iv.semantic or HEAD_ACTION_SEMANTIC[iv.label],
            duration_hint=iv.duration,
            priority=PRIORITY_ABSTRACT,
        )
    layer = Layer.HEAD if tier == "head_stance" else Layer.BODY
    return AbstractActionRequest(
        kind=TaxonomyKind.STANCE_TRANSITION,
        layer=layer,
        start=iv.start,
        semantic=iv.semantic,
        duration_hint=iv.duration,
        priority=PRIORITY_ABSTRACT,
    )


def to_requests(doc: AnnotationDoc) -> list[ActionRequest]:
    """One abstract request per interval, keeping timing exactly.

    left_arm/right_arm map to the arms layer with a side tag, head tiers
    to the head layer, legs to the body layer.
    """
    out: list[ActionRequest] = []
    for tier in TIER_NAMES:
        for iv in doc.tiers.get(tier, ()):
            out.append(_request_for(tier, iv))
    out.sort(key=lambda r: r.start)
    return out
