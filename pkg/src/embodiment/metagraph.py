"""Taxonomy meta-graph and its expansion into an explicit state machine.

The meta-graph is a multi-index map: for each stance and meta-node kind
(gesture, fidget, transition-out) it keeps the ordered list of compatible
clips; transition entries also record their target stance. Expanding the
meta-graph materializes every per-clip edge the index implies:

    (a) stance -> each gesture/fidget, and each gesture/fidget -> its stance
    (b) stance -> each outgoing transition clip -> its target stance
    (c) a self-loop on every (looping) stance

Node and edge order is lexicographic by clip id, so equal graphs expand
to byte-identical machines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .clips import ClipLibrary, ClipMetadata, Layer, TaxonomyKind


class NodeKind(str, Enum):
    GESTURE = "gesture"
    FIDGET = "fidget"
    TRANSITION_OUT = "transition_out"


_KIND_TO_BUCKET = {
    TaxonomyKind.GESTURE: NodeKind.GESTURE,
    TaxonomyKind.FIDGET: NodeKind.FIDGET,
    TaxonomyKind.STANCE_TRANSITION: NodeKind.TRANSITION_OUT,
}


class GraphError(ValueError):
    """Structural violation while mutating the meta-graph."""


class GraphValidationError(ValueError):
    """Raised when an operation requires a diagnostics-free graph."""

    def __init__(self, diagnostics: list["Diagnostic"]):
        self.diagnostics = diagnostics
        summary = "; ".join(d.message for d in diagnostics)
        super().__init__(f"graph has {len(diagnostics)} validation error(s): {summary}")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    subject: str = ""  # clip or stance id

    def to_json_dict(self) -> dict:
        return {
            "severity": self.severity,
            "code": self.code,
            "message": self.message,
            "subject": self.subject,
        }


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    exit_time: float  # earliest time (clip-local seconds) the source may hand over

    def to_json_dict(self) -> dict:
        return {"from": self.source, "to": self.target, "exit_time": self.exit_time}


@dataclass(frozen=True)
class ExplicitStateMachine:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]

    def to_json_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [e.to_json_dict() for e in self.edges],
        }

    def to_dot(self) -> str:
        lines = ["digraph embodiment {"]
        for node in self.nodes:
            lines.append(f'  "{node}";')
        for e in self.edges:
            lines.append(f'  "{e.source}" -> "{e.target}" [label="{e.exit_time:.3f}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def edge_pairs(self) -> set[tuple[str, str]]:
        return {(e.source, e.target) for e in self.edges}


class MetaGraph:
    """Mutable multi-index clip compatibility structure.

    Mutations are single-writer; snapshots handed to readers must not be
    mutated concurrently (the service layer serializes writes).
    """

    def __init__(
        self,
        start_stances: Optional[dict[Layer, str]] = None,
        exit_overrides: Optional[dict[tuple[str, str], float]] = None,
    ):
        self.clips: dict[str, ClipMetadata] = {}
        self.index: dict[tuple[str, NodeKind], list[str]] = {}
        self.start_stances: dict[Layer, str] = dict(start_stances or {})
        self.exit_overrides: dict[tuple[str, str], float] = dict(exit_overrides or {})

    # -- construction ------------------------------------------------

    @classmethod
    def from_library(cls, library: ClipLibrary) -> "MetaGraph":
        graph = cls(start_stances=library.start_stances, exit_overrides=library.exit_overrides)
        ordered = sorted(
            library.clips.values(), key=lambda c: (c.kind != TaxonomyKind.STANCE, c.id)
        )
        for clip in ordered:
            graph.add_clip(clip)
        return graph

    def add_clip(self, clip: ClipMetadata) -> "MetaGraph":
        """Route a clip into its index bucket; stance clips open a new stance."""
        if clip.id in self.clips:
            raise GraphError(f"duplicate clip id {clip.id!r}")
        if clip.kind == TaxonomyKind.STANCE:
            self.clips[clip.id] = clip
            for bucket in NodeKind:
                self.index.setdefault((clip.id, bucket), [])
            if clip.layer not in self.start_stances:
                self.start_stances[clip.layer] = clip.id
            return self
        if clip.stance not in self.stances:
            raise GraphError(f"clip {clip.id!r} references unknown stance {clip.stance!r}")
        if self.clips[clip.stance].layer != clip.layer:
            raise GraphError(
                f"clip {clip.id!r} is on layer {clip.layer.value} but stance "
                f"{clip.stance!r} is on layer {self.clips[clip.stance].layer.value}"
            )
        if clip.kind == TaxonomyKind.STANCE_TRANSITION:
            if clip.to_stance is None:
                raise GraphError(f"transition {clip.id!r} is missing to_stance")
            if clip.to_stance not in self.stances:
                raise GraphError(
                    f"transition {clip.id!r} targets unknown stance {clip.to_stance!r}"
                )
            if self.clips[clip.to_stance].layer != clip.layer:
                raise GraphError(
                    f"transition {clip.id!r} targets a stance on a different layer"
                )
        self.clips[clip.id] = clip
        self.index[(clip.stance, _KIND_TO_BUCKET[clip.kind])].append(clip.id)
        return self

    def remove_clip(self, clip_id: str) -> ClipMetadata:
        if clip_id not in self.clips:
            raise GraphError(f"unknown clip id {clip_id!r}")
        clip = self.clips.pop(clip_id)
        if clip.kind == TaxonomyKind.STANCE:
            for bucket in NodeKind:
                self.index.pop((clip.id, bucket), None)
            for layer, start in list(self.start_stances.items()):
                if start == clip.id:
                    remaining = sorted(
                        c.id
                        for c in self.clips.values()
                        if c.kind == TaxonomyKind.STANCE and c.layer == layer
                    )
                    if remaining:
                        self.start_stances[layer] = remaining[0]
                    else:
                        del self.start_stances[layer]
        else:
            bucket = self.index.get((clip.stance, _KIND_TO_BUCKET[clip.kind]), [])
            if clip_id in bucket:
                bucket.remove(clip_id)
        return clip

    # -- views ---------------------------------------------------------

    @property
    def stances(self) -> set[str]:
        return {c.id for c in self.clips.values() if c.kind == TaxonomyKind.STANCE}

    def bucket(self, stance: str, kind: NodeKind) -> list[str]:
        return list(self.index.get((stance, kind), []))

    def clips_of_kind(self, kind: TaxonomyKind) -> list[ClipMetadata]:
        return sorted(
            (c for c in self.clips.values() if c.kind == kind), key=lambda c: c.id
        )

    def start_stance_for(self, layer: Layer) -> Optional[str]:
        """Declared start stance, defaulting to the lexicographically first
        stance on the layer when none was declared."""
        if layer in self.start_stances:
            return self.start_stances[layer]
        candidates = sorted(
            c.id
            for c in self.clips.values()
            if c.kind == TaxonomyKind.STANCE and c.layer == layer
        )
        return candidates[0] if candidates else None

    def transition_targets(self, stance: str) -> dict[str, list[str]]:
        """Map target stance -> transition clips leaving `stance` for it."""
        out: dict[str, list[str]] = {}
        for cid in self.bucket(stance, NodeKind.TRANSITION_OUT):
            clip = self.clips[cid]
            if clip.to_stance is not None:
                out.setdefault(clip.to_stance, []).append(cid)
        return out

    def to_json_dict(self) -> dict:
        stances_view = {}
        for stance in sorted(self.stances):
            stances_view[stance] = {
                "layer": self.clips[stance].layer.value,
                "gestures": self.bucket(stance, NodeKind.GESTURE),
                "fidgets": self.bucket(stance, NodeKind.FIDGET),
                "transitions_out": {
                    target: sorted(clips)
                    for target, clips in sorted(self.transition_targets(stance).items())
                },
            }
        return {
            "stances": stances_view,
            "start_stances": {
                layer.value: stance for layer, stance in sorted(self.start_stances.items())
            },
        }

    # -- validation ------------------------------------------------------

    def validate(self, start_overrides: Optional[dict[Layer, str]] = None) -> list[Diagnostic]:
        """Diagnose the graph. Errors make the graph unusable for expansion;
        warnings only flag thin authoring."""
        diags: list[Diagnostic] = []
        stances = self.stances
        for clip in sorted(self.clips.values(), key=lambda c: c.id):
            if clip.looping and clip.kind != TaxonomyKind.STANCE:
                diags.append(
                    Diagnostic(
                        "error",
                        "looping-non-stance",
                        f"clip {clip.id!r} loops but is a {clip.kind.value}",
                        clip.id,
                    )
                )
            if clip.kind == TaxonomyKind.STANCE_TRANSITION and clip.to_stance not in stances:
                diags.append(
                    Diagnostic(
                        "error",
                        "missing-target-stance",
                        f"transition {clip.id!r} targets missing stance {clip.to_stance!r}",
                        clip.id,
                    )
                )
        layers = {self.clips[s].layer for s in stances}
        for layer in sorted(layers, key=lambda l: l.value):
            start = (start_overrides or {}).get(layer) or self.start_stance_for(layer)
            layer_stances = {s for s in stances if self.clips[s].layer == layer}
            if start not in layer_stances:
                diags.append(
                    Diagnostic(
                        "error",
                        "bad-start-stance",
                        f"start stance {start!r} for layer {layer.value} does not exist",
                        str(start),
                    )
                )
                continue
            reachable = self._reachable_from(start)
            for stance in sorted(layer_stances - reachable):
                # a warning, not an error: stances are legitimately
                # unreachable mid-authoring (added before their transitions)
                diags.append(
                    Diagnostic(
                        "warning",
                        "unreachable-stance",
                        f"stance {stance!r} is unreachable from start {start!r}",
                        stance,
                    )
                )
        for stance in sorted(stances):
            if not self.bucket(stance, NodeKind.GESTURE) and not self.bucket(
                stance, NodeKind.FIDGET
            ):
                diags.append(
                    Diagnostic(
                        "warning",
                        "empty-stance",
                        f"stance {stance!r} has no gestures or fidgets",
                        stance,
                    )
                )
        return diags

    def _reachable_from(self, start: str) -> set[str]:
        seen = {start}
        frontier = [start]
        while frontier:
            stance = frontier.pop()
            for target in self.transition_targets(stance):
                if target in self.stances and target not in seen:
                    seen.add(target)
                    frontier.append(target)
        return seen

    def errors(self, start_overrides: Optional[dict[Layer, str]] = None) -> list[Diagnostic]:
        return [d for d in self.validate(start_overrides) if d.severity == "error"]

    # -- expansion ---------------------------------------------------------

    def _edge(self, source_clip: str, target_clip: str) -> Edge:
        override = self.exit_overrides.get((source_clip, target_clip))
        exit_time = override if override is not None else self.clips[source_clip].exit_time
        return Edge(source_clip, target_clip, exit_time)

    def expand(self, start_stance: Optional[str] = None) -> ExplicitStateMachine:
        """Materialize the explicit per-clip state machine.

        Requires a validation-error-free graph; `start_stance`, when given,
        overrides the declared start for that stance's layer during the
        reachability check.
        """
        overrides = None
        if start_stance is not None:
            if start_stance not in self.stances:
                raise GraphError(f"unknown start stance {start_stance!r}")
            overrides = {self.clips[start_stance].layer: start_stance}
        errors = self.errors(overrides)
        if errors:
            raise GraphValidationError(errors)
        nodes = tuple(sorted(self.clips))
        edges: list[Edge] = []
        for stance in sorted(self.stances):
            edges.append(self._edge(stance, stance))  # stance self-loop (looping)
            for bucket in (NodeKind.GESTURE, NodeKind.FIDGET):
                for cid in sorted(self.bucket(stance, bucket)):
                    edges.append(self._edge(stance, cid))
                    edges.append(self._edge(cid, stance))
            for cid in sorted(self.bucket(stance, NodeKind.TRANSITION_OUT)):
                clip = self.clips[cid]
                edges.append(self._edge(stance, cid))
                edges.append(self._edge(cid, clip.to_stance))
        edges.sort(key=lambda e: (e.source, e.target))
        return ExplicitStateMachine(nodes=nodes, edges=tuple(edges))
