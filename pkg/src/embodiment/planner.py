"""Action planning: normalization, temporal replanning, clip sampling.

The pipeline has three stages, each usable on its own:

  normalize   heterogeneous requests -> meta actions (specific clips are
              looked up, stance requests become transition hops, open
              intervals are filled by a generator model)
  replan      merge meta actions into the existing plan greedily by
              (start, priority): lower priority shifts behind committed
              work, higher priority cuts committed work, remainders
              shorter than min_remainder are discarded
  sample      pick a concrete clip per meta action with inverse-usage
              probability, filtering candidates that would collide with
              higher-priority plan entries

All sampling takes an explicit seed; there is no hidden RNG state.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .actions import (
    PRIORITY_ABSTRACT,
    PRIORITY_GENERATED,
    PRIORITY_SPECIFIC,
    AbstractActionRequest,
    ActionRequest,
    MetaAction,
    MetaPlan,
    SpecificClipRequest,
    StanceRequest,
    UnspecifiedRequest,
)
from .clips import ClipMetadata, Layer, TaxonomyKind
from .metagraph import Diagnostic, MetaGraph, NodeKind
from . import markov as markov_mod

_EPS = 1e-9


class PlannerError(ValueError):
    pass


@dataclass(frozen=True)
class PlannerConfig:
    min_remainder: float = 1.0  # keep cut-off tails at least this long
    horizon: Optional[float] = None  # reject actions shifted past this time
    default_duration: float = 1.0  # abstract actions with no hint and no candidates


@dataclass
class UsageCounters:
    """Per-clip usage counts driving anti-repetition sampling.

    Selection weight of clip k is base_likelihood / max(c_k, 1); every use
    adds `alpha` to c_k, so frequently chosen clips decay in probability.
    """

    counts: dict[str, float] = field(default_factory=dict)
    alpha: float = 4.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        for clip_id, c in self.counts.items():
            if c < 0:
                raise ValueError(f"count for {clip_id!r} must be >= 0, got {c}")

    def count(self, clip_id: str) -> float:
        return self.counts.get(clip_id, 0.0)

    def record_use(self, clip_id: str) -> None:
        self.counts[clip_id] = self.count(clip_id) + self.alpha

    def reset(self) -> None:
        self.counts.clear()

    def copy(self) -> "UsageCounters":
        return UsageCounters(counts=dict(self.counts), alpha=self.alpha)

    def to_json_dict(self) -> dict:
        return {"alpha": self.alpha, "counts": dict(sorted(self.counts.items()))}

    @classmethod
    def from_json_dict(cls, data: dict) -> "UsageCounters":
        return cls(
            counts={k: float(v) for k, v in data.get("counts", {}).items()},
            alpha=float(data.get("alpha", 4.0)),
        )


def selection_probabilities(
    counters: UsageCounters, candidates: Sequence[ClipMetadata]
) -> np.ndarray:
    """p_k proportional to base_likelihood_k / max(c_k, 1)."""
    weights = np.array(
        [c.base_likelihood / max(counters.count(c.id), 1.0) for c in candidates]
    )
    return weights / weights.sum()


def choose_clip(
    counters: UsageCounters, candidates: Sequence[ClipMetadata], rng: np.random.Generator
) -> ClipMetadata:
    """Draw one candidate by inverse-usage weight (no counter update)."""
    if not candidates:
        raise PlannerError("cannot choose from zero candidates")
    p = selection_probabilities(counters, candidates)
    x = rng.random()
    cumulative = 0.0
    for clip, pk in zip(candidates, p):
        cumulative += pk
        if x < cumulative:
            return clip
    return candidates[-1]


# ---------------------------------------------------------------------------
# normalize


@dataclass
class NormalizeOutcome:
    actions: list[MetaAction]
    dropped: list[Diagnostic] = field(default_factory=list)


def _default_priority(request: ActionRequest) -> int:
    if isinstance(request, SpecificClipRequest):
        return PRIORITY_SPECIFIC
    if isinstance(request, StanceRequest):
        return PRIORITY_SPECIFIC
    if isinstance(request, UnspecifiedRequest):
        return PRIORITY_GENERATED
    return PRIORITY_ABSTRACT


def _matching_clips(
    graph: MetaGraph,
    kind: TaxonomyKind,
    layer: Layer,
    tags: frozenset[str],
    stance: Optional[str] = None,
    to_stance: Optional[str] = None,
) -> list[ClipMetadata]:
    out = []
    for clip in graph.clips.values():
        if clip.kind != kind or clip.layer != layer:
            continue
        if stance is not None and clip.stance != stance:
            continue
        if to_stance is not None and clip.to_stance != to_stance:
            continue
        if not tags <= clip.semantic_tags:
            continue
        out.append(clip)
    out.sort(key=lambda c: c.id)
    return out


def _estimate_duration(
    graph: MetaGraph,
    kind: TaxonomyKind,
    layer: Layer,
    tags: frozenset[str],
    config: PlannerConfig,
) -> float:
    matches = _matching_clips(graph, kind, layer, tags)
    if not matches:
        return config.default_duration
    return float(np.mean([c.playable_length for c in matches]))


def _transition_path(graph: MetaGraph, source: str, target: str) -> Optional[list[str]]:
    """Shortest stance path source -> target over transition edges (BFS)."""
    if source == target:
        return [source]
    frontier = [source]
    came_from = {source: source}
    while frontier:
        nxt: list[str] = []
        for stance in frontier:
            for neighbor in sorted(graph.transition_targets(stance)):
                if neighbor in came_from:
                    continue
                came_from[neighbor] = stance
                if neighbor == target:
                    path = [target]
                    while path[-1] != source:
                        path.append(came_from[path[-1]])
                    return path[::-1]
                nxt.append(neighbor)
        frontier = nxt
    return None


def normalize(
    requests: Sequence[ActionRequest],
    graph: MetaGraph,
    current_stances: Optional[dict[Layer, str]] = None,
    models: Optional[dict[str, "markov_mod.MarkovModel"]] = None,
    seed: int = 0,
    config: PlannerConfig = PlannerConfig(),
) -> NormalizeOutcome:
    """Convert mixed-abstraction requests into meta actions.

    Stance requests targeting the layer's current stance are dropped as
    no-ops; unreachable targets are dropped with a diagnostic. Open
    intervals are filled by the per-layer generator models, when given.
    """
    stances: dict[Layer, str] = {}
    for layer in Layer:
        if current_stances and layer in current_stances:
            stances[layer] = current_stances[layer]
        else:
            start = graph.start_stance_for(layer)
            if start is not None:
                stances[layer] = start
    actions: list[MetaAction] = []
    dropped: list[Diagnostic] = []
    seq = 0

    def emit(action: MetaAction) -> None:
        nonlocal seq
        actions.append(replace(action, seq=seq))
        seq += 1

    for request in requests:
        priority = request.priority if request.priority is not None else _default_priority(request)
        if isinstance(request, SpecificClipRequest):
            clip = graph.clips.get(request.clip_id)
            if clip is None:
                raise PlannerError(f"specific request names unknown clip {request.clip_id!r}")
            if clip.kind == TaxonomyKind.STANCE:
                raise PlannerError(
                    f"specific request names stance clip {request.clip_id!r}; "
                    "request the stance instead"
                )
            emit(
                MetaAction(
                    kind=clip.kind,
                    layer=clip.layer,
                    start=request.start,
                    duration=clip.playable_length,
                    priority=priority,
                    specific_clip=clip.id,
                    to_stance=clip.to_stance,
                )
            )
        elif isinstance(request, AbstractActionRequest):
            if request.kind == TaxonomyKind.STANCE:
                raise PlannerError("abstract requests cannot ask for a stance; use StanceRequest")
            tags = frozenset(t for t in (request.semantic, request.side) if t)
            duration = request.duration_hint or _estimate_duration(
                graph, request.kind, request.layer, tags, config
            )
            emit(
                MetaAction(
                    kind=request.kind,
                    layer=request.layer,
                    start=request.start,
                    duration=duration,
                    priority=priority,
                    semantic=request.semantic,
                    side=request.side,
                )
            )
        elif isinstance(request, StanceRequest):
            current = stances.get(request.layer)
            if current is None:
                dropped.append(
                    Diagnostic(
                        "warning",
                        "no-current-stance",
                        f"stance request for {request.target_stance!r} dropped: layer "
                        f"{request.layer.value} has no stances",
                        request.target_stance,
                    )
                )
                continue
            if request.target_stance == current:
                continue  # already there: no meta action
            path = _transition_path(graph, current, request.target_stance)
            if path is None:
                dropped.append(
                    Diagnostic(
                        "warning",
                        "no-transition-path",
                        f"no transition path from {current!r} to "
                        f"{request.target_stance!r} on layer {request.layer.value}",
                        request.target_stance,
                    )
                )
                continue
            t = request.start
            for hop_from, hop_to in zip(path, path[1:]):
                hop_clips = [
                    graph.clips[cid]
                    for cid in graph.transition_targets(hop_from)[hop_to]
                ]
                duration = max(c.playable_length for c in hop_clips)
                emit(
                    MetaAction(
                        kind=TaxonomyKind.STANCE_TRANSITION,
                        layer=request.layer,
                        start=t,
                        duration=duration,
                        priority=priority,
                        to_stance=hop_to,
                    )
                )
                t += duration
            stances[request.layer] = request.target_stance
        elif isinstance(request, UnspecifiedRequest):
            if not models:
                dropped.append(
                    Diagnostic(
                        "warning",
                        "no-generator",
                        f"open interval [{request.start}, {request.end}] dropped: "
                        "no generator models loaded",
                    )
                )
                continue
            for offset, key in enumerate(sorted(models)):
                fill = markov_mod.generate_fill(
                    models[key],
                    (request.start, request.end),
                    current_stances=stances,
                    seed=seed + offset,
                )
                for action in fill:
                    emit(replace(action, priority=priority))
        else:
            raise PlannerError(f"not an action request: {request!r}")
    return NormalizeOutcome(actions=actions, dropped=dropped)


# ---------------------------------------------------------------------------
# replan


@dataclass(frozen=True)
class Displacement:
    """Audit record: `victim` was shifted/truncated/discarded because of `cause`."""

    victim: MetaAction
    cause: MetaAction
    effect: str  # "shifted" | "truncated" | "remainder-discarded"


@dataclass
class ReplanOutcome:
    plan: MetaPlan
    rejected: list[MetaAction] = field(default_factory=list)
    displacements: list[Displacement] = field(default_factory=list)


def replan(
    existing: MetaPlan,
    now: float,
    incoming: Sequence[MetaAction],
    config: PlannerConfig = PlannerConfig(),
) -> ReplanOutcome:
    """Merge incoming actions with the surviving part of the existing plan.

    The currently active action per layer (start < now <= end) is pinned;
    everything else starting at or after `now` is recovered and re-placed
    together with the incoming actions in (start, priority desc, arrival)
    order. A placed action shifts behind committed equal-or-higher
    priority work; strictly lower-priority committed work is cut around
    it, keeping tails only when they are at least min_remainder long.
    """
    for action in incoming:
        if action.start < now - _EPS:
            raise PlannerError(
                f"incoming action starts at {action.start} before now={now}"
            )
    existing.assert_conflict_free()

    pinned: dict[Layer, list[MetaAction]] = {}
    pool: list[MetaAction] = []
    for layer, lane in existing.lanes.items():
        for action in lane:
            if action.start < now <= action.end:
                pinned.setdefault(layer, []).append(action)
            elif action.start >= now:
                pool.append(action)
            # actions entirely in the past fall away
    max_seq = max((a.seq for a in pool + list(incoming) + sum(pinned.values(), [])), default=-1)
    pool.extend(
        replace(action, seq=max_seq + 1 + i) for i, action in enumerate(incoming)
    )
    pool.sort(key=lambda a: (a.start, -a.priority, a.seq, a.specific_clip or ""))

    committed: dict[Layer, list[MetaAction]] = {
        layer: list(actions) for layer, actions in pinned.items()
    }
    rejected: list[MetaAction] = []
    displacements: list[Displacement] = []

    for action in pool:
        lane = committed.setdefault(action.layer, [])
        start = action.start
        # phase 1: shift behind equal-or-higher-priority committed work
        moved = True
        shifted_by: Optional[MetaAction] = None
        while moved:
            moved = False
            for c in sorted(lane, key=lambda a: a.start):
                if c.priority >= action.priority and c.start < start + action.duration - _EPS and start < c.end - _EPS:
                    start = c.end
                    shifted_by = c
                    moved = True
        if config.horizon is not None and start + action.duration > config.horizon + _EPS:
            rejected.append(action)
            continue
        placed = action if start == action.start else action.shifted_to(start)
        if shifted_by is not None:
            displacements.append(Displacement(action, shifted_by, "shifted"))
        # phase 2: cut strictly lower-priority committed work around it
        end = placed.end
        survivors: list[MetaAction] = []
        for c in lane:
            if c.end <= start + _EPS or c.start >= end - _EPS:
                survivors.append(c)
                continue
            # c overlaps [start, end); its priority is strictly lower here
            head_len = start - c.start
            if head_len > _EPS:
                survivors.append(replace(c, duration=head_len))
                displacements.append(Displacement(c, placed, "truncated"))
            tail_len = c.end - end
            if tail_len > _EPS:
                if tail_len >= config.min_remainder - _EPS:
                    survivors.append(replace(c, start=end, duration=tail_len))
                    if head_len <= _EPS:
                        displacements.append(Displacement(c, placed, "truncated"))
                else:
                    displacements.append(Displacement(c, placed, "remainder-discarded"))
            elif head_len <= _EPS:
                displacements.append(Displacement(c, placed, "remainder-discarded"))
        survivors.append(placed)
        committed[action.layer] = survivors

    lanes = {
        layer: tuple(sorted(acts, key=lambda a: (a.start, a.seq)))
        for layer, acts in committed.items()
        if acts
    }
    plan = MetaPlan(lanes=lanes)
    plan.assert_conflict_free()
    return ReplanOutcome(plan=plan, rejected=rejected, displacements=displacements)


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class ScheduledClip:
    clip_id: str
    start: float
    end: float

    def to_json_dict(self) -> dict:
        return {"clip": self.clip_id, "start": self.start, "end": self.end}


@dataclass
class SampleOutcome:
    schedule: dict[Layer, list[ScheduledClip]]
    counters: UsageCounters
    discarded: list[Diagnostic] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "layers": {
                layer.value: [s.to_json_dict() for s in clips]
                for layer, clips in sorted(self.schedule.items())
            },
            "counters": self.counters.to_json_dict(),
            "discarded": [d.to_json_dict() for d in self.discarded],
        }


def _candidates_for(
    graph: MetaGraph, action: MetaAction, stance: Optional[str]
) -> list[ClipMetadata]:
    if action.specific_clip is not None:
        clip = graph.clips.get(action.specific_clip)
        if clip is None:
            return []
        if stance is not None and clip.stance != stance:
            return []
        return [clip]
    if stance is None:
        return []
    return _matching_clips(
        graph,
        action.kind,
        action.layer,
        action.required_tags(),
        stance=stance,
        to_stance=action.to_stance,
    )


@dataclass
class _Slot:
    action: MetaAction
    start: float
    end: float


def sample_specific(
    plan: MetaPlan,
    graph: MetaGraph,
    counters: UsageCounters,
    seed: int,
    current_stances: Optional[dict[Layer, str]] = None,
    config: PlannerConfig = PlannerConfig(),
) -> SampleOutcome:
    """Turn a meta plan into a concrete clip schedule.

    Per layer and in timeline order: gather candidate clips matching the
    meta action (kind, layer, current stance, tags), drop candidates that
    would run into the next higher-priority action, then draw one by
    inverse-usage probability. A clip shorter than its slot leaves idle
    time (playback resumes at the next action); a clip longer than its
    slot swallows fully-overlapped later actions and pushes partially
    overlapped ones to its end. Chosen transitions move the layer's
    current stance. Deterministic for a given seed; `counters` is copied,
    never mutated.
    """
    plan.assert_conflict_free()
    rng = np.random.default_rng(seed)
    out_counters = counters.copy()
    schedule: dict[Layer, list[ScheduledClip]] = {}
    discarded: list[Diagnostic] = []

    for layer in sorted(plan.lanes, key=lambda l: l.value):
        stance = (current_stances or {}).get(layer) or graph.start_stance_for(layer)
        slots = [_Slot(a, a.start, a.end) for a in plan.lanes[layer]]
        placed: list[ScheduledClip] = []
        i = 0
        while i < len(slots):
            slot = slots[i]
            if slot.end - slot.start <= _EPS:
                i += 1
                continue
            candidates = _candidates_for(graph, slot.action, stance)
            if not candidates:
                discarded.append(
                    Diagnostic(
                        "warning",
                        "no-candidates",
                        f"no clips match {slot.action.kind.value} on layer "
                        f"{layer.value} in stance {stance!r} "
                        f"(tags {sorted(slot.action.required_tags())})",
                        slot.action.specific_clip or "",
                    )
                )
                i += 1
                continue
            wall = next(
                (
                    later.start
                    for later in slots[i + 1 :]
                    if later.action.priority > slot.action.priority
                ),
                None,
            )
            if wall is not None:
                candidates = [
                    c for c in candidates if slot.start + c.playable_length <= wall + _EPS
                ]
            if not candidates:
                discarded.append(
                    Diagnostic(
                        "warning",
                        "no-fitting-candidates",
                        f"every candidate for {slot.action.kind.value} at "
                        f"{slot.start:.3f}s would overrun the higher-priority "
                        f"action at {wall:.3f}s",
                    )
                )
                i += 1
                continue
            clip = choose_clip(out_counters, candidates, rng)
            out_counters.record_use(clip.id)
            clip_end = slot.start + clip.playable_length
            placed.append(ScheduledClip(clip.id, slot.start, clip_end))
            if clip.kind == TaxonomyKind.STANCE_TRANSITION and clip.to_stance:
                stance = clip.to_stance
            # reconcile later slots with the real clip length
            j = i + 1
            while j < len(slots):
                later = slots[j]
                if later.start >= clip_end - _EPS:
                    break
                if later.end <= clip_end + _EPS:
                    discarded.append(
                        Diagnostic(
                            "warning",
                            "overlapped-by-animation",
                            f"{later.action.kind.value} at {later.start:.3f}s fully "
                            f"overlapped by clip {clip.id!r} ending {clip_end:.3f}s",
                        )
                    )
                    slots.pop(j)
                    continue
                later.start = clip_end
                j += 1
            i += 1
        schedule[layer] = placed
    return SampleOutcome(schedule=schedule, counters=out_counters, discarded=discarded)
