"""First-order Markov models over annotated conversation behavior.

One chain per annotation layer. State spaces:

    arms         {L, R, LR} x {G, F, T}   (9 states, e.g. "LR-G")
    head_action  nod | shake | none
    head_stance  T | none
    body         T | none

The arms chain merges the left_arm/right_arm tiers: overlapping
same-label intervals on both arms become one LR event. Layers whose
space includes "none" treat gaps between intervals as explicit idle
states; the arms layer instead records the gap to the next event in its
duration statistics.

Semantic labels ride along in one of two modes: "post-hoc" keeps the
base states and samples a semantic tag per emitted action from its
observed per-state distribution; "expanded" bakes observed tags into
extra states ("LR-G:positive").
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .actions import (
    PRIORITY_GENERATED,
    AbstractActionRequest,
    MetaAction,
)
from .annotations import AnnotationDoc, Interval
from .clips import Layer, TaxonomyKind

ARM_STATES = tuple(f"{side}-{act}" for side in ("L", "R", "LR") for act in ("G", "F", "T"))
HEAD_ACTION_STATES = ("nod", "shake", "none")
TRANSITION_ONLY_STATES = ("T", "none")

STATE_SPACES: dict[str, tuple[str, ...]] = {
    "arms": ARM_STATES,
    "head_action": HEAD_ACTION_STATES,
    "head_stance": TRANSITION_ONLY_STATES,
    "body": TRANSITION_ONLY_STATES,
}

_ACTION_LETTER = {"gesture": "G", "fidget": "F", "stance-transition": "T"}
_HEAD_ACTION_STATE = {"nodding": "nod", "shaking": "shake"}

_MIN_GAP = 1e-9


class MarkovError(ValueError):
    pass


@dataclass(frozen=True)
class Event:
    state: str
    start: float
    end: float
    semantic: Optional[str] = None

    @property
    def duration(self) -> float:
        return self.end - self.start


def _tier_or_fail(doc: AnnotationDoc, tier: str) -> tuple[Interval, ...]:
    return doc.tiers.get(tier, ())


def _arm_events(doc: AnnotationDoc) -> list[Event]:
    """Merge left/right arm tiers; overlapping same-label pairs become LR."""
    left = list(_tier_or_fail(doc, "left_arm"))
    right = list(_tier_or_fail(doc, "right_arm"))
    used_right: set[int] = set()
    events: list[Event] = []
    for iv in left:
        partner = None
        for j, riv in enumerate(right):
            if j in used_right or riv.label != iv.label:
                continue
            if riv.start < iv.end and iv.start < riv.end:
                partner = j
                break
        letter = _letter(iv, "left_arm")
        if partner is not None:
            used_right.add(partner)
            riv = right[partner]
            events.append(
                Event(
                    f"LR-{letter}",
                    min(iv.start, riv.start),
                    max(iv.end, riv.end),
                    iv.semantic or riv.semantic,
                )
            )
        else:
            events.append(Event(f"L-{letter}", iv.start, iv.end, iv.semantic))
    for j, riv in enumerate(right):
        if j not in used_right:
            events.append(Event(f"R-{_letter(riv, 'right_arm')}", riv.start, riv.end, riv.semantic))
    events.sort(key=lambda e: (e.start, e.end))
    return events


def _letter(iv: Interval, tier: str) -> str:
    try:
        return _ACTION_LETTER[iv.label]
    except KeyError:
        raise MarkovError(
            f"unknown label {iv.label!r} on tier {tier!r} at {iv.start:.3f}s"
        ) from None


def _interval_events(doc: AnnotationDoc, tier: str, state_of: dict[str, str]) -> list[Event]:
    """Intervals become labeled events; the gaps between them become 'none'."""
    events: list[Event] = []
    cursor = 0.0
    for iv in _tier_or_fail(doc, tier):
        if iv.label not in state_of:
            raise MarkovError(
                f"unknown label {iv.label!r} on tier {tier!r} at {iv.start:.3f}s"
            )
        if iv.start - cursor > _MIN_GAP:
            events.append(Event("none", cursor, iv.start))
        events.append(Event(state_of[iv.label], iv.start, iv.end, iv.semantic))
        cursor = iv.end
    if doc.duration - cursor > _MIN_GAP:
        events.append(Event("none", cursor, doc.duration))
    return events


def layer_events(doc: AnnotationDoc, layer: str) -> list[Event]:
    if layer == "arms":
        return _arm_events(doc)
    if layer == "head_action":
        return _interval_events(doc, "head_action", _HEAD_ACTION_STATE)
    if layer == "head_stance":
        return _interval_events(doc, "head_stance", {"stance-transition": "T"})
    if layer == "body":
        return _interval_events(doc, "legs", {"stance-transition": "T"})
    raise MarkovError(f"unknown markov layer {layer!r} (want one of {sorted(STATE_SPACES)})")


@dataclass
class MarkovModel:
    layer: str
    states: tuple[str, ...]
    matrix: np.ndarray  # row-stochastic (S, S)
    initial: np.ndarray  # (S,)
    durations: dict[str, list[tuple[float, float]]]  # state -> [(duration, gap), ...]
    semantic_mode: str = "post-hoc"  # or "expanded"
    semantics: dict[str, dict[str, float]] = field(default_factory=dict)
    smoothing: float = 0.0

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        self.initial = np.asarray(self.initial, dtype=float)
        n = len(self.states)
        if self.matrix.shape != (n, n):
            raise MarkovError(f"matrix shape {self.matrix.shape} does not match {n} states")
        if np.any(self.matrix < 0):
            raise MarkovError("transition probabilities must be >= 0")
        rows = self.matrix.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > 1e-9):
            raise MarkovError("every transition matrix row must sum to 1 within 1e-9")

    def state_index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise MarkovError(f"unknown state {state!r}") from None

    def stationary(self, iterations: int = 10_000) -> np.ndarray:
        """Long-run state distribution by power iteration."""
        p = np.full(len(self.states), 1.0 / len(self.states))
        for _ in range(iterations):
            nxt = p @ self.matrix
            if np.abs(nxt - p).sum() < 1e-12:
                return nxt
            p = nxt
        return p

    def to_json_dict(self) -> dict:
        return {
            "layer": self.layer,
            "states": list(self.states),
            "matrix": self.matrix.tolist(),
            "initial": self.initial.tolist(),
            "durations": {s: [[d, g] for d, g in pairs] for s, pairs in self.durations.items()},
            "semantic_mode": self.semantic_mode,
            "semantics": self.semantics,
            "smoothing": self.smoothing,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "MarkovModel":
        return cls(
            layer=data["layer"],
            states=tuple(data["states"]),
            matrix=np.array(data["matrix"], dtype=float),
            initial=np.array(data["initial"], dtype=float),
            durations={
                s: [(float(d), float(g)) for d, g in pairs]
                for s, pairs in data["durations"].items()
            },
            semantic_mode=data.get("semantic_mode", "post-hoc"),
            semantics=data.get("semantics", {}),
            smoothing=float(data.get("smoothing", 0.0)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "MarkovModel":
        return cls.from_json_dict(json.loads(text))


def _normalize_rows(counts: np.ndarray) -> np.ndarray:
    out = np.array(counts, dtype=float)
    for i, total in enumerate(out.sum(axis=1)):
        if total > 0:
            out[i] /= total
        else:
            out[i] = 1.0 / out.shape[1]  # never observed as source: uniform
    return out


def learn(
    docs: Sequence[AnnotationDoc],
    layer: str,
    semantic_mode: str = "post-hoc",
    smoothing: float = 0.0,
) -> MarkovModel:
    """Maximum-likelihood transition estimate with additive smoothing.

    Each document is one chain; transitions are counted within documents
    only. Duration statistics collect (interval length, gap to next) per
    state for empirical resampling at generation time.
    """
    if semantic_mode not in ("post-hoc", "expanded"):
        raise MarkovError(f"unknown semantic mode {semantic_mode!r}")
    if smoothing < 0:
        raise MarkovError("smoothing must be >= 0")
    sequences = [layer_events(doc, layer) for doc in docs]
    if not any(sequences):
        raise MarkovError(f"empty corpus: no events on layer {layer!r}")

    base_states = STATE_SPACES[layer]
    if semantic_mode == "expanded":
        observed = sorted(
            {f"{e.state}:{e.semantic}" for seq in sequences for e in seq if e.semantic}
        )
        states = tuple(base_states) + tuple(observed)

        def state_of(e: Event) -> str:
            return f"{e.state}:{e.semantic}" if e.semantic else e.state

    else:
        states = tuple(base_states)

        def state_of(e: Event) -> str:
            return e.state

    idx = {s: i for i, s in enumerate(states)}
    counts = np.zeros((len(states), len(states)))
    initial = np.zeros(len(states))
    durations: dict[str, list[tuple[float, float]]] = {s: [] for s in states}
    semantics: dict[str, dict[str, int]] = {s: {} for s in states}
    n_transitions = 0
    for seq in sequences:
        if not seq:
            continue
        initial[idx[state_of(seq[0])]] += 1
        for e, nxt in zip(seq, seq[1:]):
            counts[idx[state_of(e)], idx[state_of(nxt)]] += 1
            n_transitions += 1
        for i, e in enumerate(seq):
            gap = max(0.0, seq[i + 1].start - e.end) if i + 1 < len(seq) else 0.0
            durations[state_of(e)].append((e.duration, gap))
            tag = e.semantic or ""
            semantics[state_of(e)][tag] = semantics[state_of(e)].get(tag, 0) + 1
    if n_transitions == 0:
        raise MarkovError(f"no transitions observed on layer {layer!r}")
    matrix = _normalize_rows(counts + smoothing)
    init = initial + smoothing
    init = init / init.sum() if init.sum() > 0 else np.full(len(states), 1.0 / len(states))
    semantic_dist = {
        s: {tag: n / sum(tags.values()) for tag, n in sorted(tags.items())}
        for s, tags in semantics.items()
        if tags
    }
    return MarkovModel(
        layer=layer,
        states=states,
        matrix=matrix,
        initial=init,
        durations=durations,
        semantic_mode=semantic_mode,
        semantics=semantic_dist,
        smoothing=smoothing,
    )


def _split_state(state: str) -> tuple[str, Optional[str]]:
    base, _, semantic = state.partition(":")
    return base, (semantic or None)


def _emission(model: MarkovModel, state: str, rng: np.random.Generator):
    """(kind, layer, semantic, side) for a state, or None for idle states."""
    base, baked = _split_state(state)
    semantic = baked
    if model.semantic_mode == "post-hoc" and baked is None:
        dist = model.semantics.get(state)
        if dist:
            tags = sorted(dist)
            semantic = rng.choice(tags, p=np.array([dist[t] for t in tags])) or None
    if model.layer == "arms":
        side_code, act = base.split("-")
        side = {"L": "left", "R": "right", "LR": "both"}[side_code]
        kind = {
            "G": TaxonomyKind.GESTURE,
            "F": TaxonomyKind.FIDGET,
            "T": TaxonomyKind.STANCE_TRANSITION,
        }[act]
        return kind, Layer.ARMS, semantic, side
    if model.layer == "head_action":
        if base == "none":
            return None
        default = "positive-nod" if base == "nod" else "negative-shake"
        return TaxonomyKind.GESTURE, Layer.HEAD, semantic or default, None
    if base == "none":
        return None
    layer = Layer.HEAD if model.layer == "head_stance" else Layer.BODY
    return TaxonomyKind.STANCE_TRANSITION, layer, semantic, None


def _sample_timing(
    model: MarkovModel, state: str, rng: np.random.Generator
) -> tuple[float, float]:
    pairs = model.durations.get(state) or [
        p for pairs in model.durations.values() for p in pairs
    ]
    if not pairs:
        raise MarkovError(f"state {state!r} has no duration statistics to resample")
    return pairs[int(rng.integers(len(pairs)))]


def generate(
    model: MarkovModel,
    horizon: float,
    seed: int,
    start_state: Optional[str] = None,
) -> list[AbstractActionRequest]:
    """Sample an abstract action sequence covering [0, horizon).

    Walks the chain, resampling (duration, gap) pairs empirically per
    state; idle states advance time without emitting. Deterministic for a
    given seed. At most one action may straddle the horizon.
    """
    if horizon <= 0:
        raise MarkovError(f"horizon must be > 0, got {horizon}")
    rng = np.random.default_rng(seed)
    if start_state is not None:
        state_i = model.state_index(start_state)
    else:
        state_i = int(rng.choice(len(model.states), p=model.initial))
    out: list[AbstractActionRequest] = []
    t = 0.0
    stalled = 0
    while t < horizon:
        state = model.states[state_i]
        duration, gap = _sample_timing(model, state, rng)
        emission = _emission(model, state, rng)
        if emission is not None and duration > 0:
            kind, layer, semantic, side = emission
            out.append(
                AbstractActionRequest(
                    kind=kind,
                    layer=layer,
                    start=t,
                    semantic=semantic,
                    side=side,
                    duration_hint=duration,
                    priority=PRIORITY_GENERATED,
                )
            )
        advance = duration + gap
        t += advance
        stalled = stalled + 1 if advance <= 0 else 0
        if stalled > 1000:
            raise MarkovError(
                f"generation stalled in absorbing zero-duration state {state!r}"
            )
        state_i = int(rng.choice(len(model.states), p=model.matrix[state_i]))
    return out


def generate_fill(
    model: MarkovModel,
    interval: tuple[float, float],
    current_stances=None,  # reserved: targets are resolved at sampling time
    seed: int = 0,
) -> list[MetaAction]:
    """Fill [start, end) with generated meta actions at generator priority.

    Output is clipped so every action lies inside the interval; the
    straddling final action, if any, is truncated.
    """
    start, end = interval
    if end <= start:
        return []
    out: list[MetaAction] = []
    for req in generate(model, horizon=end - start, seed=seed):
        action_start = start + req.start
        duration = req.duration_hint or 0.0
        if action_start >= end:
            break
        duration = min(duration, end - action_start)
        if duration <= _MIN_GAP:
            continue
        out.append(
            MetaAction(
                kind=req.kind,
                layer=req.layer,
                start=action_start,
                duration=duration,
                priority=PRIORITY_GENERATED,
                semantic=req.semantic,
                side=req.side,
            )
        )
    return out
