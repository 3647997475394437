"""Behavior-graph authoring and motion planning for conversational agents.

Clips are organized by a small behavior taxonomy (stances, gestures,
fidgets, stance transitions) in a meta-graph that expands into the full
animation state machine. Poses compose additively per body-part layer.
A planner turns mixed-abstraction action requests into conflict-free
per-layer plans and samples concrete clips with anti-repetition; a
first-order Markov model learned from conversation annotations fills
silent stretches.
"""

from .actions import (
    AbstractActionRequest,
    ActionRequest,
    MetaAction,
    MetaPlan,
    SpecificClipRequest,
    StanceRequest,
    UnspecifiedRequest,
)
from .annotations import AnnotationDoc, parse as parse_annotations, to_requests
from .clips import ClipLibrary, ClipMetadata, Layer, TaxonomyKind, load_manifest, save_manifest
from .markov import MarkovModel, generate, generate_fill, learn
from .metagraph import ExplicitStateMachine, MetaGraph
from .planner import (
    PlannerConfig,
    UsageCounters,
    normalize,
    replan,
    sample_specific,
)
from .pose import (
    AdditiveOffset,
    BodyPart,
    ClipFrames,
    Joint,
    JointTransform,
    LayerWeights,
    Pose,
    Skeleton,
    compose_layers,
    make_additive,
    scale_offset,
)

__version__ = "0.1.0"

__all__ = [
    "AbstractActionRequest",
    "ActionRequest",
    "AdditiveOffset",
    "AnnotationDoc",
    "BodyPart",
    "ClipFrames",
    "ClipLibrary",
    "ClipMetadata",
    "ExplicitStateMachine",
    "Joint",
    "JointTransform",
    "Layer",
    "LayerWeights",
    "MarkovModel",
    "MetaAction",
    "MetaGraph",
    "MetaPlan",
    "PlannerConfig",
    "Pose",
    "Skeleton",
    "SpecificClipRequest",
    "StanceRequest",
    "TaxonomyKind",
    "UnspecifiedRequest",
    "UsageCounters",
    "compose_layers",
    "generate",
    "generate_fill",
    "learn",
    "load_manifest",
    "make_additive",
    "normalize",
    "parse_annotations",
    "replan",
    "sample_specific",
    "save_manifest",
    "scale_offset",
    "to_requests",
]
