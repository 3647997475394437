"""Command-line entry points.

Every subcommand reads/writes JSON documents so outputs can be piped
between stages:

    embodiment validate manifest.json
    embodiment expand manifest.json --start stance --dot
    embodiment plan manifest.json requests.json --now 0 > plan.json
    embodiment sample manifest.json plan.json --seed 7 > schedule.json
    embodiment learn a.tsvann b.tsvann --layer arms > model.json
    embodiment generate model.json --horizon 30 --seed 1 > requests.json
    embodiment compose manifest.json schedule.json --fps 30 > frames.json
    embodiment serve manifest.json --port 8000

Failures print a machine-readable JSON error to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import annotations as ann_mod
from . import markov as markov_mod
from .actions import MetaPlan, requests_from_json, requests_to_json
from .clips import Layer, load_manifest
from .metagraph import GraphValidationError, MetaGraph
from .planner import PlannerConfig, UsageCounters, normalize, replan, sample_specific
from .pose import AdditiveOffset, LayerWeights, compose_layers, make_additive, scale_offset

DEFAULT_PORT_ENV = "EMBODIMENT_PORT"


def _fail(exc: Exception, code: int = 1) -> int:
    payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    print(json.dumps(payload), file=sys.stderr)
    return code


def _emit(doc) -> None:
    json.dump(doc, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _load_graph(manifest_path: str) -> MetaGraph:
    return MetaGraph.from_library(load_manifest(manifest_path))


def cmd_validate(args) -> int:
    try:
        graph = _load_graph(args.manifest)
    except Exception as exc:
        return _fail(exc)
    diagnostics = graph.validate()
    if diagnostics:
        print(
            json.dumps({"diagnostics": [d.to_json_dict() for d in diagnostics]}),
            file=sys.stderr,
        )
    return 1 if any(d.severity == "error" for d in diagnostics) else 0


def cmd_expand(args) -> int:
    try:
        graph = _load_graph(args.manifest)
        machine = graph.expand(args.start)
    except GraphValidationError as exc:
        print(
            json.dumps({"diagnostics": [d.to_json_dict() for d in exc.diagnostics]}),
            file=sys.stderr,
        )
        return 1
    except Exception as exc:
        return _fail(exc)
    if args.dot:
        sys.stdout.write(machine.to_dot())
    else:
        _emit(machine.to_json_dict())
    return 0


def _load_models(pairs: list[str]) -> dict[str, markov_mod.MarkovModel]:
    models = {}
    for pair in pairs:
        key, _, path = pair.partition("=")
        if not path:
            raise ValueError(f"--model wants KEY=PATH, got {pair!r}")
        with open(path, "r", encoding="utf-8") as fh:
            models[key] = markov_mod.MarkovModel.from_json(fh.read())
    return models


def cmd_plan(args) -> int:
    try:
        graph = _load_graph(args.manifest)
        with open(args.requests, "r", encoding="utf-8") as fh:
            requests = requests_from_json(json.load(fh))
        models = _load_models(args.model or [])
        outcome = normalize(requests, graph, models=models or None, seed=args.seed)
        result = replan(MetaPlan.empty(), args.now, outcome.actions)
    except Exception as exc:
        return _fail(exc)
    doc = result.plan.to_json_dict()
    doc["rejected"] = [a.to_json_dict() for a in result.rejected]
    doc["dropped"] = [d.to_json_dict() for d in outcome.dropped]
    _emit(doc)
    return 0


def cmd_sample(args) -> int:
    try:
        graph = _load_graph(args.manifest)
        with open(args.plan, "r", encoding="utf-8") as fh:
            plan = MetaPlan.from_json_dict(json.load(fh))
        counters = UsageCounters()
        if args.counters:
            with open(args.counters, "r", encoding="utf-8") as fh:
                counters = UsageCounters.from_json_dict(json.load(fh))
        outcome = sample_specific(plan, graph, counters, seed=args.seed)
    except Exception as exc:
        return _fail(exc)
    _emit(outcome.to_json_dict())
    return 0


def cmd_learn(args) -> int:
    try:
        docs = [ann_mod.load(path) for path in args.annotations]
        model = markov_mod.learn(
            docs, args.layer, semantic_mode=args.semantic_mode, smoothing=args.smoothing
        )
    except Exception as exc:
        return _fail(exc)
    _emit(model.to_json_dict())
    return 0


def cmd_generate(args) -> int:
    try:
        with open(args.model, "r", encoding="utf-8") as fh:
            model = markov_mod.MarkovModel.from_json(fh.read())
        requests = markov_mod.generate(
            model, horizon=args.horizon, seed=args.seed, start_state=args.start_state
        )
    except Exception as exc:
        return _fail(exc)
    _emit(requests_to_json(requests))
    return 0


def _blend_weight(local: float, length: float, blend_in: float, blend_out: float) -> float:
    w = 1.0
    if blend_in > 0:
        w = min(w, local / blend_in)
    if blend_out > 0:
        w = min(w, (length - local) / blend_out)
    return max(0.0, min(1.0, w))


def cmd_compose(args) -> int:
    try:
        library = load_manifest(args.manifest)
        with open(args.schedule, "r", encoding="utf-8") as fh:
            schedule = json.load(fh)
    except Exception as exc:
        return _fail(exc)
    skeleton, base = library.skeleton, library.base_pose
    lanes = {Layer(name): entries for name, entries in schedule.get("layers", {}).items()}
    end_time = max(
        (entry["end"] for entries in lanes.values() for entry in entries), default=0.0
    )
    n_frames = int(end_time * args.fps) + 1
    frames = []
    identity = AdditiveOffset.identity(len(skeleton))
    for frame_i in range(n_frames):
        t = frame_i / args.fps
        offsets = {Layer.BODY: identity, Layer.ARMS: identity, Layer.HEAD: identity}
        for layer, entries in lanes.items():
            for entry in entries:
                if not entry["start"] <= t < entry["end"]:
                    continue
                clip = library.clips.get(entry["clip"])
                if clip is None or clip.frames is None:
                    continue
                local = t - entry["start"]
                clip_pose = clip.frames.sample(clip.trim_start + local)
                offset = make_additive(clip_pose, base)
                w = _blend_weight(
                    local, entry["end"] - entry["start"], clip.blend_in, clip.blend_out
                )
                offsets[layer] = scale_offset(offset, w)
                break
        pose = compose_layers(
            skeleton,
            base,
            offsets[Layer.BODY],
            offsets[Layer.ARMS],
            offsets[Layer.HEAD],
            LayerWeights(),
        )
        frames.append(pose.to_json_list())
    _emit(
        {
            "fps": args.fps,
            "joints": [j.name for j in skeleton.joints],
            "frames": frames,
        }
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ProjectState, create_app

    try:
        library = load_manifest(args.manifest)
    except Exception as exc:
        return _fail(exc)
    state = ProjectState(library, manifest_path=args.manifest)
    app = create_app(state, frontend_dir=args.frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embodiment", description="behavior-graph authoring and motion planning"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a manifest and its graph")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("expand", help="materialize the explicit state machine")
    p.add_argument("manifest")
    p.add_argument("--start", default=None, help="override the start stance")
    p.add_argument("--dot", action="store_true", help="emit Graphviz DOT instead of JSON")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("plan", help="normalize requests and build a meta plan")
    p.add_argument("manifest")
    p.add_argument("requests")
    p.add_argument("--now", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--model",
        action="append",
        metavar="KEY=PATH",
        help="generator model for open intervals (repeatable)",
    )
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("sample", help="sample concrete clips for a plan")
    p.add_argument("manifest")
    p.add_argument("plan")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--counters", default=None, help="usage counters JSON to start from")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("learn", help="fit a transition model from annotations")
    p.add_argument("annotations", nargs="+")
    p.add_argument(
        "--layer", required=True, choices=sorted(markov_mod.STATE_SPACES)
    )
    p.add_argument("--semantic-mode", default="post-hoc", choices=["post-hoc", "expanded"])
    p.add_argument("--smoothing", type=float, default=0.0)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("generate", help="sample an abstract action sequence")
    p.add_argument("model")
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--start-state", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("compose", help="bake a schedule into per-frame poses")
    p.add_argument("manifest")
    p.add_argument("schedule")
    p.add_argument("--fps", type=float, default=30.0)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("serve", help="run the HTTP authoring service")
    p.add_argument("manifest")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument(
        "--port",
        type=int,
        default=int(os.environ.get(DEFAULT_PORT_ENV, "8080")),
    )
    p.add_argument("--frontend", default=None, help="static UI bundle to serve at /")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
