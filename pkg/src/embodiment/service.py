"""JSON-over-HTTP authoring service.

Wraps one project (a manifest-backed clip library plus planner state)
behind a small REST surface. All mutations are serialized through a
single lock and are atomic: the clip change is applied to a copy of the
library, revalidated, persisted (temp file + rename) and only then
swapped in with a +1 revision. Every response carries the revision it
reflects; reads snapshot under the lock so there are no torn views.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from pathlib import Path
from typing import Any, Optional

from fastapi import Body, FastAPI, HTTPException, Query, Response
from fastapi.staticfiles import StaticFiles

from . import markov as markov_mod
from .actions import MetaPlan, requests_from_json
from .clips import (
    ClipLibrary,
    ClipMetadata,
    Layer,
    ManifestError,
    TaxonomyKind,
    save_manifest,
)
from .metagraph import GraphError, GraphValidationError, MetaGraph
from .planner import (
    PlannerConfig,
    UsageCounters,
    normalize,
    replan,
    sample_specific,
)


class ProjectState:
    """Single-writer project state: library, graph, plan, counters, revision."""

    def __init__(
        self,
        library: ClipLibrary,
        manifest_path: Optional[str] = None,
        config: PlannerConfig = PlannerConfig(),
    ):
        self._lock = threading.Lock()
        self.library = library
        self.graph = MetaGraph.from_library(library)
        self.plan = MetaPlan.empty()
        self.counters = UsageCounters()
        self.models: dict[str, markov_mod.MarkovModel] = {}
        self.revision = 0
        self.manifest_path = manifest_path
        self.config = config

    # -- mutation plumbing ------------------------------------------------

    def _persist(self, library: ClipLibrary) -> None:
        if self.manifest_path is None:
            return
        payload = save_manifest(library)
        directory = os.path.dirname(os.path.abspath(self.manifest_path)) or "."
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".manifest.tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(payload)
            os.replace(tmp, self.manifest_path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _swap_library(self, library: ClipLibrary) -> None:
        """Rebuild graph from a candidate library; raises before any state change."""
        library.validate_references()
        graph = MetaGraph.from_library(library)
        self._persist(library)
        self.library = library
        self.graph = graph
        self.revision += 1

    def add_clip(self, clip: ClipMetadata) -> None:
        with self._lock:
            if clip.id in self.library.clips:
                raise DuplicateClipError(clip.id)
            library = self.library.with_clip(clip)
            # the first stance authored on a layer becomes its declared start,
            # so the choice survives manifest round-trips (which sort clips)
            if (
                clip.kind == TaxonomyKind.STANCE
                and clip.layer not in library.start_stances
            ):
                from dataclasses import replace as dc_replace

                starts = dict(library.start_stances)
                starts[clip.layer] = clip.id
                library = dc_replace(library, start_stances=starts)
            self._swap_library(library)

    def patch_clip(self, clip_id: str, fields: dict[str, Any]) -> ClipMetadata:
        with self._lock:
            old = self.library.clips.get(clip_id)
            if old is None:
                raise UnknownClipError(clip_id)
            data = old.to_json_dict()
            for key, value in fields.items():
                if key == "id":
                    raise ManifestError("clip ids are immutable", clip_id, "id")
                data[key] = value
            updated = ClipMetadata.from_json_dict(data)
            clips = dict(self.library.clips)
            clips[clip_id] = updated
            from dataclasses import replace as dc_replace

            self._swap_library(dc_replace(self.library, clips=clips))
            return updated

    def delete_clip(self, clip_id: str, force: bool = False) -> list[str]:
        with self._lock:
            if clip_id not in self.library.clips:
                raise UnknownClipError(clip_id)
            clips = dict(self.library.clips)
            removed = [clip_id]
            target = clips.pop(clip_id)
            if target.kind.value == "stance":
                dependents = [
                    c.id
                    for c in clips.values()
                    if c.stance == clip_id or c.to_stance == clip_id
                ]
                if dependents and not force:
                    raise DependentClipsError(clip_id, sorted(dependents))
                for dep in dependents:
                    clips.pop(dep)
                    removed.append(dep)
            from dataclasses import replace as dc_replace

            start_stances = {
                layer: stance
                for layer, stance in self.library.start_stances.items()
                if stance in clips
            }
            self._swap_library(
                dc_replace(self.library, clips=clips, start_stances=start_stances)
            )
            return removed

    def update_plan(self, plan: MetaPlan) -> None:
        with self._lock:
            self.plan = plan
            self.revision += 1

    def update_counters(self, counters: UsageCounters) -> None:
        with self._lock:
            self.counters = counters
            self.revision += 1

    def snapshot(self) -> tuple[int, MetaGraph, MetaPlan, UsageCounters]:
        with self._lock:
            return self.revision, self.graph, self.plan, self.counters


class DuplicateClipError(Exception):
    def __init__(self, clip_id: str):
        self.clip_id = clip_id
        super().__init__(f"clip id {clip_id!r} already exists")


class UnknownClipError(Exception):
    def __init__(self, clip_id: str):
        self.clip_id = clip_id
        super().__init__(f"no clip with id {clip_id!r}")


class DependentClipsError(Exception):
    def __init__(self, clip_id: str, dependents: list[str]):
        self.clip_id = clip_id
        self.dependents = dependents
        super().__init__(
            f"removing stance {clip_id!r} would orphan {dependents}; pass ?force to cascade"
        )


def _error_detail(exc: Exception) -> dict:
    detail: dict[str, Any] = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ManifestError):
        if exc.clip_id:
            detail["clip"] = exc.clip_id
        if exc.field_name:
            detail["field"] = exc.field_name
    return detail


def create_app(state: ProjectState, frontend_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="embodiment authoring service", version="0.1.0")

    @app.get("/graph")
    def get_graph():
        revision, graph, _, _ = state.snapshot()
        return {"revision": revision, "graph": graph.to_json_dict()}

    @app.post("/clips", status_code=201)
    def post_clip(body: dict = Body(...)):
        try:
            clip = ClipMetadata.from_json_dict(body)
            state.add_clip(clip)
        except DuplicateClipError as exc:
            raise HTTPException(409, detail=_error_detail(exc))
        except (ManifestError, GraphError) as exc:
            raise HTTPException(422, detail=_error_detail(exc))
        return {"revision": state.revision, "clip": clip.to_json_dict()}

    @app.patch("/clips/{clip_id}")
    def patch_clip(clip_id: str, body: dict = Body(...)):
        try:
            clip = state.patch_clip(clip_id, body)
        except UnknownClipError as exc:
            raise HTTPException(404, detail=_error_detail(exc))
        except (ManifestError, GraphError) as exc:
            raise HTTPException(422, detail=_error_detail(exc))
        return {"revision": state.revision, "clip": clip.to_json_dict()}

    @app.delete("/clips/{clip_id}")
    def delete_clip(clip_id: str, force: bool = Query(False)):
        try:
            removed = state.delete_clip(clip_id, force=force)
        except UnknownClipError as exc:
            raise HTTPException(404, detail=_error_detail(exc))
        except DependentClipsError as exc:
            raise HTTPException(409, detail=_error_detail(exc))
        except (ManifestError, GraphError) as exc:
            raise HTTPException(422, detail=_error_detail(exc))
        return {"revision": state.revision, "removed": removed}

    @app.get("/validate")
    def get_validate():
        revision, graph, _, _ = state.snapshot()
        return {
            "revision": revision,
            "diagnostics": [d.to_json_dict() for d in graph.validate()],
        }

    @app.get("/expand")
    def get_expand(start: Optional[str] = None, format: str = "json"):
        revision, graph, _, _ = state.snapshot()
        try:
            machine = graph.expand(start)
        except (GraphError, GraphValidationError) as exc:
            raise HTTPException(422, detail=_error_detail(exc))
        if format == "dot":
            return Response(machine.to_dot(), media_type="text/vnd.graphviz")
        return {"revision": revision, "machine": machine.to_json_dict()}

    @app.post("/plan")
    def post_plan(body: dict = Body(...)):
        revision, graph, plan, _ = state.snapshot()
        try:
            requests = requests_from_json(body)
            now = float(body.get("now", 0.0))
            models = {
                key: markov_mod.MarkovModel.from_json_dict(doc)
                for key, doc in body.get("models", {}).items()
            }
            outcome = normalize(
                requests,
                graph,
                models=models or state.models or None,
                seed=int(body.get("seed", 0)),
                config=state.config,
            )
            result = replan(plan, now, outcome.actions, config=state.config)
        except (ValueError, KeyError) as exc:
            raise HTTPException(422, detail=_error_detail(exc))
        state.update_plan(result.plan)
        return {
            "revision": state.revision,
            "plan": result.plan.to_json_dict(),
            "rejected": [a.to_json_dict() for a in result.rejected],
            "dropped": [d.to_json_dict() for d in outcome.dropped],
        }

    @app.post("/sample")
    def post_sample(body: dict = Body(...)):
        revision, graph, current_plan, counters = state.snapshot()
        try:
            seed = int(body["seed"])
        except KeyError:
            raise HTTPException(422, detail={"message": "sample requires a seed"})
        try:
            plan = (
                MetaPlan.from_json_dict(body["plan"]) if "plan" in body else current_plan
            )
            outcome = sample_specific(
                plan, graph, counters, seed=seed, config=state.config
            )
        except ValueError as exc:
            raise HTTPException(422, detail=_error_detail(exc))
        if body.get("update_counters", True):
            state.update_counters(outcome.counters)
        return {"revision": state.revision, **outcome.to_json_dict()}

    @app.post("/generate")
    def post_generate(body: dict = Body(...)):
        try:
            model = markov_mod.MarkovModel.from_json_dict(body["model"])
            requests = markov_mod.generate(
                model,
                horizon=float(body["horizon"]),
                seed=int(body.get("seed", 0)),
                start_state=body.get("start_state"),
            )
        except (markov_mod.MarkovError, KeyError, ValueError) as exc:
            raise HTTPException(422, detail=_error_detail(exc))
        from .actions import requests_to_json

        return {"revision": state.revision, **requests_to_json(requests)}

    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app
