"""A scripted authoring session against the HTTP service.

Mirrors what the browser UI does: build a small embodiment from scratch
by posting clips (the drag-and-drop action), tweak a property, inspect
validation, expand the machine and preview two sampled schedules. Uses
an in-process test client; `embodiment serve` exposes the same API over
a real socket.

Run:  python3 demos/05_http_service_session.py
"""

import json

from fastapi.testclient import TestClient

from embodiment.clips import ClipLibrary
from embodiment.pose import BodyPart, Joint, Pose, Skeleton
from embodiment.service import ProjectState, create_app

skeleton = Skeleton((Joint("root", None, BodyPart.SPINE), Joint("hand", 0, BodyPart.ARMS)))
library = ClipLibrary(skeleton=skeleton, base_pose=Pose.identity(2), clips={})
client = TestClient(create_app(ProjectState(library)))


def show(label, response):
    print(f"{label:40s} HTTP {response.status_code}  revision={response.json().get('revision')}")
    return response


show("drop stance 'open'", client.post("/clips", json={
    "id": "open", "kind": "stance", "layer": "arms", "duration": 2.0, "looping": True}))
show("drop stance 'folded'", client.post("/clips", json={
    "id": "folded", "kind": "stance", "layer": "arms", "duration": 2.0, "looping": True}))
show("drop transition open->folded", client.post("/clips", json={
    "id": "fold", "kind": "stance_transition", "layer": "arms",
    "stance": "open", "to_stance": "folded", "duration": 1.2}))
show("drop transition folded->open", client.post("/clips", json={
    "id": "unfold", "kind": "stance_transition", "layer": "arms",
    "stance": "folded", "to_stance": "open", "duration": 1.2}))
show("drop gesture onto 'open'", client.post("/clips", json={
    "id": "wave", "kind": "gesture", "layer": "arms", "stance": "open", "duration": 1.0}))
show("drop gesture onto 'folded'", client.post("/clips", json={
    "id": "shrug", "kind": "gesture", "layer": "arms", "stance": "folded", "duration": 1.0}))

# the properties panel: a bad edit is rejected with the offending field
r = client.patch("/clips/wave", json={"base_likelihood": -1.0})
print(f"{'bad properties edit':40s} HTTP {r.status_code}  field={r.json()['detail']['field']}")
show("good properties edit", client.patch("/clips/wave", json={"base_likelihood": 2.0}))

diags = client.get("/validate").json()["diagnostics"]
print(f"\nvalidation diagnostics: {[d['code'] for d in diags] or 'clean'}")

machine = client.get("/expand", params={"start": "open"}).json()["machine"]
print(f"expanded machine: {len(machine['nodes'])} nodes, {len(machine['edges'])} edges")

plan = client.post("/plan", json={"requests": [
    {"type": "abstract", "kind": "gesture", "layer": "arms", "start": 0.0},
    {"type": "stance", "target": "folded", "layer": "arms", "start": 2.0},
    {"type": "abstract", "kind": "gesture", "layer": "arms", "start": 4.0},
]}).json()["plan"]
print("\nplanned lanes:", json.dumps(
    {k: [(a["start"], a["kind"]) for a in v] for k, v in plan["layers"].items()}))

print("\npreview with two seeds:")
for seed in (1, 2):
    lanes = client.post("/sample", json={"plan": plan, "seed": seed,
                                         "update_counters": False}).json()["layers"]
    for layer, entries in lanes.items():
        picks = ", ".join(f"{e['clip']}@{e['start']:.1f}s" for e in entries)
        print(f"  seed {seed} {layer}: {picks}")
