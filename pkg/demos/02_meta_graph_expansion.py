"""From seven labeled clips to a full state machine.

Authoring a character's animation state machine by hand means wiring
every clip to every compatible clip. The meta-graph removes that labor:
clips are only *labeled* (stance / gesture / fidget / transition plus an
owning stance) and the full connectivity is derived mechanically.

Run:  python3 demos/02_meta_graph_expansion.py
"""

from pathlib import Path

from embodiment.clips import load_manifest
from embodiment.metagraph import MetaGraph

FIXTURES = Path(__file__).parent.parent / "fixtures"

library = load_manifest(str(FIXTURES / "desk_manifest.json"))
graph = MetaGraph.from_library(library)

print("meta-graph buckets (what the author actually edits):")
for stance, view in graph.to_json_dict()["stances"].items():
    print(f"  stance {stance!r}")
    print(f"    gestures:    {view['gestures']}")
    print(f"    fidgets:     {view['fidgets']}")
    print(f"    transitions: {view['transitions_out']}")

diags = graph.validate()
print("\nvalidation:", "clean" if not diags else "")
for d in diags:
    print(f"  [{d.severity}] {d.message}")

machine = graph.expand("arms_relaxed")
print(f"\nexpanded: {len(machine.nodes)} nodes, {len(machine.edges)} edges")
for e in machine.edges:
    print(f"  {e.source:18s} -> {e.target:18s} exit at {e.exit_time:.2f}s")

# the growth story: N stances, a handful of actions each, dense transitions
print("\nhow edge counts scale (stances x 5 actions each, full transitions):")
from embodiment.clips import ClipMetadata, Layer, TaxonomyKind
from embodiment.pose import Pose

for n in (2, 4, 9):
    clips = []
    for i in range(n):
        clips.append(ClipMetadata(id=f"s{i}", kind=TaxonomyKind.STANCE,
                                  layer=Layer.ARMS, duration=2.0, looping=True))
        for k in range(5):
            clips.append(ClipMetadata(id=f"s{i}.a{k}", kind=TaxonomyKind.GESTURE,
                                      layer=Layer.ARMS, stance=f"s{i}", duration=1.0))
    for a in range(n):
        for b in range(n):
            if a != b:
                clips.append(ClipMetadata(
                    id=f"t{a}{b}", kind=TaxonomyKind.STANCE_TRANSITION, layer=Layer.ARMS,
                    stance=f"s{a}", to_stance=f"s{b}", duration=1.0))
    g = MetaGraph()
    for c in sorted(clips, key=lambda c: c.kind != TaxonomyKind.STANCE):
        g.add_clip(c)
    m = g.expand()
    print(f"  {n} stances -> {len(m.nodes):4d} nodes, {len(m.edges):4d} edges "
          f"(drag-and-drop operations needed: {len(clips)})")

print("\nDOT output for the desk graph (pipe into graphviz to render):\n")
print(graph.expand("arms_relaxed").to_dot())
