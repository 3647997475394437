"""Mixed-abstraction requests to a concrete clip schedule.

An agent rarely speaks one language: it may name an exact clip, ask for
"some positive gesture", demand a stance, or say nothing at all. The
planner normalizes all of those into meta actions, resolves temporal
conflicts greedily by (start, priority), and finally draws concrete
clips with anti-repetition weighting.

Run:  python3 demos/03_planning_and_sampling.py
"""

from pathlib import Path

from embodiment.actions import (
    AbstractActionRequest,
    MetaPlan,
    SpecificClipRequest,
    StanceRequest,
)
from embodiment.clips import Layer, TaxonomyKind, load_manifest
from embodiment.metagraph import MetaGraph
from embodiment.planner import UsageCounters, normalize, replan, sample_specific

FIXTURES = Path(__file__).parent.parent / "fixtures"

graph = MetaGraph.from_library(load_manifest(str(FIXTURES / "studio_manifest.json")))

requests = [
    AbstractActionRequest(TaxonomyKind.GESTURE, Layer.ARMS, 0.5, semantic="positive", side="left"),
    SpecificClipRequest("a_rest.sweep_lr", 2.5),
    AbstractActionRequest(TaxonomyKind.GESTURE, Layer.ARMS, 3.0),  # will collide with the above
    StanceRequest("a_hips", Layer.ARMS, 6.0),
    AbstractActionRequest(TaxonomyKind.GESTURE, Layer.ARMS, 8.5, side="right"),
    AbstractActionRequest(TaxonomyKind.GESTURE, Layer.HEAD, 1.0, semantic="positive-nod"),
    AbstractActionRequest(TaxonomyKind.FIDGET, Layer.BODY, 4.0),
]

out = normalize(requests, graph)
print(f"{len(requests)} requests -> {len(out.actions)} meta actions")
for a in out.actions:
    clip = f" clip={a.specific_clip}" if a.specific_clip else ""
    sem = f" sem={a.semantic}" if a.semantic else ""
    print(f"  [{a.layer.value:4s}] {a.kind.value:17s} {a.start:5.2f}-{a.end:5.2f}"
          f" prio={a.priority}{clip}{sem}")

planned = replan(MetaPlan.empty(), 0.0, out.actions)
print("\nafter replanning (conflicts resolved greedily):")
for layer, lane in sorted(planned.plan.lanes.items()):
    spans = ", ".join(f"{a.start:.2f}-{a.end:.2f}" for a in lane)
    print(f"  {layer.value:5s} {spans}")
for d in planned.displacements:
    print(f"  moved: {d.effect} [{d.victim.start:.2f}-{d.victim.end:.2f}]"
          f" because of prio-{d.cause.priority} action at {d.cause.start:.2f}")


def ascii_timeline(schedule, width=72, horizon=12.0):
    for layer, entries in sorted(schedule.items()):
        lane = ["."] * width
        for s in entries:
            a = int(s.start / horizon * width)
            b = max(a + 1, int(s.end / horizon * width))
            tag = s.clip_id.split(".")[-1][: b - a]
            for k, ch in enumerate(tag.ljust(b - a, "#")):
                if a + k < width:
                    lane[a + k] = ch
        print(f"  {layer.value:5s} |{''.join(lane)}|")


print("\nsampled schedules for two seeds (same plan, different clips):")
for seed in (1, 2):
    result = sample_specific(planned.plan, graph, UsageCounters(), seed=seed)
    print(f"seed {seed}:")
    ascii_timeline(result.schedule)
    for layer, entries in sorted(result.schedule.items()):
        for s in entries:
            print(f"    {layer.value:5s} {s.start:5.2f}-{s.end:5.2f}  {s.clip_id}")

print("\nanti-repetition in action: sample the same single-slot plan 8 times")
counters = UsageCounters()
plan = replan(MetaPlan.empty(), 0.0,
              normalize([AbstractActionRequest(TaxonomyKind.GESTURE, Layer.ARMS, 0.0)], graph).actions).plan
for i in range(8):
    res = sample_specific(plan, graph, counters, seed=100 + i)
    counters = res.counters
    print(f"  draw {i}: {res.schedule[Layer.ARMS][0].clip_id:18s}"
          f" counters={ {k: round(v,1) for k, v in sorted(counters.counts.items())} }")
