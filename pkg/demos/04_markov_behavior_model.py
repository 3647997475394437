"""Learning conversation behavior and generating new sequences.

Annotated recordings tell us how people actually alternate gestures,
fidgets and posture shifts. A first-order transition model per body
layer captures that rhythm; sampling it produces fresh abstract action
sequences that can drive the planner when the agent goes quiet.

Run:  python3 demos/04_markov_behavior_model.py
"""

from pathlib import Path

import numpy as np

from embodiment import annotations as A
from embodiment.actions import MetaPlan
from embodiment.markov import generate, generate_fill, layer_events, learn
from embodiment.planner import replan

FIXTURES = Path(__file__).parent.parent / "fixtures"

doc = A.load(str(FIXTURES / "long_conversation.tsvann"))
print(f"corpus: {doc.duration:.0f}s, {doc.interval_count()} intervals")

events = layer_events(doc, "arms")
print("\nfirst arm events (left/right tiers merged, LR = both hands):")
for e in events[:8]:
    sem = f" ({e.semantic})" if e.semantic else ""
    print(f"  {e.start:6.1f}-{e.end:6.1f}  {e.state}{sem}")

model = learn([doc], "arms")
print("\ntransition matrix (rows sum to 1):")
header = "        " + " ".join(f"{s:>5s}" for s in model.states)
print(header)
for i, s in enumerate(model.states):
    row = " ".join(f"{p:5.2f}" for p in model.matrix[i])
    print(f"  {s:>5s} {row}")

stationary = model.stationary()
print("\nstationary distribution:")
for s, p in zip(model.states, stationary):
    bar = "#" * int(p * 60)
    print(f"  {s:>5s} {p:5.2f} {bar}")

print("\ntwo generated 25-second sequences (abstract actions, not clips):")
for seed in (7, 8):
    actions = generate(model, horizon=25.0, seed=seed)
    line = ", ".join(
        f"{a.start:.1f}s {a.side or ''} {a.kind.value}" for a in actions
    )
    print(f"  seed {seed}: {line}")

print("\nsemantic labels ride along (post-hoc mode):")
for state, dist in sorted(model.semantics.items()):
    if any(tag for tag in dist):
        pretty = {tag or "<none>": round(p, 2) for tag, p in dist.items()}
        print(f"  {state:>5s}: {pretty}")

fill = generate_fill(model, (10.0, 30.0), seed=3)
planned = replan(MetaPlan.empty(), 0.0, fill)
print(f"\ngap filling: {len(fill)} actions generated for [10s, 30s], "
      f"{len(planned.displacements)} had to move during replanning "
      "(generation is already conflict-free)")
