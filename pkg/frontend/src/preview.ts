// Plan-preview model: requests -> POST /plan -> POST /sample, shaped into
// per-layer timeline lanes. A planned slot that received no clip (every
// candidate was filtered or none matched) renders struck through with the
// server's diagnostic; re-sampling with a new seed reuses the same plan.

import { ApiClient } from "./api";
import type { Diagnostic, PlanView, RequestsDoc } from "./types";

export interface TimelineSlot {
  layer: string;
  start: number;
  end: number;
  label: string;
  discarded: boolean;
  diagnostic?: string;
  action?: Record<string, unknown>;
}

export interface PreviewResult {
  plan: PlanView;
  seed: number;
  slots: TimelineSlot[];
  diagnostics: Diagnostic[];
  /** stable fingerprint of the chosen clips, for comparing two seeds */
  signature: string;
}

export class PlanPreview {
  constructor(private api: ApiClient) {}

  async preview(requests: RequestsDoc, seed: number): Promise<PreviewResult> {
    const planned = await this.api.postPlan(requests, 0, seed);
    return this.resample(planned.plan, seed, planned.dropped ?? []);
  }

  /** Re-seed button: same plan, fresh sample. */
  async resample(
    plan: PlanView,
    seed: number,
    planDiagnostics: Diagnostic[] = [],
  ): Promise<PreviewResult> {
    const sampled = await this.api.postSample(plan, seed, false);
    const slots: TimelineSlot[] = [];
    const discardQueue = [...(sampled.discarded ?? [])];
    for (const [layer, actions] of Object.entries(plan.layers)) {
      const lane = sampled.layers[layer] ?? [];
      for (const action of actions) {
        const hit = lane.find(
          (s) => s.start >= action.start - 1e-9 && s.start < action.start + action.duration,
        );
        if (hit) {
          slots.push({
            layer,
            start: hit.start,
            end: hit.end,
            label: hit.clip,
            discarded: false,
            action: action as unknown as Record<string, unknown>,
          });
        } else {
          slots.push({
            layer,
            start: action.start,
            end: action.start + action.duration,
            label: action.specific_clip ?? `${action.kind}`,
            discarded: true,
            diagnostic: discardQueue.shift()?.message,
            action: action as unknown as Record<string, unknown>,
          });
        }
      }
    }
    slots.sort((a, b) => (a.layer === b.layer ? a.start - b.start : a.layer < b.layer ? -1 : 1));
    const signature = slots
      .filter((s) => !s.discarded)
      .map((s) => `${s.layer}:${s.start.toFixed(3)}:${s.label}`)
      .join("|");
    return {
      plan,
      seed,
      slots,
      diagnostics: [...planDiagnostics, ...(sampled.discarded ?? [])],
      signature,
    };
  }
}
