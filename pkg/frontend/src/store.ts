// Client-side mirror of the server graph plus the authoring interaction
// rules. The store performs no validation or planning of its own: every
// rule it enforces locally (stance must be selected before a drop, pick
// the target stance before a transition drop) is a usability gate, and
// every state change round-trips through the HTTP API. Whatever the
// server rejects is surfaced verbatim.

import { ApiClient, ApiError } from "./api";
import type { ClipRecord, Diagnostic, GraphView, TaxonomyKind } from "./types";

export type BucketKind = "stance" | "gesture" | "fidget" | "transition";

export interface PaletteItem {
  id: string;
  duration: number;
  semantic_tags?: string[];
  base_likelihood?: number;
}

export interface FieldError {
  clip: string;
  field?: string;
  message: string;
}

export interface RenamePrompt {
  item: PaletteItem;
  target: BucketKind;
  takenId: string;
}

type Listener = () => void;

export class GraphStore {
  revision = -1;
  graph: GraphView = { stances: {}, start_stances: {} };
  diagnostics: Diagnostic[] = [];
  selectedStance: string | null = null;
  targetStance: string | null = null; // for transition drops
  selectedClip: string | null = null;
  hint: string | null = null;
  fieldError: FieldError | null = null;
  renamePrompt: RenamePrompt | null = null;
  clipCache: Record<string, ClipRecord> = {};

  private listeners: Listener[] = [];

  constructor(public api: ApiClient) {}

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private emit() {
    for (const fn of this.listeners) fn();
  }

  /** Record a server revision; a jump bigger than one step means another
   * writer got in between and our view may be stale. */
  private track(revision: number): boolean {
    const stale = this.revision >= 0 && revision > this.revision + 1;
    this.revision = revision;
    return stale;
  }

  async refresh(): Promise<void> {
    const [graph, validate] = await Promise.all([
      this.api.getGraph(),
      this.api.getValidate(),
    ]);
    this.graph = graph.graph;
    this.diagnostics = validate.diagnostics;
    this.revision = Math.max(graph.revision, validate.revision);
    if (this.selectedStance && !(this.selectedStance in this.graph.stances)) {
      this.selectedStance = null;
    }
    if (this.targetStance && !(this.targetStance in this.graph.stances)) {
      this.targetStance = null;
    }
    this.emit();
  }

  selectStance(id: string | null): void {
    this.selectedStance = id;
    this.hint = null;
    this.emit();
  }

  selectTargetStance(id: string | null): void {
    this.targetStance = id;
    this.emit();
  }

  selectClip(id: string | null): void {
    this.selectedClip = id;
    this.emit();
  }

  dismissErrors(): void {
    this.hint = null;
    this.fieldError = null;
    this.renamePrompt = null;
    this.emit();
  }

  /** The drag-and-drop action: build the clip record for the target meta
   * node and POST it. Returns true when the server accepted it. */
  async dropClip(item: PaletteItem, target: BucketKind): Promise<boolean> {
    this.hint = null;
    this.fieldError = null;
    this.renamePrompt = null;
    if (target !== "stance" && this.selectedStance === null) {
      this.hint = "Select a stance first: gestures, fidgets and transitions attach to it.";
      this.emit();
      return false;
    }
    if (target === "transition" && this.targetStance === null) {
      this.hint = "Select the destination stance first, then drop the transition clip.";
      this.emit();
      return false;
    }
    const clip = this.buildClip(item, target);
    try {
      const res = await this.api.postClip(clip);
      const stale = this.track(res.revision);
      this.clipCache[clip.id] = res.clip;
      await this.refresh(); // buckets and the validation badge
      if (stale) await this.refresh();
      return true;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.renamePrompt = { item, target, takenId: clip.id };
      } else if (err instanceof ApiError && err.status === 422) {
        this.fieldError = {
          clip: err.detail.clip ?? clip.id,
          field: err.detail.field,
          message: err.detail.message,
        };
      } else {
        this.hint = err instanceof Error ? err.message : String(err);
      }
      this.emit();
      return false;
    }
  }

  private buildClip(item: PaletteItem, target: BucketKind): ClipRecord {
    const base = {
      id: item.id,
      duration: item.duration,
      semantic_tags: item.semantic_tags ?? [],
      base_likelihood: item.base_likelihood ?? 1.0,
    };
    if (target === "stance") {
      return { ...base, kind: "stance", layer: this.currentLayer(), looping: true };
    }
    const stance = this.selectedStance!;
    const layer = this.graph.stances[stance]?.layer ?? this.currentLayer();
    if (target === "transition") {
      return {
        ...base,
        kind: "stance_transition",
        layer,
        stance,
        to_stance: this.targetStance!,
        looping: false,
      };
    }
    const kind: TaxonomyKind = target;
    return { ...base, kind, layer, stance, looping: false };
  }

  private currentLayer() {
    if (this.selectedStance) {
      const view = this.graph.stances[this.selectedStance];
      if (view) return view.layer;
    }
    return "arms" as const;
  }

  /** Properties-panel edit: optimistic cache update, PATCH, rollback and a
   * verbatim server message on rejection. A 404 (our view went stale and
   * the clip is gone or renamed) refreshes and retries once. */
  async editProperty(
    clipId: string,
    field: keyof ClipRecord,
    value: unknown,
    retried = false,
  ): Promise<boolean> {
    this.fieldError = null;
    const before = this.clipCache[clipId];
    if (before) {
      this.clipCache[clipId] = { ...before, [field]: value } as ClipRecord;
      this.emit();
    }
    try {
      const res = await this.api.patchClip(clipId, { [field]: value });
      this.track(res.revision);
      this.clipCache[clipId] = res.clip;
      this.emit();
      return true;
    } catch (err) {
      if (before) this.clipCache[clipId] = before; // rollback the optimistic write
      if (err instanceof ApiError && err.status === 404 && !retried) {
        await this.refresh();
        if (clipId in this.allClipIds()) {
          return this.editProperty(clipId, field, value, true);
        }
      }
      if (err instanceof ApiError) {
        this.fieldError = {
          clip: err.detail.clip ?? clipId,
          field: err.detail.field ?? (field as string),
          message: err.detail.message,
        };
      }
      this.emit();
      return false;
    }
  }

  allClipIds(): Record<string, true> {
    const ids: Record<string, true> = {};
    for (const [stance, view] of Object.entries(this.graph.stances)) {
      ids[stance] = true;
      for (const g of view.gestures) ids[g] = true;
      for (const f of view.fidgets) ids[f] = true;
      for (const clips of Object.values(view.transitions_out)) {
        for (const t of clips) ids[t] = true;
      }
    }
    return ids;
  }

  errorCount(): number {
    return this.diagnostics.filter((d) => d.severity === "error").length;
  }

  warningCount(): number {
    return this.diagnostics.filter((d) => d.severity === "warning").length;
  }
}
