// JSON shapes exchanged with the authoring service. These mirror the
// documented schemas (docs/manifest-schema.md, docs/http-api.md); the UI
// never invents fields of its own.

export type TaxonomyKind = "stance" | "gesture" | "fidget" | "stance_transition";
export type LayerName = "body" | "arms" | "head";

export interface ClipRecord {
  id: string;
  kind: TaxonomyKind;
  layer: LayerName;
  stance?: string;
  to_stance?: string | null;
  duration: number;
  blend_in?: number;
  blend_out?: number;
  trim_start?: number;
  trim_end?: number;
  looping?: boolean;
  semantic_tags?: string[];
  base_likelihood?: number;
}

export interface StanceView {
  layer: LayerName;
  gestures: string[];
  fidgets: string[];
  transitions_out: Record<string, string[]>;
}

export interface GraphView {
  stances: Record<string, StanceView>;
  start_stances: Record<string, string>;
}

export interface Diagnostic {
  severity: "error" | "warning";
  code: string;
  message: string;
  subject: string;
}

export interface MetaActionView {
  kind: TaxonomyKind;
  layer: LayerName;
  start: number;
  duration: number;
  priority: number;
  specific_clip: string | null;
  semantic: string | null;
  side: string | null;
  to_stance: string | null;
  seq: number;
}

export interface PlanView {
  layers: Record<string, MetaActionView[]>;
}

export interface ScheduledClipView {
  clip: string;
  start: number;
  end: number;
}

export interface SampleView {
  layers: Record<string, ScheduledClipView[]>;
  discarded: Diagnostic[];
}

export type RequestEntry =
  | { type: "specific_clip"; clip: string; start: number; priority?: number | null }
  | {
      type: "abstract";
      kind: TaxonomyKind;
      layer: LayerName;
      start: number;
      semantic?: string | null;
      side?: string | null;
      duration_hint?: number | null;
      priority?: number | null;
    }
  | { type: "stance"; target: string; layer: LayerName; start: number; priority?: number | null }
  | { type: "unspecified"; start: number; end: number; priority?: number | null };

export interface RequestsDoc {
  requests: RequestEntry[];
}

export interface ErrorDetail {
  type?: string;
  message: string;
  clip?: string;
  field?: string;
}
