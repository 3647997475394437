// DOM rendering. Pure state -> elements; all behavior is delegated back
// to the store/preview objects through the handler bundle.

import type { GraphStore, BucketKind } from "./store";
import type { PreviewResult, TimelineSlot } from "./preview";

export interface Handlers {
  onSelectStance(id: string): void;
  onSelectTarget(id: string): void;
  onSelectClip(id: string): void;
  onDrop(target: BucketKind, payload: string): void;
  onEdit(clipId: string, field: string, value: unknown): void;
  onRename(newId: string): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function dropZone(target: BucketKind, handlers: Handlers, title: string): HTMLElement {
  const zone = el("div", `bucket bucket-${target}`);
  zone.dataset.bucket = target;
  zone.appendChild(el("h3", "bucket-title", title));
  zone.addEventListener("dragover", (e) => e.preventDefault());
  zone.addEventListener("drop", (e) => {
    e.preventDefault();
    const payload = e.dataTransfer?.getData("application/x-clip");
    if (payload) handlers.onDrop(target, payload);
  });
  return zone;
}

function clipChip(id: string, store: GraphStore, handlers: Handlers, extra = ""): HTMLElement {
  const chip = el("button", "clip-chip" + (store.selectedClip === id ? " selected" : ""));
  chip.textContent = extra ? `${id} ${extra}` : id;
  chip.addEventListener("click", () => handlers.onSelectClip(id));
  return chip;
}

export function renderSheet(root: HTMLElement, store: GraphStore, handlers: Handlers): void {
  root.textContent = "";
  const sheet = el("div", "sheet");

  // stance column: pick or create the central piece
  const stanceZone = dropZone("stance", handlers, "Stances (drop a clip to create one)");
  for (const [id, view] of Object.entries(store.graph.stances).sort()) {
    const row = el("div", "stance-row");
    const pick = el(
      "button",
      "stance-pick" + (store.selectedStance === id ? " selected" : ""),
      `${id} [${view.layer}]`,
    );
    pick.addEventListener("click", () => handlers.onSelectStance(id));
    const target = el(
      "button",
      "stance-target" + (store.targetStance === id ? " selected" : ""),
      "⇒",
    );
    target.title = "use as transition destination";
    target.addEventListener("click", () => handlers.onSelectTarget(id));
    row.append(pick, target);
    stanceZone.appendChild(row);
  }
  sheet.appendChild(stanceZone);

  // the selected stance sits in the center, its buckets around it
  const center = el("div", "center");
  const current = store.selectedStance ? store.graph.stances[store.selectedStance] : null;
  center.appendChild(
    el(
      "div",
      "current-stance",
      store.selectedStance ? `stance: ${store.selectedStance}` : "no stance selected",
    ),
  );
  const gestures = dropZone("gesture", handlers, "Gestures");
  const fidgets = dropZone("fidget", handlers, "Fidgets");
  const transitions = dropZone(
    "transition",
    handlers,
    store.targetStance ? `Transitions → ${store.targetStance}` : "Transitions (pick destination)",
  );
  if (current) {
    for (const g of current.gestures) gestures.appendChild(clipChip(g, store, handlers));
    for (const f of current.fidgets) fidgets.appendChild(clipChip(f, store, handlers));
    for (const [dest, clips] of Object.entries(current.transitions_out).sort()) {
      for (const t of clips) transitions.appendChild(clipChip(t, store, handlers, `→ ${dest}`));
    }
  }
  center.append(gestures, fidgets, transitions);
  sheet.appendChild(center);
  root.appendChild(sheet);
}

export function renderBadge(root: HTMLElement, store: GraphStore): void {
  const errors = store.errorCount();
  const warnings = store.warningCount();
  root.textContent = "";
  const badge = el(
    "span",
    errors ? "badge badge-error" : warnings ? "badge badge-warn" : "badge badge-ok",
    errors ? `${errors} error(s)` : warnings ? `${warnings} warning(s)` : "valid",
  );
  badge.title = store.diagnostics.map((d) => `[${d.severity}] ${d.message}`).join("\n");
  root.appendChild(badge);
  root.appendChild(el("span", "revision", ` rev ${store.revision}`));
}

export function renderMessages(root: HTMLElement, store: GraphStore, handlers: Handlers): void {
  root.textContent = "";
  if (store.hint) root.appendChild(el("div", "hint", store.hint));
  if (store.fieldError) {
    const box = el("div", "field-error");
    box.appendChild(el("strong", undefined, store.fieldError.field ?? "error"));
    box.appendChild(el("span", undefined, ` ${store.fieldError.message}`));
    root.appendChild(box);
  }
  if (store.renamePrompt) {
    const box = el("div", "rename");
    box.appendChild(
      el("span", undefined, `id "${store.renamePrompt.takenId}" is taken; pick another: `),
    );
    const input = el("input");
    input.value = store.renamePrompt.takenId + "_2";
    const go = el("button", undefined, "retry");
    go.addEventListener("click", () => handlers.onRename(input.value));
    box.append(input, go);
    root.appendChild(box);
  }
}

const EDITABLE: Array<{ field: string; numeric: boolean }> = [
  { field: "duration", numeric: true },
  { field: "blend_in", numeric: true },
  { field: "blend_out", numeric: true },
  { field: "trim_start", numeric: true },
  { field: "trim_end", numeric: true },
  { field: "base_likelihood", numeric: true },
  { field: "semantic_tags", numeric: false },
];

export function renderProperties(root: HTMLElement, store: GraphStore, handlers: Handlers): void {
  root.textContent = "";
  root.appendChild(el("h3", undefined, "Properties"));
  const id = store.selectedClip;
  if (!id) {
    root.appendChild(el("p", "muted", "select a clip"));
    return;
  }
  const clip = store.clipCache[id];
  root.appendChild(el("div", "prop-id", id));
  if (!clip) {
    root.appendChild(el("p", "muted", "(fields load after the clip is touched this session)"));
    return;
  }
  for (const { field, numeric } of EDITABLE) {
    const row = el("label", "prop-row");
    row.appendChild(el("span", "prop-name", field));
    const input = el("input");
    input.name = field;
    const value = (clip as unknown as Record<string, unknown>)[field];
    input.value = Array.isArray(value) ? value.join(",") : String(value ?? "");
    if (store.fieldError?.field === field) input.classList.add("invalid");
    input.addEventListener("change", () => {
      const raw = input.value;
      handlers.onEdit(
        id,
        field,
        numeric ? Number(raw) : raw.split(",").map((s) => s.trim()).filter(Boolean),
      );
    });
    row.appendChild(input);
    root.appendChild(row);
  }
}

export function renderTimeline(root: HTMLElement, result: PreviewResult | null): void {
  root.textContent = "";
  root.appendChild(el("h3", undefined, "Plan preview"));
  if (!result || result.slots.length === 0) {
    root.appendChild(el("p", "muted", "empty timeline"));
    return;
  }
  const horizon = Math.max(...result.slots.map((s) => s.end), 1);
  const lanes = new Map<string, TimelineSlot[]>();
  for (const slot of result.slots) {
    if (!lanes.has(slot.layer)) lanes.set(slot.layer, []);
    lanes.get(slot.layer)!.push(slot);
  }
  for (const [layer, slots] of [...lanes.entries()].sort()) {
    const laneEl = el("div", "lane");
    laneEl.appendChild(el("span", "lane-name", layer));
    const track = el("div", "track");
    for (const slot of slots) {
      const block = el(
        "div",
        "slot" + (slot.discarded ? " discarded" : ""),
        slot.label,
      );
      block.style.left = `${(slot.start / horizon) * 100}%`;
      block.style.width = `${Math.max(1, ((slot.end - slot.start) / horizon) * 100)}%`;
      block.title = slot.discarded
        ? (slot.diagnostic ?? "discarded: no usable clip")
        : JSON.stringify(slot.action, null, 1);
      track.appendChild(block);
    }
    laneEl.appendChild(track);
    root.appendChild(laneEl);
  }
  root.appendChild(el("div", "seed-note", `seed ${result.seed}`));
}
