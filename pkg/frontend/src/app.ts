/**
 * Playground wiring: three panes (A, derived A', B), an edit box, quartet
 * preview and zip export. All pattern semantics come from the server.
 */

import {
  applyEdit, listMotifs, quartetPreview, renderProgram, RequestFailed,
  QuartetPreviewResponse,
} from "./api";
import { DEBOUNCE_MS, LiveRenderer } from "./debounce";
import { discoverLiterals, formatNumber, spliceLiteral } from "./literals";
import { bindSliders, emptyEditorState, EditorState, SliderBinding } from "./state";
import { buildExportBundle } from "./exporter";

const STARTER_A = `(pattern :style mtp
  (canvas :width 256 :height 256 :background "#F4F1EA")
  (layer
    (grid :rows 2 :cols 2)
    (place-motif :motif circle :scale 0.9 :fill "#31708E")
    :opacity 1))
`;

const STARTER_B = `(pattern :style mtp
  (canvas :width 256 :height 256 :background "#F4F1EA")
  (layer
    (grid :rows 5 :cols 5)
    (place-motif :motif star5 :scale (alt :axis row :values (0.6 1)) :fill "#8E3131")
    :opacity 1))
`;

const STARTER_EDIT =
  '(edit :kind replace :target place-motif :ordinal 0 :param motif :payload cross)';

interface Pane {
  state: EditorState;
  textarea: HTMLTextAreaElement;
  preview: HTMLElement;
  sliders: HTMLElement;
  status: HTMLElement;
  renderer: LiveRenderer<Awaited<ReturnType<typeof renderProgram>>>;
  seed: () => number;
  onRendered?: () => void;
}

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function describeError(error: unknown): string {
  if (error instanceof RequestFailed) {
    const where = error.api.span
      ? ` at ${error.api.span.startLine}:${error.api.span.startCol}`
      : error.api.nodePath
        ? ` at ${error.api.nodePath}`
        : "";
    return `${error.api.code}${where}: ${error.api.detail}`;
  }
  return `network error: ${String(error)}`;
}

function makePane(prefix: string, seed: () => number, onRendered?: () => void): Pane {
  const pane: Pane = {
    state: emptyEditorState(),
    textarea: el<HTMLTextAreaElement>(`${prefix}-text`),
    preview: el(`${prefix}-preview`),
    sliders: el(`${prefix}-sliders`),
    status: el(`${prefix}-status`),
    renderer: undefined as unknown as LiveRenderer<Awaited<ReturnType<typeof renderProgram>>>,
    seed,
    onRendered,
  };
  pane.renderer = new LiveRenderer(
    (text, seed) => renderProgram(text, seed),
    (outcome) => {
      if (outcome.ok && outcome.value) {
        pane.state.parsedOk = true;
        pane.state.lastSvg = outcome.value.svg;
        pane.state.canonical = outcome.value.canonical;
        pane.state.diagnostics = outcome.value.diagnostics.map(
          (d) => `${d.path}: ${d.message}`);
        pane.preview.innerHTML = outcome.value.svg;
        pane.status.textContent = pane.state.diagnostics.join("; ") || "ok";
        pane.status.classList.remove("error");
        pane.state.sliderBindings = bindSliders(
          discoverLiterals(pane.state.programText), outcome.value.literals);
        renderSliders(pane);
      } else {
        pane.state.parsedOk = false;
        pane.state.sliderBindings = [];
        pane.sliders.replaceChildren();
        pane.status.textContent = describeError(outcome.error);
        pane.status.classList.add("error");
      }
      pane.onRendered?.();
    },
    DEBOUNCE_MS,
  );
  pane.textarea.addEventListener("input", () => {
    pane.state.programText = pane.textarea.value;
    pane.renderer.schedule(pane.state.programText, pane.seed());
  });
  return pane;
}

function renderSliders(pane: Pane): void {
  pane.sliders.replaceChildren();
  for (const binding of pane.state.sliderBindings) {
    const row = document.createElement("label");
    row.className = "slider-row";
    const caption = document.createElement("span");
    caption.textContent = `${binding.label} (${binding.nodePath})`;
    const input = document.createElement("input");
    input.type = "range";
    input.min = String(binding.min);
    input.max = String(binding.max);
    input.step = binding.integer ? "1" : "0.01";
    input.value = String(binding.current);
    input.addEventListener("input", () => {
      applySlider(pane, binding, Number(input.value));
    });
    row.append(caption, input);
    pane.sliders.append(row);
  }
}

/** Slider drag: splice exactly one literal in the text, then re-render. */
function applySlider(pane: Pane, binding: SliderBinding, value: number): void {
  const replacement = formatNumber(value, binding.integer);
  pane.state.programText = spliceLiteral(pane.state.programText, binding.site, replacement);
  pane.textarea.value = pane.state.programText;
  pane.renderer.schedule(pane.state.programText, pane.seed());
}

export function startApp(): void {
  const seedInput = el<HTMLInputElement>("seed");
  const seed = () => Number(seedInput.value) || 0;
  const editBox = el<HTMLTextAreaElement>("edit-text");
  const composeButton = el<HTMLButtonElement>("compose");
  const exportButton = el<HTMLButtonElement>("export");
  const quartetStatus = el("quartet-status");
  const aPrimeView = el("aprime-preview");
  const aPrimeText = el<HTMLTextAreaElement>("aprime-text");

  let lastPreview: QuartetPreviewResponse | null = null;

  const paneA = makePane("a", seed, () => deriveAPrime());
  const paneB = makePane("b", seed);

  const aPrimeRenderer = new LiveRenderer(
    (text, s) => renderProgram(text, s),
    (outcome) => {
      if (outcome.ok && outcome.value) {
        aPrimeView.innerHTML = outcome.value.svg;
      }
    },
    DEBOUNCE_MS,
  );

  async function deriveAPrime(): Promise<void> {
    lastPreview = null;
    exportButton.disabled = true;
    const edit = editBox.value.trim();
    if (!edit || !paneA.state.parsedOk) return;
    try {
      const derived = await applyEdit(paneA.state.programText, edit);
      aPrimeText.value = derived.program; // read-only mirror of apply_edit(A, e)
      aPrimeRenderer.schedule(derived.program, seed());
      quartetStatus.textContent = "";
      paneA.preview.classList.remove("incompatible");
    } catch (error) {
      aPrimeText.value = "";
      aPrimeView.innerHTML = "";
      quartetStatus.textContent = describeError(error);
      paneA.preview.classList.add("incompatible");
    }
  }

  editBox.addEventListener("input", () => void deriveAPrime());

  composeButton.addEventListener("click", async () => {
    paneA.preview.classList.remove("incompatible");
    paneB.preview.classList.remove("incompatible");
    quartetStatus.textContent = "composing...";
    try {
      const preview = await quartetPreview(
        paneA.state.programText, editBox.value.trim(), paneB.state.programText, seed());
      lastPreview = preview;
      for (const [id, svg] of [["q-a", preview.a], ["q-aprime", preview.aPrime],
                               ["q-b", preview.b], ["q-bprime", preview.bPrime]] as const) {
        el(id).innerHTML = svg;
      }
      quartetStatus.textContent = "quartet ready";
      exportButton.disabled = false;
    } catch (error) {
      lastPreview = null;
      exportButton.disabled = true;
      quartetStatus.textContent = describeError(error);
      if (error instanceof RequestFailed && error.api.pane) {
        (error.api.pane === "a" ? paneA : paneB).preview.classList.add("incompatible");
      }
    }
  });

  exportButton.addEventListener("click", () => {
    if (!lastPreview) return;
    const bundle = buildExportBundle(lastPreview, seed());
    const blob = new Blob([bundle.bytes.buffer as ArrayBuffer], { type: "application/zip" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = bundle.filename;
    link.click();
    URL.revokeObjectURL(link.href);
  });

  void listMotifs().then((body) => {
    el("motif-list").textContent =
      "motifs: " + body.motifs.map((m) => m.id).join(", ");
  });

  // first paint
  paneA.textarea.value = STARTER_A;
  paneA.state.programText = STARTER_A;
  paneB.textarea.value = STARTER_B;
  paneB.state.programText = STARTER_B;
  editBox.value = STARTER_EDIT;
  paneA.renderer.fire(STARTER_A, seed());
  paneB.renderer.fire(STARTER_B, seed());
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  startApp();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", () => startApp());
}
