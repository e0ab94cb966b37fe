import type { LiteralDescriptor } from "./api";
import type { LiteralSite } from "./literals";

export interface SliderBinding {
  nodePath: string;
  label: string;
  min: number;
  max: number;
  current: number;
  integer: boolean;
  site: LiteralSite;
}

export interface EditorState {
  programText: string;
  parsedOk: boolean;
  sliderBindings: SliderBinding[];
  lastSvg: string;
  canonical: string;
  diagnostics: string[];
}

export function emptyEditorState(programText = ""): EditorState {
  return {
    programText,
    parsedOk: false,
    sliderBindings: [],
    lastSvg: "",
    canonical: "",
    diagnostics: [],
  };
}

/**
 * Join client-side literal sites (text spans) with the server's literal
 * metadata (ranges) by node path; only matched literals become sliders.
 */
export function bindSliders(
  sites: LiteralSite[],
  literals: LiteralDescriptor[],
): SliderBinding[] {
  const byPath = new Map(literals.map((l) => [l.nodePath, l]));
  const bindings: SliderBinding[] = [];
  for (const site of sites) {
    const meta = byPath.get(site.nodePath);
    if (!meta || meta.min === null || meta.max === null) continue;
    bindings.push({
      nodePath: site.nodePath,
      label: meta.label,
      min: meta.min,
      max: meta.max,
      current: Number(site.text),
      integer: meta.integer,
      site,
    });
  }
  return bindings;
}

export interface AnalogyWorkspace {
  paneA: EditorState;
  paneAPrime: EditorState; // read-only; always server-derived from (A, edit)
  paneB: EditorState;
  activeEdit: string | null;
  quartetPreview: { a: string; aPrime: string; b: string; bPrime: string } | null;
}
