/**
 * Typed client for the local pattern service. The UI never computes pattern
 * semantics itself: every SVG, canonical program text and slider range shown
 * on screen originated from one of these endpoints.
 */

export interface SourceSpan {
  startLine: number;
  startCol: number;
  endLine: number;
  endCol: number;
}

export interface ApiError {
  code: "PARSE_ERROR" | "SEMANTIC_ERROR" | "INCOMPATIBLE_EDIT" | "INTERNAL";
  detail: string;
  span?: SourceSpan;
  nodePath?: string;
  selector?: string;
  pane?: "a" | "b";
}

export interface LiteralDescriptor {
  nodePath: string;
  label: string;
  value: number;
  min: number | null;
  max: number | null;
  integer: boolean;
}

export interface RenderResponse {
  svg: string;
  diagnostics: { path: string; message: string }[];
  literals: LiteralDescriptor[];
  canonical: string;
}

export interface QuartetPreviewResponse {
  a: string;
  aPrime: string;
  b: string;
  bPrime: string;
  programs: { a: string; aPrime: string; b: string; bPrime: string };
  edit: string;
}

export class RequestFailed extends Error {
  constructor(public readonly status: number, public readonly api: ApiError) {
    super(api.detail);
  }
}

const BASE = "/api/v1";

async function post<T>(path: string, body: unknown): Promise<T> {
  const response = await fetch(`${BASE}${path}`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  const payload = await response.json();
  if (!response.ok) {
    throw new RequestFailed(response.status, payload as ApiError);
  }
  return payload as T;
}

export function renderProgram(program: string, seed: number): Promise<RenderResponse> {
  return post<RenderResponse>("/render", { program, seed });
}

export function sampleProgram(style: "mtp" | "sfp", seed: number): Promise<{ program: string }> {
  return post<{ program: string }>("/sample", { style, seed });
}

export function applyEdit(program: string, edit: string): Promise<{ program: string }> {
  return post<{ program: string }>("/edit", { program, edit });
}

export function quartetPreview(
  progA: string,
  edit: string,
  progB: string,
  seed: number,
): Promise<QuartetPreviewResponse> {
  return post<QuartetPreviewResponse>("/quartet/preview", { progA, edit, progB, seed });
}

export function listMotifs(): Promise<{ motifs: { id: string; source: string }[] }> {
  return fetch(`${BASE}/motifs`).then((r) => r.json());
}
