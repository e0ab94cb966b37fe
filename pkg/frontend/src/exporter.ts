/**
 * Quartet export bundle: a zip laid out exactly like one dataset quartet
 * (manifest.jsonl + <style>/<id>/{a,a_prime,b,b_prime}.{svg,sw}), byte-for-
 * byte what `splitweave quartet` writes for the same (A, edit, B, seed).
 *
 * Both the id scheme and the manifest text format replicate the dataset
 * writer's, including the hash-based train/val split.
 */

import type { QuartetPreviewResponse } from "./api";
import { buildZip, ZipEntry } from "./zip";

const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;
const MASK64 = 0xffffffffffffffffn;

export function fnv1a64(text: string): bigint {
  let hash = FNV_OFFSET;
  for (const byte of new TextEncoder().encode(text)) {
    hash = ((hash ^ BigInt(byte)) * FNV_PRIME) & MASK64;
  }
  return hash;
}

export function splitFor(quartetId: string): "train" | "val" {
  return fnv1a64(quartetId) % 100n < 5n ? "val" : "train";
}

export function quartetIdFor(style: string, seed: number): string {
  return `${style}-${BigInt(seed).toString(16).padStart(16, "0")}`;
}

/** Style tag of a canonical program text ('custom' exports as mtp, matching
 * the explicit-quartet CLI path). */
export function styleOf(canonicalProgram: string): string {
  const match = /^\(pattern :style (mtp|sfp|custom)/.exec(canonicalProgram);
  const tag = match ? match[1] : "custom";
  return tag === "custom" ? "mtp" : tag;
}

/** Mirror of the dataset writer's manifest line (fixed key order, Python
 * json.dumps separators: ", " between pairs and ": " after keys). */
export function manifestLine(record: Record<string, string | number>): string {
  const keys = ["id", "seed", "style", "edit", "a", "a_prime", "b", "b_prime", "split"];
  const parts = keys.map((key) => {
    const value = record[key];
    const encoded = typeof value === "number" ? String(value) : JSON.stringify(value);
    return `${JSON.stringify(key)}: ${encoded}`;
  });
  return `{${parts.join(", ")}}`;
}

export interface ExportBundle {
  filename: string;
  bytes: Uint8Array;
  record: Record<string, string | number>;
}

export function buildExportBundle(
  preview: QuartetPreviewResponse,
  seed: number,
): ExportBundle {
  const style = styleOf(preview.programs.a);
  const id = quartetIdFor(style, seed);
  const dir = `${style}/${id}`;
  const record: Record<string, string | number> = {
    id,
    seed,
    style,
    edit: preview.edit,
    a: `${dir}/a.svg`,
    a_prime: `${dir}/a_prime.svg`,
    b: `${dir}/b.svg`,
    b_prime: `${dir}/b_prime.svg`,
    split: splitFor(id),
  };
  const entries: ZipEntry[] = [
    { name: `${dir}/a.svg`, data: preview.a },
    { name: `${dir}/a.sw`, data: preview.programs.a },
    { name: `${dir}/a_prime.svg`, data: preview.aPrime },
    { name: `${dir}/a_prime.sw`, data: preview.programs.aPrime },
    { name: `${dir}/b.svg`, data: preview.b },
    { name: `${dir}/b.sw`, data: preview.programs.b },
    { name: `${dir}/b_prime.svg`, data: preview.bPrime },
    { name: `${dir}/b_prime.sw`, data: preview.programs.bPrime },
    { name: "manifest.jsonl", data: manifestLine(record) + "\n" },
  ];
  return { filename: `${id}.zip`, bytes: buildZip(entries), record };
}
