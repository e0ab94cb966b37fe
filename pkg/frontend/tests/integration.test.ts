// @vitest-environment node
/**
 * End-to-end checks against the real local service:
 *  - slider-edit -> re-render round trip stays under 200 ms,
 *  - an exported quartet bundle is byte-identical to the CLI pipeline on
 *    the same (A, edit, B, seed) and passes the dataset audit.
 *
 * Requires python3 with the splitweave package installed (the repo root's
 * `pip install -e .`).
 */

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync, mkdirSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, dirname } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import type { QuartetPreviewResponse, RenderResponse } from "../src/api";
import { buildExportBundle } from "../src/exporter";
import { discoverLiterals, spliceLiteral } from "../src/literals";
import { readZip } from "../src/zip";

const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}/api/v1`;
const MINIMAL = `(pattern (canvas :width 256 :height 256 :background "#FFFFFF") (layer (grid :rows 2 :cols 2) (fill :color (cycle :key id :colors ("#112233" "#445566")))))`;

let server: ChildProcess;
let workdir: string;

async function post<T>(path: string, body: unknown): Promise<T> {
  const response = await fetch(`${BASE}${path}`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!response.ok) {
    throw new Error(`${path} -> ${response.status}: ${await response.text()}`);
  }
  return (await response.json()) as T;
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "playground-e2e-"));
  server = spawn("python3", ["-m", "splitweave.cli", "serve", "--port", String(PORT)], {
    stdio: ["ignore", "ignore", "pipe"],
  });
  // poll until the service answers
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const r = await fetch(`${BASE}/motifs`);
      if (r.ok) break;
    } catch {
      /* not up yet */
    }
    if (Date.now() > deadline) throw new Error("service did not come up");
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
}, 40_000);

afterAll(() => {
  server?.kill();
  rmSync(workdir, { recursive: true, force: true });
});

describe("playground loop", () => {
  it("slider edit -> re-render round trip stays under 200 ms", async () => {
    // warm up once (first request pays interpreter import costs)
    await post<RenderResponse>("/render", { program: MINIMAL, seed: 0 });

    const sites = discoverLiterals(MINIMAL);
    const rows = sites.find((s) => s.nodePath === "/layer[0]/fragmenter/param[rows]")!;
    const edited = spliceLiteral(MINIMAL, rows, "3");

    const started = performance.now();
    const body = await post<RenderResponse>("/render", { program: edited, seed: 0 });
    const elapsed = performance.now() - started;

    expect(body.svg).toContain("<svg");
    expect(body.svg).not.toBe(
      (await post<RenderResponse>("/render", { program: MINIMAL, seed: 0 })).svg);
    expect(elapsed).toBeLessThan(200);
  });

  it("slider metadata lines up with discovered literals", async () => {
    const body = await post<RenderResponse>("/render", { program: MINIMAL, seed: 0 });
    const sites = discoverLiterals(MINIMAL);
    const serverPaths = new Set(body.literals.map((l) => l.nodePath));
    for (const site of sites) {
      expect(serverPaths.has(site.nodePath)).toBe(true);
    }
  });

  it("exported bundle is byte-identical to the CLI pipeline and audits clean", async () => {
    const seed = 11;
    const editText =
      '(edit :kind insert :target outline :ordinal 0 :payload (outline :color "#203040" :width 2))';
    const progB = (await post<{ program: string }>("/sample", { style: "mtp", seed: 3 })).program;

    const preview = await post<QuartetPreviewResponse>("/quartet/preview", {
      progA: MINIMAL, edit: editText, progB, seed,
    });
    const bundle = buildExportBundle(preview, seed);

    // CLI pipeline on the same inputs
    const aPath = join(workdir, "a.sw");
    const bPath = join(workdir, "b.sw");
    const editPath = join(workdir, "edit.sw");
    writeFileSync(aPath, MINIMAL);
    writeFileSync(bPath, progB);
    writeFileSync(editPath, editText + "\n");
    const cliDir = join(workdir, "cli-quartet");
    execFileSync("python3", ["-m", "splitweave.cli", "quartet", aPath, bPath,
      "--edit", editPath, "--seed", String(seed), "--out", cliDir]);

    const entries = readZip(bundle.bytes);
    const decoder = new TextDecoder();
    for (const [name, data] of entries) {
      const cliText = readFileSync(join(cliDir, name), "utf-8");
      expect(decoder.decode(data), name).toBe(cliText);
    }
    // and nothing extra on the CLI side that the bundle misses
    const record = JSON.parse(readFileSync(join(cliDir, "manifest.jsonl"), "utf-8"));
    expect(bundle.record.id).toBe(record.id);

    // extract the bundle and run the dataset audit on it
    const extracted = join(workdir, "extracted");
    for (const [name, data] of entries) {
      const target = join(extracted, name);
      mkdirSync(dirname(target), { recursive: true });
      writeFileSync(target, data);
    }
    const audit = execFileSync("python3",
      ["-m", "splitweave.cli", "audit", extracted, "--deep"]).toString();
    expect(audit).toContain("0 problems");
  }, 60_000);
});
