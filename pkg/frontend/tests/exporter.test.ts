import { describe, expect, it } from "vitest";

import type { QuartetPreviewResponse } from "../src/api";
import { buildExportBundle, fnv1a64, manifestLine, quartetIdFor, splitFor, styleOf } from "../src/exporter";
import { readZip } from "../src/zip";

describe("fnv1a64 / splitFor", () => {
  it("computes the reference FNV-1a vector", () => {
    // fnv1a64("a") is a published test vector
    expect(fnv1a64("a")).toBe(0xaf63dc4c8601ec8cn);
  });

  it("split is a pure function of the id", () => {
    expect(splitFor("mtp-0000000000000001")).toBe(
      fnv1a64("mtp-0000000000000001") % 100n < 5n ? "val" : "train");
  });
});

describe("ids and styles", () => {
  it("formats the id as style-16hex", () => {
    expect(quartetIdFor("mtp", 9)).toBe("mtp-0000000000000009");
    expect(quartetIdFor("sfp", 0xabcdef)).toBe("sfp-0000000000abcdef");
  });

  it("reads the style tag from canonical text, mapping custom to mtp", () => {
    expect(styleOf("(pattern :style sfp\n  (canvas))")).toBe("sfp");
    expect(styleOf("(pattern :style custom\n  (canvas))")).toBe("mtp");
  });
});

describe("manifestLine", () => {
  it("mirrors the dataset writer's separators and key order", () => {
    const line = manifestLine({
      id: "mtp-0000000000000009",
      seed: 9,
      style: "mtp",
      edit: '(edit :kind remove :target outline :ordinal 0)',
      a: "mtp/mtp-0000000000000009/a.svg",
      a_prime: "mtp/mtp-0000000000000009/a_prime.svg",
      b: "mtp/mtp-0000000000000009/b.svg",
      b_prime: "mtp/mtp-0000000000000009/b_prime.svg",
      split: "train",
    });
    expect(line).toBe(
      '{"id": "mtp-0000000000000009", "seed": 9, "style": "mtp", '
      + '"edit": "(edit :kind remove :target outline :ordinal 0)", '
      + '"a": "mtp/mtp-0000000000000009/a.svg", '
      + '"a_prime": "mtp/mtp-0000000000000009/a_prime.svg", '
      + '"b": "mtp/mtp-0000000000000009/b.svg", '
      + '"b_prime": "mtp/mtp-0000000000000009/b_prime.svg", '
      + '"split": "train"}');
  });
});

describe("buildExportBundle", () => {
  const preview: QuartetPreviewResponse = {
    a: "<svg>a</svg>",
    aPrime: "<svg>a'</svg>",
    b: "<svg>b</svg>",
    bPrime: "<svg>b'</svg>",
    programs: {
      a: "(pattern :style mtp\n  (canvas))\n",
      aPrime: "(pattern :style mtp\n  (canvas wider))\n",
      b: "(pattern :style mtp\n  (canvas b))\n",
      bPrime: "(pattern :style mtp\n  (canvas b wider))\n",
    },
    edit: "(edit :kind replace :target fragmenter :ordinal 0 :payload (grid :rows 3 :cols 3))",
  };

  it("lays files out like a one-quartet dataset", () => {
    const bundle = buildExportBundle(preview, 9);
    const entries = readZip(bundle.bytes);
    const id = "mtp-0000000000000009";
    expect([...entries.keys()]).toEqual([
      `mtp/${id}/a.svg`, `mtp/${id}/a.sw`,
      `mtp/${id}/a_prime.svg`, `mtp/${id}/a_prime.sw`,
      `mtp/${id}/b.svg`, `mtp/${id}/b.sw`,
      `mtp/${id}/b_prime.svg`, `mtp/${id}/b_prime.sw`,
      "manifest.jsonl",
    ]);
    const manifest = new TextDecoder().decode(entries.get("manifest.jsonl")!);
    expect(manifest.endsWith("\n")).toBe(true);
    const record = JSON.parse(manifest);
    expect(record.id).toBe(id);
    expect(record.seed).toBe(9);
    expect(record.split).toBe(splitFor(id));
  });

  it("is deterministic", () => {
    expect(buildExportBundle(preview, 9).bytes).toEqual(buildExportBundle(preview, 9).bytes);
  });
});
