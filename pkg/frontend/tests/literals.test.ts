import { describe, expect, it } from "vitest";

import { discoverLiterals, formatNumber, spliceLiteral } from "../src/literals";

const MINIMAL = `(pattern (canvas :width 256 :height 256 :background "#FFFFFF") (layer (grid :rows 2 :cols 2) (fill :color (cycle :key id :colors ("#112233" "#445566")))))`;

describe("discoverLiterals", () => {
  it("finds grid rows/cols with server-style node paths", () => {
    const sites = discoverLiterals(MINIMAL);
    const paths = sites.map((s) => s.nodePath);
    expect(paths).toContain("/layer[0]/fragmenter/param[rows]");
    expect(paths).toContain("/layer[0]/fragmenter/param[cols]");
  });

  it("skips numbers inside field expressions", () => {
    const text = `(pattern (canvas) (layer (grid :rows 3 :cols 3) (place-motif :motif circle :scale (alt :axis row :values (0.5 1.5)))))`;
    const sites = discoverLiterals(text);
    expect(sites.map((s) => s.text)).toEqual(["3", "3"]);
  });

  it("indexes slots like the server does", () => {
    const text = `(pattern (canvas) (layer (voronoi :n 9 :relax 1) (inset :d 4) (rotate :angle 15) (fill :color (const :value "#101010")) (outline :color "#000000" :width 2)))`;
    const byPath = Object.fromEntries(
      discoverLiterals(text).map((s) => [s.nodePath, s.text]));
    expect(byPath).toEqual({
      "/layer[0]/fragmenter/param[n]": "9",
      "/layer[0]/fragmenter/param[relax]": "1",
      "/layer[0]/fragmentOps[0]/param[d]": "4",
      "/layer[0]/fragmentOps[1]/param[angle]": "15",
      "/layer[0]/style[1]/param[width]": "2",
    });
  });

  it("counts layers", () => {
    const layer = `(layer (grid :rows 2 :cols 2) (fill :color (const :value "#000000")))`;
    const text = `(pattern (canvas) ${layer} ${layer})`;
    const rows = discoverLiterals(text).filter((s) => s.nodePath.endsWith("param[rows]"));
    expect(rows.map((s) => s.nodePath)).toEqual([
      "/layer[0]/fragmenter/param[rows]",
      "/layer[1]/fragmenter/param[rows]",
    ]);
  });

  it("returns no sites on parse failure", () => {
    expect(discoverLiterals("(pattern (canvas :width")).toEqual([]);
    expect(discoverLiterals("not a program")).toEqual([]);
  });
});

describe("spliceLiteral", () => {
  it("changes exactly one literal", () => {
    const sites = discoverLiterals(MINIMAL);
    const rows = sites.find((s) => s.nodePath === "/layer[0]/fragmenter/param[rows]")!;
    const updated = spliceLiteral(MINIMAL, rows, "3");
    expect(updated).toBe(MINIMAL.replace(":rows 2", ":rows 3"));
    // everything else byte-identical
    expect(updated.slice(0, rows.start)).toBe(MINIMAL.slice(0, rows.start));
    expect(updated.slice(rows.start + 1)).toBe(MINIMAL.slice(rows.end));
  });
});

describe("formatNumber", () => {
  it("matches the canonical printer's style", () => {
    expect(formatNumber(3, true)).toBe("3");
    expect(formatNumber(0.5, false)).toBe("0.5");
    expect(formatNumber(1, false)).toBe("1");
    expect(formatNumber(0.333333333, false)).toBe("0.333333");
  });
});
