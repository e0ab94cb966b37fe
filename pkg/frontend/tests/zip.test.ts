import { describe, expect, it } from "vitest";

import { buildZip, crc32, readZip } from "../src/zip";

describe("crc32", () => {
  it("matches the published check value", () => {
    const data = new TextEncoder().encode("123456789");
    expect(crc32(data)).toBe(0xcbf43926);
  });
});

describe("buildZip / readZip", () => {
  it("round-trips entries in order", () => {
    const archive = buildZip([
      { name: "dir/a.txt", data: "hello" },
      { name: "manifest.jsonl", data: '{"id": "x"}\n' },
    ]);
    const entries = readZip(archive);
    expect([...entries.keys()]).toEqual(["dir/a.txt", "manifest.jsonl"]);
    expect(new TextDecoder().decode(entries.get("dir/a.txt")!)).toBe("hello");
    expect(new TextDecoder().decode(entries.get("manifest.jsonl")!)).toBe('{"id": "x"}\n');
  });

  it("is deterministic", () => {
    const entries = [{ name: "a", data: "one" }, { name: "b", data: "two" }];
    expect(buildZip(entries)).toEqual(buildZip(entries));
  });

  it("carries the end-of-central-directory record", () => {
    const archive = buildZip([{ name: "x", data: "y" }]);
    const view = new DataView(archive.buffer);
    // EOCD signature at the tail
    expect(view.getUint32(archive.length - 22, true)).toBe(0x06054b50);
  });
});
