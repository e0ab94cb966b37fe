/**
 * Minimal ZIP writer (STORE only, no compression) for export bundles.
 * Timestamps are pinned to the DOS epoch so the same inputs always produce
 * the same archive bytes.
 */

const DOS_TIME = 0; // 00:00:00
const DOS_DATE = 0x21; // 1980-01-01

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

export function crc32(data: Uint8Array): number {
  let crc = 0xffffffff;
  for (let i = 0; i < data.length; i++) {
    crc = CRC_TABLE[(crc ^ data[i]) & 0xff] ^ (crc >>> 8);
  }
  return (crc ^ 0xffffffff) >>> 0;
}

export interface ZipEntry {
  name: string;
  data: Uint8Array | string;
}

function encode(data: Uint8Array | string): Uint8Array {
  return typeof data === "string" ? new TextEncoder().encode(data) : data;
}

class ByteSink {
  private chunks: Uint8Array[] = [];
  length = 0;

  push(chunk: Uint8Array): void {
    this.chunks.push(chunk);
    this.length += chunk.length;
  }

  u16(value: number): void {
    this.push(new Uint8Array([value & 0xff, (value >>> 8) & 0xff]));
  }

  u32(value: number): void {
    this.push(new Uint8Array([
      value & 0xff, (value >>> 8) & 0xff, (value >>> 16) & 0xff, (value >>> 24) & 0xff,
    ]));
  }

  concat(): Uint8Array {
    const out = new Uint8Array(this.length);
    let offset = 0;
    for (const chunk of this.chunks) {
      out.set(chunk, offset);
      offset += chunk.length;
    }
    return out;
  }
}

/** Build a deterministic STORE-only zip from the given entries (in order). */
export function buildZip(entries: ZipEntry[]): Uint8Array {
  const sink = new ByteSink();
  const central: { name: Uint8Array; crc: number; size: number; offset: number }[] = [];

  for (const entry of entries) {
    const name = new TextEncoder().encode(entry.name);
    const data = encode(entry.data);
    const crc = crc32(data);
    central.push({ name, crc, size: data.length, offset: sink.length });
    sink.u32(0x04034b50); // local file header
    sink.u16(20); // version needed
    sink.u16(0x0800); // UTF-8 names
    sink.u16(0); // method: store
    sink.u16(DOS_TIME);
    sink.u16(DOS_DATE);
    sink.u32(crc);
    sink.u32(data.length);
    sink.u32(data.length);
    sink.u16(name.length);
    sink.u16(0); // extra length
    sink.push(name);
    sink.push(data);
  }

  const centralStart = sink.length;
  for (const record of central) {
    sink.u32(0x02014b50); // central directory header
    sink.u16(20);
    sink.u16(20);
    sink.u16(0x0800);
    sink.u16(0);
    sink.u16(DOS_TIME);
    sink.u16(DOS_DATE);
    sink.u32(record.crc);
    sink.u32(record.size);
    sink.u32(record.size);
    sink.u16(record.name.length);
    sink.u16(0);
    sink.u16(0);
    sink.u16(0);
    sink.u16(0);
    sink.u32(0);
    sink.u32(record.offset);
    sink.push(record.name);
  }
  const centralSize = sink.length - centralStart;

  sink.u32(0x06054b50); // end of central directory
  sink.u16(0);
  sink.u16(0);
  sink.u16(central.length);
  sink.u16(central.length);
  sink.u32(centralSize);
  sink.u32(centralStart);
  sink.u16(0);
  return sink.concat();
}

/** Read back a STORE-only zip (enough for tests and round-trips). */
export function readZip(archive: Uint8Array): Map<string, Uint8Array> {
  const view = new DataView(archive.buffer, archive.byteOffset, archive.byteLength);
  const out = new Map<string, Uint8Array>();
  let offset = 0;
  while (offset + 4 <= archive.length && view.getUint32(offset, true) === 0x04034b50) {
    const size = view.getUint32(offset + 18, true);
    const nameLength = view.getUint16(offset + 26, true);
    const extraLength = view.getUint16(offset + 28, true);
    const nameStart = offset + 30;
    const name = new TextDecoder().decode(archive.slice(nameStart, nameStart + nameLength));
    const dataStart = nameStart + nameLength + extraLength;
    out.set(name, archive.slice(dataStart, dataStart + size));
    offset = dataStart + size;
  }
  return out;
}
