import { writeFileSync } from "node:fs";
import { join } from "node:path";
import { beforeAll, describe, expect, it } from "vitest";

import {
  ClosedHandleError,
  FileFormatError,
  IndexOutOfRangeError,
  LayoutViolationError,
  MalformedSequenceError,
  ShapeError,
  UnknownTokenError,
  load,
} from "../src/index.js";
import { makeTmpDir } from "./helpers.js";

// layout: n_text=10, base_k=4, ext=2; c1 = (10,11) horizontal, c2 = (c1,c1) vertical
const VOCAB_DOC = {
  format: "vbpe-vocab",
  version: 1,
  base_size: 4,
  offsets: { n_text: 10, base_k: 4, ext_size: 2, boi: 16, eoi: 17 },
  merges: [
    { id: 14, left: 10, right: 11, orientation: "horizontal", priority: 0.8, frequency: 0.5, spatial: 1.0 },
    { id: 15, left: 14, right: 14, orientation: "vertical", priority: 1.3, frequency: 1.0, spatial: 1.0 },
  ],
};

let dir: string;
let vocabPath: string;

beforeAll(() => {
  dir = makeTmpDir("vbpe-tok-");
  vocabPath = join(dir, "vocab.json");
  writeFileSync(vocabPath, JSON.stringify(VOCAB_DOC));
});

describe("load", () => {
  it("reads layout metadata from the file header", () => {
    const tok = load(vocabPath);
    expect(tok.layout()).toEqual({ nText: 10, baseK: 4, extSize: 2, boi: 16, eoi: 17 });
    expect(tok.mergeCount()).toBe(2);
  });

  it("reports the byte offset for a truncated file", () => {
    const path = join(dir, "trunc.json");
    writeFileSync(path, JSON.stringify(VOCAB_DOC).slice(0, 60));
    let caught: unknown;
    try {
      load(path);
    } catch (err) {
      caught = err;
    }
    expect(caught).toBeInstanceOf(FileFormatError);
    expect((caught as FileFormatError).offset).toBeTypeOf("number");
    expect((caught as FileFormatError).message).toMatch(/offset/);
  });

  it("rejects wrong format markers", () => {
    const path = join(dir, "wrong.json");
    writeFileSync(path, JSON.stringify({ ...VOCAB_DOC, format: "other" }));
    expect(() => load(path)).toThrow(FileFormatError);
  });

  it("rejects out-of-order merge ids", () => {
    const path = join(dir, "order.json");
    const doc = structuredClone(VOCAB_DOC);
    doc.merges[0].id = 15;
    writeFileSync(path, JSON.stringify(doc));
    expect(() => load(path)).toThrow(FileFormatError);
  });

  it("rejects forward references", () => {
    const path = join(dir, "fwd.json");
    const doc = structuredClone(VOCAB_DOC);
    doc.merges[0].left = 15;
    writeFileSync(path, JSON.stringify(doc));
    expect(() => load(path)).toThrow(UnknownTokenError);
  });
});

describe("encodeGrid", () => {
  it("replays merges to a single token", () => {
    const tok = load(vocabPath);
    expect(tok.encodeGrid(2, 2, [0, 1, 0, 1])).toEqual([15]);
  });

  it("leaves untrained patterns at cell count", () => {
    const tok = load(vocabPath);
    expect(tok.encodeGrid(2, 2, [3, 2, 2, 3])).toEqual([13, 12, 12, 13]);
  });

  it("rejects buffer length mismatches", () => {
    const tok = load(vocabPath);
    expect(() => tok.encodeGrid(2, 2, [0, 1, 0])).toThrow(ShapeError);
  });

  it("rejects out-of-range cell values", () => {
    const tok = load(vocabPath);
    expect(() => tok.encodeGrid(1, 2, [0, 4])).toThrow(IndexOutOfRangeError);
  });
});

describe("decodeIds", () => {
  it("expands a composite token", () => {
    const tok = load(vocabPath);
    expect(tok.decodeIds([15], 2, 2)).toEqual([0, 1, 0, 1]);
  });

  it("reshapes base ids row-major", () => {
    const tok = load(vocabPath);
    expect(tok.decodeIds([13, 12, 11, 10], 2, 2)).toEqual([3, 2, 1, 0]);
  });

  it("raises UnknownToken for undefined extension ids", () => {
    const tok = load(vocabPath);
    // 16 is BOI here, outside the image range entirely
    expect(() => tok.decodeIds([16], 1, 1)).toThrow(MalformedSequenceError);
    const path = join(dir, "short.json");
    const doc = structuredClone(VOCAB_DOC);
    doc.offsets.ext_size = 4;
    doc.offsets.boi = 18;
    doc.offsets.eoi = 19;
    writeFileSync(path, JSON.stringify(doc));
    const tok2 = load(path);
    expect(() => tok2.decodeIds([16], 1, 2)).toThrow(UnknownTokenError);
  });

  it("raises MalformedSequence when tokens do not tile", () => {
    const tok = load(vocabPath);
    expect(() => tok.decodeIds([10, 11, 12], 2, 2)).toThrow(MalformedSequenceError);
    expect(() => tok.decodeIds([10, 11, 12, 13, 10], 2, 2)).toThrow(MalformedSequenceError);
    expect(() => tok.decodeIds([15], 1, 4)).toThrow(MalformedSequenceError);
    expect(() => tok.decodeIds([3], 1, 1)).toThrow(MalformedSequenceError); // text id
  });
});

describe("assemble", () => {
  it("wraps the image span in boundary markers", () => {
    const tok = load(vocabPath);
    expect(tok.assemble([5, 9], [14, 10])).toEqual([5, 9, 16, 14, 10, 17]);
    expect(tok.assemble([], [])).toEqual([16, 17]);
  });

  it("rejects misplaced ids", () => {
    const tok = load(vocabPath);
    expect(() => tok.assemble([12], [10])).toThrow(LayoutViolationError);
    expect(() => tok.assemble([1], [3])).toThrow(LayoutViolationError);
    expect(() => tok.assemble([1], [17])).toThrow(LayoutViolationError);
  });
});

describe("close", () => {
  it("fails cleanly after close", () => {
    const tok = load(vocabPath);
    tok.close();
    expect(() => tok.layout()).toThrow(ClosedHandleError);
    expect(() => tok.encodeGrid(1, 1, [0])).toThrow(ClosedHandleError);
    expect(() => tok.decodeIds([10], 1, 1)).toThrow(ClosedHandleError);
    expect(() => tok.assemble([], [])).toThrow(ClosedHandleError);
  });
});
