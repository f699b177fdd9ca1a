/**
 * BoundTokenizer: grid encode/decode and sequence assembly over a loaded
 * vocabulary, bit-compatible with the core CLI.
 *
 * Encoding replays the merge list in training order; each rule runs one
 * greedy raster-order replacement pass over the region arrays. Decoding
 * places each token's expansion at the first free cell. Grids travel as
 * flat row-major integer buffers.
 */

import {
  ClosedHandleError,
  IndexOutOfRangeError,
  LayoutViolationError,
  MalformedSequenceError,
  ShapeError,
  UnknownTokenError,
} from "./errors.js";
import {
  HORIZONTAL,
  LayoutInfo,
  Vocab,
  extStart,
  isBaseId,
  readVocabFile,
} from "./vocab.js";

interface RegionArrays {
  tok: Int32Array;
  ancR: Int32Array;
  ancC: Int32Array;
  shR: Int32Array;
  shC: Int32Array;
}

function mergePass(
  a: RegionArrays,
  h: number,
  w: number,
  left: number,
  right: number,
  horizontal: boolean,
  newId: number,
): number {
  const { tok, ancR, ancC, shR, shC } = a;
  let replaced = 0;
  for (let i = 0; i < h; i++) {
    for (let j = 0; j < w; j++) {
      const at = i * w + j;
      if (ancR[at] !== i || ancC[at] !== j || tok[at] !== left) continue;
      const r = shR[at];
      const c = shC[at];
      if (horizontal) {
        const j2 = j + c;
        const nb = i * w + j2;
        if (j2 >= w || tok[nb] !== right) continue;
        if (ancR[nb] !== i || ancC[nb] !== j2 || shR[nb] !== r) continue;
        const nc = c + shC[nb];
        for (let ii = i; ii < i + r; ii++) {
          for (let jj = j; jj < j + nc; jj++) {
            const p = ii * w + jj;
            tok[p] = newId;
            ancR[p] = i;
            ancC[p] = j;
            shR[p] = r;
            shC[p] = nc;
          }
        }
        replaced++;
      } else {
        const i2 = i + r;
        const nb = i2 * w + j;
        if (i2 >= h || tok[nb] !== right) continue;
        if (ancR[nb] !== i2 || ancC[nb] !== j || shC[nb] !== c) continue;
        const nr = r + shR[nb];
        for (let ii = i; ii < i + nr; ii++) {
          for (let jj = j; jj < j + c; jj++) {
            const p = ii * w + jj;
            tok[p] = newId;
            ancR[p] = i;
            ancC[p] = j;
            shR[p] = nr;
            shC[p] = c;
          }
        }
        replaced++;
      }
    }
  }
  return replaced;
}

export class BoundTokenizer {
  private vocab: Vocab | null;
  private expansions: Array<number[][] | null>;

  constructor(vocab: Vocab) {
    this.vocab = vocab;
    this.expansions = vocab.merges.map(() => null);
  }

  /** Id-space metadata from the vocabulary file header. */
  layout(): LayoutInfo {
    return { ...this.live().layout };
  }

  mergeCount(): number {
    return this.live().merges.length;
  }

  close(): void {
    this.vocab = null;
  }

  private live(): Vocab {
    if (this.vocab === null) {
      throw new ClosedHandleError("tokenizer handle is closed");
    }
    return this.vocab;
  }

  /** Expansion of an extended id to raw base indices (row-major 2D array). */
  private expansion(tid: number): number[][] {
    const vocab = this.live();
    const { layout } = vocab;
    if (isBaseId(layout, tid)) return [[tid - layout.nText]];
    const start = extStart(layout);
    const idx = tid - start;
    if (idx < 0 || idx >= vocab.merges.length) {
      throw new UnknownTokenError(`id ${tid} is not defined by this vocabulary`);
    }
    // fill in rule order; every rule only references earlier ids
    for (let i = 0; i <= idx; i++) {
      if (this.expansions[i] !== null) continue;
      const rule = vocab.merges[i];
      const lhs = isBaseId(layout, rule.left)
        ? [[rule.left - layout.nText]]
        : this.expansions[rule.left - start]!;
      const rhs = isBaseId(layout, rule.right)
        ? [[rule.right - layout.nText]]
        : this.expansions[rule.right - start]!;
      this.expansions[i] =
        rule.orientation === HORIZONTAL
          ? lhs.map((row, r) => [...row, ...rhs[r]])
          : [...lhs.map((row) => [...row]), ...rhs.map((row) => [...row])];
    }
    return this.expansions[idx]!;
  }

  /**
   * Tokenize a flat row-major grid of base VQ indices. Returns global ids;
   * the result never exceeds h*w entries.
   */
  encodeGrid(h: number, w: number, cells: ArrayLike<number>): number[] {
    const vocab = this.live();
    const { layout } = vocab;
    if (h < 1 || w < 1) throw new ShapeError(`grid shape ${h}x${w} is empty`);
    if (cells.length !== h * w) {
      throw new ShapeError(`buffer has ${cells.length} cells for a ${h}x${w} grid`);
    }
    const tok = new Int32Array(h * w);
    const ancR = new Int32Array(h * w);
    const ancC = new Int32Array(h * w);
    const shR = new Int32Array(h * w).fill(1);
    const shC = new Int32Array(h * w).fill(1);
    const present = new Set<number>();
    for (let i = 0; i < h; i++) {
      for (let j = 0; j < w; j++) {
        const q = Number(cells[i * w + j]);
        if (!Number.isInteger(q) || q < 0 || q >= layout.baseK) {
          throw new IndexOutOfRangeError(`cell value ${q} outside [0, ${layout.baseK})`);
        }
        const at = i * w + j;
        tok[at] = layout.nText + q;
        ancR[at] = i;
        ancC[at] = j;
        present.add(layout.nText + q);
      }
    }
    const arrays: RegionArrays = { tok, ancR, ancC, shR, shC };
    for (const rule of vocab.merges) {
      if (!present.has(rule.left) || !present.has(rule.right)) continue;
      const n = mergePass(
        arrays, h, w, rule.left, rule.right, rule.orientation === HORIZONTAL, rule.newId,
      );
      if (n > 0) present.add(rule.newId);
    }
    const ids: number[] = [];
    for (let i = 0; i < h; i++) {
      for (let j = 0; j < w; j++) {
        const at = i * w + j;
        if (ancR[at] === i && ancC[at] === j) ids.push(tok[at]);
      }
    }
    if (ids.length > h * w) {
      throw new MalformedSequenceError("encoded length exceeds the cell count");
    }
    return ids;
  }

  /** Invert encodeGrid: rebuild the flat row-major base-index buffer. */
  decodeIds(ids: ArrayLike<number>, h: number, w: number): number[] {
    const vocab = this.live();
    const { layout } = vocab;
    const out = new Array<number>(h * w).fill(-1);
    let cursor = 0;
    for (let k = 0; k < ids.length; k++) {
      const tid = Number(ids[k]);
      if (!isBaseId(layout, tid) && !(tid >= extStart(layout) && tid < layout.boi)) {
        throw new MalformedSequenceError(`id ${tid} is not an image token`);
      }
      while (cursor < h * w && out[cursor] !== -1) cursor++;
      if (cursor >= h * w) {
        throw new MalformedSequenceError("sequence has tokens left after the grid is full");
      }
      const i = Math.floor(cursor / w);
      const j = cursor % w;
      const frag = this.expansion(tid);
      const r = frag.length;
      const c = frag[0].length;
      if (i + r > h || j + c > w) {
        throw new MalformedSequenceError(
          `token ${tid} of shape (${r}, ${c}) does not fit at (${i}, ${j})`,
        );
      }
      for (let ii = 0; ii < r; ii++) {
        for (let jj = 0; jj < c; jj++) {
          const p = (i + ii) * w + (j + jj);
          if (out[p] !== -1) {
            throw new MalformedSequenceError(
              `token ${tid} at (${i}, ${j}) overlaps an earlier token`,
            );
          }
          out[p] = frag[ii][jj];
        }
      }
    }
    if (out.includes(-1)) {
      throw new MalformedSequenceError("sequence ends before the grid is covered");
    }
    return out;
  }

  /** text ids ++ BOI ++ image ids ++ EOI, validated against the layout. */
  assemble(textIds: ArrayLike<number>, imageIds: ArrayLike<number>): number[] {
    const vocab = this.live();
    const { layout } = vocab;
    const out: number[] = [];
    for (let i = 0; i < textIds.length; i++) {
      const t = Number(textIds[i]);
      if (!Number.isInteger(t) || t < 0 || t >= layout.nText) {
        throw new LayoutViolationError(`id ${t} is not a text id under this layout`);
      }
      out.push(t);
    }
    out.push(layout.boi);
    for (let i = 0; i < imageIds.length; i++) {
      const t = Number(imageIds[i]);
      if (!isImageRange(layout, t)) {
        throw new LayoutViolationError(`id ${t} is not an image token under this layout`);
      }
      out.push(t);
    }
    out.push(layout.eoi);
    return out;
  }
}

function isImageRange(layout: LayoutInfo, tid: number): boolean {
  return Number.isInteger(tid) && tid >= layout.nText && tid < layout.boi;
}

/** Load a vocabulary file into a ready tokenizer handle. */
export function load(path: string): BoundTokenizer {
  return new BoundTokenizer(readVocabFile(path));
}
