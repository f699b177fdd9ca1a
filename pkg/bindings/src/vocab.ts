/**
 * Vocabulary JSON loading and validation.
 *
 * The file schema matches the core CLI's `train-vocab` output: a versioned
 * document with the id-space offsets and an ordered merge list. Validation
 * re-checks the structural invariants (consecutive new ids, topological
 * references, shape-compatible orientations) so a corrupt file fails here
 * rather than during encode/decode.
 */

import { readFileSync } from "node:fs";

import { FileFormatError, UnknownTokenError } from "./errors.js";

export const HORIZONTAL = "horizontal";
export const VERTICAL = "vertical";
export type Orientation = typeof HORIZONTAL | typeof VERTICAL;

export interface LayoutInfo {
  nText: number;
  baseK: number;
  extSize: number;
  boi: number;
  eoi: number;
}

export interface MergeRule {
  newId: number;
  left: number;
  right: number;
  orientation: Orientation;
  priority: number;
  frequency: number;
  spatial: number;
}

export interface Vocab {
  layout: LayoutInfo;
  merges: MergeRule[];
  /** region extents per extended token, indexed by newId - extStart */
  shapes: Array<[number, number]>;
}

export function extStart(layout: LayoutInfo): number {
  return layout.nText + layout.baseK;
}

export function isBaseId(layout: LayoutInfo, tid: number): boolean {
  return tid >= layout.nText && tid < extStart(layout);
}

export function isImageId(layout: LayoutInfo, tid: number, nMerges: number): boolean {
  return tid >= layout.nText && tid < extStart(layout) + nMerges;
}

function jsonErrorOffset(err: unknown): number | undefined {
  // node's JSON.parse errors carry "... at position 123" in the message
  if (err instanceof SyntaxError) {
    const match = /position (\d+)/.exec(err.message);
    if (match) return Number(match[1]);
  }
  return undefined;
}

function asInt(value: unknown, what: string): number {
  if (typeof value !== "number" || !Number.isInteger(value)) {
    throw new FileFormatError(`${what} must be an integer, got ${JSON.stringify(value)}`);
  }
  return value;
}

function asFloat(value: unknown, what: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new FileFormatError(`${what} must be a finite number`);
  }
  return value;
}

export function parseVocabJson(text: string): Vocab {
  let doc: any;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    const offset = jsonErrorOffset(err);
    throw new FileFormatError(`invalid JSON: ${(err as Error).message}`, offset);
  }
  for (const key of ["format", "version", "base_size", "offsets", "merges"]) {
    if (!(key in doc)) throw new FileFormatError(`vocabulary file missing key "${key}"`);
  }
  if (doc.format !== "vbpe-vocab") {
    throw new FileFormatError(`not a vocabulary file: format=${JSON.stringify(doc.format)}`);
  }
  if (doc.version !== 1) {
    throw new FileFormatError(`unsupported vocabulary version ${doc.version}`);
  }
  const layout: LayoutInfo = {
    nText: asInt(doc.offsets.n_text, "offsets.n_text"),
    baseK: asInt(doc.offsets.base_k, "offsets.base_k"),
    extSize: asInt(doc.offsets.ext_size, "offsets.ext_size"),
    boi: asInt(doc.offsets.boi, "offsets.boi"),
    eoi: asInt(doc.offsets.eoi, "offsets.eoi"),
  };
  if (layout.baseK !== asInt(doc.base_size, "base_size")) {
    throw new FileFormatError("base_size disagrees with offsets.base_k");
  }
  if (!Array.isArray(doc.merges)) throw new FileFormatError("merges must be an array");

  const start = extStart(layout);
  const merges: MergeRule[] = [];
  const shapes: Array<[number, number]> = [];
  const shapeOf = (tid: number): [number, number] => {
    if (isBaseId(layout, tid)) return [1, 1];
    const idx = tid - start;
    if (idx < 0 || idx >= shapes.length) {
      throw new UnknownTokenError(`merge references id ${tid} which is not yet defined`);
    }
    return shapes[idx];
  };

  doc.merges.forEach((m: any, i: number) => {
    const rule: MergeRule = {
      newId: asInt(m.id, `merges[${i}].id`),
      left: asInt(m.left, `merges[${i}].left`),
      right: asInt(m.right, `merges[${i}].right`),
      orientation: m.orientation,
      priority: asFloat(m.priority, `merges[${i}].priority`),
      frequency: asFloat(m.frequency, `merges[${i}].frequency`),
      spatial: asFloat(m.spatial, `merges[${i}].spatial`),
    };
    if (rule.orientation !== HORIZONTAL && rule.orientation !== VERTICAL) {
      throw new FileFormatError(`merges[${i}] has orientation ${JSON.stringify(m.orientation)}`);
    }
    if (rule.newId !== start + i) {
      throw new FileFormatError(`merges[${i}] has id ${rule.newId}, expected ${start + i}`);
    }
    const [lr, lc] = shapeOf(rule.left);
    const [rr, rc] = shapeOf(rule.right);
    if (rule.orientation === HORIZONTAL && lr !== rr) {
      throw new FileFormatError(`merges[${i}]: horizontal parts have row extents ${lr} != ${rr}`);
    }
    if (rule.orientation === VERTICAL && lc !== rc) {
      throw new FileFormatError(`merges[${i}]: vertical parts have col extents ${lc} != ${rc}`);
    }
    shapes.push(rule.orientation === HORIZONTAL ? [lr, lc + rc] : [lr + rr, lc]);
    merges.push(rule);
  });

  return { layout, merges, shapes };
}

export function readVocabFile(path: string): Vocab {
  return parseVocabJson(readFileSync(path, "utf-8"));
}
