// UI state and the request payloads derived from it.
// Plain data and pure functions; no DOM access, no fetch.

import type { Polarity, SolveRequest, TagSpec } from "./api.js";

export interface TagRow {
  name: string;
  selected: boolean;
  weight: number;
  polarity: Polarity;
}

export const ALGORITHMS = ["ett", "naive", "pa", "hc"] as const;
export type Algorithm = (typeof ALGORITHMS)[number];

export const WEIGHT_MIN = 0.25;
export const WEIGHT_MAX = 4;

export interface Controls {
  algo: Algorithm;
  k: number;
  mprime: number | null; // ett attribute group size, null = solver default
  epsilon: number; // pa quality knob
  restarts: number; // hc
  seed: number; // hc
}

export function defaultControls(): Controls {
  return { algo: "ett", k: 3, mprime: null, epsilon: 0.5, restarts: 16, seed: 0 };
}

export function initTags(names: string[]): TagRow[] {
  return names.map((name) => ({
    name,
    selected: false,
    weight: 1,
    polarity: "desirable",
  }));
}

export function selectedTags(tags: TagRow[]): TagRow[] {
  return tags.filter((t) => t.selected);
}

// Solve stays disabled until at least one tag is picked.
export function canSolve(tags: TagRow[]): boolean {
  return tags.some((t) => t.selected);
}

export function clampWeight(w: number): number {
  if (!Number.isFinite(w)) {
    return 1;
  }
  return Math.min(WEIGHT_MAX, Math.max(WEIGHT_MIN, w));
}

export function tagSpecs(tags: TagRow[]): TagSpec[] {
  return selectedTags(tags).map((t) => ({
    name: t.name,
    weight: t.weight,
    polarity: t.polarity,
  }));
}

// Only the knobs the chosen algorithm reads go on the wire.
export function buildSolveRequest(tags: TagRow[], c: Controls): SolveRequest {
  const req: SolveRequest = { algo: c.algo, tags: tagSpecs(tags), k: c.k };
  if (c.algo === "ett" && c.mprime !== null) {
    req.mprime = c.mprime;
  }
  if (c.algo === "pa") {
    req.epsilon = c.epsilon;
  }
  if (c.algo === "hc") {
    req.restarts = c.restarts;
    req.seed = c.seed;
  }
  return req;
}

export function flipBit(bits: string, index: number): string {
  if (index < 0 || index >= bits.length) {
    throw new RangeError(`bit index ${index} out of range for ${bits.length} bits`);
  }
  const flipped = bits[index] === "1" ? "0" : "1";
  return bits.slice(0, index) + flipped + bits.slice(index + 1);
}
