// Term-level diff between two reward specs, keyed by term id.  Corrections
// usually touch a handful of terms; the diff view shows exactly which.

import type { SpecDoc, TermDoc } from "./types.js";

export interface TermChange {
  before: TermDoc;
  after: TermDoc;
}

export interface SpecDiff {
  added: TermDoc[];
  removed: TermDoc[];
  changed: TermChange[];
  unchanged: TermDoc[];
}

function sameTerm(a: TermDoc, b: TermDoc): boolean {
  return (
    a.residual_fn === b.residual_fn &&
    a.weight === b.weight &&
    JSON.stringify(a.params) === JSON.stringify(b.params) &&
    JSON.stringify(a.norm) === JSON.stringify(b.norm)
  );
}

export function specDiff(before: SpecDoc | null, after: SpecDoc): SpecDiff {
  const prev = new Map((before?.terms ?? []).map((t) => [t.id, t]));
  const diff: SpecDiff = { added: [], removed: [], changed: [], unchanged: [] };
  for (const term of after.terms) {
    const old = prev.get(term.id);
    if (old === undefined) diff.added.push(term);
    else if (sameTerm(old, term)) diff.unchanged.push(term);
    else diff.changed.push({ before: old, after: term });
    prev.delete(term.id);
  }
  diff.removed = [...prev.values()];
  return diff;
}
