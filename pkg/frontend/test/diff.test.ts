// Spec diffing between turns: corrections must show exactly what changed.

import { describe, expect, it } from "vitest";

import { specDiff } from "../src/diff.js";
import type { SessionDetail, SpecDoc } from "../src/types.js";
import { exchangesFor, RECORDING } from "./fakes.js";

function turnSpecs(): SpecDoc[] {
  const [detail] = exchangesFor("GET", `/sessions/${RECORDING.session_id}`);
  const parsed = JSON.parse(detail.body) as SessionDetail;
  return parsed.turn_history.map((t) => t.spec);
}

describe("specDiff", () => {
  it("treats the first turn as all-added", () => {
    const [first] = turnSpecs();
    const diff = specDiff(null, first);
    expect(diff.added).toHaveLength(first.terms.length);
    expect(diff.removed).toHaveLength(0);
    expect(diff.changed).toHaveLength(0);
  });

  it("partitions a correction into added/changed/unchanged, losing nothing", () => {
    const [first, second] = turnSpecs();
    const diff = specDiff(first, second);
    expect(
      diff.added.length + diff.changed.length + diff.unchanged.length,
    ).toBe(second.terms.length);
    // the apple-to-drawer turn builds on the drawer turn: something is new
    expect(diff.added.length).toBeGreaterThan(0);
    // carryover keeps the drawer-related terms alive
    expect(diff.removed).toHaveLength(0);
    expect(diff.unchanged.length + diff.changed.length).toBeGreaterThan(0);
    for (const t of diff.added) {
      expect(first.terms.find((p) => p.id === t.id)).toBeUndefined();
    }
  });

  it("detects weight changes as modifications, not add/remove pairs", () => {
    const [first] = turnSpecs();
    const tweaked: SpecDoc = JSON.parse(JSON.stringify(first)) as SpecDoc;
    tweaked.terms[0] = { ...tweaked.terms[0], weight: tweaked.terms[0].weight + 1 };
    const diff = specDiff(first, tweaked);
    expect(diff.changed).toHaveLength(1);
    expect(diff.changed[0].before.weight).toBe(first.terms[0].weight);
    expect(diff.changed[0].after.weight).toBe(first.terms[0].weight + 1);
    expect(diff.added).toHaveLength(0);
    expect(diff.removed).toHaveLength(0);
  });

  it("reports dropped terms as removed", () => {
    const [first] = turnSpecs();
    const pruned: SpecDoc = { ...first, terms: first.terms.slice(1) };
    const diff = specDiff(first, pruned);
    expect(diff.removed).toHaveLength(1);
    expect(diff.removed[0].id).toBe(first.terms[0].id);
  });
});
