// The checksum path is the load-bearing invariant of the UI: the term table
// it renders must provably be the spec the server is using.  These tests run
// the client-side canonicalizer against raw bytes recorded from the real
// service and require exact agreement with the server's checksums.

import { describe, expect, it } from "vitest";

import {
  canonicalSpec,
  emit,
  escapeString,
  getPath,
  parseJsonPreserving,
  plainValue,
  sha256Hex,
  specChecksumFromBody,
} from "../src/canonical.js";
import { exchangesFor, RECORDING } from "./fakes.js";

const sid = RECORDING.session_id;

describe("lexeme-preserving parser", () => {
  it("round-trips every recorded body byte-for-byte", () => {
    for (const exchange of RECORDING.exchanges) {
      expect(emit(parseJsonPreserving(exchange.body))).toBe(exchange.body);
    }
  });

  it("distinguishes 2.0 from 2, which JSON.parse cannot", () => {
    const node = parseJsonPreserving('{"a":2.0,"b":2}');
    expect(emit(node)).toBe('{"a":2.0,"b":2}');
    expect(JSON.stringify(JSON.parse('{"a":2.0,"b":2}'))).toBe('{"a":2,"b":2}');
  });

  it("keeps exponent and negative-zero lexemes", () => {
    for (const raw of ["1e-05", "-0.0", "2.5e+10", "-3"]) {
      const node = parseJsonPreserving(`[${raw}]`);
      expect(emit(node)).toBe(`[${raw}]`);
    }
  });

  it("navigates paths and converts to plain values", () => {
    const node = parseJsonPreserving('{"spec":{"terms":[{"weight":1.5}]}}');
    const weight = getPath(node, "spec", "terms", 0, "weight");
    expect(weight).toEqual({ kind: "num", raw: "1.5" });
    expect(plainValue(node)).toEqual({ spec: { terms: [{ weight: 1.5 }] } });
  });

  it("rejects malformed documents", () => {
    expect(() => parseJsonPreserving('{"a":}')).toThrow();
    expect(() => parseJsonPreserving('{"a":1} extra')).toThrow();
    expect(() => parseJsonPreserving("[1,]")).toThrow();
  });
});

describe("ascii string escaping", () => {
  it("matches the server's escape style", () => {
    expect(escapeString('say "hi"\n')).toBe('"say \\"hi\\"\\n"');
    expect(escapeString("café")).toBe('"caf\\u00e9"');
    expect(escapeString("")).toBe('"\\u0001"');
    expect(escapeString("")).toBe('"\\u007f"');
    // astral characters escape as their surrogate pair
    expect(escapeString("\u{1f600}")).toBe('"\\ud83d\\ude00"');
  });
});

describe("canonical spec checksums against the live recording", () => {
  it("verifies the spec endpoint for every stage of the session", async () => {
    const specReads = exchangesFor("GET", `/sessions/${sid}/spec`);
    expect(specReads.length).toBe(3); // empty, after turn 0, after turn 1
    for (const exchange of specReads) {
      const node = parseJsonPreserving(exchange.body);
      const served = getPath(node, "checksum");
      if (served.kind !== "str") throw new Error("checksum is not a string");
      const computed = await sha256Hex(canonicalSpec(getPath(node, "spec")));
      expect(computed).toBe(served.value);
    }
  });

  it("verifies every turn payload the server produced", async () => {
    const turnBodies = [
      ...exchangesFor("POST", `/sessions/${sid}/instructions`),
      ...exchangesFor("POST", `/sessions/${sid}/translations`),
      ...exchangesFor("POST", `/sessions/${sid}/executions`),
    ];
    expect(turnBodies.length).toBe(3);
    for (const exchange of turnBodies) {
      const node = parseJsonPreserving(exchange.body);
      const served = getPath(node, "checksum");
      if (served.kind !== "str") throw new Error("checksum is not a string");
      const computed = await specChecksumFromBody(exchange.body, "spec");
      expect(computed).toBe(served.value);
    }
  });

  it("verifies every entry of the persisted turn history", async () => {
    const [detail] = exchangesFor("GET", `/sessions/${sid}`);
    const node = parseJsonPreserving(detail.body);
    const history = getPath(node, "turn_history");
    if (history.kind !== "arr") throw new Error("turn_history is not an array");
    expect(history.items.length).toBe(2);
    for (let i = 0; i < history.items.length; i++) {
      const served = getPath(history.items[i], "checksum");
      if (served.kind !== "str") throw new Error("checksum is not a string");
      const computed = await specChecksumFromBody(detail.body, "turn_history", i, "spec");
      expect(computed).toBe(served.value);
    }
  });

  it("verifies replay documents: each spec hashes to its own key", async () => {
    for (const turn of [0, 1]) {
      const [replay] = exchangesFor("GET", `/sessions/${sid}/replay/${turn}`);
      const specs = getPath(parseJsonPreserving(replay.body), "specs");
      if (specs.kind !== "obj") throw new Error("specs is not an object");
      expect(specs.entries.length).toBeGreaterThan(0);
      for (const [checksum] of specs.entries) {
        const computed = await specChecksumFromBody(replay.body, "specs", checksum);
        expect(computed).toBe(checksum);
      }
    }
  });

  it("would fail with a naive JSON.parse round-trip (lexemes matter)", async () => {
    const [specRead] = exchangesFor("GET", `/sessions/${sid}/spec`).slice(1);
    const naive = JSON.stringify(JSON.parse(specRead.body).spec);
    const canonical = canonicalSpec(getPath(parseJsonPreserving(specRead.body), "spec"));
    expect(naive).not.toBe(canonical);
    const served = (JSON.parse(specRead.body) as { checksum: string }).checksum;
    expect(await sha256Hex(naive)).not.toBe(served);
    expect(await sha256Hex(canonical)).toBe(served);
  });

  it("flags a tampered weight as a mismatch", async () => {
    const [specRead] = exchangesFor("GET", `/sessions/${sid}/spec`).slice(1);
    const tampered = specRead.body.replace(/"weight":[0-9.eE+-]+/, '"weight":99.0');
    expect(tampered).not.toBe(specRead.body);
    const served = (JSON.parse(specRead.body) as { checksum: string }).checksum;
    expect(await specChecksumFromBody(tampered, "spec")).not.toBe(served);
  });
});
