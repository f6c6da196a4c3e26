// Client-side reproduction of the server's canonical reward-spec
// serialization, used to verify spec checksums without trusting any
// re-serialization of our own.
//
// The server emits JSON whose number lexemes distinguish `2` from `2.0`.
// JSON.parse would collapse that distinction, so checksum verification
// parses the raw response text with a small lexeme-preserving parser and
// re-emits the spec subtree in canonical form: fixed key order, params
// sorted, numbers copied verbatim from the wire, strings escaped to ASCII.

export type JsonNode =
  | { kind: "obj"; entries: [string, JsonNode][] }
  | { kind: "arr"; items: JsonNode[] }
  | { kind: "num"; raw: string }
  | { kind: "str"; value: string }
  | { kind: "bool"; value: boolean }
  | { kind: "null" };

export class CanonicalError extends Error {}

// ------------------------------------------------------------- parsing

class Parser {
  private i = 0;

  constructor(private readonly text: string) {}

  parse(): JsonNode {
    this.ws();
    const node = this.value();
    this.ws();
    if (this.i !== this.text.length) {
      throw new CanonicalError(`trailing characters at offset ${this.i}`);
    }
    return node;
  }

  private ws() {
    while (this.i < this.text.length && " \t\n\r".includes(this.text[this.i])) {
      this.i++;
    }
  }

  private fail(what: string): never {
    throw new CanonicalError(`expected ${what} at offset ${this.i}`);
  }

  private value(): JsonNode {
    const c = this.text[this.i];
    if (c === "{") return this.object();
    if (c === "[") return this.array();
    if (c === '"') return { kind: "str", value: this.string() };
    if (this.text.startsWith("true", this.i)) {
      this.i += 4;
      return { kind: "bool", value: true };
    }
    if (this.text.startsWith("false", this.i)) {
      this.i += 5;
      return { kind: "bool", value: false };
    }
    if (this.text.startsWith("null", this.i)) {
      this.i += 4;
      return { kind: "null" };
    }
    return this.number();
  }

  private object(): JsonNode {
    this.i++; // {
    const entries: [string, JsonNode][] = [];
    this.ws();
    if (this.text[this.i] === "}") {
      this.i++;
      return { kind: "obj", entries };
    }
    for (;;) {
      this.ws();
      if (this.text[this.i] !== '"') this.fail("object key");
      const key = this.string();
      this.ws();
      if (this.text[this.i] !== ":") this.fail("':'");
      this.i++;
      this.ws();
      entries.push([key, this.value()]);
      this.ws();
      if (this.text[this.i] === ",") {
        this.i++;
        continue;
      }
      if (this.text[this.i] === "}") {
        this.i++;
        return { kind: "obj", entries };
      }
      this.fail("',' or '}'");
    }
  }

  private array(): JsonNode {
    this.i++; // [
    const items: JsonNode[] = [];
    this.ws();
    if (this.text[this.i] === "]") {
      this.i++;
      return { kind: "arr", items };
    }
    for (;;) {
      this.ws();
      items.push(this.value());
      this.ws();
      if (this.text[this.i] === ",") {
        this.i++;
        continue;
      }
      if (this.text[this.i] === "]") {
        this.i++;
        return { kind: "arr", items };
      }
      this.fail("',' or ']'");
    }
  }

  private string(): string {
    this.i++; // opening quote
    let out = "";
    for (;;) {
      if (this.i >= this.text.length) this.fail("closing quote");
      const c = this.text[this.i];
      if (c === '"') {
        this.i++;
        return out;
      }
      if (c === "\\") {
        const e = this.text[this.i + 1];
        this.i += 2;
        switch (e) {
          case '"': out += '"'; break;
          case "\\": out += "\\"; break;
          case "/": out += "/"; break;
          case "b": out += "\b"; break;
          case "f": out += "\f"; break;
          case "n": out += "\n"; break;
          case "r": out += "\r"; break;
          case "t": out += "\t"; break;
          case "u": {
            const hex = this.text.slice(this.i, this.i + 4);
            if (!/^[0-9a-fA-F]{4}$/.test(hex)) this.fail("4 hex digits");
            out += String.fromCharCode(parseInt(hex, 16));
            this.i += 4;
            break;
          }
          default:
            this.fail("escape character");
        }
        continue;
      }
      out += c;
      this.i++;
    }
  }

  private number(): JsonNode {
    const m = /^-?(?:0|[1-9]\d*)(?:\.\d+)?(?:[eE][+-]?\d+)?/.exec(
      this.text.slice(this.i),
    );
    if (!m) this.fail("a JSON value");
    this.i += m[0].length;
    return { kind: "num", raw: m[0] };
  }
}

/** Parse JSON text keeping number lexemes and object key order intact. */
export function parseJsonPreserving(text: string): JsonNode {
  return new Parser(text).parse();
}

/** Follow object keys / array indices down the tree. */
export function getPath(node: JsonNode, ...path: (string | number)[]): JsonNode {
  let cur = node;
  for (const step of path) {
    if (typeof step === "number") {
      if (cur.kind !== "arr" || step >= cur.items.length) {
        throw new CanonicalError(`no index ${step} in ${cur.kind}`);
      }
      cur = cur.items[step];
    } else {
      if (cur.kind !== "obj") throw new CanonicalError(`no key '${step}' in ${cur.kind}`);
      const hit = cur.entries.find(([k]) => k === step);
      if (!hit) throw new CanonicalError(`no key '${step}'`);
      cur = hit[1];
    }
  }
  return cur;
}

/** Convert a node back to a plain JS value (numbers via Number()). */
export function plainValue(node: JsonNode): unknown {
  switch (node.kind) {
    case "obj":
      return Object.fromEntries(node.entries.map(([k, v]) => [k, plainValue(v)]));
    case "arr":
      return node.items.map(plainValue);
    case "num":
      return Number(node.raw);
    case "str":
      return node.value;
    case "bool":
      return node.value;
    case "null":
      return null;
  }
}

// ------------------------------------------------------------- emission

/** ASCII-only string escaping: ", \, control chars named or \u00xx, and
 * every character above 0x7e as a lowercase \uxxxx code unit. */
export function escapeString(s: string): string {
  let out = '"';
  for (let i = 0; i < s.length; i++) {
    const c = s.charCodeAt(i);
    const ch = s[i];
    if (ch === '"') out += '\\"';
    else if (ch === "\\") out += "\\\\";
    else if (ch === "\b") out += "\\b";
    else if (ch === "\f") out += "\\f";
    else if (ch === "\n") out += "\\n";
    else if (ch === "\r") out += "\\r";
    else if (ch === "\t") out += "\\t";
    else if (c < 0x20 || c > 0x7e) out += "\\u" + c.toString(16).padStart(4, "0");
    else out += ch;
  }
  return out + '"';
}

/** Compact re-emission of a node exactly as parsed (order preserved). */
export function emit(node: JsonNode): string {
  switch (node.kind) {
    case "obj":
      return "{" + node.entries.map(([k, v]) => escapeString(k) + ":" + emit(v)).join(",") + "}";
    case "arr":
      return "[" + node.items.map(emit).join(",") + "]";
    case "num":
      return node.raw;
    case "str":
      return escapeString(node.value);
    case "bool":
      return node.value ? "true" : "false";
    case "null":
      return "null";
  }
}

function expectObj(node: JsonNode, what: string): [string, JsonNode][] {
  if (node.kind !== "obj") throw new CanonicalError(`${what} is not an object`);
  return node.entries;
}

function pick(entries: [string, JsonNode][], key: string, what: string): JsonNode {
  const hit = entries.find(([k]) => k === key);
  if (!hit) throw new CanonicalError(`${what} is missing '${key}'`);
  return hit[1];
}

function canonicalNorm(node: JsonNode): string {
  const entries = expectObj(node, "norm");
  let out = '{"kind":' + emit(pick(entries, "kind", "norm"));
  const epsilon = entries.find(([k]) => k === "epsilon");
  if (epsilon) out += ',"epsilon":' + emit(epsilon[1]);
  return out + "}";
}

function canonicalTerm(node: JsonNode): string {
  const entries = expectObj(node, "term");
  const params = expectObj(pick(entries, "params", "term"), "params");
  const sorted = [...params].sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0));
  return (
    '{"id":' + emit(pick(entries, "id", "term")) +
    ',"residual_fn":' + emit(pick(entries, "residual_fn", "term")) +
    ',"params":{' + sorted.map(([k, v]) => escapeString(k) + ":" + emit(v)).join(",") + "}" +
    ',"weight":' + emit(pick(entries, "weight", "term")) +
    ',"norm":' + canonicalNorm(pick(entries, "norm", "term")) +
    "}"
  );
}

/** Canonical serialization of a spec subtree: the exact byte string the
 * service hashes for its checksum. */
export function canonicalSpec(node: JsonNode): string {
  const entries = expectObj(node, "spec");
  const terms = pick(entries, "terms", "spec");
  if (terms.kind !== "arr") throw new CanonicalError("'terms' is not an array");
  return (
    '{"version":' + emit(pick(entries, "version", "spec")) +
    ',"plan_duration":' + emit(pick(entries, "plan_duration", "spec")) +
    ',"terms":[' + terms.items.map(canonicalTerm).join(",") + "]}"
  );
}

export async function sha256Hex(text: string): Promise<string> {
  const bytes = new TextEncoder().encode(text);
  const digest = await crypto.subtle.digest("SHA-256", bytes);
  return [...new Uint8Array(digest)].map((b) => b.toString(16).padStart(2, "0")).join("");
}

/** Checksum of the spec found at `path` inside a raw response body. */
export async function specChecksumFromBody(
  bodyText: string,
  ...path: (string | number)[]
): Promise<string> {
  const spec = getPath(parseJsonPreserving(bodyText), ...path);
  return sha256Hex(canonicalSpec(spec));
}
