// Reward-term inspector: one row per term (id, residual, params, weight,
// norm) plus a verification badge comparing the client-recomputed canonical
// checksum with the server's.

import type { SpecDiff } from "../diff.js";
import type { SpecDoc, TermDoc } from "../types.js";

function short(sum: string): string {
  return sum.slice(0, 12);
}

function normText(term: TermDoc): string {
  return term.norm.epsilon !== undefined
    ? `${term.norm.kind} (ε=${term.norm.epsilon})`
    : term.norm.kind;
}

function row(term: TermDoc, cssClass: string): HTMLTableRowElement {
  const tr = document.createElement("tr");
  tr.className = cssClass;
  for (const text of [
    term.id,
    term.residual_fn,
    JSON.stringify(term.params),
    String(term.weight),
    normText(term),
  ]) {
    const td = document.createElement("td");
    td.textContent = text;
    tr.appendChild(td);
  }
  return tr;
}

export interface TermTableModel {
  spec: SpecDoc;
  checksum: string;
  checksumOk: boolean | null;
  diff?: SpecDiff;
}

export function renderTermTable(container: HTMLElement, model: TermTableModel): void {
  container.textContent = "";
  container.classList.add("term-table");

  const badge = document.createElement("div");
  badge.className =
    model.checksumOk === null
      ? "checksum-badge verifying"
      : model.checksumOk
        ? "checksum-badge ok"
        : "checksum-badge mismatch";
  badge.textContent =
    model.checksumOk === null
      ? `verifying ${short(model.checksum)}…`
      : model.checksumOk
        ? `verified ${short(model.checksum)}`
        : `MISMATCH ${short(model.checksum)}`;
  container.appendChild(badge);

  const table = document.createElement("table");
  const head = document.createElement("tr");
  for (const title of ["id", "residual", "params", "weight", "norm"]) {
    const th = document.createElement("th");
    th.textContent = title;
    head.appendChild(th);
  }
  table.appendChild(head);

  const changed = new Set(model.diff?.changed.map((c) => c.after.id) ?? []);
  const added = new Set(model.diff?.added.map((t) => t.id) ?? []);
  for (const term of model.spec.terms) {
    const cssClass = added.has(term.id) ? "term added" : changed.has(term.id) ? "term changed" : "term";
    table.appendChild(row(term, cssClass));
  }
  for (const term of model.diff?.removed ?? []) {
    table.appendChild(row(term, "term removed"));
  }
  container.appendChild(table);

  if (model.spec.terms.length === 0) {
    const empty = document.createElement("div");
    empty.className = "empty-spec";
    empty.textContent = "no reward terms yet";
    container.appendChild(empty);
  }
}
