/** HTML string rendering of a task view.
 *
 * Pure string output keeps the renderer trivially testable; the host page
 * mounts it and wires click handlers to session.selectStep and friends.
 * Calculator spans are highlighted and checked inline as a reading aid; the
 * check has no effect on the submitted verdict.
 */

import { INSTRUCTIONS_BANNER, type TaskView } from "./session.js";

const CALC_SPAN = /<<([^=>]+)=([^>]*)>>/g;

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Evaluate plus/minus/times/divide chains with standard precedence. */
export function tryEvalExpression(expr: string): number | null {
  const tokens = expr.match(/\d+(?:\.\d+)?|[+\-*/]/g);
  if (!tokens || tokens.join("") !== expr.replace(/\s+/g, "")) return null;
  const values: number[] = [];
  const ops: string[] = [];
  const apply = () => {
    const op = ops.pop();
    const b = values.pop();
    const a = values.pop();
    if (op === undefined || a === undefined || b === undefined) return false;
    values.push(op === "+" ? a + b : op === "-" ? a - b
      : op === "*" ? a * b : a / b);
    return true;
  };
  let expectValue = true;
  let negate = false;
  for (const tok of tokens) {
    if (expectValue) {
      if (tok === "-" && !negate) {
        negate = true;
        continue;
      }
      const v = Number(tok);
      if (Number.isNaN(v)) return null;
      values.push(negate ? -v : v);
      negate = false;
      expectValue = false;
    } else {
      if (!"+-*/".includes(tok)) return null;
      while (
        ops.length > 0 &&
        !("*/".includes(tok) && "+-".includes(ops[ops.length - 1] ?? ""))
      ) {
        if (!apply()) return null;
      }
      ops.push(tok);
      expectValue = true;
    }
  }
  while (ops.length > 0) if (!apply()) return null;
  return values.length === 1 ? (values[0] ?? null) : null;
}

function renderStepText(text: string): string {
  if (text === "") {
    return '<span class="blank-step">(blank step)</span>';
  }
  let out = "";
  let last = 0;
  for (const m of text.matchAll(CALC_SPAN)) {
    const [whole, expr, declared] = m;
    out += escapeHtml(text.slice(last, m.index));
    const computed = tryEvalExpression(expr ?? "");
    const verdict =
      computed === null ? "unchecked"
        : Math.abs(computed - Number(declared)) < 1e-9 ? "ok" : "bad";
    out += `<span class="calc" data-verified="${verdict}">${escapeHtml(whole)}</span>`;
    last = (m.index ?? 0) + whole.length;
  }
  return out + escapeHtml(text.slice(last));
}

export function renderTask(view: TaskView): string {
  const { task } = view;
  const progress = view.qualificationProgress
    ? `<div class="qualification">Qualification task ` +
      `${view.qualificationProgress}</div>`
    : "";
  const reference = task.reference_steps
    .map((s) => `<li class="reference-step">${renderStepText(s)}</li>`)
    .join("");
  const selected =
    view.draft.kind === "first_mistake" ? view.draft.index : null;
  const steps = task.steps
    .map((s, i) => {
      const cls = selected === i + 1 ? "step-row selectable selected"
        : "step-row selectable";
      return `<li class="${cls}" data-step-index="${i + 1}">` +
        `${renderStepText(s)}</li>`;
    })
    .join("");
  return [
    `<div class="banner">${escapeHtml(INSTRUCTIONS_BANNER)}</div>`,
    progress,
    `<section class="problem">${escapeHtml(task.statement)}</section>`,
    `<ol class="reference">${reference}</ol>`,
    `<ol class="model-steps">${steps}</ol>`,
    `<div class="verdict-buttons">` +
      `<button data-action="no_mistake">No mistake</button>` +
      `<button data-action="ambiguous">Ambiguous</button>` +
      `<button data-action="submit">Submit</button></div>`,
  ].join("\n");
}

export function renderTerminal(state: "queue_empty" | "rejected"): string {
  return state === "queue_empty"
    ? '<div class="terminal empty">No tasks available. Check back later.</div>'
    : '<div class="terminal rejected">Qualification not passed. ' +
      "This session is closed.</div>";
}
