// Likelihood views as HTML strings: action bars and the per-variable state
// strip. No probability math here: labels come from the exact num/den pair
// and the hover title exposes the rational itself.

import { formatPercent, percentWidth } from "./format.js";
import { LikelihoodJson, QueryResultJson } from "./types.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function barRow(label: string, value: LikelihoodJson): string {
  const num = BigInt(value.num);
  const den = BigInt(value.den);
  const width = percentWidth(num, den);
  const pct = formatPercent(num, den);
  const title = `${value.num}/${value.den}`;
  return `
    <div class="bar-row" title="${esc(title)}">
      <div class="bar-label">${esc(label)}</div>
      <div class="bar-track"><div class="bar-fill" style="width:${width}%"></div></div>
      <div class="bar-value">${esc(pct)}</div>
    </div>`;
}

export function renderActionBars(result: QueryResultJson): string {
  const rows = Object.entries(result.likelihoods)
    .map(([action, value]) => barRow(action, value))
    .join("");
  return `<div class="bars">${rows}</div>`;
}

export function renderStateStrip(
  result: QueryResultJson,
  groups: Map<string, string[]>
): string {
  const blocks: string[] = [];
  for (const [movement, names] of groups) {
    const cells = names
      .map((name) => {
        const value = result.likelihoods[name];
        if (!value) return "";
        const num = BigInt(value.num);
        const den = BigInt(value.den);
        const heat = percentWidth(num, den) / 100;
        const cell = name.slice(name.lastIndexOf("_") + 1);
        return `<div class="heat-cell" title="${esc(name)}: ${esc(value.num)}/${esc(
          value.den
        )}" style="--heat:${heat}"><span>${esc(cell)}</span><b>${esc(
          formatPercent(num, den)
        )}</b></div>`;
      })
      .join("");
    blocks.push(
      `<div class="heat-group"><div class="heat-title">${esc(movement)}</div>${cells}</div>`
    );
  }
  return `<div class="heat">${blocks.join("")}</div>`;
}

/** "Never observed" is an explicit empty state, never a row of 0% bars. */
export function renderNoSupport(): string {
  return `<div class="empty-state">No supporting observations for this evidence.
  The controller was never seen in a matching state; relax a toggle.</div>`;
}

export function renderError(message: string): string {
  return `<div class="error-state">${esc(message)}</div>`;
}
