// Explorer wiring: theory picker, tri-state toggles, likelihood bars and the
// conditioned circuit drawing. Every toggle change issues one likelihood
// query (latest-wins); UI state is always the last acknowledged response.

import { ApiClient, LatestWins } from "./api.js";
import { renderActionBars, renderError, renderNoSupport, renderStateStrip } from "./bars.js";
import { renderDag, renderDagTooLarge } from "./dag.js";
import {
  ToggleState,
  Tri,
  dagEvidence,
  groupByMovement,
  initialState,
  queryBody,
  selectAction,
  toggleVariable,
} from "./state.js";
import { TheoryInfo } from "./types.js";

const api = new ApiClient("");
const inflight = new LatestWins();
const dagInflight = new LatestWins();

let theories: TheoryInfo[] = [];
let current: TheoryInfo | null = null;
let toggles: ToggleState | null = null;

const $ = (id: string) => document.getElementById(id)!;

const TRI_LABEL: Record<Tri, string> = { unknown: "?", true: "1", false: "0" };

function renderToggles(): void {
  if (!current || !toggles) return;
  const groups = groupByMovement(current.schema.state_variables);
  const blocks: string[] = [];
  for (const [movement, names] of groups) {
    const buttons = names
      .map((name) => {
        const tri = toggles!.vars[name];
        const cell = name.includes("_") ? name.slice(name.lastIndexOf("_") + 1) : name;
        return `<button class="tri tri-${tri}" data-var="${name}"
          title="${name}">${cell}<b>${TRI_LABEL[tri]}</b></button>`;
      })
      .join("");
    blocks.push(`<div class="toggle-group"><span>${movement}</span>${buttons}</div>`);
  }
  const actions = current.schema.actions
    .map(
      (a) => `<button class="action ${toggles!.action === a ? "on" : ""}"
        data-action="${a}">${a}</button>`
    )
    .join("");
  $("toggles").innerHTML = blocks.join("");
  $("actions").innerHTML =
    `<span>condition on action (state likelihood):</span>${actions}`;
  for (const btn of $("toggles").querySelectorAll("button[data-var]")) {
    btn.addEventListener("click", () => {
      toggles = toggleVariable(toggles!, (btn as HTMLElement).dataset.var!);
      renderToggles();
      refresh();
    });
  }
  for (const btn of $("actions").querySelectorAll("button[data-action]")) {
    btn.addEventListener("click", () => {
      toggles = selectAction(toggles!, (btn as HTMLElement).dataset.action!);
      renderToggles();
      refresh();
    });
  }
}

async function refresh(): Promise<void> {
  if (!current || !toggles) return;
  const outcome = await inflight.wrap(api.query(current.id, queryBody(toggles)));
  if (outcome === null) return; // superseded by a newer toggle state
  if (outcome.kind === "ok") {
    const pane = $("likelihoods");
    if (toggles.mode === "actions") {
      pane.innerHTML = renderActionBars(outcome.result);
    } else {
      pane.innerHTML = renderStateStrip(
        outcome.result,
        groupByMovement(current.schema.state_variables)
      );
    }
  } else if (outcome.kind === "no-support") {
    $("likelihoods").innerHTML = renderNoSupport();
  } else {
    $("likelihoods").innerHTML = renderError(outcome.message);
  }

  const dagOutcome = await dagInflight.wrap(api.dag(current.id, dagEvidence(toggles)));
  if (dagOutcome === null) return;
  if (dagOutcome.kind === "ok") {
    $("dag").innerHTML = renderDag(dagOutcome.dag);
  } else if (dagOutcome.kind === "too-large") {
    $("dag").innerHTML = renderDagTooLarge(dagOutcome.detail);
  } else {
    $("dag").innerHTML = renderError(dagOutcome.message);
  }
}

function selectTheory(id: string): void {
  current = theories.find((t) => t.id === id) ?? null;
  if (!current) return;
  toggles = initialState(current.schema.state_variables);
  $("meta").textContent =
    `${current.model_count} distinct observations, ${current.node_count} circuit nodes`;
  renderToggles();
  refresh();
}

async function boot(): Promise<void> {
  theories = await api.theories();
  const picker = $("theory") as HTMLSelectElement;
  picker.innerHTML = theories
    .map((t) => `<option value="${t.id}">${t.id}</option>`)
    .join("");
  picker.addEventListener("change", () => selectTheory(picker.value));
  if (theories.length) selectTheory(theories[0].id);
  else $("likelihoods").innerHTML = renderError("no theories loaded");
}

boot().catch((err) => {
  $("likelihoods").innerHTML = renderError(String(err));
});
