// Tri-state toggle model: every state variable is Unknown, True or False;
// at most one action may be conditioned (state-likelihood mode only).
// The server owns all probability math; this module only maps toggles to
// the evidence object sent with each query.

export type Tri = "unknown" | "true" | "false";

export type Mode = "actions" | "state";

export interface ToggleState {
  mode: Mode;
  vars: Record<string, Tri>;
  action: string | null;
}

export function initialState(stateVariables: string[]): ToggleState {
  const vars: Record<string, Tri> = {};
  for (const name of stateVariables) vars[name] = "unknown";
  return { mode: "actions", vars, action: null };
}

export function cycleTri(value: Tri): Tri {
  return value === "unknown" ? "true" : value === "true" ? "false" : "unknown";
}

export function toggleVariable(state: ToggleState, name: string): ToggleState {
  if (!(name in state.vars)) throw new Error(`unknown variable ${name}`);
  return {
    ...state,
    vars: { ...state.vars, [name]: cycleTri(state.vars[name]) },
  };
}

/** Select the conditioned action; re-selecting clears it. Only one at a time. */
export function selectAction(state: ToggleState, action: string | null): ToggleState {
  const next = state.action === action ? null : action;
  return { ...state, action: next, mode: next === null ? "actions" : "state" };
}

export function setMode(state: ToggleState, mode: Mode): ToggleState {
  return { ...state, mode, action: mode === "actions" ? null : state.action };
}

/** Evidence for the query body: only explicitly set variables appear. */
export function toEvidence(state: ToggleState): Record<string, boolean> {
  const evidence: Record<string, boolean> = {};
  for (const [name, tri] of Object.entries(state.vars)) {
    if (tri !== "unknown") evidence[name] = tri === "true";
  }
  return evidence;
}

/** Body of POST /theories/{id}/query for the current toggles. */
export function queryBody(state: ToggleState): {
  evidence: Record<string, boolean>;
  target: Mode;
  action?: string;
} {
  const body: { evidence: Record<string, boolean>; target: Mode; action?: string } = {
    evidence: toEvidence(state),
    target: state.mode,
  };
  if (state.mode === "state" && state.action) body.action = state.action;
  return body;
}

/** Evidence for POST /theories/{id}/dag: include the conditioned action. */
export function dagEvidence(state: ToggleState): Record<string, boolean> {
  const evidence = toEvidence(state);
  if (state.action) evidence[`action=${state.action}`] = true;
  return evidence;
}

/** Group variable names by their movement prefix ("E-G0_0-7" -> "E-G0"). */
export function groupByMovement(names: string[]): Map<string, string[]> {
  const groups = new Map<string, string[]>();
  for (const name of names) {
    const cut = name.lastIndexOf("_");
    const key = cut > 0 ? name.slice(0, cut) : "state";
    const bucket = groups.get(key);
    if (bucket) bucket.push(name);
    else groups.set(key, [name]);
  }
  return groups;
}
