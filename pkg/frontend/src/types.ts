// Wire types of the policylens HTTP API.

export interface LikelihoodJson {
  p: string; // exact decimal, 4 significant digits
  num: string; // exact rational numerator
  den: string; // exact rational denominator
}

export interface QueryResultJson {
  evidence: Record<string, boolean>;
  count: string;
  likelihoods: Record<string, LikelihoodJson>;
}

export interface TheoryInfo {
  id: string;
  schema: { state_variables: string[]; actions: string[] };
  model_count: string;
  node_count: number;
}

export interface DagLiteral {
  name: string;
  positive: boolean;
}

export interface DagNode {
  id: number;
  kind: "and" | "or" | "literal" | "true" | "false";
  children?: number[];
  literal?: DagLiteral;
}

export interface DagJson {
  nodes: DagNode[];
  root: number;
}
