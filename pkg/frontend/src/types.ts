// Shapes of the tutor-service JSON payloads.

export interface NodeView {
  id: number;
  statement: string;
  kind: "given" | "derived" | "conclusion" | "hint";
  justified: boolean;
  label: number | null;
  rule: string | null;
  parents: number[];
  color?: "gray" | "yellow" | "green" | null;
}

export interface ScriptStep {
  premises: string[];
  rule: string;
  conclusion: string;
}

export interface ProblemView {
  id: string;
  givens: string[];
  conclusion: string;
  catalog: string[];
  expert_length: number;
  phase: string;
  focus: string;
  worked: boolean;
  expert_script: ScriptStep[];
}

export interface SessionView {
  sid: string;
  student: string;
  condition: "NS" | "WP";
  finished: boolean;
  phase?: "intro" | "pretest" | "training" | "posttest";
  problem?: ProblemView;
  focus?: string;
  worked?: boolean;
  hints_enabled?: boolean;
  skip_enabled?: boolean;
  nodes?: NodeView[];
  edges?: [number, number][];
  complete?: boolean;
  step_count?: number;
  error_count?: number;
  hints_remaining?: number;
}

export interface HintPayload {
  statement: string;
  type: "NS" | "WP";
  source: "unsolicited" | "requested";
  depth: number;
  value: number | null;
  target: string | null;
  node_id: number | null;
}

export interface StepResponse {
  result: "derived" | "needs_input" | "error" | "redundant";
  completed: boolean;
  advanced: boolean;
  finished: boolean;
  state: SessionView;
  error?: string;
  options?: string[];
  node?: NodeView;
  hint?: HintPayload;
}

export interface ApiError {
  error: string;
}
