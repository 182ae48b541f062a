/** Wire types mirroring the annotation service HTTP API. */

export type VerdictKind = "first_mistake" | "no_mistake" | "ambiguous";

export interface Verdict {
  kind: VerdictKind;
  /** 1-based step index; present only for first_mistake. */
  index?: number;
}

export interface TaskPayload {
  task_id: string;
  problem_id: string;
  statement: string;
  reference_steps: string[];
  steps: string[];
  is_gold: boolean;
}

export type AnnotatorState = "pending" | "qualified" | "rejected";

export interface AnnotatorProfile {
  annotator_id: string;
  state: AnnotatorState;
  gold_passed: number;
  gold_attempted: number;
  submitted_count: number;
}

export interface NextResponse {
  annotator: AnnotatorProfile;
  task: TaskPayload | null;
}

export interface ExportedExample {
  problem_id: string;
  sample_id: string;
  steps: string[];
  labels: number[];
  provenance: string;
}

export interface ExportResponse {
  report: Record<string, unknown>;
  examples: ExportedExample[];
}
