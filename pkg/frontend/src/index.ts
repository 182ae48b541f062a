export { AnnotationApi, ApiError } from "./api.js";
export { stepLabelsFromVerdict } from "./labels.js";
export { renderTask, renderTerminal, tryEvalExpression } from "./render.js";
export {
  AnnotationSession,
  GOLD_TASKS_REQUIRED,
  INSTRUCTIONS_BANNER,
} from "./session.js";
export type { Draft, SessionState, TaskView } from "./session.js";
export type {
  AnnotatorProfile,
  ExportResponse,
  NextResponse,
  TaskPayload,
  Verdict,
  VerdictKind,
} from "./types.js";
