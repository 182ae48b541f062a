/** Annotator session: one task at a time, a draft verdict, optimistic submit.
 *
 * The draft enforces the exactly-one-verdict invariant structurally: picking
 * a step, marking no-mistake, and flagging ambiguous all overwrite each
 * other, and submit() refuses to run with no selection. Server rejections
 * (not assigned, already submitted) surface as errors without clearing the
 * draft, so nothing the rater entered is lost.
 */

import { AnnotationApi, ApiError } from "./api.js";
import type { TaskPayload, Verdict } from "./types.js";

export const GOLD_TASKS_REQUIRED = 4;

/** Shown verbatim above every task. */
export const INSTRUCTIONS_BANNER =
  "Mark the first major mistake: a step where the information expressed is " +
  "incorrect, or it would no longer be possible to reach the correct " +
  "solution without undoing that step.";

export type Draft =
  | { kind: "none" }
  | { kind: "first_mistake"; index: number }
  | { kind: "no_mistake" }
  | { kind: "ambiguous" };

export interface TaskView {
  task: TaskPayload;
  /** "n/4" while qualifying, null once qualified. */
  qualificationProgress: string | null;
  draft: Draft;
}

export type SessionState =
  | { kind: "idle" }
  | { kind: "task"; view: TaskView }
  | { kind: "queue_empty" }
  | { kind: "rejected" };

export class AnnotationSession {
  private state: SessionState = { kind: "idle" };
  private lastError: ApiError | null = null;

  constructor(
    private readonly api: AnnotationApi,
    private readonly annotatorId: string,
  ) {}

  current(): SessionState {
    return this.state;
  }

  error(): ApiError | null {
    return this.lastError;
  }

  async start(): Promise<SessionState> {
    await this.api.register(this.annotatorId);
    return this.loadNext();
  }

  async loadNext(): Promise<SessionState> {
    const { annotator, task } = await this.api.next(this.annotatorId);
    if (annotator.state === "rejected") {
      this.state = { kind: "rejected" };
    } else if (task === null) {
      this.state = { kind: "queue_empty" };
    } else {
      const progress =
        annotator.state === "pending"
          ? `${annotator.gold_attempted + 1}/${GOLD_TASKS_REQUIRED}`
          : null;
      this.state = {
        kind: "task",
        view: { task, qualificationProgress: progress, draft: { kind: "none" } },
      };
    }
    return this.state;
  }

  private view(): TaskView {
    if (this.state.kind !== "task") {
      throw new Error(`no active task (state: ${this.state.kind})`);
    }
    return this.state.view;
  }

  /** Click step `index` (1-based). Blank steps are ordinary selectable rows. */
  selectStep(index: number): void {
    const view = this.view();
    if (index < 1 || index > view.task.steps.length) {
      throw new Error(
        `step ${index} outside the ${view.task.steps.length}-step solution`,
      );
    }
    view.draft = { kind: "first_mistake", index };
  }

  markNoMistake(): void {
    this.view().draft = { kind: "no_mistake" };
  }

  markAmbiguous(): void {
    this.view().draft = { kind: "ambiguous" };
  }

  clearDraft(): void {
    this.view().draft = { kind: "none" };
  }

  /** The verdict the draft encodes, or null when nothing is selected. */
  draftVerdict(): Verdict | null {
    const draft = this.view().draft;
    switch (draft.kind) {
      case "none":
        return null;
      case "first_mistake":
        return { kind: "first_mistake", index: draft.index };
      default:
        return { kind: draft.kind };
    }
  }

  /** Submit the draft; on success advance to the next task. */
  async submit(): Promise<SessionState> {
    const view = this.view();
    const verdict = this.draftVerdict();
    if (verdict === null) {
      throw new Error("select a step, no-mistake, or ambiguous before submitting");
    }
    try {
      await this.api.submitVerdict(view.task.task_id, this.annotatorId, verdict);
      this.lastError = null;
    } catch (err) {
      if (err instanceof ApiError) {
        // keep the draft so the rater's work survives the rejection
        this.lastError = err;
        return this.state;
      }
      throw err;
    }
    return this.loadNext();
  }
}
