/** Session state machine: task order, local answers, and resume support.
 *
 * All server interaction flows through the injected ApiClient; the state
 * here mirrors what this browser has answered so an interrupted session can
 * resume from storage at the first unanswered task.
 */
import { ApiClient, ConflictError, GroupView, Summary } from "./api.js";

export interface StoredSession {
  sessionId: string;
  tasks: string[];
  answers: Record<string, number>;
}

const STORAGE_KEY = "groupchoice-study-session";

export function firstUnansweredIndex(state: StoredSession): number | null {
  for (let i = 0; i < state.tasks.length; i++) {
    const task = state.tasks[i];
    if (task !== undefined && !(task in state.answers)) {
      return i;
    }
  }
  return null;
}

/** "3 / 79": 1-based position of the current task. */
export function progressLabel(state: StoredSession): string {
  const index = firstUnansweredIndex(state);
  const position = index === null ? state.tasks.length : index + 1;
  return `${position} / ${state.tasks.length}`;
}

export function answeredCount(state: StoredSession): number {
  return Object.keys(state.answers).length;
}

/** The server's summary must agree with what this client submitted. */
export function summaryConsistent(state: StoredSession, summary: Summary): boolean {
  if (summary.answered !== answeredCount(state)) {
    return false;
  }
  const expected = summary.answered === 0 ? 0 : summary.correct / summary.answered;
  return summary.accuracy === expected;
}

export type SubmitOutcome = "advanced" | "finished";

export class StudySession {
  private state: StoredSession | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly storage: Storage | null = null,
  ) {}

  /** Resume the stored session when one exists, otherwise create one. */
  async start(): Promise<StoredSession> {
    const stored = this.storage?.getItem(STORAGE_KEY);
    if (stored) {
      try {
        const parsed = JSON.parse(stored) as StoredSession;
        if (parsed.sessionId && Array.isArray(parsed.tasks)) {
          this.state = parsed;
          return parsed;
        }
      } catch {
        this.storage?.removeItem(STORAGE_KEY);
      }
    }
    const session = await this.api.startSession();
    this.state = {
      sessionId: session.session_id,
      tasks: session.tasks,
      answers: {},
    };
    this.persist();
    return this.state;
  }

  private persist(): void {
    if (this.state) {
      this.storage?.setItem(STORAGE_KEY, JSON.stringify(this.state));
    }
  }

  private require(): StoredSession {
    if (!this.state) {
      throw new Error("session not started");
    }
    return this.state;
  }

  get snapshot(): StoredSession {
    return this.require();
  }

  currentTask(): string | null {
    const state = this.require();
    const index = firstUnansweredIndex(state);
    return index === null ? null : (state.tasks[index] ?? null);
  }

  isFinished(): boolean {
    return this.currentTask() === null;
  }

  progress(): string {
    return progressLabel(this.require());
  }

  async loadCurrentGroup(): Promise<GroupView> {
    const task = this.currentTask();
    if (task === null) {
      throw new Error("session already finished");
    }
    return this.api.getGroup(task);
  }

  /**
   * Submit the selection for the current task and advance. A 409 conflict
   * means the server already has an answer for this group (stale local
   * state); it is recorded locally so the session can move on.
   */
  async submit(optionIndex: number): Promise<SubmitOutcome> {
    const state = this.require();
    const task = this.currentTask();
    if (task === null) {
      throw new Error("session already finished");
    }
    try {
      await this.api.submitPrediction(state.sessionId, task, optionIndex);
      state.answers[task] = optionIndex;
    } catch (err) {
      if (err instanceof ConflictError) {
        state.answers[task] = optionIndex;
      } else {
        throw err;
      }
    }
    this.persist();
    return this.isFinished() ? "finished" : "advanced";
  }

  async summary(): Promise<Summary> {
    const state = this.require();
    return this.api.getSummary(state.sessionId);
  }

  /** Forget the stored session (used after showing the final summary). */
  clearStored(): void {
    this.storage?.removeItem(STORAGE_KEY);
  }
}
