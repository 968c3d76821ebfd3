// The six-round study flow as a DOM-free controller. A View renders what
// the controller tells it to; tests drive the controller headlessly.

import { ApiClient, ApiRequestError } from "./api.js";
import { buildTimeline, Frame, isAdjacent } from "./timeline.js";
import type { Cell, MoveReply, PublicState } from "./types.js";

export interface View {
  renderState(state: PublicState): void;
  playTimeline(frames: Frame[]): Promise<void>;
  rejectSelection(a: Cell, b: Cell): void; // non-adjacent pick: shake, no request
  showRoundComplete(roundIndex: number, score: number): void;
  showCompletion(roundScores: number[], total: number): void;
  showError(message: string, retryable: boolean): void;
}

export type Phase = "idle" | "awaiting-start" | "playing" | "animating" | "complete";

export class StudyController {
  phase: Phase = "awaiting-start";
  state: PublicState | null = null;
  sessionId: string | null = null;

  constructor(
    private api: ApiClient,
    private view: View,
  ) {}

  async start(participant: string): Promise<void> {
    if (!participant.trim()) {
      this.view.showError("Please enter a participant label.", false);
      return;
    }
    try {
      const reply = await this.api.createSession(participant.trim());
      this.sessionId = reply.session_id;
      this.state = reply.state;
      this.phase = "playing";
      this.view.renderState(reply.state);
    } catch (err) {
      this.phase = "awaiting-start";
      this.view.showError(describe(err), true);
    }
  }

  /** Reload-safe: the session token is all the client keeps. */
  async resume(sessionId: string): Promise<void> {
    try {
      const state = await this.api.getState(sessionId);
      this.sessionId = sessionId;
      this.state = state;
      if (state.session_complete) {
        this.phase = "complete";
        this.view.showCompletion(state.round_scores, state.total_score ?? 0);
      } else {
        this.phase = "playing";
        this.view.renderState(state);
      }
    } catch (err) {
      this.view.showError(describe(err), true);
    }
  }

  /** One in-flight move at a time; input is ignored while animating. */
  async attemptSwap(a: Cell, b: Cell): Promise<MoveReply | null> {
    if (this.phase !== "playing" || !this.sessionId) {
      return null;
    }
    if (!isAdjacent(a, b)) {
      this.view.rejectSelection(a, b);
      return null;
    }
    this.phase = "animating";
    try {
      const reply = await this.api.submitMove(this.sessionId, a, b);
      await this.view.playTimeline(buildTimeline(a, b, reply));
      this.state = reply.state;
      if (reply.round_completed) {
        const finished = reply.state.round_scores;
        this.view.showRoundComplete(finished.length, finished[finished.length - 1]);
      }
      if (reply.state.session_complete) {
        this.phase = "complete";
        this.view.showCompletion(reply.state.round_scores, reply.state.total_score ?? 0);
      } else {
        this.phase = "playing";
        this.view.renderState(reply.state);
      }
      return reply;
    } catch (err) {
      this.phase = "playing";
      const retryable = !(err instanceof ApiRequestError && err.status < 500);
      this.view.showError(describe(err), retryable);
      return null;
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiRequestError) {
    return `Request failed (${err.status}): ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}
