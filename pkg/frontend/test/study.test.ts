import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { StudyController, View } from "../src/study.js";
import type { Frame } from "../src/timeline.js";
import type { Cell, MoveReply, PublicState } from "../src/types.js";

function state(partial: Partial<PublicState>): PublicState {
  return {
    session_id: "sess-1",
    round_index: 1,
    rounds_total: 6,
    session_complete: false,
    board: [
      [0, 1, 2],
      [3, 4, 5],
      [0, 1, 2],
    ],
    score: 0,
    moves_made: 0,
    moves_remaining: 20,
    round_scores: [],
    ...partial,
  };
}

class RecordingView implements View {
  rendered: PublicState[] = [];
  timelines: Frame[][] = [];
  rejections: [Cell, Cell][] = [];
  roundBanners: [number, number][] = [];
  completion: [number[], number] | null = null;
  errors: string[] = [];

  renderState(s: PublicState) {
    this.rendered.push(s);
  }
  async playTimeline(frames: Frame[]) {
    this.timelines.push(frames);
  }
  rejectSelection(a: Cell, b: Cell) {
    this.rejections.push([a, b]);
  }
  showRoundComplete(round: number, score: number) {
    this.roundBanners.push([round, score]);
  }
  showCompletion(scores: number[], total: number) {
    this.completion = [scores, total];
  }
  showError(message: string) {
    this.errors.push(message);
  }
}

class FakeApi {
  moveReplies: MoveReply[] = [];
  submitted: [Cell, Cell][] = [];
  failCreate = false;

  async createSession(participant: string) {
    if (this.failCreate) {
      throw new Error("service unreachable");
    }
    return { session_id: "sess-1", state: state({}) };
  }
  async getState(_id: string) {
    return state({ score: 120, moves_made: 2, moves_remaining: 18 });
  }
  async submitMove(_id: string, a: Cell, b: Cell) {
    this.submitted.push([a, b]);
    const reply = this.moveReplies.shift();
    if (!reply) {
      throw new Error("no scripted reply left");
    }
    return reply;
  }
}

function controllerWith(api: FakeApi): [StudyController, RecordingView] {
  const view = new RecordingView();
  const controller = new StudyController(api as unknown as ApiClient, view);
  return [controller, view];
}

describe("StudyController", () => {
  it("start renders round 1 of 6 with 20 moves left", async () => {
    const [controller, view] = controllerWith(new FakeApi());
    await controller.start("tester");
    expect(controller.phase).toBe("playing");
    expect(view.rendered[0].round_index).toBe(1);
    expect(view.rendered[0].moves_remaining).toBe(20);
  });

  it("empty participant label is rejected client-side", async () => {
    const api = new FakeApi();
    const [controller, view] = controllerWith(api);
    await controller.start("   ");
    expect(view.errors.length).toBe(1);
    expect(controller.phase).toBe("awaiting-start");
  });

  it("service failure leaves a retryable start state", async () => {
    const api = new FakeApi();
    api.failCreate = true;
    const [controller, view] = controllerWith(api);
    await controller.start("tester");
    expect(controller.phase).toBe("awaiting-start");
    expect(view.errors.length).toBe(1);
  });

  it("non-adjacent selection shakes without a request", async () => {
    const api = new FakeApi();
    const [controller, view] = controllerWith(api);
    await controller.start("t");
    await controller.attemptSwap([0, 0], [2, 2]);
    expect(view.rejections.length).toBe(1);
    expect(api.submitted.length).toBe(0);
  });

  it("invalid swap keeps the move counter and plays a revert", async () => {
    const api = new FakeApi();
    api.moveReplies.push({
      valid: false,
      points_gained: 0,
      moves_available: 7,
      steps: [],
      reshuffled: false,
      round_completed: false,
      state: state({ moves_remaining: 20 }),
    });
    const [controller, view] = controllerWith(api);
    await controller.start("t");
    const reply = await controller.attemptSwap([0, 0], [0, 1]);
    expect(reply?.valid).toBe(false);
    expect(view.timelines[0].map((f) => f.kind)).toEqual(["swap", "revert"]);
    expect(controller.state?.moves_remaining).toBe(20);
  });

  it("round completion shows the banner and the next round's board", async () => {
    const api = new FakeApi();
    api.moveReplies.push({
      valid: true,
      points_gained: 60,
      moves_available: 4,
      steps: [],
      reshuffled: false,
      round_completed: true,
      state: state({ round_index: 2, round_scores: [1320], moves_remaining: 20 }),
    });
    const [controller, view] = controllerWith(api);
    await controller.start("t");
    await controller.attemptSwap([0, 0], [0, 1]);
    expect(view.roundBanners).toEqual([[1, 1320]]);
    expect(controller.phase).toBe("playing");
    expect(view.rendered[view.rendered.length - 1].round_index).toBe(2);
  });

  it("session completion reaches the completion screen", async () => {
    const api = new FakeApi();
    api.moveReplies.push({
      valid: true,
      points_gained: 200,
      moves_available: 0,
      steps: [],
      reshuffled: false,
      round_completed: true,
      state: {
        session_id: "sess-1",
        round_index: 6,
        rounds_total: 6,
        session_complete: true,
        round_scores: [1200, 1300, 1250, 1400, 1260, 1500],
        total_score: 7910,
      },
    });
    const [controller, view] = controllerWith(api);
    await controller.start("t");
    await controller.attemptSwap([0, 0], [0, 1]);
    expect(controller.phase).toBe("complete");
    expect(view.completion?.[0].length).toBe(6);
    expect(view.completion?.[1]).toBe(7910);
    expect(view.roundBanners.pop()).toEqual([6, 1500]);
  });

  it("resume restores an in-progress session from the token alone", async () => {
    const api = new FakeApi();
    const [controller, view] = controllerWith(api);
    await controller.resume("sess-1");
    expect(controller.phase).toBe("playing");
    expect(view.rendered[0].score).toBe(120);
  });
});
