// End-to-end protocol test against the real Python service: a scripted
// session plays all 6 rounds x 20 valid moves through the client stack.
//
// The client knows no game rules, so it discovers valid moves by trying
// adjacent swaps until the server accepts one; rejected attempts double as
// the invalid-swap assertions.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { StudyController, View } from "../src/study.js";
import type { Cell, PublicState } from "../src/types.js";

const PORT = 8731;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;

class HeadlessView implements View {
  board: number[][] = [];
  movesRemaining = 0;
  roundIndex = 0;
  scores: number[] = [];
  completionTotal: number | null = null;
  errors: string[] = [];

  renderState(state: PublicState): void {
    if (state.board) {
      this.board = state.board;
    }
    this.movesRemaining = state.moves_remaining ?? 0;
    this.roundIndex = state.round_index;
  }
  async playTimeline(): Promise<void> {}
  rejectSelection(): void {}
  showRoundComplete(_round: number, score: number): void {
    this.scores.push(score);
  }
  showCompletion(roundScores: number[], total: number): void {
    this.scores = roundScores;
    this.completionTotal = total;
  }
  showError(message: string): void {
    this.errors.push(message);
  }
}

function adjacentPairs(rows: number, cols: number): [Cell, Cell][] {
  const pairs: [Cell, Cell][] = [];
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      if (c + 1 < cols) pairs.push([[r, c], [r, c + 1]]);
      if (r + 1 < rows) pairs.push([[r, c], [r + 1, c]]);
    }
  }
  return pairs;
}

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 120; i++) {
    try {
      const response = await fetch(`${BASE}/presets`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 500));
  }
  throw new Error("service did not come up on time");
}

beforeAll(async () => {
  const work = mkdtempSync(join(tmpdir(), "m3lab-e2e-"));
  const presets = join(work, "presets");
  const store = join(work, "store");
  const made = spawnSync(
    "python3",
    ["-m", "m3lab.cli", "make-presets", "--out", presets, "--count", "3", "--seed", "21"],
    { stdio: "inherit" },
  );
  if (made.status !== 0) {
    throw new Error("make-presets failed");
  }
  server = spawn(
    "python3",
    [
      "-m", "m3lab.cli", "serve",
      "--presets", presets,
      "--store", store,
      "--port", String(PORT),
      "--session-seed", "424242",
    ],
    { stdio: "ignore" },
  );
  await waitForServer();
});

afterAll(() => {
  server?.kill();
});

describe("full study protocol", () => {
  it("completes 6 rounds of 20 valid moves; invalid swaps never consume", async () => {
    const api = new ApiClient(BASE);
    const view = new HeadlessView();
    const controller = new StudyController(api, view);
    await controller.start("e2e-participant");
    expect(controller.sessionId).toBeTruthy();
    expect(view.roundIndex).toBe(1);
    expect(view.movesRemaining).toBe(20);

    let invalidAttempts = 0;
    const seenRounds = new Set<number>();
    while (controller.phase === "playing") {
      seenRounds.add(view.roundIndex);
      const before = view.movesRemaining;
      let advanced = false;
      for (const [a, b] of adjacentPairs(view.board.length, view.board[0].length)) {
        const reply = await controller.attemptSwap(a, b);
        expect(reply).not.toBeNull();
        if (!reply!.valid) {
          invalidAttempts += 1;
          // an undone swap costs nothing
          expect(reply!.state.moves_remaining).toBe(before);
          continue;
        }
        expect(reply!.points_gained).toBeGreaterThanOrEqual(60);
        if (controller.phase === "complete") {
          advanced = true;
          break;
        }
        expect(view.movesRemaining === before - 1 || view.movesRemaining === 20).toBe(true);
        advanced = true;
        break;
      }
      expect(advanced, "every live board must offer some valid move").toBe(true);
    }

    expect(controller.phase).toBe("complete");
    expect(view.scores.length).toBe(6);
    expect(view.completionTotal).toBe(view.scores.reduce((s, x) => s + x, 0));
    expect(invalidAttempts).toBeGreaterThan(0);
    for (const score of view.scores) {
      expect(score).toBeGreaterThanOrEqual(1200); // 20 moves x 60 points floor
    }

    // persisted traces agree with what the client displayed
    const { traces } = await api.getTraces(controller.sessionId!);
    expect(traces.length).toBe(6);
    const traceScores = traces
      .sort((x, y) => x.round_index - y.round_index)
      .map((t) => t.final_score);
    expect(traceScores).toEqual(view.scores);
    for (const trace of traces) {
      expect(trace.schema).toBe("m3-trace/1");
      expect(trace.moves.filter((m) => m.valid).length).toBe(20);
    }

    // study summary has the report shape: 3 preset columns + random average
    const summary = await api.getStudySummary();
    expect(summary.rows).toEqual(["average", "maximum", "minimum"]);
    expect(Object.keys(summary.boards).length).toBe(3);
    expect(summary.random_average).not.toBeNull();
    expect(summary.sessions).toBe(1);
    for (const stats of Object.values(summary.boards)) {
      expect(stats.minimum).toBeLessThanOrEqual(stats.average);
      expect(stats.average).toBeLessThanOrEqual(stats.maximum);
    }
  });

  it("a closed session keeps serving its completion state", async () => {
    const api = new ApiClient(BASE);
    const view = new HeadlessView();
    const controller = new StudyController(api, view);
    await controller.start("e2e-second");
    const sid = controller.sessionId!;
    // fresh session: traces are not available while open
    await expect(api.getTraces(sid)).rejects.toMatchObject({ status: 409 });
    // reload mid-round resumes from the token
    const resumed = new StudyController(api, new HeadlessView());
    await resumed.resume(sid);
    expect(resumed.phase).toBe("playing");
  });
});
