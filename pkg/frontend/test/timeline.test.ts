import { describe, expect, it } from "vitest";

import { buildTimeline, finalGrid, isAdjacent } from "../src/timeline.js";
import type { MoveReply, PublicState } from "../src/types.js";

const BOARD = [
  [0, 1],
  [2, 3],
];

function stateWith(board: number[][] | undefined): PublicState {
  return {
    session_id: "s",
    round_index: 1,
    rounds_total: 6,
    session_complete: false,
    board,
    round_scores: [],
  };
}

function reply(partial: Partial<MoveReply>): MoveReply {
  return {
    valid: true,
    points_gained: 60,
    moves_available: 5,
    steps: [],
    reshuffled: false,
    round_completed: false,
    state: stateWith(BOARD),
    ...partial,
  };
}

describe("isAdjacent", () => {
  it("accepts orthogonal neighbours only", () => {
    expect(isAdjacent([0, 0], [0, 1])).toBe(true);
    expect(isAdjacent([2, 3], [1, 3])).toBe(true);
    expect(isAdjacent([0, 0], [1, 1])).toBe(false);
    expect(isAdjacent([0, 0], [0, 2])).toBe(false);
    expect(isAdjacent([0, 0], [0, 0])).toBe(false);
  });
});

describe("buildTimeline", () => {
  it("invalid swap animates swap then revert", () => {
    const frames = buildTimeline([0, 0], [0, 1], reply({ valid: false, points_gained: 0 }));
    expect(frames.map((f) => f.kind)).toEqual(["swap", "revert"]);
  });

  it("two-step cascade yields two clear/settle pairs in order", () => {
    const gridA = [
      [1, 1],
      [0, 0],
    ];
    const gridB = [
      [2, 2],
      [3, 3],
    ];
    const frames = buildTimeline(
      [0, 0],
      [0, 1],
      reply({
        steps: [
          { multiplier: 1, points: 60, groups: [], cleared: [[0, 0]], grid_after: gridA },
          { multiplier: 2, points: 120, groups: [], cleared: [[1, 0]], grid_after: gridB },
        ],
      }),
    );
    expect(frames.map((f) => f.kind)).toEqual(["swap", "clear", "settle", "clear", "settle"]);
    const clears = frames.filter((f) => f.kind === "clear") as { multiplier: number; points: number }[];
    expect(clears.map((c) => c.multiplier)).toEqual([1, 2]);
    expect(clears.map((c) => c.points)).toEqual([60, 120]);
    expect(finalGrid(frames)).toEqual(gridB);
  });

  it("appends a reshuffle frame from the post-move board", () => {
    const frames = buildTimeline(
      [0, 0],
      [0, 1],
      reply({
        reshuffled: true,
        steps: [
          { multiplier: 1, points: 60, groups: [], cleared: [[0, 0]], grid_after: BOARD },
        ],
      }),
    );
    expect(frames[frames.length - 1].kind).toBe("reshuffle");
    expect(finalGrid(frames)).toEqual(BOARD);
  });
});
