// Animation timelines derived purely from the service's move reply, never
// from local rules: each cascade step contributes a clear flash and a
// settle to the server-provided next board.

import type { Cell, MoveReply } from "./types.js";

export type Frame =
  | { kind: "swap"; a: Cell; b: Cell }
  | { kind: "revert"; a: Cell; b: Cell }
  | { kind: "clear"; cells: Cell[]; points: number; multiplier: number }
  | { kind: "settle"; grid: number[][] }
  | { kind: "reshuffle"; grid: number[][] };

export function buildTimeline(a: Cell, b: Cell, reply: MoveReply): Frame[] {
  const frames: Frame[] = [{ kind: "swap", a, b }];
  if (!reply.valid) {
    frames.push({ kind: "revert", a, b });
    return frames;
  }
  for (const step of reply.steps) {
    frames.push({
      kind: "clear",
      cells: step.cleared,
      points: step.points,
      multiplier: step.multiplier,
    });
    frames.push({ kind: "settle", grid: step.grid_after });
  }
  if (reply.reshuffled && reply.state.board) {
    frames.push({ kind: "reshuffle", grid: reply.state.board });
  }
  return frames;
}

export function isAdjacent(a: Cell, b: Cell): boolean {
  return Math.abs(a[0] - b[0]) + Math.abs(a[1] - b[1]) === 1;
}

export function finalGrid(frames: Frame[]): number[][] | null {
  for (let i = frames.length - 1; i >= 0; i--) {
    const frame = frames[i];
    if (frame.kind === "settle" || frame.kind === "reshuffle") {
      return frame.grid;
    }
  }
  return null;
}
