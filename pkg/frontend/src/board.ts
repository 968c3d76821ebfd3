// DOM view: board rendering, swap gestures, and timeline playback.

import { tileStyle } from "./palette.js";
import type { Frame } from "./timeline.js";
import { isAdjacent } from "./timeline.js";
import type { Cell, PublicState } from "./types.js";
import type { View } from "./study.js";

const STEP_MS = 260;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export class BoardView implements View {
  private grid: number[][] = [];
  private selected: Cell | null = null;
  private dragFrom: Cell | null = null;
  private stepDelay: number;

  constructor(
    private root: HTMLElement,
    private onSwap: (a: Cell, b: Cell) => void,
    stepDelay: number = STEP_MS,
  ) {
    this.stepDelay = stepDelay;
  }

  private el(id: string): HTMLElement {
    return this.root.querySelector(`#${id}`) as HTMLElement;
  }

  renderState(state: PublicState): void {
    if (!state.board) {
      return;
    }
    this.grid = state.board;
    this.el("round-label").textContent = `Round ${state.round_index} of ${state.rounds_total}`;
    this.el("score-label").textContent = `Score: ${state.score ?? 0}`;
    this.el("moves-label").textContent = `Moves left: ${state.moves_remaining ?? 0}`;
    this.drawGrid(state.board);
  }

  private drawGrid(grid: number[][], highlight: Cell[] = []): void {
    const boardEl = this.el("board");
    boardEl.style.setProperty("--cols", String(grid[0].length));
    boardEl.innerHTML = "";
    const marked = new Set(highlight.map(([r, c]) => `${r}:${c}`));
    grid.forEach((row, r) => {
      row.forEach((colorId, c) => {
        const cell = document.createElement("button");
        cell.className = "tile";
        const style = tileStyle(colorId);
        cell.style.setProperty("--tile-color", style.color);
        cell.textContent = style.symbol;
        cell.dataset.row = String(r);
        cell.dataset.col = String(c);
        cell.setAttribute("aria-label", `${style.name} at row ${r + 1}, column ${c + 1}`);
        if (marked.has(`${r}:${c}`)) {
          cell.classList.add("clearing");
        }
        if (this.selected && this.selected[0] === r && this.selected[1] === c) {
          cell.classList.add("selected");
        }
        this.attachGestures(cell, [r, c]);
        boardEl.appendChild(cell);
      });
    });
  }

  private attachGestures(cell: HTMLElement, pos: Cell): void {
    cell.addEventListener("click", () => this.handleTap(pos));
    cell.addEventListener("pointerdown", () => {
      this.dragFrom = pos;
    });
    cell.addEventListener("pointerenter", () => {
      if (this.dragFrom && isAdjacent(this.dragFrom, pos)) {
        const from = this.dragFrom;
        this.dragFrom = null;
        this.selected = null;
        this.onSwap(from, pos);
      }
    });
    cell.addEventListener("pointerup", () => {
      this.dragFrom = null;
    });
  }

  private handleTap(pos: Cell): void {
    if (!this.selected) {
      this.selected = pos;
      this.drawGrid(this.grid);
      return;
    }
    const a = this.selected;
    this.selected = null;
    if (a[0] === pos[0] && a[1] === pos[1]) {
      this.drawGrid(this.grid);
      return; // deselect
    }
    this.onSwap(a, pos);
  }

  async playTimeline(frames: Frame[]): Promise<void> {
    for (const frame of frames) {
      switch (frame.kind) {
        case "swap":
        case "revert": {
          const [a, b] = [frame.a, frame.b];
          const tmp = this.grid[a[0]][a[1]];
          this.grid = this.grid.map((row) => [...row]);
          this.grid[a[0]][a[1]] = this.grid[b[0]][b[1]];
          this.grid[b[0]][b[1]] = tmp;
          this.drawGrid(this.grid);
          break;
        }
        case "clear": {
          this.drawGrid(this.grid, frame.cells);
          this.flashPoints(frame.points, frame.multiplier);
          break;
        }
        case "settle":
        case "reshuffle": {
          this.grid = frame.grid;
          this.drawGrid(this.grid);
          break;
        }
      }
      await sleep(this.stepDelay);
    }
  }

  private flashPoints(points: number, multiplier: number): void {
    const el = this.el("points-flash");
    el.textContent = multiplier > 1 ? `+${points} (x${multiplier} combo!)` : `+${points}`;
    el.classList.remove("visible");
    void el.offsetWidth; // restart the CSS animation
    el.classList.add("visible");
  }

  rejectSelection(_a: Cell, _b: Cell): void {
    const boardEl = this.el("board");
    boardEl.classList.remove("shake");
    void boardEl.offsetWidth;
    boardEl.classList.add("shake");
  }

  showRoundComplete(roundIndex: number, score: number): void {
    const banner = this.el("banner");
    banner.textContent = `Round ${roundIndex} complete — ${score} points. Next board loading…`;
    banner.classList.add("visible");
    setTimeout(() => banner.classList.remove("visible"), 2200);
  }

  showCompletion(roundScores: number[], total: number): void {
    this.el("play-area").hidden = true;
    const done = this.el("completion");
    done.hidden = false;
    const list = this.el("round-scores");
    list.innerHTML = "";
    roundScores.forEach((score, i) => {
      const li = document.createElement("li");
      li.textContent = `Round ${i + 1}: ${score}`;
      list.appendChild(li);
    });
    this.el("total-score").textContent = `Total: ${total}`;
  }

  showError(message: string, retryable: boolean): void {
    const banner = this.el("banner");
    banner.textContent = retryable ? `${message} — please try again.` : message;
    banner.classList.add("visible", "error");
    setTimeout(() => banner.classList.remove("visible", "error"), 4000);
  }
}
