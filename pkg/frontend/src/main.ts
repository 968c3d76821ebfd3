import { ApiClient } from "./api.js";
import { BoardView } from "./board.js";
import { StudyController } from "./study.js";
import type { Cell } from "./types.js";

const SESSION_KEY = "m3lab.session";

function baseUrl(): string {
  const configured = (window as never as { M3LAB_API?: string }).M3LAB_API;
  return configured ?? "";
}

function boot(): void {
  const root = document.body;
  const api = new ApiClient(baseUrl());
  const view = new BoardView(root, (a: Cell, b: Cell) => {
    void controller.attemptSwap(a, b);
  });
  const controller = new StudyController(api, view);

  const form = document.getElementById("start-form") as HTMLFormElement;
  const playArea = document.getElementById("play-area") as HTMLElement;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const label = (document.getElementById("participant") as HTMLInputElement).value;
    void controller.start(label).then(() => {
      if (controller.sessionId) {
        localStorage.setItem(SESSION_KEY, controller.sessionId);
        form.hidden = true;
        playArea.hidden = false;
      }
    });
  });

  // a reload resumes from the stored token; the server owns all state
  const existing = localStorage.getItem(SESSION_KEY);
  if (existing) {
    void controller.resume(existing).then(() => {
      if (controller.state) {
        form.hidden = true;
        if (!controller.state.session_complete) {
          playArea.hidden = false;
        }
      }
    });
  }

  document.addEventListener("pointerup", () => {
    // end drags that leave the board
  });
}

document.addEventListener("DOMContentLoaded", boot);
