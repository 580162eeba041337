// @vitest-environment jsdom
//
// UI smoke run against the real mock-backed Python server: draw a stroke
// (indicator turns on), Generate with AI (indicator off, insight appears),
// edit the transcript (insight refreshes), submit one IMAGE prompt, import
// the result (image lands on the canvas). The app runs in jsdom with a real
// WebSocket (ws) and real fetch against the spawned server process.

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WsWebSocket from "ws";

import { App, createApp } from "../src/app";
import { WebSocketLike } from "../src/connection";

const PORT = 8900 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let app: App;

async function waitFor(check: () => boolean, what: string, timeoutMs = 8000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (check()) return;
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
  throw new Error(`timed out waiting for ${what}`);
}

beforeAll(async () => {
  server = spawn("sketchloop", ["serve", "--port", String(PORT)], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  const deadline = Date.now() + 20000;
  for (;;) {
    try {
      const res = await fetch(`${BASE}/healthz`);
      if (res.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("server did not come up");
    await new Promise((resolve) => setTimeout(resolve, 200));
  }

  const root = document.getElementById("root") ?? document.createElement("div");
  root.id = "root";
  document.body.appendChild(root);
  app = await createApp(root, {
    baseUrl: BASE,
    webSocketFactory: (url) => new WsWebSocket(url) as unknown as WebSocketLike,
    fetchImpl: fetch.bind(globalThis),
    microphone: false, // jsdom has no audio stack
  });
}, 30000);

afterAll(() => {
  app?.connection.close();
  server?.kill();
});

describe("UI smoke against the live server", () => {
  it("drawing a stroke turns the recording indicator on", async () => {
    app.canvas.pointerDown(100, 100, 0.7);
    app.canvas.pointerMove(300, 120, 0.8);
    app.canvas.pointerMove(500, 150, 0.6);
    app.canvas.pointerUp();
    await waitFor(() => app.state.recordingActive, "recording to start");
    expect(app.toolbar.indicator.classList.contains("on")).toBe(true);
    await waitFor(() => app.state.strokeOrder.length === 1, "stroke confirmation");
    expect(app.state.strokes.get(app.state.strokeOrder[0])?.points.length).toBe(3);
  });

  it("Generate with AI stops recording and shows an insight", async () => {
    app.toolbar.generateButton.click();
    await waitFor(() => app.state.phase === "CHATBOT_OPEN", "chatbot to open");
    expect(app.state.recordingActive).toBe(false);
    expect(app.toolbar.indicator.classList.contains("on")).toBe(false);
    await waitFor(() => app.state.insight.text.length > 0, "insight text");
    expect(app.insightPanel.element.classList.contains("hidden")).toBe(false);
    expect(app.insightPanel.insightText.textContent).toBe(app.state.insight.text);
    expect(app.state.insight.kind).toBe("KICKOFF");
  });

  it("canvas input is blocked while the chatbot is open", async () => {
    const strokesBefore = app.state.strokeOrder.length;
    app.canvas.pointerDown(50, 50);
    app.canvas.pointerUp();
    await new Promise((resolve) => setTimeout(resolve, 300));
    expect(app.state.strokeOrder.length).toBe(strokesBefore);
    expect(app.toolbar.generateButton.disabled).toBe(true);
  });

  it("editing the transcript refreshes the insight", async () => {
    const before = app.state.insight.text;
    app.insightPanel.transcriptEditor.value = "a bold square toaster with a retractable cord";
    app.insightPanel.updateButton.click();
    await waitFor(
      () => app.state.insight.text.length > 0 && app.state.insight.text !== before,
      "refreshed insight",
    );
    expect(app.state.insight.kind).toBe("REFINE");
    expect(app.state.transcriptText()).toBe("a bold square toaster with a retractable cord");
    expect(app.insightPanel.transcriptEditor.value).toBe(
      "a bold square toaster with a retractable cord",
    );
  });

  it("an IMAGE prompt returns an image bubble", async () => {
    app.chatPanel.modeButtons.IMAGE.click();
    app.chatPanel.input.value = "Could you generate a realistic product based on my sketch?";
    app.chatPanel.sendButton.click();
    await waitFor(
      () => app.state.turns.some((t) => t.author === "ASSISTANT" && t.imageRef !== null),
      "assistant image turn",
    );
    const answer = app.state.turns.find(
      (t) => t.author === "ASSISTANT" && t.imageRef !== null,
    )!;
    expect(answer.text.length).toBeGreaterThan(0);
    const bubble = app.chatPanel.messages.querySelector(
      `[data-turn-id="${answer.turnId}"]`,
    )!;
    expect(bubble.querySelector("img")).not.toBeNull();
    const response = await fetch(`${BASE}/sessions/${app.connection.sessionId}/artifacts/${answer.imageRef}.png`);
    expect(response.status).toBe(200);
  });

  it("importing the result places the image on the canvas", async () => {
    const importButton = app.chatPanel.messages.querySelector(
      ".import-image",
    ) as HTMLButtonElement;
    expect(importButton).not.toBeNull();
    importButton.click();
    await waitFor(() => app.state.imageOrder.length === 1, "placed image");
    // the server agrees: its snapshot has exactly one placed image
    const snapshot = await (
      await fetch(`${BASE}/sessions/${app.connection.sessionId}/snapshot`)
    ).json();
    const placed = snapshot.canvas.elements.filter((e: any) => e.kind === "image");
    expect(placed).toHaveLength(1);
  });

  it("closing the chatbot returns to the canvas and sketching resumes recording", async () => {
    app.chatPanel.closeButton.click();
    await waitFor(() => app.state.phase === "IDLE", "chatbot to close");
    app.canvas.pointerDown(200, 400);
    app.canvas.pointerMove(240, 420);
    app.canvas.pointerUp();
    await waitFor(() => app.state.recordingActive, "recording to resume");
    expect(app.toolbar.indicator.classList.contains("on")).toBe(true);
  });
});
