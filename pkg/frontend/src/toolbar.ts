// Top toolbar: tools, undo/redo/reset, gallery save, Generate with AI, and
// the live recording indicator.

import { CanvasView, Tool } from "./canvasView";
import { SessionConnection } from "./connection";
import { SessionState } from "./state";

export class Toolbar {
  readonly element: HTMLElement;
  readonly indicator: HTMLElement;
  readonly generateButton: HTMLButtonElement;
  private buttons: HTMLButtonElement[] = [];
  private toolButtons = new Map<Tool, HTMLButtonElement>();

  constructor(state: SessionState, connection: SessionConnection, canvas: CanvasView,
              doc: Document) {
    this.element = doc.createElement("div");
    this.element.className = "toolbar";

    const addButton = (label: string, onClick: () => void, className = "") => {
      const button = doc.createElement("button");
      button.textContent = label;
      button.className = className;
      button.addEventListener("click", onClick);
      this.element.appendChild(button);
      this.buttons.push(button);
      return button;
    };

    for (const tool of ["pen", "eraser", "select"] as Tool[]) {
      const button = addButton(tool, () => {
        canvas.tool = tool;
        this.syncToolButtons(canvas);
      }, "tool");
      this.toolButtons.set(tool, button);
    }
    addButton("undo", () => connection.send("undo"));
    addButton("redo", () => connection.send("redo"));
    addButton("reset", () => connection.send("reset"));
    addButton("save to gallery", () => connection.send("save_gallery"));

    this.indicator = doc.createElement("span");
    this.indicator.className = "recording-dot";
    this.indicator.title = "recording";
    this.element.appendChild(this.indicator);

    this.generateButton = doc.createElement("button");
    this.generateButton.textContent = "Generate with AI";
    this.generateButton.className = "generate";
    this.generateButton.addEventListener("click", () => connection.send("open_chatbot"));
    this.element.appendChild(this.generateButton);

    this.syncToolButtons(canvas);
    state.subscribe(() => this.sync(state));
    this.sync(state);
  }

  private syncToolButtons(canvas: CanvasView): void {
    for (const [tool, button] of this.toolButtons) {
      button.classList.toggle("active", canvas.tool === tool);
    }
  }

  private sync(state: SessionState): void {
    this.indicator.classList.toggle("on", state.recordingActive);
    const blocked = !state.canvasInputEnabled();
    for (const button of this.buttons) button.disabled = blocked;
    this.generateButton.disabled = blocked;
  }
}
