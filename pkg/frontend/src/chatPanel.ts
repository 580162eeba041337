// Dual-mode chat panel: mode toggle, prompt entry (typed or dictated),
// sketch-region attachment, image results with import-to-canvas, and a retry
// affordance on unanswered turns.

import { CanvasView } from "./canvasView";
import { SessionConnection } from "./connection";
import { ChatMode, TurnView } from "./protocol";
import { SessionState } from "./state";

const DEFAULT_IMPORT_SIZE = 0.3; // fraction of the canvas for un-targeted imports

export class ChatPanel {
  readonly element: HTMLElement;
  readonly messages: HTMLElement;
  readonly input: HTMLTextAreaElement;
  readonly sendButton: HTMLButtonElement;
  readonly modeButtons: Record<ChatMode, HTMLButtonElement>;
  readonly attachButton: HTMLButtonElement;
  readonly closeButton: HTMLButtonElement;
  readonly dictateButton: HTMLButtonElement | null = null;
  mode: ChatMode = "TEXT";
  attachSelection = false;

  private state: SessionState;
  private connection: SessionConnection;
  private canvas: CanvasView;
  private doc: Document;
  private renderedTurns = -1;

  constructor(state: SessionState, connection: SessionConnection, canvas: CanvasView,
              doc: Document) {
    this.state = state;
    this.connection = connection;
    this.canvas = canvas;
    this.doc = doc;

    this.element = doc.createElement("section");
    this.element.className = "chat-panel";

    const header = doc.createElement("div");
    header.className = "chat-header";
    const title = doc.createElement("h2");
    title.textContent = "Multimodal Chat";
    header.appendChild(title);
    this.closeButton = doc.createElement("button");
    this.closeButton.textContent = "Back to canvas";
    this.closeButton.className = "close-chat";
    this.closeButton.addEventListener("click", () => connection.send("close_chatbot"));
    header.appendChild(this.closeButton);
    this.element.appendChild(header);

    this.messages = doc.createElement("div");
    this.messages.className = "chat-messages";
    this.element.appendChild(this.messages);

    const controls = doc.createElement("div");
    controls.className = "chat-controls";

    this.modeButtons = {} as Record<ChatMode, HTMLButtonElement>;
    for (const mode of ["TEXT", "IMAGE"] as ChatMode[]) {
      const button = doc.createElement("button");
      button.textContent = mode === "TEXT" ? "Text mode" : "Image mode";
      button.className = `mode-toggle mode-${mode.toLowerCase()}`;
      button.addEventListener("click", () => this.setMode(mode));
      controls.appendChild(button);
      this.modeButtons[mode] = button;
    }

    this.attachButton = doc.createElement("button");
    this.attachButton.className = "attach";
    this.attachButton.addEventListener("click", () => {
      this.attachSelection = !this.attachSelection;
      this.syncControls();
    });
    controls.appendChild(this.attachButton);

    this.input = doc.createElement("textarea");
    this.input.className = "chat-input";
    this.input.placeholder = "Ask for ideas, or switch to image mode…";
    controls.appendChild(this.input);

    const SpeechRecognitionImpl =
      (globalThis as any).SpeechRecognition ?? (globalThis as any).webkitSpeechRecognition;
    if (SpeechRecognitionImpl) {
      // dictation is a client nicety: recognized text submits as plain text
      const dictate = doc.createElement("button");
      dictate.textContent = "\u{1F399} dictate";
      dictate.className = "dictate";
      dictate.addEventListener("click", () => {
        const recognition = new SpeechRecognitionImpl();
        recognition.onresult = (ev: any) => {
          this.input.value = ev.results[0][0].transcript;
          this.submit();
        };
        recognition.start();
      });
      controls.appendChild(dictate);
      (this as { dictateButton: HTMLButtonElement | null }).dictateButton = dictate;
    }

    this.sendButton = doc.createElement("button");
    this.sendButton.textContent = "Send";
    this.sendButton.className = "send";
    this.sendButton.addEventListener("click", () => this.submit());
    controls.appendChild(this.sendButton);

    this.element.appendChild(controls);
    state.subscribe(() => this.sync());
    this.sync();
    this.syncControls();
  }

  setMode(mode: ChatMode): void {
    this.mode = mode;
    this.syncControls();
  }

  submit(): void {
    const text = this.input.value.trim();
    const payload: Record<string, unknown> = { mode: this.mode, text };
    if (this.attachSelection && this.canvas.selection) {
      payload.attachment = this.canvas.selection;
    }
    this.connection.send("chat_submit", payload);
    this.input.value = "";
    this.attachSelection = false;
    this.syncControls();
  }

  importRegionFor(): [number, number, number, number] {
    // drop imports into the selected region when there is one, otherwise
    // into a block in the lower-right quarter of the canvas
    if (this.canvas.selection) return this.canvas.selection;
    const w = this.connection.canvasWidth;
    const h = this.connection.canvasHeight;
    return [w * (1 - DEFAULT_IMPORT_SIZE - 0.05), h * (1 - DEFAULT_IMPORT_SIZE - 0.05),
            w * 0.95, h * 0.95];
  }

  private syncControls(): void {
    this.modeButtons.TEXT.classList.toggle("active", this.mode === "TEXT");
    this.modeButtons.IMAGE.classList.toggle("active", this.mode === "IMAGE");
    const hasSelection = this.canvas.selection !== null;
    this.attachButton.disabled = !hasSelection;
    this.attachButton.textContent = this.attachSelection
      ? "✂ attaching selection"
      : hasSelection ? "✂ attach selection" : "✂ no selection";
    this.attachButton.classList.toggle("active", this.attachSelection);
  }

  private sync(): void {
    this.element.classList.toggle("hidden", this.state.phase !== "CHATBOT_OPEN");
    this.syncControls(); // the canvas selection may have changed
    if (this.state.turns.length !== this.renderedTurns) {
      this.renderedTurns = this.state.turns.length;
      this.renderMessages();
    }
  }

  private renderMessages(): void {
    this.messages.textContent = "";
    for (const turn of this.state.turns) {
      this.messages.appendChild(this.renderTurn(turn));
    }
    this.messages.scrollTop = this.messages.scrollHeight;
  }

  private renderTurn(turn: TurnView): HTMLElement {
    const doc = this.doc;
    const bubble = doc.createElement("div");
    bubble.className = `turn turn-${turn.author.toLowerCase()}`;
    bubble.dataset.turnId = String(turn.turnId);

    if (turn.author === "INSIGHT") {
      const tag = doc.createElement("span");
      tag.className = "insight-tag";
      tag.textContent = turn.insightKind === "KICKOFF" ? "kickoff insight" : "refine insight";
      bubble.appendChild(tag);
    }

    const text = doc.createElement("p");
    text.textContent = turn.text;
    bubble.appendChild(text);

    if (turn.imageRef) {
      const img = doc.createElement("img");
      img.src = this.connection.artifactUrl(turn.imageRef);
      img.className = "chat-image";
      bubble.appendChild(img);

      const importButton = doc.createElement("button");
      importButton.textContent = "Import to canvas";
      importButton.className = "import-image";
      importButton.addEventListener("click", () => {
        this.connection.send("export_image", {
          artifact_id: turn.imageRef,
          region: this.importRegionFor(),
        });
      });
      bubble.appendChild(importButton);
    }

    if (turn.author === "USER" && !turn.answered) {
      const note = doc.createElement("span");
      note.className = "unanswered";
      note.textContent = "no answer — ";
      const retry = doc.createElement("button");
      retry.textContent = "retry";
      retry.className = "retry";
      retry.addEventListener("click", () =>
        this.connection.send("chat_submit", { retry_of: turn.turnId }));
      note.appendChild(retry);
      bubble.appendChild(note);
    }
    return bubble;
  }
}
