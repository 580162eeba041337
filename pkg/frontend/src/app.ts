// Application wiring: one session, one canvas, toolbar, insight + chat
// panels, microphone lifecycle, snapshot reconciliation, disconnect banner.

import { MicrophoneCapture } from "./audio";
import { CanvasView } from "./canvasView";
import { ConnectionOptions, SessionConnection } from "./connection";
import { ChatPanel } from "./chatPanel";
import { InsightPanel } from "./insightPanel";
import { SessionState } from "./state";
import { Toolbar } from "./toolbar";

export interface AppOptions extends ConnectionOptions {
  document?: Document;
  microphone?: boolean; // default: on in browsers, off when unavailable
}

export class App {
  readonly state: SessionState;
  readonly connection: SessionConnection;
  readonly canvas: CanvasView;
  readonly toolbar: Toolbar;
  readonly insightPanel: InsightPanel;
  readonly chatPanel: ChatPanel;
  readonly banner: HTMLElement;
  readonly microphone: MicrophoneCapture | null;

  constructor(root: HTMLElement, options: AppOptions = {}) {
    const doc = options.document ?? root.ownerDocument;
    this.state = new SessionState();
    this.connection = new SessionConnection(this.state, options);

    this.banner = doc.createElement("div");
    this.banner.className = "banner hidden";
    this.banner.textContent = "connection lost — reload to continue";
    root.appendChild(this.banner);

    const canvasEl = doc.createElement("canvas");
    canvasEl.className = "sketch-canvas";
    this.canvas = new CanvasView(this.state, this.connection, canvasEl);
    this.toolbar = new Toolbar(this.state, this.connection, this.canvas, doc);
    this.insightPanel = new InsightPanel(this.state, this.connection, doc);
    this.chatPanel = new ChatPanel(this.state, this.connection, this.canvas, doc);

    root.appendChild(this.toolbar.element);
    const main = doc.createElement("div");
    main.className = "main-area";
    main.appendChild(canvasEl);
    const side = doc.createElement("div");
    side.className = "side-area";
    side.appendChild(this.insightPanel.element);
    side.appendChild(this.chatPanel.element);
    main.appendChild(side);
    root.appendChild(main);

    const wantMic = options.microphone ?? true;
    this.microphone = wantMic ? new MicrophoneCapture(this.connection) : null;

    this.state.subscribe(() => this.onStateChange());
  }

  async start(): Promise<void> {
    await this.connection.open();
    this.canvas.element.width = this.connection.canvasWidth;
    this.canvas.element.height = this.connection.canvasHeight;
    this.canvas.repaint();
  }

  private onStateChange(): void {
    this.banner.classList.toggle("hidden", this.state.connected);
    if (this.microphone) {
      if (this.state.recordingActive && !this.microphone.running) {
        void this.microphone.start();
      } else if (!this.state.recordingActive && this.microphone.running) {
        this.microphone.stop();
      }
      const code = this.state.lastError?.code;
      if (code === "gap_in_sequence" || code === "stream_broken") {
        this.microphone.resetSequence();
        this.state.lastError = null;
      }
    }
    if (this.state.needsSnapshot) {
      this.state.needsSnapshot = false;
      void this.connection.fetchSnapshot();
    }
  }
}

export async function createApp(root: HTMLElement, options: AppOptions = {}): Promise<App> {
  const app = new App(root, options);
  await app.start();
  return app;
}
