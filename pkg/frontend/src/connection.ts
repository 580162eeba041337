// Session transport: REST session creation plus the per-session WebSocket.
// WebSocket and fetch implementations are injectable so tests can run under
// node (ws + global fetch) against a real server.

import { encodeAudioFrame, encodeCommand, parseServerMessage, ServerEvent } from "./protocol";
import { SessionState } from "./state";

export interface WebSocketLike {
  send(data: string | ArrayBuffer): void;
  close(): void;
  binaryType: string;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
}

export interface ConnectionOptions {
  baseUrl?: string; // default: same origin
  token?: string;
  webSocketFactory?: (url: string) => WebSocketLike;
  fetchImpl?: typeof fetch;
}

export class SessionConnection {
  sessionId = "";
  canvasWidth = 1024;
  canvasHeight = 768;
  readonly state: SessionState;

  private baseUrl: string;
  private token?: string;
  private makeSocket: (url: string) => WebSocketLike;
  private doFetch: typeof fetch;
  private socket: WebSocketLike | null = null;

  constructor(state: SessionState, options: ConnectionOptions = {}) {
    this.state = state;
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.token = options.token;
    this.makeSocket =
      options.webSocketFactory ??
      ((url) => new WebSocket(url) as unknown as WebSocketLike);
    this.doFetch = options.fetchImpl ?? fetch.bind(globalThis);
  }

  private headers(): Record<string, string> {
    return this.token ? { "x-api-token": this.token } : {};
  }

  async open(): Promise<void> {
    const response = await this.doFetch(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: this.headers(),
    });
    if (!response.ok) throw new Error(`session create failed: ${response.status}`);
    const body = await response.json();
    this.sessionId = body.session_id;
    this.canvasWidth = body.canvas_width;
    this.canvasHeight = body.canvas_height;

    const wsBase = this.baseUrl
      ? this.baseUrl.replace(/^http/, "ws")
      : `${location.protocol === "https:" ? "wss:" : "ws:"}//${location.host}`;
    const tokenQuery = this.token ? `?token=${encodeURIComponent(this.token)}` : "";
    const socket = this.makeSocket(`${wsBase}/sessions/${this.sessionId}/ws${tokenQuery}`);
    socket.binaryType = "arraybuffer";
    this.socket = socket;

    await new Promise<void>((resolve, reject) => {
      socket.onopen = () => resolve();
      socket.onerror = (ev) => reject(new Error(`websocket error: ${ev}`));
    });
    this.state.connected = true;
    this.state.notify();

    socket.onmessage = (ev) => {
      if (typeof ev.data !== "string") return;
      const message = parseServerMessage(ev.data);
      if (message && message.type === "event") {
        this.state.apply(message as ServerEvent);
      }
    };
    socket.onclose = () => {
      this.state.connected = false;
      this.state.notify();
    };
    socket.onerror = null;
  }

  send(kind: string, payload: Record<string, unknown> = {}): void {
    this.socket?.send(encodeCommand(kind, payload));
  }

  sendAudio(seq: number, samples: Int16Array): void {
    this.socket?.send(encodeAudioFrame(seq, samples));
  }

  async fetchSnapshot(): Promise<void> {
    const response = await this.doFetch(
      `${this.baseUrl}/sessions/${this.sessionId}/snapshot`,
      { headers: this.headers() },
    );
    if (response.ok) this.state.loadSnapshot(await response.json());
  }

  async fetchGallery(): Promise<any> {
    const response = await this.doFetch(
      `${this.baseUrl}/sessions/${this.sessionId}/gallery`,
      { headers: this.headers() },
    );
    return response.ok ? response.json() : { entries: [] };
  }

  artifactUrl(artifactId: string): string {
    return `${this.baseUrl}/sessions/${this.sessionId}/artifacts/${artifactId}.png`;
  }

  close(): void {
    this.socket?.close();
  }
}
