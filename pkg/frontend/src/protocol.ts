// Wire protocol types and frame codecs (see ../PROTOCOL.md in the repo root).

export type Phase = "IDLE" | "SKETCHING_RECORDING" | "CHATBOT_OPEN";
export type ChatMode = "TEXT" | "IMAGE";
export type Region = [number, number, number, number];

export interface PointPayload {
  x: number;
  y: number;
  t_ms?: number;
  pressure?: number;
}

export interface ServerEvent {
  type: "event";
  seq: number;
  t_ms: number;
  kind: string;
  payload: Record<string, any>;
}

export interface Command {
  kind: string;
  payload: Record<string, unknown>;
}

export function encodeCommand(kind: string, payload: Record<string, unknown> = {}): string {
  return JSON.stringify({ kind, payload });
}

// Binary audio frame: 2-byte big-endian header length, JSON header, PCM16 bytes.
export function encodeAudioFrame(seq: number, samples: Int16Array): ArrayBuffer {
  const header = new TextEncoder().encode(JSON.stringify({ seq }));
  const buffer = new ArrayBuffer(2 + header.length + samples.length * 2);
  const view = new DataView(buffer);
  view.setUint16(0, header.length, false);
  new Uint8Array(buffer, 2, header.length).set(header);
  // PCM is little-endian on the wire
  for (let i = 0; i < samples.length; i++) {
    view.setInt16(2 + header.length + i * 2, samples[i], true);
  }
  return buffer;
}

export function parseServerMessage(data: string): ServerEvent | { type: "protocol_error"; message: string } | null {
  try {
    const parsed = JSON.parse(data);
    if (parsed && (parsed.type === "event" || parsed.type === "protocol_error")) {
      return parsed;
    }
    return null;
  } catch {
    return null;
  }
}

export interface TurnView {
  turnId: number;
  author: "USER" | "ASSISTANT" | "INSIGHT";
  mode: string;
  text: string;
  attachmentRefs: string[];
  imageRef: string | null;
  insightKind: string | null;
  answered: boolean;
}

export interface StrokeView {
  id: string;
  width: number;
  color: [number, number, number, number];
  points: PointPayload[];
  deleted: boolean;
}

export interface PlacedImageView {
  id: string;
  artifactRef: string;
  x: number;
  y: number;
  width: number;
  height: number;
}

export function normalizeRegion(region: Region): Region {
  const [x0, y0, x1, y1] = region;
  return [Math.min(x0, x1), Math.min(y0, y1), Math.max(x0, x1), Math.max(y0, y1)];
}

export function regionHasArea(region: Region): boolean {
  const [x0, y0, x1, y1] = normalizeRegion(region);
  return x1 - x0 > 0 && y1 - y0 > 0;
}
