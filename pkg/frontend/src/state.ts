// Client-side session state, built by applying the server's event records.
//
// The store mirrors the server's rules rather than inventing its own: the
// recording indicator follows phase_changed, superseded insight responses are
// dropped by id just like the server drops them, and canvas mutations the
// client cannot derive incrementally (undo/redo/reset/load_gallery) raise a
// needsSnapshot flag so the app reconciles from GET /snapshot.

import {
  Phase,
  PlacedImageView,
  ServerEvent,
  StrokeView,
  TurnView,
} from "./protocol";

export interface TranscriptSegmentView {
  segmentId: string;
  text: string;
  status: "INTERIM" | "FINAL";
}

export interface InsightView {
  kind: string;
  text: string;
  pending: boolean;
  error: string | null;
}

export type StateListener = (state: SessionState) => void;

export class SessionState {
  phase: Phase = "IDLE";
  recordingActive = false;
  connected = false;

  strokes = new Map<string, StrokeView>();
  strokeOrder: string[] = [];
  images = new Map<string, PlacedImageView>();
  imageOrder: string[] = [];
  pendingStrokeId: string | null = null;

  transcriptSegments: TranscriptSegmentView[] = [];
  transcriptEdited = false;

  insight: InsightView = { kind: "", text: "", pending: false, error: null };
  private pendingInsightId: string | null = null;

  turns: TurnView[] = [];
  galleryStale = false;
  needsSnapshot = false;
  lastError: { code: string; message: string } | null = null;
  lastSeq = -1;

  private listeners: StateListener[] = [];

  subscribe(listener: StateListener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  notify(): void {
    for (const listener of this.listeners) listener(this);
  }

  transcriptText(): string {
    return this.transcriptSegments
      .map((s) => s.text)
      .filter((t) => t.length > 0)
      .join(" ");
  }

  elementsInOrder(): Array<StrokeView | PlacedImageView> {
    const out: Array<StrokeView | PlacedImageView> = [];
    for (const id of this.strokeOrder) out.push(this.strokes.get(id)!);
    for (const id of this.imageOrder) out.push(this.images.get(id)!);
    return out;
  }

  canvasInputEnabled(): boolean {
    return this.phase !== "CHATBOT_OPEN";
  }

  apply(event: ServerEvent): void {
    this.lastSeq = event.seq;
    const p = event.payload;
    switch (event.kind) {
      case "phase_changed":
        this.phase = p.phase;
        this.recordingActive = p.recording_active;
        break;
      case "stroke_begin":
        this.strokes.set(p.id, {
          id: p.id,
          width: p.width,
          color: p.color,
          points: [p.point],
          deleted: false,
        });
        this.strokeOrder.push(p.id);
        this.pendingStrokeId = p.id;
        break;
      case "stroke_append":
        if (this.pendingStrokeId) {
          this.strokes.get(this.pendingStrokeId)?.points.push(p.point);
        }
        break;
      case "stroke_end":
        this.pendingStrokeId = null;
        break;
      case "erase":
        for (const id of p.ids as string[]) {
          const stroke = this.strokes.get(id);
          if (stroke) stroke.deleted = true;
        }
        break;
      case "undo":
      case "redo":
      case "reset":
      case "load_gallery":
        // not derivable incrementally on the client; reconcile from snapshot
        this.needsSnapshot = true;
        if (event.kind === "reset" || event.kind === "load_gallery") {
          this.pendingStrokeId = null;
        }
        break;
      case "save_gallery":
        this.galleryStale = true;
        break;
      case "transcript_event": {
        const existing = this.transcriptSegments.find(
          (s) => s.segmentId === p.segment_id,
        );
        if (existing) {
          if (existing.status !== "FINAL") {
            existing.text = p.text;
            existing.status = p.status;
          }
        } else {
          this.transcriptSegments.push({
            segmentId: p.segment_id,
            text: p.text,
            status: p.status,
          });
        }
        break;
      }
      case "edit_transcript":
        this.transcriptSegments = [
          { segmentId: "user-edit", text: p.text, status: "FINAL" },
        ];
        this.transcriptEdited = true;
        break;
      case "insight_request":
        this.pendingInsightId = p.insight_id;
        this.insight = { ...this.insight, pending: true, error: null };
        break;
      case "insight_response":
        if (p.insight_id !== this.pendingInsightId) break; // superseded
        this.pendingInsightId = null;
        this.insight = { kind: p.kind, text: p.text, pending: false, error: null };
        this.turns.push({
          turnId: this.turns.length,
          author: "INSIGHT",
          mode: "INSIGHT",
          text: p.text,
          attachmentRefs: [],
          imageRef: null,
          insightKind: p.kind,
          answered: true,
        });
        break;
      case "chat_submit":
        if (p.retry_of === null || p.retry_of === undefined) {
          this.turns.push({
            turnId: p.turn_id,
            author: "USER",
            mode: p.mode,
            text: p.text,
            attachmentRefs: [],
            imageRef: null,
            insightKind: null,
            answered: false,
          });
        }
        break;
      case "chat_response": {
        const user = this.turns.find((t) => t.turnId === p.turn_id);
        if (user) user.answered = true;
        this.turns.push({
          turnId: this.turns.length,
          author: "ASSISTANT",
          mode: p.mode,
          text: p.text,
          attachmentRefs: [],
          imageRef: p.image ? p.image.blob : null,
          insightKind: null,
          answered: true,
        });
        break;
      }
      case "export_image": {
        const [x0, y0, x1, y1] = p.region as number[];
        const id = `local-${this.imageOrder.length}-${p.artifact_id.slice(0, 8)}`;
        this.images.set(id, {
          id,
          artifactRef: p.artifact_id,
          x: x0,
          y: y0,
          width: x1 - x0,
          height: y1 - y0,
        });
        this.imageOrder.push(id);
        break;
      }
      case "error":
        this.lastError = { code: p.code, message: p.message };
        if (p.op === "insight" && p.insight_id === this.pendingInsightId) {
          this.pendingInsightId = null;
          this.insight = { ...this.insight, pending: false, error: p.code };
        }
        if (p.op === "chat") {
          const user = this.turns.find((t) => t.turnId === p.turn_id);
          if (user) user.answered = false;
        }
        break;
      default:
        break; // session_start, open/close_chatbot, audio_chunk, select_region
    }
    this.notify();
  }

  // Reconciliation from GET /sessions/{id}/snapshot.
  loadSnapshot(snapshot: any): void {
    this.needsSnapshot = false;
    this.phase = snapshot.phase;
    this.recordingActive = snapshot.recording_active;
    this.strokes.clear();
    this.strokeOrder = [];
    this.images.clear();
    this.imageOrder = [];
    for (const el of snapshot.canvas.elements) {
      if (el.kind === "stroke") {
        this.strokes.set(el.id, {
          id: el.id,
          width: el.width,
          color: el.color,
          points: el.points.map((pt: number[]) => ({
            x: pt[0],
            y: pt[1],
            t_ms: pt[2],
            pressure: pt[3],
          })),
          deleted: el.deleted,
        });
        this.strokeOrder.push(el.id);
      } else if (el.kind === "image") {
        this.images.set(el.id, {
          id: el.id,
          artifactRef: el.artifact_ref,
          x: el.x,
          y: el.y,
          width: el.width,
          height: el.height,
        });
        this.imageOrder.push(el.id);
      }
    }
    const unanswered = new Set<number>(snapshot.pending?.unanswered_turns ?? []);
    this.turns = snapshot.history.map((t: any) => ({
      turnId: t.turn_id,
      author: t.author,
      mode: t.mode,
      text: t.text,
      attachmentRefs: t.attachment_refs,
      imageRef: t.image_ref,
      insightKind: t.insight_kind,
      answered: !unanswered.has(t.turn_id),
    }));
    this.transcriptSegments = snapshot.transcript.segments.map((s: any) => ({
      segmentId: s.segment_id,
      text: s.text,
      status: s.status,
    }));
    this.transcriptEdited = snapshot.transcript.edited;
    if (snapshot.insight_panel && !snapshot.insight_panel.error) {
      this.insight = {
        kind: snapshot.insight_panel.kind,
        text: snapshot.insight_panel.text,
        pending: false,
        error: null,
      };
    }
    this.notify();
  }
}
