// Drawing surface: renders confirmed state plus the local in-progress stroke,
// handles pen/eraser/select pointer input, and keeps a selection rectangle.
//
// Local strokes are echoed immediately; the server's records rebuild the same
// stroke under its assigned id, so the echo is dropped on stroke_end. Placed
// images load asynchronously from the artifact endpoint and trigger a repaint
// when ready. jsdom has no 2d context; every paint call is guarded so the
// component stays fully drivable in tests.

import { SessionConnection } from "./connection";
import { normalizeRegion, Region, StrokeView } from "./protocol";
import { SessionState } from "./state";

export type Tool = "pen" | "eraser" | "select";

interface LocalStroke {
  points: Array<{ x: number; y: number; t_ms: number; pressure: number }>;
  width: number;
  color: [number, number, number, number];
  startedAt: number;
}

function cssColor([r, g, b, a]: [number, number, number, number]): string {
  return `rgba(${r},${g},${b},${a / 255})`;
}

export class CanvasView {
  readonly element: HTMLCanvasElement;
  tool: Tool = "pen";
  penWidth = 3;
  penColor: [number, number, number, number] = [20, 20, 20, 255];
  selection: Region | null = null;

  private state: SessionState;
  private connection: SessionConnection;
  private ctx: CanvasRenderingContext2D | null;
  private local: LocalStroke | null = null;
  private selectDrag: { x: number; y: number } | null = null;
  private erasing = false;
  private imageCache = new Map<string, HTMLImageElement>();

  constructor(state: SessionState, connection: SessionConnection,
              element: HTMLCanvasElement) {
    this.state = state;
    this.connection = connection;
    this.element = element;
    try {
      this.ctx = element.getContext("2d");
    } catch {
      this.ctx = null; // headless DOM without a canvas implementation
    }
    state.subscribe(() => this.repaint());

    element.addEventListener("pointerdown", (ev) => {
      const pos = this.toCanvas(ev);
      this.pointerDown(pos.x, pos.y, (ev as PointerEvent).pressure || 0.5);
    });
    element.addEventListener("pointermove", (ev) => {
      const pos = this.toCanvas(ev);
      this.pointerMove(pos.x, pos.y, (ev as PointerEvent).pressure || 0.5);
    });
    element.addEventListener("pointerup", () => this.pointerUp());
    element.addEventListener("pointerleave", () => this.pointerUp());
  }

  private toCanvas(ev: MouseEvent): { x: number; y: number } {
    const rect = this.element.getBoundingClientRect();
    const scaleX = rect.width > 0 ? this.element.width / rect.width : 1;
    const scaleY = rect.height > 0 ? this.element.height / rect.height : 1;
    return { x: (ev.clientX - rect.left) * scaleX, y: (ev.clientY - rect.top) * scaleY };
  }

  // -- pointer protocol (also the test entry points) --

  pointerDown(x: number, y: number, pressure = 0.5): void {
    if (!this.state.canvasInputEnabled()) return; // input blocked while chat open
    if (this.tool === "select") {
      this.selectDrag = { x, y };
      this.selection = [x, y, x, y];
      this.repaint();
      return;
    }
    if (this.tool === "eraser") {
      this.erasing = true;
      const hit = this.hitStroke(x, y);
      if (hit) this.connection.send("erase", { ids: [hit.id] });
      return;
    }
    this.local = {
      points: [{ x, y, t_ms: 0, pressure }],
      width: this.penWidth,
      color: this.penColor,
      startedAt: Date.now(),
    };
    this.connection.send("stroke_begin", {
      point: { x, y, t_ms: 0, pressure },
      width: this.penWidth,
      color: this.penColor,
    });
    this.repaint();
  }

  pointerMove(x: number, y: number, pressure = 0.5): void {
    if (this.selectDrag) {
      this.selection = [this.selectDrag.x, this.selectDrag.y, x, y];
      this.repaint();
      return;
    }
    if (this.erasing) {
      const hit = this.hitStroke(x, y);
      if (hit) this.connection.send("erase", { ids: [hit.id] });
      return;
    }
    if (!this.local) return;
    const t_ms = Date.now() - this.local.startedAt;
    this.local.points.push({ x, y, t_ms, pressure });
    this.connection.send("stroke_append", { point: { x, y, t_ms, pressure } });
    this.repaint();
  }

  pointerUp(): void {
    this.erasing = false;
    if (this.selectDrag) {
      this.selectDrag = null;
      if (this.selection) {
        const region = normalizeRegion(this.selection);
        if (region[2] - region[0] > 1 && region[3] - region[1] > 1) {
          this.connection.send("select_region", { region });
        } else {
          this.selection = null;
        }
      }
      this.repaint();
      return;
    }
    if (!this.local) return;
    this.local = null;
    this.connection.send("stroke_end", {});
  }

  clearSelection(): void {
    this.selection = null;
    this.repaint();
  }

  private hitStroke(x: number, y: number): StrokeView | null {
    // nearest visible stroke whose path passes within its half-width + slop
    for (let i = this.state.strokeOrder.length - 1; i >= 0; i--) {
      const stroke = this.state.strokes.get(this.state.strokeOrder[i])!;
      if (stroke.deleted) continue;
      const slop = stroke.width / 2 + 4;
      for (let j = 0; j < stroke.points.length; j++) {
        const a = stroke.points[j];
        const b = stroke.points[Math.min(j + 1, stroke.points.length - 1)];
        const dx = b.x - a.x;
        const dy = b.y - a.y;
        const len2 = dx * dx + dy * dy;
        let t = len2 > 0 ? ((x - a.x) * dx + (y - a.y) * dy) / len2 : 0;
        t = Math.max(0, Math.min(1, t));
        const cx = a.x + t * dx;
        const cy = a.y + t * dy;
        if ((x - cx) ** 2 + (y - cy) ** 2 <= slop * slop) return stroke;
      }
    }
    return null;
  }

  repaint(): void {
    const ctx = this.ctx;
    if (!ctx) return;
    ctx.fillStyle = "#ffffff";
    ctx.fillRect(0, 0, this.element.width, this.element.height);
    ctx.lineCap = "round";
    ctx.lineJoin = "round";

    for (const id of this.state.imageOrder) {
      const image = this.state.images.get(id)!;
      const el = this.artifactImage(image.artifactRef);
      if (el.complete && el.naturalWidth > 0) {
        ctx.drawImage(el, image.x, image.y, image.width, image.height);
      }
    }
    for (const id of this.state.strokeOrder) {
      const stroke = this.state.strokes.get(id)!;
      if (!stroke.deleted) this.paintPolyline(ctx, stroke.points, stroke.width, cssColor(stroke.color));
    }
    if (this.local) {
      this.paintPolyline(ctx, this.local.points, this.local.width, cssColor(this.local.color));
    }
    if (this.selection) {
      const [x0, y0, x1, y1] = normalizeRegion(this.selection);
      ctx.save();
      ctx.strokeStyle = "#2a6fdb";
      ctx.setLineDash([6, 4]);
      ctx.lineWidth = 1.5;
      ctx.strokeRect(x0, y0, x1 - x0, y1 - y0);
      ctx.restore();
    }
  }

  private paintPolyline(ctx: CanvasRenderingContext2D,
                        points: Array<{ x: number; y: number }>,
                        width: number, color: string): void {
    if (points.length === 0) return;
    ctx.strokeStyle = color;
    ctx.fillStyle = color;
    ctx.lineWidth = width;
    if (points.length === 1) {
      ctx.beginPath();
      ctx.arc(points[0].x, points[0].y, width / 2, 0, Math.PI * 2);
      ctx.fill();
      return;
    }
    ctx.beginPath();
    ctx.moveTo(points[0].x, points[0].y);
    for (let i = 1; i < points.length; i++) ctx.lineTo(points[i].x, points[i].y);
    ctx.stroke();
  }

  private artifactImage(artifactRef: string): HTMLImageElement {
    let el = this.imageCache.get(artifactRef);
    if (!el) {
      el = new Image();
      el.onload = () => this.repaint();
      el.src = this.connection.artifactUrl(artifactRef);
      this.imageCache.set(artifactRef, el);
    }
    return el;
  }
}
