/** Top-down schematic: the screen arc, the valid head region, and the
 * draggable head marker. World x maps right, world z maps up. */

import { type Screen, validRadius } from "./state.js";

export class Schematic {
  onHeadMove: (x: number, z: number, dragging: boolean) => void = () => {};
  private head = { x: 0, z: 0 };
  private dragging = false;
  private readonly scalePx: number;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly screen: Screen,
    private ipd: number,
  ) {
    this.scalePx = Math.min(canvas.width, canvas.height) / (2 * screen.radius * 1.15);
    canvas.addEventListener("pointerdown", (e) => this.pointer(e, "down"));
    canvas.addEventListener("pointermove", (e) => this.pointer(e, "move"));
    canvas.addEventListener("pointerup", (e) => this.pointer(e, "up"));
    canvas.addEventListener("pointercancel", () => (this.dragging = false));
    this.draw();
  }

  setHead(x: number, z: number): void {
    this.head = { x, z };
    this.draw();
  }

  setIpd(ipd: number): void {
    this.ipd = ipd;
    this.draw();
  }

  private toWorld(e: PointerEvent): { x: number; z: number } {
    const rect = this.canvas.getBoundingClientRect();
    const px = e.clientX - rect.left - rect.width / 2;
    const py = e.clientY - rect.top - rect.height / 2;
    return { x: px / this.scalePx, z: -py / this.scalePx };
  }

  private pointer(e: PointerEvent, phase: "down" | "move" | "up"): void {
    if (phase === "down") {
      this.dragging = true;
      this.canvas.setPointerCapture(e.pointerId);
    }
    if (!this.dragging) return;
    const { x, z } = this.toWorld(e);
    if (phase === "up") {
      this.dragging = false;
      this.canvas.releasePointerCapture(e.pointerId);
      this.onHeadMove(x, z, false);
    } else {
      this.onHeadMove(x, z, true);
    }
  }

  draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.canvas;
    const cx = width / 2;
    const cy = height / 2;
    const r = this.screen.radius * this.scalePx;
    ctx.clearRect(0, 0, width, height);

    // canvas angles: 0 = +x axis, counterclockwise in world (flipped y);
    // world azimuth 0 (north, +z) is "up" = -y on the canvas
    const half = (this.screen.arcDeg / 2) * (Math.PI / 180);
    ctx.beginPath();
    ctx.arc(cx, cy, r, -Math.PI / 2 - half, -Math.PI / 2 + half);
    ctx.strokeStyle = "#58a6ff";
    ctx.lineWidth = 4;
    ctx.stroke();

    ctx.beginPath();
    ctx.arc(cx, cy, validRadius(this.screen, this.ipd) * this.scalePx, 0, 2 * Math.PI);
    ctx.strokeStyle = "#30363d";
    ctx.lineWidth = 1;
    ctx.setLineDash([4, 4]);
    ctx.stroke();
    ctx.setLineDash([]);

    const hx = cx + this.head.x * this.scalePx;
    const hy = cy - this.head.z * this.scalePx;
    ctx.beginPath();
    ctx.arc(hx, hy, 6, 0, 2 * Math.PI);
    ctx.fillStyle = "#f0883e";
    ctx.fill();

    ctx.fillStyle = "#8b949e";
    ctx.font = "11px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText("N", cx, cy - r - 8);
    ctx.fillText("S", cx, cy + r + 14);
    ctx.fillText("E", cx + r + 10, cy + 4);
    ctx.fillText("W", cx - r - 10, cy + 4);
  }
}
