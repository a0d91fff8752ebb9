/** Thin client for the frame service; every request carries a sequence number. */

import type { FaceCell, Kind, Mode } from "./state.js";

export interface SceneInfo {
  id: string;
  name: string;
  primitive_count: number;
}

export interface RenderParams {
  scene: string;
  head: { x: number; y: number; z: number };
  ipd: number;
  mode: Mode;
  kind: Kind;
  cube_res: number;
  canvas_scale: number;
}

export interface FrameResult {
  blob: Blob;
  passCount: number;
  renderMs: number;
}

export interface FacesResult {
  faces: FaceCell[];
  count: number;
}

export class ServiceClient {
  constructor(private readonly baseUrl: string = "") {}

  async scenes(): Promise<SceneInfo[]> {
    const response = await fetch(`${this.baseUrl}/scenes`);
    if (!response.ok) throw new Error(`GET /scenes failed: ${response.status}`);
    return (await response.json()) as SceneInfo[];
  }

  async render(params: RenderParams, signal?: AbortSignal): Promise<FrameResult> {
    const response = await fetch(`${this.baseUrl}/render`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ ...params, format: "png" }),
      signal,
    });
    if (!response.ok) throw new Error(`POST /render failed: ${response.status}`);
    return {
      blob: await response.blob(),
      passCount: Number(response.headers.get("X-Pass-Count") ?? -1),
      renderMs: Number(response.headers.get("X-Render-Ms") ?? -1),
    };
  }

  async faces(
    params: { head: { x: number; y: number; z: number }; ipd: number; canvas_scale: number },
    signal?: AbortSignal,
  ): Promise<FacesResult> {
    const response = await fetch(`${this.baseUrl}/faces`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(params),
      signal,
    });
    if (!response.ok) throw new Error(`POST /faces failed: ${response.status}`);
    return (await response.json()) as FacesResult;
  }
}
