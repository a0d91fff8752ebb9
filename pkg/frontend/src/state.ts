/** Viewer state and the pure geometry/sequencing rules the UI relies on. */

export type Mode = "scs" | "stitch" | "oracle" | "diff";
export type Kind = "anaglyph" | "left" | "right" | "sbs";

export interface FaceCell {
  cubemap: string;
  face: string;
}

export interface Screen {
  radius: number;
  height: number;
  arcDeg: number;
}

export const DEFAULT_SCREEN: Screen = { radius: 3.0, height: 2.3, arcDeg: 270 };
export const DEFAULT_IPD = 0.064;
export const HEAD_MARGIN = 0.01;
/** Low-resolution preset used while dragging. */
export const DRAG_SCALE = 0.1;
export const SCALE_PRESETS = [0.1, 0.2, 0.5, 1.0] as const;

export interface ViewerState {
  scene: string;
  head: { x: number; z: number; height: number };
  ipd: number;
  mode: Mode;
  kind: Kind;
  /** Resolution preset applied to settled (non-drag) frames. */
  scale: number;
  /** Sequence number of the displayed frame; never decreases. */
  frameSeq: number;
  passCount: number | null;
  renderMs: number | null;
  facesSeq: number;
  faces: FaceCell[] | null;
  faceCount: number | null;
  error: string | null;
}

export function initialState(): ViewerState {
  return {
    scene: "depth-rings",
    head: { x: 0, z: 0, height: DEFAULT_SCREEN.height / 2 },
    ipd: DEFAULT_IPD,
    mode: "scs",
    kind: "anaglyph",
    scale: 0.2,
    frameSeq: 0,
    passCount: null,
    renderMs: null,
    facesSeq: 0,
    faces: null,
    faceCount: null,
    error: null,
  };
}

/** Largest horizontal head distance from the axis the service accepts. */
export function validRadius(screen: Screen, ipd: number): number {
  return screen.radius - ipd / 2 - HEAD_MARGIN;
}

/** Clamp a horizontal position into the valid head region. */
export function clampHead(
  x: number,
  z: number,
  screen: Screen,
  ipd: number,
): { x: number; z: number } {
  const limit = validRadius(screen, ipd);
  const r = Math.hypot(x, z);
  if (r <= limit || r === 0) return { x, z };
  const k = limit / r;
  return { x: x * k, z: z * k };
}

export function clampHeight(height: number, screen: Screen): number {
  return Math.min(Math.max(height, 0), screen.height);
}

/**
 * Apply a rendered frame if it is newer than the displayed one.
 * Returns false for stale frames, which the caller must drop.
 */
export function acceptFrame(
  state: ViewerState,
  seq: number,
  passCount: number,
  renderMs: number,
): boolean {
  if (seq <= state.frameSeq) return false;
  state.frameSeq = seq;
  state.passCount = passCount;
  state.renderMs = renderMs;
  state.error = null;
  return true;
}

/** Same monotone-sequence rule for /faces responses. */
export function acceptFaces(
  state: ViewerState,
  seq: number,
  faces: FaceCell[],
  count: number,
): boolean {
  if (seq <= state.facesSeq) return false;
  state.facesSeq = seq;
  state.faces = faces;
  state.faceCount = count;
  return true;
}
