/** Orchestrates head moves into debounced service calls with stale-frame rejection.
 *
 * Every refresh takes a fresh sequence number and cancels the in-flight
 * request; responses apply only if newer than what is displayed, so the UI
 * can never travel back in time no matter how responses interleave.
 */

import { ServiceClient } from "./api.js";
import { debounce, type Debounced } from "./debounce.js";
import {
  DEFAULT_SCREEN,
  DRAG_SCALE,
  type FaceCell,
  type Kind,
  type Mode,
  type Screen,
  type ViewerState,
  acceptFaces,
  acceptFrame,
  clampHead,
  clampHeight,
  initialState,
} from "./state.js";

export interface ControllerEvents {
  /** A new (never stale) frame to display. */
  onFrame?: (blob: Blob, state: ViewerState) => void;
  /** Face set changed. */
  onFaces?: (faces: FaceCell[], count: number, state: ViewerState) => void;
  /** Any state change (badges, error banner, marker position). */
  onState?: (state: ViewerState) => void;
}

export const DEBOUNCE_MS = 100;

export class ViewerController {
  readonly state: ViewerState;
  readonly screen: Screen;
  private seq = 0;
  private inflight: AbortController | null = null;
  private readonly debounced: Debounced;

  constructor(
    private readonly client: ServiceClient,
    private readonly events: ControllerEvents = {},
    screen: Screen = DEFAULT_SCREEN,
  ) {
    this.state = initialState();
    this.screen = screen;
    this.debounced = debounce(() => void this.refresh(true), DEBOUNCE_MS);
  }

  /** Pointer updates: the marker follows immediately, requests are debounced. */
  moveHead(x: number, z: number, dragging: boolean): void {
    const clamped = clampHead(x, z, this.screen, this.state.ipd);
    this.state.head.x = clamped.x;
    this.state.head.z = clamped.z;
    this.events.onState?.(this.state);
    if (dragging) {
      this.debounced.call();
    } else {
      this.debounced.cancel();
      void this.refresh(false);
    }
  }

  setHeight(height: number): void {
    this.state.head.height = clampHeight(height, this.screen);
    this.update();
  }

  setIpd(ipd: number): void {
    this.state.ipd = Math.max(0, ipd);
    const clamped = clampHead(this.state.head.x, this.state.head.z, this.screen, this.state.ipd);
    this.state.head.x = clamped.x;
    this.state.head.z = clamped.z;
    this.update();
  }

  setScene(scene: string): void {
    this.state.scene = scene;
    this.update();
  }

  setMode(mode: Mode): void {
    this.state.mode = mode;
    this.update();
  }

  setKind(kind: Kind): void {
    this.state.kind = kind;
    this.update();
  }

  setScale(scale: number): void {
    this.state.scale = scale;
    this.update();
  }

  /** Immediate (non-drag) refresh, canceling any pending debounce. */
  update(): void {
    this.debounced.cancel();
    void this.refresh(false);
  }

  async refresh(dragging: boolean): Promise<void> {
    const seq = ++this.seq;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const state = this.state;
    const head = { x: state.head.x, y: state.head.height, z: state.head.z };
    const scale = dragging ? DRAG_SCALE : state.scale;
    const renderMode = state.mode === "diff" ? "diff" : state.mode;
    const render = this.client
      .render(
        {
          scene: state.scene,
          head,
          ipd: state.ipd,
          mode: renderMode as Mode,
          kind: state.kind,
          cube_res: dragging ? 64 : 256,
          canvas_scale: scale,
        },
        controller.signal,
      )
      .then((frame) => {
        if (acceptFrame(state, seq, frame.passCount, frame.renderMs)) {
          this.events.onFrame?.(frame.blob, state);
          this.events.onState?.(state);
        }
      });
    const faces = this.client
      .faces({ head, ipd: state.ipd, canvas_scale: scale }, controller.signal)
      .then((result) => {
        if (acceptFaces(state, seq, result.faces, result.count)) {
          this.events.onFaces?.(result.faces, result.count, state);
          this.events.onState?.(state);
        }
      });
    const results = await Promise.allSettled([render, faces]);
    const failure = results.find(
      (r): r is PromiseRejectedResult =>
        r.status === "rejected" && (r.reason as Error)?.name !== "AbortError",
    );
    if (failure) {
      // non-blocking banner; the last good frame stays up
      state.error = String(failure.reason);
      this.events.onState?.(state);
    }
  }
}
