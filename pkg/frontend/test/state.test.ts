import { describe, expect, it } from "vitest";

import {
  DEFAULT_SCREEN,
  HEAD_MARGIN,
  acceptFaces,
  acceptFrame,
  clampHead,
  clampHeight,
  initialState,
  validRadius,
} from "../src/state.js";

describe("head clamping", () => {
  it("keeps interior points untouched", () => {
    const p = clampHead(0.4, -1.2, DEFAULT_SCREEN, 0.064);
    expect(p).toEqual({ x: 0.4, z: -1.2 });
  });

  it("clamps every outside point onto the valid region boundary", () => {
    const limit = validRadius(DEFAULT_SCREEN, 0.064);
    expect(limit).toBeCloseTo(3 - 0.032 - HEAD_MARGIN, 12);
    for (let k = 0; k < 200; k++) {
      const angle = (k / 200) * 2 * Math.PI;
      const r = 3 + (k % 7);
      const p = clampHead(r * Math.sin(angle), r * Math.cos(angle), DEFAULT_SCREEN, 0.064);
      expect(Math.hypot(p.x, p.z)).toBeLessThanOrEqual(limit + 1e-12);
      expect(Math.hypot(p.x, p.z)).toBeCloseTo(limit, 9);
    }
  });

  it("shrinks the region as ipd grows", () => {
    expect(validRadius(DEFAULT_SCREEN, 0.2)).toBeLessThan(validRadius(DEFAULT_SCREEN, 0.0));
  });

  it("clamps height into the screen extent", () => {
    expect(clampHeight(-1, DEFAULT_SCREEN)).toBe(0);
    expect(clampHeight(99, DEFAULT_SCREEN)).toBe(DEFAULT_SCREEN.height);
    expect(clampHeight(1.0, DEFAULT_SCREEN)).toBe(1.0);
  });
});

describe("frame sequencing", () => {
  it("accepts only strictly newer frames", () => {
    const state = initialState();
    expect(acceptFrame(state, 3, 6, 12)).toBe(true);
    expect(state.passCount).toBe(6);
    expect(acceptFrame(state, 2, 99, 1)).toBe(false);
    expect(acceptFrame(state, 3, 99, 1)).toBe(false);
    expect(state.passCount).toBe(6);
    expect(acceptFrame(state, 4, 14, 30)).toBe(true);
    expect(state.passCount).toBe(14);
  });

  it("never lets the displayed sequence go backwards under any interleaving", () => {
    const state = initialState();
    const order = [5, 2, 9, 1, 9, 7, 10, 3];
    let displayed = 0;
    for (const seq of order) {
      const applied = acceptFrame(state, seq, seq * 2, 1);
      if (applied) {
        expect(seq).toBeGreaterThan(displayed);
        displayed = seq;
      }
      expect(state.frameSeq).toBeGreaterThanOrEqual(displayed);
    }
    expect(state.frameSeq).toBe(10);
    expect(state.passCount).toBe(20);
  });

  it("tracks faces with the same monotone rule", () => {
    const state = initialState();
    const faces = [{ cubemap: "East", face: "+Z" }];
    expect(acceptFaces(state, 1, faces, 1)).toBe(true);
    expect(acceptFaces(state, 1, [], 0)).toBe(false);
    expect(state.faceCount).toBe(1);
  });

  it("clears the error banner when a fresh frame lands", () => {
    const state = initialState();
    state.error = "boom";
    acceptFrame(state, 1, 6, 1);
    expect(state.error).toBeNull();
  });
});
