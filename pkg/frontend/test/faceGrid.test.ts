import { describe, expect, it } from "vitest";

import { CARDINALS, FACES, FaceGrid } from "../src/faceGrid.js";
import type { FaceCell } from "../src/state.js";

const CENTER_SIX: FaceCell[] = [
  { cubemap: "East", face: "+Z" },
  { cubemap: "West", face: "+Z" },
  { cubemap: "North", face: "+X" },
  { cubemap: "South", face: "+X" },
  { cubemap: "North", face: "-X" },
  { cubemap: "South", face: "-X" },
];

function keys(faces: FaceCell[]): Set<string> {
  return new Set(faces.map((f) => `${f.cubemap}.${f.face}`));
}

describe("face grid", () => {
  it("renders a 4x6 grid", () => {
    const grid = new FaceGrid(document.createElement("div"));
    expect(CARDINALS.length).toBe(4);
    expect(FACES.length).toBe(6);
    expect(grid.litCells().size).toBe(0);
  });

  it("starts fully dimmed before the first response", () => {
    const container = document.createElement("div");
    new FaceGrid(container);
    expect(container.querySelectorAll(".face-cell.dimmed").length).toBe(24);
  });

  it("lights exactly the response set for every displayed pose", () => {
    const grid = new FaceGrid(document.createElement("div"));
    const poses: FaceCell[][] = [
      CENTER_SIX,
      [
        ...CENTER_SIX,
        { cubemap: "East", face: "+Y" },
        { cubemap: "East", face: "-Y" },
        { cubemap: "West", face: "+X" },
        { cubemap: "North", face: "+Z" },
      ],
      [{ cubemap: "North", face: "+Z" }],
      CENTER_SIX,
    ];
    for (const faces of poses) {
      grid.update(faces, faces.length);
      expect(grid.litCells()).toEqual(keys(faces));
    }
  });

  it("shows the count and dims on reset", () => {
    const container = document.createElement("div");
    const grid = new FaceGrid(container);
    grid.update(CENTER_SIX, 6);
    expect(container.querySelector(".face-count")?.textContent).toBe("faces: 6");
    grid.update(null, null);
    expect(grid.litCells().size).toBe(0);
    expect(container.querySelectorAll(".face-cell.dimmed").length).toBe(24);
    expect(container.querySelector(".face-count")?.textContent).toBe("faces: -");
  });
});
