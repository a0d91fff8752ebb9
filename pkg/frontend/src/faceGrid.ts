/** The 4x6 cubemap/face grid: rows N/E/S/W, columns the six faces. */

import type { FaceCell } from "./state.js";

export const CARDINALS = ["North", "East", "South", "West"] as const;
export const FACES = ["+X", "-X", "+Y", "-Y", "+Z", "-Z"] as const;

export class FaceGrid {
  private readonly cells = new Map<string, HTMLElement>();
  private readonly countLabel: HTMLElement;

  constructor(container: HTMLElement) {
    const table = document.createElement("table");
    table.className = "face-grid";
    const header = document.createElement("tr");
    header.appendChild(document.createElement("th"));
    for (const face of FACES) {
      const th = document.createElement("th");
      th.textContent = face;
      header.appendChild(th);
    }
    table.appendChild(header);
    for (const cardinal of CARDINALS) {
      const row = document.createElement("tr");
      const label = document.createElement("th");
      label.textContent = cardinal;
      row.appendChild(label);
      for (const face of FACES) {
        const cell = document.createElement("td");
        cell.className = "face-cell dimmed";
        cell.dataset.key = `${cardinal}.${face}`;
        this.cells.set(`${cardinal}.${face}`, cell);
        row.appendChild(cell);
      }
      table.appendChild(row);
    }
    this.countLabel = document.createElement("div");
    this.countLabel.className = "face-count";
    this.countLabel.textContent = "faces: -";
    container.appendChild(table);
    container.appendChild(this.countLabel);
  }

  /** null means "no response yet": every cell dims. */
  update(faces: FaceCell[] | null, count: number | null): void {
    const lit = new Set((faces ?? []).map((f) => `${f.cubemap}.${f.face}`));
    for (const [key, cell] of this.cells) {
      cell.className = faces === null ? "face-cell dimmed" : lit.has(key) ? "face-cell lit" : "face-cell";
    }
    this.countLabel.textContent = count === null ? "faces: -" : `faces: ${count}`;
  }

  litCells(): Set<string> {
    const lit = new Set<string>();
    for (const [key, cell] of this.cells) {
      if (cell.classList.contains("lit")) lit.add(key);
    }
    return lit;
  }
}
