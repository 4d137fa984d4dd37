// Table rendering: original values, example markings, and fill overlays.
// Cells carry data-row/data-col so click handling stays on one listener.

import { Session } from "./session.js";
import { Cell, cellKey } from "./types.js";

export const MAX_CELLS = 4000; // desk-scale tool; bigger tables are rejected

export class GridView {
  constructor(
    private readonly root: HTMLElement,
    private readonly session: Session,
  ) {
    root.addEventListener("click", (event) => {
      const target = (event.target as HTMLElement).closest("td[data-row]");
      if (!target) return;
      const cell: Cell = [
        parseInt(target.getAttribute("data-row")!, 10),
        parseInt(target.getAttribute("data-col")!, 10),
      ];
      this.onCellClick(cell);
    });
  }

  onCellClick: (cell: Cell) => void = (cell) => this.session.clickCell(cell);

  render(): void {
    const session = this.session;
    this.root.textContent = "";
    if (!session.loaded) {
      const hint = document.createElement("p");
      hint.className = "hint";
      hint.textContent = "Load a CSV table to begin.";
      this.root.appendChild(hint);
      return;
    }
    const fills = session.fillMap();
    const roles = session.exampleRoles();
    const selection = session.selection;
    const table = document.createElement("table");
    table.className = "grid";
    for (let r = 1; r <= session.rows.length; r++) {
      const tr = document.createElement("tr");
      for (let c = 1; c <= session.rows[0].length; c++) {
        const td = document.createElement("td");
        td.setAttribute("data-row", String(r));
        td.setAttribute("data-col", String(c));
        const key = cellKey([r, c]);
        const original = session.rows[r - 1][c - 1];
        const fill = fills.get(key);
        if (fill && fill.value !== undefined) {
          td.classList.add("fill");
          td.textContent = fill.value;
          td.title = `was ${original || "(empty)"} — click to mark wrong`;
        } else if (fill && fill.error) {
          td.classList.add("fill-error");
          td.textContent = original;
          td.title = fill.error;
        } else if (fill && fill.bottom) {
          td.classList.add("fill-bottom");
          td.textContent = original;
          td.title = "the program failed on this cell";
        } else {
          td.textContent = original;
        }
        const role = roles.get(key);
        if (role) td.classList.add(`example-${role}`);
        if (selection.kind === "pick-outputs") {
          if (cellKey(selection.input) === key) td.classList.add("picking-input");
          if (selection.outputs.some((o) => cellKey(o) === key)) {
            td.classList.add("picking-output");
          }
        }
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    this.root.appendChild(table);
  }
}
