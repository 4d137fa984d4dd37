// Session state for the interactive loop. All program semantics come from
// the service; this store only tracks the table, the sketch, per-hole
// examples, and what the last synthesis returned.

import {
  Cell,
  ExampleJson,
  Fill,
  SynthesizeRequest,
  SynthesizeResponse,
  cellKey,
  sameCell,
} from "./types.js";

export type SelectionMode =
  | { kind: "idle" }
  | { kind: "pick-input" }
  | { kind: "pick-outputs"; input: Cell; outputs: Cell[] };

export interface SessionSnapshot {
  rows: string[][];
  sketch: string;
  examples: Record<string, ExampleJson[]>;
  activeHole: number;
  response: SynthesizeResponse | null;
}

export type SessionListener = () => void;

export class Session {
  rows: string[][] = [];
  sketch = "?1";
  activeHole = 1;
  examples = new Map<number, ExampleJson[]>();
  selection: SelectionMode = { kind: "idle" };
  response: SynthesizeResponse | null = null;
  pending = false;
  banner: string | null = null;
  // asked before replacing an existing example for the same input cell
  confirmReplace: (cell: Cell) => boolean = () => true;

  private listeners: SessionListener[] = [];

  onChange(listener: SessionListener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  loadTable(rows: string[][]): void {
    this.rows = rows;
    this.examples.clear();
    this.response = null;
    this.selection = { kind: "idle" };
    this.banner = null;
    this.emit();
  }

  get loaded(): boolean {
    return this.rows.length > 0;
  }

  inRange(cell: Cell): boolean {
    return (
      cell[0] >= 1 &&
      cell[0] <= this.rows.length &&
      cell[1] >= 1 &&
      this.rows.length > 0 &&
      cell[1] <= this.rows[0].length
    );
  }

  setSketch(text: string): void {
    this.sketch = text;
    this.emit();
  }

  setActiveHole(hole: number): void {
    this.activeHole = hole;
    this.emit();
  }

  holeIds(): number[] {
    const ids = new Set<number>();
    for (const match of this.sketch.matchAll(/\?(\d+)/g)) {
      ids.add(parseInt(match[1], 10));
    }
    return [...ids].sort((a, b) => a - b);
  }

  startExample(): void {
    this.selection = { kind: "pick-input" };
    this.emit();
  }

  cancelSelection(): void {
    this.selection = { kind: "idle" };
    this.emit();
  }

  clickCell(cell: Cell): void {
    if (!this.inRange(cell)) {
      return; // clicks outside the grid are ignored
    }
    if (this.selection.kind === "pick-input") {
      this.selection = { kind: "pick-outputs", input: cell, outputs: [] };
      this.emit();
      return;
    }
    if (this.selection.kind === "pick-outputs") {
      const outputs = this.selection.outputs;
      const at = outputs.findIndex((c) => sameCell(c, cell));
      if (at >= 0) {
        outputs.splice(at, 1); // second click deselects
      } else {
        outputs.push(cell); // selection order is the output order
      }
      this.emit();
    }
  }

  commitExample(): boolean {
    if (this.selection.kind !== "pick-outputs" || this.selection.outputs.length === 0) {
      return false;
    }
    const done = this.addExample(this.activeHole, {
      in: this.selection.input,
      out: [...this.selection.outputs],
    });
    if (done) {
      this.selection = { kind: "idle" };
      this.emit();
    }
    return done;
  }

  commitNegative(): boolean {
    if (this.selection.kind !== "pick-outputs" && this.selection.kind !== "pick-input") {
      return false;
    }
    if (this.selection.kind === "pick-input") {
      return false; // no input chosen yet
    }
    const done = this.addExample(this.activeHole, {
      in: this.selection.input,
      out: null,
    });
    if (done) {
      this.selection = { kind: "idle" };
      this.emit();
    }
    return done;
  }

  addExample(hole: number, example: ExampleJson): boolean {
    const list = this.examples.get(hole) ?? [];
    const existing = list.findIndex((e) => sameCell(e.in, example.in));
    if (existing >= 0) {
      if (!this.confirmReplace(example.in)) {
        return false;
      }
      list[existing] = example;
    } else {
      list.push(example);
    }
    this.examples.set(hole, list);
    this.emit();
    return true;
  }

  removeExample(hole: number, input: Cell): void {
    const list = this.examples.get(hole) ?? [];
    this.examples.set(
      hole,
      list.filter((e) => !sameCell(e.in, input)),
    );
    this.emit();
  }

  readyToSynthesize(): boolean {
    const holes = this.holeIds();
    return (
      this.loaded &&
      holes.length > 0 &&
      holes.every((h) => (this.examples.get(h) ?? []).some((e) => e.out !== null))
    );
  }

  request(): SynthesizeRequest {
    const examples: Record<string, ExampleJson[]> = {};
    for (const [hole, list] of this.examples) {
      if (list.length > 0) examples[String(hole)] = list;
    }
    return {
      table: { rows: this.rows },
      sketch: this.sketch,
      examples,
    };
  }

  applyResponse(response: SynthesizeResponse): void {
    this.response = response;
    this.banner = null;
    this.emit();
  }

  setBanner(message: string): void {
    this.banner = message;
    this.emit();
  }

  fillAt(cell: Cell): Fill | undefined {
    return this.response?.fills.find((f) => sameCell(f.cell, cell));
  }

  // fills shown in the grid, keyed "row,col"
  fillMap(): Map<string, Fill> {
    const map = new Map<string, Fill>();
    for (const fill of this.response?.fills ?? []) {
      map.set(cellKey(fill.cell), fill);
    }
    return map;
  }

  exampleRoles(): Map<string, "input" | "output" | "negative"> {
    const roles = new Map<string, "input" | "output" | "negative">();
    const list = this.examples.get(this.activeHole) ?? [];
    for (const example of list) {
      roles.set(cellKey(example.in), example.out === null ? "negative" : "input");
      for (const out of example.out ?? []) {
        if (!roles.has(cellKey(out))) roles.set(cellKey(out), "output");
      }
    }
    return roles;
  }

  // --- persistence -----------------------------------------------------------

  export(): SessionSnapshot {
    const examples: Record<string, ExampleJson[]> = {};
    for (const [hole, list] of this.examples) {
      examples[String(hole)] = list;
    }
    return {
      rows: this.rows,
      sketch: this.sketch,
      examples,
      activeHole: this.activeHole,
      response: this.response,
    };
  }

  import(snapshot: SessionSnapshot): void {
    this.rows = snapshot.rows;
    this.sketch = snapshot.sketch;
    this.activeHole = snapshot.activeHole;
    this.examples = new Map(
      Object.entries(snapshot.examples).map(([k, v]) => [parseInt(k, 10), v]),
    );
    this.response = snapshot.response;
    this.selection = { kind: "idle" };
    this.banner = null;
    this.emit();
  }
}
