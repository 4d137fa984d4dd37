// Application wiring: toolbar, sketch entry, example demonstration flow,
// synthesis, and the mark-wrong correction loop. At most one synthesis
// request is in flight; the button stays disabled while pending.

import { ApiClient, ApiError } from "./api.js";
import { CsvError, parseCsv } from "./csv.js";
import { GridView, MAX_CELLS } from "./grid_view.js";
import { Session, SessionSnapshot } from "./session.js";
import { Cell, SKETCH_FUNCTIONS } from "./types.js";

export class App {
  readonly session = new Session();
  readonly grid: GridView;
  private correcting: Cell | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient = new ApiClient(),
  ) {
    this.root.innerHTML = TEMPLATE;
    this.grid = new GridView(this.el("#grid"), this.session);
    this.grid.onCellClick = (cell) => this.handleCellClick(cell);
    this.session.onChange(() => this.render());
    this.wireControls();
    this.render();
  }

  private el<T extends HTMLElement = HTMLElement>(selector: string): T {
    const found = this.root.querySelector<T>(selector);
    if (!found) throw new Error(`missing element ${selector}`);
    return found;
  }

  private wireControls(): void {
    const fileInput = this.el<HTMLInputElement>("#table-file");
    fileInput.addEventListener("change", async () => {
      const file = fileInput.files?.[0];
      if (file) this.loadCsvText(await file.text());
    });

    const sketchInput = this.el<HTMLInputElement>("#sketch");
    sketchInput.addEventListener("input", () => {
      this.session.setSketch(sketchInput.value);
    });

    const templates = this.el("#sketch-templates");
    for (const name of SKETCH_FUNCTIONS) {
      const button = document.createElement("button");
      button.type = "button";
      button.textContent = name;
      button.addEventListener("click", () => {
        this.session.setSketch(name === "ID" ? "?1" : `${name}(?1)`);
      });
      templates.appendChild(button);
    }

    this.el("#demonstrate").addEventListener("click", () => {
      this.correcting = null;
      this.session.startExample();
    });
    this.el("#commit-example").addEventListener("click", () => {
      const wasCorrection = this.correcting !== null;
      if (this.session.commitExample()) {
        this.correcting = null;
        if (wasCorrection) void this.synthesize(); // correction re-synthesizes
      }
    });
    this.el("#mark-fail").addEventListener("click", () => {
      this.session.commitNegative();
    });
    this.el("#cancel-selection").addEventListener("click", () => {
      this.correcting = null;
      this.session.cancelSelection();
    });
    this.el("#synthesize").addEventListener("click", () => void this.synthesize());

    this.el("#export-session").addEventListener("click", () => this.exportSession());
    const importInput = this.el<HTMLInputElement>("#import-session");
    importInput.addEventListener("change", async () => {
      const file = importInput.files?.[0];
      if (!file) return;
      this.session.import(JSON.parse(await file.text()) as SessionSnapshot);
    });

    const holeSelect = this.el<HTMLSelectElement>("#hole");
    holeSelect.addEventListener("change", () => {
      this.session.setActiveHole(parseInt(holeSelect.value, 10));
    });
  }

  loadCsvText(text: string): void {
    try {
      const rows = parseCsv(text);
      if (rows.length * rows[0].length > MAX_CELLS) {
        this.session.setBanner(
          `table has ${rows.length * rows[0].length} cells; the limit is ${MAX_CELLS}`,
        );
        return;
      }
      this.session.loadTable(rows);
    } catch (error) {
      if (error instanceof CsvError) {
        this.session.setBanner(`could not load the table: ${error.message}`);
      } else {
        throw error;
      }
    }
  }

  private handleCellClick(cell: Cell): void {
    const session = this.session;
    if (session.selection.kind !== "idle") {
      session.clickCell(cell);
      return;
    }
    // clicking a filled cell opens the correction flow: the cell becomes the
    // input of a fresh example whose outputs the user now picks
    const fill = session.fillAt(cell);
    if (fill && fill.value !== undefined) {
      this.correcting = cell;
      session.selection = { kind: "pick-outputs", input: cell, outputs: [] };
      session.setBanner(
        `marked (${cell[0]},${cell[1]}) as wrong — click the correct output ` +
        "cells in order, then press Add example (or Mark as fail)",
      );
    }
  }

  async synthesize(): Promise<void> {
    const session = this.session;
    if (session.pending || !session.readyToSynthesize()) return;
    session.pending = true;
    this.render();
    try {
      const response = await this.api.synthesize(session.request());
      session.applyResponse(response);
    } catch (error) {
      if (error instanceof ApiError) {
        session.setBanner(
          error.isTimeout
            ? "synthesis timed out — add a more telling example and retry"
            : `the service rejected the request: ${error.message}`,
        );
      } else {
        session.setBanner(`network failure: ${String(error)}`);
      }
    } finally {
      session.pending = false;
      this.render();
    }
  }

  private exportSession(): void {
    const blob = new Blob([JSON.stringify(this.session.export(), null, 2)], {
      type: "application/json",
    });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "gridfill-session.json";
    link.click();
    URL.revokeObjectURL(link.href);
  }

  render(): void {
    const session = this.session;
    this.grid.render();

    const banner = this.el("#banner");
    banner.textContent = session.banner ?? "";
    banner.classList.toggle("hidden", session.banner === null);

    const sketchInput = this.el<HTMLInputElement>("#sketch");
    if (sketchInput.value !== session.sketch) sketchInput.value = session.sketch;

    const holeSelect = this.el<HTMLSelectElement>("#hole");
    const holes = session.holeIds();
    holeSelect.innerHTML = holes
      .map((h) => `<option value="${h}">?${h}</option>`)
      .join("");
    if (holes.includes(session.activeHole)) {
      holeSelect.value = String(session.activeHole);
    } else if (holes.length > 0) {
      session.activeHole = holes[0];
      holeSelect.value = String(holes[0]);
    }

    const picking = session.selection.kind !== "idle";
    this.el("#selection-tools").classList.toggle("hidden", !picking);
    const status = this.el("#selection-status");
    if (session.selection.kind === "pick-input") {
      status.textContent = `click the input cell for ?${session.activeHole}`;
    } else if (session.selection.kind === "pick-outputs") {
      const sel = session.selection;
      status.textContent =
        `input (${sel.input[0]},${sel.input[1]}); ` +
        `${sel.outputs.length} output cell(s) picked`;
    } else {
      status.textContent = "";
    }

    const button = this.el<HTMLButtonElement>("#synthesize");
    button.disabled = session.pending || !session.readyToSynthesize();
    button.textContent = session.pending ? "Synthesizing…" : "Synthesize";

    this.renderExamples();
    this.renderPrograms();
  }

  private renderExamples(): void {
    const list = this.el("#examples");
    list.textContent = "";
    const examples = this.session.examples.get(this.session.activeHole) ?? [];
    for (const example of examples) {
      const item = document.createElement("li");
      const target =
        example.out === null
          ? "must fail"
          : example.out.map(([r, c]) => `(${r},${c})`).join(", ");
      item.textContent = `(${example.in[0]},${example.in[1]}) → ${target} `;
      const remove = document.createElement("button");
      remove.type = "button";
      remove.textContent = "remove";
      remove.addEventListener("click", () => {
        this.session.removeExample(this.session.activeHole, example.in);
      });
      item.appendChild(remove);
      list.appendChild(item);
    }
  }

  private renderPrograms(): void {
    const panel = this.el("#programs");
    panel.textContent = "";
    const response = this.session.response;
    if (!response) return;
    for (const [hole, result] of Object.entries(response.holes)) {
      const entry = document.createElement("div");
      entry.className = "program";
      const heading = document.createElement("div");
      heading.className = "program-meta";
      heading.textContent =
        `?${hole} — score ${result.score.toPrecision(3)}, ` +
        `${result.branches} branch${result.branches === 1 ? "" : "es"}`;
      const code = document.createElement("code");
      code.textContent = result.program;
      entry.appendChild(heading);
      entry.appendChild(code);
      panel.appendChild(entry);
    }
    const timing = document.createElement("div");
    timing.className = "timing";
    timing.textContent = `computed in ${response.timing_ms.toFixed(1)} ms`;
    panel.appendChild(timing);
  }
}

const TEMPLATE = `
  <header>
    <h1>gridfill</h1>
    <div id="banner" class="banner hidden"></div>
  </header>
  <section class="toolbar">
    <label>Table (CSV): <input type="file" id="table-file" accept=".csv,text/csv"></label>
    <label>Sketch: <input type="text" id="sketch" value="?1" size="28"></label>
    <span id="sketch-templates" class="templates"></span>
    <label>Hole: <select id="hole"></select></label>
  </section>
  <section class="toolbar">
    <button type="button" id="demonstrate">Demonstrate example</button>
    <span id="selection-tools" class="hidden">
      <span id="selection-status"></span>
      <button type="button" id="commit-example">Add example</button>
      <button type="button" id="mark-fail">Mark as fail</button>
      <button type="button" id="cancel-selection">Cancel</button>
    </span>
    <button type="button" id="synthesize" disabled>Synthesize</button>
    <button type="button" id="export-session">Export session</button>
    <label class="import">Import: <input type="file" id="import-session" accept=".json"></label>
  </section>
  <main>
    <div id="grid"></div>
    <aside>
      <h2>Examples</h2>
      <ul id="examples"></ul>
      <h2>Programs</h2>
      <div id="programs"></div>
    </aside>
  </main>
`;
