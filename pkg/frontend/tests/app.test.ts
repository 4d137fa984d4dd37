// End-to-end UI loop against recorded service responses: load the
// carry-forward example table, demonstrate its three examples by clicks,
// synthesize, then mark one fill wrong and correct it, which re-synthesizes
// without a page reload.
import { beforeEach, describe, expect, it, vi } from "vitest";
import { App } from "../src/app.js";
import { ApiClient } from "../src/api.js";
import type { Cell } from "../src/types.js";
import recorded from "./fixtures/fallback_responses.json";

const TABLE_CSV = [
  "2016-11-01,A,?,?",
  "2016-11-02,B,12,?",
  "2016-11-03,A,?,200",
  "2016-11-04,C,18,400",
  "2016-11-05,B,10,?",
  "2016-11-06,B,?,800",
  "2016-11-07,C,?,1000",
].join("\n");

const EXPECTED_PROGRAM =
  'Seq(GetCell(x, u, 1, \\y.\\z. Val(z) != "?"), ' +
  'GetCell(x, d, 1, \\y.\\z. Val(z) != "?"))';

function cellAt(root: HTMLElement, cell: Cell): HTMLElement {
  const found = root.querySelector<HTMLElement>(
    `td[data-row="${cell[0]}"][data-col="${cell[1]}"]`,
  );
  if (!found) throw new Error(`no cell ${cell}`);
  return found;
}

function demonstrate(root: HTMLElement, input: Cell, output: Cell): void {
  (root.querySelector("#demonstrate") as HTMLElement).click();
  cellAt(root, input).click();
  cellAt(root, output).click();
  (root.querySelector("#commit-example") as HTMLElement).click();
}

describe("interactive loop", () => {
  let root: HTMLElement;
  let app: App;
  let calls: unknown[];

  beforeEach(() => {
    document.body.innerHTML = '<div id="app"></div>';
    root = document.getElementById("app")!;
    calls = [];
    const responses = [recorded.first, recorded.second];
    const api = {
      synthesize: vi.fn(async (request: unknown) => {
        calls.push(request);
        return responses[calls.length - 1];
      }),
    } as unknown as ApiClient;
    app = new App(root, api);
    app.loadCsvText(TABLE_CSV);
  });

  it("runs demonstrate -> synthesize -> correct -> re-synthesize", async () => {
    const documentBefore = document;

    demonstrate(root, [3, 3], [2, 3]);
    demonstrate(root, [7, 3], [5, 3]);
    demonstrate(root, [1, 4], [3, 4]);
    expect(app.session.examples.get(1)).toHaveLength(3);

    // inputs and outputs are styled differently in the grid
    expect(cellAt(root, [3, 3]).classList.contains("example-input")).toBe(true);
    expect(cellAt(root, [2, 3]).classList.contains("example-output")).toBe(true);

    (root.querySelector("#synthesize") as HTMLButtonElement).click();
    await vi.waitFor(() => expect(calls).toHaveLength(1));
    await Promise.resolve();

    // program text and score rendered
    const program = root.querySelector("#programs code")!.textContent;
    expect(program).toBe(EXPECTED_PROGRAM);
    expect(root.querySelector(".program-meta")!.textContent).toContain("2 branches");

    // the annotated fills are overlaid on the grid
    const expectFill = (cell: Cell, value: string) => {
      const td = cellAt(root, cell);
      expect(td.classList.contains("fill")).toBe(true);
      expect(td.textContent).toBe(value);
    };
    expectFill([1, 3], "12");
    expectFill([3, 3], "12");
    expectFill([6, 3], "10");
    expectFill([7, 3], "10");
    expectFill([1, 4], "200");
    expectFill([2, 4], "200");
    expectFill([5, 4], "400");

    // mark the fill at (2,4) wrong and pick (3,4) as the right output;
    // committing the correction re-synthesizes with the extra example
    cellAt(root, [2, 4]).click();
    expect(app.session.selection.kind).toBe("pick-outputs");
    cellAt(root, [3, 4]).click();
    (root.querySelector("#commit-example") as HTMLElement).click();
    await vi.waitFor(() => expect(calls).toHaveLength(2));

    const second = calls[1] as { examples: { "1": unknown[] } };
    expect(second.examples["1"]).toHaveLength(4);
    expect(second.examples["1"][3]).toEqual({ in: [2, 4], out: [[3, 4]] });
    expect(document).toBe(documentBefore); // no reload happened
    expect(root.querySelector("#programs code")!.textContent).toBe(EXPECTED_PROGRAM);
  });

  it("disables the synthesize button while a request is pending", async () => {
    demonstrate(root, [3, 3], [2, 3]);
    const button = root.querySelector("#synthesize") as HTMLButtonElement;
    expect(button.disabled).toBe(false);
    const pending = app.synthesize();
    expect(button.disabled).toBe(true);
    await pending;
    expect(button.disabled).toBe(false);
  });

  it("rejects oversized tables at load", () => {
    const big = Array.from({ length: 70 }, () =>
      Array.from({ length: 70 }, () => "x").join(","),
    ).join("\n");
    app.loadCsvText(big);
    expect(app.session.banner).toContain("limit");
    expect(app.session.rows.length).toBe(7); // previous table kept
  });

  it("shows a banner on timeout", async () => {
    const api = {
      synthesize: vi.fn(async () => {
        const { ApiError } = await import("../src/api.js");
        throw new ApiError(408, { timeout_s: 30 });
      }),
    } as unknown as ApiClient;
    document.body.innerHTML = '<div id="app"></div>';
    const timeoutApp = new App(document.getElementById("app")!, api);
    timeoutApp.loadCsvText(TABLE_CSV);
    timeoutApp.session.addExample(1, { in: [3, 3], out: [[2, 3]] });
    await timeoutApp.synthesize();
    expect(timeoutApp.session.banner).toContain("timed out");
  });

  it("negative example via mark-as-fail", () => {
    (root.querySelector("#demonstrate") as HTMLElement).click();
    cellAt(root, [1, 3]).click();
    (root.querySelector("#mark-fail") as HTMLElement).click();
    expect(app.session.examples.get(1)).toEqual([{ in: [1, 3], out: null }]);
    const td = cellAt(root, [1, 3]);
    expect(td.classList.contains("example-negative")).toBe(true);
  });
});
