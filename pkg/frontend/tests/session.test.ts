import { describe, expect, it } from "vitest";
import { Session } from "../src/session.js";
import type { SynthesizeResponse } from "../src/types.js";

function loaded(): Session {
  const session = new Session();
  session.loadTable([
    ["id", "x"],
    ["1", "10"],
    ["1", "?"],
  ]);
  return session;
}

describe("example demonstration", () => {
  it("records input then ordered outputs", () => {
    const session = loaded();
    session.startExample();
    session.clickCell([3, 2]);
    session.clickCell([2, 2]);
    session.clickCell([1, 2]);
    expect(session.selection).toMatchObject({
      kind: "pick-outputs",
      input: [3, 2],
      outputs: [[2, 2], [1, 2]],
    });
    expect(session.commitExample()).toBe(true);
    expect(session.examples.get(1)).toEqual([
      { in: [3, 2], out: [[2, 2], [1, 2]] },
    ]);
  });

  it("clicking a picked output again deselects it", () => {
    const session = loaded();
    session.startExample();
    session.clickCell([3, 2]);
    session.clickCell([2, 2]);
    session.clickCell([2, 2]);
    expect(session.selection).toMatchObject({ outputs: [] });
  });

  it("ignores clicks outside the grid", () => {
    const session = loaded();
    session.startExample();
    session.clickCell([99, 1]);
    expect(session.selection.kind).toBe("pick-input");
  });

  it("marks a cell as must-fail", () => {
    const session = loaded();
    session.startExample();
    session.clickCell([2, 2]);
    expect(session.commitNegative()).toBe(true);
    expect(session.examples.get(1)).toEqual([{ in: [2, 2], out: null }]);
  });

  it("replaces a duplicate input after confirmation", () => {
    const session = loaded();
    session.addExample(1, { in: [3, 2], out: [[2, 2]] });
    let asked = 0;
    session.confirmReplace = () => {
      asked += 1;
      return true;
    };
    session.addExample(1, { in: [3, 2], out: [[1, 2]] });
    expect(asked).toBe(1);
    expect(session.examples.get(1)).toEqual([{ in: [3, 2], out: [[1, 2]] }]);
  });

  it("keeps the old example when replacement is declined", () => {
    const session = loaded();
    session.addExample(1, { in: [3, 2], out: [[2, 2]] });
    session.confirmReplace = () => false;
    expect(session.addExample(1, { in: [3, 2], out: [[1, 2]] })).toBe(false);
    expect(session.examples.get(1)).toEqual([{ in: [3, 2], out: [[2, 2]] }]);
  });
});

describe("readiness and requests", () => {
  it("requires a positive example for every hole", () => {
    const session = loaded();
    session.setSketch("SUM(?1, ?2)");
    session.addExample(1, { in: [3, 2], out: [[2, 2]] });
    expect(session.readyToSynthesize()).toBe(false);
    session.addExample(2, { in: [3, 2], out: null });
    expect(session.readyToSynthesize()).toBe(false);
    session.addExample(2, { in: [3, 2], out: [[1, 2]] });
    expect(session.readyToSynthesize()).toBe(true);
  });

  it("builds the service request shape", () => {
    const session = loaded();
    session.addExample(1, { in: [3, 2], out: [[2, 2]] });
    expect(session.request()).toEqual({
      table: { rows: session.rows },
      sketch: "?1",
      examples: { "1": [{ in: [3, 2], out: [[2, 2]] }] },
    });
  });

  it("extracts hole ids from the sketch text", () => {
    const session = loaded();
    session.setSketch("MINUS(SUM(?2), ?1)");
    expect(session.holeIds()).toEqual([1, 2]);
  });
});

describe("persistence", () => {
  it("export/import restores identical state", () => {
    const session = loaded();
    session.setSketch("SUM(?1, 1)");
    session.addExample(1, { in: [3, 2], out: [[2, 2]] });
    const response: SynthesizeResponse = {
      holes: { "1": { program: "x", score: 1, branches: 1 } },
      fills: [{ cell: [3, 2], value: "10" }],
      timing_ms: 1,
    };
    session.applyResponse(response);
    const snapshot = JSON.parse(JSON.stringify(session.export()));

    const restored = new Session();
    restored.import(snapshot);
    expect(restored.rows).toEqual(session.rows);
    expect(restored.sketch).toBe(session.sketch);
    expect(restored.examples).toEqual(session.examples);
    expect(restored.response).toEqual(session.response);
    expect(restored.export()).toEqual(session.export());
  });
});
