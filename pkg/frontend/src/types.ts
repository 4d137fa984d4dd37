// Shapes shared with the synthesis service (see the package README for the
// full API description).

export type Cell = [number, number]; // 1-based [row, col]

export interface ExampleJson {
  in: Cell;
  out: Cell[] | null; // null marks a "program must fail here" example
}

export interface SynthesizeRequest {
  table: { rows: string[][] };
  sketch: string;
  examples: Record<string, ExampleJson[]>;
  targets?: { kind: string; cells?: Cell[]; col?: number };
  config?: Record<string, unknown>;
}

export interface HoleResult {
  program: string;
  score: number;
  branches: number;
}

export interface Fill {
  cell: Cell;
  value?: string;
  bottom?: boolean;
  error?: string;
}

export interface SynthesizeResponse {
  holes: Record<string, HoleResult>;
  fills: Fill[];
  timing_ms: number;
}

export interface ApplyRequest {
  table: { rows: string[][] };
  sketch: string;
  programs: Record<string, string>;
  targets?: { kind: string; cells?: Cell[]; col?: number };
  config?: Record<string, unknown>;
}

export interface ApplyResponse {
  fills: Fill[];
  timing_ms: number;
}

export const SKETCH_FUNCTIONS = [
  "SUM",
  "AVG",
  "MAX",
  "MIN",
  "COUNT",
  "MINUS",
  "CONCAT",
  "ID",
] as const;

export function cellKey(cell: Cell): string {
  return `${cell[0]},${cell[1]}`;
}

export function sameCell(a: Cell, b: Cell): boolean {
  return a[0] === b[0] && a[1] === b[1];
}
