// CSV ingestion following the engine's table rules: no header row, cells
// trimmed, `?` is the missing marker. Quotes escape commas and embedded
// quotes double up, matching what the CLI writes back out.

export class CsvError extends Error {}

function parseLine(line: string): string[] {
  const cells: string[] = [];
  let current = "";
  let quoted = false;
  let i = 0;
  while (i < line.length) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"') {
        if (line[i + 1] === '"') {
          current += '"';
          i += 2;
          continue;
        }
        quoted = false;
        i += 1;
        continue;
      }
      current += ch;
      i += 1;
      continue;
    }
    if (ch === '"' && current.trim() === "") {
      quoted = true;
      current = "";
      i += 1;
      continue;
    }
    if (ch === ",") {
      cells.push(current.trim());
      current = "";
      i += 1;
      continue;
    }
    current += ch;
    i += 1;
  }
  cells.push(current.trim());
  return cells;
}

export function parseCsv(text: string): string[][] {
  const lines = text.replace(/\r\n/g, "\n").replace(/\n+$/, "").split("\n");
  const rows = lines.filter((l) => l.length > 0).map(parseLine);
  if (rows.length === 0) {
    throw new CsvError("the table is empty");
  }
  const width = rows[0].length;
  rows.forEach((row, index) => {
    if (row.length !== width) {
      throw new CsvError(`row ${index + 1} has ${row.length} cells, expected ${width}`);
    }
  });
  return rows;
}
