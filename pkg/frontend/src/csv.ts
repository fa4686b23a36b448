/** Parser for the curve CSV schema written by `xcser curves`:
 *  optional `# ...` comment lines, then a header `x,<label>_mean,<label>_sd,...`,
 *  then numeric rows where a cell may be empty (insufficient samples). */

export interface Series {
  label: string;
  /** x positions with a finite mean (gaps are dropped) */
  x: number[];
  mean: number[];
  /** SD per kept point; 0 where the sd cell was empty */
  sd: number[];
}

export interface CurveTable {
  metricComment: string | null;
  series: Series[];
}

export class SchemaError extends Error {}

function splitCells(line: string): string[] {
  return line.split(",").map((c) => c.trim());
}

export function parseCurveCsv(text: string): CurveTable {
  const lines = text
    .split(/\r?\n/)
    .filter((l) => l.length > 0);
  let metricComment: string | null = null;
  let idx = 0;
  while (idx < lines.length && lines[idx].startsWith("#")) {
    if (metricComment === null) metricComment = lines[idx].slice(1).trim();
    idx += 1;
  }
  if (idx >= lines.length) throw new SchemaError("empty curve CSV");
  const header = splitCells(lines[idx]);
  idx += 1;
  if (header[0] !== "x") {
    throw new SchemaError(`first column must be 'x', got '${header[0]}'`);
  }
  if (header.length < 3 || (header.length - 1) % 2 !== 0) {
    throw new SchemaError(
      "expected pairs of <label>_mean,<label>_sd columns after 'x'");
  }
  const labels: string[] = [];
  for (let c = 1; c < header.length; c += 2) {
    const meanCol = header[c];
    const sdCol = header[c + 1];
    if (!meanCol.endsWith("_mean")) {
      throw new SchemaError(`missing column: expected a '*_mean' column at ` +
        `position ${c}, got '${meanCol}'`);
    }
    const label = meanCol.slice(0, -"_mean".length);
    if (sdCol !== `${label}_sd`) {
      throw new SchemaError(`missing column: expected '${label}_sd' next to ` +
        `'${meanCol}', got '${sdCol ?? "nothing"}'`);
    }
    labels.push(label);
  }
  const series: Series[] = labels.map((label) => ({
    label, x: [], mean: [], sd: [],
  }));
  for (; idx < lines.length; idx += 1) {
    const cells = splitCells(lines[idx]);
    if (cells.length !== header.length) {
      throw new SchemaError(
        `row ${idx + 1} has ${cells.length} cells, header has ${header.length}`);
    }
    const x = Number(cells[0]);
    if (!Number.isFinite(x)) {
      throw new SchemaError(`row ${idx + 1}: non-numeric x '${cells[0]}'`);
    }
    labels.forEach((_, k) => {
      const meanCell = cells[1 + 2 * k];
      if (meanCell === "") return; // gap: no data at this x yet
      const mean = Number(meanCell);
      if (!Number.isFinite(mean)) {
        throw new SchemaError(`row ${idx + 1}: bad mean '${meanCell}'`);
      }
      const sdCell = cells[2 + 2 * k];
      const sd = sdCell === "" ? 0 : Number(sdCell);
      if (!Number.isFinite(sd)) {
        throw new SchemaError(`row ${idx + 1}: bad sd '${sdCell}'`);
      }
      series[k].x.push(x);
      series[k].mean.push(mean);
      series[k].sd.push(sd);
    });
  }
  if (series.every((s) => s.x.length === 0)) {
    throw new SchemaError("curve CSV holds no data points");
  }
  return { metricComment, series };
}
