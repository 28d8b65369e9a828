/**
 * CSV parsing and plot-data preparation for the convergence figures.
 *
 * The input schema is the study CSV written by the solver CLI:
 *
 *   dofs,estimators,estimators_f,estimators_g,estimators_u0,estimators_u,estimators_Pf,estimators_sigma,estimators_u1
 *
 * Every column after `dofs` becomes one curve of the double-logarithmic
 * figure.  Reference guide lines y ~ dofs^p are anchored at the second data
 * point of a target curve (chosen explicitly or by closest decay rate).
 */

export const X_COLUMN = "dofs";

export interface CurveStyle {
  column: string;
  label: string;
  color: string;
  dashed: boolean;
  marker: "circle" | "square" | "x" | "triangle" | "diamond" | "triangle-down";
}

/** The eight curves of a study figure, in legend order. */
export const CURVES: CurveStyle[] = [
  { column: "estimators", label: "LS(u_h, sigma_h)", color: "#d62728", dashed: false, marker: "circle" },
  { column: "estimators_f", label: "|| f - div_tx u_h ||", color: "#1f77b4", dashed: false, marker: "square" },
  { column: "estimators_g", label: "|| grad u_h + sigma_h ||", color: "#2ca02c", dashed: false, marker: "x" },
  { column: "estimators_u0", label: "|| (u - u_h)(0) ||", color: "#e377c2", dashed: false, marker: "triangle" },
  { column: "estimators_u", label: "|| u - u_h ||", color: "#17becf", dashed: false, marker: "diamond" },
  { column: "estimators_Pf", label: "|| P f - div_tx u_h ||", color: "#1f77b4", dashed: true, marker: "square" },
  { column: "estimators_sigma", label: "|| sigma - sigma_h ||", color: "#2ca02c", dashed: true, marker: "x" },
  { column: "estimators_u1", label: "|| (u - u_h)(T) ||", color: "#bfa000", dashed: false, marker: "triangle-down" },
];

export interface CsvTable {
  header: string[];
  rows: number[][];
}

export class PlotError extends Error {}

export function parseCsv(text: string): CsvTable {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new PlotError("empty file: no CSV header found");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  if (lines.length === 1) {
    throw new PlotError("CSV contains a header but no data rows");
  }
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",").map(Number);
    if (cells.length !== header.length || cells.some((c) => !Number.isFinite(c))) {
      throw new PlotError(`malformed CSV row ${i + 2}: ${line}`);
    }
    return cells;
  });
  return { header, rows };
}

export function column(table: CsvTable, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new PlotError(
      `column '${name}' not present in CSV header [${table.header.join(", ")}]`,
    );
  }
  return table.rows.map((r) => r[idx]);
}

export interface Series {
  column: string;
  label: string;
  color: string;
  dashed: boolean;
  marker: CurveStyle["marker"];
  x: number[];
  y: number[];
}

export interface RefSpec {
  exponent: number;
  /** anchor curve; picked by closest average decay rate when omitted */
  column?: string;
}

export interface RefLine {
  exponent: number;
  anchorColumn: string;
  label: string;
  x: [number, number];
  y: [number, number];
}

export interface PlotData {
  series: Series[];
  refs: RefLine[];
}

function averageDecayRate(x: number[], y: number[]): number {
  let sum = 0;
  let n = 0;
  for (let i = 0; i + 1 < x.length; i++) {
    if (y[i] > 0 && y[i + 1] > 0) {
      sum += Math.log(y[i + 1] / y[i]) / Math.log(x[i + 1] / x[i]);
      n += 1;
    }
  }
  return n ? sum / n : NaN;
}

export function buildPlotData(table: CsvTable, refSpecs: RefSpec[] = []): PlotData {
  const x = column(table, X_COLUMN);
  const series: Series[] = CURVES.map((c) => ({
    ...c,
    x: [...x],
    y: column(table, c.column),
  }));

  const refs: RefLine[] = [];
  const xMin = Math.min(...x);
  const xMax = Math.max(...x);
  for (const spec of refSpecs) {
    let target: Series | undefined;
    if (spec.column !== undefined) {
      target = series.find((s) => s.column === spec.column);
      if (!target) {
        throw new PlotError(`reference anchor column '${spec.column}' is not a known curve`);
      }
    } else {
      let best = Infinity;
      for (const s of series) {
        const rate = averageDecayRate(s.x, s.y);
        const gap = Math.abs(rate - spec.exponent);
        if (Number.isFinite(gap) && gap < best) {
          best = gap;
          target = s;
        }
      }
    }
    if (!target || target.x.length < 2) {
      continue; // single-point data: markers only, no guide lines
    }
    const ax = target.x[1];
    const ay = target.y[1];
    const yAt = (xx: number) => ay * Math.pow(xx / ax, spec.exponent);
    refs.push({
      exponent: spec.exponent,
      anchorColumn: target.column,
      label: `O(dofs^${formatExponent(spec.exponent)})`,
      x: [xMin, xMax],
      y: [yAt(xMin), yAt(xMax)],
    });
  }
  return { series, refs };
}

export function formatExponent(p: number): string {
  const known: Array<[number, string]> = [
    [-1 / 3, "-1/3"],
    [-2 / 3, "-2/3"],
    [-1 / 2, "-1/2"],
    [-1 / 4, "-1/4"],
    [-3 / 8, "-3/8"],
    [-1, "-1"],
  ];
  for (const [v, s] of known) {
    if (Math.abs(p - v) < 1e-12) return s;
  }
  return String(p);
}

/** Parse the CLI `--refs` argument: comma list of `p` or `p:column`. */
export function parseRefSpecs(arg: string): RefSpec[] {
  return arg
    .split(",")
    .map((item) => item.trim())
    .filter((item) => item.length > 0)
    .map((item) => {
      const [p, col] = item.split(":");
      const exponent = Number(p);
      if (!Number.isFinite(exponent)) {
        throw new PlotError(`bad reference slope '${item}' (expected e.g. -0.5 or -0.5:estimators)`);
      }
      return col ? { exponent, column: col } : { exponent };
    });
}
