/** Decay-report CSV parsing (fixed schema emitted by the lab harness). */

export interface DecayRow {
  theorem: string;
  q: string;
  t: number;
  residual: number;
  fittedSlope: number;
  theoreticalSlope: number;
  verdict: string;
}

export class SchemaError extends Error {}

const REQUIRED = [
  "theorem",
  "q",
  "t",
  "residual",
  "fitted_slope",
  "theoretical_slope",
  "verdict",
];

export function parseDecayCsv(text: string): DecayRow[] {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  for (const col of REQUIRED) {
    if (!header.includes(col)) {
      throw new SchemaError(`missing column '${col}'`);
    }
  }
  const idx = (name: string) => header.indexOf(name);
  const rows: DecayRow[] = [];
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== header.length) {
      throw new SchemaError(`row has ${parts.length} fields, expected ${header.length}`);
    }
    const row: DecayRow = {
      theorem: parts[idx("theorem")],
      q: parts[idx("q")],
      t: Number(parts[idx("t")]),
      residual: Number(parts[idx("residual")]),
      fittedSlope: Number(parts[idx("fitted_slope")]),
      theoreticalSlope: Number(parts[idx("theoretical_slope")]),
      verdict: parts[idx("verdict")],
    };
    if (!isFinite(row.t) || !isFinite(row.residual)) {
      throw new SchemaError(`non-numeric data row: ${line}`);
    }
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new SchemaError("no data rows");
  }
  return rows;
}

export interface ScalingEntry {
  target: string;
  t1: number;
  t2: number;
  measured: number;
  predicted: number;
}

/** Scaling manifests are small JSON documents written per checked pair. */
export function parseScalingManifest(text: string): ScalingEntry {
  const doc = JSON.parse(text);
  for (const key of ["target", "t_pair", "measured_ratio", "predicted_ratio"]) {
    if (!(key in doc)) {
      throw new SchemaError(`scaling manifest missing '${key}'`);
    }
  }
  return {
    target: String(doc.target),
    t1: Number(doc.t_pair[0]),
    t2: Number(doc.t_pair[1]),
    measured: Number(doc.measured_ratio),
    predicted: Number(doc.predicted_ratio),
  };
}
