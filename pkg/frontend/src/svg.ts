/**
 * Deterministic SVG emission: no timestamps, fixed number formatting, fixed
 * element order. Rendering the same input twice yields identical bytes.
 */

import { STYLE } from "./style.js";
import { DecayRow, ScalingEntry, SchemaError } from "./csv.js";

const fmt = (x: number): string => {
  if (!isFinite(x)) throw new SchemaError(`non-finite coordinate ${x}`);
  return x.toFixed(2);
};

interface Scale {
  toX(v: number): number;
  toY(v: number): number;
  xTicks: number[];
  yTicks: number[];
}

function log10ticks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); Math.pow(10, e) <= hi * (1 + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks;
}

function logLogScale(xs: number[], ys: number[]): Scale {
  const { width, height, margin } = STYLE;
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  const y0 = Math.min(...ys), y1 = Math.max(...ys);
  const lx0 = Math.log10(x0), lx1 = Math.log10(x1);
  const ly0 = Math.log10(y0), ly1 = Math.log10(y1);
  const padY = 0.05 * (ly1 - ly0 || 1);
  const innerW = width - margin.left - margin.right;
  const innerH = height - margin.top - margin.bottom;
  return {
    toX: (v) => margin.left + ((Math.log10(v) - lx0) / (lx1 - lx0 || 1)) * innerW,
    toY: (v) =>
      margin.top + innerH - ((Math.log10(v) - (ly0 - padY)) / (ly1 - ly0 + 2 * padY || 1)) * innerH,
    xTicks: log10ticks(x0, x1),
    yTicks: log10ticks(y0, y1),
  };
}

function open(title: string): string[] {
  const { width, height, background, fontFamily } = STYLE;
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="${fontFamily}">`,
    `<rect width="${width}" height="${height}" fill="${background}"/>`,
    `<text x="${width / 2}" y="${STYLE.titleSize + 4}" text-anchor="middle" font-size="${STYLE.titleSize}" fill="${STYLE.axisColor}">${title}</text>`,
  ];
}

function axes(scale: Scale, xLabel: string, yLabel: string): string[] {
  const { width, height, margin, axisColor, gridColor, fontSize } = STYLE;
  const parts: string[] = [];
  const bottom = height - margin.bottom;
  for (const t of scale.xTicks) {
    const x = scale.toX(t);
    parts.push(`<line x1="${fmt(x)}" y1="${margin.top}" x2="${fmt(x)}" y2="${bottom}" stroke="${gridColor}" stroke-width="1"/>`);
    parts.push(`<text x="${fmt(x)}" y="${bottom + fontSize + 4}" text-anchor="middle" font-size="${fontSize}" fill="${axisColor}">${t}</text>`);
  }
  for (const t of scale.yTicks) {
    const y = scale.toY(t);
    parts.push(`<line x1="${margin.left}" y1="${fmt(y)}" x2="${width - margin.right}" y2="${fmt(y)}" stroke="${gridColor}" stroke-width="1"/>`);
    parts.push(`<text x="${margin.left - 6}" y="${fmt(y + 4)}" text-anchor="end" font-size="${fontSize}" fill="${axisColor}">1e${Math.round(Math.log10(t))}</text>`);
  }
  parts.push(`<rect x="${margin.left}" y="${margin.top}" width="${width - margin.left - margin.right}" height="${height - margin.top - margin.bottom}" fill="none" stroke="${axisColor}"/>`);
  parts.push(`<text x="${width / 2}" y="${height - 8}" text-anchor="middle" font-size="${fontSize}" fill="${axisColor}">${xLabel}</text>`);
  parts.push(`<text x="14" y="${height / 2}" text-anchor="middle" font-size="${fontSize}" fill="${axisColor}" transform="rotate(-90 14 ${height / 2})">${yLabel}</text>`);
  return parts;
}

function legend(entries: Array<{ color: string; label: string }>): string[] {
  const { margin, fontSize } = STYLE;
  const parts: string[] = [];
  entries.forEach((e, i) => {
    const y = margin.top + 14 + 16 * i;
    const x = margin.left + 10;
    parts.push(`<line x1="${x}" y1="${y - 4}" x2="${x + 22}" y2="${y - 4}" stroke="${e.color}" stroke-width="2"/>`);
    parts.push(`<text x="${x + 28}" y="${y}" font-size="${fontSize}" fill="${STYLE.axisColor}">${e.label}</text>`);
  });
  return parts;
}

/** Fit an anchored power law through the data midpoint with the given slope. */
function slopeLine(rows: DecayRow[], slope: number, scale: Scale, color: string, dash: string): string {
  const ts = rows.map((r) => r.t);
  const anchorT = Math.exp(
    rows.map((r) => Math.log(r.t)).reduce((a, b) => a + b, 0) / rows.length,
  );
  const anchorR = Math.exp(
    rows.map((r) => Math.log(r.residual)).reduce((a, b) => a + b, 0) / rows.length,
  );
  const t0 = Math.min(...ts), t1 = Math.max(...ts);
  const r0 = anchorR * Math.pow(t0 / anchorT, slope);
  const r1 = anchorR * Math.pow(t1 / anchorT, slope);
  return `<line x1="${fmt(scale.toX(t0))}" y1="${fmt(scale.toY(r0))}" x2="${fmt(scale.toX(t1))}" y2="${fmt(scale.toY(r1))}" stroke="${color}" stroke-width="2" stroke-dasharray="${dash}"/>`;
}

export function renderDecay(rows: DecayRow[]): string {
  const scale = logLogScale(rows.map((r) => r.t), rows.map((r) => r.residual));
  const first = rows[0];
  const parts = open(`${first.theorem} residual decay, q = ${first.q} (${first.verdict})`);
  parts.push(...axes(scale, "time", "residual norm"));
  parts.push(slopeLine(rows, first.fittedSlope, scale, STYLE.fitColor, "none"));
  parts.push(slopeLine(rows, first.theoreticalSlope, scale, STYLE.guideColor, "6 4"));
  for (const r of rows) {
    parts.push(`<circle cx="${fmt(scale.toX(r.t))}" cy="${fmt(scale.toY(r.residual))}" r="${STYLE.pointRadius}" fill="${STYLE.pointColor}"/>`);
  }
  parts.push(...legend([
    { color: STYLE.pointColor, label: "residuals" },
    { color: STYLE.fitColor, label: `fitted slope ${first.fittedSlope.toFixed(2)}` },
    { color: STYLE.guideColor, label: `theoretical slope ${first.theoreticalSlope.toFixed(2)}` },
  ]));
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

export function renderScaling(entries: ScalingEntry[]): string {
  const parts = open("self-similar scaling ratios");
  const { margin, fontSize, axisColor } = STYLE;
  const header = ["target", "t1 -> t2", "measured", "predicted", "rel. error"];
  const colX = [margin.left, margin.left + 130, margin.left + 240, margin.left + 350, margin.left + 460];
  const y0 = margin.top + 26;
  header.forEach((h, i) => {
    parts.push(`<text x="${colX[i]}" y="${y0}" font-size="${fontSize}" font-weight="bold" fill="${axisColor}">${h}</text>`);
  });
  entries.forEach((e, r) => {
    const y = y0 + 20 * (r + 1);
    const rel = Math.abs(e.measured - e.predicted) / e.predicted;
    const cells = [
      e.target,
      `${e.t1} -> ${e.t2}`,
      e.measured.toPrecision(6),
      e.predicted.toPrecision(6),
      (100 * rel).toFixed(3) + "%",
    ];
    cells.forEach((c, i) => {
      parts.push(`<text x="${colX[i]}" y="${y}" font-size="${fontSize}" fill="${axisColor}">${c}</text>`);
    });
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

export function renderBurgersComparison(withLog: DecayRow[], withoutLog: DecayRow[]): string {
  const all = [...withLog, ...withoutLog];
  const scale = logLogScale(all.map((r) => r.t), all.map((r) => r.residual));
  const parts = open("conservation-law residual: log term kept vs dropped");
  parts.push(...axes(scale, "time", "residual norm"));
  for (const r of withLog) {
    parts.push(`<circle cx="${fmt(scale.toX(r.t))}" cy="${fmt(scale.toY(r.residual))}" r="${STYLE.pointRadius}" fill="${STYLE.pointColor}"/>`);
  }
  for (const r of withoutLog) {
    parts.push(`<rect x="${fmt(scale.toX(r.t) - 3)}" y="${fmt(scale.toY(r.residual) - 3)}" width="6" height="6" fill="${STYLE.secondaryColor}"/>`);
  }
  parts.push(...legend([
    { color: STYLE.pointColor, label: `with log term (slope ${withLog[0].fittedSlope.toFixed(2)})` },
    { color: STYLE.secondaryColor, label: `without log term (slope ${withoutLog[0].fittedSlope.toFixed(2)})` },
  ]));
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
