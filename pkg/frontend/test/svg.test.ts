import { describe, expect, it } from "vitest";
import { parseDecayCsv } from "../src/csv.js";
import { renderBurgersComparison, renderDecay, renderScaling } from "../src/svg.js";

function powerLawCsv(slope: number, n = 8): string {
  const lines = ["theorem,q,t,residual,fitted_slope,theoretical_slope,verdict"];
  for (let i = 0; i < n; i++) {
    const t = 20 * Math.pow(1.5, i);
    const r = Math.pow(t, slope);
    lines.push(`thm4,inf,${t.toExponential(12)},${r.toExponential(12)},${slope.toExponential(12)},-4.000000000000e+00,pass`);
  }
  return lines.join("\n") + "\n";
}

describe("renderDecay", () => {
  it("is byte-identical across repeated renders", () => {
    const rows = parseDecayCsv(powerLawCsv(-3));
    const a = renderDecay(rows);
    const b = renderDecay(rows);
    expect(a).toBe(b);
  });

  it("prints fitted and guide slopes to two decimals in the legend", () => {
    const svg = renderDecay(parseDecayCsv(powerLawCsv(-3)));
    expect(svg).toContain("fitted slope -3.00");
    expect(svg).toContain("theoretical slope -4.00");
  });

  it("fitted and guide lines coincide when the law is exact", () => {
    // same slope for fit and guide: identical line coordinates must appear
    const csv = powerLawCsv(-4);
    const svg = renderDecay(parseDecayCsv(csv));
    const lines = svg.split("\n").filter((l) => l.includes("stroke-width=\"2\""));
    const coords = lines.map((l) => l.match(/x1="([^"]+)" y1="([^"]+)" x2="([^"]+)" y2="([^"]+)"/));
    expect(coords[0]![1]).toBe(coords[1]![1]);
    expect(coords[0]![2]).toBe(coords[1]![2]);
    expect(coords[0]![4]).toBe(coords[1]![4]);
  });

  it("is valid minimal SVG", () => {
    const svg = renderDecay(parseDecayCsv(powerLawCsv(-2.5)));
    expect(svg.startsWith("<svg xmlns=")).toBe(true);
    expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
  });
});

describe("renderScaling", () => {
  it("tabulates measured vs predicted with relative error", () => {
    const svg = renderScaling([
      { target: "J", t1: 1, t2: 2, measured: 0.4966, predicted: 0.5 },
    ]);
    expect(svg).toContain("0.496600");
    expect(svg).toContain("0.680%");
  });
});

describe("renderBurgersComparison", () => {
  it("shows both slopes", () => {
    const withLog = parseDecayCsv(powerLawCsv(-1.94));
    const withoutLog = parseDecayCsv(powerLawCsv(-0.79));
    const svg = renderBurgersComparison(withLog, withoutLog);
    expect(svg).toContain("with log term (slope -1.94)");
    expect(svg).toContain("without log term (slope -0.79)");
  });
});
