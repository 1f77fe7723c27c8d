import { describe, expect, it } from "vitest";
import { parseDecayCsv, parseScalingManifest, SchemaError } from "../src/csv.js";

const GOOD = `theorem,q,t,residual,fitted_slope,theoretical_slope,verdict
thm4,1,2.000000000000e+01,1.339000000000e-03,-3.052516399399e+00,-2.000000000000e+00,pass
thm4,1,4.000000000000e+01,5.051000000000e-04,-3.052516399399e+00,-2.000000000000e+00,pass
`;

describe("parseDecayCsv", () => {
  it("parses the fixed schema", () => {
    const rows = parseDecayCsv(GOOD);
    expect(rows).toHaveLength(2);
    expect(rows[0].theorem).toBe("thm4");
    expect(rows[0].t).toBe(20);
    expect(rows[1].residual).toBeCloseTo(5.051e-4, 10);
    expect(rows[0].fittedSlope).toBeCloseTo(-3.0525163994, 8);
  });

  it("names the missing column", () => {
    const broken = GOOD.replace("theoretical_slope", "theory");
    expect(() => parseDecayCsv(broken)).toThrow(SchemaError);
    expect(() => parseDecayCsv(broken)).toThrow(/theoretical_slope/);
  });

  it("rejects empty data", () => {
    const headerOnly = GOOD.split("\n")[0];
    expect(() => parseDecayCsv(headerOnly)).toThrow(/no data rows/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseDecayCsv(GOOD + "thm4,1,2\n")).toThrow(SchemaError);
  });
});

describe("parseScalingManifest", () => {
  it("reads the harness manifest shape", () => {
    const doc = JSON.stringify({
      target: "J", t_pair: [1, 2], nodes: {}, window_lambda0: 3,
      measured_ratio: 0.4966, predicted_ratio: 0.5,
    });
    const e = parseScalingManifest(doc);
    expect(e.target).toBe("J");
    expect(e.measured).toBeCloseTo(0.4966);
  });

  it("rejects incomplete manifests", () => {
    expect(() => parseScalingManifest("{}")).toThrow(SchemaError);
  });
});
