/** driftlab-plot <kind> <input...> -o <file> */

import { readFileSync, writeFileSync } from "fs";
import { parseDecayCsv, parseScalingManifest, SchemaError } from "./csv.js";
import { renderBurgersComparison, renderDecay, renderScaling } from "./svg.js";

function usage(): never {
  console.error(
    "usage: driftlab-plot decay <report.csv> -o out.svg\n" +
    "       driftlab-plot scaling <manifest.json...> -o out.svg\n" +
    "       driftlab-plot burgers-log <with.csv> <without.csv> -o out.svg",
  );
  process.exit(1);
}

export function main(argv: string[]): number {
  const args = [...argv];
  const oIdx = args.indexOf("-o");
  if (oIdx < 0 || oIdx + 1 >= args.length) usage();
  const outPath = args[oIdx + 1];
  args.splice(oIdx, 2);
  const [kind, ...inputs] = args;
  if (!kind || inputs.length === 0) usage();
  try {
    let svg: string;
    if (kind === "decay") {
      svg = renderDecay(parseDecayCsv(readFileSync(inputs[0], "utf8")));
    } else if (kind === "scaling") {
      svg = renderScaling(inputs.map((p) => parseScalingManifest(readFileSync(p, "utf8"))));
    } else if (kind === "burgers-log") {
      if (inputs.length < 2) usage();
      svg = renderBurgersComparison(
        parseDecayCsv(readFileSync(inputs[0], "utf8")),
        parseDecayCsv(readFileSync(inputs[1], "utf8")),
      );
    } else {
      usage();
    }
    writeFileSync(outPath, svg);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
