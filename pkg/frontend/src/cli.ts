#!/usr/bin/env node
/** plot-fig2 <csv> <out.png|out.svg> [--color-<series> <hex>]
 *
 * Renders the sweep CSV as four series: mean, max and min separability
 * frequencies plus the analytic bound overlay.  Exit codes: 0 ok,
 * 1 i/o or internal error, 2 usage or schema violation.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { DEFAULT_COLORS, SeriesColors } from "./layout";
import { renderPng } from "./png";
import { parseFig2Csv, SchemaError } from "./schema";
import { renderSvg } from "./svg";

const USAGE = "usage: plot-fig2 <table.csv> <out.png|out.svg> [--color-mean|--color-max|--color-min|--color-bound <hex>]";

export function main(argv: string[]): number {
  const positional: string[] = [];
  const colors: SeriesColors = { ...DEFAULT_COLORS };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const colorFlag = /^--color-(mean|max|min|bound)$/.exec(arg);
    if (colorFlag) {
      const value = argv[++i];
      if (!value || !/^#?[0-9a-fA-F]{6}$/.test(value)) {
        process.stderr.write(`plot-fig2: ${arg} needs a 6-digit hex color\n`);
        return 2;
      }
      colors[colorFlag[1] as keyof SeriesColors] = value.startsWith("#") ? value : `#${value}`;
      continue;
    }
    if (arg.startsWith("--")) {
      process.stderr.write(`plot-fig2: unknown flag ${arg}\n${USAGE}\n`);
      return 2;
    }
    positional.push(arg);
  }
  if (positional.length !== 2) {
    process.stderr.write(`${USAGE}\n`);
    return 2;
  }
  const [csvPath, outPath] = positional;

  let text: string;
  try {
    text = readFileSync(csvPath, "utf-8");
  } catch (err) {
    process.stderr.write(`plot-fig2: cannot read ${csvPath}: ${(err as Error).message}\n`);
    return 1;
  }

  let rows;
  try {
    rows = parseFig2Csv(text);
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`plot-fig2: ${csvPath}: ${err.message}\n`);
      return 2;
    }
    throw err;
  }

  try {
    if (outPath.endsWith(".svg")) {
      writeFileSync(outPath, renderSvg(rows, colors), "utf-8");
    } else if (outPath.endsWith(".png")) {
      writeFileSync(outPath, renderPng(rows, colors));
    } else {
      process.stderr.write(`plot-fig2: output must end in .svg or .png, got ${outPath}\n`);
      return 2;
    }
  } catch (err) {
    process.stderr.write(`plot-fig2: cannot write ${outPath}: ${(err as Error).message}\n`);
    return 1;
  }
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
