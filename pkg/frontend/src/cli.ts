#!/usr/bin/env node
/** CLI: fairorder-charts <input.csv> [output.svg] */

import { readFileSync, writeFileSync } from "fs";
import { SchemaError } from "./csv.js";
import { renderSvg } from "./render.js";

function main(argv: string[]): number {
  const [input, output] = argv;
  if (!input) {
    console.error("usage: fairorder-charts <input.csv> [output.svg]");
    return 2;
  }
  const target = output ?? input.replace(/\.csv$/, "") + ".svg";
  let text: string;
  try {
    text = readFileSync(input, "utf-8");
  } catch (err) {
    console.error(`error: cannot read ${input}: ${(err as Error).message}`);
    return 2;
  }
  try {
    writeFileSync(target, renderSvg(text));
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
  console.log(`wrote ${target}`);
  return 0;
}

process.exit(main(process.argv.slice(2)));
