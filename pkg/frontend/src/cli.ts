#!/usr/bin/env node
/**
 * plotkit <csv|snapshot> [--fig energy|lambda|sep|field|conv] [--out dir]
 *         [--field vx|vy|b11|b12|b22|lambda_min]
 *
 * Reads solver outputs and writes one SVG per requested figure. Exit
 * codes: 0 success, 1 usage or input error.
 */

import { mkdirSync, writeFileSync } from "fs";
import { basename, join } from "path";
import {
  plotConvergence,
  plotEnergy,
  plotField,
  plotLambdaMin,
  plotSeparation,
} from "./figures.js";
import { FileNotFoundError, SchemaMismatchError } from "./schema.js";
import { CorruptSnapshotError } from "./snapshot.js";

const FIGURES = ["energy", "lambda", "sep", "field", "conv"] as const;
type Figure = (typeof FIGURES)[number];

interface Args {
  input: string;
  figures: Figure[];
  out: string;
  field: string;
}

function parseArgs(argv: string[]): Args {
  const args: Args = { input: "", figures: [], out: ".", field: "lambda_min" };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i]!;
    if (arg === "--fig") {
      const value = argv[++i];
      if (!value || !(FIGURES as readonly string[]).includes(value)) {
        throw new Error(`--fig expects one of ${FIGURES.join("|")}, got ${value ?? "nothing"}`);
      }
      args.figures.push(value as Figure);
    } else if (arg === "--out") {
      const value = argv[++i];
      if (!value) throw new Error("--out expects a directory");
      args.out = value;
    } else if (arg === "--field") {
      const value = argv[++i];
      if (!value) throw new Error("--field expects a field name");
      args.field = value;
    } else if (arg.startsWith("--")) {
      throw new Error(`unknown flag ${arg}`);
    } else if (args.input === "") {
      args.input = arg;
    } else {
      throw new Error(`unexpected argument ${arg}`);
    }
  }
  if (args.input === "") throw new Error("an input csv or snapshot path is required");
  if (args.figures.length === 0) {
    args.figures.push(args.input.endsWith(".v2ds") ? "field" : "energy");
  }
  return args;
}

function render(figure: Figure, input: string, field: string): string {
  switch (figure) {
    case "energy":
      return plotEnergy(input).svg;
    case "lambda":
      return plotLambdaMin(input);
    case "sep":
      return plotSeparation(input);
    case "field":
      return plotField(input, field);
    case "conv":
      return plotConvergence(input);
  }
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 1;
  }
  try {
    mkdirSync(args.out, { recursive: true });
    const stem = basename(args.input).replace(/\.[^.]*$/, "");
    for (const figure of args.figures) {
      const svg = render(figure, args.input, args.field);
      const path = join(args.out, `${stem}_${figure}.svg`);
      writeFileSync(path, svg, "utf8");
      console.log(`wrote ${path}`);
    }
    return 0;
  } catch (err) {
    if (
      err instanceof SchemaMismatchError ||
      err instanceof FileNotFoundError ||
      err instanceof CorruptSnapshotError
    ) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
