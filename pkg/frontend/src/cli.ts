#!/usr/bin/env node
/** Render curve CSVs (from `xcser curves`) to SVG figures.
 *
 *  single file: xcser-plots curve_reward.csv -o reward.svg --title "6-RMP"
 *  batch mode:  xcser-plots --batch curves_dir -o figures_dir
 */

import { readFileSync, readdirSync, writeFileSync, mkdirSync } from "fs";
import { basename, join } from "path";

import { parseCurveCsv, SchemaError } from "./csv.js";
import { renderCurves, PlotOptions } from "./plot.js";

interface Args {
  input?: string;
  batch?: string;
  out?: string;
  title?: string;
  xLabel?: string;
  yLabel?: string;
  labels?: string[];
  yMin?: number;
  yMax?: number;
  width?: number;
  height?: number;
}

function parseArgs(argv: string[]): Args {
  const args: Args = {};
  for (let i = 0; i < argv.length; i += 1) {
    const a = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new Error(`missing value after ${a}`);
      return argv[i];
    };
    switch (a) {
      case "-o": case "--out": args.out = next(); break;
      case "--batch": args.batch = next(); break;
      case "--title": args.title = next(); break;
      case "--x-label": args.xLabel = next(); break;
      case "--y-label": args.yLabel = next(); break;
      case "--labels": args.labels = next().split(","); break;
      case "--y-min": args.yMin = Number(next()); break;
      case "--y-max": args.yMax = Number(next()); break;
      case "--width": args.width = Number(next()); break;
      case "--height": args.height = Number(next()); break;
      default:
        if (a.startsWith("-")) throw new Error(`unknown flag ${a}`);
        if (args.input) throw new Error("more than one input file given");
        args.input = a;
    }
  }
  return args;
}

/** axis defaults per metric name embedded in the file name */
function defaultsFor(file: string): PlotOptions {
  const name = basename(file);
  const opts: PlotOptions = { xLabel: "learning step" };
  if (name.includes("reward")) {
    opts.yLabel = "reward (sliding mean)";
    opts.yDomain = [0, 1000];
  } else if (name.includes("sys_err")) {
    opts.yLabel = "system error (sliding mean)";
  } else if (name.includes("otm")) {
    opts.yLabel = "100-episode return mean";
    opts.xLabel = "episode";
  } else if (name.includes("macro")) {
    opts.yLabel = "macroclassifiers";
  } else if (name.includes("num_sum")) {
    opts.yLabel = "microclassifiers";
  } else if (name.includes("generality")) {
    opts.yLabel = "mean condition volume";
  }
  return opts;
}

function renderFile(input: string, outPath: string, args: Args): void {
  const table = parseCurveCsv(readFileSync(input, "utf-8"));
  const opts: PlotOptions = { ...defaultsFor(input) };
  if (args.title !== undefined) opts.title = args.title;
  if (args.xLabel !== undefined) opts.xLabel = args.xLabel;
  if (args.yLabel !== undefined) opts.yLabel = args.yLabel;
  if (args.labels !== undefined) opts.labels = args.labels;
  if (args.width !== undefined) opts.width = args.width;
  if (args.height !== undefined) opts.height = args.height;
  if (args.yMin !== undefined || args.yMax !== undefined) {
    const lo = args.yMin ?? 0;
    const hi = args.yMax ?? 1;
    opts.yDomain = [lo, hi];
  }
  writeFileSync(outPath, renderCurves(table, opts));
  process.stdout.write(`wrote ${outPath}\n`);
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
  try {
    if (args.batch) {
      const outDir = args.out ?? "figures";
      mkdirSync(outDir, { recursive: true });
      const files = readdirSync(args.batch)
        .filter((f) => f.startsWith("curve_") && f.endsWith(".csv"))
        .sort();
      if (files.length === 0) {
        process.stderr.write(`error: no curve_*.csv files in ${args.batch}\n`);
        return 2;
      }
      for (const f of files) {
        const out = join(outDir, f.replace(/\.csv$/, ".svg"));
        renderFile(join(args.batch, f), out, args);
      }
      return 0;
    }
    if (!args.input) {
      process.stderr.write(
        "usage: xcser-plots INPUT.csv -o OUT.svg [--title T] " +
        "[--labels a,b] [--y-min V --y-max V]\n" +
        "       xcser-plots --batch CURVES_DIR -o OUT_DIR\n");
      return 2;
    }
    const out = args.out ?? args.input.replace(/\.csv$/, ".svg");
    renderFile(args.input, out, args);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${err.message}\n`);
      return 2;
    }
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
