#!/usr/bin/env node
/** Command-line exporter: model activations to dumps plus a manifest. */

import { parseArgs } from "node:util";

import { DATASETS, runExport } from "./export.js";
import { buildModel, MODEL_NAMES } from "./models.js";

const USAGE = `usage: kqkit-export <command> [options]

commands:
  export   dump activated-layer representations
  models   list model names, layer counts, and stage tables

export options:
  --model NAME     one of: ${MODEL_NAMES.join(", ")} (required)
  --data NAME      dataset identifier (default synthetic-normal)
  --layers LIST    comma-separated activated-layer indices (required)
  --out DIR        output directory (required)
  --samples N      dataset size (default 64)
  --seed N         RNG seed for weights, inputs, and labels (default 0)
  --classes N      label count (default 10)
  --batch N        forward-pass batch size (default 64)
`;

function fail(message: string): never {
  process.stderr.write(`error: ${message}\n`);
  process.exit(2);
}

async function main(): Promise<number> {
  const argv = process.argv.slice(2);
  const command = argv[0];
  if (command === undefined || command === "--help" || command === "-h") {
    process.stdout.write(USAGE);
    return command === undefined ? 2 : 0;
  }

  if (command === "models") {
    for (const name of MODEL_NAMES) {
      const built = buildModel(name, 0, 10);
      const stages = built.stages.join(",");
      process.stdout.write(`${name}: ${built.stages.length} activated layers, stages [${stages}]\n`);
    }
    return 0;
  }

  if (command !== "export") fail(`unknown command ${JSON.stringify(command)}`);

  const { values } = parseArgs({
    args: argv.slice(1),
    options: {
      model: { type: "string" },
      data: { type: "string", default: "synthetic-normal" },
      layers: { type: "string" },
      out: { type: "string" },
      samples: { type: "string", default: "64" },
      seed: { type: "string", default: "0" },
      classes: { type: "string", default: "10" },
      batch: { type: "string", default: "64" },
    },
  });

  if (!values.model) fail("--model is required");
  if (!values.layers) fail("--layers is required");
  if (!values.out) fail("--out is required");

  const layers = values.layers.split(",").map((part) => {
    const n = Number(part.trim());
    if (!Number.isInteger(n)) fail(`bad layer index ${JSON.stringify(part)}`);
    return n;
  });
  const ints: Record<string, number> = {};
  for (const key of ["samples", "seed", "classes", "batch"] as const) {
    const n = Number(values[key]);
    if (!Number.isInteger(n)) fail(`--${key} must be an integer, got ${JSON.stringify(values[key])}`);
    ints[key] = n;
  }

  const result = await runExport({
    model: values.model,
    data: values.data,
    layers,
    out: values.out,
    samples: ints.samples,
    seed: ints.seed,
    classes: ints.classes,
    batchSize: ints.batch,
  });
  process.stdout.write(`${result.manifestPath}\n`);
  return 0;
}

main()
  .then((code) => process.exit(code))
  .catch((err: unknown) => fail(err instanceof Error ? err.message : String(err)));
