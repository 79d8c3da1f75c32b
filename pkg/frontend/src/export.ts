/** Export activated-layer representations over a synthetic dataset.
 *
 * Emits one dump file per requested layer plus manifest.json, the format the
 * analysis toolkit reads directly. Everything is derived from the seed, so a
 * repeated export is byte-identical.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import * as tf from "@tensorflow/tfjs";

import { buildModel } from "./models.js";
import { mulberry32, normals, uniformInts } from "./prng.js";
import { writeDump } from "./rdmp.js";

export interface ExportOptions {
  model: string;
  data?: string;
  layers: number[];
  out: string;
  samples?: number;
  seed?: number;
  classes?: number;
  batchSize?: number;
}

export interface ExportResult {
  manifestPath: string;
  files: string[];
  report: Record<string, unknown>;
}

export const DATASETS = ["synthetic-normal"] as const;

export async function runExport(options: ExportOptions): Promise<ExportResult> {
  const started = Date.now();
  const {
    model: modelName,
    data = "synthetic-normal",
    layers,
    out,
    samples = 64,
    seed = 0,
    classes = 10,
    batchSize = 64,
  } = options;

  if (!DATASETS.includes(data as (typeof DATASETS)[number])) {
    throw new Error(`unknown dataset ${JSON.stringify(data)}; available: ${DATASETS.join(", ")}`);
  }
  if (layers.length === 0) throw new Error("no layers requested");
  if (samples < 2) throw new Error("need at least 2 samples");
  if (classes < 2) throw new Error("need at least 2 classes");

  const built = buildModel(modelName, seed, classes);
  const layerCount = built.stages.length;
  const sorted = [...layers].sort((a, b) => a - b);
  for (const layer of sorted) {
    if (!Number.isInteger(layer) || layer < 0 || layer >= layerCount) {
      throw new Error(`unknown layer index ${layer}; ${modelName} has layers 0..${layerCount - 1}`);
    }
  }
  if (new Set(sorted).size !== sorted.length) throw new Error("duplicate layer indices");

  const rng = mulberry32(seed * 2654435761 + 0x9e3779b9);
  const labels = uniformInts(rng, samples, classes);
  const inputSize = built.inputShape.reduce((a, b) => a * b, 1);
  const inputs = normals(rng, samples * inputSize);

  // batch the forward pass; concatenate per requested layer
  const perLayer = new Map<number, Float32Array[]>(sorted.map((l) => [l, []]));
  for (let offset = 0; offset < samples; offset += batchSize) {
    const count = Math.min(batchSize, samples - offset);
    const slice = inputs.subarray(offset * inputSize, (offset + count) * inputSize);
    const batch = tf.tensor(slice, [count, ...built.inputShape]);
    const outputs = built.model.predict(batch) as tf.Tensor[];
    for (const layer of sorted) {
      perLayer.get(layer)!.push(outputs[layer].dataSync() as Float32Array);
    }
    batch.dispose();
    outputs.forEach((t) => t.dispose());
  }

  mkdirSync(out, { recursive: true });
  const manifest: Array<Record<string, unknown>> = [];
  const files: string[] = [];
  for (const layer of sorted) {
    const chunks = perLayer.get(layer)!;
    const dim = chunks[0].length / Math.min(batchSize, samples);
    const flat = new Float32Array(samples * dim);
    let at = 0;
    for (const chunk of chunks) {
      flat.set(chunk, at);
      at += chunk.length;
    }
    const file = `layer_${String(layer).padStart(2, "0")}.rdmp`;
    writeDump(join(out, file), {
      layerIndex: layer,
      numClasses: classes,
      labels,
      data: flat,
      samples,
      dim,
    });
    manifest.push({
      layer,
      file,
      stage: built.stages[layer],
      desc: built.descriptions[layer],
    });
    files.push(file);
  }

  const manifestPath = join(out, "manifest.json");
  writeFileSync(manifestPath, JSON.stringify(manifest, null, 2) + "\n");

  const report = {
    tool: "kqkit-exporter",
    version: "0.1.0",
    command: "export",
    model: modelName,
    data,
    seed,
    samples,
    classes,
    layers: sorted,
    outputs: [manifestPath, ...files.map((f) => join(out, f))],
    wallTimeMs: Date.now() - started,
  };
  writeFileSync(join(out, "export-report.json"), JSON.stringify(report, null, 2) + "\n");
  return { manifestPath, files, report };
}
