import { readdirSync, readFileSync } from "node:fs";
import { mkdtemp } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { runExport } from "../src/export.js";
import { decodeDump } from "../src/rdmp.js";

async function freshDir(): Promise<string> {
  return mkdtemp(join(tmpdir(), "kqkit-export-"));
}

describe("export", () => {
  it("emits one dump per layer plus a manifest, ascending", async () => {
    const out = await freshDir();
    const result = await runExport({
      model: "toy-mlp",
      layers: [2, 0, 1],
      out,
      samples: 16,
      seed: 3,
      classes: 4,
    });
    const manifest = JSON.parse(readFileSync(result.manifestPath, "utf8"));
    expect(manifest.map((e: { layer: number }) => e.layer)).toEqual([0, 1, 2]);
    expect(manifest.map((e: { stage: number }) => e.stage)).toEqual([0, 1, 2]);
    const dims = [32, 24, 16];
    manifest.forEach((entry: { file: string; layer: number }, i: number) => {
      const dump = decodeDump(readFileSync(join(out, entry.file)) as Buffer);
      expect(dump.layerIndex).toBe(entry.layer);
      expect(dump.samples).toBe(16);
      expect(dump.dim).toBe(dims[i]);
      expect(dump.numClasses).toBe(4);
      expect(Math.max(...dump.labels)).toBeLessThan(4);
    });
  });

  it("is byte-identical across reruns of the same seed", async () => {
    const [a, b] = [await freshDir(), await freshDir()];
    const opts = { model: "vgg19-blocks", layers: [3, 15], samples: 8, seed: 11 };
    await runExport({ ...opts, out: a });
    await runExport({ ...opts, out: b });
    for (const name of readdirSync(a).sort()) {
      if (name === "export-report.json") continue; // carries wall time
      expect(readFileSync(join(b, name)).equals(readFileSync(join(a, name))), name).toBe(true);
    }
  });

  it("changes the data when the seed changes", async () => {
    const [a, b] = [await freshDir(), await freshDir()];
    await runExport({ model: "toy-mlp", layers: [0], samples: 8, seed: 1, out: a });
    await runExport({ model: "toy-mlp", layers: [0], samples: 8, seed: 2, out: b });
    const bytesA = readFileSync(join(a, "layer_00.rdmp"));
    const bytesB = readFileSync(join(b, "layer_00.rdmp"));
    expect(bytesA.equals(bytesB)).toBe(false);
  });

  it("splits the forward pass into batches without changing the result", async () => {
    const [a, b] = [await freshDir(), await freshDir()];
    await runExport({ model: "toy-mlp", layers: [0, 2], samples: 20, seed: 5, batchSize: 7, out: a });
    await runExport({ model: "toy-mlp", layers: [0, 2], samples: 20, seed: 5, batchSize: 64, out: b });
    for (const name of ["layer_00.rdmp", "layer_02.rdmp", "manifest.json"]) {
      expect(readFileSync(join(b, name)).equals(readFileSync(join(a, name))), name).toBe(true);
    }
  });

  it("rejects unknown models, datasets, and layer indices", async () => {
    const out = await freshDir();
    await expect(runExport({ model: "resnet-hd", layers: [0], out })).rejects.toThrow(/unknown model/);
    await expect(
      runExport({ model: "toy-mlp", data: "imagenet", layers: [0], out }),
    ).rejects.toThrow(/unknown dataset/);
    await expect(runExport({ model: "toy-mlp", layers: [9], out })).rejects.toThrow(
      /unknown layer index 9; toy-mlp has layers 0\.\.3/,
    );
    await expect(runExport({ model: "toy-mlp", layers: [0, 0], out })).rejects.toThrow(/duplicate/);
    await expect(runExport({ model: "toy-mlp", layers: [], out })).rejects.toThrow(/no layers/);
  });
});
