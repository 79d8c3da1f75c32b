/** Model zoo with activated-layer indexing.
 *
 * A layer index counts the layers that end in a non-linearity, in forward
 * order, starting at 0; the final logits layer is the last index. Stage
 * numbers group layers between pooling steps, with the classifier stack as
 * the final stage, so selection tools can find stage ends.
 */

import * as tf from "@tensorflow/tfjs";

export interface BuiltModel {
  /** One output per activated layer, index-aligned. */
  model: tf.LayersModel;
  inputShape: number[];
  stages: number[];
  descriptions: string[];
}

export const MODEL_NAMES = ["toy-mlp", "vgg19-blocks"] as const;
export type ModelName = (typeof MODEL_NAMES)[number];

function heConv(filters: number, seed: number): tf.layers.Layer {
  return tf.layers.conv2d({
    filters,
    kernelSize: 3,
    padding: "same",
    activation: "relu",
    kernelInitializer: tf.initializers.heNormal({ seed }),
  });
}

function buildToyMlp(seed: number, classes: number): BuiltModel {
  const input = tf.input({ shape: [16] });
  const hidden = [32, 24, 16];
  let x = input as tf.SymbolicTensor;
  const outputs: tf.SymbolicTensor[] = [];
  const descriptions: string[] = [];
  hidden.forEach((units, i) => {
    x = tf.layers
      .dense({
        units,
        activation: "relu",
        kernelInitializer: tf.initializers.heNormal({ seed: seed * 100 + i + 1 }),
      })
      .apply(x) as tf.SymbolicTensor;
    outputs.push(x);
    descriptions.push(`dense${i} relu ${units}`);
  });
  x = tf.layers
    .dense({ units: classes, kernelInitializer: tf.initializers.heNormal({ seed: seed * 100 + 99 }) })
    .apply(x) as tf.SymbolicTensor;
  outputs.push(x);
  descriptions.push(`logits ${classes}`);
  return {
    model: tf.model({ inputs: input, outputs }),
    inputShape: [16],
    stages: outputs.map((_, i) => i),
    descriptions,
  };
}

function buildVgg19Blocks(seed: number, classes: number): BuiltModel {
  const input = tf.input({ shape: [32, 32, 3] });
  const convsPerBlock = [2, 2, 4, 4, 4];
  const channels = [4, 8, 16, 16, 16];
  let x = input as tf.SymbolicTensor;
  const outputs: tf.SymbolicTensor[] = [];
  const stages: number[] = [];
  const descriptions: string[] = [];
  let layer = 0;
  convsPerBlock.forEach((count, block) => {
    for (let i = 0; i < count; i++) {
      x = heConv(channels[block], seed * 100 + layer + 1).apply(x) as tf.SymbolicTensor;
      outputs.push(x);
      stages.push(block);
      descriptions.push(`block${block + 1} conv${i + 1} relu ${channels[block]}ch`);
      layer++;
    }
    x = tf.layers.maxPooling2d({ poolSize: 2 }).apply(x) as tf.SymbolicTensor;
  });
  x = tf.layers.flatten().apply(x) as tf.SymbolicTensor;
  const fcStage = convsPerBlock.length;
  for (const units of [32, 32]) {
    x = tf.layers
      .dense({
        units,
        activation: "relu",
        kernelInitializer: tf.initializers.heNormal({ seed: seed * 100 + layer + 1 }),
      })
      .apply(x) as tf.SymbolicTensor;
    outputs.push(x);
    stages.push(fcStage);
    descriptions.push(`fc relu ${units}`);
    layer++;
  }
  x = tf.layers
    .dense({ units: classes, kernelInitializer: tf.initializers.heNormal({ seed: seed * 100 + 99 }) })
    .apply(x) as tf.SymbolicTensor;
  outputs.push(x);
  stages.push(fcStage);
  descriptions.push(`logits ${classes}`);
  return { model: tf.model({ inputs: input, outputs }), inputShape: [32, 32, 3], stages, descriptions };
}

export function buildModel(name: string, seed: number, classes: number): BuiltModel {
  switch (name) {
    case "toy-mlp":
      return buildToyMlp(seed, classes);
    case "vgg19-blocks":
      return buildVgg19Blocks(seed, classes);
    default:
      throw new Error(`unknown model ${JSON.stringify(name)}; available: ${MODEL_NAMES.join(", ")}`);
  }
}
