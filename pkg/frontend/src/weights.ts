/**
 * Checkpoint assembly. Tensor names follow the released CLIP state dict
 * (visual.conv1.weight, transformer.resblocks.N.attn.in_proj_weight, ...),
 * which tools/convert_weights.py preserves. Stage depths are discovered from
 * the names so the small synthetic checkpoints used in tests load through
 * the same code path as the real one.
 */

import * as fs from "node:fs";

import { ModelUnavailable } from "./errors.js";
import { Checkpoint, parseSafetensors } from "./safetensors.js";
import {
  BottleneckWeights,
  ClipModel,
  ConvBn,
  TextBlockWeights,
  TextEncoder,
  VisualEncoder,
} from "./model.js";
import { BatchNorm, Linear, Tensor } from "./tensor.js";

export const MODEL_ID = "CLIP ResNet-50";

export function loadModel(path: string): ClipModel {
  let blob: Buffer;
  try {
    blob = fs.readFileSync(path);
  } catch (e) {
    throw new ModelUnavailable(
      `no pretrained weights at ${path} (${(e as Error).message}); ` +
        `convert the released checkpoint with tools/convert_weights.py`,
    );
  }
  return assembleModel(parseSafetensors(blob, path));
}

export function assembleModel(ckpt: Checkpoint): ClipModel {
  const get = (name: string): Tensor => {
    const t = ckpt.tensors.get(name);
    if (!t) throw new ModelUnavailable(`checkpoint is missing tensor ${name}`);
    return t;
  };
  const has = (name: string): boolean => ckpt.tensors.has(name);
  const bn = (prefix: string): BatchNorm => ({
    gamma: get(`${prefix}.weight`),
    beta: get(`${prefix}.bias`),
    mean: get(`${prefix}.running_mean`),
    variance: get(`${prefix}.running_var`),
  });
  const lin = (prefix: string): Linear => ({
    weight: get(`${prefix}.weight`),
    bias: get(`${prefix}.bias`),
  });

  // Stem: three 3x3 convs, the first at stride 2.
  const stem: ConvBn[] = [1, 2, 3].map((i) => ({
    conv: get(`visual.conv${i}.weight`),
    stride: i === 1 ? 2 : 1,
    pad: 1,
    bn: bn(`visual.bn${i}`),
  }));

  const layers: BottleneckWeights[][] = [];
  for (let stage = 1; stage <= 4; stage++) {
    const blocks: BottleneckWeights[] = [];
    for (let b = 0; has(`visual.layer${stage}.${b}.conv1.weight`); b++) {
      const p = `visual.layer${stage}.${b}`;
      const pool = stage > 1 && b === 0 ? 2 : 1;
      const block: BottleneckWeights = {
        conv1: { conv: get(`${p}.conv1.weight`), stride: 1, pad: 0, bn: bn(`${p}.bn1`) },
        conv2: { conv: get(`${p}.conv2.weight`), stride: 1, pad: 1, bn: bn(`${p}.bn2`) },
        conv3: { conv: get(`${p}.conv3.weight`), stride: 1, pad: 0, bn: bn(`${p}.bn3`) },
        pool,
      };
      if (has(`${p}.downsample.0.weight`)) {
        block.downsample = {
          pool,
          conv: get(`${p}.downsample.0.weight`),
          bn: bn(`${p}.downsample.1`),
        };
      }
      blocks.push(block);
    }
    if (blocks.length === 0) {
      throw new ModelUnavailable(`checkpoint has no blocks in visual.layer${stage}`);
    }
    layers.push(blocks);
  }

  const visual: VisualEncoder = {
    stem,
    layers,
    vProj: lin("visual.attnpool.v_proj"),
    cProj: lin("visual.attnpool.c_proj"),
  };

  const tokenEmbedding = get("token_embedding.weight");
  const width = tokenEmbedding.shape[1];
  const heads = ckpt.metadata["text_heads"]
    ? Number(ckpt.metadata["text_heads"])
    : Math.max(1, Math.round(width / 64)); // released checkpoints use width/64
  if (!Number.isInteger(heads) || heads < 1 || width % heads !== 0) {
    throw new ModelUnavailable(`text width ${width} is not divisible into ${heads} heads`);
  }

  const blocks: TextBlockWeights[] = [];
  for (let n = 0; has(`transformer.resblocks.${n}.attn.in_proj_weight`); n++) {
    const p = `transformer.resblocks.${n}`;
    blocks.push({
      ln1: { gamma: get(`${p}.ln_1.weight`), beta: get(`${p}.ln_1.bias`) },
      attn: {
        inProj: { weight: get(`${p}.attn.in_proj_weight`), bias: get(`${p}.attn.in_proj_bias`) },
        outProj: lin(`${p}.attn.out_proj`),
        heads,
      },
      ln2: { gamma: get(`${p}.ln_2.weight`), beta: get(`${p}.ln_2.bias`) },
      mlpFc: lin(`${p}.mlp.c_fc`),
      mlpProj: lin(`${p}.mlp.c_proj`),
    });
  }
  if (blocks.length === 0) {
    throw new ModelUnavailable("checkpoint has no transformer.resblocks");
  }

  const text: TextEncoder = {
    tokenEmbedding,
    positionalEmbedding: get("positional_embedding"),
    blocks,
    lnFinal: { gamma: get("ln_final.weight"), beta: get("ln_final.bias") },
    projection: get("text_projection"),
  };

  const model = { visual, text };
  checkConsistency(model);
  return model;
}

/** Cross-checks that make a wrong or foreign checkpoint fail loudly. */
function checkConsistency(model: ClipModel): void {
  const { visual, text } = model;
  if (visual.stem[0].conv.shape[1] !== 3) {
    throw new ModelUnavailable("stem conv does not take a 3-channel image");
  }
  const cFinal = visual.vProj.weight.shape[1];
  const lastStage = visual.layers[3];
  const lastConv = lastStage[lastStage.length - 1].conv3.conv;
  if (lastConv.shape[0] !== cFinal) {
    throw new ModelUnavailable(
      `backbone ends at ${lastConv.shape[0]} channels but the value projection expects ${cFinal}`,
    );
  }
  const cJoint = visual.cProj.weight.shape[0];
  if (text.projection.shape[1] !== cJoint) {
    throw new ModelUnavailable(
      `image side projects to ${cJoint} dims but text projects to ${text.projection.shape[1]}`,
    );
  }
  if (text.projection.shape[0] !== text.tokenEmbedding.shape[1]) {
    throw new ModelUnavailable("text projection does not match the transformer width");
  }
}
