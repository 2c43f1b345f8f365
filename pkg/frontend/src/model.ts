/**
 * CLIP ResNet-50 forward passes on plain tensors.
 *
 * The visual path runs the modified ResNet (3-conv stem, blur-pool
 * bottlenecks) and stops before the attention pooling; instead, the pool's
 * value and output projections are applied at every spatial position so each
 * patch lands in the joint image-text space. The text path is the standard
 * transformer with causal masking, pooled at the end-sentinel position.
 */

import {
  BatchNorm,
  Linear,
  LayerNormWeights,
  Tensor,
  addInPlace,
  avgPool2d,
  batchNorm,
  conv2d,
  layerNorm,
  linear,
  matmul,
  quickGelu,
  relu,
  softmaxRows,
  zeros,
} from "./tensor.js";

// ------------------------------------------------------------------ visual

export interface ConvBn {
  conv: Tensor; // [out, in, kh, kw]
  stride: number;
  pad: number;
  bn: BatchNorm;
}

export interface BottleneckWeights {
  conv1: ConvBn; // 1x1
  conv2: ConvBn; // 3x3
  conv3: ConvBn; // 1x1, expands 4x
  pool: number; // spatial reduction after conv2; 1 = none
  downsample?: { pool: number; conv: Tensor; bn: BatchNorm };
}

export interface VisualEncoder {
  stem: ConvBn[]; // three 3x3 convs, first with stride 2
  layers: BottleneckWeights[][]; // four stages
  vProj: Linear; // attention pool value projection
  cProj: Linear; // attention pool output projection
}

function runConvBn(x: Tensor, cb: ConvBn): Tensor {
  return batchNorm(conv2d(x, cb.conv, cb.stride, cb.pad), cb.bn);
}

function runBottleneck(x: Tensor, block: BottleneckWeights): Tensor {
  let out = relu(runConvBn(x, block.conv1));
  out = relu(runConvBn(out, block.conv2));
  out = avgPool2d(out, block.pool);
  out = runConvBn(out, block.conv3);
  let identity = x;
  if (block.downsample) {
    identity = avgPool2d(x, block.downsample.pool);
    identity = batchNorm(conv2d(identity, block.downsample.conv, 1, 0), block.downsample.bn);
  }
  return relu(addInPlace(out, identity));
}

/** Image [3, H, W] -> patch features [Hf, Wf, C] in the joint space. */
export function runVisual(v: VisualEncoder, image: Tensor): Tensor {
  let x = image;
  x = relu(runConvBn(x, v.stem[0]));
  x = relu(runConvBn(x, v.stem[1]));
  x = relu(runConvBn(x, v.stem[2]));
  x = avgPool2d(x, 2);
  for (const stage of v.layers) {
    for (const block of stage) x = runBottleneck(x, block);
  }
  const [cFinal, hf, wf] = x.shape;
  // [Cfinal, Hf, Wf] -> rows [Hf*Wf, Cfinal] for the position-wise projection
  const rows = zeros([hf * wf, cFinal]);
  for (let c = 0; c < cFinal; c++) {
    for (let p = 0; p < hf * wf; p++) {
      rows.data[p * cFinal + c] = x.data[c * hf * wf + p];
    }
  }
  const projected = linear(linear(rows, v.vProj), v.cProj);
  return { data: projected.data, shape: [hf, wf, projected.shape[1]] };
}

// -------------------------------------------------------------------- text

export interface AttentionWeights {
  inProj: Linear; // [3D, D] fused q/k/v
  outProj: Linear;
  heads: number;
}

export interface TextBlockWeights {
  ln1: LayerNormWeights;
  attn: AttentionWeights;
  ln2: LayerNormWeights;
  mlpFc: Linear; // D -> 4D
  mlpProj: Linear; // 4D -> D
}

export interface TextEncoder {
  tokenEmbedding: Tensor; // [vocab, D]
  positionalEmbedding: Tensor; // [context, D]
  blocks: TextBlockWeights[];
  lnFinal: LayerNormWeights;
  projection: Tensor; // [D, C], applied as x @ projection
}

/** Causally masked multi-head self-attention over [L, D]. */
function runAttention(x: Tensor, attn: AttentionWeights): Tensor {
  const [l, d] = x.shape;
  const heads = attn.heads;
  const headDim = d / heads;
  const scale = 1 / Math.sqrt(headDim);
  const qkv = linear(x, attn.inProj); // [L, 3D]
  const out = zeros([l, d]);
  for (let h = 0; h < heads; h++) {
    const qOff = h * headDim;
    const kOff = d + h * headDim;
    const vOff = 2 * d + h * headDim;
    const scores = zeros([l, l]);
    for (let i = 0; i < l; i++) {
      for (let j = 0; j < l; j++) {
        if (j > i) {
          scores.data[i * l + j] = -Infinity; // causal mask
          continue;
        }
        let acc = 0;
        for (let t = 0; t < headDim; t++) {
          acc += qkv.data[i * 3 * d + qOff + t] * qkv.data[j * 3 * d + kOff + t];
        }
        scores.data[i * l + j] = acc * scale;
      }
    }
    softmaxRows(scores);
    for (let i = 0; i < l; i++) {
      for (let t = 0; t < headDim; t++) {
        let acc = 0;
        for (let j = 0; j <= i; j++) {
          acc += scores.data[i * l + j] * qkv.data[j * 3 * d + vOff + t];
        }
        out.data[i * d + qOff + t] = acc;
      }
    }
  }
  return linear(out, attn.outProj);
}

function runTextBlock(x: Tensor, block: TextBlockWeights): Tensor {
  x = addInPlace(x, runAttention(layerNorm(x, block.ln1), block.attn));
  const mlp = linear(quickGelu(linear(layerNorm(x, block.ln2), block.mlpFc)), block.mlpProj);
  return addInPlace(x, mlp);
}

/** One padded id row -> its embedding in the joint space, length C. */
export function runText(t: TextEncoder, ids: number[]): Float32Array {
  const l = ids.length;
  const d = t.tokenEmbedding.shape[1];
  let x = zeros([l, d]);
  for (let i = 0; i < l; i++) {
    const row = ids[i] * d;
    for (let j = 0; j < d; j++) {
      x.data[i * d + j] = t.tokenEmbedding.data[row + j] + t.positionalEmbedding.data[i * d + j];
    }
  }
  for (const block of t.blocks) x = runTextBlock(x, block);
  x = layerNorm(x, t.lnFinal);
  // The end sentinel carries the pooled representation; it holds the
  // highest id of the row by construction.
  let eot = 0;
  for (let i = 1; i < l; i++) {
    if (ids[i] > ids[eot]) eot = i;
  }
  const pooled = { data: x.data.slice(eot * d, (eot + 1) * d), shape: [1, d] };
  return matmul(pooled, t.projection).data;
}

export interface ClipModel {
  visual: VisualEncoder;
  text: TextEncoder;
}

/** Joint embedding width: the output side of the attention pool projection. */
export function embedDim(model: ClipModel): number {
  return model.visual.cProj.weight.shape[0];
}
