/**
 * Minimal dense-tensor math on Float32Array, enough for a CLIP ResNet-50
 * forward pass. Layout is row-major; images are [C, H, W], sequences [L, D].
 *
 * Values are stored in f32 (matching the published checkpoints' compute
 * dtype) while each reduction accumulates in f64 before narrowing.
 */

export interface Tensor {
  data: Float32Array;
  shape: number[];
}

export function zeros(shape: number[]): Tensor {
  return { data: new Float32Array(shape.reduce((a, b) => a * b, 1)), shape: [...shape] };
}

export function tensorFrom(shape: number[], values: ArrayLike<number>): Tensor {
  const size = shape.reduce((a, b) => a * b, 1);
  if (values.length !== size) {
    throw new Error(`shape [${shape}] wants ${size} values, got ${values.length}`);
  }
  return { data: Float32Array.from(values), shape: [...shape] };
}

export function assertShape(t: Tensor, shape: number[], what: string): void {
  if (t.shape.length !== shape.length || t.shape.some((d, i) => d !== shape[i])) {
    throw new Error(`${what}: expected shape [${shape}], got [${t.shape}]`);
  }
}

// ------------------------------------------------------------- conv / pool

/**
 * 2-D convolution, x [Cin, H, W] * w [Cout, Cin, kh, kw] -> [Cout, H', W'],
 * H' = floor((H + 2*pad - kh) / stride) + 1. No bias (ResNet convs have none).
 */
export function conv2d(x: Tensor, w: Tensor, stride: number, pad: number): Tensor {
  const [cin, h, wd] = x.shape;
  const [cout, cinW, kh, kw] = w.shape;
  if (cin !== cinW) {
    throw new Error(`conv2d: input has ${cin} channels, kernel expects ${cinW}`);
  }
  const oh = Math.floor((h + 2 * pad - kh) / stride) + 1;
  const ow = Math.floor((wd + 2 * pad - kw) / stride) + 1;
  const out = zeros([cout, oh, ow]);
  const xd = x.data;
  const wdat = w.data;
  const od = out.data;
  for (let oc = 0; oc < cout; oc++) {
    const wBase = oc * cin * kh * kw;
    for (let oy = 0; oy < oh; oy++) {
      const iy0 = oy * stride - pad;
      for (let ox = 0; ox < ow; ox++) {
        const ix0 = ox * stride - pad;
        let acc = 0;
        for (let ic = 0; ic < cin; ic++) {
          const xBase = ic * h * wd;
          const wcBase = wBase + ic * kh * kw;
          for (let ky = 0; ky < kh; ky++) {
            const iy = iy0 + ky;
            if (iy < 0 || iy >= h) continue; // zero padding
            const xRow = xBase + iy * wd;
            const wRow = wcBase + ky * kw;
            for (let kx = 0; kx < kw; kx++) {
              const ix = ix0 + kx;
              if (ix < 0 || ix >= wd) continue;
              acc += xd[xRow + ix] * wdat[wRow + kx];
            }
          }
        }
        od[(oc * oh + oy) * ow + ox] = acc;
      }
    }
  }
  return out;
}

/** Average pooling with kernel == stride == k, floor division on odd tails. */
export function avgPool2d(x: Tensor, k: number): Tensor {
  if (k === 1) return x;
  const [c, h, w] = x.shape;
  const oh = Math.floor(h / k);
  const ow = Math.floor(w / k);
  const out = zeros([c, oh, ow]);
  const inv = 1 / (k * k);
  for (let ch = 0; ch < c; ch++) {
    for (let oy = 0; oy < oh; oy++) {
      for (let ox = 0; ox < ow; ox++) {
        let acc = 0;
        for (let ky = 0; ky < k; ky++) {
          const row = (ch * h + oy * k + ky) * w + ox * k;
          for (let kx = 0; kx < k; kx++) acc += x.data[row + kx];
        }
        out.data[(ch * oh + oy) * ow + ox] = acc * inv;
      }
    }
  }
  return out;
}

// ------------------------------------------------------- norms / pointwise

export interface BatchNorm {
  gamma: Tensor; // [C]
  beta: Tensor;
  mean: Tensor;
  variance: Tensor;
}

const BN_EPS = 1e-5;

/** Inference-mode batch norm over the channel axis of [C, H, W], in place. */
export function batchNorm(x: Tensor, bn: BatchNorm): Tensor {
  const [c, h, w] = x.shape;
  const plane = h * w;
  for (let ch = 0; ch < c; ch++) {
    const scale = bn.gamma.data[ch] / Math.sqrt(bn.variance.data[ch] + BN_EPS);
    const shift = bn.beta.data[ch] - bn.mean.data[ch] * scale;
    const base = ch * plane;
    for (let i = 0; i < plane; i++) {
      x.data[base + i] = x.data[base + i] * scale + shift;
    }
  }
  return x;
}

export function relu(x: Tensor): Tensor {
  for (let i = 0; i < x.data.length; i++) {
    if (x.data[i] < 0) x.data[i] = 0;
  }
  return x;
}

export function addInPlace(x: Tensor, y: Tensor): Tensor {
  for (let i = 0; i < x.data.length; i++) x.data[i] += y.data[i];
  return x;
}

/** x * sigmoid(1.702 x), the GELU approximation CLIP trains with. */
export function quickGelu(x: Tensor): Tensor {
  for (let i = 0; i < x.data.length; i++) {
    const v = x.data[i];
    x.data[i] = v / (1 + Math.exp(-1.702 * v));
  }
  return x;
}

// -------------------------------------------------------------- dense math

export interface Linear {
  weight: Tensor; // [Out, In]
  bias: Tensor; // [Out]
}

/** x [N, In] -> [N, Out]. */
export function linear(x: Tensor, lin: Linear): Tensor {
  const [n, din] = x.shape;
  const [dout, dinW] = lin.weight.shape;
  if (din !== dinW) {
    throw new Error(`linear: input dim ${din}, weight expects ${dinW}`);
  }
  const out = zeros([n, dout]);
  for (let r = 0; r < n; r++) {
    const xRow = r * din;
    for (let o = 0; o < dout; o++) {
      const wRow = o * din;
      let acc = lin.bias.data[o];
      for (let i = 0; i < din; i++) acc += x.data[xRow + i] * lin.weight.data[wRow + i];
      out.data[r * dout + o] = acc;
    }
  }
  return out;
}

/** Plain a [M, K] @ b [K, N]. */
export function matmul(a: Tensor, b: Tensor): Tensor {
  const [m, k] = a.shape;
  const [kB, n] = b.shape;
  if (k !== kB) throw new Error(`matmul: inner dims ${k} and ${kB} differ`);
  const out = zeros([m, n]);
  for (let r = 0; r < m; r++) {
    for (let c = 0; c < n; c++) {
      let acc = 0;
      for (let i = 0; i < k; i++) acc += a.data[r * k + i] * b.data[i * n + c];
      out.data[r * n + c] = acc;
    }
  }
  return out;
}

export interface LayerNormWeights {
  gamma: Tensor; // [D]
  beta: Tensor;
}

const LN_EPS = 1e-5;

/** Layer norm over the last axis of [N, D]. */
export function layerNorm(x: Tensor, ln: LayerNormWeights): Tensor {
  const [n, d] = x.shape;
  const out = zeros([n, d]);
  for (let r = 0; r < n; r++) {
    const base = r * d;
    let mean = 0;
    for (let i = 0; i < d; i++) mean += x.data[base + i];
    mean /= d;
    let variance = 0;
    for (let i = 0; i < d; i++) {
      const dv = x.data[base + i] - mean;
      variance += dv * dv;
    }
    variance /= d;
    const inv = 1 / Math.sqrt(variance + LN_EPS);
    for (let i = 0; i < d; i++) {
      out.data[base + i] = (x.data[base + i] - mean) * inv * ln.gamma.data[i] + ln.beta.data[i];
    }
  }
  return out;
}

/** Row-wise softmax of [N, D], max-subtracted for stability, in place. */
export function softmaxRows(x: Tensor): Tensor {
  const [n, d] = x.shape;
  for (let r = 0; r < n; r++) {
    const base = r * d;
    let hi = -Infinity;
    for (let i = 0; i < d; i++) hi = Math.max(hi, x.data[base + i]);
    let sum = 0;
    for (let i = 0; i < d; i++) {
      const e = Math.exp(x.data[base + i] - hi);
      x.data[base + i] = e;
      sum += e;
    }
    for (let i = 0; i < d; i++) x.data[base + i] /= sum;
  }
  return x;
}
