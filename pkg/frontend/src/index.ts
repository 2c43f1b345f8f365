export { ExportError, ImageDecodeError, InvalidJob, ModelUnavailable } from "./errors.js";
export { canonicalJson, decodeContainer, encodeContainer } from "./container.js";
export { parseSafetensors } from "./safetensors.js";
export type { Checkpoint } from "./safetensors.js";
export { CONTEXT_LENGTH, Tokenizer, loadMerges } from "./tokenizer.js";
export { IMAGE_MEAN, IMAGE_STD, decodeImage, preprocess } from "./image.js";
export { embedDim, runText, runVisual } from "./model.js";
export type { ClipModel, TextEncoder, VisualEncoder } from "./model.js";
export { MODEL_ID, assembleModel, loadModel } from "./weights.js";
export {
  DEFAULT_CROP,
  DEFAULT_TEMPLATE,
  exportImageFeatures,
  exportTextFeatures,
  imageId,
  validateJob,
  writeManifestFragment,
} from "./exporter.js";
export type { ExportJob, ExportedFeatureMap } from "./exporter.js";
export { main } from "./cli.js";
