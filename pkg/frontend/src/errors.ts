/** Error family for the exporter. Every thrown error is one of these. */
export class ExportError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/**
 * Pretrained weights are missing, unreadable, or not a CLIP ResNet-50
 * checkpoint. Exports cannot run without them.
 */
export class ModelUnavailable extends ExportError {}

/** An input image could not be decoded or is smaller than the crop. */
export class ImageDecodeError extends ExportError {}

/** The export job itself is malformed (bad crop, empty token list, ...). */
export class InvalidJob extends ExportError {}
