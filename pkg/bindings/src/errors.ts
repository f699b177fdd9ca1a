/**
 * Exceptions mirroring the core library's error classes. Each carries the
 * core's stable string code so callers can dispatch without message parsing.
 */

export class VbpeError extends Error {
  readonly code: string;

  constructor(message: string, code = "error") {
    super(message);
    this.name = new.target.name;
    this.code = code;
  }
}

export class FileFormatError extends VbpeError {
  readonly offset?: number;

  constructor(message: string, offset?: number) {
    super(offset === undefined ? message : `${message} (at byte offset ${offset})`, "file-format");
    this.offset = offset;
  }
}

export class UnknownTokenError extends VbpeError {
  constructor(message: string) {
    super(message, "unknown-token");
  }
}

export class ShapeError extends VbpeError {
  constructor(message: string) {
    super(message, "shape-error");
  }
}

export class IndexOutOfRangeError extends VbpeError {
  constructor(message: string) {
    super(message, "index-out-of-range");
  }
}

export class MalformedSequenceError extends VbpeError {
  constructor(message: string) {
    super(message, "malformed-sequence");
  }
}

export class LayoutViolationError extends VbpeError {
  constructor(message: string) {
    super(message, "layout-violation");
  }
}

export class ClosedHandleError extends VbpeError {
  constructor(message: string) {
    super(message, "closed-handle");
  }
}

export class TrainingError extends VbpeError {
  constructor(message: string) {
    super(message, "training");
  }
}
