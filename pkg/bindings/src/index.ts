export {
  ClosedHandleError,
  FileFormatError,
  IndexOutOfRangeError,
  LayoutViolationError,
  MalformedSequenceError,
  ShapeError,
  TrainingError,
  UnknownTokenError,
  VbpeError,
} from "./errors.js";
export { BoundTokenizer, load } from "./tokenizer.js";
export { trainVocab } from "./train.js";
export type { TrainOptions, TrainOutcome, TrainProgress } from "./train.js";
export { HORIZONTAL, VERTICAL, parseVocabJson, readVocabFile } from "./vocab.js";
export type { LayoutInfo, MergeRule, Orientation, Vocab } from "./vocab.js";
