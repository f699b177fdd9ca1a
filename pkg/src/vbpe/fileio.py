"""Readers and writers for the on-disk artifact formats.

Binary formats are little-endian with a 4-byte magic and a u16 version:

    .vbpg  grid corpus      "VBPG" | u16 version | records: h u32, w u32, h*w cells u32
    .vbpc  codebook         "VBPC" | u16 version | K u32 | z u32 | K*z f32
    .bin   embedding table  "VBPE" | u16 version | rows u32 | cols u32 | rows*cols f32

JSON artifacts carry a "format" and "version" field. tokens/sequence files
are JSONL with a header line.
"""

from __future__ import annotations

import json
import struct
from typing import IO, Iterable

import numpy as np

from .errors import FileFormatError, IndexOutOfRange
from .grid import ORIENTATIONS, MergeRule, Vocabulary, as_quant_grid
from .layout import IdLayout

CORPUS_MAGIC = b"VBPG"
CODEBOOK_MAGIC = b"VBPC"
EMBEDDING_MAGIC = b"VBPE"
FORMAT_VERSION = 1

VOCAB_FORMAT = "vbpe-vocab"
TOKENS_FORMAT = "vbpe-tokens"
SEQUENCES_FORMAT = "vbpe-sequences"
PLAN_FORMAT = "vbpe-plan"


def _read_exact(fh: IO[bytes], n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise FileFormatError(
            f"truncated file: wanted {n} bytes for {what}, got {len(data)}",
            offset=fh.tell() - len(data),
        )
    return data


def _check_header(fh: IO[bytes], magic: bytes) -> int:
    got = _read_exact(fh, 4, "magic")
    if got != magic:
        raise FileFormatError(f"bad magic {got!r}, expected {magic!r}", offset=0)
    (version,) = struct.unpack("<H", _read_exact(fh, 2, "version"))
    if version != FORMAT_VERSION:
        raise FileFormatError(f"unsupported version {version}", offset=4)
    return version


# --- grid corpus (.vbpg) ---------------------------------------------------


def write_corpus(path, grids: Iterable[np.ndarray]) -> int:
    """Write quantized grids; returns the number of records written."""
    n = 0
    with open(path, "wb") as fh:
        fh.write(CORPUS_MAGIC)
        fh.write(struct.pack("<H", FORMAT_VERSION))
        for grid in grids:
            arr = as_quant_grid(grid)
            h, w = arr.shape
            fh.write(struct.pack("<II", h, w))
            fh.write(arr.astype("<u4").tobytes())
            n += 1
    return n


def read_corpus(path, base_k: int | None = None) -> list[np.ndarray]:
    grids = []
    with open(path, "rb") as fh:
        _check_header(fh, CORPUS_MAGIC)
        while True:
            head = fh.read(8)
            if not head:
                break
            if len(head) != 8:
                raise FileFormatError(
                    "truncated record header", offset=fh.tell() - len(head)
                )
            h, w = struct.unpack("<II", head)
            if h == 0 or w == 0 or h * w > 1 << 28:
                raise FileFormatError(
                    f"implausible grid shape {h}x{w}", offset=fh.tell() - 8
                )
            raw = _read_exact(fh, 4 * h * w, f"{h}x{w} grid cells")
            cells = np.frombuffer(raw, dtype="<u4").reshape(h, w).astype(np.int32)
            if base_k is not None and cells.max() >= base_k:
                raise IndexOutOfRange(
                    f"corpus cell value {int(cells.max())} >= base_k {base_k}"
                )
            grids.append(cells)
    return grids


# --- codebook (.vbpc) ------------------------------------------------------


def write_codebook(path, entries: np.ndarray) -> None:
    arr = np.ascontiguousarray(entries, dtype=np.float32)
    if arr.ndim != 2:
        raise FileFormatError(f"codebook must be 2D, got shape {arr.shape}")
    with open(path, "wb") as fh:
        fh.write(CODEBOOK_MAGIC)
        fh.write(struct.pack("<H", FORMAT_VERSION))
        fh.write(struct.pack("<II", arr.shape[0], arr.shape[1]))
        fh.write(arr.astype("<f4").tobytes())


def read_codebook(path) -> np.ndarray:
    with open(path, "rb") as fh:
        _check_header(fh, CODEBOOK_MAGIC)
        k, z = struct.unpack("<II", _read_exact(fh, 8, "codebook dims"))
        raw = _read_exact(fh, 4 * k * z, "codebook entries")
        return np.frombuffer(raw, dtype="<f4").reshape(k, z).astype(np.float64)


# --- embedding table -------------------------------------------------------


def write_embeddings(path, table: np.ndarray) -> None:
    arr = np.ascontiguousarray(table, dtype=np.float32)
    with open(path, "wb") as fh:
        fh.write(EMBEDDING_MAGIC)
        fh.write(struct.pack("<H", FORMAT_VERSION))
        fh.write(struct.pack("<II", arr.shape[0], arr.shape[1]))
        fh.write(arr.astype("<f4").tobytes())


def read_embeddings(path) -> np.ndarray:
    with open(path, "rb") as fh:
        _check_header(fh, EMBEDDING_MAGIC)
        rows, cols = struct.unpack("<II", _read_exact(fh, 8, "embedding dims"))
        raw = _read_exact(fh, 4 * rows * cols, "embedding entries")
        return np.frombuffer(raw, dtype="<f4").reshape(rows, cols).copy()


# --- vocabulary (json) -----------------------------------------------------


def vocab_to_json(vocab: Vocabulary) -> str:
    doc = {
        "format": VOCAB_FORMAT,
        "version": FORMAT_VERSION,
        "base_size": vocab.layout.base_k,
        "offsets": vocab.layout.to_dict(),
        "merges": [
            {
                "id": rule.new_id,
                "left": rule.left,
                "right": rule.right,
                "orientation": rule.orientation,
                "priority": rule.priority,
                "frequency": rule.frequency,
                "spatial": rule.spatial,
            }
            for rule in vocab.merges
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_vocab(path, vocab: Vocabulary) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(vocab_to_json(vocab))


def _vocab_from_doc(doc: dict) -> Vocabulary:
    for key in ("format", "version", "base_size", "offsets", "merges"):
        if key not in doc:
            raise FileFormatError(f"vocabulary file missing key {key!r}")
    if doc["format"] != VOCAB_FORMAT:
        raise FileFormatError(f"not a vocabulary file: format={doc['format']!r}")
    if doc["version"] != FORMAT_VERSION:
        raise FileFormatError(f"unsupported vocabulary version {doc['version']}")
    layout = IdLayout.from_dict(doc["offsets"])
    if layout.base_k != doc["base_size"]:
        raise FileFormatError("base_size disagrees with offsets.base_k")
    merges = []
    for i, m in enumerate(doc["merges"]):
        try:
            rule = MergeRule(
                new_id=int(m["id"]),
                left=int(m["left"]),
                right=int(m["right"]),
                orientation=str(m["orientation"]),
                priority=float(m["priority"]),
                frequency=float(m["frequency"]),
                spatial=float(m["spatial"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FileFormatError(f"bad merge entry {i}: {exc}") from exc
        if rule.orientation not in ORIENTATIONS:
            raise FileFormatError(
                f"bad merge entry {i}: orientation {rule.orientation!r}"
            )
        merges.append(rule)
    return Vocabulary(layout, merges)


def read_vocab(path) -> Vocabulary:
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"invalid JSON: {exc.msg}", offset=exc.pos) from exc
    return _vocab_from_doc(doc)


# --- token records (jsonl) -------------------------------------------------


def write_tokens(path, records: Iterable[tuple[int, int, list[int]]]) -> int:
    """Write encoded images as JSONL: header line, then {h, w, ids} per image."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"format": TOKENS_FORMAT, "version": FORMAT_VERSION}) + "\n")
        for h, w, ids in records:
            fh.write(json.dumps({"h": h, "w": w, "ids": list(map(int, ids))}) + "\n")
            n += 1
    return n


def read_tokens(path) -> list[tuple[int, int, list[int]]]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        try:
            head = json.loads(header)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"invalid JSONL header: {exc.msg}") from exc
        if head.get("format") != TOKENS_FORMAT or head.get("version") != FORMAT_VERSION:
            raise FileFormatError(f"not a tokens file: header {head!r}")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                records.append((int(rec["h"]), int(rec["w"]), [int(x) for x in rec["ids"]]))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise FileFormatError(f"bad tokens record on line {lineno}: {exc}") from exc
    return records


def write_sequences(path, sequences: Iterable[list[int]]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            json.dumps({"format": SEQUENCES_FORMAT, "version": FORMAT_VERSION}) + "\n"
        )
        for ids in sequences:
            fh.write(json.dumps({"ids": list(map(int, ids))}) + "\n")
            n += 1
    return n
