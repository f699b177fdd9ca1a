"""Id-space layout: how text, base VQ, extended, and boundary ids are packed.

The global id space is three contiguous ranges followed by two specials:

    [0, n_text)                          text ids (opaque to this library)
    [n_text, n_text + base_k)            base VQ ids
    [n_text + base_k, ... + ext_size)    extended (merged) ids
    BOI, EOI                             image-boundary markers, appended last
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameter

DEFAULT_N_TEXT = 32000
DEFAULT_BASE_K = 8192
DEFAULT_EXT_SIZE = 8192


@dataclass(frozen=True)
class IdLayout:
    n_text: int = DEFAULT_N_TEXT
    base_k: int = DEFAULT_BASE_K
    ext_size: int = DEFAULT_EXT_SIZE

    def __post_init__(self):
        if self.n_text < 0 or self.base_k < 1 or self.ext_size < 0:
            raise InvalidParameter(
                f"bad layout: n_text={self.n_text} base_k={self.base_k} "
                f"ext_size={self.ext_size}"
            )

    @property
    def vq_start(self) -> int:
        return self.n_text

    @property
    def ext_start(self) -> int:
        return self.n_text + self.base_k

    @property
    def ext_end(self) -> int:
        return self.ext_start + self.ext_size

    @property
    def boi(self) -> int:
        return self.ext_end

    @property
    def eoi(self) -> int:
        return self.ext_end + 1

    @property
    def total_ids(self) -> int:
        """Row count of an embedding table covering this layout."""
        return self.ext_end + 2

    def is_text(self, tid: int) -> bool:
        return 0 <= tid < self.n_text

    def is_base(self, tid: int) -> bool:
        return self.vq_start <= tid < self.ext_start

    def is_ext(self, tid: int) -> bool:
        return self.ext_start <= tid < self.ext_end

    def is_image(self, tid: int) -> bool:
        return self.vq_start <= tid < self.ext_end

    def is_valid(self, tid: int) -> bool:
        return 0 <= tid < self.total_ids

    def to_dict(self) -> dict:
        return {
            "n_text": self.n_text,
            "base_k": self.base_k,
            "ext_size": self.ext_size,
            "boi": self.boi,
            "eoi": self.eoi,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IdLayout":
        return cls(n_text=d["n_text"], base_k=d["base_k"], ext_size=d["ext_size"])
