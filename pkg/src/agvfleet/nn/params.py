"""Flat parameter storage with named layer views.

All of a network's weights live in one contiguous float64 vector; each layer
is a reshaped view into it. Optimizer steps and soft target updates operate
on the flat vector, while forward/backward code addresses layers by name.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ParamLayout", "NetworkParams"]


@dataclass(frozen=True)
class ParamLayout:
    """Ordered (name, shape) entries mapping a flat vector to layer views."""

    entries: tuple[tuple[str, tuple[int, ...]], ...]

    @classmethod
    def of(cls, entries: list[tuple[str, tuple[int, ...]]]) -> "ParamLayout":
        names = [name for name, _ in entries]
        if len(set(names)) != len(names):
            raise ValueError("duplicate layer names in layout")
        return cls(tuple((name, tuple(shape)) for name, shape in entries))

    @property
    def size(self) -> int:
        return sum(int(np.prod(shape)) for _, shape in self.entries)

    def offsets(self) -> dict[str, tuple[int, tuple[int, ...]]]:
        out = {}
        offset = 0
        for name, shape in self.entries:
            out[name] = (offset, shape)
            offset += int(np.prod(shape))
        return out


class NetworkParams:
    """One network's parameters plus Adam moments, all over a flat vector.

    Views cover the vector exactly with no overlap; writing through a view
    mutates the flat vector and vice versa.
    """

    def __init__(self, layout: ParamLayout, flat: np.ndarray | None = None) -> None:
        self.layout = layout
        n = layout.size
        self.flat = np.zeros(n, dtype=np.float64) if flat is None else flat
        if self.flat.shape != (n,):
            raise ValueError(f"flat vector must have shape ({n},)")
        self.views: dict[str, np.ndarray] = {}
        for name, (offset, shape) in layout.offsets().items():
            self.views[name] = self.flat[offset : offset + int(np.prod(shape))].reshape(shape)
        self.adam_m = np.zeros(n, dtype=np.float64)
        self.adam_v = np.zeros(n, dtype=np.float64)
        self.adam_t = 0

    def __getitem__(self, name: str) -> np.ndarray:
        return self.views[name]

    @property
    def size(self) -> int:
        return self.flat.shape[0]

    def grad_like(self) -> "NetworkParams":
        """Zeroed container with the same layout (used to accumulate gradients)."""
        return NetworkParams(self.layout)

    def copy(self) -> "NetworkParams":
        other = NetworkParams(self.layout, self.flat.copy())
        other.adam_m = self.adam_m.copy()
        other.adam_v = self.adam_v.copy()
        other.adam_t = self.adam_t
        return other
