"""Shared domain types for the motion-compensated lifting toolkit.

Frames are 2-D integer sample grids. Subband frames (highpass, lowpass)
may carry negative or widened values, so storage is always signed int32,
which leaves headroom beyond the nominal bit depth of the source data.
All value objects are frozen after construction and safe to share across
worker threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, NamedTuple

import numpy as np


class DataFormatError(ValueError):
    """Malformed external data (raw files, sidecars, containers, payloads)."""


class UpdateMode(Enum):
    """Treatment of the inverse-compensated highpass signal in the update step."""

    NO_UPDATE = 0
    COPY_UNCONNECTED = 1
    FSE_FILL = 2


# CLI spelling of each mode: "none" skips the update step entirely, "block"
# is the connectivity-weighted update with unconnected pixels left untouched,
# "block+fse" additionally fills the unconnected pixels by extrapolation.
MODE_CLI_NAMES = {
    UpdateMode.NO_UPDATE: "none",
    UpdateMode.COPY_UNCONNECTED: "block",
    UpdateMode.FSE_FILL: "block+fse",
}
MODE_FROM_CLI = {name: mode for mode, name in MODE_CLI_NAMES.items()}


def floor_scale(value: float) -> int:
    """Arithmetic floor (toward minus infinity), as used by the lifting steps.

    Truncation would break bit-exact inversion for negative update values,
    so this must never be implemented as int().
    """
    if not math.isfinite(value):
        raise ValueError(f"floor_scale requires a finite value, got {value!r}")
    return math.floor(value)


def floor_samples(values: np.ndarray) -> np.ndarray:
    """Elementwise arithmetic floor of a real-valued grid, as int64."""
    return np.floor(values).astype(np.int64)


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Frame:
    """2-D integer sample grid with bit depth.

    ``samples`` is (height, width), row-major. Original frames satisfy
    ``0 <= sample < 2**bit_depth``; subband frames may exceed that range
    in both directions.
    """

    samples: np.ndarray
    bit_depth: int

    def __post_init__(self) -> None:
        raw = np.asarray(self.samples)
        if raw.ndim != 2:
            raise ValueError(f"frame samples must be 2-D, got shape {raw.shape}")
        if raw.size == 0:
            raise ValueError("frame must contain at least one sample")
        if not np.issubdtype(raw.dtype, np.integer):
            raise TypeError(f"frame samples must be integers, got dtype {raw.dtype}")
        if not 1 <= int(self.bit_depth) <= 16:
            raise ValueError(f"bit depth must be in [1, 16], got {self.bit_depth}")
        arr = np.array(raw, dtype=np.int32, order="C")
        object.__setattr__(self, "samples", _freeze(arr))
        object.__setattr__(self, "bit_depth", int(self.bit_depth))

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def max_value(self) -> int:
        return (1 << self.bit_depth) - 1

    def same_geometry(self, other: "Frame") -> bool:
        return (
            self.samples.shape == other.samples.shape
            and self.bit_depth == other.bit_depth
        )

    def in_original_range(self) -> bool:
        return bool(
            self.samples.min() >= 0 and self.samples.max() <= self.max_value
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self.bit_depth == other.bit_depth and np.array_equal(
            self.samples, other.samples
        )

    def __repr__(self) -> str:
        return f"Frame({self.width}x{self.height}, {self.bit_depth}-bit)"


@dataclass(frozen=True, eq=False)
class Sequence:
    """Ordered frames of identical geometry along one axis (time or slice)."""

    frames: tuple[Frame, ...]
    axis_label: str = "time"

    def __post_init__(self) -> None:
        frames = tuple(self.frames)
        if not frames:
            raise ValueError("sequence must contain at least one frame")
        first = frames[0]
        for i, f in enumerate(frames[1:], start=1):
            if not first.same_geometry(f):
                raise ValueError(
                    f"frame {i} geometry {f.width}x{f.height}/{f.bit_depth}-bit "
                    f"differs from frame 0"
                )
        object.__setattr__(self, "frames", frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    @property
    def bit_depth(self) -> int:
        return self.frames[0].bit_depth

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self) -> Iterator[Frame]:
        return iter(self.frames)

    def __getitem__(self, i: int) -> Frame:
        return self.frames[i]


class MotionVector(NamedTuple):
    dx: int
    dy: int


class BlockRegion(NamedTuple):
    """One block of the compensation grid, clipped to the frame."""

    index: int
    bx: int
    by: int
    x0: int
    y0: int
    w: int
    h: int


def grid_dims(width: int, height: int, block_size: int) -> tuple[int, int]:
    """Number of blocks along x and y; boundary blocks are clipped."""
    return -(-width // block_size), -(-height // block_size)


def iter_blocks(width: int, height: int, block_size: int) -> Iterator[BlockRegion]:
    blocks_x, blocks_y = grid_dims(width, height, block_size)
    index = 0
    for by in range(blocks_y):
        y0 = by * block_size
        h = min(block_size, height - y0)
        for bx in range(blocks_x):
            x0 = bx * block_size
            w = min(block_size, width - x0)
            yield BlockRegion(index, bx, by, x0, y0, w, h)
            index += 1


@dataclass(frozen=True, eq=False)
class MotionField:
    """Per-block integer displacements into the reference frame."""

    block_size: int
    blocks_x: int
    blocks_y: int
    vectors: tuple[MotionVector, ...]

    def __post_init__(self) -> None:
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        vectors = tuple(MotionVector(int(v[0]), int(v[1])) for v in self.vectors)
        if len(vectors) != self.blocks_x * self.blocks_y:
            raise ValueError(
                f"expected {self.blocks_x * self.blocks_y} vectors, "
                f"got {len(vectors)}"
            )
        object.__setattr__(self, "vectors", vectors)

    def vector_at(self, bx: int, by: int) -> MotionVector:
        return self.vectors[by * self.blocks_x + bx]

    def matches_frame(self, width: int, height: int) -> bool:
        return (self.blocks_x, self.blocks_y) == grid_dims(
            width, height, self.block_size
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MotionField):
            return NotImplemented
        return (
            self.block_size == other.block_size
            and self.blocks_x == other.blocks_x
            and self.blocks_y == other.blocks_y
            and self.vectors == other.vectors
        )


@dataclass(frozen=True, eq=False)
class ConnectivityMap:
    """Per-pixel count of contributing blocks after inverting the compensation.

    k == 0 marks unconnected pixels (holes), k == 1 one-connected,
    k >= 2 multiple-connected.
    """

    counts: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.counts, dtype=np.int32, order="C")
        if arr.ndim != 2:
            raise ValueError("connectivity counts must be 2-D")
        if arr.min() < 0:
            raise ValueError("connectivity counts must be non-negative")
        object.__setattr__(self, "counts", _freeze(arr))

    @property
    def height(self) -> int:
        return self.counts.shape[0]

    @property
    def width(self) -> int:
        return self.counts.shape[1]

    @property
    def hole_mask(self) -> np.ndarray:
        return self.counts == 0


@dataclass(frozen=True, eq=False)
class UpdateField:
    """Real-valued update signal with a mask of unconnected (hole) pixels."""

    values: np.ndarray
    hole_mask: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.float64, order="C")
        mask = np.array(self.hole_mask, dtype=bool, order="C")
        if vals.ndim != 2:
            raise ValueError("update values must be 2-D")
        if mask.shape != vals.shape:
            raise ValueError(
                f"hole mask shape {mask.shape} != values shape {vals.shape}"
            )
        object.__setattr__(self, "values", _freeze(vals))
        object.__setattr__(self, "hole_mask", _freeze(mask))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class FseParams:
    """Configuration of the spectral hole-filling stage.

    tile_size is the edge of a hole-owning processing block, border the
    support margin included on each side, fft_size the transform edge.
    decay_rho controls the spatial weighting falloff from the tile center
    and orth_gamma damps each greedy coefficient update.
    """

    tile_size: int = 16
    border: int = 16
    fft_size: int = 64
    decay_rho: float = 0.8
    orth_gamma: float = 0.5
    max_iterations: int = 1000
    stop_epsilon: float = 1e-8

    def __post_init__(self) -> None:
        if self.tile_size < 1:
            raise ValueError("tile_size must be >= 1")
        if self.border < 0:
            raise ValueError("border must be >= 0")
        if not _is_power_of_two(self.fft_size):
            raise ValueError(f"fft_size must be a power of two, got {self.fft_size}")
        if self.fft_size < self.tile_size + 2 * self.border:
            raise ValueError(
                f"fft_size {self.fft_size} < tile_size + 2*border "
                f"({self.tile_size + 2 * self.border})"
            )
        if not 0.0 < self.decay_rho < 1.0:
            raise ValueError("decay_rho must be in (0, 1)")
        if not 0.0 < self.orth_gamma <= 1.0:
            raise ValueError("orth_gamma must be in (0, 1]")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.stop_epsilon < 0.0:
            raise ValueError("stop_epsilon must be >= 0")


@dataclass(frozen=True)
class LiftConfig:
    """Pipeline configuration for one decomposition level."""

    block_size: int = 16
    search_range: int = 15
    update_mode: UpdateMode = UpdateMode.FSE_FILL
    fse: FseParams = field(default_factory=FseParams)

    def __post_init__(self) -> None:
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        if self.search_range < 0:
            raise ValueError("search_range must be >= 0")
