"""Full-search block matching and motion-field serialization.

The search minimizes the sum of squared differences over all integer
displacements within the search window whose shifted block lies fully
inside the reference frame. Ties are broken deterministically: smaller
dx*dx + dy*dy first, then smaller dy, then smaller dx, so the zero vector
wins whenever it reaches the minimum cost.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .core import (
    DataFormatError,
    Frame,
    MotionField,
    MotionVector,
    grid_dims,
)

_HEADER = struct.Struct("<HHH")
_VECTOR = struct.Struct("<hh")


@dataclass(frozen=True)
class SearchConfig:
    block_size: int = 16
    search_range: int = 15

    def __post_init__(self) -> None:
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        if self.search_range < 0:
            raise ValueError("search_range must be >= 0")


def block_ssd(
    current: Frame,
    reference: Frame,
    block_origin: tuple[int, int],
    block_dims: tuple[int, int],
    v: MotionVector,
) -> int:
    """Sum of squared differences of one block against its shifted position."""
    x0, y0 = block_origin
    w, h = block_dims
    if w < 1 or h < 1:
        raise ValueError("block dims must be positive")
    if x0 < 0 or y0 < 0 or x0 + w > current.width or y0 + h > current.height:
        raise ValueError(f"block ({x0},{y0},{w},{h}) outside current frame")
    rx, ry = x0 + v.dx, y0 + v.dy
    if rx < 0 or ry < 0 or rx + w > reference.width or ry + h > reference.height:
        raise ValueError(
            f"shifted block ({rx},{ry},{w},{h}) outside reference frame"
        )
    cur = current.samples[y0 : y0 + h, x0 : x0 + w].astype(np.int64)
    ref = reference.samples[ry : ry + h, rx : rx + w].astype(np.int64)
    diff = cur - ref
    return int(np.sum(diff * diff))


def _candidate_order(search_range: int) -> list[tuple[int, int]]:
    # Visiting candidates in tie-break priority order lets the search use a
    # strict less-than update and still realize the full tie-break rule.
    cands = [
        (dy, dx)
        for dy in range(-search_range, search_range + 1)
        for dx in range(-search_range, search_range + 1)
    ]
    cands.sort(key=lambda c: (c[0] * c[0] + c[1] * c[1], c[0], c[1]))
    return cands


def estimate_motion(current: Frame, reference: Frame, cfg: SearchConfig) -> MotionField:
    """Exhaustive SSD search for every block of the current frame.

    Candidate displacements that would read outside the reference frame are
    excluded, which keeps compensation and its inversion symmetric. Boundary
    blocks are matched over their clipped extent.
    """
    if not current.same_geometry(reference):
        raise ValueError("current and reference frames must share geometry")
    height, width = current.samples.shape
    bs = cfg.block_size
    blocks_x, blocks_y = grid_dims(width, height, bs)

    xs0 = np.arange(blocks_x, dtype=np.int64) * bs
    ys0 = np.arange(blocks_y, dtype=np.int64) * bs
    ws = np.minimum(bs, width - xs0)
    hs = np.minimum(bs, height - ys0)

    cur = current.samples.astype(np.int64)
    ref = reference.samples.astype(np.int64)

    best_cost = np.full((blocks_y, blocks_x), np.iinfo(np.int64).max, dtype=np.int64)
    best_dx = np.zeros((blocks_y, blocks_x), dtype=np.int64)
    best_dy = np.zeros((blocks_y, blocks_x), dtype=np.int64)

    for dy, dx in _candidate_order(cfg.search_range):
        col_ok = (xs0 + dx >= 0) & (xs0 + ws + dx <= width)
        row_ok = (ys0 + dy >= 0) & (ys0 + hs + dy <= height)
        if not col_ok.any() or not row_ok.any():
            continue

        y0c, y1c = max(0, -dy), min(height, height - dy)
        x0c, x1c = max(0, -dx), min(width, width - dx)
        d = cur[y0c:y1c, x0c:x1c] - ref[y0c + dy : y1c + dy, x0c + dx : x1c + dx]
        sq = d * d
        integral = np.zeros((sq.shape[0] + 1, sq.shape[1] + 1), dtype=np.int64)
        np.cumsum(sq, axis=0, out=integral[1:, 1:])
        np.cumsum(integral[1:, 1:], axis=1, out=integral[1:, 1:])

        # Valid blocks lie fully inside the diff region, so clipping the
        # lookup indices only affects blocks that are masked out anyway.
        top = np.clip(ys0 - y0c, 0, integral.shape[0] - 1)
        bottom = np.clip(ys0 + hs - y0c, 0, integral.shape[0] - 1)
        left = np.clip(xs0 - x0c, 0, integral.shape[1] - 1)
        right = np.clip(xs0 + ws - x0c, 0, integral.shape[1] - 1)

        costs = (
            integral[bottom[:, None], right[None, :]]
            - integral[top[:, None], right[None, :]]
            - integral[bottom[:, None], left[None, :]]
            + integral[top[:, None], left[None, :]]
        )
        better = (row_ok[:, None] & col_ok[None, :]) & (costs < best_cost)
        best_cost[better] = costs[better]
        best_dx[better] = dx
        best_dy[better] = dy

    vectors = tuple(
        MotionVector(int(dx), int(dy))
        for dx, dy in zip(best_dx.ravel(), best_dy.ravel())
    )
    return MotionField(bs, blocks_x, blocks_y, vectors)


def motion_to_bytes(field: MotionField) -> bytes:
    """Little-endian wire format: block_size/blocks_x/blocks_y u16, then dx/dy i16."""
    for name, value in (
        ("block_size", field.block_size),
        ("blocks_x", field.blocks_x),
        ("blocks_y", field.blocks_y),
    ):
        if not 0 <= value <= 0xFFFF:
            raise ValueError(f"{name} {value} does not fit u16")
    parts = [_HEADER.pack(field.block_size, field.blocks_x, field.blocks_y)]
    for v in field.vectors:
        if not (-32768 <= v.dx <= 32767 and -32768 <= v.dy <= 32767):
            raise ValueError(f"vector {v} does not fit i16")
        parts.append(_VECTOR.pack(v.dx, v.dy))
    return b"".join(parts)


def motion_from_bytes(data: bytes, offset: int = 0) -> tuple[MotionField, int]:
    """Parse one serialized motion field, returning it and the next offset."""
    if offset + _HEADER.size > len(data):
        raise DataFormatError(
            f"motion field header truncated at byte {offset}"
        )
    block_size, blocks_x, blocks_y = _HEADER.unpack_from(data, offset)
    offset += _HEADER.size
    count = blocks_x * blocks_y
    need = count * _VECTOR.size
    if offset + need > len(data):
        raise DataFormatError(
            f"motion field vectors truncated at byte {offset} "
            f"(need {need} bytes for {count} vectors)"
        )
    raw = np.frombuffer(data, dtype="<i2", count=2 * count, offset=offset)
    offset += need
    vectors = tuple(
        MotionVector(int(raw[2 * i]), int(raw[2 * i + 1])) for i in range(count)
    )
    return MotionField(block_size, blocks_x, blocks_y, vectors), offset
