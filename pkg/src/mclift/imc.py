"""Inversion of the block-based compensation.

Highpass blocks are scattered back to the reference-frame positions they
were predicted from. Pixels hit by k blocks accumulate k contributions;
those sums are later weighted by 1/(k+1), which reproduces the classic
Haar 1/2 update for one-connected pixels. Pixels hit by no block form
the unconnected (hole) set.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import ConnectivityMap, Frame, MotionField, UpdateField, iter_blocks


class ConnectivityStats(NamedTuple):
    unconnected: int
    one: int
    multi: int


def imc_scatter(
    highpass: Frame, motion: MotionField
) -> tuple[UpdateField, ConnectivityMap]:
    """Scatter highpass blocks back along their vectors.

    Returns the raw accumulated sums (not yet weighted) and the per-pixel
    contribution counts. Sums are accumulated in integer arithmetic, so the
    result does not depend on block traversal order.
    """
    height, width = highpass.samples.shape
    if not motion.matches_frame(width, height):
        raise ValueError("motion field geometry does not match frame")
    sums = np.zeros((height, width), dtype=np.int64)
    counts = np.zeros((height, width), dtype=np.int32)
    hp = highpass.samples
    for blk in iter_blocks(width, height, motion.block_size):
        v = motion.vectors[blk.index]
        ty, tx = blk.y0 + v.dy, blk.x0 + v.dx
        if ty < 0 or tx < 0 or ty + blk.h > height or tx + blk.w > width:
            raise ValueError(
                f"block ({blk.bx},{blk.by}) vector {v} lands outside the frame"
            )
        sums[ty : ty + blk.h, tx : tx + blk.w] += hp[
            blk.y0 : blk.y0 + blk.h, blk.x0 : blk.x0 + blk.w
        ]
        counts[ty : ty + blk.h, tx : tx + blk.w] += 1
    accum = UpdateField(values=sums.astype(np.float64), hole_mask=counts == 0)
    return accum, ConnectivityMap(counts)


def apply_connectivity_weights(
    accum: UpdateField, conn: ConnectivityMap
) -> UpdateField:
    """Weight k-connected sums by 1/(k+1); unconnected pixels stay zero."""
    if conn.counts.shape != accum.values.shape:
        raise ValueError("connectivity map shape does not match update field")
    k = conn.counts
    values = np.where(k > 0, accum.values / (k + 1), 0.0)
    return UpdateField(values=values, hole_mask=k == 0)


def connectivity_stats(conn: ConnectivityMap) -> ConnectivityStats:
    counts = conn.counts
    unconnected = int(np.count_nonzero(counts == 0))
    one = int(np.count_nonzero(counts == 1))
    multi = counts.size - unconnected - one
    return ConnectivityStats(unconnected, one, multi)
