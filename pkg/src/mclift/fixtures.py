"""Deterministic synthetic test sequences.

The evaluation data behind this kind of pipeline (video luma, CT slices)
is not redistributable, so experiments run on generated fixtures:

* constant: one flat value everywhere.
* noise: independent uniform samples per frame (worst case, no motion).
* translate: a texture window sliding by a fixed velocity, fully
  capturable by a modest search range.
* flash_disocclusion: a global illumination offset between the frames of
  each pair plus a block-aligned patch whose content is a displaced copy
  of another area. The patch blocks match their source region, nothing
  references the patch's own reference area, and that area becomes an
  unconnected hole with a sharp update discontinuity around it, while the
  flash gives the update field a nonzero level everywhere else.
"""

from __future__ import annotations

import numpy as np

from .core import Frame, Sequence

FIXTURE_KINDS = ("translate", "flash_disocclusion", "noise", "constant")

TRANSLATE_SHIFT = (3, 2)  # (dx, dy) content velocity per frame

# flash_disocclusion geometry; assumes 16-pixel block alignment and a
# search range of at least FLASH_PATCH_MOVE during analysis.
FLASH_PATCH_SIZE = 32
FLASH_PATCH_MOVE = 12
FLASH_LEVEL_STEP = 32
# Odd offset: the one-connected update level lands on n + 1/2, so the
# extrapolated fill floors to the same integer as its surround instead of
# speckling across two values.
FLASH_DELTA = 13


def _scale(bit_depth: int) -> int:
    return 1 << max(0, bit_depth - 8)


def gen_constant(
    width: int, height: int, bit_depth: int, frames: int, seed: int
) -> Sequence:
    rng = np.random.default_rng(seed)
    value = int(rng.integers(0, 1 << bit_depth))
    plane = np.full((height, width), value, dtype=np.int32)
    return Sequence(tuple(Frame(plane, bit_depth) for _ in range(frames)))


def gen_noise(
    width: int, height: int, bit_depth: int, frames: int, seed: int
) -> Sequence:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(frames):
        plane = rng.integers(0, 1 << bit_depth, size=(height, width), dtype=np.int32)
        out.append(Frame(plane, bit_depth))
    return Sequence(tuple(out))


def gen_translate(
    width: int, height: int, bit_depth: int, frames: int, seed: int
) -> Sequence:
    rng = np.random.default_rng(seed)
    dx, dy = TRANSLATE_SHIFT
    tex = rng.integers(
        0,
        1 << bit_depth,
        size=(height + (frames - 1) * abs(dy), width + (frames - 1) * abs(dx)),
        dtype=np.int32,
    )
    out = []
    for t in range(frames):
        y0, x0 = t * abs(dy), t * abs(dx)
        out.append(Frame(tex[y0 : y0 + height, x0 : x0 + width], bit_depth))
    return Sequence(tuple(out))


def gen_flash_disocclusion(
    width: int, height: int, bit_depth: int, frames: int, seed: int
) -> Sequence:
    if width < 80 or height < 80:
        raise ValueError("flash_disocclusion fixture needs at least 80x80 frames")
    rng = np.random.default_rng(seed)
    # The texture scales with bit depth; the flash offset does not, so the
    # half-integer update level keeps sub-integer extrapolation ripple at
    # every depth and the filled region floors onto one value.
    delta = FLASH_DELTA
    step = FLASH_LEVEL_STEP * _scale(bit_depth)
    size = FLASH_PATCH_SIZE
    move = FLASH_PATCH_MOVE
    # Patch destination snapped to the 16-pixel block grid near the center.
    py = (height // 2 // 16) * 16
    px = (width // 2 // 16) * 16
    sy, sx = py - move, px - move

    out = []
    for _ in range(frames // 2):
        # Coarse level texture: few distinct values, so block matching is
        # unambiguous while prediction residuals stay cheap to code.
        ref = step * rng.integers(0, 5, size=(height, width), dtype=np.int32)
        cur = ref + delta
        cur[py : py + size, px : px + size] = (
            ref[sy : sy + size, sx : sx + size] + delta
        )
        out.append(Frame(ref, bit_depth))
        out.append(Frame(cur, bit_depth))
    if frames % 2 == 1:
        ref = step * rng.integers(0, 5, size=(height, width), dtype=np.int32)
        out.append(Frame(ref, bit_depth))
    return Sequence(tuple(out))


_GENERATORS = {
    "constant": gen_constant,
    "noise": gen_noise,
    "translate": gen_translate,
    "flash_disocclusion": gen_flash_disocclusion,
}


def generate(
    kind: str,
    width: int = 128,
    height: int = 128,
    bit_depth: int = 8,
    frames: int = 4,
    seed: int = 0,
) -> Sequence:
    if kind not in _GENERATORS:
        raise ValueError(f"unknown fixture kind {kind!r}; choose from {FIXTURE_KINDS}")
    if frames < 1:
        raise ValueError("fixture needs at least one frame")
    return _GENERATORS[kind](width, height, bit_depth, frames, seed)
