"""Compensated Haar lifting: prediction and update steps plus exact inverses.

The prediction step subtracts a block-compensated predictor from the even
frame, giving the highpass band. The update step adds the weighted (and
optionally hole-filled) inverse-compensated highpass signal to the odd
frame, giving the lowpass band. All rounding goes through the arithmetic
floor, so synthesis reproduces the original samples bit-exactly.

The decoder never receives the update field: it recomputes it from the
transmitted highpass band and motion field, repeating the identical
deterministic weighting and hole filling. The only side information beyond
the subbands is the motion field itself.
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    ConnectivityMap,
    DataFormatError,
    Frame,
    FseParams,
    LiftConfig,
    MotionField,
    Sequence,
    UpdateField,
    UpdateMode,
    floor_samples,
    iter_blocks,
)
from .fse import TileStats, fse_reconstruct_with_stats
from .imc import apply_connectivity_weights, imc_scatter
from .motion import SearchConfig, estimate_motion, motion_from_bytes, motion_to_bytes

_CONTAINER_MAGIC = b"MCLF"
_CONTAINER_VERSION = 1
_CONTAINER_HEADER = struct.Struct("<4sBBHHHB")


@dataclass(frozen=True, eq=False)
class SubbandPair:
    """Transform output of one frame pair plus the side information."""

    lowpass: Frame
    highpass: Frame
    motion: MotionField
    update_mode: UpdateMode

    def __post_init__(self) -> None:
        if not self.lowpass.same_geometry(self.highpass):
            raise ValueError("lowpass and highpass geometry differ")
        if not self.motion.matches_frame(self.lowpass.width, self.lowpass.height):
            raise ValueError("motion field does not match subband geometry")


@dataclass(frozen=True, eq=False)
class PairProducts:
    """All intermediate stages of one pair analysis, for diagnostics."""

    subbands: SubbandPair
    predictor: Frame
    conn: ConnectivityMap
    raw_update: UpdateField
    weighted_update: UpdateField
    final_update: UpdateField
    fse_stats: tuple[TileStats, ...] = ()


@dataclass(frozen=True, eq=False)
class SequenceBands:
    """Transform of a whole sequence: one subband pair per frame pair.

    An odd trailing frame passes through unchanged as the last lowpass
    entry and is flagged.
    """

    lowpass: tuple[Frame, ...]
    highpass: tuple[Frame, ...]
    motion_fields: tuple[MotionField, ...]
    update_mode: UpdateMode
    has_trailing: bool
    axis_label: str = "time"

    @property
    def pair_count(self) -> int:
        return len(self.highpass)

    def __post_init__(self) -> None:
        if len(self.motion_fields) != len(self.highpass):
            raise ValueError("one motion field per highpass frame required")
        expected_lp = len(self.highpass) + (1 if self.has_trailing else 0)
        if len(self.lowpass) != expected_lp:
            raise ValueError(
                f"expected {expected_lp} lowpass frames, got {len(self.lowpass)}"
            )
        if not self.lowpass:
            raise ValueError("bands must contain at least one lowpass frame")


def mc_predict(reference: Frame, motion: MotionField) -> Frame:
    """Assemble the block-compensated predictor; each pixel written once."""
    height, width = reference.samples.shape
    if not motion.matches_frame(width, height):
        raise ValueError("motion field geometry does not match frame")
    ref = reference.samples
    out = np.empty((height, width), dtype=np.int32)
    for blk in iter_blocks(width, height, motion.block_size):
        v = motion.vectors[blk.index]
        sy, sx = blk.y0 + v.dy, blk.x0 + v.dx
        if sy < 0 or sx < 0 or sy + blk.h > height or sx + blk.w > width:
            raise ValueError(
                f"block ({blk.bx},{blk.by}) vector {v} reads outside the reference"
            )
        out[blk.y0 : blk.y0 + blk.h, blk.x0 : blk.x0 + blk.w] = ref[
            sy : sy + blk.h, sx : sx + blk.w
        ]
    return Frame(out, reference.bit_depth)


def analyze_highpass(current: Frame, predictor: Frame) -> Frame:
    """Highpass band: current minus floored predictor.

    The predictor is integer-valued here, so the floor is an identity; it
    is what keeps the step invertible if a fractional-pel predictor is
    ever substituted.
    """
    if not current.same_geometry(predictor):
        raise ValueError("current and predictor geometry differ")
    hp = current.samples.astype(np.int64) - predictor.samples
    return Frame(hp, current.bit_depth)


def analyze_lowpass(reference: Frame, update: UpdateField) -> Frame:
    """Lowpass band: reference plus floored (already weighted) update."""
    if (update.height, update.width) != reference.samples.shape:
        raise ValueError("update field geometry does not match reference")
    lp = reference.samples.astype(np.int64) + floor_samples(update.values)
    return Frame(lp, reference.bit_depth)


def _build_update(
    highpass: Frame,
    motion: MotionField,
    mode: UpdateMode,
    fse_params: FseParams,
) -> tuple[UpdateField, UpdateField, ConnectivityMap, UpdateField, tuple[TileStats, ...]]:
    """Recomputable update pipeline shared by analysis and synthesis.

    Returns (final, weighted, conn, raw, fse_stats); `final` is what the
    update step actually adds.
    """
    raw, conn = imc_scatter(highpass, motion)
    weighted = apply_connectivity_weights(raw, conn)
    stats: tuple[TileStats, ...] = ()
    if mode is UpdateMode.NO_UPDATE:
        final = UpdateField(
            values=np.zeros_like(weighted.values), hole_mask=weighted.hole_mask
        )
    elif mode is UpdateMode.COPY_UNCONNECTED:
        final = weighted
    elif mode is UpdateMode.FSE_FILL:
        final, stat_list = fse_reconstruct_with_stats(weighted, fse_params)
        stats = tuple(stat_list)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown update mode {mode}")
    return final, weighted, conn, raw, stats


def analyze_pair_products(
    reference: Frame, current: Frame, cfg: LiftConfig
) -> PairProducts:
    """Full analysis of one (reference, current) pair, keeping every stage."""
    if not reference.same_geometry(current):
        raise ValueError("reference and current frames must share geometry")
    motion = estimate_motion(
        current, reference, SearchConfig(cfg.block_size, cfg.search_range)
    )
    predictor = mc_predict(reference, motion)
    highpass = analyze_highpass(current, predictor)
    final, weighted, conn, raw, stats = _build_update(
        highpass, motion, cfg.update_mode, cfg.fse
    )
    lowpass = analyze_lowpass(reference, final)
    subbands = SubbandPair(lowpass, highpass, motion, cfg.update_mode)
    return PairProducts(
        subbands=subbands,
        predictor=predictor,
        conn=conn,
        raw_update=raw,
        weighted_update=weighted,
        final_update=final,
        fse_stats=stats,
    )


def analyze_pair(reference: Frame, current: Frame, cfg: LiftConfig) -> SubbandPair:
    return analyze_pair_products(reference, current, cfg).subbands


def synthesize_pair(bands: SubbandPair, cfg: LiftConfig) -> tuple[Frame, Frame]:
    """Exact inverse of analyze_pair, given the same configuration.

    The update field is recomputed from the highpass band and motion field,
    including the deterministic hole filling, then both lifting steps are
    undone in reverse order.
    """
    final, _, _, _, _ = _build_update(
        bands.highpass, bands.motion, bands.update_mode, cfg.fse
    )
    lp = bands.lowpass.samples.astype(np.int64)
    reference = Frame(lp - floor_samples(final.values), bands.lowpass.bit_depth)
    predictor = mc_predict(reference, bands.motion)
    current = Frame(
        bands.highpass.samples.astype(np.int64) + predictor.samples,
        bands.highpass.bit_depth,
    )
    return reference, current


def analyze_sequence_products(
    seq: Sequence, cfg: LiftConfig, workers: int = 1
) -> tuple[SequenceBands, list[PairProducts]]:
    """One decomposition level over consecutive frame pairs, keeping the
    per-pair intermediates for metrics and diagnostics.

    Pairs are independent; `workers` > 1 processes them concurrently
    without changing any output.
    """
    if len(seq) < 1:
        raise ValueError("sequence must contain at least one frame")
    pairs = [(seq[2 * t], seq[2 * t + 1]) for t in range(len(seq) // 2)]
    has_trailing = len(seq) % 2 == 1

    def analyze(pair: tuple[Frame, Frame]) -> PairProducts:
        return analyze_pair_products(pair[0], pair[1], cfg)

    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(analyze, pairs))
    else:
        results = [analyze(p) for p in pairs]

    lowpass = [r.subbands.lowpass for r in results]
    if has_trailing:
        lowpass.append(seq[len(seq) - 1])
    bands = SequenceBands(
        lowpass=tuple(lowpass),
        highpass=tuple(r.subbands.highpass for r in results),
        motion_fields=tuple(r.subbands.motion for r in results),
        update_mode=cfg.update_mode,
        has_trailing=has_trailing,
        axis_label=seq.axis_label,
    )
    return bands, results


def analyze_sequence(
    seq: Sequence, cfg: LiftConfig, workers: int = 1
) -> SequenceBands:
    """One decomposition level over consecutive frame pairs."""
    bands, _ = analyze_sequence_products(seq, cfg, workers=workers)
    return bands


def synthesize_sequence(
    bands: SequenceBands, cfg: LiftConfig, workers: int = 1
) -> Sequence:
    """Bit-exact reconstruction of the original sequence."""
    pairs = [
        SubbandPair(lp, hp, mf, bands.update_mode)
        for lp, hp, mf in zip(bands.lowpass, bands.highpass, bands.motion_fields)
    ]

    def synth(pair: SubbandPair) -> tuple[Frame, Frame]:
        return synthesize_pair(pair, cfg)

    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(synth, pairs))
    else:
        results = [synth(p) for p in pairs]

    frames: list[Frame] = []
    for reference, current in results:
        frames.extend((reference, current))
    if bands.has_trailing:
        frames.append(bands.lowpass[-1])
    return Sequence(tuple(frames), axis_label=bands.axis_label)


def _frame_bytes(frame: Frame) -> bytes:
    return frame.samples.astype("<i4").tobytes()


def container_to_bytes(bands: SequenceBands) -> bytes:
    """Serialize bands to the subband container wire format."""
    first = bands.lowpass[0]
    if bands.pair_count > 0xFFFF:
        raise ValueError("too many pairs for the container format")
    parts = [
        _CONTAINER_HEADER.pack(
            _CONTAINER_MAGIC,
            _CONTAINER_VERSION,
            first.bit_depth,
            first.width,
            first.height,
            bands.pair_count,
            bands.update_mode.value,
        )
    ]
    for lp, hp, mf in zip(bands.lowpass, bands.highpass, bands.motion_fields):
        parts.append(motion_to_bytes(mf))
        parts.append(_frame_bytes(lp))
        parts.append(_frame_bytes(hp))
    parts.append(struct.pack("<B", 1 if bands.has_trailing else 0))
    if bands.has_trailing:
        parts.append(_frame_bytes(bands.lowpass[-1]))
    return b"".join(parts)


def _read_frame(
    data: bytes, offset: int, width: int, height: int, bit_depth: int, what: str
) -> tuple[Frame, int]:
    need = 4 * width * height
    if offset + need > len(data):
        raise DataFormatError(f"{what} samples truncated at byte {offset}")
    samples = np.frombuffer(data, dtype="<i4", count=width * height, offset=offset)
    return (
        Frame(samples.reshape(height, width).astype(np.int32), bit_depth),
        offset + need,
    )


def container_from_bytes(data: bytes) -> SequenceBands:
    """Parse a subband container, validating structure with byte positions."""
    if len(data) < _CONTAINER_HEADER.size:
        raise DataFormatError("container shorter than its header")
    magic, version, bit_depth, width, height, pair_count, mode_byte = (
        _CONTAINER_HEADER.unpack_from(data, 0)
    )
    if magic != _CONTAINER_MAGIC:
        raise DataFormatError(f"bad container magic {magic!r} at byte 0")
    if version != _CONTAINER_VERSION:
        raise DataFormatError(f"unsupported container version {version}")
    if not 1 <= bit_depth <= 16:
        raise DataFormatError(f"invalid bit depth {bit_depth}")
    if width < 1 or height < 1:
        raise DataFormatError(f"invalid dimensions {width}x{height}")
    try:
        mode = UpdateMode(mode_byte)
    except ValueError as exc:
        raise DataFormatError(f"unknown update mode byte {mode_byte}") from exc

    offset = _CONTAINER_HEADER.size
    lowpass: list[Frame] = []
    highpass: list[Frame] = []
    fields: list[MotionField] = []
    for pair in range(pair_count):
        mf, offset = motion_from_bytes(data, offset)
        if not mf.matches_frame(width, height):
            raise DataFormatError(
                f"pair {pair}: motion field grid does not match {width}x{height}"
            )
        lp, offset = _read_frame(
            data, offset, width, height, bit_depth, f"pair {pair} lowpass"
        )
        hp, offset = _read_frame(
            data, offset, width, height, bit_depth, f"pair {pair} highpass"
        )
        fields.append(mf)
        lowpass.append(lp)
        highpass.append(hp)
    if offset + 1 > len(data):
        raise DataFormatError(f"trailing-frame flag missing at byte {offset}")
    flag = data[offset]
    offset += 1
    if flag not in (0, 1):
        raise DataFormatError(f"invalid trailing-frame flag {flag}")
    if flag:
        trailing, offset = _read_frame(
            data, offset, width, height, bit_depth, "trailing frame"
        )
        lowpass.append(trailing)
    if offset != len(data):
        raise DataFormatError(
            f"{len(data) - offset} unexpected extra bytes at byte {offset}"
        )
    try:
        return SequenceBands(
            lowpass=tuple(lowpass),
            highpass=tuple(highpass),
            motion_fields=tuple(fields),
            update_mode=mode,
            has_trailing=bool(flag),
        )
    except ValueError as exc:
        raise DataFormatError(f"inconsistent container contents: {exc}") from exc


def write_container(path, bands: SequenceBands) -> None:
    with open(path, "wb") as fh:
        fh.write(container_to_bytes(bands))


def read_container(path) -> SequenceBands:
    with open(path, "rb") as fh:
        return container_from_bytes(fh.read())
