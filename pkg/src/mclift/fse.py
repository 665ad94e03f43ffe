"""Frequency Selective Extrapolation: greedy sparse Fourier hole filling.

Unconnected pixels of the weighted update field are treated as holes and
replaced by a signal model built from the surrounding available samples.
The model is a sparse superposition of 2-D Fourier basis functions, grown
greedily: each iteration picks the basis whose weighted residual projection
is largest, i.e. the one that reduces the weighted approximation error the
most, and increases its coefficient by orth_gamma times the projection.

Implementation choices for the parts the update-step contract leaves open:

* Residual bookkeeping happens in the frequency domain. One FFT of the
  weighted signal and one of the weighting window are computed per tile;
  every iteration then only subtracts a shifted copy of the window
  spectrum, since DFT{w * phi_u}[k] == W[k - u].
* The spatial weighting window is decay_rho ** (euclidean distance from
  the tile center) on available pixels and exactly 0 elsewhere. Hole
  pixels, pixels outside the frame, and pixels beyond the tile + border
  support square never contribute, including holes owned by neighboring
  tiles, which keeps the result independent of tile processing order.
* Selection maximizes |weighted residual spectrum|^2 with no additional
  frequency weighting. Exact ties resolve to the lowest (ky, kx) index.
* A selected basis and its conjugate partner are updated jointly with
  conjugate coefficients, so the spatial model stays real-valued. For
  orth_gamma <= 1 this makes the weighted residual energy non-increasing
  in every iteration.

Each hole pixel is owned by exactly one tile_size-aligned tile; a tile's
support is the tile plus `border` pixels on each side, clipped to the
frame and embedded in an fft_size transform grid.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import FseParams, UpdateField

__all__ = [
    "FseParams",
    "FseModel",
    "TilePlan",
    "TileStats",
    "plan_tiles",
    "fse_tile_iterate",
    "fse_reconstruct",
    "fse_reconstruct_with_stats",
    "weight_grid",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TilePlan:
    """One aligned hole-owning tile and the placement of its support.

    (origin_y, origin_x) is the frame position of transform index (0, 0);
    it may be negative near the frame border, in which case the missing
    support counts as unavailable.
    """

    tile_y: int
    tile_x: int
    tile_h: int
    tile_w: int
    origin_y: int
    origin_x: int


@dataclass
class FseModel:
    """Sparse Fourier model: coefficient per selected (ky, kx) frequency."""

    fft_size: int
    coefficients: dict[tuple[int, int], complex]
    iterations: int = 0
    energy_trace: list[float] = field(default_factory=list)

    @property
    def basis_set(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.coefficients))

    def synthesize(self) -> np.ndarray:
        """Spatial model over the transform grid, as complex samples.

        The imaginary part is numerical noise whenever the coefficients are
        conjugate-symmetric; callers use the real part.
        """
        size = self.fft_size
        spectrum = np.zeros((size, size), dtype=np.complex128)
        for (ky, kx), c in self.coefficients.items():
            spectrum[ky, kx] = c
        return np.fft.ifft2(spectrum) * (size * size)


@dataclass
class TileStats:
    tile_y: int
    tile_x: int
    iterations: int
    energy_trace: list[float]
    degenerate: bool = False


def plan_tiles(hole_mask: np.ndarray, params: FseParams) -> list[TilePlan]:
    """Aligned tiles containing at least one hole, each owning its holes."""
    mask = np.asarray(hole_mask, dtype=bool)
    if mask.ndim != 2:
        raise ValueError("hole mask must be 2-D")
    height, width = mask.shape
    ts = params.tile_size
    ys, xs = np.nonzero(mask)
    cells = sorted(set(zip((ys // ts).tolist(), (xs // ts).tolist())))
    plans = []
    for cy, cx in cells:
        ty, tx = cy * ts, cx * ts
        plans.append(
            TilePlan(
                tile_y=ty,
                tile_x=tx,
                tile_h=min(ts, height - ty),
                tile_w=min(ts, width - tx),
                origin_y=ty - params.border,
                origin_x=tx - params.border,
            )
        )
    return plans


def weight_grid(params: FseParams) -> np.ndarray:
    """decay_rho ** distance from the tile center, over the transform grid."""
    center = params.border + (params.tile_size - 1) / 2.0
    coords = np.arange(params.fft_size, dtype=np.float64) - center
    dist = np.hypot(coords[:, None], coords[None, :])
    return params.decay_rho**dist


def fse_tile_iterate(
    support: np.ndarray,
    available_mask: np.ndarray,
    weight_window: np.ndarray,
    params: FseParams,
) -> FseModel:
    """Greedy model growth for one tile.

    `support` holds the samples over the transform grid, `available_mask`
    marks which of them are real observations, and `weight_window` supplies
    the spatial emphasis (forced to zero on unavailable pixels here).
    """
    size = params.fft_size
    avail = np.asarray(available_mask, dtype=bool)
    if avail.shape != (size, size):
        raise ValueError(f"available_mask must be {size}x{size}")
    if not avail.any():
        raise ValueError("tile support contains no available pixels")
    w = np.where(avail, np.asarray(weight_window, dtype=np.float64), 0.0)
    f = np.where(avail, np.asarray(support, dtype=np.float64), 0.0)

    window_spectrum = np.fft.fft2(w)
    w_total = float(window_spectrum[0, 0].real)
    residual_spectrum = np.fft.fft2(w * f)
    coeffs = np.zeros((size, size), dtype=np.complex128)

    energy = float(np.sum(w * f * f))
    trace = [energy]
    threshold = params.stop_epsilon * energy

    iterations = 0
    while iterations < params.max_iterations and energy > threshold:
        mag2 = residual_spectrum.real**2 + residual_spectrum.imag**2
        idx = int(np.argmax(mag2))
        uy, ux = divmod(idx, size)
        if mag2[uy, ux] == 0.0:
            break
        conj_uy, conj_ux = (-uy) % size, (-ux) % size
        projection = residual_spectrum[uy, ux]
        if (uy, ux) == (conj_uy, conj_ux):
            # Self-conjugate bin (real basis function): real coefficient.
            step = params.orth_gamma * projection.real / w_total
            coeffs[uy, ux] += step
            residual_spectrum -= step * np.roll(window_spectrum, (uy, ux), (0, 1))
            energy += step * step * w_total - 2.0 * step * projection.real
        else:
            step = params.orth_gamma * projection / w_total
            coeffs[uy, ux] += step
            coeffs[conj_uy, conj_ux] += step.conjugate()
            residual_spectrum -= step * np.roll(window_spectrum, (uy, ux), (0, 1))
            residual_spectrum -= step.conjugate() * np.roll(
                window_spectrum, (conj_uy, conj_ux), (0, 1)
            )
            w_double = window_spectrum[(2 * uy) % size, (2 * ux) % size]
            energy += (
                -4.0 * (step.conjugate() * projection).real
                + 2.0 * (step * step.conjugate()).real * w_total
                + 2.0 * (step * step * w_double.conjugate()).real
            )
        energy = max(energy, 0.0)
        trace.append(energy)
        iterations += 1

    selected = {
        (int(ky), int(kx)): complex(coeffs[ky, kx])
        for ky, kx in zip(*np.nonzero(coeffs))
    }
    return FseModel(size, selected, iterations=iterations, energy_trace=trace)


def _tile_inputs(
    plan: TilePlan,
    values: np.ndarray,
    holes: np.ndarray,
    params: FseParams,
) -> tuple[np.ndarray, np.ndarray]:
    height, width = values.shape
    size = params.fft_size
    span = params.tile_size + 2 * params.border
    vals = np.zeros((size, size), dtype=np.float64)
    avail = np.zeros((size, size), dtype=bool)
    i0 = max(0, -plan.origin_y)
    j0 = max(0, -plan.origin_x)
    i1 = min(span, height - plan.origin_y)
    j1 = min(span, width - plan.origin_x)
    if i1 > i0 and j1 > j0:
        fy0, fx0 = plan.origin_y + i0, plan.origin_x + j0
        window_holes = holes[fy0 : fy0 + (i1 - i0), fx0 : fx0 + (j1 - j0)]
        avail[i0:i1, j0:j1] = ~window_holes
        vals[i0:i1, j0:j1] = np.where(
            window_holes, 0.0, values[fy0 : fy0 + (i1 - i0), fx0 : fx0 + (j1 - j0)]
        )
    return vals, avail


def _fill_one_tile(
    plan: TilePlan,
    values: np.ndarray,
    holes: np.ndarray,
    base_weights: np.ndarray,
    params: FseParams,
) -> tuple[np.ndarray | None, TileStats]:
    vals, avail = _tile_inputs(plan, values, holes, params)
    owner_holes = holes[
        plan.tile_y : plan.tile_y + plan.tile_h,
        plan.tile_x : plan.tile_x + plan.tile_w,
    ]
    if not avail.any():
        stats = TileStats(plan.tile_y, plan.tile_x, 0, [0.0], degenerate=True)
        return None, stats
    model = fse_tile_iterate(vals, avail, base_weights, params)
    spatial = model.synthesize().real
    hy, hx = np.nonzero(owner_holes)
    fill = spatial[hy + params.border, hx + params.border]
    stats = TileStats(plan.tile_y, plan.tile_x, model.iterations, model.energy_trace)
    return fill, stats


def fse_reconstruct_with_stats(
    field: UpdateField, params: FseParams, workers: int = 1
) -> tuple[UpdateField, list[TileStats]]:
    """Fill all hole pixels, returning per-tile iteration diagnostics.

    Non-hole pixels pass through bit-identically. Tiles are independent,
    so the result does not depend on `workers` or processing order.
    """
    holes = field.hole_mask
    if not holes.any():
        return field, []
    plans = plan_tiles(holes, params)
    base_weights = weight_grid(params)
    values = field.values
    out = values.copy()

    def job(plan: TilePlan):
        return _fill_one_tile(plan, values, holes, base_weights, params)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, plans))
    else:
        results = [job(plan) for plan in plans]

    all_stats = []
    for plan, (fill, stats) in zip(plans, results):
        owner = holes[
            plan.tile_y : plan.tile_y + plan.tile_h,
            plan.tile_x : plan.tile_x + plan.tile_w,
        ]
        hy, hx = np.nonzero(owner)
        if fill is None:
            logger.warning(
                "tile (%d,%d) has no available support; filling %d holes with 0",
                plan.tile_y,
                plan.tile_x,
                hy.size,
            )
            out[plan.tile_y + hy, plan.tile_x + hx] = 0.0
        else:
            out[plan.tile_y + hy, plan.tile_x + hx] = fill
        all_stats.append(stats)
    return UpdateField(values=out, hole_mask=holes), all_stats


def fse_reconstruct(
    field: UpdateField, params: FseParams, workers: int = 1
) -> UpdateField:
    """Replace hole pixels by the extrapolation model; deterministic."""
    filled, _ = fse_reconstruct_with_stats(field, params, workers=workers)
    return filled
