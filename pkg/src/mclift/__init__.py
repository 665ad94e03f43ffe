"""Motion-compensated Haar lifting with connectivity-weighted inversion
and spectral filling of unconnected update pixels."""

from .core import (
    ConnectivityMap,
    DataFormatError,
    Frame,
    FseParams,
    LiftConfig,
    MotionField,
    MotionVector,
    Sequence,
    UpdateField,
    UpdateMode,
    floor_samples,
    floor_scale,
)
from .fse import FseModel, fse_reconstruct, fse_tile_iterate, plan_tiles
from .imc import apply_connectivity_weights, connectivity_stats, imc_scatter
from .lifting import (
    SequenceBands,
    SubbandPair,
    analyze_highpass,
    analyze_lowpass,
    analyze_pair,
    analyze_sequence,
    mc_predict,
    read_container,
    synthesize_pair,
    synthesize_sequence,
    write_container,
)
from .metrics import (
    boundary_step_metric,
    decode_lossless,
    encode_lossless,
    first_order_entropy,
    psnr,
)
from .motion import SearchConfig, block_ssd, estimate_motion

__version__ = "0.1.0"

__all__ = [
    "ConnectivityMap",
    "DataFormatError",
    "Frame",
    "FseModel",
    "FseParams",
    "LiftConfig",
    "MotionField",
    "MotionVector",
    "SearchConfig",
    "Sequence",
    "SequenceBands",
    "SubbandPair",
    "UpdateField",
    "UpdateMode",
    "analyze_highpass",
    "analyze_lowpass",
    "analyze_pair",
    "analyze_sequence",
    "apply_connectivity_weights",
    "block_ssd",
    "boundary_step_metric",
    "connectivity_stats",
    "decode_lossless",
    "encode_lossless",
    "estimate_motion",
    "first_order_entropy",
    "floor_samples",
    "floor_scale",
    "fse_reconstruct",
    "fse_tile_iterate",
    "imc_scatter",
    "mc_predict",
    "plan_tiles",
    "psnr",
    "read_container",
    "synthesize_pair",
    "synthesize_sequence",
    "write_container",
]
