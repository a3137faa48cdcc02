"""Polar-code toolkit: list decoding with per-bit soft output.

The package splits into code construction (`code_model`), the channel
model (`channel`), decoders (`scl_core`, `fscl`, `soft_output`),
cost models (`analysis`) and Monte Carlo drivers (`harness`).
"""

from .analysis import (LatencyReport, OpCounter, OpCountReport,
                       latency_constrained, latency_unlimited, op_count_run)
from .channel import ChannelCfg, Observation, channel_llr, transmit
from .code_model import (DynFrozenCfg, FicNode, NodeKind, PolarCodeSpec,
                         build_code, default_reliability_sequence,
                         dynamic_frozen_value, encode, encode_info,
                         is_valid_codeword, load_reliability_sequence,
                         load_spec, save_spec, segment_fic, spec_from_text,
                         spec_to_text)
from .fscl import fscl_decode
from .harness import (CalibrationBin, ProductCodeCfg, SimConfig, TrialStats,
                      calibration_run, decode_block, product_decode,
                      product_encode, product_run, pyndiah_baseline,
                      run_trials)
from .logdomain import box_minus, box_plus, box_plus_reduce, softplus
from .scl_core import PathList, scl_decode
from .soft_output import (SoftDecodeResult, app_llrs, block_reliability,
                          so_fscl_decode, so_scl_decode)

__version__ = "0.1.0"

__all__ = [
    "ChannelCfg", "Observation", "channel_llr", "transmit",
    "DynFrozenCfg", "FicNode", "NodeKind", "PolarCodeSpec", "build_code",
    "default_reliability_sequence", "dynamic_frozen_value", "encode",
    "encode_info", "is_valid_codeword", "load_reliability_sequence",
    "load_spec", "save_spec", "segment_fic", "spec_from_text", "spec_to_text",
    "PathList", "scl_decode", "fscl_decode",
    "SoftDecodeResult", "app_llrs", "block_reliability",
    "so_fscl_decode", "so_scl_decode",
    "box_minus", "box_plus", "box_plus_reduce", "softplus",
    "LatencyReport", "OpCounter", "OpCountReport",
    "latency_constrained", "latency_unlimited", "op_count_run",
    "CalibrationBin", "ProductCodeCfg", "SimConfig", "TrialStats",
    "calibration_run", "decode_block", "product_decode", "product_encode",
    "product_run", "pyndiah_baseline", "run_trials",
    "__version__",
]
