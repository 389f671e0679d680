"""pesqkit: the PESQ family of objective speech-quality measures.

Raw narrowband P.862 scores, P.862.1 narrowband MOS-LQO and P.862.2 wideband
MOS-LQO with or without the Corrigendum 2 input-filter fix, plus stereo
scoring strategies and a score-comparison harness.
"""

from .compare import ComparisonStats, batch_score, compare, scatter_data
from .config import MODES, PesqConfig, mode_provenance
from .core.align import AlignmentResult
from .core.pipeline import (DisturbanceSeries, PesqResult, aggregate,
                            align_utterances, compensate, compute_pesq,
                            detect_utterances, estimate_crude_delay,
                            fix_levels, frame_disturbance, input_filter,
                            loudness_density, perceptual_transform)
from .core.aggregate import raw_score
from .mos_mapping import map_nb_lqo, map_wb_lqo, mapping_curve
from .multichannel import STRATEGIES, MultichannelResult, score_multichannel
from .signal_io import (AudioSignal, WavFormatError, downmix_mono, interleave,
                        read_wav, split_channels, write_wav)

__version__ = "0.1.0"

__all__ = [
    "AlignmentResult", "AudioSignal", "ComparisonStats", "DisturbanceSeries",
    "MODES", "MultichannelResult", "PesqConfig", "PesqResult", "STRATEGIES",
    "WavFormatError", "aggregate", "align_utterances", "batch_score",
    "compare", "compensate", "compute_pesq", "detect_utterances",
    "downmix_mono", "estimate_crude_delay", "fix_levels", "frame_disturbance",
    "input_filter", "interleave", "loudness_density", "map_nb_lqo",
    "map_wb_lqo", "mapping_curve", "mode_provenance", "perceptual_transform",
    "raw_score", "read_wav", "scatter_data", "score_multichannel",
    "split_channels", "write_wav",
]
