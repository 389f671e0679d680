"""Scoring strategies for multi-channel reference/degraded pairs."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .config import PesqConfig
from .core.pipeline import compute_pesq
from .signal_io import AudioSignal, downmix_mono, interleave, split_channels

#: Strategy identifiers.  ``mono-dmx`` matches how stereo corpora are usually
#: collapsed before scoring and is the recommended default.
STRATEGIES = ("mono-dmx", "avg-scores", "per-channel", "interleave")

INTERLEAVE_NOTICE = (
    "note: the interleave strategy reproduces the reference tooling's likely "
    "unintentional handling of multi-channel files (channels interleaved into "
    "one long signal); use it only for comparability with legacy results"
)


@dataclass(frozen=True)
class MultichannelResult:
    mode: str
    strategy: str
    score: float
    per_channel: list[float] | None = field(default=None)


def score_multichannel(ref: AudioSignal, deg: AudioSignal, cfg: PesqConfig,
                       strategy: str = "mono-dmx", *,
                       notice_stream=None) -> MultichannelResult:
    """Score a channel-matched pair under the selected stereo strategy."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {', '.join(STRATEGIES)}")
    if ref.channels != deg.channels:
        raise ValueError(f"channel-count mismatch: reference has {ref.channels}, "
                         f"degraded has {deg.channels}")
    if strategy == "interleave" and ref.channels < 2:
        raise ValueError("interleave requires at least 2 channels")
    if strategy == "avg-scores" and ref.channels < 2:
        raise ValueError("avg-scores requires at least 2 channels "
                         "(mono degenerates to plain scoring; use mono-dmx)")

    if strategy == "mono-dmx":
        result = compute_pesq(downmix_mono(ref), downmix_mono(deg), cfg)
        return MultichannelResult(cfg.mode, strategy, result.score)

    if strategy == "interleave":
        stream = sys.stderr if notice_stream is None else notice_stream
        print(INTERLEAVE_NOTICE, file=stream)
        result = compute_pesq(interleave(ref), interleave(deg), cfg)
        return MultichannelResult(cfg.mode, strategy, result.score)

    # avg-scores / per-channel: score channels independently, combine in order
    scores = [
        compute_pesq(r, d, cfg).score
        for r, d in zip(split_channels(ref), split_channels(deg))
    ]
    mean = sum(scores) / len(scores)
    return MultichannelResult(cfg.mode, strategy, mean, per_channel=scores)
