"""End-to-end P.862 scoring plus the individual pipeline stages.

The stage functions mirror the measurement order: level alignment, version
dependent input filtering, time alignment, Bark transform, compensation,
disturbance, aggregation, raw score.  ``compute_pesq`` chains them and picks
the output for the configured version.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import WIDEBAND, OUTPUT_MOS_LQO, PesqConfig
from ..mos_mapping import map_nb_lqo, map_wb_lqo
from ..signal_io import AudioSignal, validate_for_scoring
from . import constants as c
from .aggregate import lpq_weight, raw_score, raw_value
from .align import AlignmentResult, envelope_correlate, locate_utterances
from .dsp import (PaddedSignal, apply_curve_filter, dc_block, fix_power_level,
                  iir_sos_filter, prepare)
from .model import run_model
from .perceptual import BarkModel, band_compensation, frame_compensation_scale
from .vad import compute_vad


@dataclass(frozen=True)
class PesqResult:
    """Raw and/or mapped score for one mono pair."""

    mode: str
    raw: float | None
    mos_lqo: float | None

    @property
    def score(self) -> float:
        return self.raw if self.mos_lqo is None else self.mos_lqo


@dataclass
class DisturbanceSeries:
    """Per-frame symmetric/asymmetric disturbances and audibility flags."""

    d_sym: np.ndarray
    d_asym: np.ndarray
    audible: np.ndarray


def _require_mono(signal: AudioSignal, name: str) -> np.ndarray:
    if signal.channels != 1:
        raise ValueError(f"{name}: core scoring expects mono input, got "
                         f"{signal.channels} channels (use the multichannel module)")
    return signal.samples[0]


def _check_pair(ref: AudioSignal, deg: AudioSignal, cfg: PesqConfig) -> None:
    validate_for_scoring(ref, "reference")
    validate_for_scoring(deg, "degraded")
    if ref.rate != deg.rate:
        raise ValueError(f"rate mismatch: reference {ref.rate} Hz vs degraded {deg.rate} Hz")
    if ref.rate != cfg.rate:
        raise ValueError(f"config expects {cfg.rate} Hz but signals are {ref.rate} Hz")


def _trim(sig: PaddedSignal) -> np.ndarray:
    buf = c.SEARCHBUFFER * c.downsample(sig.rate)
    return sig.data[buf : sig.n_samples - buf].copy()


def _extend_common(ref_p: PaddedSignal, deg_p: PaddedSignal) -> None:
    """Grow both buffers to cover max(n_samples) plus padding with zeros."""
    target = max(ref_p.n_samples, deg_p.n_samples) + ref_p.padding
    for sig in (ref_p, deg_p):
        if len(sig.data) < target:
            sig.data = np.concatenate([sig.data, np.zeros(target - len(sig.data))])


def _model_filter(sig: PaddedSignal, cfg: PesqConfig) -> PaddedSignal:
    if cfg.band == WIDEBAND:
        sos = c.WB_INPUT_SOS_C2[cfg.rate] if cfg.corrigendum2 else c.WB_INPUT_SOS[cfg.rate]
        return iir_sos_filter(sig, sos)
    return apply_curve_filter(sig, c.STANDARD_IRS_FILTER_DB)


def _alignment_filter(sig: PaddedSignal) -> PaddedSignal:
    # Alignment works on a band-limited copy: DC removal plus the 350-3250 Hz
    # brick-wall curve stands in for the reference alignment prefilter.
    return apply_curve_filter(dc_block(sig), c.ALIGN_FILTER_DB)


def fix_levels(ref: AudioSignal, deg: AudioSignal,
               cfg: PesqConfig) -> tuple[AudioSignal, AudioSignal]:
    """Scale both signals to the standard listening level (350-3250 Hz band)."""
    _check_pair(ref, deg, cfg)
    ref_p = prepare(_require_mono(ref, "reference"), cfg.rate)
    deg_p = prepare(_require_mono(deg, "degraded"), cfg.rate)
    max_n = max(ref_p.n_samples, deg_p.n_samples)
    ref_p, _ = fix_power_level(ref_p, max_n)
    deg_p, _ = fix_power_level(deg_p, max_n)
    return (AudioSignal(_trim(ref_p), cfg.rate), AudioSignal(_trim(deg_p), cfg.rate))


def input_filter(signal: AudioSignal, cfg: PesqConfig) -> AudioSignal:
    """Version-dependent input filter (IRS receive or wideband pre-filter)."""
    sig = prepare(_require_mono(signal, "signal"), cfg.rate)
    return AudioSignal(_trim(_model_filter(sig, cfg)), cfg.rate)


def estimate_crude_delay(ref: AudioSignal, deg: AudioSignal, cfg: PesqConfig) -> int:
    """Whole-signal delay estimate from log-energy envelope correlation."""
    ref_p = _alignment_filter(prepare(_require_mono(ref, "reference"), cfg.rate))
    deg_p = _alignment_filter(prepare(_require_mono(deg, "degraded"), cfg.rate))
    _extend_common(ref_p, deg_p)
    _, ref_log = compute_vad(ref_p)
    _, deg_log = compute_vad(deg_p)
    lag, _ = envelope_correlate(ref_log, deg_log)
    return lag * c.downsample(cfg.rate)


def detect_utterances(ref: AudioSignal, cfg: PesqConfig) -> list[tuple[int, int]]:
    """Speech spans of the reference, in alignment windows.

    Spans are VAD bursts of at least the minimum utterance length after the
    hysteresis rules (short-burst removal, gap bridging).
    """
    samples = _require_mono(ref, "reference")
    if not np.any(samples):
        raise ValueError("no speech activity: reference is silent")
    ref_p = _alignment_filter(prepare(samples, cfg.rate))
    vad, _ = compute_vad(ref_p)
    spans = []
    speech_flag = False
    this_start = 0
    for count in range(len(vad)):
        if vad[count] > 0.0 and not speech_flag:
            speech_flag = True
            this_start = count
        if (vad[count] <= 0.0 or count == len(vad) - 1) and speech_flag:
            speech_flag = False
            if count - this_start >= c.MIN_UTT_WINDOWS:
                spans.append((this_start, count))
    if not spans:
        raise ValueError("no speech activity: reference contains no usable utterance")
    return spans


def align_utterances(ref: AudioSignal, deg: AudioSignal, cfg: PesqConfig) -> AlignmentResult:
    """Crude plus per-utterance fine alignment (with utterance splitting)."""
    ref_p = _alignment_filter(prepare(_require_mono(ref, "reference"), cfg.rate))
    deg_p = _alignment_filter(prepare(_require_mono(deg, "degraded"), cfg.rate))
    _extend_common(ref_p, deg_p)
    ref_vad, ref_log = compute_vad(ref_p)
    deg_vad, deg_log = compute_vad(deg_p)
    return locate_utterances(ref_p, deg_p, ref_vad, ref_log, deg_vad, deg_log)


def perceptual_transform(ref: AudioSignal, deg: AudioSignal,
                         alignment: AlignmentResult,
                         cfg: PesqConfig) -> tuple[np.ndarray, np.ndarray]:
    """Bark power-density series (frames x bands) for an aligned pair."""
    from .model import _frame_delays  # stage shares the pipeline internals

    bark = BarkModel(cfg.rate)
    ref_p = prepare(_require_mono(ref, "reference"), cfg.rate)
    deg_p = prepare(_require_mono(deg, "degraded"), cfg.rate)
    _extend_common(ref_p, deg_p)
    ds = c.downsample(cfg.rate)
    buf = c.SEARCHBUFFER * ds
    hop = bark.nfft // 2
    max_n = max(ref_p.n_samples, deg_p.n_samples)
    n_frames = (max_n - 2 * buf + ref_p.padding) // hop - 1

    frame_starts = buf + hop * np.arange(n_frames)
    delays = _frame_delays(alignment, frame_starts, ds)
    series_ref = np.zeros((n_frames, bark.nb))
    series_deg = np.zeros((n_frames, bark.nb))
    for frame in range(n_frames):
        series_ref[frame] = bark.to_bark(bark.power_spectrum(ref_p.data, int(frame_starts[frame])))
        start_deg = int(frame_starts[frame]) + int(delays[frame])
        if start_deg > 0 and start_deg + bark.nfft < max_n + ref_p.padding:
            series_deg[frame] = bark.to_bark(bark.power_spectrum(deg_p.data, start_deg))
    return series_ref, series_deg


def compensate(ref_series: np.ndarray, deg_series: np.ndarray, rate: int,
               total_frames: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Partial frequency compensation of the reference and framewise gain
    compensation of the degraded series."""
    if ref_series.shape != deg_series.shape:
        raise ValueError("Bark series must have equal shapes")
    bark = BarkModel(rate)
    n_frames = ref_series.shape[0]
    if total_frames is None:
        total_frames = max(n_frames - 1, 1)

    silent = np.array([bark.total_audible(row, 1.0e2) < 1.0e7 for row in ref_series])
    avg_ref = bark.time_avg_audible(ref_series, silent, total_frames)
    avg_deg = bark.time_avg_audible(deg_series, silent, total_frames)
    out_ref = ref_series * band_compensation(avg_ref, avg_deg)[np.newaxis, :]

    out_deg = deg_series.copy()
    old_scale = 1.0
    for frame in range(n_frames):
        scale = frame_compensation_scale(
            bark.total_audible(out_ref[frame], 1.0),
            bark.total_audible(out_deg[frame], 1.0),
            old_scale, frame == 0)
        old_scale = scale
        out_deg[frame] *= min(max(scale, c.MIN_SCALE), c.MAX_SCALE)
    return out_ref, out_deg


def loudness_density(bark_row: np.ndarray, rate: int) -> np.ndarray:
    """Zwicker-law loudness of one Bark power row (sone-scaled)."""
    return BarkModel(rate).loudness(np.asarray(bark_row, dtype=np.float64))


def frame_disturbance(ref_loud: np.ndarray, deg_loud: np.ndarray,
                      ref_bark_row: np.ndarray, deg_bark_row: np.ndarray,
                      rate: int) -> tuple[float, float]:
    """(d_sym, d_asym) of a single frame from its loudness and power rows."""
    bark = BarkModel(rate)
    dens = bark.masked_difference(np.asarray(ref_loud, dtype=np.float64),
                                  np.asarray(deg_loud, dtype=np.float64))
    d_sym = bark.pseudo_lp(dens, c.D_POW_F)
    dens_asym = dens * bark.asymmetry_factor(np.asarray(ref_bark_row, dtype=np.float64),
                                             np.asarray(deg_bark_row, dtype=np.float64))
    d_asym = bark.pseudo_lp(dens_asym, c.A_POW_F)
    return d_sym, d_asym


def aggregate(series: DisturbanceSeries) -> tuple[float, float]:
    """Norm cascade over ~20-frame split-second intervals, uniform weights."""
    n = len(series.d_sym)
    if n == 0:
        raise ValueError("empty disturbance series")
    weights = np.ones(n)
    d = lpq_weight(np.asarray(series.d_sym, dtype=np.float64), weights, 0, n - 1,
                   c.D_POW_S, c.D_POW_T)
    a = lpq_weight(np.asarray(series.d_asym, dtype=np.float64), weights, 0, n - 1,
                   c.A_POW_S, c.A_POW_T)
    return d, a


def compute_pesq(ref: AudioSignal, deg: AudioSignal, cfg: PesqConfig) -> PesqResult:
    """Run the full measurement and return the version-appropriate outputs."""
    _check_pair(ref, deg, cfg)
    ref_p = prepare(_require_mono(ref, "reference"), cfg.rate)
    deg_p = prepare(_require_mono(deg, "degraded"), cfg.rate)
    _extend_common(ref_p, deg_p)
    max_n = max(ref_p.n_samples, deg_p.n_samples)

    ref_p, _ = fix_power_level(ref_p, max_n)
    deg_p, _ = fix_power_level(deg_p, max_n)

    ref_model = _model_filter(ref_p, cfg)
    deg_model = _model_filter(deg_p, cfg)

    ref_align = _alignment_filter(ref_model)
    deg_align = _alignment_filter(deg_model)
    ref_vad, ref_log = compute_vad(ref_align)
    deg_vad, deg_log = compute_vad(deg_align)
    alignment = locate_utterances(ref_align, deg_align, ref_vad, ref_log, deg_vad, deg_log)

    result = run_model(ref_model, deg_model, alignment)
    # mappings consume the unclamped internal value; the raw output is clamped
    internal = raw_value(result.d_sym_total, result.d_asym_total)
    clamped = raw_score(result.d_sym_total, result.d_asym_total)

    if cfg.band == WIDEBAND:
        return PesqResult(mode=cfg.mode, raw=None, mos_lqo=map_wb_lqo(internal))
    if cfg.output == OUTPUT_MOS_LQO:
        return PesqResult(mode=cfg.mode, raw=clamped, mos_lqo=map_nb_lqo(internal))
    return PesqResult(mode=cfg.mode, raw=clamped, mos_lqo=None)
