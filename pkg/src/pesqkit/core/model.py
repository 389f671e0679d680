"""Psychoacoustic model: framewise disturbances and their aggregation.

Consumes the level-aligned, input-filtered signal pair plus the utterance
delay map and produces the symmetric/asymmetric disturbance totals that feed
the raw score.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import constants as c
from .aggregate import aggregate_disturbance
from .align import AlignmentResult
from .dsp import PaddedSignal, band_power, c_div, next_pow2
from .perceptual import BarkModel, band_compensation, frame_compensation_scale


@dataclass
class ModelResult:
    d_sym_total: float
    d_asym_total: float
    frame_disturbance: np.ndarray
    frame_disturbance_asym: np.ndarray
    audible: np.ndarray          # per frame: reference frame not silent


def _frame_delays(alignment: AlignmentResult, frame_starts: np.ndarray, ds: int) -> np.ndarray:
    """Delay applied to each frame: that of the last utterance starting at or
    before the frame, else the first utterance's delay."""
    utts = alignment.utterances
    starts = np.array([u.start * ds for u in utts])
    delays = np.array([u.delay for u in utts])
    idx = np.searchsorted(starts, frame_starts, side="right") - 1
    idx = np.clip(idx, 0, len(utts) - 1)
    return delays[idx]


def _tweaked_degraded(deg: PaddedSignal, alignment: AlignmentResult) -> np.ndarray:
    """Degraded samples re-indexed through the per-utterance delay map."""
    ds = c.downsample(deg.rate)
    buf = c.SEARCHBUFFER * ds
    nn = len(deg.data)
    out = np.zeros(nn)
    positions = np.arange(buf, nn - buf)
    delays = _frame_delays(alignment, positions, ds)
    src = np.clip(positions + delays, buf, nn - buf - 1)
    out[buf : nn - buf] = deg.data[src]
    return out


def _skip_silence(data: np.ndarray, start: int, stop_exclusive: int,
                  max_n: int) -> tuple[int, int]:
    """Leading/trailing counts of 5-sample groups below the silence criterion."""
    absdata = np.abs(data)

    skip_start = 0
    while (absdata[start + skip_start : start + skip_start + 5].sum()
           < c.SILENCE_5_SAMPLES_ABS_SUM and skip_start < max_n / 2):
        skip_start += 1

    skip_end = 0
    while (absdata[stop_exclusive - 5 - skip_end : stop_exclusive - skip_end].sum()
           < c.SILENCE_5_SAMPLES_ABS_SUM and skip_end < max_n / 2):
        skip_end += 1
    return skip_start, skip_end


def run_model(ref: PaddedSignal, deg: PaddedSignal,
              alignment: AlignmentResult) -> ModelResult:
    rate = ref.rate
    ds = c.downsample(rate)
    buf = c.SEARCHBUFFER * ds
    padding = ref.padding
    bark = BarkModel(rate)
    nf = bark.nfft
    hop = nf // 2
    max_n = max(ref.n_samples, deg.n_samples)

    skip_start, skip_end = _skip_silence(ref.data, buf, max_n - buf + padding, max_n)
    start_frame = skip_start // hop
    stop_frame = (max_n - 2 * buf + padding - skip_end) // hop - 1
    n_frames = stop_frame + 1

    # -- Bark power densities for every frame ------------------------------
    pitch_ref = np.zeros((n_frames, bark.nb))
    pitch_deg = np.zeros((n_frames, bark.nb))
    frame_starts = buf + hop * np.arange(n_frames)
    delays = _frame_delays(alignment, frame_starts, ds)

    for frame in range(n_frames):
        start_ref = int(frame_starts[frame])
        pitch_ref[frame] = bark.to_bark(bark.power_spectrum(ref.data, start_ref))
        start_deg = start_ref + int(delays[frame])
        if start_deg > 0 and start_deg + nf < max_n + padding:
            pitch_deg[frame] = bark.to_bark(bark.power_spectrum(deg.data, start_deg))

    silent = np.array([bark.total_audible(pitch_ref[f], 1.0e2) < 1.0e7
                       for f in range(n_frames)])

    # -- Partial frequency-response compensation (applied to the reference) -
    total_frames = (max_n - 2 * buf + padding) // hop - 1
    avg_ref = bark.time_avg_audible(pitch_ref, silent, total_frames)
    avg_deg = bark.time_avg_audible(pitch_deg, silent, total_frames)
    pitch_ref = pitch_ref * band_compensation(avg_ref, avg_deg)[np.newaxis, :]

    # -- Framewise gain compensation and disturbance densities --------------
    frame_disturbance = np.zeros(n_frames)
    frame_disturbance_asym = np.zeros(n_frames)
    total_power_ref = np.zeros(n_frames)
    bad_frame = False
    old_scale = 1.0
    for frame in range(n_frames):
        total_ref = bark.total_audible(pitch_ref[frame], 1.0)
        total_deg = bark.total_audible(pitch_deg[frame], 1.0)
        total_power_ref[frame] = total_ref

        scale = frame_compensation_scale(total_ref, total_deg, old_scale, frame == 0)
        old_scale = scale
        scale = min(max(scale, c.MIN_SCALE), c.MAX_SCALE)
        pitch_deg[frame] *= scale

        loud_ref = bark.loudness(pitch_ref[frame])
        loud_deg = bark.loudness(pitch_deg[frame])
        dens = bark.masked_difference(loud_ref, loud_deg)

        frame_disturbance[frame] = bark.pseudo_lp(dens, c.D_POW_F)
        if frame_disturbance[frame] > c.BAD_FRAME_THRESHOLD:
            bad_frame = True

        dens_asym = dens * bark.asymmetry_factor(pitch_ref[frame], pitch_deg[frame])
        frame_disturbance_asym[frame] = bark.pseudo_lp(dens_asym, c.A_POW_F)

    # -- Zero out frames lost to backward delay jumps ------------------------
    utts = alignment.utterances
    for utt in range(1, len(utts)):
        frame1 = c_div((utts[utt].start - c.SEARCHBUFFER) * ds + utts[utt].delay, hop)
        j = c_div((utts[utt - 1].end - c.SEARCHBUFFER) * ds + utts[utt - 1].delay, hop)
        delay_jump = utts[utt].delay - utts[utt - 1].delay
        frame1 = max(min(frame1, j), 0)
        if delay_jump < -hop:
            frame2 = c_div((utts[utt].start - c.SEARCHBUFFER) * ds
                           + abs(delay_jump), hop) + 1
            for frame in range(frame1, frame2 + 1):
                if frame < stop_frame:
                    frame_disturbance[frame] = 0.0
                    frame_disturbance_asym[frame] = 0.0

    tweaked = _tweaked_degraded(deg, alignment)
    if bad_frame:
        _reprocess_bad_intervals(
            ref, bark, tweaked, pitch_ref,
            frame_disturbance, frame_disturbance_asym, stop_frame, max_n)

    # -- Long-file emphasis and loudness normalisation -----------------------
    time_weight = np.ones(n_frames)
    if n_frames > 1000:
        n = (max_n - 2 * buf) // hop - 1
        twf = min((n - 1000) / 5500.0, 0.5)
        time_weight = (1.0 - twf) + twf * np.arange(n_frames) / n

    h = ((total_power_ref + 1.0e5) / 1.0e7) ** 0.04
    frame_disturbance = np.minimum(frame_disturbance / h, c.MAX_FRAME_DISTURBANCE)
    frame_disturbance_asym = np.minimum(frame_disturbance_asym / h, c.MAX_FRAME_DISTURBANCE)

    d_sym, d_asym = aggregate_disturbance(
        frame_disturbance, frame_disturbance_asym, time_weight, start_frame, stop_frame)

    return ModelResult(
        d_sym_total=d_sym,
        d_asym_total=d_asym,
        frame_disturbance=frame_disturbance,
        frame_disturbance_asym=frame_disturbance_asym,
        audible=~silent,
    )


def _compute_delay(ref_seg: np.ndarray, deg_seg: np.ndarray, search_range: int) -> tuple[int, float]:
    """Best correlation lag of |ref| against |deg| within +/-search_range."""
    n = len(ref_seg)
    nfft = next_pow2(2 * n)
    power1 = band_power(ref_seg, 0, n, n) * n / nfft
    power2 = band_power(deg_seg, 0, n, n) * n / nfft
    if power1 <= 1e-6 or power2 <= 1e-6:
        return 0, 0.0
    normalization = np.sqrt(power1 * power2)

    x1 = np.zeros(nfft)
    x2 = np.zeros(nfft)
    x1[:n] = np.abs(ref_seg)
    x2[:n] = np.abs(deg_seg)
    y = np.fft.irfft(np.conj(np.fft.rfft(x1)) * np.fft.rfft(x2), nfft)

    best_delay = 0
    max_corr = 0.0
    for i in range(-search_range, search_range):
        h = abs(y[i + nfft if i < 0 else i]) / normalization
        if h > max_corr:
            max_corr = h
            best_delay = i
    return best_delay, float(max_corr)


def _reprocess_bad_intervals(ref, bark: BarkModel, tweaked, pitch_ref,
                             frame_disturbance,
                             frame_disturbance_asym, stop_frame, max_n) -> None:
    """Realign severely disturbed intervals and keep the milder disturbance."""
    rate = ref.rate
    ds = c.downsample(rate)
    buf = c.SEARCHBUFFER * ds
    padding = ref.padding
    nf = bark.nfft
    hop = nf // 2

    frame_is_bad = frame_disturbance > c.BAD_FRAME_THRESHOLD
    frame_is_bad[0] = False

    smeared = np.zeros(stop_frame + 1, dtype=bool)
    for frame in range(c.SMEAR_RANGE, stop_frame - c.SMEAR_RANGE):
        left = frame_is_bad[frame - c.SMEAR_RANGE : frame + 1].max()
        right = frame_is_bad[frame : frame + c.SMEAR_RANGE + 1].max()
        smeared[frame] = left and right

    intervals = []
    frame = 0
    while frame <= stop_frame:
        while frame <= stop_frame and not smeared[frame]:
            frame += 1
        if frame <= stop_frame:
            start = frame
            while frame <= stop_frame and smeared[frame]:
                frame += 1
            if frame - start >= c.MIN_BAD_FRAMES_IN_INTERVAL:
                intervals.append((start, frame))

    if not intervals:
        return

    search = c.BAD_INTERVAL_SEARCH_TRANSFORMS * nf
    doubly_tweaked = tweaked[: max_n + padding].copy()
    delays = []
    for start, stop in intervals:
        start_samp = start * hop + buf
        stop_samp = stop * hop + nf + buf
        n_samp = stop_samp - start_samp

        ref_seg = np.zeros(2 * search + n_samp)
        ref_seg[search : search + n_samp] = ref.data[start_samp:stop_samp]

        limit = max_n - buf + padding
        src = np.clip(np.arange(start_samp - search, start_samp + search + n_samp),
                      buf, limit - 1)
        deg_seg = tweaked[src]

        delay, best_corr = _compute_delay(ref_seg, deg_seg, search)
        if best_corr < 0.5:
            delay = 0
        delays.append(delay)

        idx = np.clip(np.arange(start_samp, stop_samp) + delay, 0, max_n - 1)
        doubly_tweaked[start_samp:stop_samp] = tweaked[idx]

    for (start, stop), _delay in zip(intervals, delays):
        stop = min(stop, stop_frame)
        pitch_deg_local = np.zeros((stop - start, bark.nb))
        for i, frame in enumerate(range(start, stop)):
            start_samp = buf + frame * hop
            pitch_deg_local[i] = bark.to_bark(
                bark.power_spectrum(doubly_tweaked, start_samp))

        old_scale = 1.0
        for i, frame in enumerate(range(start, stop)):
            total_ref = bark.total_audible(pitch_ref[frame], 1.0)
            total_deg = bark.total_audible(pitch_deg_local[i], 1.0)
            scale = frame_compensation_scale(total_ref, total_deg, old_scale, frame == 0)
            old_scale = scale
            scale = min(max(scale, c.MIN_SCALE), c.MAX_SCALE)
            pitch_deg_local[i] *= scale

            loud_ref = bark.loudness(pitch_ref[frame])
            loud_deg = bark.loudness(pitch_deg_local[i])
            dens = bark.masked_difference(loud_ref, loud_deg)

            frame_disturbance[frame] = min(
                frame_disturbance[frame], bark.pseudo_lp(dens, c.D_POW_F))
            dens_asym = dens * bark.asymmetry_factor(pitch_ref[frame], pitch_deg_local[i])
            frame_disturbance_asym[frame] = min(
                frame_disturbance_asym[frame], bark.pseudo_lp(dens_asym, c.A_POW_F))
