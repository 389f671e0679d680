"""Two-stage time alignment between reference and degraded signals.

A crude whole-signal delay is estimated from the cross-correlation of the
log-energy envelopes; per-utterance delays are then refined with windowed
waveform correlation and a circular delay histogram, and utterances whose
delay changes internally are split at the best-confidence breakpoint and
realigned part by part.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from . import constants as c
from .dsp import PaddedSignal, c_div


@dataclass
class Utterance:
    start: int            # window units
    end: int              # window units
    delay_est: int        # samples, crude estimate
    delay: int            # samples, refined
    confidence: float
    search_start: int     # window units
    search_end: int       # window units


@dataclass
class AlignmentResult:
    """Crude delay plus the per-utterance delay map."""

    crude_delay: int
    utterances: list[Utterance] = field(default_factory=list)

    @property
    def n_utterances(self) -> int:
        return len(self.utterances)


def envelope_correlate(ref_env: np.ndarray, deg_env: np.ndarray) -> tuple[int, float]:
    """Peak of the full cross-correlation; returns (lag, peak value).

    Lag is expressed in envelope samples: positive means the degraded
    envelope trails the reference.  A correlation that never exceeds zero
    reports lag 0 with zero confidence.
    """
    nr, nd = len(ref_env), len(deg_env)
    if nr <= 1 or nd <= 1:
        return 0, 0.0
    corr = fftconvolve(ref_env[::-1], deg_env)
    i_max = int(np.argmax(corr))
    v_max = float(corr[i_max])
    if v_max <= 0.0:
        return 0, 0.0
    return i_max - (nr - 1), v_max


def crude_align(ref_log_vad, deg_log_vad, rate,
                startr: int, nr: int, startd: int, nd: int) -> int:
    """Envelope correlation over the given window ranges, result in samples."""
    lag, _ = envelope_correlate(ref_log_vad[startr : startr + nr],
                                deg_log_vad[startd : startd + nd])
    return lag * c.downsample(rate)


def _whole_signal_crude_delay(ref_log_vad, deg_log_vad, rate) -> int:
    return crude_align(ref_log_vad, deg_log_vad, rate,
                       0, len(ref_log_vad), 0, len(deg_log_vad))


def _utterance_crude_delay(ref_log_vad, deg_log_vad, rate, deg_windows: int,
                           search_start: int, search_end: int, base_delay: int) -> int:
    """Crude re-estimate within one search window, seeded with base_delay."""
    ds = c.downsample(rate)
    startr = search_start
    startd = startr + c_div(base_delay, ds)
    if startd < 0:
        startr = -c_div(base_delay, ds)
        startd = 0
    nr = search_end - startr
    nd = min(nr, deg_windows - startd)
    return crude_align(ref_log_vad, deg_log_vad, rate, startr, nr, startd, nd) + base_delay


def id_search_windows(ref_vad, deg_n_samples: int, rate: int, crude_delay: int) -> list[tuple[int, int]]:
    """Speech-burst search windows (padded by SEARCHBUFFER), window units."""
    ds = c.downsample(rate)
    vad_length = len(ref_vad)
    del_deg_start = c.MIN_UTT_WINDOWS - c_div(crude_delay, ds)
    del_deg_end = c_div(deg_n_samples - crude_delay, ds) - c.MIN_UTT_WINDOWS

    windows = []
    speech_flag = False
    this_start = 0
    utt_start = 0
    for count in range(vad_length):
        value = ref_vad[count]
        if value > 0.0 and not speech_flag:
            speech_flag = True
            this_start = count
            utt_start = max(count - c.SEARCHBUFFER, 0)
        if (value <= 0.0 or count == vad_length - 1) and speech_flag:
            speech_flag = False
            utt_end = min(count + c.SEARCHBUFFER, vad_length - 1)
            if (count - this_start >= c.MIN_UTT_WINDOWS
                    and this_start < del_deg_end and count > del_deg_start):
                windows.append((utt_start, utt_end))
                if len(windows) == c.MAX_UTTERANCES:
                    break
    return windows


def _id_utterance_bounds(ref_vad, deg_n_samples: int, rate: int, crude_delay: int,
                         utts: list[Utterance]) -> None:
    """Final utterance boundaries: midpoints between bursts, delay-clamped edges."""
    ds = c.downsample(rate)
    vad_length = len(ref_vad)
    del_deg_start = c.MIN_UTT_WINDOWS - c_div(crude_delay, ds)
    del_deg_end = c_div(deg_n_samples - crude_delay, ds) - c.MIN_UTT_WINDOWS

    bounds = []
    speech_flag = False
    this_start = 0
    for count in range(vad_length):
        value = ref_vad[count]
        if value > 0.0 and not speech_flag:
            speech_flag = True
            this_start = count
        if (value <= 0.0 or count == vad_length - 1) and speech_flag:
            speech_flag = False
            if (count - this_start >= c.MIN_UTT_WINDOWS
                    and this_start < del_deg_end and count > del_deg_start):
                bounds.append([this_start, count])

    n = min(len(bounds), len(utts))
    for utt, (start, end) in zip(utts, bounds[:n]):
        utt.start, utt.end = start, end

    utts[0].start = c.SEARCHBUFFER
    utts[-1].end = vad_length - c.SEARCHBUFFER
    for i in range(1, len(utts)):
        mid = (utts[i].start + utts[i - 1].end) // 2
        utts[i].start = mid
        utts[i - 1].end = mid

    first = utts[0]
    if first.start * ds + first.delay < c.SEARCHBUFFER * ds:
        first.start = c.SEARCHBUFFER + c_div(ds - 1 - first.delay, ds)
    last = utts[-1]
    if last.end * ds + last.delay > deg_n_samples - c.SEARCHBUFFER * ds:
        last.end = c_div(deg_n_samples - last.delay, ds) - c.SEARCHBUFFER

    # Resolve overlaps in degraded-domain coverage between neighbours.
    for i in range(1, len(utts)):
        cur, prev = utts[i], utts[i - 1]
        this_start = cur.start * ds + cur.delay
        last_end = prev.end * ds + prev.delay
        if this_start < last_end:
            mid = c_div(this_start + last_end, 2)
            cur.start = c_div(ds - 1 + mid - cur.delay, ds)
            prev.end = c_div(mid - prev.delay, ds)


class _DelayHistogram:
    """Circular histogram of per-window correlation peaks."""

    def __init__(self, nfft: int):
        self.nfft = nfft
        self.kernel = nfft // 64
        self.hist = np.zeros(nfft)
        self.total = 0.0
        offsets = np.arange(1 - self.kernel, self.kernel)
        self.offsets = offsets
        self.weights = (self.kernel - np.abs(offsets)) / self.kernel

    def accumulate(self, ref_win: np.ndarray, deg_win: np.ndarray) -> None:
        spec = np.conj(np.fft.rfft(ref_win)) * np.fft.rfft(deg_win)
        corr = np.abs(np.fft.irfft(spec, self.nfft))
        v_max = corr.max() * 0.99
        if v_max <= 0.0:
            return
        n_max = v_max ** 0.125
        for count in np.flatnonzero(corr > v_max):
            idx = (count + self.offsets) % self.nfft
            np.add.at(self.hist, idx, n_max * self.weights)
            self.total += n_max

    def peak(self) -> tuple[int, float]:
        i_max = int(np.argmax(self.hist))
        v_max = float(self.hist[i_max])
        if i_max >= self.nfft // 2:
            i_max -= self.nfft
        conf = v_max / self.total if self.total > 0.0 else 0.0
        return i_max, conf


def _hann(nfft: int) -> np.ndarray:
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(nfft) / nfft))


def time_align_forward(ref: PaddedSignal, deg: PaddedSignal, window: np.ndarray,
                       est_delay: int, startr: int, limit_r: int) -> tuple[int, float]:
    """Histogram alignment sweeping forward from startr (sample units)."""
    nfft = len(window)
    hist = _DelayHistogram(nfft)
    startd = startr + est_delay
    if startd < 0:
        startr = -est_delay
        startd = 0
    while startd + nfft <= deg.n_samples and startr + nfft <= limit_r:
        hist.accumulate(ref.data[startr : startr + nfft] * window,
                        deg.data[startd : startd + nfft] * window)
        startr += nfft // 4
        startd += nfft // 4
    shift, conf = hist.peak()
    return est_delay + shift, conf


def time_align_backward(ref: PaddedSignal, deg: PaddedSignal, window: np.ndarray,
                        est_delay: int, startr: int, limit_r: int) -> tuple[int, float]:
    """Histogram alignment sweeping backward from startr (sample units)."""
    nfft = len(window)
    hist = _DelayHistogram(nfft)
    startd = startr + est_delay
    if startd + nfft > deg.n_samples:
        startd = deg.n_samples - nfft
        startr = startd - est_delay
    while startd >= 0 and startr >= limit_r:
        hist.accumulate(ref.data[startr : startr + nfft] * window,
                        deg.data[startd : startd + nfft] * window)
        startr -= nfft // 4
        startd -= nfft // 4
    shift, conf = hist.peak()
    return est_delay + shift, conf


def _split_align(ref: PaddedSignal, deg: PaddedSignal, ref_log_vad, deg_log_vad,
                 utt: Utterance, speech_start: int, speech_end: int):
    """Search for a breakpoint splitting one utterance into two delays.

    Returns (ed1, d1, dc1, ed2, d2, dc2, bp) for the best split, or None when
    no candidate beats the unsplit confidence on both sides.
    """
    rate = ref.rate
    ds = c.downsample(rate)
    nfft = c.align_nfft(rate)
    window = _hann(nfft)
    utt_len = speech_end - speech_start

    delta = nfft // (4 * ds)
    step = ((int(0.801 * utt_len) + 40 * delta - 1) // (40 * delta)) * delta
    pad = max(utt_len // 10, 75)

    bps = [speech_start + pad]
    while bps[-1] + step + pad < speech_end:
        bps.append(bps[-1] + step)
    # the reference generates one candidate past the limit and never uses it
    n_bps = len(bps) if bps[-1] + pad < speech_end else len(bps) - 1
    if n_bps <= 0:
        return None

    deg_windows = deg.n_samples // ds
    ed1 = np.zeros(n_bps, dtype=np.int64)
    ed2 = np.zeros(n_bps, dtype=np.int64)
    for bp in range(n_bps):
        ed1[bp] = _utterance_crude_delay(ref_log_vad, deg_log_vad, rate, deg_windows,
                                         utt.search_start, bps[bp], utt.delay_est)
        ed2[bp] = _utterance_crude_delay(ref_log_vad, deg_log_vad, rate, deg_windows,
                                         bps[bp], utt.search_end, utt.delay_est)

    d1 = np.zeros(n_bps, dtype=np.int64)
    dc1 = np.full(n_bps, -2.0)
    while True:
        bp = 0
        while bp < n_bps and dc1[bp] > -2.0:
            bp += 1
        if bp >= n_bps:
            break
        delay, conf = time_align_forward(ref, deg, window, int(ed1[bp]),
                                         utt.start * ds, bps[bp] * ds)
        d1[bp], dc1[bp] = delay, conf
        while bp < n_bps - 1:
            bp += 1
            if ed1[bp] == d1[bp - 1] and dc1[bp] <= -2.0:
                d1[bp] = d1[bp - 1]
                dc1[bp] = dc1[bp - 1]

    d2 = np.zeros(n_bps, dtype=np.int64)
    dc2 = np.full(n_bps, -2.0)
    while True:
        bp = n_bps - 1
        while bp >= 0 and dc2[bp] > -2.0:
            bp -= 1
        if bp < 0:
            break
        delay, conf = time_align_backward(ref, deg, window, int(ed2[bp]),
                                          utt.end * ds - nfft, bps[bp] * ds)
        d2[bp], dc2[bp] = delay, conf
        while bp > 0:
            bp -= 1
            if ed2[bp] == d2[bp + 1] and dc2[bp] <= -2.0:
                d2[bp] = d2[bp + 1]
                dc2[bp] = dc2[bp + 1]

    best = None
    best_dc_sum = 0.0
    for bp in range(n_bps):
        if (abs(int(d2[bp]) - int(d1[bp])) >= ds
                and dc1[bp] + dc2[bp] > best_dc_sum
                and dc1[bp] > utt.confidence and dc2[bp] > utt.confidence):
            best_dc_sum = dc1[bp] + dc2[bp]
            best = (int(ed1[bp]), int(d1[bp]), float(dc1[bp]),
                    int(ed2[bp]), int(d2[bp]), float(dc2[bp]), bps[bp])
    return best


def _utterance_split(ref: PaddedSignal, deg: PaddedSignal, ref_vad,
                     ref_log_vad, deg_log_vad, utts: list[Utterance]) -> None:
    ds = c.downsample(ref.rate)
    utt_id = 0
    while utt_id < len(utts) and len(utts) < c.MAX_UTTERANCES:
        utt = utts[utt_id]

        speech_start = max(utt.start, 0)
        while speech_start < utt.end and ref_vad[speech_start] <= 0.0:
            speech_start += 1
        speech_end = utt.end
        while speech_end > utt.start and ref_vad[speech_end] <= 0.0:
            speech_end -= 1
        speech_end += 1

        if speech_end - speech_start < 200:
            utt_id += 1
            continue

        best = _split_align(ref, deg, ref_log_vad, deg_log_vad, utt,
                            speech_start, speech_end)
        if best is None:
            utt_id += 1
            continue
        ed1, d1, dc1, ed2, d2, dc2, bp = best
        if not (dc1 > utt.confidence and dc2 > utt.confidence):
            utt_id += 1
            continue

        # The shifted copies inherit the utterance bounds as search windows,
        # matching the reference bookkeeping.
        second = Utterance(
            start=utt.start, end=utt.end, delay_est=ed2, delay=d2,
            confidence=dc2, search_start=utt.search_start, search_end=utt.search_end,
        )
        for follower in utts[utt_id + 1 :]:
            follower.search_start = follower.start
            follower.search_end = follower.end
        utts.insert(utt_id + 1, second)

        start_l, end_l = utt.start, utt.end
        utt.delay_est, utt.delay, utt.confidence = ed1, d1, dc1
        if d2 < d1:
            utt.start = start_l
            utt.end = bp + c_div(d2 - d1, 2 * ds)
            second.start = bp - c_div(d2 - d1, 2 * ds)
            second.end = end_l
        else:
            utt.start = start_l
            utt.end = bp
            second.start = bp
            second.end = end_l

        if (utt.start - c.SEARCHBUFFER) * ds + d1 < 0:
            utt.start = c.SEARCHBUFFER + c_div(ds - 1 - d1, ds)
        if second.end * ds + d2 > deg.n_samples - c.SEARCHBUFFER * ds:
            second.end = c_div(deg.n_samples - d2, ds) - c.SEARCHBUFFER


def locate_utterances(ref: PaddedSignal, deg: PaddedSignal,
                      ref_vad, ref_log_vad, deg_vad, deg_log_vad) -> AlignmentResult:
    """Full alignment: crude delay, per-utterance refinement, splitting."""
    del deg_vad
    rate = ref.rate
    ds = c.downsample(rate)
    nfft = c.align_nfft(rate)
    window = _hann(nfft)

    crude_delay = _whole_signal_crude_delay(ref_log_vad, deg_log_vad, rate)

    search = id_search_windows(ref_vad, deg.n_samples, rate, crude_delay)
    if not search:
        raise ValueError("no speech activity: reference contains no usable utterance")

    deg_windows = deg.n_samples // ds
    utts: list[Utterance] = []
    for search_start, search_end in search:
        delay_est = _utterance_crude_delay(ref_log_vad, deg_log_vad, rate, deg_windows,
                                           search_start, search_end, crude_delay)
        startr = search_start * ds
        delay, conf = time_align_forward(
            ref, deg, window, delay_est, startr, search_end * ds)
        utts.append(Utterance(
            start=0, end=0, delay_est=delay_est, delay=delay, confidence=conf,
            search_start=search_start, search_end=search_end,
        ))

    _id_utterance_bounds(ref_vad, deg.n_samples, rate, crude_delay, utts)
    _utterance_split(ref, deg, ref_vad, ref_log_vad, deg_log_vad, utts)

    return AlignmentResult(crude_delay=crude_delay, utterances=utts)
