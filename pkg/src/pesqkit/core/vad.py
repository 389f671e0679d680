"""Energy-based voice activity detection over the alignment buffers.

Works at window resolution (one window = the rate-dependent downsample
factor).  The VAD array uses the sign convention of the reference model:
positive entries are speech windows, negated entries are background.
"""

from __future__ import annotations

import numpy as np

from . import constants as c
from .dsp import PaddedSignal


def compute_vad(sig: PaddedSignal) -> tuple[np.ndarray, np.ndarray]:
    """Return (vad, log_vad) arrays with one entry per window."""
    ds = c.downsample(sig.rate)
    n_windows = sig.n_samples // ds
    frames = sig.data[: n_windows * ds].reshape(n_windows, ds)
    vad = (frames * frames).sum(axis=1) / ds

    level_thresh = vad.sum() / n_windows

    level_min = float(vad.max())
    level_min = level_min * 1.0e-4 if level_min > 0.0 else 1.0
    vad[vad < level_min] = level_min

    # Iteratively pull the threshold toward noise mean + 2 sigma.
    for _ in range(12):
        noise = vad[vad <= level_thresh]
        if len(noise) > 0:
            level_noise = noise.mean()
            std_noise = np.sqrt(((noise - level_noise) ** 2).mean())
        else:
            level_noise = 0.0
            std_noise = 0.0
        level_thresh = 1.001 * (level_noise + 2.0 * std_noise)

    speech = vad[vad > level_thresh]
    noise = vad[vad <= level_thresh]
    if len(speech) > 0:
        level_sig = speech.sum() / len(speech)
    else:
        level_sig = 0.0
        level_thresh = -1.0
    level_noise = noise.sum() / (n_windows - len(speech)) if len(speech) < n_windows else 1.0

    vad[vad <= level_thresh] *= -1.0
    vad[0] = -level_min
    vad[-1] = -level_min

    _drop_short_bursts(vad)
    if level_sig >= level_noise * 1000.0:
        _drop_weak_bursts(vad, level_thresh)
    _join_close_bursts(vad, level_min)

    # No speech onset left at all: treat everything as speech.
    onsets = np.flatnonzero((vad[1:] > 0.0) & (vad[:-1] <= 0.0))
    if len(onsets) == 0:
        vad = np.abs(vad)
        vad[0] = -level_min
        vad[-1] = -level_min

    log_vad = np.where(vad > 0.0, np.log(np.maximum(vad, 1e-300)), 0.0)
    return vad, log_vad


def _bursts(vad: np.ndarray):
    """Yield (start, finish) index pairs of positive runs, reference-style."""
    start = 0
    for count in range(1, len(vad)):
        if vad[count] > 0.0 and vad[count - 1] <= 0.0:
            start = count
        if vad[count] <= 0.0 and vad[count - 1] > 0.0:
            yield start, count


def _drop_short_bursts(vad: np.ndarray) -> None:
    for start, finish in _bursts(vad):
        if finish - start <= c.MIN_SPEECH_WINDOWS:
            vad[start:finish] *= -1.0


def _drop_weak_bursts(vad: np.ndarray, level_thresh: float) -> None:
    for start, finish in _bursts(vad):
        if vad[start:finish].sum() < 3.0 * level_thresh * (finish - start):
            vad[start:finish] *= -1.0


def _join_close_bursts(vad: np.ndarray, level_min: float) -> None:
    finish = 0
    for count in range(1, len(vad)):
        if vad[count] > 0.0 and vad[count - 1] <= 0.0:
            if finish > 0 and count - finish <= c.JOIN_SPEECH_WINDOWS:
                vad[finish:count] = level_min
        if vad[count] <= 0.0 and vad[count - 1] > 0.0:
            finish = count
