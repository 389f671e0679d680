"""Shared fixtures: synthetic speech-shaped corpus and oracle plumbing."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.signal import butter, lfilter, sosfilt

from pesqkit import AudioSignal

RATES = (8000, 16000)


def speech_shaped_carrier(rng: np.random.Generator, rate: int, duration: float,
                          bursts=None, level: float = 2500.0) -> np.ndarray:
    """Noise with a speech-like spectral tilt and syllabic burst envelope.

    Bursts are (start_s, duration_s) pairs; defaults give three bursts with
    leading/trailing silence so utterance detection has work to do.
    """
    n = int(rate * duration)
    spectrum_tilt = lfilter([1.0], [1.0, -0.9], rng.standard_normal(n))
    formantish = lfilter([1.0, 0.4], [1.0, -1.2, 0.7], spectrum_tilt)
    if bursts is None:
        usable = duration - 0.6
        burst = usable / 3.0
        bursts = [(0.3 + i * (burst + 0.15), burst) for i in range(3)]
    t = np.arange(n) / rate
    env = np.zeros(n)
    for start, dur in bursts:
        m = (t >= start) & (t < start + dur)
        env[m] = np.sin(np.pi * (t[m] - start) / dur) ** 2
    sig = formantish * env
    rms = np.sqrt(np.mean(sig**2))
    return sig / (rms + 1e-12) * level


def degrade(rng: np.random.Generator, sig: np.ndarray, rate: int, kind: str,
            param: float) -> np.ndarray:
    """Apply one of the corpus degradations to a carrier."""
    if kind == "noise":  # additive speech-band noise at an SNR in dB
        noise = rng.standard_normal(len(sig))
        noise *= np.sqrt(np.mean(sig**2) / np.mean(noise**2)) * 10.0 ** (-param / 20.0)
        return sig + noise
    if kind == "lowpass":  # butterworth lowpass, cutoff in Hz
        sos = butter(4, param / (rate / 2), output="sos")
        return sosfilt(sos, sig)
    if kind == "clip":  # hard clipping at a fraction of the peak
        peak = np.abs(sig).max()
        return np.clip(sig, -param * peak, param * peak)
    if kind == "delay":  # prepended silence in milliseconds
        pad = np.zeros(int(rate * param / 1000.0))
        return np.concatenate([pad, sig])
    raise ValueError(f"unknown degradation {kind!r}")


def corpus_pairs(rate: int, n_pairs: int = 10, duration: float = 4.0,
                 seed: int = 20240814) -> list[tuple[AudioSignal, AudioSignal, str]]:
    """Deterministic list of (reference, degraded, description) pairs."""
    rng = np.random.default_rng(seed + rate)
    recipes = [
        ("noise", 40.0), ("noise", 30.0), ("noise", 20.0), ("noise", 10.0),
        ("noise", 0.0), ("lowpass", 2000.0), ("lowpass", 3400.0 if rate == 16000 else 1500.0),
        ("clip", 0.3), ("delay", 60.0), ("delay", 120.0),
    ]
    pairs = []
    for i in range(n_pairs):
        kind, param = recipes[i % len(recipes)]
        ref = speech_shaped_carrier(rng, rate, duration)
        deg = degrade(rng, ref, rate, kind, param)
        pairs.append((AudioSignal(ref, rate), AudioSignal(deg, rate),
                      f"{kind}({param:g})@{rate}"))
    return pairs


@pytest.fixture(scope="session")
def corpus_16k():
    return corpus_pairs(16000)


@pytest.fixture(scope="session")
def corpus_8k():
    return corpus_pairs(8000)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def short_carrier_16k():
    return AudioSignal(speech_shaped_carrier(np.random.default_rng(77), 16000, 3.0), 16000)


@pytest.fixture(scope="session")
def short_carrier_8k():
    return AudioSignal(speech_shaped_carrier(np.random.default_rng(78), 8000, 3.0), 8000)
