"""Delay estimation, utterance detection and fine alignment."""

import numpy as np
import pytest

from pesqkit import (AudioSignal, PesqConfig, align_utterances,
                     detect_utterances, estimate_crude_delay)
from pesqkit.core import constants as c

from conftest import speech_shaped_carrier


def _carrier(rate, seed=5, duration=4.0, bursts=None):
    return AudioSignal(
        speech_shaped_carrier(np.random.default_rng(seed), rate, duration, bursts), rate)


class TestCrudeDelay:
    @pytest.mark.parametrize("rate", [8000, 16000])
    def test_identity_gives_zero(self, rate):
        sig = _carrier(rate)
        cfg = PesqConfig.from_mode("nb-raw", rate)
        assert estimate_crude_delay(sig, sig, cfg) == 0

    @pytest.mark.parametrize("rate,shift", [(8000, 2000), (16000, 4000)])
    def test_constructed_shift_within_one_hop(self, rate, shift):
        sig = _carrier(rate)
        cfg = PesqConfig.from_mode("nb-raw", rate)
        shifted = AudioSignal(np.concatenate([np.zeros(shift), sig.samples[0]]), rate)
        est = estimate_crude_delay(sig, shifted, cfg)
        assert abs(est - shift) <= c.downsample(rate)

    def test_silent_envelope_gives_zero(self):
        # degenerate pair: both essentially silent envelopes after filtering
        rate = 8000
        quiet = AudioSignal(np.full(rate * 2, 1e-3), rate)
        cfg = PesqConfig.from_mode("nb-raw", rate)
        assert estimate_crude_delay(quiet, quiet, cfg) == 0


class TestDetectUtterances:
    def test_constant_tone_is_single_utterance(self):
        rate = 8000
        t = np.arange(rate * 2) / rate
        tone = AudioSignal(np.sin(2 * np.pi * 1000 * t) * 2000, rate)
        spans = detect_utterances(tone, PesqConfig(rate=rate))
        assert len(spans) == 1
        start, end = spans[0]
        n_windows = (len(tone) + 2 * c.SEARCHBUFFER * c.downsample(rate)) // c.downsample(rate)
        assert start <= c.SEARCHBUFFER + 2
        assert end >= n_windows - c.SEARCHBUFFER - 2

    def test_tone_gap_tone_makes_two(self):
        rate = 8000
        t = np.arange(rate) / rate
        tone = np.sin(2 * np.pi * 1000 * t) * 2000
        sig = AudioSignal(np.concatenate([tone, np.zeros(rate), tone]), rate)
        spans = detect_utterances(sig, PesqConfig(rate=rate))
        assert len(spans) == 2

    def test_silent_reference_is_an_error(self):
        rate = 8000
        with pytest.raises(ValueError, match="no speech activity|silent"):
            detect_utterances(AudioSignal(np.zeros(rate * 2), rate), PesqConfig(rate=rate))


class TestAlignUtterances:
    def test_identity_all_delays_zero(self):
        sig = _carrier(16000)
        cfg = PesqConfig.from_mode("nb-lqo", 16000)
        result = align_utterances(sig, sig, cfg)
        assert result.crude_delay == 0
        assert result.n_utterances >= 1
        assert all(u.delay == 0 for u in result.utterances)

    def test_utterances_ordered_and_disjoint(self):
        sig = _carrier(16000, seed=21)
        deg = AudioSignal(np.concatenate([np.zeros(800), sig.samples[0]]), 16000)
        cfg = PesqConfig.from_mode("nb-lqo", 16000)
        result = align_utterances(sig, deg, cfg)
        starts = [u.start for u in result.utterances]
        ends = [u.end for u in result.utterances]
        assert starts == sorted(starts)
        assert all(e1 <= s2 for e1, s2 in zip(ends, starts[1:]))

    def test_piecewise_delay_splits_utterance(self):
        # a speech-like burst train (gaps short enough to stay one utterance)
        # whose second half is shifted by +800 samples; the envelope notches
        # are what lets the crude stage see the jump, as with natural speech
        rate = 16000
        rng = np.random.default_rng(900)
        bursts = [(0.4 + 0.35 * i, 0.25) for i in range(15)]
        sig = speech_shaped_carrier(rng, rate, 6.0, bursts=bursts)
        half = len(sig) // 2
        deg = np.concatenate([sig[:half], np.zeros(800), sig[half:]])
        cfg = PesqConfig.from_mode("nb-lqo", rate)
        result = align_utterances(AudioSignal(sig, rate), AudioSignal(deg, rate), cfg)
        assert result.n_utterances >= 2
        delays = [u.delay for u in result.utterances]
        hop = c.align_nfft(rate) // 4
        assert min(abs(d - 0) for d in delays) <= hop
        assert min(abs(d - 800) for d in delays) <= hop

    def test_constant_delay_recovered_exactly(self):
        rate = 8000
        sig = _carrier(rate, seed=31)
        deg = AudioSignal(np.concatenate([np.zeros(443), sig.samples[0]]), rate)
        cfg = PesqConfig.from_mode("nb-raw", rate)
        result = align_utterances(sig, deg, cfg)
        # fine alignment resolves the exact sample delay, not just the hop
        assert all(u.delay == 443 for u in result.utterances)

    @pytest.mark.parametrize("seed", range(8))
    def test_randomised_constant_delays_recovered_exactly(self, seed):
        rng = np.random.default_rng(1000 + seed)
        rate = 16000 if seed % 2 else 8000
        shift = int(rng.integers(0, int(0.12 * rate)))
        sig = AudioSignal(speech_shaped_carrier(rng, rate, 4.0), rate)
        deg = AudioSignal(np.concatenate([np.zeros(shift), sig.samples[0]]), rate)
        cfg = PesqConfig.from_mode("nb-raw", rate)
        result = align_utterances(sig, deg, cfg)
        assert all(u.delay == shift for u in result.utterances), \
            f"shift {shift} not recovered: {[u.delay for u in result.utterances]}"

    @pytest.mark.parametrize("seed", range(4))
    def test_randomised_delay_jump_recovered(self, seed):
        # burst train with a random extra delay inserted between two bursts
        rng = np.random.default_rng(2000 + seed)
        rate = 16000
        bursts = [(0.4 + 0.35 * i, 0.25) for i in range(15)]
        sig = speech_shaped_carrier(rng, rate, 6.0, bursts=bursts)
        jump = int(rng.integers(300, 1400))
        cut = int(rate * (0.4 + 0.35 * 7))  # inside a gap of the train
        deg = np.concatenate([sig[:cut], np.zeros(jump), sig[cut:]])
        cfg = PesqConfig.from_mode("nb-lqo", rate)
        result = align_utterances(AudioSignal(sig, rate), AudioSignal(deg, rate), cfg)
        delays = [u.delay for u in result.utterances]
        hop = c.align_nfft(rate) // 4
        assert min(abs(d) for d in delays) <= hop
        assert min(abs(d - jump) for d in delays) <= hop
