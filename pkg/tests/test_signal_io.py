"""WAV parsing, channel reshaping and their invariants."""

import struct
import wave

import numpy as np
import pytest

from pesqkit import (AudioSignal, WavFormatError, downmix_mono, interleave,
                     read_wav, split_channels, write_wav)
from pesqkit.signal_io import validate_for_scoring


def _write_with_stdlib(path, planar, rate):
    """Independent PCM16 writer (stdlib wave) acting as the round-trip oracle."""
    interleaved = np.asarray(planar).T.reshape(-1).astype("<i2")
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(len(planar))
        fh.setsampwidth(2)
        fh.setframerate(rate)
        fh.writeframes(interleaved.tobytes())


class TestReadWav:
    def test_pcm16_header_echo(self, tmp_path):
        samples = np.zeros((1, 160000))
        path = tmp_path / "a.wav"
        write_wav(path, AudioSignal(samples, 16000))
        sig = read_wav(path)
        assert sig.rate == 16000
        assert sig.channels == 1
        assert len(sig) == 160000

    def test_float32_scaling(self, tmp_path):
        path = tmp_path / "f32.wav"
        payload = np.full(2048, 0.5, dtype="<f4").tobytes()
        fmt = struct.pack("<HHIIHH", 3, 1, 16000, 16000 * 4, 4, 32)
        with open(path, "wb") as fh:
            fh.write(b"RIFF" + struct.pack("<I", 4 + 8 + len(fmt) + 8 + len(payload)) + b"WAVE")
            fh.write(b"fmt " + struct.pack("<I", len(fmt)) + fmt)
            fh.write(b"data" + struct.pack("<I", len(payload)) + payload)
        sig = read_wav(path)
        assert np.all(sig.samples == 16384.0)  # 0.5 * 32768

    def test_round_trip_against_independent_writer(self, tmp_path, rng):
        planar = np.round(rng.uniform(-30000, 30000, size=(2, 5000)))
        path = tmp_path / "two.wav"
        _write_with_stdlib(path, planar, 8000)
        sig = read_wav(path)
        assert sig.channels == 2
        assert sig.rate == 8000
        np.testing.assert_array_equal(sig.samples, planar)

    def test_reads_are_deterministic(self, tmp_path, rng):
        planar = np.round(rng.uniform(-32768, 32767, size=(1, 4000)))
        path = tmp_path / "d.wav"
        write_wav(path, AudioSignal(planar, 16000))
        first = read_wav(path)
        second = read_wav(path)
        np.testing.assert_array_equal(first.samples, second.samples)

    def test_pcm16_data_chunk_round_trip(self, tmp_path, rng):
        planar = np.round(rng.uniform(-32768, 32767, size=(2, 3000)))
        src = tmp_path / "src.wav"
        dst = tmp_path / "dst.wav"
        _write_with_stdlib(src, planar, 16000)
        write_wav(dst, read_wav(src))

        def data_chunk(path):
            blob = path.read_bytes()
            pos = blob.index(b"data")
            (size,) = struct.unpack_from("<I", blob, pos + 4)
            return blob[pos + 8 : pos + 8 + size]

        assert data_chunk(src) == data_chunk(dst)

    def test_malformed_riff_header(self, tmp_path):
        path = tmp_path / "bad.wav"
        path.write_bytes(b"OggS" + b"\x00" * 64)
        with pytest.raises(WavFormatError, match="malformed RIFF header"):
            read_wav(path)

    def test_unsupported_codec(self, tmp_path):
        path = tmp_path / "alaw.wav"
        fmt = struct.pack("<HHIIHH", 6, 1, 8000, 8000, 1, 8)  # A-law
        payload = b"\x00" * 100
        with open(path, "wb") as fh:
            fh.write(b"RIFF" + struct.pack("<I", 4 + 8 + len(fmt) + 8 + len(payload)) + b"WAVE")
            fh.write(b"fmt " + struct.pack("<I", len(fmt)) + fmt)
            fh.write(b"data" + struct.pack("<I", len(payload)) + payload)
        with pytest.raises(WavFormatError, match="unsupported codec"):
            read_wav(path)

    def test_zero_length_data_chunk(self, tmp_path):
        path = tmp_path / "empty.wav"
        fmt = struct.pack("<HHIIHH", 1, 1, 8000, 16000, 2, 16)
        with open(path, "wb") as fh:
            fh.write(b"RIFF" + struct.pack("<I", 4 + 8 + len(fmt) + 8) + b"WAVE")
            fh.write(b"fmt " + struct.pack("<I", len(fmt)) + fmt)
            fh.write(b"data" + struct.pack("<I", 0))
        with pytest.raises(WavFormatError, match="zero-length data chunk"):
            read_wav(path)

    def test_nine_channels_rejected(self, tmp_path):
        path = tmp_path / "nine.wav"
        fmt = struct.pack("<HHIIHH", 1, 9, 8000, 8000 * 18, 18, 16)
        payload = b"\x00" * (18 * 10)
        with open(path, "wb") as fh:
            fh.write(b"RIFF" + struct.pack("<I", 4 + 8 + len(fmt) + 8 + len(payload)) + b"WAVE")
            fh.write(b"fmt " + struct.pack("<I", len(fmt)) + fmt)
            fh.write(b"data" + struct.pack("<I", len(payload)) + payload)
        with pytest.raises(WavFormatError, match="1..8"):
            read_wav(path)

    def test_float32_write_read_round_trip(self, tmp_path, rng):
        planar = np.round(rng.uniform(-32768, 32767, size=(2, 2500)))
        path = tmp_path / "f.wav"
        write_wav(path, AudioSignal(planar, 16000), encoding="float32")
        sig = read_wav(path)
        np.testing.assert_array_equal(sig.samples, planar)


class TestChannelOps:
    def test_downmix_dual_mono_identity(self, rng):
        mono = rng.uniform(-1000, 1000, 2000)
        sig = AudioSignal(np.stack([mono, mono]), 8000)
        np.testing.assert_array_equal(downmix_mono(sig).samples[0], mono)

    def test_downmix_simple_mean(self):
        sig = AudioSignal(np.array([[2.0, 4.0], [0.0, 0.0]]), 8000)
        np.testing.assert_array_equal(downmix_mono(sig).samples[0], [1.0, 2.0])

    def test_downmix_matches_elementwise_mean_oracle(self, rng):
        planar = rng.uniform(-3000, 3000, size=(2, 777))
        sig = AudioSignal(planar, 16000)
        expected = np.array([(planar[0, i] + planar[1, i]) / 2.0
                             for i in range(planar.shape[1])])
        np.testing.assert_allclose(downmix_mono(sig).samples[0], expected, rtol=0, atol=0)

    def test_interleave_ordering(self):
        sig = AudioSignal(np.array([[1.0, 2.0], [3.0, 4.0]]), 8000)
        out = interleave(sig)
        np.testing.assert_array_equal(out.samples[0], [1.0, 3.0, 2.0, 4.0])
        assert out.rate == 8000

    def test_interleave_dual_mono_duplicates(self):
        mono = np.array([5.0, 6.0, 7.0])
        out = interleave(AudioSignal(np.stack([mono, mono]), 16000))
        np.testing.assert_array_equal(out.samples[0], [5.0, 5.0, 6.0, 6.0, 7.0, 7.0])

    def test_interleave_three_channels_round_robin(self):
        sig = AudioSignal(np.array([[1.0, 4.0], [2.0, 5.0], [3.0, 6.0]]), 8000)
        np.testing.assert_array_equal(interleave(sig).samples[0],
                                      [1.0, 2.0, 3.0, 4.0, 5.0, 6.0])

    def test_interleave_rejects_mono(self):
        with pytest.raises(ValueError, match="interleave"):
            interleave(AudioSignal(np.zeros(100), 8000))

    def test_interleave_length(self, rng):
        planar = rng.uniform(-1, 1, size=(4, 123))
        assert len(interleave(AudioSignal(planar, 8000))) == 4 * 123

    def test_split_mono_identity(self, rng):
        mono = rng.uniform(-1, 1, 50)
        parts = split_channels(AudioSignal(mono, 8000))
        assert len(parts) == 1
        np.testing.assert_array_equal(parts[0].samples[0], mono)

    def test_split_then_downmix_consistency(self, rng):
        planar = rng.uniform(-1, 1, size=(2, 400))
        sig = AudioSignal(planar, 16000)
        parts = split_channels(sig)
        rejoined = AudioSignal(np.stack([p.samples[0] for p in parts]), 16000)
        np.testing.assert_array_equal(downmix_mono(rejoined).samples[0],
                                      downmix_mono(sig).samples[0])

    def test_split_then_interleave_reproduces(self, rng):
        planar = rng.uniform(-1, 1, size=(3, 64))
        sig = AudioSignal(planar, 8000)
        parts = split_channels(sig)
        rebuilt = AudioSignal(np.stack([p.samples[0] for p in parts]), 8000)
        np.testing.assert_array_equal(interleave(rebuilt).samples[0],
                                      interleave(sig).samples[0])


class TestScoringValidation:
    def test_rejects_unsupported_rate(self):
        sig = AudioSignal(np.ones(44100), 44100)
        with pytest.raises(ValueError, match="resample externally"):
            validate_for_scoring(sig)

    def test_rejects_too_short(self):
        sig = AudioSignal(np.ones(800), 8000)  # 0.1 s
        with pytest.raises(ValueError, match="below the 0.25 s minimum"):
            validate_for_scoring(sig)

    def test_rejects_too_long(self):
        sig = AudioSignal(np.ones(8000 * 65), 8000)
        with pytest.raises(ValueError, match="maximum"):
            validate_for_scoring(sig)

    def test_rejects_too_many_channels(self):
        sig = AudioSignal(np.ones((9, 8000)), 8000)
        with pytest.raises(ValueError, match="channels"):
            validate_for_scoring(sig)
