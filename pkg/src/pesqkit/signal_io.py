"""Audio loading and channel reshaping.

All scoring code consumes :class:`AudioSignal`: planar float64 channels on the
signed-16-bit nominal scale (full scale +/-32768).  WAV input is restricted to
little-endian RIFF with PCM16 (format 1) or float32 (format 3) data; float
samples are rescaled by 32768 so both encodings land on the same scale.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

SUPPORTED_RATES = (8000, 16000)
MAX_CHANNELS = 8
MIN_DURATION_S = 0.25
MAX_DURATION_S = 64.0

FLOAT_TO_INT16_SCALE = 32768.0


class WavFormatError(ValueError):
    """Raised for WAV containers this package refuses to parse."""


@dataclass(frozen=True)
class AudioSignal:
    """Planar multi-channel sample buffer plus its sample rate.

    ``samples`` has shape (channels, length); values live on the nominal
    signed-16-bit scale.  Instances are immutable and safe to share between
    concurrent scoring jobs.
    """

    samples: np.ndarray
    rate: int
    channels: int = field(init=False)

    def __post_init__(self):
        data = np.asarray(self.samples, dtype=np.float64)
        if data.ndim == 1:
            data = data[np.newaxis, :]
        if data.ndim != 2:
            raise ValueError(f"samples must be 1-D or 2-D, got shape {data.shape}")
        if data.shape[0] < 1:
            raise ValueError("signal needs at least one channel")
        data = np.ascontiguousarray(data)
        data.setflags(write=False)
        object.__setattr__(self, "samples", data)
        object.__setattr__(self, "channels", data.shape[0])
        if int(self.rate) <= 0:
            raise ValueError(f"sample rate must be positive, got {self.rate}")
        object.__setattr__(self, "rate", int(self.rate))

    def __len__(self):
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        return self.samples.shape[1] / self.rate

    def channel(self, index: int) -> np.ndarray:
        return self.samples[index]


def validate_for_scoring(signal: AudioSignal, name: str = "signal") -> None:
    """Enforce the scoring entry invariants: rate, duration and channel caps."""
    if signal.rate not in SUPPORTED_RATES:
        raise ValueError(
            f"{name}: unsupported rate {signal.rate} Hz; scoring requires 8000 or "
            "16000 Hz (resample externally before calling)"
        )
    if signal.channels > MAX_CHANNELS:
        raise ValueError(f"{name}: more than {MAX_CHANNELS} channels not accepted")
    if signal.duration < MIN_DURATION_S:
        raise ValueError(
            f"{name}: duration {signal.duration:.3f} s below the {MIN_DURATION_S} s minimum"
        )
    if signal.duration > MAX_DURATION_S:
        raise ValueError(
            f"{name}: duration {signal.duration:.1f} s above the {MAX_DURATION_S} s maximum"
        )


def read_wav(path) -> AudioSignal:
    """Parse a RIFF/WAVE file into an AudioSignal.

    PCM16 samples are copied verbatim as floats; float32 samples are multiplied
    by 32768 so both encodings share the nominal scale.  Raises
    :class:`WavFormatError` with a distinct message for a malformed RIFF
    header, an unsupported codec, or an empty data chunk.
    """
    with open(path, "rb") as fh:
        blob = fh.read()

    if len(blob) < 12 or blob[0:4] != b"RIFF" or blob[8:12] != b"WAVE":
        raise WavFormatError(f"{path}: malformed RIFF header (not a RIFF/WAVE file)")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(blob):
        cid = blob[pos : pos + 4]
        (size,) = struct.unpack_from("<I", blob, pos + 4)
        body = blob[pos + 8 : pos + 8 + size]
        if cid == b"fmt " and fmt is None:
            if len(body) < 16:
                raise WavFormatError(f"{path}: malformed RIFF header (truncated fmt chunk)")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data" and data is None:
            data = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None:
        raise WavFormatError(f"{path}: malformed RIFF header (missing fmt chunk)")
    if data is None:
        raise WavFormatError(f"{path}: malformed RIFF header (missing data chunk)")

    audio_format, n_channels, sample_rate, _, block_align, bits = fmt
    if not 1 <= n_channels <= MAX_CHANNELS:
        raise WavFormatError(f"{path}: {n_channels} channels outside the supported 1..8 range")

    if audio_format == 1 and bits == 16:
        raw = np.frombuffer(data[: len(data) // 2 * 2], dtype="<i2")
        scale = 1.0
    elif audio_format == 3 and bits == 32:
        raw = np.frombuffer(data[: len(data) // 4 * 4], dtype="<f4")
        scale = FLOAT_TO_INT16_SCALE
    else:
        raise WavFormatError(
            f"{path}: unsupported codec (format tag {audio_format}, {bits}-bit); "
            "only PCM16 and float32 are readable"
        )

    if raw.size == 0:
        raise WavFormatError(f"{path}: zero-length data chunk")

    frames = raw.size // n_channels
    planar = raw[: frames * n_channels].reshape(frames, n_channels).T
    return AudioSignal(planar.astype(np.float64) * scale, sample_rate)


def write_wav(path, signal: AudioSignal, encoding: str = "pcm16") -> None:
    """Write an AudioSignal as RIFF/WAVE (PCM16 or float32).

    The inverse of :func:`read_wav` for both encodings: PCM16 values are
    rounded to the nearest integer and clipped to the int16 range; float32
    data is divided by 32768 before storage.
    """
    planar = signal.samples
    frames = planar.shape[1]
    interleaved = planar.T.reshape(-1)
    if encoding == "pcm16":
        payload = np.clip(np.rint(interleaved), -32768, 32767).astype("<i2").tobytes()
        fmt_tag, bits = 1, 16
    elif encoding == "float32":
        payload = (interleaved / FLOAT_TO_INT16_SCALE).astype("<f4").tobytes()
        fmt_tag, bits = 3, 32
    else:
        raise ValueError(f"unknown encoding {encoding!r}; use 'pcm16' or 'float32'")

    block_align = signal.channels * bits // 8
    fmt_chunk = struct.pack(
        "<HHIIHH", fmt_tag, signal.channels, signal.rate,
        signal.rate * block_align, block_align, bits,
    )
    with open(path, "wb") as fh:
        fh.write(b"RIFF")
        fh.write(struct.pack("<I", 4 + 8 + len(fmt_chunk) + 8 + len(payload)))
        fh.write(b"WAVE")
        fh.write(b"fmt " + struct.pack("<I", len(fmt_chunk)) + fmt_chunk)
        fh.write(b"data" + struct.pack("<I", len(payload)) + payload)
        if len(payload) & 1:
            fh.write(b"\x00")
    del frames


def downmix_mono(signal: AudioSignal) -> AudioSignal:
    """Passive downmix: arithmetic mean across channels, rate preserved."""
    if signal.channels == 1:
        return signal
    return AudioSignal(signal.samples.mean(axis=0), signal.rate)


def split_channels(signal: AudioSignal) -> list[AudioSignal]:
    """Split into per-channel mono signals of the same rate and length."""
    return [AudioSignal(signal.channel(c), signal.rate) for c in range(signal.channels)]


def interleave(signal: AudioSignal) -> AudioSignal:
    """Round-robin the channels into one long "mono" signal.

    Reproduces how the reference tooling ingests multi-channel files: the
    result is channels x frame-count samples ordered ch0[0], ch1[0], ch0[1],
    ... with the rate field left untouched.
    """
    if signal.channels < 2:
        raise ValueError("interleave needs at least 2 channels; mono has nothing to interleave")
    flat = signal.samples.T.reshape(-1)
    return AudioSignal(flat, signal.rate)
