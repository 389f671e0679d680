"""Buffer layout and signal-conditioning primitives shared by the pipeline.

The measurement operates on padded mono buffers: SEARCHBUFFER windows of
zeros on both sides of the payload plus DATAPADDING_MS of trailing zeros.
``n_samples`` counts payload plus the two search buffers (the trailing
padding is extra), mirroring the reference buffer conventions so that all
index arithmetic carries over unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import sosfilt

from . import constants as c


def c_div(a: int, b: int) -> int:
    """Integer division with C semantics (truncation toward zero)."""
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


@dataclass
class PaddedSignal:
    """Mono working buffer in reference layout."""

    data: np.ndarray      # length n_samples + padding
    n_samples: int        # payload + 2 * SEARCHBUFFER * downsample
    rate: int

    def copy(self) -> "PaddedSignal":
        return PaddedSignal(self.data.copy(), self.n_samples, self.rate)

    @property
    def padding(self) -> int:
        return c.DATAPADDING_MS * (self.rate // 1000)


def prepare(samples: np.ndarray, rate: int) -> PaddedSignal:
    """Wrap raw mono samples into the padded working layout."""
    samples = np.asarray(samples, dtype=np.float64).reshape(-1)
    buf = c.SEARCHBUFFER * c.downsample(rate)
    padding = c.DATAPADDING_MS * (rate // 1000)
    data = np.zeros(len(samples) + 2 * buf + padding)
    data[buf : buf + len(samples)] = samples
    return PaddedSignal(data, len(samples) + 2 * buf, rate)


def band_power(data: np.ndarray, start: int, stop: int, divisor: int) -> float:
    """Mean-square power of data[start:stop] with an explicit divisor."""
    seg = data[start:stop]
    return float(np.dot(seg, seg) / divisor)


def apply_curve_filter(sig: PaddedSignal, curve: np.ndarray) -> PaddedSignal:
    """Zero-phase FFT filtering with a piecewise-linear dB magnitude curve.

    The curve is normalised to 0 dB at 1 kHz; the region outside both search
    buffers is transformed with one zero-padded power-of-two FFT, scaled per
    bin, and written back.
    """
    buf = c.SEARCHBUFFER * c.downsample(sig.rate)
    n = sig.n_samples - 2 * buf + sig.padding
    nfft = next_pow2(n)

    gain_1khz = np.interp(1000.0, curve[:, 0], curve[:, 1])
    freqs = np.arange(nfft // 2 + 1) * (sig.rate / nfft)
    factor = 10.0 ** ((np.interp(freqs, curve[:, 0], curve[:, 1]) - gain_1khz) / 20.0)

    x = np.zeros(nfft)
    x[:n] = sig.data[buf : buf + n]
    spec = np.fft.rfft(x) * factor
    y = np.fft.irfft(spec, nfft)

    out = sig.copy()
    out.data[buf : buf + n] = y[:n]
    return out


def fix_power_level(sig: PaddedSignal, max_n_samples: int) -> tuple[PaddedSignal, float]:
    """Scale so the 350-3250 Hz band hits the standard listening level.

    Returns the scaled signal and the scale factor applied.  A silent band is
    an error: there is nothing meaningful to calibrate.
    """
    buf = c.SEARCHBUFFER * c.downsample(sig.rate)
    filtered = apply_curve_filter(sig, c.ALIGN_FILTER_DB)
    power = band_power(
        filtered.data,
        buf,
        sig.n_samples - buf + sig.padding,
        max_n_samples - 2 * buf + sig.padding,
    )
    if power <= 0.0 or not np.isfinite(power):
        raise ValueError("silent input: no power in the 350-3250 Hz band to calibrate")
    scale = float(np.sqrt(c.TARGET_AVG_POWER / power))
    out = sig.copy()
    out.data[: out.n_samples] *= scale
    return out, scale


def dc_block(sig: PaddedSignal) -> PaddedSignal:
    """Remove the payload DC offset and ramp the payload edges.

    The mean is (deliberately) computed with the full n_samples divisor, and
    the first/last window of the payload is faded linearly, as the reference
    alignment path does.
    """
    ds = c.downsample(sig.rate)
    buf = c.SEARCHBUFFER * ds
    out = sig.copy()
    seg = out.data[buf : sig.n_samples - buf]
    seg -= seg.sum() / sig.n_samples
    ramp = (0.5 + np.arange(ds)) / ds
    seg[:ds] *= ramp
    seg[-ds:] *= ramp[::-1]
    return out


def iir_sos_filter(sig: PaddedSignal, sos_rows: np.ndarray) -> PaddedSignal:
    """Cascade of second-order sections over the whole padded buffer.

    Rows are (b0, b1, b2, a1, a2) with an implicit a0 of 1.
    """
    rows = np.atleast_2d(np.asarray(sos_rows, dtype=np.float64))
    sos = np.column_stack([rows[:, :3], np.ones(len(rows)), rows[:, 3:]])
    out = sig.copy()
    out.data[:] = sosfilt(sos, out.data)
    return out
