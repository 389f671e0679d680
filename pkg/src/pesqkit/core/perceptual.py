"""Bark-domain perceptual transform and disturbance densities."""

from __future__ import annotations

import numpy as np

from . import constants as c


class BarkModel:
    """Rate-specific tables plus the per-frame transforms using them."""

    def __init__(self, rate: int):
        self.rate = rate
        self.nfft = c.frame_nfft(rate)
        self.nb = c.n_bark_bands(rate)
        self.sp = c.power_scale(rate)
        (bins, correction, thresh, center, width) = c.bark_tables(rate)
        self.band_edges = np.concatenate(([0], np.cumsum(bins)))[:-1]
        self.correction = correction
        self.abs_thresh = thresh
        self.width = width
        self.total_width = float(width[1:].sum())
        self.window = 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(self.nfft) / self.nfft))
        # Zwicker exponent with the low-frequency modification
        h = np.ones(self.nb)
        low = center < 4.0
        h[low] = np.minimum(6.0 / (center[low] + 2.0), 2.0)
        self.mod_zwicker = c.ZWICKER_POWER * h**0.15

    def power_spectrum(self, data: np.ndarray, start: int) -> np.ndarray:
        """|FFT|^2 of one Hann-windowed frame; DC bin forced to zero."""
        frame = data[start : start + self.nfft] * self.window
        spec = np.abs(np.fft.rfft(frame)[: self.nfft // 2]) ** 2
        spec[0] = 0.0
        return spec

    def to_bark(self, hz_spectrum: np.ndarray) -> np.ndarray:
        """Group FFT-bin powers onto the modified Bark scale."""
        sums = np.add.reduceat(hz_spectrum, self.band_edges)
        return sums * self.correction * self.sp

    def total_audible(self, bark_row: np.ndarray, factor: float) -> float:
        """Sum of band powers above factor x threshold (band 0 excluded)."""
        h = bark_row[1:]
        mask = h > factor * self.abs_thresh[1:]
        return float(h[mask].sum())

    def time_avg_audible(self, bark: np.ndarray, silent: np.ndarray,
                         total_frames: int) -> np.ndarray:
        """Per-band mean over non-silent frames of clearly audible power."""
        audible = np.where(bark > 100.0 * self.abs_thresh, bark, 0.0)
        audible[silent] = 0.0
        return audible.sum(axis=0) / total_frames

    def loudness(self, bark_row: np.ndarray) -> np.ndarray:
        """Zwicker-law loudness density; zero below the hearing threshold."""
        thresh = self.abs_thresh
        mzp = self.mod_zwicker
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = (thresh / 0.5) ** mzp * ((0.5 + 0.5 * bark_row / thresh) ** mzp - 1.0)
        dens = np.where(bark_row > thresh, dens, 0.0)
        return dens * c.LOUDNESS_SCALE

    def masked_difference(self, loud_ref: np.ndarray, loud_deg: np.ndarray) -> np.ndarray:
        """Loudness difference with a deadzone of a quarter of the smaller one."""
        diff = loud_deg - loud_ref
        deadzone = 0.25 * np.minimum(loud_deg, loud_ref)
        return np.where(diff > deadzone, diff - deadzone,
                        np.where(diff < -deadzone, diff + deadzone, 0.0))

    def asymmetry_factor(self, bark_ref_row: np.ndarray, bark_deg_row: np.ndarray) -> np.ndarray:
        """Band weighting for added distortion: ((deg+50)/(ref+50))^1.2.

        Capped at 12; values below 3 drop to zero so that purely subtractive
        errors do not contribute to the asymmetric disturbance.
        """
        ratio = (bark_deg_row + 50.0) / (bark_ref_row + 50.0)
        h = ratio**1.2
        h = np.minimum(h, 12.0)
        return np.where(h < 3.0, 0.0, h)

    def pseudo_lp(self, dens: np.ndarray, p: float) -> float:
        """Width-weighted p-norm across bands (band 0 excluded)."""
        prod = np.abs(dens[1:]) * self.width[1:]
        result = float((prod**p).sum() / self.total_width) ** (1.0 / p)
        return result * self.total_width


def frame_compensation_scale(total_ref: float, total_deg: float, old_scale: float,
                             first_frame: bool) -> float:
    """Short-term gain compensation factor with smoothing and clamping."""
    scale = (total_ref + 5.0e3) / (total_deg + 5.0e3)
    if not first_frame:
        scale = (1.0 - c.GAIN_PART) * old_scale + c.GAIN_PART * scale
    return scale


def band_compensation(avg_ref: np.ndarray, avg_deg: np.ndarray) -> np.ndarray:
    """Partial frequency-response compensation factors (clamped band ratios)."""
    ratio = (avg_deg + 1000.0) / (avg_ref + 1000.0)
    return np.clip(ratio, 0.01, 100.0)
