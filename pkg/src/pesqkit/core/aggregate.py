"""Disturbance aggregation over split-second intervals and the raw score."""

from __future__ import annotations

import numpy as np

from . import constants as c

RAW_SCORE_CEIL = 4.5
RAW_SCORE_FLOOR = -0.5


def lpq_weight(frame_values: np.ndarray, time_weight: np.ndarray,
               start_frame: int, stop_frame: int,
               power_syllable: float, power_time: float) -> float:
    """Power-mean cascade: frames into ~20-frame syllables, syllables in time.

    ``time_weight`` is indexed relative to ``start_frame``, reproducing the
    reference indexing.
    """
    per_syllable = c.FRAMES_PER_SYLLABLE
    result_time = 0.0
    total_weight = 0.0
    for start_syl in range(start_frame, stop_frame + 1, per_syllable // 2):
        frames = np.arange(start_syl, start_syl + per_syllable)
        inside = frames[frames <= stop_frame]
        result_syl = float((frame_values[inside] ** power_syllable).sum()) / per_syllable
        result_syl **= 1.0 / power_syllable

        weight = time_weight[start_syl - start_frame]
        result_time += (weight * result_syl) ** power_time
        total_weight += weight**power_time

    result_time /= total_weight
    return result_time ** (1.0 / power_time)


def aggregate_disturbance(frame_disturbance: np.ndarray,
                          frame_disturbance_asym: np.ndarray,
                          time_weight: np.ndarray,
                          start_frame: int, stop_frame: int) -> tuple[float, float]:
    """Aggregate the two per-frame series into (d_sym_total, d_asym_total)."""
    d = lpq_weight(frame_disturbance, time_weight, start_frame, stop_frame,
                   c.D_POW_S, c.D_POW_T)
    a = lpq_weight(frame_disturbance_asym, time_weight, start_frame, stop_frame,
                   c.A_POW_S, c.A_POW_T)
    return d, a


def raw_value(d_sym_total: float, d_asym_total: float) -> float:
    """Unclamped combination 4.5 - 0.1 d_sym - 0.0309 d_asym.

    This is the internal pre-mapping value; the published raw score clamps it.
    """
    return float(RAW_SCORE_CEIL - c.D_WEIGHT * d_sym_total - c.A_WEIGHT * d_asym_total)


def raw_score(d_sym_total: float, d_asym_total: float) -> float:
    """4.5 - 0.1 d_sym - 0.0309 d_asym, clamped to [-0.5, 4.5]."""
    value = raw_value(d_sym_total, d_asym_total)
    return float(min(max(value, RAW_SCORE_FLOOR), RAW_SCORE_CEIL))
