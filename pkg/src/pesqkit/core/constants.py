"""Numeric tables and parameters for the P.862 measurement pipeline.

Everything here is transcribed from the public ITU-T P.862 reference code
(pesqpar.h / pesq.h of the ANSI-C distribution, 2005 edition) except the
corrected wideband input filter, which comes from P.862 Corrigendum 2 (2018).
Values are kept in double precision throughout.
"""

from __future__ import annotations

import numpy as np

# --- Frame and search geometry -------------------------------------------------
# One VAD window is DOWNSAMPLE samples; SEARCHBUFFER is measured in windows.
DATAPADDING_MS = 320
SEARCHBUFFER = 75
MIN_SPEECH_WINDOWS = 4      # VAD bursts shorter than this are discarded
JOIN_SPEECH_WINDOWS = 50    # VAD gaps shorter than this are bridged
MIN_UTT_WINDOWS = 50        # minimum utterance length in windows
MAX_UTTERANCES = 50
SILENCE_5_SAMPLES_ABS_SUM = 500.0

TARGET_AVG_POWER = 1.0e7    # listening-level calibration target (350-3250 Hz band)

WHOLE_SIGNAL = -1


def downsample(rate: int) -> int:
    return 32 if rate == 8000 else 64


def align_nfft(rate: int) -> int:
    return 512 if rate == 8000 else 1024


def frame_nfft(rate: int) -> int:
    # 32 ms analysis frame, 50 % overlap
    return downsample(rate) * 8


def n_bark_bands(rate: int) -> int:
    return 42 if rate == 8000 else 49


def power_scale(rate: int) -> float:
    # Sp: Hz-power to Bark-intensity calibration
    return 2.764344e-5 if rate == 8000 else 6.910853e-6


LOUDNESS_SCALE = 1.866055e-1    # Sl, identical for both rates
ZWICKER_POWER = 0.23

# --- Perceptual model parameters ----------------------------------------------
D_POW_F, D_POW_S, D_POW_T = 2.0, 6.0, 2.0   # symmetric disturbance norm orders
A_POW_F, A_POW_S, A_POW_T = 1.0, 6.0, 2.0   # asymmetric disturbance norm orders
D_WEIGHT = 0.1
A_WEIGHT = 0.0309
FRAMES_PER_SYLLABLE = 20

GAIN_PART = 0.8                 # short-term gain smoothing: 0.2 old + 0.8 new
MAX_SCALE = 5.0
MIN_SCALE = 3.0e-4
BAD_FRAME_THRESHOLD = 30.0
SMEAR_RANGE = 2
MIN_BAD_FRAMES_IN_INTERVAL = 5
BAD_INTERVAL_SEARCH_TRANSFORMS = 4
MAX_FRAME_DISTURBANCE = 45.0

# --- Level-alignment band (dB response breakpoints, Hz/dB pairs) ---------------
# Brick-wall 350-3250 Hz band used to measure the calibration power.
ALIGN_FILTER_DB = np.array([
    (0, -500.0), (50, -500.0), (100, -500.0), (125, -500.0), (160, -500.0),
    (200, -500.0), (250, -500.0), (300, -500.0), (350, 0.0), (400, 0.0),
    (500, 0.0), (600, 0.0), (630, 0.0), (800, 0.0), (1000, 0.0), (1250, 0.0),
    (1600, 0.0), (2000, 0.0), (2500, 0.0), (3000, 0.0), (3250, 0.0),
    (3500, -500.0), (4000, -500.0), (5000, -500.0), (6300, -500.0),
    (8000, -500.0),
], dtype=np.float64)

# --- Narrowband input filter --------------------------------------------------
# IRS receive characteristic applied to both signals before the perceptual
# model in the narrowband modes.
STANDARD_IRS_FILTER_DB = np.array([
    (0, -200.0), (50, -40.0), (100, -20.0), (125, -12.0), (160, -6.0),
    (200, 0.0), (250, 4.0), (300, 6.0), (350, 8.0), (400, 10.0),
    (500, 11.0), (600, 12.0), (700, 12.0), (800, 12.0), (1000, 12.0),
    (1300, 12.0), (1600, 12.0), (2000, 12.0), (2500, 12.0), (3000, 12.0),
    (3250, 12.0), (3500, 4.0), (4000, -200.0), (5000, -200.0),
    (6300, -200.0), (8000, -200.0),
], dtype=np.float64)

# --- Wideband input filters (second-order sections, rows of b0 b1 b2 a1 a2) ----
# Original P.862.2 pre-filter as shipped in the reference code.  The same
# high-pass shape carries a spurious passband gain (~2.8x at Nyquist).
WB_INPUT_SOS = {
    8000: np.array([[2.6657628, -5.3315255, 2.6657628, -1.8890331, 0.89487434]]),
    16000: np.array([[2.740826, -5.4816519, 2.740826, -1.9444777, 0.94597794]]),
}

# Corrected coefficients per P.862 Corrigendum 2 (03/2018): identical poles,
# passband gain renormalised to unity.  Wideband assessment is defined for
# 16 kHz input only, so only that entry exists.
WB_INPUT_SOS_C2 = {
    16000: np.array([[0.9727786, -1.9455572, 0.9727786, -1.9444777, 0.94597794]]),
}

# --- MOS-LQO output mappings ----------------------------------------------------
# P.862.1 (narrowband): y = 0.999 + 4 / (1 + exp(-1.4945 x + 4.6607))
NB_MAP_SLOPE = 1.4945
NB_MAP_OFFSET = 4.6607
# P.862.2 (wideband):   y = 0.999 + 4 / (1 + exp(-1.3669 x + 3.8224))
WB_MAP_SLOPE = 1.3669
WB_MAP_OFFSET = 3.8224
MAP_FLOOR = 0.999
MAP_SPAN = 4.0

# --- Bark-domain tables ---------------------------------------------------------
# Number of FFT bins summed into each modified-Bark band (42 bands at 8 kHz
# over 128 bins, 49 bands at 16 kHz over 256 bins).
HZ_BANDS_PER_BARK_8K = np.array([
    1, 1, 1, 1, 1, 1, 1, 1, 2, 1,
    1, 1, 1, 1, 2, 1, 1, 2, 2, 2,
    2, 2, 2, 2, 2, 3, 3, 3, 3, 4,
    3, 4, 5, 4, 5, 6, 6, 7, 8, 9,
    9, 11,
], dtype=np.int64)

HZ_BANDS_PER_BARK_16K = np.array([
    1, 1, 1, 1, 1, 1, 1, 1, 2, 1,
    1, 1, 1, 1, 2, 1, 1, 2, 2, 2,
    2, 2, 2, 2, 2, 3, 3, 3, 3, 4,
    3, 4, 5, 4, 5, 6, 6, 7, 8, 9,
    9, 12, 12, 15, 16, 18, 21, 25, 20,
], dtype=np.int64)

# Per-band power correction applied after binning.
POW_DENS_CORRECTION_8K = np.array([
    100.000000, 99.999992, 100.000000, 100.000008, 100.000008,
    100.000015, 99.999992, 99.999969, 50.000027, 100.000000,
    99.999969, 100.000015, 99.999947, 100.000061, 53.047077,
    110.000046, 117.991989, 65.000000, 68.760147, 69.999931,
    71.428818, 75.000038, 76.843384, 80.968781, 88.646126,
    63.864388, 68.155350, 72.547775, 75.584831, 58.379192,
    80.950836, 64.135651, 54.384785, 73.821884, 64.437073,
    59.176456, 65.521278, 61.399822, 58.144047, 57.004543,
    64.126297, 59.248363,
])

POW_DENS_CORRECTION_16K = np.array([
    100.000000, 99.999992, 100.000000, 100.000008,
    100.000008, 100.000015, 99.999992, 99.999969,
    50.000027, 100.000000, 99.999969, 100.000015,
    99.999947, 100.000061, 53.047077, 110.000046,
    117.991989, 65.000000, 68.760147, 69.999931,
    71.428818, 75.000038, 76.843384, 80.968781,
    88.646126, 63.864388, 68.155350, 72.547775,
    75.584831, 58.379192, 80.950836, 64.135651,
    54.384785, 73.821884, 64.437073, 59.176456,
    65.521278, 61.399822, 58.144047, 57.004543,
    64.126297, 54.311001, 61.114979, 55.077751,
    56.849335, 55.628868, 53.137054, 54.985844,
    79.546974,
])

# Absolute hearing threshold per band (intensity scale).
ABS_THRESH_POWER_8K = np.array([
    51286152, 2454709.500, 70794.593750,
    4897.788574, 1174.897705, 389.045166,
    104.712860, 45.708820, 17.782795,
    9.772372, 4.897789, 3.090296,
    1.905461, 1.258925, 0.977237,
    0.724436, 0.562341, 0.457088,
    0.389045, 0.331131, 0.295121,
    0.269153, 0.257040, 0.251189,
    0.251189, 0.251189, 0.251189,
    0.263027, 0.288403, 0.309030,
    0.338844, 0.371535, 0.398107,
    0.436516, 0.467735, 0.489779,
    0.501187, 0.501187, 0.512861,
    0.524807, 0.524807, 0.524807,
])

ABS_THRESH_POWER_16K = np.array([
    51286152.00, 2454709.500, 70794.593750,
    4897.788574, 1174.897705, 389.045166,
    104.712860, 45.708820, 17.782795,
    9.772372, 4.897789, 3.090296,
    1.905461, 1.258925, 0.977237,
    0.724436, 0.562341, 0.457088,
    0.389045, 0.331131, 0.295121,
    0.269153, 0.257040, 0.251189,
    0.251189, 0.251189, 0.251189,
    0.263027, 0.288403, 0.309030,
    0.338844, 0.371535, 0.398107,
    0.436516, 0.467735, 0.489779,
    0.501187, 0.501187, 0.512861,
    0.524807, 0.524807, 0.524807,
    0.512861, 0.478630, 0.426580,
    0.371535, 0.363078, 0.416869,
    0.537032,
])

# Band centres on the modified Bark scale.
CENTER_OF_BAND_8K = np.array([
    0.078672, 0.316341, 0.636559, 0.961246, 1.290450,
    1.624217, 1.962597, 2.305636, 2.653383, 3.005889,
    3.363201, 3.725371, 4.092449, 4.464486, 4.841533,
    5.223642, 5.610866, 6.003256, 6.400869, 6.803755,
    7.211971, 7.625571, 8.044611, 8.469146, 8.899232,
    9.334927, 9.776288, 10.223374, 10.676242, 11.134952,
    11.599563, 12.070135, 12.546731, 13.029408, 13.518232,
    14.013264, 14.514566, 15.022202, 15.536238, 16.056736,
    16.583761, 17.117382,
])

CENTER_OF_BAND_16K = np.array([
    0.078672, 0.316341, 0.636559, 0.961246, 1.290450,
    1.624217, 1.962597, 2.305636, 2.653383, 3.005889,
    3.363201, 3.725371, 4.092449, 4.464486, 4.841533,
    5.223642, 5.610866, 6.003256, 6.400869, 6.803755,
    7.211971, 7.625571, 8.044611, 8.469146, 8.899232,
    9.334927, 9.776288, 10.223374, 10.676242, 11.134952,
    11.599563, 12.070135, 12.546731, 13.029408, 13.518232,
    14.013264, 14.514566, 15.022202, 15.536238, 16.056736,
    16.583761, 17.117382, 17.657663, 18.204674, 18.758478,
    19.319147, 19.886751, 20.461355, 21.043034,
])

# Band widths on the modified Bark scale.
WIDTH_OF_BAND_8K = np.array([
    0.157344, 0.317994, 0.322441, 0.326934, 0.331474,
    0.336061, 0.340697, 0.345381, 0.350114, 0.354897,
    0.359729, 0.364611, 0.369544, 0.374529, 0.379565,
    0.384653, 0.389794, 0.394989, 0.400236, 0.405538,
    0.410894, 0.416306, 0.421773, 0.427297, 0.432877,
    0.438514, 0.444209, 0.449962, 0.455774, 0.461645,
    0.467577, 0.473569, 0.479621, 0.485736, 0.491912,
    0.498151, 0.504454, 0.510819, 0.517250, 0.523745,
    0.530308, 0.536934,
])

WIDTH_OF_BAND_16K = np.array([
    0.157344, 0.317994, 0.322441, 0.326934, 0.331474,
    0.336061, 0.340697, 0.345381, 0.350114, 0.354897,
    0.359729, 0.364611, 0.369544, 0.374529, 0.379565,
    0.384653, 0.389794, 0.394989, 0.400236, 0.405538,
    0.410894, 0.416306, 0.421773, 0.427297, 0.432877,
    0.438514, 0.444209, 0.449962, 0.455774, 0.461645,
    0.467577, 0.473569, 0.479621, 0.485736, 0.491912,
    0.498151, 0.504454, 0.510819, 0.517250, 0.523745,
    0.530308, 0.536934, 0.543629, 0.550390, 0.557220,
    0.564119, 0.571085, 0.578125, 0.585232,
])


def bark_tables(rate: int):
    """Return (bins per band, power correction, abs threshold, centre, width)."""
    if rate == 8000:
        return (HZ_BANDS_PER_BARK_8K, POW_DENS_CORRECTION_8K, ABS_THRESH_POWER_8K,
                CENTER_OF_BAND_8K, WIDTH_OF_BAND_8K)
    return (HZ_BANDS_PER_BARK_16K, POW_DENS_CORRECTION_16K, ABS_THRESH_POWER_16K,
            CENTER_OF_BAND_16K, WIDTH_OF_BAND_16K)


for _rate in (8000, 16000):
    _tables = bark_tables(_rate)
    assert all(len(_t) == n_bark_bands(_rate) for _t in _tables)
    assert int(_tables[0].sum()) == frame_nfft(_rate) // 2
del _rate, _tables
