"""Scoring configuration and version selection."""

from __future__ import annotations

from dataclasses import dataclass

NARROWBAND = "narrow"
WIDEBAND = "wide"
OUTPUT_RAW = "raw"
OUTPUT_MOS_LQO = "mos-lqo"

#: CLI/front-end mode strings.  There is deliberately no default: every entry
#: point forces an explicit version choice and echoes it back in its output.
MODES = ("nb-raw", "nb-lqo", "wb", "wb-c2")


@dataclass(frozen=True)
class PesqConfig:
    """Sample rate, band mode, output kind and Corrigendum 2 switch."""

    rate: int
    band: str = NARROWBAND
    output: str = OUTPUT_RAW
    corrigendum2: bool = False

    def __post_init__(self):
        if self.rate not in (8000, 16000):
            raise ValueError(f"rate must be 8000 or 16000 Hz, got {self.rate}")
        if self.band not in (NARROWBAND, WIDEBAND):
            raise ValueError(f"band must be '{NARROWBAND}' or '{WIDEBAND}', got {self.band!r}")
        if self.output not in (OUTPUT_RAW, OUTPUT_MOS_LQO):
            raise ValueError(f"output must be '{OUTPUT_RAW}' or '{OUTPUT_MOS_LQO}'")
        if self.band == WIDEBAND and self.rate != 16000:
            raise ValueError("wideband requires 16000 Hz")
        if self.band == WIDEBAND and self.output != OUTPUT_MOS_LQO:
            raise ValueError("wideband outputs MOS-LQO only, not raw scores")
        if self.corrigendum2 and self.band != WIDEBAND:
            raise ValueError("corrigendum2 applies to the wideband mode only")

    @property
    def mode(self) -> str:
        """The canonical mode string for this configuration."""
        if self.band == WIDEBAND:
            return "wb-c2" if self.corrigendum2 else "wb"
        return "nb-raw" if self.output == OUTPUT_RAW else "nb-lqo"

    @classmethod
    def from_mode(cls, mode: str, rate: int) -> "PesqConfig":
        """Build a config from one of the mode strings in :data:`MODES`."""
        if mode == "nb-raw":
            return cls(rate=rate, band=NARROWBAND, output=OUTPUT_RAW)
        if mode == "nb-lqo":
            return cls(rate=rate, band=NARROWBAND, output=OUTPUT_MOS_LQO)
        if mode == "wb":
            return cls(rate=rate, band=WIDEBAND, output=OUTPUT_MOS_LQO)
        if mode == "wb-c2":
            return cls(rate=rate, band=WIDEBAND, output=OUTPUT_MOS_LQO, corrigendum2=True)
        raise ValueError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")


def mode_provenance(mode: str) -> str:
    """Human-readable description of which standard a mode implements."""
    return {
        "nb-raw": "ITU-T P.862 raw narrowband score",
        "nb-lqo": "ITU-T P.862.1 narrowband MOS-LQO",
        "wb": "ITU-T P.862.2 wideband MOS-LQO (without Corrigendum 2)",
        "wb-c2": "ITU-T P.862.2 wideband MOS-LQO + P.862 Corrigendum 2",
    }[mode]
