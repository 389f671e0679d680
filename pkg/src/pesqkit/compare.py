"""Score-vector comparison statistics and batch scoring over manifests.

The statistics reproduce the usual cross-version reporting set: Pearson
correlation, RMSE, mean difference and maximum absolute difference of b
against a.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import PesqConfig
from .multichannel import score_multichannel
from .signal_io import read_wav


@dataclass(frozen=True)
class ComparisonStats:
    """Summary statistics of two paired score vectors (differences are b - a)."""

    n: int
    pearson_rho: float | None   # None when either vector has zero variance
    rmse: float
    mean_diff: float
    max_abs_diff: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "pearson_rho": self.pearson_rho if self.pearson_rho is not None else "undefined",
            "rmse": self.rmse,
            "mean_diff": self.mean_diff,
            "max_abs_diff": self.max_abs_diff,
        }


def compare(a, b) -> ComparisonStats:
    """Pairwise statistics of score vectors ``a`` and ``b``.

    Pearson rho needs n >= 2 and nonzero variance on both sides; a constant
    vector yields rho None ("undefined") while the other stats still compute.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"score vectors must be 1-D and equally long, got {a.shape} vs {b.shape}")
    if len(a) < 2:
        raise ValueError("need at least 2 paired scores")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("score vectors must be finite")

    diff = b - a
    ca = a - a.mean()
    cb = b - b.mean()
    denom = math.sqrt(float(ca @ ca)) * math.sqrt(float(cb @ cb))
    rho = float(ca @ cb) / denom if denom > 0.0 else None

    return ComparisonStats(
        n=len(a),
        pearson_rho=rho,
        rmse=float(np.sqrt(np.mean(diff**2))),
        mean_diff=float(np.mean(diff)),
        max_abs_diff=float(np.max(np.abs(diff))),
    )


def scatter_data(a, b, labels=None) -> list[tuple[str, float, float, float]]:
    """Rows of (label, a_i, b_i, diff_i); labels default to row numbers."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("scatter inputs must have equal lengths")
    if labels is None or len(labels) == 0:
        labels = [str(i) for i in range(len(a))]
    if len(labels) != len(a):
        raise ValueError("labels must match the score vectors in length")
    return [(str(lab), float(x), float(y), float(y - x))
            for lab, x, y in zip(labels, a, b)]


def scatter_csv(a, b, labels=None) -> str:
    lines = ["label,a,b,diff"]
    for label, x, y, d in scatter_data(a, b, labels):
        lines.append(f"{label},{x!r},{y!r},{d!r}")
    return "\n".join(lines) + "\n"


@dataclass
class BatchItem:
    ref: str
    deg: str
    score: float | None = None
    error: str | None = None


@dataclass
class BatchResult:
    items: list[BatchItem] = field(default_factory=list)

    @property
    def scores(self) -> list[float]:
        return [item.score for item in self.items if item.score is not None]

    @property
    def failures(self) -> list[BatchItem]:
        return [item for item in self.items if item.score is None]


def read_manifest(path) -> list[tuple[str, str]]:
    """Parse a ``ref,deg`` manifest CSV (header required)."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"ref", "deg"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: manifest needs a header with 'ref' and 'deg' columns")
        pairs = []
        for row in reader:
            if row["ref"] is None or row["deg"] is None:
                raise ValueError(f"{path}: malformed manifest row {row!r}")
            pairs.append((row["ref"].strip(), row["deg"].strip()))
    if not pairs:
        raise ValueError(f"{path}: manifest contains no pairs")
    return pairs


def batch_score(pairs, cfg: PesqConfig, strategy: str = "mono-dmx",
                base_dir=None) -> BatchResult:
    """Score every manifest pair in order; failures are recorded, not fatal."""
    result = BatchResult()
    base = Path(base_dir) if base_dir is not None else None
    for ref_path, deg_path in pairs:
        item = BatchItem(ref=ref_path, deg=deg_path)
        try:
            rp = base / ref_path if base is not None else Path(ref_path)
            dp = base / deg_path if base is not None else Path(deg_path)
            scored = score_multichannel(read_wav(rp), read_wav(dp), cfg, strategy)
            item.score = scored.score
        except (OSError, ValueError) as exc:
            item.error = str(exc)
        result.items.append(item)
    return result
