"""The P.862 measurement pipeline."""

from . import constants
from .pipeline import compute_pesq

__all__ = ["constants", "compute_pesq"]
