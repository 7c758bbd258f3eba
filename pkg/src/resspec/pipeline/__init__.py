"""File I/O, preprocessing, two-group connectivity screening and the CLI."""

from .connectivity import COLORS, ConnectivityGrid, PairResult, color_for, connectivity
from .emit import SCHEMA_VERSION, emit, load_json, render
from .io import Dataset, difference, load_csv

__all__ = [
    "COLORS", "ConnectivityGrid", "PairResult", "color_for", "connectivity",
    "SCHEMA_VERSION", "emit", "load_json", "render",
    "Dataset", "difference", "load_csv",
]
