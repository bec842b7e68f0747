"""Carbon emission factors from merit-order dispatch."""

from pathlib import Path

from ._cefsim import (
    DEFAULT_CONFIG as _BUILD_CONFIG,
    CefSeries,
    ConfigError,
    DataError,
    Error,
    MeritOrder,
    ParseError,
    compute_cef,
    parse_grid,
    shift_study,
    spearman,
    validation_errors,
)
from ._cefsim import Workspace as _Workspace
from ._cefsim import ingest as _ingest

_PACKAGED = Path(__file__).with_name("default.toml")
DEFAULT_CONFIG = str(_PACKAGED) if _PACKAGED.exists() else _BUILD_CONFIG


def ingest(data_dir, out_dir=None, config=None):
    """Normalize a raw data directory into ``out_dir/normalized``."""
    return _ingest(data_dir, out_dir if out_dir is not None else data_dir, config or DEFAULT_CONFIG)


def Workspace(data_dir, config=None):
    """Open an ingested data directory."""
    return _Workspace(data_dir, config or DEFAULT_CONFIG)


__all__ = [
    "CefSeries",
    "ConfigError",
    "DataError",
    "DEFAULT_CONFIG",
    "Error",
    "MeritOrder",
    "ParseError",
    "Workspace",
    "compute_cef",
    "ingest",
    "parse_grid",
    "shift_study",
    "spearman",
    "validation_errors",
]
