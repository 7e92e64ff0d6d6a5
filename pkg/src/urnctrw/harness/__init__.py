"""Experiment configs, acceptance studies and result tables."""

from pathlib import Path

from .config import ExperimentConfig, Study, load_config
from .results import ResultTable, Row, write_run
from .stats import chi_square_test, ks_critical, ks_statistic, pool_bins
from .studies import STUDIES, run_study

__all__ = [
    "ExperimentConfig",
    "Study",
    "load_config",
    "ResultTable",
    "Row",
    "write_run",
    "chi_square_test",
    "ks_critical",
    "ks_statistic",
    "pool_bins",
    "STUDIES",
    "run_study",
    "default_config_path",
    "default_config",
]

_CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def default_config_path(study) -> Path:
    """Bundled TOML config for ``study``."""
    return _CONFIG_DIR / f"{Study(study).value}.toml"


def default_config(study) -> ExperimentConfig:
    return load_config(default_config_path(study))
