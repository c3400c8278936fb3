"""Run configuration.

One YAML file, every key optional::

    target_year: 2022
    gas_boe_factor: 5800        # scf per boe
    trend_window: 5             # years used by the gas trend fit
    ddof: 1                     # 1 = sample standard deviation
    quantile_method: linear     # linear | weibull | hazen
    histogram_bin_width: 0.2
    histogram_origin: 0.0
    outliers:
      policy: [iqr]             # any of manual, iqr; [] disables exclusion
      manual: []                # company names
      iqr_k: 1.5
      scope: category           # category | all
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigurationError

QUANTILE_METHODS = ("linear", "weibull", "hazen")
OUTLIER_POLICIES = ("manual", "iqr")
OUTLIER_SCOPES = ("category", "all")

_TOP_KEYS = {
    "target_year", "gas_boe_factor", "trend_window", "ddof", "quantile_method",
    "histogram_bin_width", "histogram_origin", "outliers",
}
_OUTLIER_KEYS = {"policy", "manual", "iqr_k", "scope"}


@dataclass(frozen=True)
class Config:
    target_year: int = 2022
    gas_boe_factor: float = 5800.0
    trend_window: int = 5
    ddof: int = 1
    quantile_method: str = "linear"
    histogram_bin_width: float = 0.2
    histogram_origin: float = 0.0
    outlier_policy: tuple[str, ...] = ("iqr",)
    manual_outliers: tuple[str, ...] = field(default=())
    iqr_k: float = 1.5
    outlier_scope: str = "category"

    def __post_init__(self):
        self.validate()

    def validate(self, path: str | None = None) -> None:
        def bad(msg):
            raise ConfigurationError(msg, path)

        if not isinstance(self.target_year, int) or isinstance(self.target_year, bool):
            bad(f"target_year must be an integer, got {self.target_year!r}")
        if not _positive(self.gas_boe_factor):
            bad(f"gas_boe_factor must be a positive number, got {self.gas_boe_factor!r}")
        if not isinstance(self.trend_window, int) or isinstance(self.trend_window, bool) \
                or self.trend_window < 1:
            bad(f"trend_window must be a positive integer, got {self.trend_window!r}")
        if self.ddof not in (0, 1) or isinstance(self.ddof, bool):
            bad(f"ddof must be 0 or 1, got {self.ddof!r}")
        if self.quantile_method not in QUANTILE_METHODS:
            bad(f"quantile_method must be one of {', '.join(QUANTILE_METHODS)}")
        if not _positive(self.histogram_bin_width):
            bad(f"histogram_bin_width must be positive, got {self.histogram_bin_width!r}")
        if not isinstance(self.histogram_origin, (int, float)) or not math.isfinite(self.histogram_origin):
            bad(f"histogram_origin must be a finite number, got {self.histogram_origin!r}")
        for p in self.outlier_policy:
            if p not in OUTLIER_POLICIES:
                bad(f"unknown outlier policy {p!r}; expected any of {', '.join(OUTLIER_POLICIES)}")
        if not all(isinstance(n, str) for n in self.manual_outliers):
            bad("outliers.manual must be a list of company names")
        if not _positive(self.iqr_k):
            bad(f"outliers.iqr_k must be positive, got {self.iqr_k!r}")
        if self.outlier_scope not in OUTLIER_SCOPES:
            bad(f"outliers.scope must be one of {', '.join(OUTLIER_SCOPES)}")

    def replace(self, **changes) -> Config:
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "target_year": self.target_year,
            "gas_boe_factor": float(self.gas_boe_factor),
            "trend_window": self.trend_window,
            "ddof": self.ddof,
            "quantile_method": self.quantile_method,
            "histogram_bin_width": float(self.histogram_bin_width),
            "histogram_origin": float(self.histogram_origin),
            "outliers": {
                "policy": list(self.outlier_policy),
                "manual": list(self.manual_outliers),
                "iqr_k": float(self.iqr_k),
                "scope": self.outlier_scope,
            },
        }

    @classmethod
    def from_dict(cls, data: dict | None, path: str | None = None) -> Config:
        data = dict(data or {})
        unknown = set(data) - _TOP_KEYS
        if unknown:
            raise ConfigurationError(f"unknown configuration keys: {', '.join(sorted(unknown))}", path)
        outliers = data.pop("outliers", None) or {}
        if not isinstance(outliers, dict):
            raise ConfigurationError("'outliers' must be a mapping", path)
        unknown = set(outliers) - _OUTLIER_KEYS
        if unknown:
            raise ConfigurationError(
                f"unknown keys under 'outliers': {', '.join(sorted(unknown))}", path
            )
        kwargs = dict(data)
        if "policy" in outliers:
            kwargs["outlier_policy"] = tuple(_as_list(outliers["policy"], "outliers.policy", path))
        if "manual" in outliers:
            kwargs["manual_outliers"] = tuple(_as_list(outliers["manual"], "outliers.manual", path))
        if "iqr_k" in outliers:
            kwargs["iqr_k"] = outliers["iqr_k"]
        if "scope" in outliers:
            kwargs["outlier_scope"] = outliers["scope"]
        if isinstance(kwargs.get("gas_boe_factor"), int):
            kwargs["gas_boe_factor"] = float(kwargs["gas_boe_factor"])
        try:
            return cls(**kwargs)
        except ConfigurationError as exc:
            raise ConfigurationError(str(exc), path) from None


def load_config(path: str | Path | None) -> Config:
    if path is None:
        return Config()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigurationError("configuration file not found", str(path)) from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"invalid YAML: {exc}", str(path)) from None
    if data is not None and not isinstance(data, dict):
        raise ConfigurationError("top level must be a mapping", str(path))
    return Config.from_dict(data, str(path))


def parse_outlier_flag(text: str) -> tuple[str, ...]:
    """Parse the ``--outliers`` flag: comma-separated policies, or ``none``."""
    text = text.strip()
    if text.lower() in ("", "none"):
        return ()
    policies = tuple(p.strip() for p in text.split(","))
    for p in policies:
        if p not in OUTLIER_POLICIES:
            raise ConfigurationError(f"unknown outlier policy {p!r}")
    return policies


def _positive(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) and x > 0


def _as_list(value, key, path) -> list:
    if value is None:
        return []
    if isinstance(value, str):
        return [value]
    if not isinstance(value, list):
        raise ConfigurationError(f"{key} must be a list", path)
    return value
