"""Tolerances and knobs shared by every stage of the preprocessor."""

import logging
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict, Tuple

from .errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Config:
    """
    Numerical settings for one preprocessing run.

    All tolerances are relative: coefficient tolerances are measured against
    the largest coefficient magnitude, rank tolerances against the largest
    singular value, residual tolerances against the sum of absolute term
    values at the evaluation point.
    """

    drop_tolerance: float = 1e-12
    rank_tolerance: float = 1e-8
    root_tolerance: float = 1e-6
    series_tolerance: float = 1e-6
    multiplicity_tolerance: float = 1e-6
    cluster_radius: float = 1e-6
    residual_slope_margin: float = 0.1
    residual_samples: Tuple[float, ...] = field(default=(1e-2, 1e-3, 1e-4))
    max_iterations: int = 200
    convergence: float = 1e-13
    probe_samples: int = 5
    probe_tolerance: float = 1e-9
    max_workers: int = 4
    seed: int = 0

    _POSITIVE = (
        "drop_tolerance",
        "rank_tolerance",
        "root_tolerance",
        "series_tolerance",
        "multiplicity_tolerance",
        "cluster_radius",
        "residual_slope_margin",
        "convergence",
        "probe_tolerance",
    )

    def __post_init__(self):
        for name in self._POSITIVE:
            value = getattr(self, name)
            if not value > 0:
                raise ConfigError(f"{name} must be positive, got {value!r}")
        samples = tuple(float(t) for t in self.residual_samples)
        object.__setattr__(self, "residual_samples", samples)
        if any(not 0.0 < t <= 0.1 for t in samples):
            raise ConfigError("residual_samples must lie in (0, 0.1]")
        if len(set(samples)) < 2:
            raise ConfigError("residual_samples needs at least two distinct values")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be at least 1")
        if self.probe_samples < 1:
            raise ConfigError("probe_samples must be at least 1")
        if self.max_workers < 1:
            raise ConfigError("max_workers must be at least 1")

    def replace(self, **overrides: Any) -> "Config":
        return replace(self, **overrides)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["residual_samples"] = list(self.residual_samples)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Config":
        """Build a Config from a mapping, ignoring unknown keys."""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        kwargs = {k: v for k, v in data.items() if k in known}
        if "residual_samples" in kwargs:
            kwargs["residual_samples"] = tuple(kwargs["residual_samples"])
        config = cls(**kwargs)
        if unknown:
            logger.debug("ignoring unknown settings: %s", unknown)
        return config


# Looser settings for inputs carrying relative coefficient noise near 1e-8.
NOISY = Config(rank_tolerance=1e-6, root_tolerance=1e-5, series_tolerance=1e-5)
