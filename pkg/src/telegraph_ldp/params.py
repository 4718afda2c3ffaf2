"""Model parameters and regime classification."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import AlphaOutOfRange, NonPositiveParameter, ValidationError

PARAM_KEYS = ("lambda1", "lambda2", "c1", "c2", "alpha")


@dataclass(frozen=True)
class ModelParams:
    """Switch rates ``lambda1`` (while moving right) and ``lambda2`` (while
    moving left), speeds ``c1`` and ``c2``, and ``alpha = P(V(0) = +c1)``.

    Construct through :func:`validate_params` unless the values are known good.
    """

    lambda1: float
    lambda2: float
    c1: float
    c2: float
    alpha: float

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "c1", "c2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise NonPositiveParameter(f"{name} must be finite and > 0, got {value!r}")
        if not (0.0 <= self.alpha <= 1.0):
            raise AlphaOutOfRange(f"alpha must lie in [0, 1], got {self.alpha!r}")

    @property
    def x0(self) -> float:
        """Law-of-large-numbers limit of D(t)/t and S(t)/t."""
        return classify_regime(self).drift

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Regime:
    drift: float
    stable: bool


def validate_params(lambda1, lambda2, c1, c2, alpha) -> ModelParams:
    raw = dict(lambda1=lambda1, lambda2=lambda2, c1=c1, c2=c2, alpha=alpha)
    values = {}
    for key, value in raw.items():
        try:
            values[key] = float(value)
        except (TypeError, ValueError):
            if key == "alpha":
                raise AlphaOutOfRange(f"alpha is not a real number: {value!r}") from None
            raise NonPositiveParameter(f"{key} is not a real number: {value!r}") from None
    return ModelParams(**values)


def classify_regime(params: ModelParams) -> Regime:
    numerator = params.lambda2 * params.c1 - params.lambda1 * params.c2
    return Regime(drift=numerator / (params.lambda1 + params.lambda2), stable=numerator < 0)


def load_params(path) -> ModelParams:
    """Read a JSON parameter file; all five keys are required."""
    with open(Path(path)) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: expected a JSON object")
    missing = [key for key in PARAM_KEYS if key not in raw]
    if missing:
        raise ValidationError(f"{path}: missing keys {', '.join(missing)}")
    return validate_params(*(raw[key] for key in PARAM_KEYS))


def dump_params(params: ModelParams, path) -> Path:
    path = Path(path)
    with open(path, "w") as fh:
        json.dump(params.to_dict(), fh, indent=2)
        fh.write("\n")
    return path
