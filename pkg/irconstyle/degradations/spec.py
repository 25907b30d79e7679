"""
Declarative degradation specifications
"""

from typing import Annotated, Any, List, Literal, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, field_validator

from irconstyle.errors import ConfigError

MAX_SIGMA = 50.0


class GaussianNoiseSpec(BaseModel):
    """Additive white Gaussian noise; sigma in 8-bit units, fixed or [lo, hi]"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["gaussian_noise"] = "gaussian_noise"
    sigma: Union[float, Tuple[float, float]] = 25.0

    @field_validator("sigma")
    @classmethod
    def _in_range(cls, value):
        low, high = (value, value) if isinstance(value, (int, float)) else value
        if not 0.0 <= low <= high <= MAX_SIGMA:
            raise ValueError(f"sigma must lie in [0, {MAX_SIGMA:g}] with lo <= hi, got {value}")
        return value


class GaussianBlurSpec(BaseModel):
    """Normalised Gaussian blur with reflect padding"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["gaussian_blur"] = "gaussian_blur"
    kernel: int = 5
    sigma: float = Field(default=1.0, gt=0.0)

    @field_validator("kernel")
    @classmethod
    def _odd(cls, value: int) -> int:
        if value < 3 or value % 2 == 0:
            raise ValueError(f"blur kernel must be odd and >= 3, got {value}")
        return value


class ComposeSpec(BaseModel):
    """Ordered chain of degradations"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["compose"] = "compose"
    steps: List["DegradationSpec"] = Field(default_factory=list)


DegradationSpec = Annotated[
    Union[GaussianNoiseSpec, GaussianBlurSpec, ComposeSpec],
    Field(discriminator="kind"),
]
ComposeSpec.model_rebuild()

_adapter = TypeAdapter(DegradationSpec)


def error_path(exc: ValidationError, prefix: str = "") -> str:
    """Dotted location of the first validation error"""
    loc = exc.errors()[0]["loc"] if exc.errors() else ()
    parts = [prefix] if prefix else []
    parts.extend(str(p) for p in loc)
    return ".".join(parts)


def parse_degradation(data: Any) -> DegradationSpec:
    """
    Validate a spec given as a model, dict or sigma shorthand

    Args:
        data: Spec model, dict, a number (fixed sigma) or "lo:hi" string

    Returns:
        Validated DegradationSpec
    """
    if isinstance(data, (GaussianNoiseSpec, GaussianBlurSpec, ComposeSpec)):
        return data
    try:
        if isinstance(data, (int, float)):
            return GaussianNoiseSpec(sigma=float(data))
        if isinstance(data, str):
            return GaussianNoiseSpec(sigma=parse_sigma(data))
        return _adapter.validate_python(data)
    except ValidationError as exc:
        raise ConfigError(exc.errors()[0]["msg"], field=error_path(exc, "degradation")) from exc


def parse_sigma(text: str) -> Union[float, Tuple[float, float]]:
    """'25' -> 25.0, '0:50' -> (0.0, 50.0)"""
    try:
        if ":" in text:
            low, high = text.split(":", 1)
            return float(low), float(high)
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"cannot parse sigma {text!r}", field="sigma") from exc
