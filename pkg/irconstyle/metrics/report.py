"""
Averaged metric reports
"""

import math
from typing import Iterable, Tuple, Union

from pydantic import BaseModel, Field, field_serializer


class MetricReport(BaseModel):
    """Per-image PSNR/SSIM averaged arithmetically over `count` images"""

    name: str = "eval"
    psnr_db: float
    ssim: float = Field(ge=-1.0, le=1.0)
    count: int = Field(ge=0)

    @field_serializer("psnr_db")
    def _inf_sentinel(self, value: float) -> Union[float, str]:
        # JSON has no infinity; identical images report the string "inf"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value

    @classmethod
    def from_scores(cls, name: str, scores: Iterable[Tuple[float, float]]) -> "MetricReport":
        """Average (psnr, ssim) pairs; any +inf PSNR makes the mean +inf"""
        scores = list(scores)
        if not scores:
            return cls(name=name, psnr_db=math.nan, ssim=0.0, count=0)
        psnr_mean = sum(p for p, _ in scores) / len(scores)
        ssim_mean = sum(s for _, s in scores) / len(scores)
        return cls(name=name, psnr_db=psnr_mean, ssim=ssim_mean, count=len(scores))
