"""Link abstraction: per-MCS logistic BLER curves with repetition gain."""

from __future__ import annotations

import math

from ..tables import BlerTable, default_bler_table
from ..types import Technology, ValidationError


def repetition_gain_db(repetitions: int) -> float:
    """Effective SINR gain from coherently combining repetitions."""
    if repetitions < 1:
        raise ValidationError("repetitions must be >= 1")
    return 10.0 * math.log10(repetitions)


def bler(technology: Technology, mcs: int, effective_sinr_db: float,
         repetitions: int, table: BlerTable | None = None) -> float:
    """Block error probability in [0, 1], nonincreasing in SINR."""
    curve = (table or default_bler_table()).curve(technology, mcs)
    sinr = effective_sinr_db + repetition_gain_db(repetitions)
    x = (sinr - curve.sinr50_db) / curve.slope_db
    # logistic in -x; clamp to avoid overflow at extreme SINR
    if x > 60.0:
        return 0.0
    if x < -60.0:
        return 1.0
    return 1.0 / (1.0 + math.exp(x))
