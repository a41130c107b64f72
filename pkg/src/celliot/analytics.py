"""Closed-form per-UE and per-cell transmission delay and cell capacity.

All ceilings and floors are evaluated in exact integer arithmetic after
converting durations to integer milliseconds (1 ms = 1 subframe), so the
staircase behaviour has no float boundary artifacts.  Results are
returned in seconds.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .types import LinkParams, ValidationError


class Direction(Enum):
    UL = "UL"
    DL = "DL"


@dataclass(frozen=True)
class CellConfig:
    n_rb_total: int
    rbu: int
    n_ue: int
    reporting_period: float
    direction: Direction
    data_len_bits: int

    def __post_init__(self):
        if not self.n_rb_total >= self.rbu >= 1:
            raise ValidationError(
                f"need n_rb_total >= rbu >= 1, got {self.n_rb_total}, {self.rbu}")
        if self.n_ue < 0:
            raise ValidationError("n_ue must be >= 0")
        if self.reporting_period <= 0:
            raise ValidationError("reporting_period must be positive")


def _ms(seconds: float) -> int:
    return round(seconds * 1000.0)


def tl_downlink_ms(lp: LinkParams) -> int:
    """Per-transport-block DL latency, integer ms.

    Control (with repetitions), cross-subframe gap, DL data (with
    repetitions), DL->UL retune, then the UL ack.  The ack repetition
    count is tied to the UL data repetition count.
    """
    return (lp.rldc * _ms(lp.t_pdcch) + _ms(lp.t_d)
            + lp.rlds * _ms(lp.t_pdsch) + _ms(lp.t_dus)
            + lp.rlus * _ms(lp.t_ulack))


def tl_uplink_ms(lp: LinkParams) -> int:
    """Per-transport-block UL latency, integer ms."""
    return (lp.rldc * _ms(lp.t_pdcch) + _ms(lp.t_dus)
            + lp.rlus * _ms(lp.t_pusch) + _ms(lp.t_uds)
            + lp.rldc * _ms(lp.t_dlack))


def tl_downlink(lp: LinkParams) -> float:
    return tl_downlink_ms(lp) / 1000.0


def tl_uplink(lp: LinkParams) -> float:
    return tl_uplink_ms(lp) / 1000.0


def n_blocks(data_len_bits: int, lp: LinkParams) -> int:
    """Transport blocks needed for a payload."""
    if data_len_bits <= 0:
        raise ValidationError("data_len_bits must be positive")
    return -(-data_len_bits // lp.tbs_bits)


def delay_ue_ms(direction: Direction, data_len_bits: int,
                lp: LinkParams) -> int:
    tl = tl_uplink_ms(lp) if direction is Direction.UL else tl_downlink_ms(lp)
    return tl * n_blocks(data_len_bits, lp)


def delay_ue(direction: Direction, data_len_bits: int,
             lp: LinkParams) -> float:
    """Per-UE data transmission delay: per-block latency times block count."""
    return delay_ue_ms(direction, data_len_bits, lp) / 1000.0


def concurrent_users(cfg: CellConfig) -> int:
    """Users in one group that can transmit at the same time."""
    return cfg.n_rb_total // cfg.rbu


def total_cell_delay_ms(cfg: CellConfig, lp: LinkParams) -> int:
    per_ue = delay_ue_ms(cfg.direction, cfg.data_len_bits, lp)
    groups = -(-cfg.n_ue // concurrent_users(cfg))
    return per_ue * groups


def total_cell_delay(cfg: CellConfig, lp: LinkParams) -> float:
    """Total transmission delay of all UEs served group by group."""
    return total_cell_delay_ms(cfg, lp) / 1000.0


def max_ue(cfg: CellConfig, lp: LinkParams) -> int:
    """Maximum UEs a cell can serve within one reporting period."""
    per_ue = delay_ue_ms(cfg.direction, cfg.data_len_bits, lp)
    period_ms = _ms(cfg.reporting_period)
    return (period_ms // per_ue) * concurrent_users(cfg)


def workload_airtime(delays_s: list[float], rbus: list[int],
                     n_rb_total: int) -> float:
    """Packing-optimal lower bound on total airtime for a mixed population.

    RB-seconds of work divided by the RB pool; reduces to the per-cell
    group formula (up to group rounding) when all UEs share one link
    configuration.  Used as the analytical column next to simulated
    airtime.
    """
    if len(delays_s) != len(rbus):
        raise ValidationError("delays and rbus must be the same length")
    work = sum(d * r for d, r in zip(delays_s, rbus))
    bound = work / n_rb_total
    return max(bound, max(delays_s, default=0.0))
