"""Shared domain types for the eMTC / NB-IoT performance models.

All durations at the API boundary are seconds (float).  The simulator
converts to integer milliseconds internally (1 ms = 1 subframe).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class CelliotError(Exception):
    """Base class for all package errors."""


class ValidationError(CelliotError):
    """An input object violates one of its invariants."""


class ConfigurationError(CelliotError):
    """A lookup table or scenario file is missing or malformed."""


class OutOfCoverageError(ConfigurationError):
    """Requested MCL exceeds the configured coverage table span."""


class Technology(Enum):
    EMTC = "EMTC"
    NBIOT = "NBIOT"

    @property
    def max_rbu(self) -> int:
        # eMTC system bandwidth is 6 RBs; an NB-IoT carrier is 1 RB per UE.
        return 6 if self is Technology.EMTC else 1

    @property
    def max_modulation(self) -> str:
        return "16QAM" if self is Technology.EMTC else "QPSK"


@dataclass(frozen=True)
class PowerProfile:
    """Four-state power draws in watts (ublox SARA-N2 style numbers)."""

    p_tx: float
    p_rx: float
    p_idle: float
    p_sleep: float

    def __post_init__(self):
        if not (self.p_tx > self.p_rx > self.p_idle > self.p_sleep > 0):
            raise ValidationError(
                "power profile must satisfy p_tx > p_rx > p_idle > p_sleep > 0, "
                f"got {self}"
            )

    def scaled_radio(self, factor: float) -> "PowerProfile":
        """Scale Tx/Rx draw (idle and sleep unchanged)."""
        return PowerProfile(self.p_tx * factor, self.p_rx * factor,
                            self.p_idle, self.p_sleep)


@dataclass(frozen=True)
class ClockModel:
    """Sleep clock accuracy: fractional drift and time needed to resync."""

    fractional_error_m: float
    resync_time_t_synch: float

    def __post_init__(self):
        if not 0.0 <= self.fractional_error_m < 1.0:
            raise ValidationError(f"fractional error must be in [0, 1), got "
                                  f"{self.fractional_error_m}")
        if self.resync_time_t_synch <= 0.0:
            raise ValidationError("resync time must be positive")


class DutyCycleMode(Enum):
    EDRX = "EDRX"
    PSM = "PSM"


@dataclass(frozen=True)
class DutyCycleConfig:
    """eDRX or PSM cycle: period plus the paging window at its start."""

    mode: DutyCycleMode
    period: float
    paging_window_t_pdcch: float = 0.0

    def __post_init__(self):
        if self.mode is DutyCycleMode.PSM and self.paging_window_t_pdcch != 0.0:
            raise ValidationError("PSM forces paging_window_t_pdcch = 0")
        if not self.period > self.paging_window_t_pdcch >= 0.0:
            raise ValidationError(
                f"need period > paging window >= 0, got period={self.period}, "
                f"paging={self.paging_window_t_pdcch}"
            )


@dataclass(frozen=True)
class LinkParams:
    """Per-transport-block timing and repetition configuration.

    A repetition count of 1 means "zero extra repetitions".  Channel
    durations are seconds per repetition; t_d / t_dus / t_uds are the
    cross-subframe and RF retuning gaps.
    """

    mcs: int
    rbu: int
    tbs_bits: int
    rldc: int
    rlds: int
    rlus: int
    t_pdcch: float
    t_pdsch: float
    t_pusch: float
    t_d: float
    t_dus: float
    t_uds: float
    t_ulack: float
    t_dlack: float

    def __post_init__(self):
        if min(self.rldc, self.rlds, self.rlus) < 1:
            raise ValidationError("all repetition counts must be >= 1")
        if self.tbs_bits <= 0:
            raise ValidationError("tbs_bits must be positive")
        durations = (self.t_pdcch, self.t_pdsch, self.t_pusch, self.t_d,
                     self.t_dus, self.t_uds, self.t_ulack, self.t_dlack)
        if any(d < 0 for d in durations):
            raise ValidationError("channel durations must be >= 0")


class CoverageName(Enum):
    GOOD = "GOOD"
    MEDIUM = "MEDIUM"
    POOR = "POOR"


@dataclass(frozen=True)
class CoverageClass:
    """One MCL tier: the MCS and repetition counts the scheduler assigns."""

    name: CoverageName
    mcl_db: float
    mcs: int
    rldc: int
    rlds: int
    rlus: int


@dataclass(frozen=True)
class ChannelTimings:
    """Per-technology channel and gap durations, seconds."""

    t_pdcch: float
    t_pdsch: float
    t_pusch: float
    t_d: float
    t_dus: float
    t_uds: float
    t_ulack: float
    t_dlack: float


# NB-IoT needs longer decode gaps and control transmissions than eMTC;
# these gaps are the main reason its per-block latency is higher.
DEFAULT_TIMINGS = {
    Technology.EMTC: ChannelTimings(
        t_pdcch=0.001, t_pdsch=0.001, t_pusch=0.001, t_d=0.001,
        t_dus=0.003, t_uds=0.003, t_ulack=0.001, t_dlack=0.001),
    Technology.NBIOT: ChannelTimings(
        t_pdcch=0.008, t_pdsch=0.008, t_pusch=0.001, t_d=0.010,
        t_dus=0.030, t_uds=0.030, t_ulack=0.002, t_dlack=0.004),
}

DEFAULT_RBU = {Technology.EMTC: 6, Technology.NBIOT: 1}
