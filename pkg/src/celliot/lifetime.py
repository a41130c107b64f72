"""Energy per reporting cycle and battery lifetime.

One reporting cycle walks the device through downlink synch, system
information (PBCH), random access, grant wait, the uplink report (built
from the link configuration block by block), acknowledgements, connected
DRX, and finally standby priced by the sleep-schedule planner (one PSM
stretch, or repeated eDRX cycles with their paging windows).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import power as power_mod
from .analytics import Direction, n_blocks
from .types import (ClockModel, CoverageName, DutyCycleConfig, DutyCycleMode,
                    LinkParams, PowerProfile, Technology, ValidationError)

SECONDS_PER_DAY = 86400.0
DAYS_PER_YEAR = 365.25

#: ublox SARA-N2 style draw (W); the eMTC profile scales Tx/Rx by 1.25.
SARA_N2_PROFILE = PowerProfile(p_tx=0.792, p_rx=0.072, p_idle=0.022,
                               p_sleep=18e-6)
EMTC_RADIO_FACTOR = 1.25

DEFAULT_BATTERY_J = 18000.0
DEFAULT_CLOCK = ClockModel(fractional_error_m=0.001, resync_time_t_synch=0.2)


@dataclass(frozen=True)
class EventDurations:
    """Connection establishment / teardown durations, seconds."""

    t_synch_dl: float
    t_pbch: float
    t_rach: float
    t_grant_wait: float
    t_ack_rx: float
    t_connected_drx: float

    def __post_init__(self):
        if any(d < 0 for d in (self.t_synch_dl, self.t_pbch, self.t_rach,
                               self.t_grant_wait, self.t_ack_rx,
                               self.t_connected_drx)):
            raise ValidationError("event durations must be >= 0")


# Rough per-class defaults: connection setup stretches out with coverage
# because every broadcast and random-access step is repeated.
DEFAULT_EVENTS = {
    CoverageName.GOOD: EventDurations(0.010, 0.005, 0.010, 0.005, 0.002, 0.003),
    CoverageName.MEDIUM: EventDurations(0.300, 0.100, 0.400, 0.100, 0.100, 0.100),
    CoverageName.POOR: EventDurations(1.500, 0.500, 2.000, 0.500, 0.500, 0.500),
}


@dataclass(frozen=True)
class ReportingCycleSpec:
    reporting_interval_t_tot: float
    data_len_bits: int
    events: EventDurations
    duty: DutyCycleConfig
    link: LinkParams
    technology: Technology

    def __post_init__(self):
        if self.reporting_interval_t_tot <= 0:
            raise ValidationError("reporting interval must be positive")
        if self.data_len_bits <= 0:
            raise ValidationError("data_len_bits must be positive")


@dataclass(frozen=True)
class StateRecord:
    """One audit row of the per-cycle energy timeline."""

    state: str
    start: float
    duration: float
    power: float

    @property
    def joules(self) -> float:
        return self.power * self.duration


@dataclass(frozen=True)
class LifetimeResult:
    energy_per_cycle: float
    cycles_per_day: float
    lifetime_years: float


def report_airtime(link: LinkParams, data_len_bits: int) -> tuple[float, float, float]:
    """(tx, rx, idle) seconds spent delivering one UL report."""
    blocks = n_blocks(data_len_bits, link)
    tx = blocks * link.rlus * link.t_pusch
    rx = blocks * (link.rldc * link.t_pdcch + link.rldc * link.t_dlack)
    idle = blocks * (link.t_dus + link.t_uds)
    return tx, rx, idle


def _standby_records(standby: float, start: float, duty: DutyCycleConfig,
                     profile: PowerProfile, clock: ClockModel,
                     optimize: bool) -> list[StateRecord]:
    """Price the standby stretch with the sleep-schedule planner."""
    plan = power_mod.plan_sleep_schedule if optimize \
        else power_mod.unoptimized_schedule
    records: list[StateRecord] = []

    def priced_period(period: float, paging: float, t0: float) -> float:
        if clock.fractional_error_m == 0.0:
            # perfect clock: no resync wakeups, sleep straight through
            records.append(StateRecord("standby_sleep_0", t0, period - paging,
                                       profile.p_sleep))
            if paging > 0:
                records.append(StateRecord("paging_window", t0 + period - paging,
                                           paging, profile.p_rx))
            return t0 + period
        duty_p = DutyCycleConfig(
            mode=DutyCycleMode.EDRX if paging > 0 else DutyCycleMode.PSM,
            period=period, paging_window_t_pdcch=paging)
        schedule = plan(duty_p, profile, clock)
        t = t0
        for i, sleep in enumerate(schedule.sleep_durations):
            records.append(StateRecord("standby_synch", t,
                                       clock.resync_time_t_synch, profile.p_rx))
            t += clock.resync_time_t_synch
            records.append(StateRecord(f"standby_sleep_{i}", t, sleep,
                                       profile.p_sleep))
            t += sleep
        records.append(StateRecord("standby_active", t,
                                   schedule.active_time_t_act, profile.p_idle))
        t += schedule.active_time_t_act
        if paging > 0:
            records.append(StateRecord("paging_window", t, paging,
                                       profile.p_rx))
            t += paging
        return t

    if duty.mode is DutyCycleMode.PSM:
        if 0 < standby <= clock.resync_time_t_synch:
            # too short to fit a resync cycle, sleep it out
            records.append(StateRecord("standby_tail", start, standby,
                                       profile.p_sleep))
        else:
            priced_period(standby, 0.0, start)
        return records

    n_cycles = int(standby // duty.period)
    t = start
    for _ in range(n_cycles):
        t = priced_period(duty.period, duty.paging_window_t_pdcch, t)
    remainder = standby - n_cycles * duty.period
    if remainder > 0:
        # partial trailing cycle: no paging window fits, just sleep it out
        records.append(StateRecord("standby_tail", t, remainder,
                                   profile.p_sleep))
    return records


def reporting_cycle_breakdown(spec: ReportingCycleSpec, profile: PowerProfile,
                              clock: ClockModel,
                              optimize: bool = True) -> list[StateRecord]:
    """Per-state timeline (state, start, duration, power) of one cycle."""
    ev = spec.events
    tx, rx, idle = report_airtime(spec.link, spec.data_len_bits)
    segments = [
        ("synch_dl", ev.t_synch_dl, profile.p_rx),
        ("pbch", ev.t_pbch, profile.p_rx),
        ("random_access", ev.t_rach, profile.p_tx),
        ("grant_wait", ev.t_grant_wait, profile.p_rx),
        ("report_control_rx", rx, profile.p_rx),
        ("report_switch_idle", idle, profile.p_idle),
        ("report_tx", tx, profile.p_tx),
        ("ack_rx", ev.t_ack_rx, profile.p_rx),
        ("connected_drx", ev.t_connected_drx, profile.p_rx),
    ]
    records = []
    t = 0.0
    for state, duration, power in segments:
        if duration > 0:
            records.append(StateRecord(state, t, duration, power))
        t += duration
    standby = spec.reporting_interval_t_tot - t
    if standby < 0:
        raise ValidationError(
            f"active events ({t:.3f} s) exceed the reporting interval "
            f"({spec.reporting_interval_t_tot:.3f} s)")
    if standby > 0:
        records.extend(_standby_records(standby, t, spec.duty, profile,
                                        clock, optimize))
    return records


def reporting_cycle_energy(spec: ReportingCycleSpec, profile: PowerProfile,
                           clock: ClockModel, optimize: bool = True) -> float:
    """Joules consumed over one reporting interval."""
    return sum(r.joules for r in
               reporting_cycle_breakdown(spec, profile, clock, optimize))


def battery_lifetime(capacity_joules: float, energy_per_cycle: float,
                     reporting_interval: float) -> float:
    """Battery lifetime in years; no leakage or temperature derating."""
    if min(capacity_joules, energy_per_cycle, reporting_interval) <= 0:
        raise ValidationError("battery lifetime inputs must be positive")
    days = capacity_joules / energy_per_cycle * (reporting_interval
                                                 / SECONDS_PER_DAY)
    return days / DAYS_PER_YEAR


def lifetime_result(spec: ReportingCycleSpec, profile: PowerProfile,
                    clock: ClockModel, capacity_joules: float = DEFAULT_BATTERY_J,
                    optimize: bool = True) -> LifetimeResult:
    energy = reporting_cycle_energy(spec, profile, clock, optimize)
    years = battery_lifetime(capacity_joules, energy,
                             spec.reporting_interval_t_tot)
    return LifetimeResult(
        energy_per_cycle=energy,
        cycles_per_day=SECONDS_PER_DAY / spec.reporting_interval_t_tot,
        lifetime_years=years)


def technology_profile(technology: Technology,
                       base: PowerProfile = SARA_N2_PROFILE) -> PowerProfile:
    if technology is Technology.EMTC:
        return base.scaled_radio(EMTC_RADIO_FACTOR)
    return base


@dataclass(frozen=True)
class LifetimeComparisonRow:
    technology: Technology
    coverage: CoverageName
    reports_per_day: float
    data_len_bits: int
    energy_per_cycle: float
    lifetime_years: float


def emtc_vs_nbiot_lifetime(
        reports_per_day: list[float], data_len_bits: list[int],
        coverages: list[CoverageName], *,
        link_for, events: dict[CoverageName, EventDurations] | None = None,
        clock: ClockModel = DEFAULT_CLOCK,
        base_profile: PowerProfile = SARA_N2_PROFILE,
        capacity_joules: float = DEFAULT_BATTERY_J,
) -> list[LifetimeComparisonRow]:
    """PSM lifetime sweep over both technologies.

    ``link_for(technology, coverage_name) -> LinkParams`` supplies the
    per-class link configuration (normally tables.make_link_params over
    the bundled coverage map).
    """
    events = events or DEFAULT_EVENTS
    rows = []
    for tech in Technology:
        profile = technology_profile(tech, base_profile)
        for cov in coverages:
            link = link_for(tech, cov)
            for n in reports_per_day:
                for bits in data_len_bits:
                    interval = SECONDS_PER_DAY / n
                    spec = ReportingCycleSpec(
                        reporting_interval_t_tot=interval,
                        data_len_bits=bits, events=events[cov],
                        duty=DutyCycleConfig(DutyCycleMode.PSM,
                                             period=interval),
                        link=link, technology=tech)
                    res = lifetime_result(spec, profile, clock,
                                          capacity_joules)
                    rows.append(LifetimeComparisonRow(
                        technology=tech, coverage=cov, reports_per_day=n,
                        data_len_bits=bits,
                        energy_per_cycle=res.energy_per_cycle,
                        lifetime_years=res.lifetime_years))
    return rows
