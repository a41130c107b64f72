"""Sleep scheduling under clock drift.

A device sleeping on a cheap oscillator drifts by a fraction ``m`` of the
time slept and must wake early to resynchronize.  Splitting one long sleep
into several wake-synch-sleep cycles trades extra synch listening against
less idle time before the paging window.  The planner below greedily adds
cycles while each new cycle still lowers total energy:

    cycle K carves (t_synch + sleep_K + residual) out of the residual
    active time left by cycle K-1, with sleep_K = R_K / (1+m) and the new
    residual m * R_K / (1+m), where R_K is the budget minus the synch.

Because each added cycle costs a fixed synch listen and saves idle time
proportional to the (shrinking) new sleep, the per-cycle energy increment
is increasing in K, so the first non-improving cycle is the global
minimum over K.
"""

from __future__ import annotations

from dataclasses import dataclass

from .types import ClockModel, DutyCycleConfig, PowerProfile, ValidationError

#: Constraint residual tolerance, seconds / joules.  All arithmetic here is
#: closed-form, so only accumulated float error is tolerated.
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class SleepSchedule:
    """K wake-synch-sleep cycles followed by a final active (idle) stretch."""

    period: float
    paging_window: float
    t_synch: float
    fractional_error_m: float
    k: int
    sleep_durations: tuple[float, ...]
    active_time_t_act: float
    total_energy: float

    def validate(self) -> None:
        if self.k != len(self.sleep_durations):
            raise ValidationError(f"k={self.k} but "
                                  f"{len(self.sleep_durations)} sleeps")
        budget = (self.period - self.paging_window - self.k * self.t_synch
                  - sum(self.sleep_durations))
        if abs(budget - self.active_time_t_act) > RESIDUAL_TOL:
            raise ValidationError(
                f"budget identity violated by {budget - self.active_time_t_act:.3e} s")
        if self.k >= 1:
            coupled = self.fractional_error_m * self.sleep_durations[-1]
            if abs(self.active_time_t_act - coupled) > RESIDUAL_TOL:
                raise ValidationError(
                    f"drift coupling violated: t_act={self.active_time_t_act!r} "
                    f"!= m*sleep[-1]={coupled!r}")
        if any(s <= 0 for s in self.sleep_durations):
            raise ValidationError("sleep durations must be strictly positive")
        if any(a <= b for a, b in zip(self.sleep_durations,
                                      self.sleep_durations[1:])):
            raise ValidationError("sleep durations must be strictly decreasing")


def schedule_energy(schedule: SleepSchedule, profile: PowerProfile,
                    clock: ClockModel) -> float:
    """Energy of one duty-cycle period, excluding the paging window.

    K synch listens at p_rx, the sleeps at p_sleep, and the final active
    time at p_idle.
    """
    schedule.validate()
    return (schedule.k * profile.p_rx * clock.resync_time_t_synch
            + profile.p_sleep * sum(schedule.sleep_durations)
            + profile.p_idle * schedule.active_time_t_act)


def _check_room(duty: DutyCycleConfig, clock: ClockModel) -> None:
    if duty.period - duty.paging_window_t_pdcch <= clock.resync_time_t_synch:
        raise ValidationError(
            f"period too short: {duty.period} s leaves no room for a "
            f"synch of {clock.resync_time_t_synch} s after the "
            f"{duty.paging_window_t_pdcch} s paging window")


def _schedule_for_k(duty: DutyCycleConfig, clock: ClockModel,
                    k: int) -> SleepSchedule | None:
    """Closed-form schedule with exactly k cycles, or None if infeasible."""
    m = clock.fractional_error_m
    t_synch = clock.resync_time_t_synch
    sleeps = []
    budget = duty.period - duty.paging_window_t_pdcch
    t_act = budget  # residual to carve the first cycle from, plus synch
    for _ in range(k):
        r = t_act - t_synch
        if r <= 0:
            return None
        sleep = r / (1.0 + m)
        t_act = m * r / (1.0 + m)
        sleeps.append(sleep)
    return SleepSchedule(
        period=duty.period, paging_window=duty.paging_window_t_pdcch,
        t_synch=t_synch, fractional_error_m=m, k=k,
        sleep_durations=tuple(sleeps), active_time_t_act=t_act,
        total_energy=0.0)


def _with_energy(schedule: SleepSchedule, profile: PowerProfile,
                 clock: ClockModel) -> SleepSchedule:
    energy = schedule_energy(schedule, profile, clock)
    return SleepSchedule(
        period=schedule.period, paging_window=schedule.paging_window,
        t_synch=schedule.t_synch,
        fractional_error_m=schedule.fractional_error_m,
        k=schedule.k, sleep_durations=schedule.sleep_durations,
        active_time_t_act=schedule.active_time_t_act, total_energy=energy)


def plan_sleep_schedule(duty: DutyCycleConfig, profile: PowerProfile,
                        clock: ClockModel) -> SleepSchedule:
    """Greedy minimum-energy sleep schedule for one eDRX or PSM period.

    Adds cycles one at a time.  A candidate cycle K is rejected (keeping
    K-1) when its marginal energy
    ``p_rx*t_synch + p_sleep*sleep_K + p_idle*t_act_K`` exceeds the idle
    energy ``p_idle*t_act_{K-1}`` it replaces; iteration also stops once
    the residual active time drops below the synch time, since no further
    cycle fits.  The marginal test runs first: a final cycle that fits but
    costs more than it saves is still rejected.
    """
    _check_room(duty, clock)
    m = clock.fractional_error_m
    t_synch = clock.resync_time_t_synch
    current = _schedule_for_k(duty, clock, 1)
    assert current is not None  # guaranteed by _check_room
    while True:
        prev_act = current.active_time_t_act
        candidate = _schedule_for_k(duty, clock, current.k + 1)
        if candidate is None:
            break
        marginal = (profile.p_rx * t_synch
                    + profile.p_sleep * candidate.sleep_durations[-1]
                    + profile.p_idle * candidate.active_time_t_act)
        if marginal > profile.p_idle * prev_act:
            break
        current = candidate
        if current.active_time_t_act < t_synch:
            break
    return _with_energy(current, profile, clock)


def oracle_schedule(duty: DutyCycleConfig, profile: PowerProfile,
                    clock: ClockModel, k_max: int) -> SleepSchedule:
    """Brute-force reference: best schedule over all K in 1..k_max.

    Evaluates every feasible cycle count with the same per-step split and
    returns the minimum-energy one.  Verification only.
    """
    if k_max < 1:
        raise ValidationError("k_max must be >= 1")
    _check_room(duty, clock)
    best: SleepSchedule | None = None
    for k in range(1, k_max + 1):
        candidate = _schedule_for_k(duty, clock, k)
        if candidate is None:
            break
        candidate = _with_energy(candidate, profile, clock)
        if best is None or candidate.total_energy < best.total_energy:
            best = candidate
    assert best is not None
    return best


def unoptimized_schedule(duty: DutyCycleConfig, profile: PowerProfile,
                         clock: ClockModel) -> SleepSchedule:
    """Single-wake baseline: sleep once, wake m*t_sleep early and idle."""
    _check_room(duty, clock)
    schedule = _schedule_for_k(duty, clock, 1)
    assert schedule is not None
    return _with_energy(schedule, profile, clock)
