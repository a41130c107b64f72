"""Deterministic discrete-event simulation of one cell population.

Time is integer milliseconds (1 ms = 1 subframe).  Each uplink report
follows the per-block sequence control grant -> DL/UL retune -> data
repetitions -> UL/DL retune -> acknowledgement; a failed block (Bernoulli
draw from the BLER curve) is retransmitted up to a retry cap.  Grants are
served in circular arrival order from a shared resource-block pool, so a
report occupies ``rbu`` RBs for its whole transmission.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from ..analytics import n_blocks, tl_uplink_ms
from ..tables import (coverage_for_mcl, default_coverage_table,
                      make_link_params)
from ..types import CoverageClass, LinkParams, Technology, ValidationError
from . import bler as bler_mod
from . import topology as topo_mod
from ..scenario import Scenario


class Outcome(Enum):
    DELIVERED = "delivered"   # completed within its reporting period
    LATE = "late"             # completed after the deadline
    DISCARDED = "discarded"   # never granted before the deadline
    FAILED = "failed"         # a transport block exhausted its retries


@dataclass(frozen=True)
class UeLink:
    index: int
    mcl_db: float
    ul_snr_db: float
    coverage: CoverageClass
    link: LinkParams
    block_error_prob: float


@dataclass(frozen=True)
class ReportRecord:
    ue_id: int
    created_ms: int
    start_ms: int          # -1 when discarded
    end_ms: int            # -1 when discarded
    airtime_ms: int
    attempts: int
    outcome: Outcome


@dataclass(frozen=True)
class SimReport:
    technology: Technology
    rng_seed: int
    records: tuple[ReportRecord, ...]
    latencies_s: tuple[float, ...]          # end-to-end UL, completed reports
    delivery_ratio: dict[int, float]        # per UE, on-time fraction
    total_airtime_s: float
    generated: int
    delivered: int
    late: int
    discarded: int
    failed: int
    max_supported_ues: int                  # UEs with >= 90% on-time delivery

    def mean_latency_s(self) -> float:
        if not self.latencies_s:
            return float("nan")
        return float(np.mean(self.latencies_s))


ON_TIME_THRESHOLD = 0.9


def topology_from_scenario(scenario: Scenario,
                           technology: Technology) -> topo_mod.CityTopology:
    city = scenario.city
    radio = scenario.radio_for(technology)
    return topo_mod.make_city(
        n_sites=city.n_enb, inter_site_m=city.inter_site_m,
        city_radius_m=city.city_radius_m, ue_count=city.ue_count,
        indoor_ratio=city.indoor_ratio,
        urban_radius_m=city.urban_radius_m,
        suburban_radius_m=city.suburban_radius_m,
        enb_tx_dbm=radio.enb_tx_dbm, wall_loss_db=city.wall_loss_db,
        pl0_db=city.pl0_db, exponents=city.exponents(),
        seed=city.placement_seed)


def build_ue_links(scenario: Scenario, technology: Technology,
                   topology: topo_mod.CityTopology) -> list[UeLink]:
    """Assign every UE its coverage class and link configuration.

    The MCL driving link adaptation is the coupling loss to the serving
    cell; a UE beyond the coverage table span makes the scenario invalid.
    """
    radio = scenario.radio_for(technology)
    noise = topo_mod.noise_dbm(radio.bandwidth_hz, radio.noise_figure_db)
    cov_table = default_coverage_table()
    links = []
    for ue in topology.ues:
        mcl = topology.coupling_loss(ue)
        coverage = coverage_for_mcl(technology, mcl, cov_table)
        link = make_link_params(technology, coverage, rbu=radio.rbu,
                                timings=radio.timings())
        snr = radio.ue_tx_dbm - mcl - noise
        p = 0.0 if scenario.traffic.perfect_link else bler_mod.bler(
            technology, link.mcs, snr, link.rlus)
        links.append(UeLink(ue.index, mcl, snr, coverage, link, p))
    return links


def _service_time_ms(ue: UeLink, data_bits: int, retry_cap: int,
                     rng: np.random.Generator,
                     perfect: bool) -> tuple[int, int, bool]:
    """(service_ms, attempts, delivered) for one report."""
    tl = tl_uplink_ms(ue.link)
    blocks = n_blocks(data_bits, ue.link)
    if perfect or ue.block_error_prob == 0.0:
        return tl * blocks, blocks, True
    total_attempts = 0
    for _ in range(blocks):
        for attempt in range(retry_cap + 1):
            total_attempts += 1
            if rng.random() >= ue.block_error_prob:
                break
        else:
            # block failed after the retry cap; the report is lost
            return tl * total_attempts, total_attempts, False
    return tl * total_attempts, total_attempts, True


def _check_rb_occupancy(intervals: list[tuple[int, int, int]],
                        n_rb: int) -> None:
    """Assert that no subframe is allocated more than n_rb RBs."""
    events: list[tuple[int, int]] = []
    for start, end, rbu in intervals:
        events.append((start, rbu))
        events.append((end, -rbu))
    events.sort()
    occupied = 0
    for _t, delta in events:
        occupied += delta
        if occupied > n_rb:
            raise AssertionError(
                f"RB pool oversubscribed: {occupied} > {n_rb}")


def run_simulation(scenario: Scenario, technology: Technology,
                   seed: int, debug_checks: bool = True,
                   topology: topo_mod.CityTopology | None = None) -> SimReport:
    """Simulate the whole population for traffic.n_periods periods.

    When ``topology`` is given it overrides the scenario's city (the
    population size is taken from the topology).
    """
    radio = scenario.radio_for(technology)
    traffic = scenario.traffic
    if topology is None:
        topology = topology_from_scenario(scenario, technology)
    links = build_ue_links(scenario, technology, topology)

    period_ms = round(traffic.reporting_period_s * 1000.0)
    data_bits = traffic.packet_bytes * 8
    rng = np.random.default_rng(seed)

    # wake-up instants: each UE picks a random instant within each period
    wakes: list[tuple[int, int]] = []   # (wake_ms, ue_id)
    for period in range(traffic.n_periods):
        base = period * period_ms
        if traffic.simultaneous_wakeup:
            offsets = np.zeros(len(links), dtype=np.int64)
        else:
            offsets = rng.integers(0, period_ms, size=len(links))
        wakes.extend((base + int(offsets[i]), i) for i in range(len(links)))
    wakes.sort()

    # shared RB pool: (free_at_ms, rb_index)
    pool = [(0, rb) for rb in range(radio.n_rb)]
    heapq.heapify(pool)

    records: list[ReportRecord] = []
    intervals: list[tuple[int, int, int]] = []
    for wake_ms, ue_id in wakes:
        ue = links[ue_id]
        deadline = wake_ms + period_ms
        taken = [heapq.heappop(pool) for _ in range(radio.rbu)]
        start = max(wake_ms, max(free for free, _rb in taken))
        if traffic.enforce_deadline and start >= deadline:
            # scheduler cannot serve this request in time: drop it
            for entry in taken:
                heapq.heappush(pool, entry)
            records.append(ReportRecord(ue_id, wake_ms, -1, -1, 0, 0,
                                        Outcome.DISCARDED))
            continue
        service, attempts, ok = _service_time_ms(
            ue, data_bits, traffic.retry_cap, rng, traffic.perfect_link)
        end = start + service
        for _free, rb in taken:
            heapq.heappush(pool, (end, rb))
        intervals.append((start, end, radio.rbu))
        if not ok:
            outcome = Outcome.FAILED
        elif traffic.enforce_deadline and end > deadline:
            outcome = Outcome.LATE
        else:
            outcome = Outcome.DELIVERED
        records.append(ReportRecord(ue_id, wake_ms, start, end, service,
                                    attempts, outcome))

    if debug_checks:
        _check_rb_occupancy(intervals, radio.n_rb)
        counted = sum(1 for r in records if r.outcome in Outcome)
        assert counted == len(wakes), "report conservation violated"

    latencies = tuple(
        (r.end_ms - r.created_ms) / 1000.0 + traffic.core_delay_s
        for r in records if r.outcome in (Outcome.DELIVERED, Outcome.LATE))
    on_time: dict[int, int] = {i: 0 for i in range(len(links))}
    for r in records:
        if r.outcome is Outcome.DELIVERED:
            on_time[r.ue_id] += 1
    ratio = {i: on_time[i] / traffic.n_periods for i in on_time}
    supported = sum(1 for v in ratio.values() if v >= ON_TIME_THRESHOLD)
    served = [r for r in records if r.start_ms >= 0]
    airtime = 0.0
    if served:
        airtime = (max(r.end_ms for r in served)
                   - min(r.start_ms for r in served)) / 1000.0

    def count(o: Outcome) -> int:
        return sum(1 for r in records if r.outcome is o)

    return SimReport(
        technology=technology, rng_seed=seed, records=tuple(records),
        latencies_s=latencies, delivery_ratio=ratio,
        total_airtime_s=airtime, generated=len(records),
        delivered=count(Outcome.DELIVERED), late=count(Outcome.LATE),
        discarded=count(Outcome.DISCARDED), failed=count(Outcome.FAILED),
        max_supported_ues=supported)


def report_to_csv(report: SimReport, path) -> None:
    """One row per report: ue_id, timestamps, airtime, attempts, outcome."""
    lines = ["# schema=1",
             "ue_id,created_at_ms,start_ms,delivered_at_ms,airtime_ms,"
             "attempts,outcome"]
    lines.extend(
        f"{r.ue_id},{r.created_ms},{r.start_ms},{r.end_ms},{r.airtime_ms},"
        f"{r.attempts},{r.outcome.value}" for r in report.records)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def report_summary(report: SimReport) -> dict:
    return {
        "technology": report.technology.value,
        "rng_seed": report.rng_seed,
        "generated": report.generated,
        "delivered": report.delivered,
        "late": report.late,
        "discarded": report.discarded,
        "failed": report.failed,
        "mean_latency_s": report.mean_latency_s(),
        "total_airtime_s": report.total_airtime_s,
        "max_supported_ues": report.max_supported_ues,
    }


def _population_ok(report: SimReport) -> bool:
    return all(v >= ON_TIME_THRESHOLD for v in
               report.delivery_ratio.values())


def max_supported_ues(scenario: Scenario, technology: Technology,
                      candidate_counts: list[int], seed: int = 0) -> int:
    """Largest candidate UE count where every UE is >=90% on-time.

    This is the simulated counterpart of the closed-form cell capacity,
    so probes use its assumptions: all UEs request in the same subframe
    and are served back to back.  Every probe truncates one fixed city
    (placed at the largest candidate) to the candidate size, re-flagging
    indoor UEs to preserve the indoor ratio, so all probes sample the
    same positions.  Binary search over the ascending candidate list.
    """
    if not candidate_counts:
        raise ValidationError("candidate_counts must not be empty")
    if any(b <= a for a, b in zip(candidate_counts, candidate_counts[1:])):
        raise ValidationError("candidate_counts must be strictly ascending")
    full = replace(scenario,
                   city=replace(scenario.city,
                                ue_count=max(candidate_counts)),
                   traffic=replace(scenario.traffic,
                                   simultaneous_wakeup=True))
    city = topology_from_scenario(full, technology)
    best = 0
    lo, hi = 0, len(candidate_counts) - 1
    while lo <= hi:
        mid = (lo + hi) // 2
        count = candidate_counts[mid]
        probe = topo_mod.subset(city, count, scenario.city.indoor_ratio)
        report = run_simulation(full, technology, seed, topology=probe)
        if _population_ok(report):
            best = count
            lo = mid + 1
        else:
            hi = mid - 1
    return best
