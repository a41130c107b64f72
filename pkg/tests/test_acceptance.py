"""Acceptance gate: one test per release criterion.

Each test prints a single PASS/FAIL line (visible with ``pytest -s`` or
on failure) in addition to its assertion.
"""

import json
from dataclasses import replace

import numpy as np
import pytest

from celliot import experiments
from celliot.lifetime import (DEFAULT_EVENTS, ReportingCycleSpec,
                              lifetime_result, technology_profile)
from celliot.power import (SleepSchedule, oracle_schedule,
                           plan_sleep_schedule, unoptimized_schedule)
from celliot.scenario import default_scenario
from celliot.sim.engine import max_supported_ues, run_simulation
from celliot.tables import coverage_for_mcl, make_link_params
from celliot.types import (ClockModel, CoverageName, DutyCycleConfig,
                           DutyCycleMode, LinkParams, Technology)
from celliot.analytics import (CellConfig, Direction, delay_ue_ms, max_ue,
                               tl_uplink_ms, total_cell_delay_ms)

BATTERY_J = 18000.0
SECONDS_PER_DAY = 86400.0
CLOCK = ClockModel(0.001, 0.2)

MCL = {CoverageName.GOOD: 144.0, CoverageName.MEDIUM: 154.0,
       CoverageName.POOR: 164.0}


def link_for(tech, coverage):
    return make_link_params(tech, coverage_for_mcl(tech, MCL[coverage]))


def cycle_spec(tech, coverage, data_bytes, interval, duty):
    return ReportingCycleSpec(
        reporting_interval_t_tot=interval, data_len_bits=data_bytes * 8,
        events=DEFAULT_EVENTS[coverage], duty=duty,
        link=link_for(tech, coverage), technology=tech)


def verdict(num, name, ok):
    print(f"ACCEPTANCE {num:02d} {name}: {'PASS' if ok else 'FAIL'}")
    return ok


def test_criterion_01_optimizer_dominance_vs_edrx():
    # sweeping the listen cycle from 1 min to 3 h, the drift-aware plan
    # never loses to the single-wake baseline and strictly wins > 12 min
    axis = [60.0, 120.0, 300.0, 600.0, 660.0, 720.0, 900.0, 1200.0,
            1800.0, 3600.0, 7200.0, 10800.0]
    profile = technology_profile(Technology.NBIOT)
    ok = True
    strict_ok = True
    for edrx in axis:
        duty = DutyCycleConfig(DutyCycleMode.EDRX, edrx, 0.1)
        spec = cycle_spec(Technology.NBIOT, CoverageName.POOR, 200,
                          SECONDS_PER_DAY, duty)
        opt = lifetime_result(spec, profile, CLOCK, BATTERY_J,
                              optimize=True).lifetime_years
        unopt = lifetime_result(spec, profile, CLOCK, BATTERY_J,
                                optimize=False).lifetime_years
        ok &= opt >= unopt - 1e-12
        if edrx > 720.0:
            strict_ok &= opt > unopt
    assert verdict(1, "optimizer dominance over eDRX sweep", ok and strict_ok)


def test_criterion_02_oracle_equivalence():
    rng = np.random.default_rng(20240817)
    profile = technology_profile(Technology.NBIOT)
    ok = True
    for _ in range(1000):
        clock = ClockModel(float(rng.uniform(1e-4, 0.2)),
                           float(rng.uniform(0.1, 2.0)))
        period = float(rng.uniform(60.0, 86400.0))
        duty = DutyCycleConfig(DutyCycleMode.PSM, period)
        plan = plan_sleep_schedule(duty, profile, clock)
        oracle = oracle_schedule(duty, profile, clock, k_max=50)
        plan.validate()
        oracle.validate()
        ok &= abs(plan.total_energy - oracle.total_energy) <= 1e-9
    assert verdict(2, "planner equals brute-force oracle (1000 draws)", ok)


def test_criterion_03_lifetime_headline():
    duty = DutyCycleConfig(DutyCycleMode.PSM, SECONDS_PER_DAY)
    spec = cycle_spec(Technology.NBIOT, CoverageName.POOR, 200,
                      SECONDS_PER_DAY, duty)
    res = lifetime_result(spec, technology_profile(Technology.NBIOT),
                          CLOCK, BATTERY_J)
    ok = 8.0 <= res.lifetime_years <= 12.0
    assert verdict(3, f"poor-coverage headline lifetime "
                      f"{res.lifetime_years:.2f} y in [8, 12]", ok)


def test_criterion_04_coverage_payload_crossover():
    def years(tech, coverage, data_bytes, per_day):
        interval = SECONDS_PER_DAY / per_day
        duty = DutyCycleConfig(DutyCycleMode.PSM, interval)
        return lifetime_result(cycle_spec(tech, coverage, data_bytes,
                                          interval, duty),
                               technology_profile(tech), CLOCK,
                               BATTERY_J).lifetime_years

    ok = True
    for per_day in (1.0, 10.0):
        ok &= years(Technology.NBIOT, CoverageName.POOR, 12, per_day) > \
            years(Technology.EMTC, CoverageName.POOR, 12, per_day)
        ok &= years(Technology.EMTC, CoverageName.GOOD, 160, per_day) > \
            years(Technology.NBIOT, CoverageName.GOOD, 160, per_day)
    assert verdict(4, "small/poor favours NB-IoT, large/good favours eMTC",
                   ok)


def test_criterion_05_formula_staircases():
    link = LinkParams(mcs=0, rbu=1, tbs_bits=96, rldc=1, rlds=1, rlus=1,
                      t_pdcch=0.001, t_pdsch=0.001, t_pusch=0.001,
                      t_d=0.0, t_dus=0.0, t_uds=0.0, t_ulack=0.001,
                      t_dlack=0.001)
    ok = tl_uplink_ms(link) == 3
    ok &= delay_ue_ms(Direction.UL, 96, link) == 3
    ok &= delay_ue_ms(Direction.UL, 97, link) == 6
    cfg = CellConfig(6, 1, 7, 30.0, Direction.UL, 96)
    ok &= total_cell_delay_ms(cfg, link) == 2 * 3
    one = CellConfig(1, 1, 0, 0.003, Direction.UL, 96)
    ok &= max_ue(one, link) == 1
    short = CellConfig(1, 1, 0, 0.002, Direction.UL, 96)
    ok &= max_ue(short, link) == 0
    assert verdict(5, "integer-ms staircase examples exact", ok)


def test_criterion_06_airtime_matches_analytical():
    scenario = replace(default_scenario(),
                       city=replace(default_scenario().city, ue_count=100))
    spec = experiments.ExperimentSpec(
        name="airtime_vs_indoor", scenario=scenario, seeds=(42,),
        axes={"indoor_ratio": [0.0, 0.5, 1.0]})
    result = experiments._RUNNERS[spec.name](spec)
    comparison = experiments.compare_analytical_sim(result.header,
                                                    result.rows,
                                                    tolerance=1.25)
    ok = bool(comparison) and all(r.ok for r in comparison) \
        and not result.failures
    assert verdict(6, "simulated airtime within [1.0, 1.25] x analytical",
                   ok)


def test_criterion_07_latency_order_of_magnitude():
    scenario = default_scenario()
    em = run_simulation(scenario, Technology.EMTC, seed=42)
    nb = run_simulation(scenario, Technology.NBIOT, seed=42)
    ratio = em.mean_latency_s() / nb.mean_latency_s()
    ok = ratio <= 0.2 and em.discarded == 0 and nb.discarded == 0
    assert verdict(7, f"eMTC/NB-IoT mean latency ratio {ratio:.3f} <= 0.2",
                   ok)


def test_criterion_08_scalability_ordering():
    base = default_scenario()
    scenario = replace(
        base,
        city=replace(base.city, indoor_ratio=1.0, ue_count=600),
        traffic=replace(base.traffic, packet_bytes=160,
                        reporting_period_s=60.0))
    candidates = list(range(25, 601, 25))
    sim = {tech: max_supported_ues(scenario, tech, candidates, seed=42)
           for tech in Technology}
    analytical = {tech: experiments._analytical_max_ue(scenario, tech)
                  for tech in Technology}
    ok = sim[Technology.EMTC] > sim[Technology.NBIOT]
    for tech in Technology:
        ok &= sim[tech] <= analytical[tech]
    assert verdict(8, f"capacity eMTC {sim[Technology.EMTC]} > NB-IoT "
                      f"{sim[Technology.NBIOT]}, both <= analytical", ok)


def test_criterion_09_manifest_determinism(tmp_path):
    spec = experiments.ExperimentSpec(
        name="latency_vs_indoor", scenario=default_scenario(), seeds=(5,),
        out_dir=tmp_path / "a", axes={"indoor_ratio": [0.5]})
    experiments.run_experiment(spec)
    manifest = json.loads(
        (tmp_path / "a" / "latency_vs_indoor_manifest.json").read_text())
    spec2 = experiments.spec_from_manifest(manifest, tmp_path / "b")
    experiments.run_experiment(spec2)
    ok = (tmp_path / "a" / "latency_vs_indoor.csv").read_bytes() == \
        (tmp_path / "b" / "latency_vs_indoor.csv").read_bytes()
    assert verdict(9, "manifest rerun is byte-identical", ok)


def test_criterion_10_simulator_conservation():
    scenario = default_scenario()
    ok = True
    for tech in Technology:
        for seed in (0, 42):
            # debug_checks asserts RB occupancy on every run
            rep = run_simulation(scenario, tech, seed, debug_checks=True)
            ok &= (rep.delivered + rep.late + rep.discarded
                   + rep.failed) == rep.generated
    assert verdict(10, "report conservation and RB occupancy", ok)
