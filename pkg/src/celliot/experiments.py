"""Named experiments, report emission and analytical-vs-simulated checks.

Each experiment produces a CSV (``# schema=1`` header line), a JSON
summary and a manifest sufficient to regenerate the CSV byte-identically.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from . import lifetime as lt
from .analytics import Direction, delay_ue, delay_ue_ms, workload_airtime
from .scenario import Scenario, normalize, scenario_from_dict, scenario_hash
from .sim import topology as topo_mod
from .sim.engine import (build_ue_links, max_supported_ues, run_simulation,
                         topology_from_scenario)
from .tables import (default_bler_table, default_coverage_table,
                     default_tbs_table, make_link_params)
from .types import (ClockModel, ConfigurationError, CoverageName,
                    DutyCycleConfig, DutyCycleMode, Technology,
                    ValidationError)

CSV_SCHEMA_LINE = "# schema=1"

EXPERIMENT_NAMES = ("lifetime_vs_edrx", "lifetime_matrix",
                    "latency_vs_indoor", "airtime_vs_indoor",
                    "scalability_vs_indoor")

#: Clock variants swept by lifetime_vs_edrx: (label, drift, optimized?)
CLOCK_VARIANTS = (
    ("perfect_xc", 0.0, True),
    ("low_power_xc", 1e-4, True),
    ("opti_low_cost", 1e-3, True),
    ("unopti_low_cost", 1e-3, False),
)

DEFAULT_EDRX_AXIS = (60.0, 120.0, 300.0, 600.0, 720.0, 900.0, 1200.0,
                     1800.0, 3600.0, 7200.0, 10800.0)
DEFAULT_INDOOR_AXIS = (0.0, 0.25, 0.5, 0.75, 1.0)
DEFAULT_REPORTS_AXIS = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0)
DEFAULT_DATA_LENS = (12 * 8, 160 * 8)
DEFAULT_SCALABILITY_CANDIDATES = tuple(range(25, 601, 25))


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    scenario: Scenario
    seeds: tuple[int, ...] = (0,)
    out_dir: Path = Path("out")
    jobs: int = 1
    fmt: str = "csv"
    plot: bool = False
    axes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in EXPERIMENT_NAMES and self.name != "custom":
            raise ValidationError(
                f"unknown experiment {self.name!r}; choose one of "
                f"{EXPERIMENT_NAMES}")
        if self.fmt not in ("csv", "json"):
            raise ValidationError("format must be csv or json")
        if self.jobs < 1:
            raise ValidationError("jobs must be >= 1")


@dataclass
class ExperimentResult:
    name: str
    header: list[str]
    rows: list[list]
    summary: dict
    failures: list[dict]

    @property
    def exit_code(self) -> int:
        return 2 if self.failures else 0


def _link_for(scenario: Scenario):
    cov_table = default_coverage_table()

    def link_for(tech: Technology, name: CoverageName):
        radio = scenario.radio_for(tech)
        return make_link_params(tech, cov_table.by_name(tech, name),
                                rbu=radio.rbu, timings=radio.timings())
    return link_for


def _poor_spec(scenario: Scenario, duty: DutyCycleConfig,
               data_bytes: int = 200) -> lt.ReportingCycleSpec:
    link = _link_for(scenario)(Technology.NBIOT, CoverageName.POOR)
    return lt.ReportingCycleSpec(
        reporting_interval_t_tot=lt.SECONDS_PER_DAY,
        data_len_bits=data_bytes * 8,
        events=lt.DEFAULT_EVENTS[CoverageName.POOR],
        duty=duty, link=link, technology=Technology.NBIOT)


def _run_lifetime_vs_edrx(spec: ExperimentSpec) -> ExperimentResult:
    """Battery lifetime vs eDRX period for the four clock variants."""
    scenario = spec.scenario
    edrx_axis = spec.axes.get("edrx_s", DEFAULT_EDRX_AXIS)
    paging = scenario.energy.paging_window_s or 0.1
    t_synch = scenario.energy.t_synch_s
    profile = lt.technology_profile(Technology.NBIOT)
    header = ["edrx_s", "clock", "fractional_error_m", "energy_per_cycle_j",
              "lifetime_years"]
    rows = []
    for edrx in edrx_axis:
        duty = DutyCycleConfig(DutyCycleMode.EDRX, float(edrx), paging)
        cycle = _poor_spec(scenario, duty)
        for label, m, optimized in CLOCK_VARIANTS:
            clock = ClockModel(m, t_synch)
            res = lt.lifetime_result(cycle, profile, clock,
                                     scenario.energy.battery_j,
                                     optimize=optimized)
            rows.append([edrx, label, m, res.energy_per_cycle,
                         res.lifetime_years])
    return ExperimentResult(spec.name, header, rows,
                            {"points": len(rows)}, [])


def _run_lifetime_matrix(spec: ExperimentSpec) -> ExperimentResult:
    """PSM lifetime over reports/day x data length x coverage x tech."""
    scenario = spec.scenario
    reports = spec.axes.get("reports_per_day", DEFAULT_REPORTS_AXIS)
    data_lens = spec.axes.get("data_len_bits", DEFAULT_DATA_LENS)
    coverages = [CoverageName[c] for c in
                 spec.axes.get("coverages", ("GOOD", "MEDIUM", "POOR"))]
    clock = ClockModel(scenario.energy.clock_m, scenario.energy.t_synch_s)
    table = lt.emtc_vs_nbiot_lifetime(
        list(reports), list(data_lens), coverages,
        link_for=_link_for(scenario), clock=clock,
        capacity_joules=scenario.energy.battery_j)
    header = ["technology", "coverage", "reports_per_day", "data_len_bits",
              "energy_per_cycle_j", "lifetime_years"]
    rows = [[r.technology.value, r.coverage.value, r.reports_per_day,
             r.data_len_bits, r.energy_per_cycle, r.lifetime_years]
            for r in table]
    return ExperimentResult(spec.name, header, rows,
                            {"points": len(rows)}, [])


def _indoor_points(spec: ExperimentSpec):
    axis = spec.axes.get("indoor_ratio", DEFAULT_INDOOR_AXIS)
    return [(ratio, tech, seed) for ratio in axis for tech in Technology
            for seed in spec.seeds]


def _map_points(spec: ExperimentSpec, points, fn):
    """Run sweep points (optionally concurrently), keeping input order."""
    failures = []
    rows = []
    if spec.jobs == 1:
        results = [_safe(fn, p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=spec.jobs) as pool:
            results = list(pool.map(lambda p: _safe(fn, p), points))
    for point, outcome in zip(points, results):
        ok, value = outcome
        if ok:
            rows.extend(value)
        else:
            failures.append({"point": repr(point), "error": value})
    return rows, failures


def _safe(fn, point):
    try:
        return True, fn(point)
    except Exception as exc:  # pragma: no cover - exercised via failures
        return False, f"{type(exc).__name__}: {exc}"


def _run_latency_vs_indoor(spec: ExperimentSpec) -> ExperimentResult:
    scenario = spec.scenario
    header = ["indoor_ratio", "technology", "seed", "mean_latency_s",
              "delivered", "late", "discarded", "failed"]

    def point(p):
        ratio, tech, seed = p
        sc = replace(scenario, city=replace(scenario.city,
                                            indoor_ratio=ratio))
        rep = run_simulation(sc, tech, seed)
        return [[ratio, tech.value, seed, rep.mean_latency_s(),
                 rep.delivered, rep.late, rep.discarded, rep.failed]]

    rows, failures = _map_points(spec, _indoor_points(spec), point)
    return ExperimentResult(spec.name, header, rows,
                            {"points": len(rows)}, failures)


def _airtime_scenario(scenario: Scenario) -> Scenario:
    # airtime conditions: error-free links, everyone wakes together, serve all
    return replace(scenario, traffic=replace(
        scenario.traffic, simultaneous_wakeup=True, perfect_link=True,
        enforce_deadline=False, n_periods=1))


def _run_airtime_vs_indoor(spec: ExperimentSpec) -> ExperimentResult:
    scenario = _airtime_scenario(spec.scenario)
    header = ["indoor_ratio", "technology", "seed", "simulated",
              "analytical"]

    def point(p):
        ratio, tech, seed = p
        sc = replace(scenario, city=replace(scenario.city,
                                            indoor_ratio=ratio))
        rep = run_simulation(sc, tech, seed)
        analytic = _analytical_airtime(sc, tech)
        return [[ratio, tech.value, seed, rep.total_airtime_s, analytic]]

    rows, failures = _map_points(spec, _indoor_points(spec), point)
    return ExperimentResult(spec.name, header, rows,
                            {"points": len(rows)}, failures)


def _population_delays(scenario: Scenario, tech: Technology) -> list[float]:
    topology = topology_from_scenario(scenario, tech)
    links = build_ue_links(scenario, tech, topology)
    bits = scenario.traffic.packet_bytes * 8
    return [delay_ue(Direction.UL, bits, l.link) for l in links]


def _analytical_airtime(scenario: Scenario, tech: Technology) -> float:
    radio = scenario.radio_for(tech)
    delays = _population_delays(scenario, tech)
    return workload_airtime(delays, [radio.rbu] * len(delays), radio.n_rb)


def _analytical_max_ue(scenario: Scenario, tech: Technology) -> int:
    """Closed-form cell capacity over the scenario's own population.

    Largest n such that the first n UEs (indoor flags scaled to keep the
    configured ratio) fit their per-UE delays into one reporting period
    of the RB pool.  For a homogeneous population this reduces to
    floor(period * n_groups / delay_ue); the simulated capacity can never
    exceed it because the simulator adds contention, never removes work.
    """
    radio = scenario.radio_for(tech)
    ratio = scenario.city.indoor_ratio
    topology = topology_from_scenario(scenario, tech)
    bits = scenario.traffic.packet_bytes * 8
    delays = {}
    for flag in (True, False):
        flagged = topo_mod.CityTopology(
            topology.sites,
            tuple(replace(u, indoor=flag) for u in topology.ues),
            topology.wall_loss_db, topology.pl0_db, topology.exponents)
        links = build_ue_links(scenario, tech, flagged)
        delays[flag] = [delay_ue_ms(Direction.UL, bits, l.link)
                        for l in links]
    prefix = {flag: [0] for flag in delays}
    for flag, ds in delays.items():
        for d in ds:
            prefix[flag].append(prefix[flag][-1] + d)
    period_ms = round(scenario.traffic.reporting_period_s * 1000.0)
    budget = period_ms * radio.n_rb
    best = 0
    for n in range(1, len(topology.ues) + 1):
        k = int(math.floor(ratio * n))
        work = prefix[True][k] + prefix[False][n] - prefix[False][k]
        if work * radio.rbu <= budget:
            best = n
    return best


def _run_scalability_vs_indoor(spec: ExperimentSpec) -> ExperimentResult:
    scenario = spec.scenario
    candidates = list(spec.axes.get("candidates",
                                    DEFAULT_SCALABILITY_CANDIDATES))
    header = ["indoor_ratio", "technology", "seed", "simulated",
              "analytical"]

    def point(p):
        ratio, tech, seed = p
        sc = replace(scenario, city=replace(
            scenario.city, indoor_ratio=ratio, ue_count=max(candidates)))
        sim_max = max_supported_ues(sc, tech, candidates, seed)
        analytic = _analytical_max_ue(sc, tech)
        return [[ratio, tech.value, seed, sim_max, analytic]]

    rows, failures = _map_points(spec, _indoor_points(spec), point)
    return ExperimentResult(spec.name, header, rows,
                            {"points": len(rows)}, failures)


_RUNNERS = {
    # "custom" reuses the latency sweep with caller-supplied axes
    "custom": _run_latency_vs_indoor,
    "lifetime_vs_edrx": _run_lifetime_vs_edrx,
    "lifetime_matrix": _run_lifetime_matrix,
    "latency_vs_indoor": _run_latency_vs_indoor,
    "airtime_vs_indoor": _run_airtime_vs_indoor,
    "scalability_vs_indoor": _run_scalability_vs_indoor,
}


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [CSV_SCHEMA_LINE, ",".join(header)]
    lines.extend(",".join(_format_cell(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    header: list[str] | None = None
    rows = []
    for line in Path(path).read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    if header is None:
        raise ConfigurationError(f"{path}: empty report")
    return header, rows


def build_manifest(spec: ExperimentSpec) -> dict:
    return {
        "experiment": spec.name,
        "version": __version__,
        "scenario": normalize(spec.scenario),
        "scenario_hash": scenario_hash(spec.scenario),
        "seeds": list(spec.seeds),
        "axes": {k: list(v) if isinstance(v, (list, tuple)) else v
                 for k, v in spec.axes.items()},
        "format": spec.fmt,
        "tables": {
            "tbs": default_tbs_table().version,
            "coverage": default_coverage_table().version,
            "bler": default_bler_table().version,
        },
    }


def spec_from_manifest(manifest: dict, out_dir: Path,
                       jobs: int = 1, plot: bool = False) -> ExperimentSpec:
    raw = dict(manifest["scenario"])
    name = raw.pop("name", "manifest")
    raw["city"] = {k: v for k, v in raw["city"].items() if v is not None}
    scenario = scenario_from_dict(raw, name=name)
    return ExperimentSpec(
        name=manifest["experiment"], scenario=scenario,
        seeds=tuple(manifest["seeds"]), out_dir=out_dir, jobs=jobs,
        fmt=manifest.get("format", "csv"), plot=plot,
        axes=manifest.get("axes", {}))


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Execute the sweep and write CSV/JSON + manifest into out_dir."""
    result = _RUNNERS[spec.name](spec)
    out = spec.out_dir
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{spec.name}.csv"
    write_csv(csv_path, result.header, result.rows)
    summary = {
        "experiment": spec.name,
        "rows": len(result.rows),
        "failures": result.failures,
        **result.summary,
    }
    (out / f"{spec.name}_summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n")
    if spec.fmt == "json":
        (out / f"{spec.name}.json").write_text(json.dumps(
            {"header": result.header, "rows": result.rows},
            sort_keys=True) + "\n")
    (out / f"{spec.name}_manifest.json").write_text(
        json.dumps(build_manifest(spec), sort_keys=True, indent=2) + "\n")
    if spec.plot:
        from . import plots
        plots.render_experiment(spec.name, result.header, result.rows,
                                out / f"{spec.name}.png")
    return result


@dataclass(frozen=True)
class ComparisonRow:
    key: tuple
    simulated: float
    analytical: float
    ratio: float
    ok: bool


def compare_analytical_sim(header: list[str], rows: list[list],
                           tolerance: float = 1.25) -> list[ComparisonRow]:
    """Per-point simulated/analytical ratio and pass/fail.

    Passes when analytical <= simulated <= tolerance * analytical; the
    lower bound holds because the closed form assumes optimal packing and
    no contention.
    """
    try:
        sim_idx = header.index("simulated")
        ana_idx = header.index("analytical")
    except ValueError:
        raise ConfigurationError(
            "report must contain 'simulated' and 'analytical' columns; "
            f"got {header}") from None
    out = []
    for row in rows:
        if len(row) != len(header):
            raise ConfigurationError(
                f"row length {len(row)} does not match header {header}")
        sim = float(row[sim_idx])
        ana = float(row[ana_idx])
        if ana <= 0:
            raise ConfigurationError(f"non-positive analytical value {ana}")
        ratio = sim / ana
        key = tuple(v for i, v in enumerate(row)
                    if i not in (sim_idx, ana_idx))
        out.append(ComparisonRow(key, sim, ana, ratio,
                                 1.0 - 1e-9 <= ratio <= tolerance))
    return out
