"""Command-line interface.

Verbs:
  validate   parse a scenario file and report its canonical hash
  run        execute a named experiment sweep (CSV + summary + manifest)
  compare    check a report's simulated column against its analytical one
  lifetime   energy per reporting cycle and battery lifetime for one device
  analytics  closed-form per-UE / per-cell delay and cell capacity

Exit codes: 0 success, 1 usage or configuration error, 2 completed with
point failures (or failed comparisons).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, experiments
from .analytics import (CellConfig, Direction, delay_ue, max_ue, n_blocks,
                        tl_downlink, tl_uplink, total_cell_delay)
from .lifetime import (DEFAULT_EVENTS, ReportingCycleSpec, lifetime_result,
                       technology_profile)
from .scenario import (default_scenario_path, parse_scenario, scenario_hash)
from .tables import default_coverage_table, make_link_params
from .types import (CelliotError, ClockModel, CoverageName, Technology)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", type=Path, default=None,
                   help="scenario TOML (default: bundled city scenario)")
    p.add_argument("--out", type=Path, default=None,
                   help="output directory (run) or file (other verbs)")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"),
                   default="csv")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="celliot",
        description="eMTC / NB-IoT energy, latency and scalability models")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("validate", help="validate a scenario file")
    p.add_argument("scenario", type=Path)

    p = sub.add_parser("run", help="run a named experiment sweep")
    p.add_argument("experiment", nargs="?", default=None,
                   help="one of: " + ", ".join(experiments.EXPERIMENT_NAMES))
    p.add_argument("--from-manifest", type=Path, default=None,
                   help="reproduce a previous run from its manifest")
    p.add_argument("--seed", type=int, nargs="+", default=[0],
                   help="one or more RNG seeds")
    p.add_argument("--jobs", type=int, default=1,
                   help="concurrent sweep points")
    p.add_argument("--plot", action="store_true",
                   help="also render a PNG figure next to the CSV")
    _add_common(p)

    p = sub.add_parser("compare",
                       help="compare simulated vs analytical columns")
    p.add_argument("report", type=Path, help="CSV emitted by 'run'")
    p.add_argument("--tolerance", type=float, default=1.25,
                   help="max allowed simulated/analytical ratio")

    p = sub.add_parser("lifetime", help="energy per cycle and lifetime")
    p.add_argument("--tech", choices=[t.value for t in Technology],
                   default="NBIOT")
    p.add_argument("--coverage", choices=[c.value for c in CoverageName],
                   default="GOOD")
    p.add_argument("--data-bytes", type=int, default=200)
    p.add_argument("--reports-per-day", type=float, default=1.0)
    p.add_argument("--no-optimize", action="store_true",
                   help="price standby with the single-wake baseline")
    _add_common(p)

    p = sub.add_parser("analytics", help="closed-form delay and capacity")
    p.add_argument("--tech", choices=[t.value for t in Technology],
                   default="NBIOT")
    p.add_argument("--coverage", choices=[c.value for c in CoverageName],
                   default="GOOD")
    p.add_argument("--data-bytes", type=int, default=200)
    p.add_argument("--direction", choices=("UL", "DL"), default="UL")
    p.add_argument("--n-ue", type=int, default=None,
                   help="population size (default: scenario ue_count)")
    _add_common(p)

    return parser


def _load_scenario(path: Path | None):
    return parse_scenario(path if path is not None
                          else default_scenario_path())


def _emit(fields: dict, fmt: str, out: Path | None) -> None:
    if fmt == "json":
        text = json.dumps(fields, sort_keys=True, indent=2) + "\n"
    else:
        text = (",".join(fields) + "\n"
                + ",".join(str(v) for v in fields.values()) + "\n")
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_validate(args) -> int:
    scenario = parse_scenario(args.scenario)
    print(f"ok: scenario '{scenario.name}' "
          f"(hash {scenario_hash(scenario)[:12]})")
    return 0


def _cmd_run(args) -> int:
    out_dir = args.out if args.out is not None else Path("out")
    if args.from_manifest is not None:
        manifest = json.loads(args.from_manifest.read_text())
        spec = experiments.spec_from_manifest(
            manifest, out_dir, jobs=args.jobs, plot=args.plot)
    else:
        if args.experiment is None:
            print("error: give an experiment name or --from-manifest",
                  file=sys.stderr)
            return 1
        spec = experiments.ExperimentSpec(
            name=args.experiment, scenario=_load_scenario(args.scenario),
            seeds=tuple(args.seed), out_dir=out_dir, jobs=args.jobs,
            fmt=args.fmt, plot=args.plot)
    result = experiments.run_experiment(spec)
    print(f"{spec.name}: {len(result.rows)} rows -> "
          f"{out_dir / (spec.name + '.csv')}")
    for failure in result.failures:
        print(f"point failed: {failure['point']}: {failure['error']}",
              file=sys.stderr)
    return result.exit_code


def _cmd_compare(args) -> int:
    header, rows = experiments.read_csv(args.report)
    comparison = experiments.compare_analytical_sim(header, rows,
                                                    args.tolerance)
    bad = 0
    for row in comparison:
        status = "ok" if row.ok else "FAIL"
        bad += not row.ok
        print(f"{status}: {row.key} simulated={row.simulated:g} "
              f"analytical={row.analytical:g} ratio={row.ratio:.4f}")
    print(f"{len(comparison) - bad}/{len(comparison)} points within "
          f"[1, {args.tolerance:g}] of the analytical value")
    return 2 if bad else 0


def _device_link(scenario, tech: Technology, coverage: CoverageName):
    radio = scenario.radio_for(tech)
    cov = default_coverage_table().by_name(tech, coverage)
    return make_link_params(tech, cov, rbu=radio.rbu,
                            timings=radio.timings())


def _cmd_lifetime(args) -> int:
    scenario = _load_scenario(args.scenario)
    tech = Technology(args.tech)
    coverage = CoverageName(args.coverage)
    link = _device_link(scenario, tech, coverage)
    interval = 86400.0 / args.reports_per_day
    spec = ReportingCycleSpec(
        reporting_interval_t_tot=interval,
        data_len_bits=args.data_bytes * 8,
        events=DEFAULT_EVENTS[coverage],
        duty=scenario.energy.duty(), link=link, technology=tech)
    clock = ClockModel(scenario.energy.clock_m, scenario.energy.t_synch_s)
    res = lifetime_result(spec, technology_profile(tech), clock,
                          scenario.energy.battery_j,
                          optimize=not args.no_optimize)
    _emit({
        "technology": tech.value,
        "coverage": coverage.value,
        "reports_per_day": args.reports_per_day,
        "data_bytes": args.data_bytes,
        "energy_per_cycle_j": res.energy_per_cycle,
        "lifetime_years": res.lifetime_years,
    }, args.fmt, args.out)
    return 0


def _cmd_analytics(args) -> int:
    scenario = _load_scenario(args.scenario)
    tech = Technology(args.tech)
    coverage = CoverageName(args.coverage)
    link = _device_link(scenario, tech, coverage)
    radio = scenario.radio_for(tech)
    direction = Direction(args.direction)
    bits = args.data_bytes * 8
    cfg = CellConfig(
        n_rb_total=radio.n_rb, rbu=radio.rbu,
        n_ue=args.n_ue if args.n_ue is not None else scenario.city.ue_count,
        reporting_period=scenario.traffic.reporting_period_s,
        direction=direction, data_len_bits=bits)
    _emit({
        "technology": tech.value,
        "coverage": coverage.value,
        "direction": direction.value,
        "data_bytes": args.data_bytes,
        "tl_s": tl_uplink(link) if direction is Direction.UL
        else tl_downlink(link),
        "n_blocks": n_blocks(bits, link),
        "delay_ue_s": delay_ue(direction, bits, link),
        "total_cell_delay_s": total_cell_delay(cfg, link),
        "max_ue": max_ue(cfg, link),
    }, args.fmt, args.out)
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "run": _cmd_run,
    "compare": _cmd_compare,
    "lifetime": _cmd_lifetime,
    "analytics": _cmd_analytics,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.verb](args)
    except CelliotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
