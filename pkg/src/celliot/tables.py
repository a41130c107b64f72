"""Bundled lookup tables: TBS, MCL coverage mapping and BLER curve params.

Table files live in ``celliot/data`` and use one record per line with a
``# version=N`` header; malformed lines raise with the offending line
number so a bad override file is easy to fix.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .types import (ChannelTimings, ConfigurationError, CoverageClass,
                    CoverageName, DEFAULT_RBU, DEFAULT_TIMINGS, LinkParams,
                    OutOfCoverageError, Technology)

_DATA = resources.files("celliot") / "data"

# Tier order is fixed: the bundled map carries exactly these three classes
# per technology, ordered by MCL threshold.
_TIER_NAMES = [CoverageName.GOOD, CoverageName.MEDIUM, CoverageName.POOR]


def _read_table(source: str | Path) -> tuple[str, list[tuple[int, list[str]]]]:
    """Return (version, [(lineno, fields), ...]) for a bundled or user file."""
    if isinstance(source, Path):
        text = source.read_text()
        name = str(source)
    else:
        text = (_DATA / source).read_text()
        name = source
    version = ""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line[1:].strip().startswith("version="):
                version = line.split("version=", 1)[1].strip()
            continue
        rows.append((lineno, [f.strip() for f in line.split(",")]))
    if not version:
        raise ConfigurationError(f"{name}: missing '# version=' header")
    return version, rows


def _parse_tech(token: str, name: str, lineno: int) -> Technology:
    try:
        return Technology(token)
    except ValueError:
        raise ConfigurationError(
            f"{name} line {lineno}: unknown technology {token!r}") from None


class TbsTable:
    """(technology, mcs, rbu) -> transport block size in bits."""

    def __init__(self, source: str | Path = "tbs_tables.csv"):
        self.source = str(source)
        self.version, rows = _read_table(source)
        self._entries: dict[tuple[Technology, int, int], int] = {}
        for lineno, fields in rows:
            if len(fields) != 4:
                raise ConfigurationError(
                    f"{self.source} line {lineno}: expected "
                    f"tech,mcs,rbu,tbs_bits, got {len(fields)} fields")
            tech = _parse_tech(fields[0], self.source, lineno)
            try:
                mcs, rbu, tbs = int(fields[1]), int(fields[2]), int(fields[3])
            except ValueError as exc:
                raise ConfigurationError(
                    f"{self.source} line {lineno}: {exc}") from None
            if tbs <= 0:
                raise ConfigurationError(
                    f"{self.source} line {lineno}: tbs_bits must be positive")
            self._entries[(tech, mcs, rbu)] = tbs

    def lookup(self, technology: Technology, mcs: int, rbu: int) -> int:
        if not 1 <= rbu <= technology.max_rbu:
            raise ConfigurationError(
                f"rbu={rbu} out of range 1..{technology.max_rbu} "
                f"for {technology.value}")
        try:
            return self._entries[(technology, mcs, rbu)]
        except KeyError:
            raise ConfigurationError(
                f"no TBS entry for ({technology.value}, mcs={mcs}, rbu={rbu}) "
                f"in {self.source} version {self.version}") from None

    def mcs_range(self, technology: Technology) -> list[int]:
        return sorted({m for (t, m, _r) in self._entries if t is technology})


class CoverageTable:
    """MCL threshold -> coverage class (MCS + repetition counts)."""

    def __init__(self, source: str | Path = "coverage_map.csv"):
        self.source = str(source)
        self.version, rows = _read_table(source)
        tiers: dict[Technology, list[tuple[float, int, int, int, int]]] = {}
        for lineno, fields in rows:
            if len(fields) != 6:
                raise ConfigurationError(
                    f"{self.source} line {lineno}: expected "
                    f"tech,mcl_db,mcs,rldc,rlds,rlus")
            tech = _parse_tech(fields[0], self.source, lineno)
            try:
                mcl = float(fields[1])
                mcs, rldc, rlds, rlus = (int(f) for f in fields[2:])
            except ValueError as exc:
                raise ConfigurationError(
                    f"{self.source} line {lineno}: {exc}") from None
            tiers.setdefault(tech, []).append((mcl, mcs, rldc, rlds, rlus))
        self._classes: dict[Technology, list[CoverageClass]] = {}
        for tech, rows_ in tiers.items():
            rows_.sort(key=lambda r: r[0])
            if len(rows_) != len(_TIER_NAMES):
                raise ConfigurationError(
                    f"{self.source}: {tech.value} needs exactly "
                    f"{len(_TIER_NAMES)} tiers, got {len(rows_)}")
            classes = [CoverageClass(name, *row)
                       for name, row in zip(_TIER_NAMES, rows_)]
            for lo, hi in zip(classes, classes[1:]):
                if lo.mcs < hi.mcs or lo.rlds > hi.rlds or lo.rlus > hi.rlus \
                        or lo.rldc > hi.rldc:
                    raise ConfigurationError(
                        f"{self.source}: {tech.value} tiers must have "
                        "nonincreasing MCS and nondecreasing repetitions")
            self._classes[tech] = classes

    def coverage_for_mcl(self, technology: Technology,
                         mcl_db: float) -> CoverageClass:
        classes = self._classes[technology]
        for cls in classes:
            if mcl_db <= cls.mcl_db:
                return cls
        raise OutOfCoverageError(
            f"MCL {mcl_db:.1f} dB exceeds the {technology.value} table "
            f"maximum of {classes[-1].mcl_db:.1f} dB")

    def by_name(self, technology: Technology,
                name: CoverageName) -> CoverageClass:
        for cls in self._classes[technology]:
            if cls.name is name:
                return cls
        raise ConfigurationError(f"no {name.value} tier for {technology.value}")


@dataclass(frozen=True)
class BlerCurve:
    sinr50_db: float
    slope_db: float


class BlerTable:
    """Per-MCS logistic BLER curve parameters."""

    def __init__(self, source: str | Path = "bler_curves.csv"):
        self.source = str(source)
        self.version, rows = _read_table(source)
        self._curves: dict[tuple[Technology, int], BlerCurve] = {}
        for lineno, fields in rows:
            if len(fields) != 4:
                raise ConfigurationError(
                    f"{self.source} line {lineno}: expected "
                    "tech,mcs,sinr50_db,slope_db")
            tech = _parse_tech(fields[0], self.source, lineno)
            try:
                mcs = int(fields[1])
                curve = BlerCurve(float(fields[2]), float(fields[3]))
            except ValueError as exc:
                raise ConfigurationError(
                    f"{self.source} line {lineno}: {exc}") from None
            if curve.slope_db <= 0:
                raise ConfigurationError(
                    f"{self.source} line {lineno}: slope must be positive")
            self._curves[(tech, mcs)] = curve

    def curve(self, technology: Technology, mcs: int) -> BlerCurve:
        try:
            return self._curves[(technology, mcs)]
        except KeyError:
            raise ConfigurationError(
                f"no BLER curve for ({technology.value}, mcs={mcs})"
            ) from None


_DEFAULT_TBS: TbsTable | None = None
_DEFAULT_COVERAGE: CoverageTable | None = None
_DEFAULT_BLER: BlerTable | None = None


def default_tbs_table() -> TbsTable:
    global _DEFAULT_TBS
    if _DEFAULT_TBS is None:
        _DEFAULT_TBS = TbsTable()
    return _DEFAULT_TBS


def default_coverage_table() -> CoverageTable:
    global _DEFAULT_COVERAGE
    if _DEFAULT_COVERAGE is None:
        _DEFAULT_COVERAGE = CoverageTable()
    return _DEFAULT_COVERAGE


def default_bler_table() -> BlerTable:
    global _DEFAULT_BLER
    if _DEFAULT_BLER is None:
        _DEFAULT_BLER = BlerTable()
    return _DEFAULT_BLER


def tbs_lookup(technology: Technology, mcs: int, rbu: int,
               table: TbsTable | None = None) -> int:
    """Transport block size in bits for (technology, mcs, rbu)."""
    return (table or default_tbs_table()).lookup(technology, mcs, rbu)


def coverage_for_mcl(technology: Technology, mcl_db: float,
                     table: CoverageTable | None = None) -> CoverageClass:
    """Coverage class whose MCL threshold is the smallest one >= mcl_db."""
    return (table or default_coverage_table()).coverage_for_mcl(
        technology, mcl_db)


def make_link_params(technology: Technology, coverage: CoverageClass,
                     rbu: int | None = None,
                     timings: ChannelTimings | None = None,
                     tbs_table: TbsTable | None = None) -> LinkParams:
    """Assemble the full per-block link configuration for a coverage class."""
    rbu = DEFAULT_RBU[technology] if rbu is None else rbu
    t = timings or DEFAULT_TIMINGS[technology]
    tbs = tbs_lookup(technology, coverage.mcs, rbu, tbs_table)
    return LinkParams(
        mcs=coverage.mcs, rbu=rbu, tbs_bits=tbs,
        rldc=coverage.rldc, rlds=coverage.rlds, rlus=coverage.rlus,
        t_pdcch=t.t_pdcch, t_pdsch=t.t_pdsch, t_pusch=t.t_pusch,
        t_d=t.t_d, t_dus=t.t_dus, t_uds=t.t_uds,
        t_ulack=t.t_ulack, t_dlack=t.t_dlack)
