"""Synthetic city radio map: eNB grid, UE placement, path loss and SINR.

The propagation model is a single log-distance family with per-environment
exponents plus a one-off wall loss for indoor UEs; it replaces composite
empirical models on purpose so every number here is reproducible from the
closed form below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..types import ValidationError


class Environment(Enum):
    URBAN = "URBAN"
    SUBURBAN = "SUBURBAN"
    OPENAREA = "OPENAREA"


DEFAULT_EXPONENTS = {
    Environment.URBAN: 3.8,
    Environment.SUBURBAN: 3.2,
    Environment.OPENAREA: 2.8,
}

#: reference loss at 1 m, dB
DEFAULT_PL0_DB = 30.0
DEFAULT_WALL_LOSS_DB = 15.0
THERMAL_NOISE_DBM_HZ = -174.0


def path_loss(env: Environment, distance_m: float, indoor: bool,
              wall_loss_db: float = DEFAULT_WALL_LOSS_DB,
              pl0_db: float = DEFAULT_PL0_DB,
              exponents: dict[Environment, float] | None = None) -> float:
    """Log-distance path loss in dB: pl0 + 10*n*log10(d) (+ wall)."""
    if distance_m <= 0:
        raise ValidationError("distance must be positive")
    n = (exponents or DEFAULT_EXPONENTS)[env]
    loss = pl0_db + 10.0 * n * math.log10(distance_m)
    if indoor:
        loss += wall_loss_db
    return loss


def noise_dbm(bandwidth_hz: float, noise_figure_db: float) -> float:
    return THERMAL_NOISE_DBM_HZ + 10.0 * math.log10(bandwidth_hz) \
        + noise_figure_db


@dataclass(frozen=True)
class EnbSite:
    index: int
    x: float
    y: float
    tx_power_dbm: float
    band: int
    sectors: int = 3


@dataclass(frozen=True)
class UePlacement:
    index: int
    x: float
    y: float
    indoor: bool
    environment: Environment


@dataclass(frozen=True)
class CityTopology:
    sites: tuple[EnbSite, ...]
    ues: tuple[UePlacement, ...]
    wall_loss_db: float
    pl0_db: float
    exponents: dict[Environment, float]

    def link_loss(self, ue: UePlacement, site: EnbSite) -> float:
        d = math.hypot(ue.x - site.x, ue.y - site.y)
        return path_loss(ue.environment, max(d, 1.0), ue.indoor,
                         self.wall_loss_db, self.pl0_db, self.exponents)

    def serving_site(self, ue: UePlacement) -> EnbSite:
        """Cell with maximum received power (equal tx power -> least loss)."""
        return min(self.sites,
                   key=lambda s: (self.link_loss(ue, s) - s.tx_power_dbm,
                                  s.index))

    def coupling_loss(self, ue: UePlacement) -> float:
        site = self.serving_site(ue)
        return self.link_loss(ue, site)


def make_city(n_sites: int = 7, inter_site_m: float = 1400.0,
              city_radius_m: float = 1500.0, ue_count: int = 300,
              indoor_ratio: float = 0.5,
              urban_radius_m: float | None = None,
              suburban_radius_m: float | None = None,
              enb_tx_dbm: float = 46.0,
              wall_loss_db: float = DEFAULT_WALL_LOSS_DB,
              pl0_db: float = DEFAULT_PL0_DB,
              exponents: dict[Environment, float] | None = None,
              seed: int = 0) -> CityTopology:
    """Hexagonal 7-site deployment with uniformly placed UEs.

    Environment is assigned by distance from the city centre (urban core,
    suburban ring, open area outside); by default the whole city is urban.
    Indoor flags go to the first floor(ratio * N) UEs so that sweeping the
    indoor ratio re-flags UEs without moving them.
    """
    if not 1 <= n_sites <= 7:
        raise ValidationError("n_sites must be in 1..7")
    if not 0.0 <= indoor_ratio <= 1.0:
        raise ValidationError("indoor_ratio must be in [0, 1]")
    positions = [(0.0, 0.0)]
    for i in range(6):
        ang = math.pi / 3.0 * i
        positions.append((inter_site_m * math.cos(ang),
                          inter_site_m * math.sin(ang)))
    sites = tuple(EnbSite(i, x, y, enb_tx_dbm, band=i % 3)
                  for i, (x, y) in enumerate(positions[:n_sites]))

    rng = np.random.default_rng(seed)
    r = city_radius_m * np.sqrt(rng.uniform(0.0, 1.0, ue_count))
    theta = rng.uniform(0.0, 2.0 * math.pi, ue_count)
    xs, ys = r * np.cos(theta), r * np.sin(theta)

    n_indoor = int(math.floor(indoor_ratio * ue_count))
    urban_r = city_radius_m if urban_radius_m is None else urban_radius_m
    suburb_r = city_radius_m if suburban_radius_m is None else suburban_radius_m
    ues = []
    for i in range(ue_count):
        dist = float(r[i])
        if dist <= urban_r:
            env = Environment.URBAN
        elif dist <= suburb_r:
            env = Environment.SUBURBAN
        else:
            env = Environment.OPENAREA
        ues.append(UePlacement(i, float(xs[i]), float(ys[i]),
                               indoor=i < n_indoor, environment=env))
    return CityTopology(sites=sites, ues=tuple(ues),
                        wall_loss_db=wall_loss_db, pl0_db=pl0_db,
                        exponents=exponents or dict(DEFAULT_EXPONENTS))


def reflag_indoor(topology: CityTopology, indoor_ratio: float) -> CityTopology:
    """Same city, new indoor ratio: UEs are re-flagged, never moved."""
    n_indoor = int(math.floor(indoor_ratio * len(topology.ues)))
    ues = tuple(UePlacement(u.index, u.x, u.y, u.index < n_indoor,
                            u.environment) for u in topology.ues)
    return CityTopology(topology.sites, ues, topology.wall_loss_db,
                        topology.pl0_db, topology.exponents)


def subset(topology: CityTopology, count: int,
           indoor_ratio: float) -> CityTopology:
    """First ``count`` UEs of the city, re-flagged to keep the indoor ratio.

    Capacity probes shrink the population without moving anyone, so the
    analytical capacity computed on the full city applies to every probe.
    """
    if not 1 <= count <= len(topology.ues):
        raise ValidationError(
            f"count must be in 1..{len(topology.ues)}, got {count}")
    n_indoor = int(math.floor(indoor_ratio * count))
    ues = tuple(UePlacement(u.index, u.x, u.y, u.index < n_indoor,
                            u.environment) for u in topology.ues[:count])
    return CityTopology(topology.sites, ues, topology.wall_loss_db,
                        topology.pl0_db, topology.exponents)


def _sinr_at(topology: CityTopology, ue: UePlacement,
             noise_dbm_val: float) -> float:
    """Downlink SINR with hard FFR: only same-band sites interfere."""
    losses = {s: self_loss for s, self_loss in
              ((s, topology.link_loss(ue, s)) for s in topology.sites)}
    serving = topology.serving_site(ue)
    p_serv = serving.tx_power_dbm - losses[serving]
    interference_mw = sum(
        10.0 ** ((s.tx_power_dbm - losses[s]) / 10.0)
        for s in topology.sites
        if s.index != serving.index and s.band == serving.band)
    denom_mw = interference_mw + 10.0 ** (noise_dbm_val / 10.0)
    return p_serv - 10.0 * math.log10(denom_mw)


def sinr_map(topology: CityTopology, bandwidth_hz: float,
             noise_figure_db: float = 5.0) -> list[float]:
    """Per-UE downlink SINR in dB."""
    noise = noise_dbm(bandwidth_hz, noise_figure_db)
    return [_sinr_at(topology, ue, noise) for ue in topology.ues]


def rem_grid(topology: CityTopology, bandwidth_hz: float,
             extent_m: float, n_points: int = 50,
             noise_figure_db: float = 5.0,
             environment: Environment = Environment.URBAN) -> np.ndarray:
    """Radio environment map: outdoor SINR over a square grid, dB matrix."""
    noise = noise_dbm(bandwidth_hz, noise_figure_db)
    axis = np.linspace(-extent_m, extent_m, n_points)
    grid = np.empty((n_points, n_points))
    for iy, y in enumerate(axis):
        for ix, x in enumerate(axis):
            probe = UePlacement(-1, float(x), float(y), indoor=False,
                                environment=environment)
            grid[iy, ix] = _sinr_at(topology, probe, noise)
    return grid
