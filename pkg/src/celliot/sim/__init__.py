"""Deterministic cell simulator: topology, link abstraction, engine."""

from .topology import (CityTopology, Environment, make_city,  # noqa: F401
                       path_loss, rem_grid, sinr_map)

_ENGINE_NAMES = ("Outcome", "SimReport", "build_ue_links",
                 "max_supported_ues", "run_simulation")


def __getattr__(name):
    # The engine imports the scenario schema, which imports the topology
    # enums from this package; loading it lazily breaks that cycle.
    if name in _ENGINE_NAMES:
        from . import engine
        return getattr(engine, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
