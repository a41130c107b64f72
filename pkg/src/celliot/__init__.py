"""eMTC / NB-IoT energy, latency and scalability toolkit.

Closed-form link and cell models, a sleep-schedule optimizer, battery
lifetime estimation and a deterministic discrete-event cell simulator,
plus a CLI (``celliot``) that runs named experiment sweeps.
"""

__version__ = "0.1.0"

from .types import (CelliotError, ChannelTimings, ClockModel,  # noqa: F401
                    ConfigurationError, CoverageClass, CoverageName,
                    DutyCycleConfig, DutyCycleMode, LinkParams,
                    OutOfCoverageError, PowerProfile, Technology,
                    ValidationError)
from .tables import (coverage_for_mcl, make_link_params,  # noqa: F401
                     tbs_lookup)
from .power import (oracle_schedule, plan_sleep_schedule,  # noqa: F401
                    schedule_energy, unoptimized_schedule)
from .analytics import (CellConfig, Direction, delay_ue,  # noqa: F401
                        max_ue, tl_downlink, tl_uplink, total_cell_delay)
from .lifetime import (battery_lifetime, lifetime_result,  # noqa: F401
                       reporting_cycle_energy)
from .scenario import Scenario, parse_scenario  # noqa: F401
