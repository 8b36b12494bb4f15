"""Scheduling library for clusters that mix normal and preemptible instances.

The package models hosts under two capacity views (one counting every
resident, one ignoring preemptibles), selects cheapest victim sets when a
request only fits by evicting, and ships a deterministic event simulator
plus benchmarking helpers around those pieces.
"""

from .cluster import (DEFAULT_HOST_CAPACITY, CapacityView, Cluster, Flavor,
                      HostSpec, Instance, InstanceKind, ResourceVector,
                      ViewMode, default_flavors, default_host,
                      zero_disk_flavors)
from .errors import (CapacityExceeded, DuplicateInstance, NoFeasibleVictims,
                     ScenarioError, SchedulingError, UnknownHost,
                     UnknownInstance)
from .reaper import (KERNEL_BACKEND, TerminationEvent, VictimSelection,
                     oracle_select_victims, partial_hour_cost, select_victims,
                     terminate)
from .scenario import (ArrivalSpec, DurationSpec, GeneratedWorkload,
                       PreloadInstance, ReplayWorkload, Scenario, StopRule,
                       build_cluster, load_scenario, parse_scenario)
from .scheduler import (Placement, Request, resource_fit_filter,
                        schedule_baseline, schedule_preemptible_aware,
                        schedule_retry)
from .simulator import (RunReport, generate_workload, render_snapshot, run,
                        write_terminations_csv)
from .weighers import (WeigherSpec, default_weighers, eviction_cost_rank,
                       make_weigher, normalize, overcommit_rank, period_rank,
                       total_weight, total_weights)

__version__ = "0.1.0"

__all__ = [
    "ArrivalSpec",
    "CapacityExceeded",
    "CapacityView",
    "Cluster",
    "DEFAULT_HOST_CAPACITY",
    "DuplicateInstance",
    "DurationSpec",
    "Flavor",
    "GeneratedWorkload",
    "HostSpec",
    "Instance",
    "InstanceKind",
    "KERNEL_BACKEND",
    "NoFeasibleVictims",
    "Placement",
    "PreloadInstance",
    "ReplayWorkload",
    "Request",
    "ResourceVector",
    "RunReport",
    "Scenario",
    "ScenarioError",
    "SchedulingError",
    "StopRule",
    "TerminationEvent",
    "UnknownHost",
    "UnknownInstance",
    "VictimSelection",
    "ViewMode",
    "WeigherSpec",
    "build_cluster",
    "default_flavors",
    "default_host",
    "default_weighers",
    "eviction_cost_rank",
    "generate_workload",
    "load_scenario",
    "make_weigher",
    "normalize",
    "oracle_select_victims",
    "overcommit_rank",
    "parse_scenario",
    "partial_hour_cost",
    "period_rank",
    "render_snapshot",
    "resource_fit_filter",
    "run",
    "schedule_baseline",
    "schedule_preemptible_aware",
    "schedule_retry",
    "select_victims",
    "terminate",
    "total_weight",
    "total_weights",
    "write_terminations_csv",
    "zero_disk_flavors",
    "__version__",
]
