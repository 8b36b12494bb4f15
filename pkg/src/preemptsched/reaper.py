"""Victim selection: choosing which preemptible instances to terminate.

When a host must make room for a request, the cheapest feasible set of
its resident preemptible instances is selected.  The subset search runs
on a compiled kernel when the extension built, with a pure-Python twin
as fallback; set ``PREEMPTSCHED_PURE_PYTHON=1`` to force the fallback.
"""

import os
from dataclasses import dataclass
from itertools import combinations
from typing import Tuple

from .cluster import ZERO, InstanceKind, ResourceVector
from .errors import NoFeasibleVictims, UnknownInstance

if os.environ.get("PREEMPTSCHED_PURE_PYTHON", "0") not in ("", "0"):
    from ._victims_py import min_cost_subset as _min_cost_subset
    KERNEL_BACKEND = "python"
else:
    try:
        from ._victims_c import min_cost_subset as _min_cost_subset
        KERNEL_BACKEND = "c"
    except ImportError:
        from ._victims_py import min_cost_subset as _min_cost_subset
        KERNEL_BACKEND = "python"

# beyond this many resident preemptibles the exhaustive search gives way
# to a greedy pass, flagged on the result
EXHAUSTIVE_LIMIT = 20

__all__ = [
    "COST_FUNCTIONS",
    "EXHAUSTIVE_LIMIT",
    "KERNEL_BACKEND",
    "TerminationEvent",
    "VictimSelection",
    "oracle_select_victims",
    "partial_hour_cost",
    "select_victims",
    "terminate",
]


@dataclass(frozen=True)
class VictimSelection:
    """Outcome of a victim search on one host.

    victims: instance ids in ascending order.
    cost: summed per-instance cost of the set.
    freed: resources released by terminating the set.
    exact: False when the greedy fallback produced the set, in which
    case the cost is feasible but not necessarily minimal.
    """

    victims: Tuple[str, ...]
    cost: float
    freed: ResourceVector
    exact: bool = True


@dataclass(frozen=True)
class TerminationEvent:
    time: int
    instance_id: str
    host: str
    run_time_min: int
    cost: float


def partial_hour_cost(instance, now):
    """Minutes run past the last whole hour.

    Under one-hour billing periods this is the consumption a termination
    would leave unbilled, so cheaper victims sit closer to an hour
    boundary.  An instance at exactly a whole hour costs 0 and is the
    most attractive victim of all.
    """
    if instance.kind is not InstanceKind.PREEMPTIBLE:
        raise ValueError(
            "partial-hour cost is defined for preemptible instances only, "
            "got normal instance %r" % instance.id)
    return instance.run_time(now) % 60


COST_FUNCTIONS = {"partial_hour": partial_hour_cost}


def _deficit(request, view):
    need = request.flavor.resources
    free = view.free
    return (max(0, need.vcpus - free.vcpus),
            max(0, need.ram - free.ram),
            max(0, need.disk - free.disk))


def _item_columns(residents, now, cost_fn):
    vcpus, ram, disk, costs = [], [], [], []
    for inst in residents:
        res = inst.flavor.resources
        vcpus.append(res.vcpus)
        ram.append(res.ram)
        disk.append(res.disk)
        cost = float(cost_fn(inst, now))
        if cost < 0:
            raise ValueError(
                "cost function returned %r for %r; victim costs must be "
                "non-negative" % (cost, inst.id))
        costs.append(cost)
    return vcpus, ram, disk, costs


def _greedy_subset(dv, dr, dd, vcpus, ram, disk, costs):
    order = sorted(range(len(costs)), key=lambda i: (costs[i], i))
    chosen = []
    fv = fr = fd = 0
    for i in order:
        if fv >= dv and fr >= dr and fd >= dd:
            break
        chosen.append(i)
        fv += vcpus[i]
        fr += ram[i]
        fd += disk[i]
    if fv < dv or fr < dr or fd < dd:
        return None
    chosen.sort()
    total = 0.0
    for i in chosen:
        total += costs[i]
    return tuple(chosen), total


def select_victims(request, host_full_view, cost_fn=partial_hour_cost):
    """Cheapest set of resident preemptibles that makes the request fit.

    host_full_view must be a full-accounting view.  Feasibility means
    existing free resources plus the freed set cover the request; the
    empty set is returned when the host already fits.  Ties resolve to
    fewer victims, then the lexicographically smallest id list.  Raises
    NoFeasibleVictims when even terminating everything is not enough;
    callers filter hosts so that this cannot happen in the pipelines.
    """
    dv, dr, dd = _deficit(request, host_full_view)
    if dv == 0 and dr == 0 and dd == 0:
        return VictimSelection((), 0.0, ZERO, True)
    residents = list(host_full_view.resident_preemptibles)
    vcpus, ram, disk, costs = _item_columns(
        residents, host_full_view.now, cost_fn)
    if len(residents) <= EXHAUSTIVE_LIMIT:
        found = _min_cost_subset(dv, dr, dd, vcpus, ram, disk, costs)
        exact = True
    else:
        found = _greedy_subset(dv, dr, dd, vcpus, ram, disk, costs)
        exact = False
    if found is None:
        raise NoFeasibleVictims(
            "host %r cannot fit %r even after terminating every resident "
            "preemptible instance" % (host_full_view.host, request.flavor.name))
    indices, cost = found
    freed = ZERO
    for i in indices:
        freed = freed + residents[i].flavor.resources
    return VictimSelection(
        tuple(residents[i].id for i in indices), cost, freed, exact)


def oracle_select_victims(request, host_full_view, cost_fn=partial_hour_cost):
    """Reference power-set scan with the same contract as select_victims.

    Deliberately shares no code with the search kernel; it exists to
    define ground truth in tests.  Limited to hosts with at most
    EXHAUSTIVE_LIMIT resident preemptibles.
    """
    residents = list(host_full_view.resident_preemptibles)
    if len(residents) > EXHAUSTIVE_LIMIT:
        raise ValueError(
            "oracle limited to %d resident preemptibles, host %r has %d"
            % (EXHAUSTIVE_LIMIT, host_full_view.host, len(residents)))
    need = request.flavor.resources
    base = host_full_view.free
    now = host_full_view.now
    best_key = None
    best_freed = None
    for size in range(len(residents) + 1):
        for combo in combinations(residents, size):
            freed = ZERO
            for inst in combo:
                freed = freed + inst.flavor.resources
            if not need <= base + freed:
                continue
            total = 0.0
            for inst in combo:
                cost = float(cost_fn(inst, now))
                if cost < 0:
                    raise ValueError(
                        "cost function returned %r for %r; victim costs "
                        "must be non-negative" % (cost, inst.id))
                total += cost
            key = (total, size, tuple(inst.id for inst in combo))
            if best_key is None or key < best_key:
                best_key = key
                best_freed = freed
    if best_key is None:
        raise NoFeasibleVictims(
            "host %r cannot fit %r even after terminating every resident "
            "preemptible instance" % (host_full_view.host, request.flavor.name))
    cost, _, ids = best_key
    return VictimSelection(ids, cost, best_freed, True)


def terminate(cluster, victims, cost_fn=partial_hour_cost):
    """Remove the given preemptible instances from the cluster.

    Validates the whole set before touching anything, then removes each
    victim and returns one TerminationEvent per removal, in the order
    given.
    """
    now = cluster.clock
    for vid in victims:
        inst = cluster.instances.get(vid)
        if inst is None:
            raise UnknownInstance("cannot terminate unknown instance %r" % vid)
        if inst.kind is not InstanceKind.PREEMPTIBLE:
            raise ValueError(
                "refusing to terminate normal instance %r" % vid)
    events = []
    for vid in victims:
        inst = cluster.instances[vid]
        run_time = inst.run_time(now)
        cost = float(cost_fn(inst, now))
        cluster.remove(vid)
        events.append(TerminationEvent(now, vid, inst.host, run_time, cost))
    return events
