"""Host ranking: raw weigher functions and [0, 1] normalization.

A weigher maps (request, full host view) to a raw real weight.  Raw
weights are normalized across the candidate set, scaled by a per-weigher
multiplier and summed into a total weight per host.  Because
normalization is population-relative, totals are only meaningful for
the candidate list they were computed against.
"""

from dataclasses import dataclass
from typing import Callable

from .reaper import partial_hour_cost, select_victims

__all__ = [
    "WeigherSpec",
    "default_weighers",
    "eviction_cost_rank",
    "make_weigher",
    "normalize",
    "overcommit_rank",
    "period_rank",
    "total_weight",
    "total_weights",
]


@dataclass(frozen=True)
class WeigherSpec:
    name: str
    multiplier: float
    function: Callable


def normalize(raw_weights):
    """Affine rescale onto [0, 1]; the max maps to 1 and the min to 0.

    When every value is identical the rescale is undefined; all hosts
    get 0.0, which leaves the argmax unaffected and keeps totals
    bounded.
    """
    if not raw_weights:
        raise ValueError("cannot normalize an empty weight list")
    lo = min(raw_weights)
    hi = max(raw_weights)
    if lo == hi:
        return [0.0] * len(raw_weights)
    span = hi - lo
    return [(w - lo) / span for w in raw_weights]


def total_weights(request, views, weigher_specs):
    """Total weight per candidate view, in input order.

    Each weigher's raw values are computed across the whole candidate
    set first, normalized, scaled by the multiplier and accumulated.
    """
    if not views:
        raise ValueError("cannot weigh an empty candidate list")
    if not weigher_specs:
        raise ValueError("weigher list must be non-empty")
    totals = [0.0] * len(views)
    for spec in weigher_specs:
        raws = [float(spec.function(request, view)) for view in views]
        for i, scaled in enumerate(normalize(raws)):
            totals[i] += spec.multiplier * scaled
    return totals


def total_weight(view, request, weigher_specs, population=None):
    """Total weight of one view against a candidate population.

    The population defaults to just the view itself, which degenerates
    every weigher to 0.0; pass the full candidate list for meaningful
    ranking.
    """
    pop = list(population) if population is not None else [view]
    try:
        idx = pop.index(view)
    except ValueError:
        raise ValueError("view %r is not part of the population" % (view.host,))
    return total_weights(request, pop, weigher_specs)[idx]


def overcommit_rank(request, host_full_view):
    """-1 when the request does not fit the host's free resources, else 0.

    Fit is conjunctive across all resource dimensions, so a single short
    dimension marks the host as overcommitted.
    """
    if request.flavor.resources <= host_full_view.free:
        return 0.0
    return -1.0


def period_rank(request, host_full_view):
    """Minus the summed partial-hour remainders of resident preemptibles.

    Instances sitting exactly on an hour boundary contribute nothing;
    normal instances are ignored entirely.  Hosts whose preemptibles
    have consumed little of their current billing hour rank higher.
    """
    weight = 0
    for inst in host_full_view.resident_preemptibles:
        remainder = inst.run_time(host_full_view.now) % 60
        if remainder > 0:
            weight += remainder
    return -float(weight)


def eviction_cost_rank(cost_fn=partial_hour_cost):
    """Build a weigher returning minus the cheapest victim-set cost.

    Hosts that fit the request outright rank 0; hosts needing eviction
    rank by how much the cheapest feasible victim set would waste.  The
    candidate list must be pre-filtered so that every host can fit the
    request at least after evicting everything, as the schedulers
    guarantee; otherwise NoFeasibleVictims propagates.
    """
    def rank(request, host_full_view):
        return -select_victims(request, host_full_view, cost_fn).cost
    return rank


def default_weighers(cost_fn=partial_hour_cost):
    """Default stack: prefer hosts with room, then cheaper evictions.

    Hosts that fit the request keep rank 0 on both weighers while
    eviction hosts go negative, so free capacity always beats eviction;
    among eviction hosts the cheapest victim set wins.
    """
    return [
        WeigherSpec("overcommit", 1.0, overcommit_rank),
        WeigherSpec("eviction_cost", 1.0, eviction_cost_rank(cost_fn)),
    ]


def make_weigher(name, multiplier, cost_fn=partial_hour_cost):
    """Resolve a weigher by config name."""
    if name == "overcommit":
        function = overcommit_rank
    elif name == "period":
        function = period_rank
    elif name == "eviction_cost":
        function = eviction_cost_rank(cost_fn)
    else:
        raise ValueError(
            "unknown weigher %r; expected one of overcommit, period, "
            "eviction_cost" % name)
    return WeigherSpec(name, float(multiplier), function)
