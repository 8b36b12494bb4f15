"""The three scheduling pipelines: baseline, eviction-aware, and retry.

All three share the filter-then-weigh structure.  The baseline knows
nothing about preemptible instances and sees full accounting only.  The
eviction-aware pipeline filters normal requests against normal-only
accounting, so capacity reachable by eviction counts as free, and picks
victims for the winner in the same pass.  The retry pipeline reaches the
same outcomes by running the baseline first and falling back to the
aware pass after a failure, at the price of the extra pass.
"""

import random
from dataclasses import dataclass
from typing import Optional, Tuple

from .cluster import InstanceKind, ViewMode
from .reaper import partial_hour_cost, select_victims
from .weighers import default_weighers, total_weights

__all__ = [
    "DEFAULT_FILTERS",
    "Placement",
    "Request",
    "resource_fit_filter",
    "schedule_baseline",
    "schedule_preemptible_aware",
    "schedule_retry",
]


@dataclass(frozen=True)
class Request:
    id: str
    flavor: object
    kind: InstanceKind
    arrival_time: int = 0


@dataclass(frozen=True)
class Placement:
    """A scheduling decision: the host, and what must die to make room.

    victims lists resident preemptible instances to terminate before the
    request fits; empty when the host has room already.  Schedulers
    return None instead of a Placement when no host passes filtering.
    """

    host: str
    victims: Tuple[str, ...]
    total_weight: float
    victim_cost: float = 0.0


def resource_fit_filter(request, capacity_view):
    """True when the request fits the view's free resources on every
    dimension."""
    return request.flavor.resources <= capacity_view.free


DEFAULT_FILTERS = (resource_fit_filter,)


def _passes(request, view, filters):
    return all(f(request, view) for f in filters)


def _pick(candidates, totals, rng, deterministic_ties):
    best = max(totals)
    tied = [i for i, w in enumerate(totals) if w == best]
    if len(tied) == 1:
        return tied[0]
    if deterministic_ties:
        return min(tied, key=lambda i: candidates[i].host)
    if rng is None:
        rng = random.Random()
    return rng.choice(tied)


def schedule_baseline(request, cluster, filters=None, weighers=None,
                      rng=None, deterministic_ties=False):
    """Filter and weigh on full accounting; never evicts anything.

    Returns a Placement with no victims, or None when no host fits.
    Ties on total weight break uniformly at random via the supplied RNG
    unless deterministic_ties picks the lowest host id instead.
    """
    filters = DEFAULT_FILTERS if filters is None else filters
    weighers = default_weighers() if weighers is None else weighers
    candidates = []
    for host_id in cluster.host_ids():
        view = cluster.view(host_id, ViewMode.FULL)
        if _passes(request, view, filters):
            candidates.append(view)
    if not candidates:
        return None
    totals = total_weights(request, candidates, weighers)
    idx = _pick(candidates, totals, rng, deterministic_ties)
    return Placement(candidates[idx].host, (), totals[idx], 0.0)


def schedule_preemptible_aware(request, cluster, filters=None, weighers=None,
                               cost_fn=partial_hour_cost, rng=None,
                               deterministic_ties=False):
    """Single-pass pipeline that treats evictable capacity as free.

    Normal requests filter against normal-only views, so a host full of
    preemptibles still qualifies; preemptible requests filter against
    full views and can never displace anything.  Weighing always runs on
    full views.  If the winner lacks room under full accounting, the
    cheapest feasible victim set rides along on the Placement.
    """
    filters = DEFAULT_FILTERS if filters is None else filters
    weighers = default_weighers(cost_fn) if weighers is None else weighers
    if request.kind is InstanceKind.PREEMPTIBLE:
        filter_mode = ViewMode.FULL
    else:
        filter_mode = ViewMode.NORMAL_ONLY
    candidates = []
    for host_id in cluster.host_ids():
        filter_view = cluster.view(host_id, filter_mode)
        if _passes(request, filter_view, filters):
            if filter_mode is ViewMode.FULL:
                candidates.append(filter_view)
            else:
                candidates.append(cluster.view(host_id, ViewMode.FULL))
    if not candidates:
        return None
    totals = total_weights(request, candidates, weighers)
    idx = _pick(candidates, totals, rng, deterministic_ties)
    winner = candidates[idx]
    if request.flavor.resources <= winner.free:
        return Placement(winner.host, (), totals[idx], 0.0)
    # the normal-only filter admitted this host, so a feasible victim
    # set must exist; select_victims raising here means a broken filter
    selection = select_victims(request, winner, cost_fn)
    return Placement(winner.host, selection.victims, totals[idx],
                     selection.cost)


def schedule_retry(request, cluster, filters=None, weighers=None,
                   cost_fn=partial_hour_cost, rng=None,
                   deterministic_ties=False):
    """Two-pass baseline: normal scheduling, then eviction on failure.

    Pass one is the plain baseline over full views.  Only a failed
    normal request earns a second pass, which applies the same decision
    contract as the aware pipeline; preemptible requests fail outright.
    Outcomes match schedule_preemptible_aware, only the latency differs.
    """
    weighers = default_weighers(cost_fn) if weighers is None else weighers
    outcome = schedule_baseline(request, cluster, filters, weighers, rng,
                                deterministic_ties)
    if outcome is not None or request.kind is InstanceKind.PREEMPTIBLE:
        return outcome
    return schedule_preemptible_aware(request, cluster, filters, weighers,
                                      cost_fn, rng, deterministic_ties)
