"""Deterministic discrete-event engine driving a scheduler.

Events process in non-decreasing time; at equal timestamps expiries run
before arrivals, and preemptions (which only ever happen as part of an
arrival's commit) are logged after their arrival.  Everything is driven
by seeded RNGs, so a scenario plus a seed reproduces byte-identical
reports.
"""

import csv
import heapq
import json
import random
from dataclasses import dataclass

from .cluster import Instance, InstanceKind
from .reaper import COST_FUNCTIONS, terminate
from .scenario import GeneratedWorkload, ReplayWorkload, build_cluster
from .scheduler import (Request, schedule_baseline, schedule_preemptible_aware,
                        schedule_retry)
from .weighers import default_weighers, make_weigher

# tie order at equal timestamps; preemptions are never queued, the
# constant exists so log entries sort consistently with the queue
EXPIRY_ORDER = 0
ARRIVAL_ORDER = 1
PREEMPTION_ORDER = 2

DEFAULT_MAX_EVENTS = 1_000_000

__all__ = [
    "DEFAULT_MAX_EVENTS",
    "RunReport",
    "generate_workload",
    "render_snapshot",
    "run",
    "write_terminations_csv",
]


def generate_workload(seed, params, catalog, start_time=0):
    """Endless request stream; deterministic for a given seed.

    Yields (request, duration_min) pairs.  Per request the RNG draws, in
    order: the arrival gap (poisson only), the kind, the flavor, then
    the duration, which for the exponential distribution resamples until
    it lands inside the configured range.
    """
    rng = random.Random(seed)
    names = list(params.flavors) if params.flavors else list(catalog)
    duration = params.duration
    arrival = params.arrival
    clock = float(start_time)
    n = 0
    while True:
        n += 1
        if arrival.process == "poisson":
            clock += rng.expovariate(arrival.rate)
        else:
            clock += arrival.interval
        if rng.random() < params.preemptible_fraction:
            kind = InstanceKind.PREEMPTIBLE
        else:
            kind = InstanceKind.NORMAL
        flavor = catalog[rng.choice(names)]
        if duration.dist == "fixed":
            minutes = duration.minutes
        else:
            while True:
                sample = duration.low + rng.expovariate(1.0 / duration.mean)
                if sample <= duration.high:
                    break
            minutes = int(round(sample))
        request = Request("req-%06d" % n, flavor, kind,
                          arrival_time=int(round(clock)))
        yield request, minutes


@dataclass
class RunReport:
    label: str
    scheduler: str
    seed: int
    deterministic_ties: bool
    clock_start: int
    clock_end: int
    metrics: dict
    events: list
    snapshots: list
    terminations: list

    def to_dict(self):
        return {
            "label": self.label,
            "scheduler": self.scheduler,
            "seed": self.seed,
            "deterministic_ties": self.deterministic_ties,
            "clock_start": self.clock_start,
            "clock_end": self.clock_end,
            "metrics": self.metrics,
            "events": self.events,
            "snapshots": self.snapshots,
            "terminations": self.terminations,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @property
    def replay_outcome(self):
        """Outcome dict of the first arrival, for single-request runs."""
        for event in self.events:
            if event["kind"] == "arrival":
                return event["outcome"]
        return None


def write_terminations_csv(report, fh):
    writer = csv.writer(fh)
    writer.writerow(["time", "instance_id", "host", "run_time_min", "cost"])
    for row in report.terminations:
        writer.writerow([row["time"], row["instance_id"], row["host"],
                         row["run_time_min"], repr(row["cost"])])


def _outcome_dict(placement):
    if placement is None:
        return {"failure": "NoValidHost"}
    return {
        "host": placement.host,
        "victims": list(placement.victims),
        "total_weight": placement.total_weight,
        "victim_cost": placement.victim_cost,
    }


def _capture_snapshot(cluster, request, outcome):
    hosts = []
    for host_id in cluster.host_ids():
        normal = []
        preemptible = []
        for inst in cluster.instances_on(host_id):
            entry = {
                "id": inst.id,
                "run_time_min": inst.run_time(cluster.clock),
                "flavor": inst.flavor.name,
            }
            if inst.kind is InstanceKind.NORMAL:
                normal.append(entry)
            else:
                preemptible.append(entry)
        hosts.append({"id": host_id, "normal": normal,
                      "preemptible": preemptible})
    return {
        "time": cluster.clock,
        "request": {"id": request.id, "flavor": request.flavor.name,
                    "kind": request.kind.value},
        "outcome": outcome,
        "hosts": hosts,
    }


def render_snapshot(snapshot):
    """Human-readable table of one snapshot; victims carry a * marker."""
    req = snapshot["request"]
    out = snapshot["outcome"]
    victims = set(out.get("victims", ()))
    lines = ["time: %s" % snapshot["time"],
             "request: %s (%s, %s)" % (req["id"], req["flavor"], req["kind"])]
    if "failure" in out:
        lines.append("outcome: %s" % out["failure"])
    else:
        lines.append("outcome: host=%s victims=%s cost=%s"
                     % (out["host"], ",".join(out["victims"]) or "-",
                        out["victim_cost"]))
    lines.append("")
    header = "%-10s %-12s %-12s %-5s %6s  %s" % (
        "host", "instance", "kind", "size", "time", "victim")
    lines.append(header)
    lines.append("-" * len(header))
    for host in snapshot["hosts"]:
        rows = ([(e, "normal") for e in host["normal"]]
                + [(e, "preemptible") for e in host["preemptible"]])
        for entry, kind in rows:
            marker = "*" if entry["id"] in victims else ""
            lines.append("%-10s %-12s %-12s %-5s %6d  %s" % (
                host["id"], entry["id"], kind,
                entry["flavor"][:1].upper(), entry["run_time_min"], marker))
    return "\n".join(lines) + "\n"


def _scheduler_call(name, weigher_specs, cost_fn):
    if weigher_specs is None:
        weighers = default_weighers(cost_fn)
    else:
        weighers = [make_weigher(n, m, cost_fn) for n, m in weigher_specs]
    if name == "baseline":
        def call(request, cluster, rng, ties):
            return schedule_baseline(request, cluster, weighers=weighers,
                                     rng=rng, deterministic_ties=ties)
    elif name == "preemptible_aware":
        def call(request, cluster, rng, ties):
            return schedule_preemptible_aware(
                request, cluster, weighers=weighers, cost_fn=cost_fn,
                rng=rng, deterministic_ties=ties)
    else:
        def call(request, cluster, rng, ties):
            return schedule_retry(request, cluster, weighers=weighers,
                                  cost_fn=cost_fn, rng=rng,
                                  deterministic_ties=ties)
    return call


def run(scenario, seed=None, deterministic_ties=None,
        max_events=DEFAULT_MAX_EVENTS, observer=None):
    """Execute a scenario and return its RunReport.

    seed and deterministic_ties override the scenario's own settings
    when given.  max_events caps the total processed events so that a
    stop rule which never triggers cannot loop forever.  observer, when
    set, is called as observer(cluster, event_dict) after every logged
    event; it is instrumentation for tests and never part of the report.
    """
    if seed is None:
        seed = scenario.seed if scenario.seed is not None else 0
    if deterministic_ties is None:
        deterministic_ties = scenario.deterministic_ties
    cost_fn = COST_FUNCTIONS[scenario.cost_fn]
    call = _scheduler_call(scenario.scheduler, scenario.weighers, cost_fn)
    cluster = build_cluster(scenario)
    clock_start = cluster.clock
    tie_rng = random.Random(seed)

    heap = []
    if isinstance(scenario.workload, ReplayWorkload):
        request = Request("req-000001", scenario.catalog[scenario.workload.flavor],
                          scenario.workload.kind, arrival_time=clock_start)
        heapq.heappush(heap, (clock_start, ARRIVAL_ORDER, request.id,
                              (request, None)))
        arrivals = None
    else:
        workload_seed = scenario.workload.seed
        if workload_seed is None:
            workload_seed = seed
        arrivals = generate_workload(workload_seed, scenario.workload,
                                     scenario.catalog, start_time=clock_start)
        request, duration = next(arrivals)
        heapq.heappush(heap, (request.arrival_time, ARRIVAL_ORDER, request.id,
                              (request, duration)))

    metrics = {
        "requests": 0,
        "normal_requests": 0,
        "preemptible_requests": 0,
        "placements": 0,
        "normal_failures": 0,
        "preemptible_failures": 0,
        "preemptions": 0,
        "expiries": 0,
    }
    events = []
    snapshots = []
    terminations = []
    stop = scenario.stop
    processed = 0
    halted = False

    def emit(entry):
        events.append(entry)
        if observer is not None:
            observer(cluster, entry)

    while heap and not halted:
        time, order, key, payload = heapq.heappop(heap)
        if stop.rule == "sim_time" and time > stop.minutes:
            break
        if processed >= max_events:
            raise RuntimeError(
                "event budget of %d exceeded; the stop rule never triggered"
                % max_events)
        processed += 1
        cluster.clock = time

        if order == EXPIRY_ORDER:
            if key not in cluster.instances:
                continue  # cancelled by an earlier preemption
            inst = cluster.remove(key)
            metrics["expiries"] += 1
            emit({"time": time, "kind": "expiry", "id": key,
                  "host": inst.host})
            continue

        request, duration = payload
        metrics["requests"] += 1
        if request.kind is InstanceKind.NORMAL:
            metrics["normal_requests"] += 1
        else:
            metrics["preemptible_requests"] += 1
        outcome = call(request, cluster, tie_rng, deterministic_ties)
        outcome_doc = _outcome_dict(outcome)
        triggered = (stop.rule == "first_normal_failure"
                     and request.kind is InstanceKind.NORMAL
                     and (outcome is None or outcome.victims))
        if triggered:
            snapshots.append(_capture_snapshot(cluster, request, outcome_doc))

        arrival_entry = {"time": time, "kind": "arrival", "id": request.id,
                         "flavor": request.flavor.name,
                         "request_kind": request.kind.value,
                         "outcome": outcome_doc}
        if outcome is None:
            if request.kind is InstanceKind.NORMAL:
                metrics["normal_failures"] += 1
            else:
                metrics["preemptible_failures"] += 1
            emit(arrival_entry)
        else:
            kill_events = ()
            if outcome.victims:
                kill_events = terminate(cluster, outcome.victims, cost_fn)
            cluster.place(Instance(request.id, request.flavor, request.kind,
                                   outcome.host, start_time=time,
                                   planned_duration=duration))
            metrics["placements"] += 1
            emit(arrival_entry)
            for kill in kill_events:
                metrics["preemptions"] += 1
                emit({"time": kill.time, "kind": "preemption",
                      "id": kill.instance_id, "host": kill.host,
                      "run_time_min": kill.run_time_min, "cost": kill.cost})
                terminations.append({
                    "time": kill.time, "instance_id": kill.instance_id,
                    "host": kill.host, "run_time_min": kill.run_time_min,
                    "cost": kill.cost})
            if duration is not None:
                heapq.heappush(heap, (time + duration, EXPIRY_ORDER,
                                      request.id, None))

        if triggered:
            halted = True
        elif stop.rule == "request_count" and metrics["requests"] >= stop.count:
            halted = True
        elif arrivals is not None:
            nxt, nxt_duration = next(arrivals)
            heapq.heappush(heap, (nxt.arrival_time, ARRIVAL_ORDER, nxt.id,
                                  (nxt, nxt_duration)))

    return RunReport(scenario.label, scenario.scheduler, seed,
                     deterministic_ties, clock_start, cluster.clock, metrics,
                     events, snapshots, terminations)
