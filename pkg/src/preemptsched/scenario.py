"""Scenario documents: a reproducible world in one JSON file.

A scenario names the hosts, the flavor catalog, any pre-existing
instances with their run times, and either a single replayed request or
a generated workload, plus the scheduler, weigher stack, stop rule and
seed.  Parsing is strict: unknown or malformed fields raise
ScenarioError naming the offending field.
"""

import json
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .cluster import Cluster, Flavor, HostSpec, Instance, InstanceKind, ResourceVector
from .errors import ScenarioError, SchedulingError
from .reaper import COST_FUNCTIONS

SCHEDULERS = ("baseline", "preemptible_aware", "retry")
STOP_RULES = ("first_normal_failure", "request_count", "sim_time")
WEIGHER_NAMES = ("overcommit", "period", "eviction_cost")

__all__ = [
    "ArrivalSpec",
    "DurationSpec",
    "GeneratedWorkload",
    "PreloadInstance",
    "ReplayWorkload",
    "SCHEDULERS",
    "Scenario",
    "StopRule",
    "build_cluster",
    "load_scenario",
    "parse_scenario",
]


@dataclass(frozen=True)
class PreloadInstance:
    id: str
    host: str
    flavor: str
    kind: InstanceKind
    run_time_min: int


@dataclass(frozen=True)
class ReplayWorkload:
    flavor: str
    kind: InstanceKind


@dataclass(frozen=True)
class DurationSpec:
    dist: str = "exponential"
    mean: float = 60.0
    low: int = 10
    high: int = 300
    minutes: int = 60


@dataclass(frozen=True)
class ArrivalSpec:
    process: str = "fixed"
    interval: int = 1
    rate: float = 1.0


@dataclass(frozen=True)
class GeneratedWorkload:
    seed: Optional[int] = None
    preemptible_fraction: float = 0.5
    duration: DurationSpec = field(default_factory=DurationSpec)
    arrival: ArrivalSpec = field(default_factory=ArrivalSpec)
    flavors: Optional[Tuple[str, ...]] = None


@dataclass(frozen=True)
class StopRule:
    rule: str = "first_normal_failure"
    count: Optional[int] = None
    minutes: Optional[int] = None


@dataclass
class Scenario:
    label: str
    hosts: list
    catalog: dict
    preload: list
    workload: object
    scheduler: str = "preemptible_aware"
    stop: StopRule = field(default_factory=StopRule)
    weighers: Optional[list] = None
    cost_fn: str = "partial_hour"
    seed: Optional[int] = None
    deterministic_ties: bool = False
    expected: Optional[dict] = None


def _fail(source, message):
    raise ScenarioError("%s: %s" % (source, message))


def _typed(doc, key, types, source, where, required=True, default=None):
    if key not in doc:
        if required:
            _fail(source, "%s is missing field '%s'" % (where, key))
        return default
    value = doc[key]
    if not isinstance(value, types) or isinstance(value, bool) and bool not in (
            types if isinstance(types, tuple) else (types,)):
        _fail(source, "%s field '%s' has the wrong type (%r)"
              % (where, key, value))
    return value


def _reject_unknown(doc, allowed, source, where):
    for key in doc:
        if key not in allowed:
            _fail(source, "%s has unknown field '%s'" % (where, key))


def _parse_hosts(items, source):
    if not isinstance(items, list) or not items:
        _fail(source, "'hosts' must be a non-empty list")
    hosts = []
    seen = set()
    for i, item in enumerate(items):
        where = "hosts[%d]" % i
        if not isinstance(item, dict):
            _fail(source, "%s must be an object" % where)
        _reject_unknown(item, ("id", "vcpus", "ram_mb", "disk_gb"), source, where)
        host_id = _typed(item, "id", str, source, where)
        vcpus = _typed(item, "vcpus", int, source, where)
        ram = _typed(item, "ram_mb", int, source, where)
        disk = _typed(item, "disk_gb", int, source, where, required=False,
                      default=0)
        if host_id in seen:
            _fail(source, "duplicate host id %r" % host_id)
        seen.add(host_id)
        try:
            hosts.append(HostSpec(host_id, ResourceVector(vcpus, ram, disk)))
        except ValueError as exc:
            _fail(source, "%s: %s" % (where, exc))
    return hosts


def _parse_flavors(items, source):
    if not isinstance(items, list) or not items:
        _fail(source, "'flavors' must be a non-empty list")
    catalog = {}
    for i, item in enumerate(items):
        where = "flavors[%d]" % i
        if not isinstance(item, dict):
            _fail(source, "%s must be an object" % where)
        _reject_unknown(item, ("name", "vcpus", "ram_mb", "disk_gb"), source,
                        where)
        name = _typed(item, "name", str, source, where)
        vcpus = _typed(item, "vcpus", int, source, where)
        ram = _typed(item, "ram_mb", int, source, where)
        disk = _typed(item, "disk_gb", int, source, where, required=False,
                      default=0)
        if name in catalog:
            _fail(source, "duplicate flavor name %r" % name)
        try:
            catalog[name] = Flavor(name, vcpus, ram, disk)
        except ValueError as exc:
            _fail(source, "%s: %s" % (where, exc))
    return catalog


def _parse_kind(value, source, where):
    try:
        return InstanceKind(value)
    except ValueError:
        _fail(source, "%s field 'kind' must be 'normal' or 'preemptible', "
              "got %r" % (where, value))


def _parse_instances(items, hosts, catalog, source):
    if items is None:
        return []
    if not isinstance(items, list):
        _fail(source, "'instances' must be a list")
    host_ids = {h.id for h in hosts}
    preload = []
    seen = set()
    for i, item in enumerate(items):
        where = "instances[%d]" % i
        if not isinstance(item, dict):
            _fail(source, "%s must be an object" % where)
        _reject_unknown(item, ("id", "host", "flavor", "kind", "run_time_min"),
                        source, where)
        iid = _typed(item, "id", str, source, where)
        host = _typed(item, "host", str, source, where)
        flavor = _typed(item, "flavor", str, source, where)
        kind = _parse_kind(_typed(item, "kind", str, source, where), source,
                           where)
        run_time = _typed(item, "run_time_min", int, source, where)
        if iid in seen:
            _fail(source, "duplicate instance id %r" % iid)
        seen.add(iid)
        if host not in host_ids:
            _fail(source, "%s refers to unknown host %r" % (where, host))
        if flavor not in catalog:
            _fail(source, "%s refers to unknown flavor %r" % (where, flavor))
        if run_time < 0:
            _fail(source, "%s field 'run_time_min' must be >= 0" % where)
        preload.append(PreloadInstance(iid, host, flavor, kind, run_time))
    return preload


def _parse_duration(doc, source):
    if doc is None:
        return DurationSpec()
    where = "workload.duration"
    if not isinstance(doc, dict):
        _fail(source, "%s must be an object" % where)
    _reject_unknown(doc, ("dist", "mean", "min", "max", "minutes"), source,
                    where)
    dist = _typed(doc, "dist", str, source, where, required=False,
                  default="exponential")
    if dist == "exponential":
        mean = _typed(doc, "mean", (int, float), source, where,
                      required=False, default=60.0)
        low = _typed(doc, "min", int, source, where, required=False, default=10)
        high = _typed(doc, "max", int, source, where, required=False,
                      default=300)
        if mean <= 0:
            _fail(source, "%s field 'mean' must be > 0" % where)
        if low < 0 or high < low:
            _fail(source, "%s range [min, max] is invalid" % where)
        return DurationSpec("exponential", float(mean), low, high)
    if dist == "fixed":
        minutes = _typed(doc, "minutes", int, source, where)
        if minutes < 1:
            _fail(source, "%s field 'minutes' must be >= 1" % where)
        return DurationSpec(dist="fixed", minutes=minutes)
    _fail(source, "%s field 'dist' must be 'exponential' or 'fixed'" % where)


def _parse_arrival(doc, source):
    if doc is None:
        return ArrivalSpec()
    where = "workload.arrival"
    if not isinstance(doc, dict):
        _fail(source, "%s must be an object" % where)
    _reject_unknown(doc, ("process", "interval", "rate"), source, where)
    process = _typed(doc, "process", str, source, where, required=False,
                     default="fixed")
    if process == "fixed":
        interval = _typed(doc, "interval", int, source, where, required=False,
                          default=1)
        if interval < 1:
            _fail(source, "%s field 'interval' must be >= 1" % where)
        return ArrivalSpec("fixed", interval=interval)
    if process == "poisson":
        rate = _typed(doc, "rate", (int, float), source, where,
                      required=False, default=1.0)
        if rate <= 0:
            _fail(source, "%s field 'rate' must be > 0" % where)
        return ArrivalSpec("poisson", rate=float(rate))
    _fail(source, "%s field 'process' must be 'fixed' or 'poisson'" % where)


def _parse_workload(doc, catalog, source):
    where = "workload"
    if not isinstance(doc, dict):
        _fail(source, "'workload' must be an object")
    _reject_unknown(doc, ("seed", "preemptible_fraction", "duration",
                          "arrival", "flavors"), source, where)
    seed = _typed(doc, "seed", int, source, where, required=False)
    fraction = _typed(doc, "preemptible_fraction", (int, float), source,
                      where, required=False, default=0.5)
    if not 0 <= fraction <= 1:
        _fail(source, "%s field 'preemptible_fraction' must be in [0, 1]"
              % where)
    duration = _parse_duration(doc.get("duration"), source)
    arrival = _parse_arrival(doc.get("arrival"), source)
    flavors = None
    if "flavors" in doc:
        raw = doc["flavors"]
        if not isinstance(raw, list) or not raw:
            _fail(source, "%s field 'flavors' must be a non-empty list" % where)
        for name in raw:
            if name not in catalog:
                _fail(source, "%s refers to unknown flavor %r" % (where, name))
        flavors = tuple(raw)
    return GeneratedWorkload(seed, float(fraction), duration, arrival, flavors)


def _parse_request(doc, catalog, source):
    where = "request"
    if not isinstance(doc, dict):
        _fail(source, "'request' must be an object")
    _reject_unknown(doc, ("flavor", "kind"), source, where)
    flavor = _typed(doc, "flavor", str, source, where)
    kind = _parse_kind(_typed(doc, "kind", str, source, where), source, where)
    if flavor not in catalog:
        _fail(source, "%s refers to unknown flavor %r" % (where, flavor))
    return ReplayWorkload(flavor, kind)


def _parse_stop(doc, source):
    if doc is None:
        return StopRule()
    where = "stop"
    if not isinstance(doc, dict):
        _fail(source, "'stop' must be an object")
    _reject_unknown(doc, ("rule", "count", "minutes"), source, where)
    rule = _typed(doc, "rule", str, source, where)
    if rule not in STOP_RULES:
        _fail(source, "%s field 'rule' must be one of %s"
              % (where, ", ".join(STOP_RULES)))
    if rule == "request_count":
        count = _typed(doc, "count", int, source, where)
        if count < 1:
            _fail(source, "%s field 'count' must be >= 1" % where)
        return StopRule(rule, count=count)
    if rule == "sim_time":
        minutes = _typed(doc, "minutes", int, source, where)
        if minutes < 0:
            _fail(source, "%s field 'minutes' must be >= 0" % where)
        return StopRule(rule, minutes=minutes)
    return StopRule(rule)


def _parse_weighers(items, source):
    if items is None:
        return None
    if not isinstance(items, list) or not items:
        _fail(source, "'weighers' must be a non-empty list")
    specs = []
    for i, item in enumerate(items):
        where = "weighers[%d]" % i
        if not isinstance(item, dict):
            _fail(source, "%s must be an object" % where)
        _reject_unknown(item, ("name", "multiplier"), source, where)
        name = _typed(item, "name", str, source, where)
        if name not in WEIGHER_NAMES:
            _fail(source, "%s field 'name' must be one of %s"
                  % (where, ", ".join(WEIGHER_NAMES)))
        multiplier = _typed(item, "multiplier", (int, float), source, where,
                            required=False, default=1.0)
        specs.append((name, float(multiplier)))
    return specs


def _parse_expected(doc, source):
    if doc is None:
        return None
    where = "expected"
    if not isinstance(doc, dict):
        _fail(source, "'expected' must be an object")
    _reject_unknown(doc, ("host", "victims", "cost"), source, where)
    host = _typed(doc, "host", str, source, where)
    victims = doc.get("victims", [])
    if not isinstance(victims, list):
        _fail(source, "%s field 'victims' must be a list" % where)
    cost = _typed(doc, "cost", (int, float), source, where, required=False)
    out = {"host": host, "victims": [str(v) for v in victims]}
    if cost is not None:
        out["cost"] = float(cost)
    return out


TOP_LEVEL_FIELDS = (
    "label", "hosts", "flavors", "instances", "request", "workload",
    "scheduler", "stop", "weighers", "cost_fn", "seed",
    "deterministic_ties", "expected",
)


def parse_scenario(doc, source="<scenario>"):
    if not isinstance(doc, dict):
        _fail(source, "scenario document must be a JSON object")
    _reject_unknown(doc, TOP_LEVEL_FIELDS, source, "scenario")
    label = _typed(doc, "label", str, source, "scenario", required=False,
                   default="scenario")
    hosts = _parse_hosts(doc.get("hosts"), source)
    catalog = _parse_flavors(doc.get("flavors"), source)
    preload = _parse_instances(doc.get("instances"), hosts, catalog, source)
    has_request = "request" in doc
    has_workload = "workload" in doc
    if has_request == has_workload:
        _fail(source, "scenario needs exactly one of 'request' or 'workload'")
    if has_request:
        workload = _parse_request(doc["request"], catalog, source)
    else:
        workload = _parse_workload(doc["workload"], catalog, source)
    scheduler = _typed(doc, "scheduler", str, source, "scenario",
                       required=False, default="preemptible_aware")
    if scheduler not in SCHEDULERS:
        _fail(source, "field 'scheduler' must be one of %s"
              % ", ".join(SCHEDULERS))
    stop = _parse_stop(doc.get("stop"), source)
    weighers = _parse_weighers(doc.get("weighers"), source)
    cost_fn = _typed(doc, "cost_fn", str, source, "scenario", required=False,
                     default="partial_hour")
    if cost_fn not in COST_FUNCTIONS:
        _fail(source, "field 'cost_fn' must be one of %s"
              % ", ".join(sorted(COST_FUNCTIONS)))
    seed = _typed(doc, "seed", int, source, "scenario", required=False)
    ties = _typed(doc, "deterministic_ties", bool, source, "scenario",
                  required=False, default=False)
    expected = _parse_expected(doc.get("expected"), source)
    return Scenario(label, hosts, catalog, preload, workload, scheduler,
                    stop, weighers, cost_fn, seed, ties, expected)


def load_scenario(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ScenarioError("cannot read scenario %s: %s" % (path, exc))
    except ValueError as exc:
        raise ScenarioError("scenario %s is not valid JSON: %s" % (path, exc))
    return parse_scenario(doc, source=str(path))


def build_cluster(scenario):
    """Materialize the scenario's hosts and preload; sets the clock so
    that every preloaded instance's run time matches its stated value."""
    cluster = Cluster()
    for host in scenario.hosts:
        cluster.add_host(host)
    clock = 0
    for item in scenario.preload:
        clock = max(clock, item.run_time_min)
    cluster.clock = clock
    for item in scenario.preload:
        inst = Instance(item.id, scenario.catalog[item.flavor], item.kind,
                        item.host, start_time=clock - item.run_time_min)
        try:
            cluster.place(inst)
        except SchedulingError as exc:
            raise ScenarioError(
                "preload instance %r does not fit: %s" % (item.id, exc))
    return cluster
