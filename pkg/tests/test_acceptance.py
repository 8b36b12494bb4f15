"""End-to-end checks of the package's core guarantees.

Each test prints one PASS line with its elapsed time; timed checks also
assert their runtime budget.
"""

import random
import time

import pytest
from importlib import resources

from preemptsched import (
    Cluster,
    HostSpec,
    Instance,
    InstanceKind,
    NoFeasibleVictims,
    Request,
    ResourceVector,
    ViewMode,
    WeigherSpec,
    default_host,
    load_scenario,
    normalize,
    oracle_select_victims,
    parse_scenario,
    partial_hour_cost,
    run,
    schedule_preemptible_aware,
    schedule_retry,
    select_victims,
    total_weights,
    zero_disk_flavors,
)
from preemptsched.bench import run_bench
from preemptsched.cluster import ZERO
from preemptsched.errors import CapacityExceeded

FLAVORS = zero_disk_flavors()
FLAVOR_LIST = list(FLAVORS.values())


def _passed(name, elapsed, budget=None):
    line = "PASS %s (%.3f s" % (name, elapsed)
    if budget is not None:
        line += " < %g s budget" % budget
    print(line + ")")


def _flavor_docs():
    return [{"name": f.name, "vcpus": f.vcpus, "ram_mb": f.ram, "disk_gb": 0}
            for f in FLAVOR_LIST]


def _default_host_docs(n):
    return [{"id": "h-%02d" % i, "vcpus": 8, "ram_mb": 16000, "disk_gb": 140}
            for i in range(n)]


def test_bundled_snapshots_replay_exactly():
    expected = {
        "test1": ("host-B", ["BP1"], 11.0),
        "test2": ("host-C", ["CP1"], 1.0),
        "test3": ("host-A", ["AP2", "AP3", "AP4"], 55.0),
        "test4": ("host-B", ["BP3"], 20.0),
    }
    root = resources.files("preemptsched").joinpath("fixtures")
    start = time.perf_counter()
    for label, (host, victims, cost) in expected.items():
        scenario = load_scenario(str(root.joinpath(label + ".json")))
        outcome = run(scenario, deterministic_ties=True).replay_outcome
        assert outcome["host"] == host, label
        assert outcome["victims"] == victims, label
        assert outcome["victim_cost"] == cost, label
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    _passed("snapshot replay: all four published victim sets", elapsed, 1.0)


def test_partial_hour_ordering_and_selection():
    cluster = Cluster([default_host("h")], clock=400)
    for iid, run_time in (("p-120", 120), ("p-119", 119), ("p-61", 61)):
        cluster.place(Instance(iid, FLAVORS["medium"],
                               InstanceKind.PREEMPTIBLE, "h",
                               start_time=400 - run_time))
    cluster.place(Instance("n-1", FLAVORS["medium"], InstanceKind.NORMAL,
                           "h", 0))
    request = Request("r", FLAVORS["medium"], InstanceKind.NORMAL)
    view = cluster.view("h", ViewMode.FULL)
    select_victims(request, view)  # warm the code paths before timing
    start = time.perf_counter()
    costs = {iid: partial_hour_cost(cluster.instances[iid], 400)
             for iid in ("p-120", "p-119", "p-61")}
    assert costs["p-120"] == 0
    assert costs["p-61"] == 1
    assert costs["p-119"] == 59
    assert costs["p-120"] < costs["p-61"] < costs["p-119"]
    selection = select_victims(request, view)
    assert selection.victims == ("p-120",)
    assert selection.cost == 0.0
    elapsed = time.perf_counter() - start
    assert elapsed < 0.001
    _passed("partial-hour cost: 0 < 1 < 59 and the 120-minute instance "
            "selected", elapsed, 0.001)


def test_victim_search_matches_oracle():
    start = time.perf_counter()
    for trial in range(1000):
        rng = random.Random(17 + trial * 9973)
        capacity = ResourceVector(rng.randrange(8, 33),
                                  rng.randrange(16, 65) * 1000, 400)
        cluster = Cluster([HostSpec("h", capacity)], clock=600)
        for i in range(rng.randrange(0, 13)):
            inst = Instance("p-%02d" % i, rng.choice(FLAVOR_LIST),
                            InstanceKind.PREEMPTIBLE, "h",
                            start_time=rng.randrange(0, 601))
            try:
                cluster.place(inst)
            except CapacityExceeded:
                pass
        for i in range(rng.randrange(0, 3)):
            inst = Instance("n-%02d" % i, rng.choice(FLAVOR_LIST),
                            InstanceKind.NORMAL, "h",
                            start_time=rng.randrange(0, 601))
            try:
                cluster.place(inst)
            except CapacityExceeded:
                pass
        request = Request("r", rng.choice(FLAVOR_LIST), InstanceKind.NORMAL)
        view = cluster.view("h", ViewMode.FULL)
        try:
            got = select_victims(request, view)
        except NoFeasibleVictims:
            with pytest.raises(NoFeasibleVictims):
                oracle_select_victims(request, view)
            continue
        want = oracle_select_victims(request, view)
        assert got == want, "trial %d" % trial
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    _passed("victim search equals exhaustive oracle on 1000 random hosts",
            elapsed, 30.0)


def test_retry_pipeline_matches_aware_pipeline():
    start = time.perf_counter()
    for trial in range(500):
        rng = random.Random(40000 + trial)
        n_hosts = rng.randrange(2, 7)
        cluster = Cluster([default_host("h-%02d" % i)
                           for i in range(n_hosts)], clock=480)
        for i in range(rng.randrange(0, n_hosts * 5)):
            if rng.random() < 0.6:
                kind = InstanceKind.PREEMPTIBLE
            else:
                kind = InstanceKind.NORMAL
            inst = Instance("i-%03d" % i, rng.choice(FLAVOR_LIST), kind,
                            "h-%02d" % rng.randrange(n_hosts),
                            start_time=rng.randrange(0, 481))
            try:
                cluster.place(inst)
            except CapacityExceeded:
                pass
        if rng.random() < 0.7:
            kind = InstanceKind.NORMAL
        else:
            kind = InstanceKind.PREEMPTIBLE
        request = Request("r", rng.choice(FLAVOR_LIST), kind)
        aware = schedule_preemptible_aware(request, cluster,
                                           rng=random.Random(trial))
        retry = schedule_retry(request, cluster, rng=random.Random(trial))
        assert (aware is None) == (retry is None), "trial %d" % trial
        if aware is not None:
            assert aware.host == retry.host, "trial %d" % trial
            assert aware.victims == retry.victims, "trial %d" % trial
            assert aware.victim_cost == retry.victim_cost, "trial %d" % trial
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    _passed("retry pipeline matches the single-pass pipeline on 500 random "
            "clusters", elapsed, 60.0)


def test_safety_properties_across_generated_events():
    doc = {
        "label": "safety",
        "hosts": _default_host_docs(12),
        "flavors": _flavor_docs(),
        "workload": {"seed": 424242, "preemptible_fraction": 0.5},
        "scheduler": "preemptible_aware",
        "stop": {"rule": "request_count", "count": 10000},
    }
    scenario = parse_scenario(doc)
    catalog = scenario.catalog

    def observer(cluster, entry):
        used = ZERO
        for host_id in cluster.host_ids():
            spec = cluster.hosts[host_id]
            full = cluster.view(host_id, ViewMode.FULL)
            normal_only = cluster.view(host_id, ViewMode.NORMAL_ONLY)
            assert full.free.nonnegative()
            gap = ZERO
            for inst in full.resident_preemptibles:
                gap = gap + inst.resources
            assert normal_only.free - full.free == gap
            used = used + (spec.capacity - full.free)
        assert used == cluster.total_used()
        if entry["kind"] != "arrival":
            return
        outcome = entry["outcome"]
        if entry["request_kind"] == "preemptible":
            assert not outcome.get("victims")
        if "failure" in outcome and entry["request_kind"] == "normal":
            need = catalog[entry["flavor"]].resources
            for host_id in cluster.host_ids():
                free = cluster.view(host_id, ViewMode.NORMAL_ONLY).free
                assert not need <= free

    start = time.perf_counter()
    report = run(scenario, observer=observer)
    elapsed = time.perf_counter() - start
    m = report.metrics
    assert m["requests"] == 10000
    # the run must actually exercise evictions, failures and expiries
    assert m["preemptions"] > 0
    assert m["normal_failures"] > 0
    assert m["expiries"] > 0
    assert elapsed < 60.0
    _passed("safety: %d events, no losing normal while room remained, no "
            "eviction for preemptibles, conservation held"
            % len(report.events), elapsed, 60.0)


def test_capacity_of_default_fleet():
    doc = {
        "label": "capacity",
        "hosts": _default_host_docs(24),
        "flavors": _flavor_docs(),
        "workload": {
            "preemptible_fraction": 0.0,
            "duration": {"dist": "fixed", "minutes": 10000},
            "arrival": {"process": "fixed", "interval": 1},
            "flavors": ["medium"],
        },
        "scheduler": "preemptible_aware",
        "stop": {"rule": "first_normal_failure"},
    }
    start = time.perf_counter()
    report = run(parse_scenario(doc), seed=0)
    elapsed = time.perf_counter() - start
    m = report.metrics
    assert m["placements"] == 96
    assert m["normal_failures"] == 1
    assert report.snapshots[0]["request"]["id"] == "req-000097"
    _passed("capacity: 24 stock hosts hold exactly 96 normal mediums",
            elapsed)


def test_latency_orderings_hold_by_majority():
    start = time.perf_counter()
    retry_slower = 0
    aware_not_faster = 0
    for i in range(3):
        results = run_bench(hosts=24, calls=130, seed=100 + i)
        mean = {(r.scheduler, r.scenario): r.mean_us for r in results}
        if mean[("retry", "saturated")] \
                > mean[("preemptible_aware", "saturated")]:
            retry_slower += 1
        if mean[("preemptible_aware", "normal-empty")] \
                >= mean[("baseline", "empty")]:
            aware_not_faster += 1
    elapsed = time.perf_counter() - start
    assert retry_slower >= 2, "retry/saturated faster in %d of 3 runs" \
        % (3 - retry_slower)
    assert aware_not_faster >= 2
    assert elapsed < 120.0
    _passed("latency: retry pays for its second pass, awareness costs no "
            "less than the baseline", elapsed, 120.0)


def test_normalization_and_aggregation():
    start = time.perf_counter()
    assert normalize([2, 4, 6]) == [0.0, 0.5, 1.0]
    assert normalize([7, 7, 7, 7]) == [0.0, 0.0, 0.0, 0.0]
    cluster = Cluster([default_host("h1"), default_host("h2"),
                       default_host("h3")])
    views = [cluster.view(h, ViewMode.FULL) for h in cluster.host_ids()]
    first = {"h1": -27.0, "h2": -11.0, "h3": -30.0}
    second = {"h1": 4.0, "h2": 1.0, "h3": 2.0}
    specs = [
        WeigherSpec("a", 1.0, lambda r, v: first[v.host]),
        WeigherSpec("b", 2.5, lambda r, v: second[v.host]),
    ]
    request = Request("r", FLAVORS["medium"], InstanceKind.NORMAL)
    got = total_weights(request, views, specs)
    want = [1.0 * (3.0 / 19.0) + 2.5 * 1.0,
            1.0 * 1.0 + 2.5 * 0.0,
            1.0 * 0.0 + 2.5 * (1.0 / 3.0)]
    for g, w in zip(got, want):
        assert abs(g - w) <= 1e-12
    elapsed = time.perf_counter() - start
    _passed("normalization: exact rescale, degenerate zeros, aggregate "
            "within 1e-12", elapsed)
