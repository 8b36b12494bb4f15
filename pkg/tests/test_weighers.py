import pytest

from preemptsched import (
    Cluster,
    Instance,
    InstanceKind,
    Request,
    ViewMode,
    WeigherSpec,
    default_host,
    default_weighers,
    eviction_cost_rank,
    make_weigher,
    normalize,
    overcommit_rank,
    period_rank,
    total_weight,
    total_weights,
    zero_disk_flavors,
)

FLAVORS = zero_disk_flavors()


def test_normalize_exact():
    assert normalize([2, 4, 6]) == [0.0, 0.5, 1.0]
    assert normalize([6, 2, 4]) == [1.0, 0.0, 0.5]
    assert normalize([-30, -11, -19]) == [0.0, 1.0, 11.0 / 19.0]


def test_normalize_degenerate_goes_to_zero():
    assert normalize([5, 5, 5]) == [0.0, 0.0, 0.0]
    assert normalize([0.0]) == [0.0]


def test_normalize_empty_rejected():
    with pytest.raises(ValueError):
        normalize([])


def _cluster_with(residents):
    cluster = Cluster([default_host("h")], clock=600)
    for iid, flavor, kind, run_time in residents:
        cluster.place(Instance(iid, FLAVORS[flavor], kind, "h",
                               start_time=600 - run_time))
    return cluster


def test_overcommit_rank():
    request = Request("r", FLAVORS["medium"], InstanceKind.NORMAL)
    empty = _cluster_with([]).view("h", ViewMode.FULL)
    assert overcommit_rank(request, empty) == 0.0
    full = _cluster_with([
        ("p%d" % i, "medium", InstanceKind.PREEMPTIBLE, 100)
        for i in range(4)]).view("h", ViewMode.FULL)
    assert overcommit_rank(request, full) == -1.0


def test_period_rank_sums_nonzero_remainders():
    view = _cluster_with([
        ("p1", "medium", InstanceKind.PREEMPTIBLE, 120),  # remainder 0, skipped
        ("p2", "medium", InstanceKind.PREEMPTIBLE, 71),   # 11
        ("p3", "medium", InstanceKind.PREEMPTIBLE, 152),  # 32
        ("n1", "medium", InstanceKind.NORMAL, 37),        # not preemptible
    ]).view("h", ViewMode.FULL)
    request = Request("r", FLAVORS["medium"], InstanceKind.NORMAL)
    assert period_rank(request, view) == -43.0
    assert period_rank(request, _cluster_with([]).view("h", ViewMode.FULL)) == 0.0


def test_eviction_cost_rank():
    request = Request("r", FLAVORS["medium"], InstanceKind.NORMAL)
    rank = eviction_cost_rank()
    empty = _cluster_with([]).view("h", ViewMode.FULL)
    assert rank(request, empty) == 0.0
    full = _cluster_with([
        ("n1", "medium", InstanceKind.NORMAL, 136),
        ("n2", "medium", InstanceKind.NORMAL, 200),
        ("p1", "medium", InstanceKind.PREEMPTIBLE, 71),
        ("p2", "medium", InstanceKind.PREEMPTIBLE, 91),
    ]).view("h", ViewMode.FULL)
    assert rank(request, full) == -11.0


def _three_views():
    cluster = Cluster([default_host("h1"), default_host("h2"),
                       default_host("h3")])
    return [cluster.view(h, ViewMode.FULL) for h in cluster.host_ids()]


def test_total_weights_hand_computed():
    views = _three_views()
    request = Request("r", FLAVORS["medium"], InstanceKind.NORMAL)
    first = {"h1": 2.0, "h2": 4.0, "h3": 6.0}
    second = {"h1": 1.0, "h2": 0.0, "h3": 3.0}
    specs = [
        WeigherSpec("a", 2.0, lambda r, v: first[v.host]),
        WeigherSpec("b", 0.5, lambda r, v: second[v.host]),
    ]
    got = total_weights(request, views, specs)
    want = [2.0 * 0.0 + 0.5 * (1.0 / 3.0),
            2.0 * 0.5 + 0.5 * 0.0,
            2.0 * 1.0 + 0.5 * 1.0]
    assert len(got) == 3
    for g, w in zip(got, want):
        assert abs(g - w) <= 1e-12


def test_total_weights_degenerate_weigher_contributes_nothing():
    views = _three_views()
    request = Request("r", FLAVORS["medium"], InstanceKind.NORMAL)
    specs = [WeigherSpec("flat", 5.0, lambda r, v: 9.0)]
    assert total_weights(request, views, specs) == [0.0, 0.0, 0.0]


def test_total_weights_rejects_empty_inputs():
    views = _three_views()
    request = Request("r", FLAVORS["medium"], InstanceKind.NORMAL)
    with pytest.raises(ValueError):
        total_weights(request, [], [WeigherSpec("a", 1.0, lambda r, v: 0.0)])
    with pytest.raises(ValueError):
        total_weights(request, views, [])


def test_total_weight_indexes_into_population():
    views = _three_views()
    request = Request("r", FLAVORS["medium"], InstanceKind.NORMAL)
    raw = {"h1": 2.0, "h2": 4.0, "h3": 6.0}
    specs = [WeigherSpec("a", 1.0, lambda r, v: raw[v.host])]
    assert total_weight(views[1], request, specs, population=views) == 0.5
    # alone, every weigher degenerates to zero
    assert total_weight(views[1], request, specs) == 0.0
    other = _three_views()[0]
    with pytest.raises(ValueError):
        total_weight(other, request, specs, population=views[1:])


def test_default_weighers_stack():
    stack = default_weighers()
    assert [s.name for s in stack] == ["overcommit", "eviction_cost"]
    assert all(s.multiplier == 1.0 for s in stack)


def test_make_weigher():
    assert make_weigher("overcommit", 2).name == "overcommit"
    assert make_weigher("period", 1).function is period_rank
    assert make_weigher("eviction_cost", 1.5).multiplier == 1.5
    with pytest.raises(ValueError):
        make_weigher("mystery", 1.0)
